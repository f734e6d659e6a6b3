#include "msiforge/coleman.hpp"

#include <algorithm>

#include "msiforge/util.hpp"

namespace msiforge::coleman {

using padic::PadicSeries;
using padic::TruncatedPadic;

QExpansion eigenform_qexp(const modsym::EigenData& f, int terms) {
    QExpansion out;
    out.kind = ExpansionKind::eigenform;
    out.coefficients.assign(static_cast<std::size_t>(terms) + 1, mpq_class(0));
    if (terms >= 1) out.coefficients[1] = 1;

    std::vector<mpz_class> a(static_cast<std::size_t>(terms) + 1, 0);
    if (terms >= 1) a[1] = 1;
    for (long long q : primes_up_to(terms)) {
        auto it = f.eigenvalues.find(q);
        if (it == f.eigenvalues.end()) throw MissingEigenvalue();
        mpz_class aq = it->second;
        // prime powers
        mpz_class prev = 1, cur = aq;
        long long qk = q;
        while (qk <= terms) {
            a[static_cast<std::size_t>(qk)] = cur;
            if (qk > terms / q) break;
            mpz_class next;
            if (f.level % q == 0) {
                next = aq * cur; // U_q eigenvalue chain
            } else {
                next = aq * cur - mpz_from_ll(q) * prev;
            }
            prev = cur;
            cur = next;
            qk *= q;
        }
    }
    // multiplicativity across coprime factors
    for (long long n = 2; n <= terms; ++n) {
        long long m = n;
        mpz_class val = 1;
        for (long long p = 2; p * p <= m; ++p) {
            if (m % p == 0) {
                long long pk = 1;
                while (m % p == 0) {
                    m /= p;
                    pk *= p;
                }
                val *= a[static_cast<std::size_t>(pk)];
            }
        }
        if (m > 1) val *= a[static_cast<std::size_t>(m)];
        a[static_cast<std::size_t>(n)] = val;
    }
    for (long long n = 1; n <= terms; ++n) out.coefficients[static_cast<std::size_t>(n)] = mpq_class(a[static_cast<std::size_t>(n)]);
    return out;
}

namespace {

std::vector<mpz_class> series_mul_z(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, int T) {
    std::vector<mpz_class> c(static_cast<std::size_t>(T), 0);
    for (int i = 0; i < T && i < static_cast<int>(a.size()); ++i) {
        if (a[static_cast<std::size_t>(i)] == 0) continue;
        for (int j = 0; i + j < T && j < static_cast<int>(b.size()); ++j) {
            c[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
        }
    }
    return c;
}

// Inverse of a series with constant term 1.
std::vector<mpz_class> series_inv_z(const std::vector<mpz_class>& a, int T) {
    std::vector<mpz_class> inv(static_cast<std::size_t>(T), 0);
    inv[0] = 1;
    for (int n = 1; n < T; ++n) {
        mpz_class acc = 0;
        for (int k = 1; k <= n && k < static_cast<int>(a.size()); ++k) {
            acc += a[static_cast<std::size_t>(k)] * inv[static_cast<std::size_t>(n - k)];
        }
        inv[static_cast<std::size_t>(n)] = -acc;
    }
    return inv;
}

} // namespace

QExpansion j_qexp(int terms) {
    if (terms < 2) throw std::domain_error("need at least two terms of j");
    // Work to q^T with T = terms + 1 so the shift by 1/q leaves `terms` terms.
    int T = terms + 2;

    // E4 = 1 + 240 sum sigma3(n) q^n
    std::vector<mpz_class> e4(static_cast<std::size_t>(T), 0);
    e4[0] = 1;
    for (int n = 1; n < T; ++n) {
        mpz_class s3 = 0;
        for (int d = 1; d <= n; ++d)
            if (n % d == 0) s3 += mpz_class(d) * d * d;
        e4[static_cast<std::size_t>(n)] = 240 * s3;
    }
    // eta-quotient: Delta / q = prod (1 - q^n)^24
    std::vector<mpz_class> f(static_cast<std::size_t>(T), 0);
    f[0] = 1;
    for (int n = 1; n < T; ++n) {
        // multiply by (1 - q^n)
        for (int k = T - 1; k >= n; --k) f[static_cast<std::size_t>(k)] -= f[static_cast<std::size_t>(k - n)];
    }
    std::vector<mpz_class> f24 = f;
    for (int i = 0; i < 3; ++i) f24 = series_mul_z(f24, f24, T); // f^8
    std::vector<mpz_class> f8 = f24;
    f24 = series_mul_z(f24, f24, T);  // f^16
    f24 = series_mul_z(f24, f8, T);   // f^24

    auto g = series_mul_z(series_mul_z(e4, series_mul_z(e4, e4, T), T), series_inv_z(f24, T), T);
    // j = (1/q) * g(q) = 1/q + g1 + g2 q + ...
    QExpansion out;
    out.kind = ExpansionKind::j_function;
    out.coefficients.reserve(static_cast<std::size_t>(terms));
    for (int n = 0; n < terms; ++n) out.coefficients.emplace_back(g[static_cast<std::size_t>(n) + 1]);
    return out;
}

LocalExpansion expansion_at_cusp(const QExpansion& f, long long ell, int m, int terms) {
    if (f.kind != ExpansionKind::eigenform) throw std::domain_error("cusp expansion expects an eigenform");
    // omega = sum_{n>=1} a_n q^{n-1} dq
    std::vector<TruncatedPadic> coeffs;
    coeffs.reserve(static_cast<std::size_t>(terms));
    for (int n = 1; n <= terms; ++n) {
        mpq_class an = (static_cast<std::size_t>(n) < f.coefficients.size())
                           ? f.coefficients[static_cast<std::size_t>(n)]
                           : mpq_class(0);
        coeffs.push_back(TruncatedPadic::from_rational(ell, an, m));
    }
    return LocalExpansion(LocalParameter::q_at_cusp, TruncatedPadic::zero(ell, m), PadicSeries(ell, std::move(coeffs)));
}

namespace {

// power series multiplication by (qP + s) in the s-variable, truncated to T terms
std::vector<TruncatedPadic> advance_power(const std::vector<TruncatedPadic>& v, const TruncatedPadic& qP,
                                          long long ell, int work, int T) {
    std::vector<TruncatedPadic> w(static_cast<std::size_t>(T), TruncatedPadic::zero(ell, work));
    for (int i = 0; i < T; ++i) {
        w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] + v[static_cast<std::size_t>(i)] * qP;
        if (i + 1 < T) w[static_cast<std::size_t>(i + 1)] = w[static_cast<std::size_t>(i + 1)] + v[static_cast<std::size_t>(i)];
    }
    return w;
}

// j(qP + s) - jP as a series in s, from the exact q-expansion of j.
PadicSeries j_shift_series(const QExpansion& j, const TruncatedPadic& jP, const TruncatedPadic& qP,
                           long long ell, int work, int T) {
    // principal part: 1/(qP + s) = sum_k (-1)^k s^k / qP^{k+1}
    TruncatedPadic one(ell, 1, work);
    std::vector<TruncatedPadic> total(static_cast<std::size_t>(T), TruncatedPadic::zero(ell, work));
    TruncatedPadic qinv = one / qP;
    TruncatedPadic pw = qinv;
    for (int k = 0; k < T; ++k) {
        total[static_cast<std::size_t>(k)] = (k % 2 == 0) ? pw : -pw;
        pw = pw * qinv;
    }
    // holomorphic part: sum_{n>=0} c_n (qP + s)^n
    std::vector<TruncatedPadic> power(static_cast<std::size_t>(T), TruncatedPadic::zero(ell, work));
    power[0] = one;
    const auto& c = j.coefficients;
    for (std::size_t n = 0; n < c.size(); ++n) {
        TruncatedPadic cn = TruncatedPadic::from_rational(ell, c[n], work);
        for (int i = 0; i < T; ++i)
            total[static_cast<std::size_t>(i)] = total[static_cast<std::size_t>(i)] + cn * power[static_cast<std::size_t>(i)];
        if (n + 1 < c.size()) power = advance_power(power, qP, ell, work, T);
    }
    total[0] = total[0] - jP;
    return PadicSeries(ell, std::move(total));
}

} // namespace

LocalExpansion expansion_in_j(const QExpansion& f, const TruncatedPadic& jP, const TruncatedPadic& qP,
                              long long ell, int m, int terms) {
    if (f.kind != ExpansionKind::eigenform) throw std::domain_error("expansion expects an eigenform");
    if (qP.valuation() < 1) throw OutOfDisc();
    int T = terms;
    int work = m + 2 * T + 8;
    // j-coefficients must reach the working precision: the n-th term sits at
    // valuation n for disc points.
    QExpansion j = j_qexp(work + 2);

    // t = J(s) with s = q - qP; J(0) = j(qP) - jP must vanish at precision.
    PadicSeries J = j_shift_series(j, jP, qP, ell, work, T);
    if (J.coefficient(0).relative_precision() != 0)
        throw std::domain_error("jP does not match j(qP) at working precision");
    if (J.coefficient(1).relative_precision() == 0) throw padic::NonUnitLinearTerm();

    // s = R(t), the reversion.
    PadicSeries R = padic::series_reverse(J);

    // omega in q: sum a_n (qP + s)^{n-1} d(qP + s) = phi(s) ds
    std::vector<TruncatedPadic> phi(static_cast<std::size_t>(T), TruncatedPadic::zero(ell, work));
    std::vector<TruncatedPadic> power(static_cast<std::size_t>(T), TruncatedPadic::zero(ell, work));
    power[0] = TruncatedPadic(ell, 1, work); // (qP + s)^0
    for (int n = 1; n <= T; ++n) {
        mpq_class an = (static_cast<std::size_t>(n) < f.coefficients.size())
                           ? f.coefficients[static_cast<std::size_t>(n)]
                           : mpq_class(0);
        TruncatedPadic cn = TruncatedPadic::from_rational(ell, an, work);
        for (int i = 0; i < T; ++i)
            phi[static_cast<std::size_t>(i)] = phi[static_cast<std::size_t>(i)] + cn * power[static_cast<std::size_t>(i)];
        power = advance_power(power, qP, ell, work, T);
    }
    PadicSeries phi_s(ell, std::move(phi));

    // omega in t: phi(R(t)) * R'(t) dt
    PadicSeries omega_t = padic::series_compose(phi_s, R) * padic::formal_differentiate(R);
    return LocalExpansion(LocalParameter::j_minus_jP, jP, omega_t);
}

TruncatedPadic tiny_integral(const LocalExpansion& exp, const TruncatedPadic& t_value) {
    if (t_value.relative_precision() > 0 && t_value.valuation() < 1) throw OutOfDisc();
    PadicSeries F = padic::formal_integrate(exp.series);
    TruncatedPadic value = F.evaluate(t_value);
    if (t_value.relative_precision() == 0) {
        // t indistinguishable from zero: integral is zero at matching precision
        return TruncatedPadic::zero(exp.series.prime(), value.precision());
    }
    // Tail bound: terms n >= T of F have valuation at least
    // (n+1) v(t) + cmin - v_l(n+1); minimize over a window past T.
    long long ell = exp.series.prime();
    int T = exp.series.series_precision();
    int vt = t_value.valuation();
    int cmin = 0;
    for (const auto& c : exp.series.coefficients()) {
        if (c.relative_precision() > 0) cmin = std::min(cmin, c.valuation());
    }
    int window = 64;
    int tail = INT32_MAX;
    for (int n = T; n < T + window; ++n) {
        int vl = 0;
        long long k = n + 1;
        while (k % ell == 0) {
            k /= ell;
            ++vl;
        }
        tail = std::min(tail, (n + 1) * vt + cmin - vl);
    }
    return value.capped_at(std::min(value.precision(), tail));
}

TruncatedPadic hecke_symmetrize(const std::vector<std::pair<TruncatedPadic, TruncatedPadic>>& pairs,
                                const mpz_class& a_ell, long long ell) {
    mpz_class norm = mpz_from_ll(ell) + 1 - a_ell;
    if (norm % mpz_from_ll(ell) == 0) throw NonUnitNormalizer();
    if (pairs.empty()) throw std::domain_error("no neighbor data");
    TruncatedPadic acc = TruncatedPadic::zero(ell, pairs.front().first.precision());
    bool first = true;
    for (const auto& [left, right] : pairs) {
        TruncatedPadic term = right - left;
        acc = first ? term : acc + term;
        first = false;
    }
    return acc.div_exact_integer(norm);
}

namespace {

void append_entry(PeriodVector& pv, const std::vector<mpq_class>& dual, const modsym::HomologyClass& gamma,
                  long long ell, int m, const FormId& id) {
    mpq_class acc = 0;
    for (std::size_t i = 0; i < dual.size(); ++i) acc += dual[i] * mpq_class(gamma.coords[i]);
    // denominator must be an l-unit
    mpz_class den = acc.get_den();
    if (den % mpz_from_ll(ell) == 0) throw DenominatorNotUnit();
    pv.entries.push_back(TruncatedPadic::from_rational(ell, acc, m));
    pv.form_ids.push_back(id);
}

} // namespace

PeriodVector period_vector_rational(const modsym::HomologyClass& gamma,
                                    const std::vector<modsym::EigenData>& eigendata, long long ell, int m,
                                    const PeriodOptions& opts) {
    PeriodVector pv;
    pv.prime = ell;
    pv.precision = m;
    for (const auto& f : eigendata) {
        append_entry(pv, f.dual_plus, gamma, ell, m, FormId{f.level, f.newform_id, +1});
        if (!opts.plus_only) append_entry(pv, f.dual_minus, gamma, ell, m, FormId{f.level, f.newform_id, -1});
    }
    return pv;
}

PeriodMatrix period_matrix(const modsym::ManinBasis& basis, const std::vector<modsym::EigenData>& eigendata,
                           long long ell, int m, const PeriodOptions& opts) {
    PeriodMatrix A;
    A.prime = ell;
    A.precision = m;
    mpz_class mod = pow_mpz(mpz_from_ll(ell), static_cast<unsigned long>(m));
    auto reduce_row = [&](const std::vector<mpq_class>& dual, const FormId& id) {
        std::vector<mpz_class> row(dual.size());
        for (std::size_t i = 0; i < dual.size(); ++i) {
            mpz_class den = dual[i].get_den();
            if (den % mpz_from_ll(ell) == 0) throw DenominatorNotUnit();
            mpz_class deninv;
            if (mpz_invert(deninv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t()) == 0)
                throw DenominatorNotUnit();
            mpz_class v = dual[i].get_num() * deninv;
            mpz_fdiv_r(row[i].get_mpz_t(), v.get_mpz_t(), mod.get_mpz_t());
        }
        A.rows.push_back(std::move(row));
        A.form_ids.push_back(id);
    };
    for (const auto& f : eigendata) {
        reduce_row(f.dual_plus, FormId{f.level, f.newform_id, +1});
        if (!opts.plus_only) reduce_row(f.dual_minus, FormId{f.level, f.newform_id, -1});
    }
    (void)basis;
    return A;
}

std::vector<mpz_class> apply_period_matrix(const PeriodMatrix& A, const std::vector<mpz_class>& coords) {
    mpz_class mod = pow_mpz(mpz_from_ll(A.prime), static_cast<unsigned long>(A.precision));
    std::vector<mpz_class> out(A.rows.size(), 0);
    for (std::size_t i = 0; i < A.rows.size(); ++i) {
        mpz_class acc = 0;
        for (std::size_t j = 0; j < coords.size(); ++j) acc += A.rows[i][j] * coords[j];
        mpz_fdiv_r(out[i].get_mpz_t(), acc.get_mpz_t(), mod.get_mpz_t());
    }
    return out;
}

} // namespace msiforge::coleman
