#include "msiforge/padic.hpp"

#include <algorithm>

#include "msiforge/util.hpp"

namespace msiforge::padic {

namespace {

constexpr int kEffectivelyExact = 1 << 20;

mpz_class lpow(long long prime, int e) {
    return pow_mpz(mpz_from_ll(prime), static_cast<unsigned long>(e));
}

mpz_class mod_reduce(const mpz_class& x, const mpz_class& mod) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
    return r;
}

mpz_class inv_mod(const mpz_class& x, const mpz_class& mod) {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw std::domain_error("non-invertible element");
    return r;
}

} // namespace

TruncatedPadic::TruncatedPadic(long long prime, const mpz_class& residue, int precision) {
    if (prime < 2) throw std::domain_error("prime must be >= 2");
    if (precision < 0) throw std::domain_error("negative precision");
    prime_ = prime;
    val_ = 0;
    relprec_ = precision;
    unit_ = residue;
    normalize();
}

TruncatedPadic TruncatedPadic::zero(long long prime, int precision) {
    TruncatedPadic z;
    z.prime_ = prime;
    z.unit_ = 0;
    z.val_ = precision;
    z.relprec_ = 0;
    return z;
}

TruncatedPadic TruncatedPadic::from_unit(long long prime, const mpz_class& unit, int valuation, int relprec) {
    TruncatedPadic x;
    x.prime_ = prime;
    x.unit_ = unit;
    x.val_ = valuation;
    x.relprec_ = relprec;
    x.normalize();
    return x;
}

TruncatedPadic TruncatedPadic::from_rational(long long prime, const mpq_class& x, int precision) {
    if (x == 0) return zero(prime, precision);
    mpz_class num = x.get_num(), den = x.get_den();
    mpz_class p = mpz_from_ll(prime);
    int vn = msiforge::valuation(num, p);
    int vd = msiforge::valuation(den, p);
    mpz_class nu = num / lpow(prime, vn);
    mpz_class du = den / lpow(prime, vd);
    int val = vn - vd;
    int relprec = precision - val;
    if (relprec <= 0) return zero(prime, precision);
    mpz_class mod = lpow(prime, relprec);
    mpz_class u = mod_reduce(mod_reduce(nu, mod) * inv_mod(mod_reduce(du, mod), mod), mod);
    return from_unit(prime, u, val, relprec);
}

void TruncatedPadic::normalize() {
    if (relprec_ <= 0) {
        val_ += relprec_;
        relprec_ = 0;
        unit_ = 0;
        return;
    }
    mpz_class mod = lpow(prime_, relprec_);
    unit_ = mod_reduce(unit_, mod);
    if (unit_ == 0) {
        val_ += relprec_;
        relprec_ = 0;
        return;
    }
    int shift = msiforge::valuation(unit_, mpz_from_ll(prime_));
    if (shift > 0) {
        unit_ /= lpow(prime_, shift);
        val_ += shift;
        relprec_ -= shift;
        if (relprec_ <= 0) {
            val_ += relprec_;
            relprec_ = 0;
            unit_ = 0;
        }
    }
}

mpz_class TruncatedPadic::residue() const {
    if (val_ < 0) throw std::domain_error("no integer residue at negative valuation");
    if (relprec_ == 0) return 0;
    mpz_class mod = lpow(prime_, precision());
    return mod_reduce(unit_ * lpow(prime_, val_), mod);
}

TruncatedPadic TruncatedPadic::operator-() const {
    if (relprec_ == 0) return *this;
    return from_unit(prime_, lpow(prime_, relprec_) - unit_, val_, relprec_);
}

TruncatedPadic operator+(const TruncatedPadic& x, const TruncatedPadic& y) {
    if (x.prime_ != y.prime_) throw PrimeMismatch();
    int abs_out = std::min(x.precision(), y.precision());
    int v0 = std::min(x.val_, y.val_);
    int digits = abs_out - v0;
    if (digits <= 0) return TruncatedPadic::zero(x.prime_, abs_out);
    mpz_class sum = x.unit_ * lpow(x.prime_, x.val_ - v0) + y.unit_ * lpow(x.prime_, y.val_ - v0);
    return TruncatedPadic::from_unit(x.prime_, sum, v0, digits);
}

TruncatedPadic operator-(const TruncatedPadic& x, const TruncatedPadic& y) {
    return x + (-y);
}

TruncatedPadic operator*(const TruncatedPadic& x, const TruncatedPadic& y) {
    // Capped-relative: the unit part of a product is known to the minimum of
    // the operands' relative precisions, whatever the valuations.
    if (x.prime_ != y.prime_) throw PrimeMismatch();
    if (x.relprec_ == 0 || y.relprec_ == 0) {
        // x = O(l^a) times y = u l^v + O(l^b) is O(l^{a+v}); both-zero gives a+b.
        if (x.relprec_ == 0 && y.relprec_ == 0)
            return TruncatedPadic::zero(x.prime_, x.val_ + y.val_);
        if (x.relprec_ == 0) return TruncatedPadic::zero(x.prime_, x.val_ + y.val_);
        return TruncatedPadic::zero(x.prime_, y.val_ + x.val_);
    }
    int val = x.val_ + y.val_;
    int rel = std::min(x.relprec_, y.relprec_);
    return TruncatedPadic::from_unit(x.prime_, x.unit_ * y.unit_, val, rel);
}

TruncatedPadic operator/(const TruncatedPadic& x, const TruncatedPadic& y) {
    if (x.prime_ != y.prime_) throw PrimeMismatch();
    if (y.relprec_ == 0) throw DivisionByIndeterminate();
    int val = x.val_ - y.val_;
    if (x.relprec_ == 0) return TruncatedPadic::zero(x.prime_, x.val_ - y.val_);
    int rel = std::min(x.relprec_, y.relprec_);
    mpz_class mod = lpow(x.prime_, rel);
    mpz_class u = mod_reduce(mod_reduce(x.unit_, mod) * inv_mod(mod_reduce(y.unit_, mod), mod), mod);
    return TruncatedPadic::from_unit(x.prime_, u, val, rel);
}

TruncatedPadic TruncatedPadic::mul_exact_integer(const mpz_class& n) const {
    if (n == 0) return zero(prime_, precision());
    if (relprec_ == 0) {
        int vn = msiforge::valuation(n, mpz_from_ll(prime_));
        return zero(prime_, val_ + vn);
    }
    int vn = msiforge::valuation(n, mpz_from_ll(prime_));
    mpz_class un = n / lpow(prime_, vn);
    return from_unit(prime_, unit_ * un, val_ + vn, relprec_);
}

TruncatedPadic TruncatedPadic::div_exact_integer(const mpz_class& n) const {
    if (n == 0) throw std::domain_error("division by zero integer");
    int vn = msiforge::valuation(n, mpz_from_ll(prime_));
    if (relprec_ == 0) return zero(prime_, val_ - vn);
    mpz_class un = n / lpow(prime_, vn);
    mpz_class mod = lpow(prime_, relprec_);
    mpz_class u = mod_reduce(unit_ * inv_mod(mod_reduce(un, mod), mod), mod);
    return from_unit(prime_, u, val_ - vn, relprec_);
}

TruncatedPadic TruncatedPadic::capped_at(int absolute_precision) const {
    if (precision() <= absolute_precision) return *this;
    if (relprec_ == 0) return zero(prime_, absolute_precision);
    if (val_ >= absolute_precision) return zero(prime_, absolute_precision);
    return from_unit(prime_, unit_, val_, absolute_precision - val_);
}

bool TruncatedPadic::congruent(const TruncatedPadic& other) const {
    TruncatedPadic d = *this - other;
    return d.relprec_ == 0;
}

bool TruncatedPadic::congruent(const TruncatedPadic& other, int at_precision) const {
    if (precision() < at_precision || other.precision() < at_precision)
        throw std::invalid_argument("congruence requested beyond known precision");
    TruncatedPadic d = capped_at(at_precision) - other.capped_at(at_precision);
    return d.relprec_ == 0;
}

TruncatedPadic padic_arith(const TruncatedPadic& x, const TruncatedPadic& y, ArithOp op) {
    switch (op) {
        case ArithOp::add: return x + y;
        case ArithOp::sub: return x - y;
        case ArithOp::mul: return x * y;
        case ArithOp::div: return x / y;
    }
    throw std::logic_error("unreachable");
}

PadicSeries::PadicSeries(long long prime, std::vector<TruncatedPadic> coefficients)
    : prime_(prime), coeffs_(std::move(coefficients)) {
    for (const auto& c : coeffs_) {
        if (c.prime() != prime_) throw PrimeMismatch();
    }
}

PadicSeries PadicSeries::zero(long long prime, int terms, int coeff_precision) {
    std::vector<TruncatedPadic> c(static_cast<std::size_t>(terms), TruncatedPadic::zero(prime, coeff_precision));
    return PadicSeries(prime, std::move(c));
}

PadicSeries PadicSeries::identity(long long prime, int terms, int coeff_precision) {
    auto s = zero(prime, terms, coeff_precision);
    if (terms > 1) s.coeffs_[1] = TruncatedPadic(prime, 1, coeff_precision);
    return s;
}

PadicSeries operator+(const PadicSeries& a, const PadicSeries& b) {
    if (a.prime_ != b.prime_) throw PrimeMismatch();
    int T = std::min(a.series_precision(), b.series_precision());
    std::vector<TruncatedPadic> c;
    c.reserve(static_cast<std::size_t>(T));
    for (int n = 0; n < T; ++n) c.push_back(a.coefficient(n) + b.coefficient(n));
    return PadicSeries(a.prime_, std::move(c));
}

PadicSeries operator-(const PadicSeries& a, const PadicSeries& b) {
    if (a.prime_ != b.prime_) throw PrimeMismatch();
    int T = std::min(a.series_precision(), b.series_precision());
    std::vector<TruncatedPadic> c;
    c.reserve(static_cast<std::size_t>(T));
    for (int n = 0; n < T; ++n) c.push_back(a.coefficient(n) - b.coefficient(n));
    return PadicSeries(a.prime_, std::move(c));
}

PadicSeries operator*(const PadicSeries& a, const PadicSeries& b) {
    if (a.prime_ != b.prime_) throw PrimeMismatch();
    int T = std::min(a.series_precision(), b.series_precision());
    int precA = 0, precB = 0;
    for (const auto& c : a.coefficients()) precA = std::max(precA, c.precision());
    for (const auto& c : b.coefficients()) precB = std::max(precB, c.precision());
    std::vector<TruncatedPadic> c(static_cast<std::size_t>(T),
                                  TruncatedPadic::zero(a.prime_, std::max(precA, precB)));
    for (int i = 0; i < T; ++i) {
        for (int j = 0; i + j < T; ++j) {
            if (j >= b.series_precision()) break;
            c[static_cast<std::size_t>(i + j)] =
                c[static_cast<std::size_t>(i + j)] + a.coefficient(i) * b.coefficient(j);
        }
    }
    return PadicSeries(a.prime_, std::move(c));
}

TruncatedPadic PadicSeries::evaluate(const TruncatedPadic& t_value) const {
    if (t_value.relative_precision() > 0 && t_value.valuation() < 1)
        throw std::domain_error("evaluation point outside the open unit disc");
    if (coeffs_.empty()) return TruncatedPadic::zero(prime_, t_value.precision());
    TruncatedPadic r = coeffs_.back();
    for (int n = series_precision() - 2; n >= 0; --n) {
        r = r * t_value + coeffs_[static_cast<std::size_t>(n)];
    }
    return r;
}

PadicSeries formal_integrate(const PadicSeries& s) {
    std::vector<TruncatedPadic> c;
    c.reserve(static_cast<std::size_t>(s.series_precision()) + 1);
    c.push_back(TruncatedPadic::zero(s.prime(), kEffectivelyExact));
    for (int n = 0; n < s.series_precision(); ++n) {
        c.push_back(s.coefficient(n).div_exact_integer(n + 1));
    }
    return PadicSeries(s.prime(), std::move(c));
}

PadicSeries formal_differentiate(const PadicSeries& s) {
    std::vector<TruncatedPadic> c;
    if (s.series_precision() <= 1) return PadicSeries::zero(s.prime(), 1, 0);
    c.reserve(static_cast<std::size_t>(s.series_precision()) - 1);
    for (int n = 1; n < s.series_precision(); ++n) {
        c.push_back(s.coefficient(n).mul_exact_integer(n));
    }
    return PadicSeries(s.prime(), std::move(c));
}

PadicSeries series_compose(const PadicSeries& s, const PadicSeries& g) {
    if (s.prime() != g.prime()) throw PrimeMismatch();
    if (g.series_precision() > 0 && g.coefficient(0).relative_precision() != 0)
        throw std::domain_error("composition requires g(0) = 0");
    int T = std::min(s.series_precision(), g.series_precision());
    if (T <= 0) return PadicSeries::zero(s.prime(), 1, 0);
    int prec = 0;
    for (const auto& c : s.coefficients()) prec = std::max(prec, c.precision());
    PadicSeries r = PadicSeries::zero(s.prime(), T, prec);
    for (int n = s.series_precision() - 1; n >= 0; --n) {
        r = r * g;
        std::vector<TruncatedPadic> c = r.coefficients();
        if (c.empty()) c.push_back(s.coefficient(n));
        else c[0] = c[0] + s.coefficient(n);
        r = PadicSeries(s.prime(), std::move(c));
    }
    return r;
}

PadicSeries series_reverse(const PadicSeries& s) {
    if (s.series_precision() < 2) throw NonUnitLinearTerm();
    if (s.coefficient(0).relative_precision() != 0)
        throw std::domain_error("reversion requires s(0) = 0");
    const TruncatedPadic& s1 = s.coefficient(1);
    if (s1.relative_precision() == 0) throw NonUnitLinearTerm();

    int T = s.series_precision();
    int prec = 0;
    for (const auto& c : s.coefficients()) prec = std::max(prec, c.precision());
    std::vector<TruncatedPadic> r(static_cast<std::size_t>(T), TruncatedPadic::zero(s.prime(), prec + 4));
    r[1] = TruncatedPadic(s.prime(), 1, prec + 4) / s1;
    for (int n = 2; n < T; ++n) {
        // Coefficient n of s(r(t)) with r_n still 0; correct by -c_n / s1.
        PadicSeries comp = series_compose(s, PadicSeries(s.prime(), r));
        r[static_cast<std::size_t>(n)] = -(comp.coefficient(n) / s1);
    }
    return PadicSeries(s.prime(), std::move(r));
}

PadicSeries series_shift(const PadicSeries& s, const TruncatedPadic& t0) {
    int T = s.series_precision();
    std::vector<TruncatedPadic> out(static_cast<std::size_t>(T),
                                    TruncatedPadic::zero(s.prime(), kEffectivelyExact));
    // c'_k = sum_{n>=k} C(n,k) c_n t0^{n-k}
    for (int k = 0; k < T; ++k) {
        TruncatedPadic acc = TruncatedPadic::zero(s.prime(), kEffectivelyExact);
        TruncatedPadic t0pow(s.prime(), 1, kEffectivelyExact);
        bool first = true;
        for (int n = k; n < T; ++n) {
            if (!first) t0pow = t0pow * t0;
            first = false;
            mpz_class binom;
            mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
            acc = acc + s.coefficient(n).mul_exact_integer(binom) * t0pow;
        }
        out[static_cast<std::size_t>(k)] = acc;
    }
    return PadicSeries(s.prime(), std::move(out));
}

std::vector<TruncatedPadic> hensel_root(const std::vector<mpz_class>& poly, long long prime, int m) {
    if (m < 1) throw std::domain_error("precision must be >= 1");
    mpz_class p = mpz_from_ll(prime);
    auto eval_mod = [&](const mpz_class& x, const mpz_class& mod) {
        mpz_class acc = 0;
        for (auto it = poly.rbegin(); it != poly.rend(); ++it) acc = mod_reduce(acc * x + *it, mod);
        return acc;
    };
    std::vector<mpz_class> dpoly;
    for (std::size_t i = 1; i < poly.size(); ++i) dpoly.push_back(poly[i] * static_cast<long>(i));
    auto deval_mod = [&](const mpz_class& x, const mpz_class& mod) {
        mpz_class acc = 0;
        for (auto it = dpoly.rbegin(); it != dpoly.rend(); ++it) acc = mod_reduce(acc * x + *it, mod);
        return acc;
    };

    std::vector<TruncatedPadic> roots;
    for (long long r0 = 0; r0 < prime; ++r0) {
        mpz_class x = mpz_from_ll(r0);
        if (eval_mod(x, p) != 0) continue;
        if (deval_mod(x, p) == 0) throw SingularRoot();
        // Newton lifting with doubling precision.
        int k = 1;
        while (k < m) {
            k = std::min(2 * k, m);
            mpz_class mod = lpow(prime, k);
            mpz_class fx = eval_mod(x, mod);
            mpz_class dfx = deval_mod(x, mod);
            // dfx is a unit mod l, hence mod l^k.
            mpz_class corr = mod_reduce(fx * inv_mod(mod_reduce(dfx, mod), mod), mod);
            x = mod_reduce(x - corr, mod);
        }
        roots.emplace_back(TruncatedPadic(prime, x, m));
    }
    std::sort(roots.begin(), roots.end(), [](const TruncatedPadic& a, const TruncatedPadic& b) {
        return a.residue() < b.residue();
    });
    return roots;
}

} // namespace msiforge::padic
