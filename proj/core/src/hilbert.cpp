#include <mpfr.h>

#include <cmath>
#include <vector>

#include "msiforge/quadform.hpp"

namespace msiforge::quad {

namespace {

// Minimal complex arithmetic over mpfr, local to this translation unit.
struct Cx {
    mpfr_t re, im;
    explicit Cx(mpfr_prec_t prec) {
        mpfr_init2(re, prec);
        mpfr_init2(im, prec);
        mpfr_set_ui(re, 0, MPFR_RNDN);
        mpfr_set_ui(im, 0, MPFR_RNDN);
    }
    Cx(const Cx& o) {
        mpfr_init2(re, mpfr_get_prec(o.re));
        mpfr_init2(im, mpfr_get_prec(o.im));
        mpfr_set(re, o.re, MPFR_RNDN);
        mpfr_set(im, o.im, MPFR_RNDN);
    }
    Cx& operator=(const Cx& o) {
        if (this != &o) {
            mpfr_set(re, o.re, MPFR_RNDN);
            mpfr_set(im, o.im, MPFR_RNDN);
        }
        return *this;
    }
    ~Cx() {
        mpfr_clear(re);
        mpfr_clear(im);
    }
};

void cx_add(Cx& r, const Cx& a, const Cx& b) {
    mpfr_add(r.re, a.re, b.re, MPFR_RNDN);
    mpfr_add(r.im, a.im, b.im, MPFR_RNDN);
}

void cx_sub(Cx& r, const Cx& a, const Cx& b) {
    mpfr_sub(r.re, a.re, b.re, MPFR_RNDN);
    mpfr_sub(r.im, a.im, b.im, MPFR_RNDN);
}

void cx_mul(Cx& r, const Cx& a, const Cx& b, mpfr_t t1, mpfr_t t2, mpfr_t t3) {
    // (ar*br - ai*bi, ar*bi + ai*br); r may alias a or b, so use scratch.
    mpfr_mul(t1, a.re, b.re, MPFR_RNDN);
    mpfr_mul(t2, a.im, b.im, MPFR_RNDN);
    mpfr_sub(t3, t1, t2, MPFR_RNDN);
    mpfr_mul(t1, a.re, b.im, MPFR_RNDN);
    mpfr_mul(t2, a.im, b.re, MPFR_RNDN);
    mpfr_add(r.im, t1, t2, MPFR_RNDN);
    mpfr_set(r.re, t3, MPFR_RNDN);
}

void cx_div(Cx& r, const Cx& a, const Cx& b, mpfr_t t1, mpfr_t t2, mpfr_t den) {
    mpfr_mul(t1, b.re, b.re, MPFR_RNDN);
    mpfr_mul(t2, b.im, b.im, MPFR_RNDN);
    mpfr_add(den, t1, t2, MPFR_RNDN);
    mpfr_mul(t1, a.re, b.re, MPFR_RNDN);
    mpfr_mul(t2, a.im, b.im, MPFR_RNDN);
    mpfr_add(t1, t1, t2, MPFR_RNDN);
    mpfr_div(t1, t1, den, MPFR_RNDN);
    mpfr_mul(t2, a.im, b.re, MPFR_RNDN);
    Cx tmp(mpfr_get_prec(a.re));
    mpfr_mul(tmp.re, a.re, b.im, MPFR_RNDN);
    mpfr_sub(t2, t2, tmp.re, MPFR_RNDN);
    mpfr_div(r.im, t2, den, MPFR_RNDN);
    mpfr_set(r.re, t1, MPFR_RNDN);
}

std::vector<long long> sigma3_table(long long n) {
    std::vector<long long> s(static_cast<std::size_t>(n) + 1, 0);
    for (long long d = 1; d <= n; ++d) {
        long long d3 = d * d * d;
        for (long long k = d; k <= n; k += d) s[static_cast<std::size_t>(k)] += d3;
    }
    return s;
}

// j(tau) for tau = (-b + sqrt(D)) / (2a), via j = E4^3 / Delta evaluated at
// q = exp(2 pi i tau).
Cx eval_j(long long a, long long b, long long D, mpfr_prec_t prec) {
    mpfr_t pi, sqrtD, t1, t2, t3, qabs, theta, c, s;
    mpfr_inits2(prec, pi, sqrtD, t1, t2, t3, qabs, theta, c, s, static_cast<mpfr_ptr>(nullptr));
    mpfr_const_pi(pi, MPFR_RNDN);
    mpfr_set_si(sqrtD, -D, MPFR_RNDN);
    mpfr_sqrt(sqrtD, sqrtD, MPFR_RNDN);

    // |q| = exp(-pi sqrt(|D|) / a), arg q = -pi b / a.
    mpfr_mul(t1, pi, sqrtD, MPFR_RNDN);
    mpfr_div_si(t1, t1, a, MPFR_RNDN);
    mpfr_neg(t1, t1, MPFR_RNDN);
    mpfr_exp(qabs, t1, MPFR_RNDN);
    mpfr_mul_si(theta, pi, -b, MPFR_RNDN);
    mpfr_div_si(theta, theta, a, MPFR_RNDN);
    mpfr_sin_cos(s, c, theta, MPFR_RNDN);

    Cx q(prec);
    mpfr_mul(q.re, qabs, c, MPFR_RNDN);
    mpfr_mul(q.im, qabs, s, MPFR_RNDN);

    // Enough terms that |q|^n < 2^-(prec+16).
    double rate = M_PI * std::sqrt(static_cast<double>(-D)) / static_cast<double>(a);
    long long nterms = static_cast<long long>((static_cast<double>(prec) + 16.0) * std::log(2.0) / rate) + 4;

    auto sigma3 = sigma3_table(nterms);

    Cx qn(prec), e4(prec), eta(prec), term(prec), one(prec);
    mpfr_set_ui(one.re, 1, MPFR_RNDN);
    e4 = one;
    eta = one;
    qn = q;
    for (long long n = 1; n <= nterms; ++n) {
        // E4 += 240 sigma3(n) q^n
        mpfr_mul_si(term.re, qn.re, 240 * sigma3[static_cast<std::size_t>(n)], MPFR_RNDN);
        mpfr_mul_si(term.im, qn.im, 240 * sigma3[static_cast<std::size_t>(n)], MPFR_RNDN);
        cx_add(e4, e4, term);
        // eta_factor *= (1 - q^n)
        cx_sub(term, one, qn);
        cx_mul(eta, eta, term, t1, t2, t3);
        cx_mul(qn, qn, q, t1, t2, t3);
    }

    // Delta = q * eta^24
    Cx p(prec);
    p = eta;
    for (int i = 0; i < 3; ++i) cx_mul(p, p, p, t1, t2, t3); // eta^8
    Cx e8(prec);
    e8 = p;
    cx_mul(p, p, p, t1, t2, t3);       // eta^16
    cx_mul(p, p, e8, t1, t2, t3);      // eta^24
    cx_mul(p, p, q, t1, t2, t3);       // Delta

    Cx j(prec);
    cx_mul(j, e4, e4, t1, t2, t3);
    cx_mul(j, j, e4, t1, t2, t3);
    cx_div(j, j, p, t1, t2, t3);

    mpfr_clears(pi, sqrtD, t1, t2, t3, qabs, theta, c, s, static_cast<mpfr_ptr>(nullptr));
    return j;
}

} // namespace

std::vector<mpz_class> hilbert_class_poly(const Discriminant& d, unsigned long float_precision_bits) {
    long long D = d.value();
    if (-D > 4000) throw std::domain_error("discriminant beyond desk-scale bound 4000");
    mpfr_prec_t prec = static_cast<mpfr_prec_t>(float_precision_bits);
    if (prec < 64) prec = 64;

    auto forms = enumerate_class_group(d);
    std::size_t h = forms.size();

    // H(X) = prod (X - j_f), complex coefficients, constant term first.
    std::vector<Cx> coeffs;
    coeffs.reserve(h + 1);
    coeffs.emplace_back(prec);
    mpfr_set_ui(coeffs[0].re, 1, MPFR_RNDN);

    mpfr_t t1, t2, t3;
    mpfr_inits2(prec, t1, t2, t3, static_cast<mpfr_ptr>(nullptr));

    for (const auto& f : forms) {
        Cx j = eval_j(f.a(), f.b(), D, prec);
        coeffs.emplace_back(prec);
        for (std::size_t k = coeffs.size() - 1; k >= 1; --k) {
            Cx shifted = coeffs[k - 1];
            Cx scaled(prec);
            cx_mul(scaled, coeffs[k], j, t1, t2, t3);
            cx_sub(coeffs[k], shifted, scaled);
        }
        Cx scaled(prec);
        cx_mul(scaled, coeffs[0], j, t1, t2, t3);
        mpfr_neg(scaled.re, scaled.re, MPFR_RNDN);
        mpfr_neg(scaled.im, scaled.im, MPFR_RNDN);
        coeffs[0] = scaled;
    }

    // Leading coefficient slot currently holds 1 at index h (monic).
    std::vector<mpz_class> out(h + 1);
    mpfr_t resid, best;
    mpfr_inits2(prec, resid, best, static_cast<mpfr_ptr>(nullptr));
    bool ok = true;
    for (std::size_t k = 0; k <= h; ++k) {
        mpfr_round(t1, coeffs[k].re);
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), t1, MPFR_RNDN);
        mpfr_sub(resid, coeffs[k].re, t1, MPFR_RNDN);
        mpfr_abs(resid, resid, MPFR_RNDN);
        if (mpfr_cmp_d(resid, 0.25) >= 0) ok = false;
        mpfr_abs(best, coeffs[k].im, MPFR_RNDN);
        if (mpfr_cmp_d(best, 0.25) >= 0) ok = false;
        out[k] = z;
    }
    mpfr_clears(t1, t2, t3, resid, best, static_cast<mpfr_ptr>(nullptr));
    mpfr_free_cache();
    if (!ok) throw PrecisionExhausted();
    if (out[h] != 1) throw PrecisionExhausted();
    return out;
}

std::vector<mpz_class> hilbert_class_poly_auto(const Discriminant& d) {
    long long D = d.value();
    auto forms = enumerate_class_group(d);
    double bits = 64.0;
    for (const auto& f : forms) {
        bits += M_PI * std::sqrt(static_cast<double>(-D)) / (static_cast<double>(f.a()) * std::log(2.0));
    }
    bits += 16.0 * static_cast<double>(forms.size());
    unsigned long prec = static_cast<unsigned long>(bits) + 64;
    for (int attempt = 0; attempt < 6; ++attempt) {
        try {
            return hilbert_class_poly(d, prec);
        } catch (const PrecisionExhausted&) {
            prec *= 2;
        }
    }
    throw PrecisionExhausted();
}

} // namespace msiforge::quad
