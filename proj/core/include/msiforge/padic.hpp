#ifndef MSIFORGE_PADIC_HPP
#define MSIFORGE_PADIC_HPP

#include <stdexcept>
#include <vector>

#include <gmpxx.h>

namespace msiforge::padic {

struct DivisionByIndeterminate : std::domain_error {
    DivisionByIndeterminate() : std::domain_error("divisor could be zero at its precision") {}
};
struct NonUnitLinearTerm : std::domain_error {
    NonUnitLinearTerm() : std::domain_error("series has no invertible linear term") {}
};
struct SingularRoot : std::domain_error {
    SingularRoot() : std::domain_error("polynomial and derivative share a root mod l") {}
};
struct PrimeMismatch : std::domain_error {
    PrimeMismatch() : std::domain_error("operands carry different primes") {}
};

/*
 * Element of Q_l known to finite precision.  Internally capped-relative:
 * x = l^val * unit with unit known modulo l^relprec (unit a unit, or 0 when
 * nothing is known beyond "x is divisible by l^val").  precision() is the
 * number of known absolute digits, val + relprec.  val may be negative; the
 * workflow divides series coefficients by n+1, which leaves Z_l.
 *
 * Arithmetic keeps the interval contract: the true value always lies in the
 * tracked residue class at the tracked precision.  Absolute precision of
 * add/sub/mul is min of the operands'; division subtracts the divisor's
 * valuation on top.
 */
class TruncatedPadic {
public:
    // x = residue known mod l^precision (residue need not be reduced).
    TruncatedPadic(long long prime, const mpz_class& residue, int precision);
    // Zero known to the given absolute precision.
    static TruncatedPadic zero(long long prime, int precision);
    static TruncatedPadic from_unit(long long prime, const mpz_class& unit, int valuation, int relprec);
    // Reduction of an exact rational (denominator coprime to l after removing
    // l-powers) to the given absolute precision.
    static TruncatedPadic from_rational(long long prime, const mpq_class& x, int precision);

    long long prime() const { return prime_; }
    int valuation() const { return val_; }     // lower bound; exact when unit known
    int precision() const { return val_ + relprec_; } // known absolute digits
    int relative_precision() const { return relprec_; }
    bool is_zero_at_precision() const { return relprec_ == 0; }

    // Canonical integer residue in [0, l^precision) for val >= 0 elements;
    // throws for negative valuation (no integer representative).
    mpz_class residue() const;
    // Unit part modulo l^relprec.
    const mpz_class& unit() const { return unit_; }

    TruncatedPadic operator-() const;
    friend TruncatedPadic operator+(const TruncatedPadic& x, const TruncatedPadic& y);
    friend TruncatedPadic operator-(const TruncatedPadic& x, const TruncatedPadic& y);
    friend TruncatedPadic operator*(const TruncatedPadic& x, const TruncatedPadic& y);
    friend TruncatedPadic operator/(const TruncatedPadic& x, const TruncatedPadic& y);

    TruncatedPadic mul_exact_integer(const mpz_class& n) const;
    TruncatedPadic div_exact_integer(const mpz_class& n) const; // n != 0
    // Re-cap to at most the given absolute precision.
    TruncatedPadic capped_at(int absolute_precision) const;

    // Congruence at the shared known precision (or the given one).
    bool congruent(const TruncatedPadic& other) const;
    bool congruent(const TruncatedPadic& other, int at_precision) const;

private:
    TruncatedPadic() = default;
    void normalize();
    long long prime_ = 0;
    mpz_class unit_;
    int val_ = 0;
    int relprec_ = 0;
};

enum class ArithOp { add, sub, mul, div };
TruncatedPadic padic_arith(const TruncatedPadic& x, const TruncatedPadic& y, ArithOp op);

/*
 * Finite-precision power series sum_{n<T} c_n t^n + O(t^T) with TruncatedPadic
 * coefficients; T = series_precision().
 */
class PadicSeries {
public:
    PadicSeries(long long prime, std::vector<TruncatedPadic> coefficients);
    static PadicSeries zero(long long prime, int terms, int coeff_precision);
    static PadicSeries identity(long long prime, int terms, int coeff_precision); // t

    long long prime() const { return prime_; }
    int series_precision() const { return static_cast<int>(coeffs_.size()); }
    const TruncatedPadic& coefficient(int n) const { return coeffs_.at(static_cast<std::size_t>(n)); }
    const std::vector<TruncatedPadic>& coefficients() const { return coeffs_; }

    friend PadicSeries operator+(const PadicSeries& a, const PadicSeries& b);
    friend PadicSeries operator-(const PadicSeries& a, const PadicSeries& b);
    friend PadicSeries operator*(const PadicSeries& a, const PadicSeries& b);

    // Horner evaluation; requires valuation(t_value) >= 1 for the tail bound.
    TruncatedPadic evaluate(const TruncatedPadic& t_value) const;

private:
    long long prime_;
    std::vector<TruncatedPadic> coeffs_;
};

// F(t) = sum c_n/(n+1) t^{n+1}; constant term 0, one more known term.
PadicSeries formal_integrate(const PadicSeries& s);
// Termwise d/dt, the left inverse of formal_integrate.
PadicSeries formal_differentiate(const PadicSeries& s);

// s(g(t)) truncated; requires g(0) = 0.
PadicSeries series_compose(const PadicSeries& s, const PadicSeries& g);
// r with s(r(t)) = t to series precision; requires s(0) = 0, s'(0) a unit in
// the lax sense of being nonzero with known valuation (the valuation may be
// negative or positive; NonUnitLinearTerm if s'(0) is indeterminate).
PadicSeries series_reverse(const PadicSeries& s);
// g(t) = f(t0 + t), the recentering used for additivity of tiny integrals.
PadicSeries series_shift(const PadicSeries& s, const TruncatedPadic& t0);

// All simple roots of poly mod l lifted to precision m (Newton).  The input is
// scanned mod l; a repeated root there raises SingularRoot.
std::vector<TruncatedPadic> hensel_root(const std::vector<mpz_class>& poly, long long prime, int m);

} // namespace msiforge::padic

#endif
