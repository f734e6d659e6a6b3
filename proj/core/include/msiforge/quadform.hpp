#ifndef MSIFORGE_QUADFORM_HPP
#define MSIFORGE_QUADFORM_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

namespace msiforge::quad {

struct NotPositiveDefinite : std::domain_error {
    NotPositiveDefinite() : std::domain_error("form is not positive definite") {}
};
struct DiscriminantMismatch : std::domain_error {
    DiscriminantMismatch() : std::domain_error("forms have different discriminants") {}
};
struct FactorBaseInsufficient : std::runtime_error {
    FactorBaseInsufficient() : std::runtime_error("factor base does not reach the class within the word bound") {}
};
struct PrecisionExhausted : std::runtime_error {
    PrecisionExhausted() : std::runtime_error("floating precision too low to round class polynomial") {}
};

// Negative discriminant, = 0 or 1 mod 4.
class Discriminant {
public:
    explicit Discriminant(long long value);
    long long value() const { return value_; }
    bool operator==(const Discriminant& o) const { return value_ == o.value_; }

private:
    long long value_;
};

/*
 * Primitive positive definite integral binary quadratic form a x^2 + b xy + c y^2.
 * Reduced means |b| <= a <= c, with b >= 0 when |b| = a or a = c.
 */
class QuadForm {
public:
    QuadForm(long long a, long long b, long long c);

    long long a() const { return a_; }
    long long b() const { return b_; }
    long long c() const { return c_; }
    long long discriminant() const { return b_ * b_ - 4 * a_ * c_; }

    bool is_reduced() const;
    bool is_principal() const;
    QuadForm inverse() const; // [a,-b,c], reduced

    bool operator==(const QuadForm& o) const { return a_ == o.a_ && b_ == o.b_ && c_ == o.c_; }
    bool operator!=(const QuadForm& o) const { return !(*this == o); }
    // Enumeration order: a asc, |b| asc, c asc, then positive b before negative.
    bool operator<(const QuadForm& o) const;

private:
    long long a_, b_, c_;
};

QuadForm principal_form(const Discriminant& d);

// Gauss reduction; unique reduced representative of the equivalence class.
QuadForm reduce_form(const QuadForm& f);

// Gauss composition of two forms of the same discriminant, reduced output.
QuadForm compose(const QuadForm& f, const QuadForm& g);

QuadForm power(const QuadForm& f, unsigned long e);

// All reduced primitive forms of discriminant d in enumeration order; size = h(d).
std::vector<QuadForm> enumerate_class_group(const Discriminant& d);

long long class_number(const Discriminant& d);

// Reduced class of an ideal of norm q, if q splits or ramifies; absent if inert.
std::optional<QuadForm> prime_form(const Discriminant& d, long long q);

// Word w = (g_1, ..., g_k) of prime forms over the base with g_1 * ... * g_k ~ f,
// found by breadth-first search over products.  word_cap <= 0 selects the
// default bound 3 * ceil(log2 h).
std::vector<QuadForm> factor_class(const QuadForm& f, const std::vector<long long>& factor_base,
                                   long long word_cap = 0);

// CM point tau = (-b + sqrt(D)) / (2a) attached to a form, kept as exact data.
class CMPoint {
public:
    explicit CMPoint(const QuadForm& form);
    const QuadForm& form() const { return form_; }
    // Re(tau) = -b/(2a) as a reduced fraction.
    mpq_class tau_re() const;
    // Im(tau)^2 = |D|/(4a^2) as a reduced fraction (Im itself is a surd).
    mpq_class tau_im_squared() const;

private:
    QuadForm form_;
};

// Monic integer polynomial of degree h(d) with the j(tau_f) as roots, computed
// by high-precision evaluation of j = E4^3/Delta.  Coefficients returned
// constant term first.  Throws PrecisionExhausted when rounding residual
// exceeds 0.25 at the given float precision.
std::vector<mpz_class> hilbert_class_poly(const Discriminant& d, unsigned long float_precision_bits);

// Retry wrapper that doubles the float precision until rounding succeeds.
std::vector<mpz_class> hilbert_class_poly_auto(const Discriminant& d);

} // namespace msiforge::quad

#endif
