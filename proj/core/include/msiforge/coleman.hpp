#ifndef MSIFORGE_COLEMAN_HPP
#define MSIFORGE_COLEMAN_HPP

#include <string>
#include <vector>

#include <gmpxx.h>

#include "msiforge/modsym.hpp"
#include "msiforge/padic.hpp"

namespace msiforge::coleman {

struct MissingEigenvalue : std::runtime_error {
    MissingEigenvalue() : std::runtime_error("eigenvalue a_q unavailable for a required prime") {}
};
struct OutOfDisc : std::domain_error {
    OutOfDisc() : std::domain_error("evaluation point lies outside the residue disc") {}
};
struct NonUnitNormalizer : std::domain_error {
    NonUnitNormalizer() : std::domain_error("l+1-a_l is not a unit mod l") {}
};
struct DenominatorNotUnit : std::domain_error {
    DenominatorNotUnit() : std::domain_error("dual functional denominator shares a factor with l") {}
};

enum class ExpansionKind { eigenform, j_function };

// q-expansion with exact rational coefficients.  For kind j_function the
// principal part 1/q is implicit and coefficients() stores a_0 = 744 onward.
struct QExpansion {
    ExpansionKind kind = ExpansionKind::eigenform;
    std::vector<mpq_class> coefficients; // eigenform: a_0 = 0, a_1 = 1, ...
};

// a_n for n <= terms from the Hecke eigenvalues, by multiplicativity and the
// prime-power recurrences.
QExpansion eigenform_qexp(const modsym::EigenData& f, int terms);

// j = 1/q + 744 + 196884 q + ..., exact integers from E4^3 / Delta.
QExpansion j_qexp(int terms);

enum class LocalParameter { q_at_cusp, j_minus_jP };

struct LocalExpansion {
    LocalParameter parameter = LocalParameter::q_at_cusp;
    padic::TruncatedPadic base_value;  // j(P), or 0 at the cusp
    padic::PadicSeries series;         // omega = (sum a_n t^n) dt
    LocalExpansion(LocalParameter p, padic::TruncatedPadic base, padic::PadicSeries s)
        : parameter(p), base_value(std::move(base)), series(std::move(s)) {}
};

// omega_f in the cusp parameter q: series coefficients a_{n+1} mod l^m, so the
// primitive is sum a_n q^n / n.
LocalExpansion expansion_at_cusp(const QExpansion& f, long long ell, int m, int terms);

// omega_f in t = j - j(P), centered at a point qP of the cusp disc with
// j(qP) = jP: obtained by reverting j(q) - jP around qP and substituting.
LocalExpansion expansion_in_j(const QExpansion& f, const padic::TruncatedPadic& jP,
                              const padic::TruncatedPadic& qP, long long ell, int m, int terms);

// F_omega(t_value) for the formal primitive F of the expansion; the reported
// precision accounts for the truncation tail.
padic::TruncatedPadic tiny_integral(const LocalExpansion& exp, const padic::TruncatedPadic& t_value);

// (l+1-a_l)^{-1} * sum_i (right_i - left_i), the Hecke-symmetrized combination.
padic::TruncatedPadic hecke_symmetrize(
    const std::vector<std::pair<padic::TruncatedPadic, padic::TruncatedPadic>>& pairs,
    const mpz_class& a_ell, long long ell);

struct FormId {
    long long level = 0;
    int newform = 0;
    int sign = +1; // +1 or -1
};

struct PeriodVector {
    long long prime = 0;
    int precision = 0;
    std::vector<padic::TruncatedPadic> entries;
    std::vector<FormId> form_ids;
};

struct PeriodOptions {
    bool plus_only = false;
};

// Pi_m(gamma): the dual functionals lambda_{f,eps} evaluated at gamma and
// reduced mod l^m.  Exact; the normative realization of the period map.
PeriodVector period_vector_rational(const modsym::HomologyClass& gamma,
                                    const std::vector<modsym::EigenData>& eigendata, long long ell, int m,
                                    const PeriodOptions& opts = {});

struct PeriodMatrix {
    long long prime = 0;
    int precision = 0;
    std::vector<std::vector<mpz_class>> rows; // d x rank, entries reduced mod l^m
    std::vector<FormId> form_ids;
};

PeriodMatrix period_matrix(const modsym::ManinBasis& basis, const std::vector<modsym::EigenData>& eigendata,
                           long long ell, int m, const PeriodOptions& opts = {});

std::vector<mpz_class> apply_period_matrix(const PeriodMatrix& A, const std::vector<mpz_class>& coords);

} // namespace msiforge::coleman

#endif
