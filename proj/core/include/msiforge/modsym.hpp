#ifndef MSIFORGE_MODSYM_HPP
#define MSIFORGE_MODSYM_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "msiforge/quadform.hpp"

namespace msiforge::modsym {

struct UnsupportedHeckeField : std::runtime_error {
    UnsupportedHeckeField() : std::runtime_error("irrational or non-multiplicity-one Hecke eigensystem") {}
};
struct DiscriminantLevelClash : std::domain_error {
    DiscriminantLevelClash() : std::domain_error("CM discriminant shares a factor with the level") {}
};

using IntMat = std::vector<std::vector<mpz_class>>; // row-major

// Point of P^1(Q); infinity is (1, 0).  Always stored reduced with den >= 0.
struct Cusp {
    long long num = 1;
    long long den = 0;
    Cusp() = default;
    Cusp(long long n, long long d);
    static Cusp infinity() { return Cusp(); }
    bool is_infinity() const { return den == 0; }
    bool operator==(const Cusp& o) const { return num == o.num && den == o.den; }
};

// Independent combinatorial data for X_0(N), used as the rank oracle.
long long p1_size(long long N);     // index of Gamma_0(N) in SL_2(Z)
long long cusp_count_X0(long long N);
long long genus_X0(long long N);

/*
 * Basis of H_1(X_0(N), cusps; Z) presented by Manin symbols: the free module
 * on P^1(Z/N) modulo the 2-term and 3-term relations, with torsion removed.
 * Coordinates of classes refer to the free quotient basis fixed here.
 */
class ManinBasis {
public:
    explicit ManinBasis(long long N);

    long long level() const { return level_; }
    int rank() const { return rank_; }
    int symbol_count() const { return static_cast<int>(symbols_.size()); }
    const std::vector<std::pair<long long, long long>>& symbols() const { return symbols_; }

    // Index of a (u:v) pair after normalization; -1 if not in P^1(Z/N).
    int symbol_index(long long u, long long v) const;
    // Coordinates of the class of the i-th symbol.
    std::vector<mpz_class> symbol_class(int index) const;
    // A lift of a class to the free module on symbols (section of the quotient).
    std::vector<mpz_class> lift(const std::vector<mpz_class>& coords) const;
    // Project a symbol-space vector to quotient coordinates.
    std::vector<mpz_class> project(const std::vector<mpz_class>& symbol_vec) const;

    const std::vector<Cusp>& cusps() const { return cusp_reps_; }
    int cusp_class_index(const Cusp& c) const;
    // An SL2(Z) lift [[a,b],[c,d]] of the i-th symbol, with (c:d) = symbol.
    std::array<long long, 4> symbol_lift_matrix(int index) const;

    ManinBasis(const ManinBasis&) = delete;
    ManinBasis& operator=(const ManinBasis&) = delete;

private:
    long long level_;
    std::vector<std::pair<long long, long long>> symbols_;
    std::map<std::pair<long long, long long>, int> index_;
    int rank_ = 0;
    IntMat projection_; // rank x nsym
    IntMat lift_;       // nsym x rank
    std::vector<Cusp> cusp_reps_;
};

struct HomologyClass {
    long long level = 0;
    std::vector<mpz_class> coords;
    bool is_zero() const;
    bool operator==(const HomologyClass& o) const { return level == o.level && coords == o.coords; }
};

HomologyClass zero_class(const ManinBasis& basis);
HomologyClass operator+(const HomologyClass& a, const HomologyClass& b);
HomologyClass operator-(const HomologyClass& a, const HomologyClass& b);
HomologyClass operator*(const mpz_class& k, const HomologyClass& a);

struct CuspDivisor {
    std::vector<mpz_class> multiplicities; // indexed like ManinBasis::cusps()
    bool is_zero() const;
    mpz_class total() const;
};

// Class of the modular symbol {r -> s}, via the continued-fraction splitting
// into unimodular paths.  Additive: {r->s} + {s->t} = {r->t} exactly.
HomologyClass symbol_from_cusps(const Cusp& r, const Cusp& s, const ManinBasis& basis);

CuspDivisor boundary(const HomologyClass& gamma, const ManinBasis& basis);

// Matrix of T_n (n coprime to N) or U_n (prime n | N), acting on coordinates;
// composite n assembled by multiplicativity and the prime-power recurrence.
IntMat hecke_matrix(const ManinBasis& basis, long long n);
IntMat star_matrix(const ManinBasis& basis);

std::vector<mpz_class> apply_matrix(const IntMat& m, const std::vector<mpz_class>& v);
IntMat matrix_product(const IntMat& a, const IntMat& b);
bool matrix_equal(const IntMat& a, const IntMat& b);

struct EigenData {
    long long level = 0;
    int newform_id = 0;
    std::map<long long, mpz_class> eigenvalues; // prime -> a_q
    HomologyClass plus_generator, minus_generator;
    std::vector<mpq_class> dual_plus, dual_minus; // functionals on coordinates
};

// One EigenData per rational newform, eigen-lines split by the star involution,
// dual functionals normalized to 1 on the matching generator and 0 on the rest.
std::vector<EigenData> eigen_decompose(const ManinBasis& basis, const std::vector<long long>& primes);

// gamma^(1): the ordered product of Hecke operators T_{N(p_i)} over a prime-form
// factorization of the class, applied to the base class.
HomologyClass construction1_class(const quad::QuadForm& cls, const HomologyClass& gamma0,
                                  const std::vector<long long>& factor_base, const ManinBasis& basis);

// gamma^(2): CM pair transported to cusp shadows Re(tau) and joined by the
// continued-fraction paths through the base cusp.  Well-defined up to absolute
// homology, per the construction.
HomologyClass construction2_class(const quad::CMPoint& x0, const quad::CMPoint& xa,
                                  const Cusp& base_cusp, const ManinBasis& basis);

struct StabilizerProbe {
    int trials = 0;
    int fixes = 0;
};
// Samples random factorable classes and counts how many fix gamma0 under the
// construction-1 action.  Diagnostic only; no structure is asserted.
StabilizerProbe stabilizer_probe(const ManinBasis& basis, const HomologyClass& gamma0,
                                 const quad::Discriminant& disc, const std::vector<long long>& factor_base,
                                 int trials, std::uint64_t seed);

} // namespace msiforge::modsym

#endif
