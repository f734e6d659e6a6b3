#ifndef MSIFORGE_MSI_HPP
#define MSIFORGE_MSI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "msiforge/coleman.hpp"
#include "msiforge/modsym.hpp"
#include "msiforge/ssgraph.hpp"

namespace msiforge::msi {

struct EmptyModel : std::runtime_error {
    EmptyModel() : std::runtime_error("path model has no generators or no valid continuation") {}
};
struct WorkCapExceeded : std::runtime_error {
    WorkCapExceeded() : std::runtime_error("search exceeded the configured work cap") {}
};

constexpr std::uint64_t kDefaultWorkCap = 1ULL << 24;

/*
 * Generating set S with a validity relation on successive steps.  Generator
 * values live in a common integer coordinate space (the Manin quotient basis,
 * or the cycle space of an isogeny graph); a path's homology value is the sum
 * of its generators' values.
 */
struct PathModel {
    std::string id;
    std::vector<std::vector<mpz_class>> generators; // value vectors, dim D each
    std::vector<std::vector<int>> validity;         // sorted successor lists
    int max_length = 0;                             // L
    double branching = 0.0;                         // B: measured average out-degree
    std::size_t generator_count() const { return generators.size(); }
    std::size_t value_dimension() const { return generators.empty() ? 0 : generators.front().size(); }
};

// Manin mode: S = the quotient-basis classes, any generator may follow any.
PathModel build_path_model_manin(const modsym::ManinBasis& basis, int L);
// Graph mode: S = directed edges, head-to-tail validity, values in the cycle
// coordinate space.
PathModel build_path_model_graph(const ssgraph::IsogenyGraph& g, int L);

struct Path {
    std::vector<int> indices;
    int length() const { return static_cast<int>(indices.size()); }
};

bool path_valid(const PathModel& model, const Path& p);
std::vector<mpz_class> path_value(const PathModel& model, const Path& p);
// Count of each generator along the path (the generator-space coordinates).
std::vector<mpz_class> path_multiplicity(const PathModel& model, const Path& p);

struct MSIParams {
    long long level = 0;
    long long ell = 0;
    int m = 0;
    int d = 0;
    int L = 0;
    std::string model_id;
};

struct MSIInstance {
    MSIParams params;
    coleman::PeriodVector target;
    std::optional<Path> witness; // test fixtures only
};

// Residues of a period vector as integers mod l^m.
std::vector<mpz_class> period_residues(const coleman::PeriodVector& y);

// y = A * value(path) for a seeded uniform walk of length exactly L.
MSIInstance sample_instance(const PathModel& model, const coleman::PeriodMatrix& A, const std::string& seed);

Path sample_path(const PathModel& model, const std::string& seed, const std::string& domain_tag,
                 int length);

struct SolveResult {
    std::optional<Path> witness;
    std::uint64_t expansions = 0;
};

// Depth-first enumeration of W_L in lexicographic order.
SolveResult solve_bruteforce(const MSIInstance& inst, const PathModel& model, const coleman::PeriodMatrix& A,
                             std::uint64_t work_cap = kDefaultWorkCap);

// Meet-in-the-middle split at ceil(L/2); ~B^(L/2) expansions.
SolveResult solve_mitm(const MSIInstance& inst, const PathModel& model, const coleman::PeriodMatrix& A,
                       std::uint64_t work_cap = kDefaultWorkCap);

bool check_witness(const MSIInstance& inst, const PathModel& model, const coleman::PeriodMatrix& A,
                   const Path& candidate);

/*
 * Solution set of A x = y over Z/l^m, ignoring all path structure: a
 * particular solution plus generators of ker A, via diagonalization adapted
 * to the local ring (pivots are minimal-valuation entries).
 */
struct LinearSolution {
    bool solvable = false;
    std::vector<mpz_class> particular;
    std::vector<std::vector<mpz_class>> kernel;
};

LinearSolution solve_linear_unconstrained(const std::vector<std::vector<mpz_class>>& A,
                                          const std::vector<mpz_class>& y, long long ell, int m);

// Greedy rounding of an unconstrained solution to a valid path; experimental,
// no optimality or success guarantee.
std::optional<Path> round_to_path_experimental(const PathModel& model, const std::vector<mpz_class>& x,
                                               long long ell, int m);

struct CollisionReport {
    bool full_enumeration = false;
    std::uint64_t paths_enumerated = 0;   // valid index sequences
    std::uint64_t distinct_classes = 0;   // distinct homology values
    std::uint64_t colliding_pairs = 0;    // pairs of distinct classes sharing Pi_m
    double predicted = 0.0;               // (#W_L)^2 / (2 l^{md}) with exact #W_L
    double predicted_heuristic = 0.0;     // (B^L)^2 / (2 l^{md})
    double ell_power_md = 0.0;
};

CollisionReport collision_experiment(const PathModel& model, const coleman::PeriodMatrix& A,
                                     std::uint64_t trials, const std::string& seed,
                                     std::uint64_t work_cap = kDefaultWorkCap, int threads = 1);

struct ParameterVerdict {
    bool search_hard = false;     // B^L >= 2^lambda
    bool quantum_margin = false;  // B^(L/2) >= 2^lambda
    bool separated = false;       // l^{md} >= B^{2L}
};

ParameterVerdict parameter_check(long long ell, int m, int d, long long B, int L, int lambda);

// Effective generator-space matrix A * G, reduced mod l^m (d x r).
std::vector<std::vector<mpz_class>> effective_matrix(const PathModel& model, const coleman::PeriodMatrix& A);

} // namespace msiforge::msi

#endif
