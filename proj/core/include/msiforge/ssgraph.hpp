#ifndef MSIFORGE_SSGRAPH_HPP
#define MSIFORGE_SSGRAPH_HPP

#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <gmpxx.h>

namespace msiforge::ssgraph {

struct UnsupportedEll : std::domain_error {
    UnsupportedEll() : std::domain_error("only the shipped modular polynomials (l = 2, 3) are supported") {}
};
struct RamifiedOrInert : std::domain_error {
    explicit RamifiedOrInert(const char* what) : std::domain_error(what) {}
};
struct DisconnectedComponent : std::runtime_error {
    DisconnectedComponent() : std::runtime_error("path vertex not reachable in the graph") {}
};

// Element a + b*s of F_{p^2}, s^2 = the canonical non-residue.
struct Fp2 {
    long long a = 0, b = 0;
    bool operator==(const Fp2& o) const { return a == o.a && b == o.b; }
    bool operator<(const Fp2& o) const { return a != o.a ? a < o.a : b < o.b; }
};

// F_{p^2} = F_p(sqrt(t)) with t the smallest quadratic non-residue mod p.
class Fp2Field {
public:
    explicit Fp2Field(long long p);
    long long p() const { return p_; }
    long long nonresidue() const { return t_; }

    Fp2 make(long long a, long long b = 0) const;
    Fp2 add(const Fp2& x, const Fp2& y) const;
    Fp2 sub(const Fp2& x, const Fp2& y) const;
    Fp2 mul(const Fp2& x, const Fp2& y) const;
    Fp2 neg(const Fp2& x) const;
    Fp2 inv(const Fp2& x) const;
    Fp2 pow(Fp2 x, unsigned long long e) const;
    bool is_zero(const Fp2& x) const { return x.a == 0 && x.b == 0; }
    bool in_prime_field(const Fp2& x) const { return x.b == 0; }

private:
    long long p_, t_;
};

// Classical modular polynomial Phi_l as static integer data, l in {2, 3}.
struct ModularPolynomial {
    long long ell;
    // (degX, degY, coefficient); symmetric pairs both listed.
    std::vector<std::tuple<int, int, mpz_class>> terms;
    int degree() const { return static_cast<int>(ell) + 1; }
    // Coefficients of Phi_l(x, Y) in Y, for x in F_{p^2}.
    std::vector<Fp2> evaluate_in_y(const Fp2& x, const Fp2Field& field) const;
    bool is_root_pair(const Fp2& x, const Fp2& y, const Fp2Field& field) const;
};

ModularPolynomial modular_polynomial(long long ell);

struct IsogenyGraph {
    long long p = 0, ell = 0;
    long long nonresidue = 0;
    std::vector<Fp2> vertices;              // sorted
    std::vector<std::vector<int>> adjacency; // neighbor indices with multiplicity, sorted
    int vertex_index(const Fp2& j) const;
};

// All supersingular j-invariants of F_{p^2}: breadth-first closure under the
// 2-isogeny relation from a CM seed, each vertex checked by the Hasse
// criterion (x^{p-1} coefficient of (x^3+Ax+B)^{(p-1)/2} vanishing).
std::vector<Fp2> supersingular_j_list(long long p);

// (l+1)-regular multigraph on the supersingular j-invariants; neighbors are
// the roots of Phi_l(j, Y) with multiplicity.
IsogenyGraph build_graph(long long p, long long ell);

// Hasse-invariant supersingularity test for a single j.
bool is_supersingular(long long p, const Fp2& j, const Fp2Field& field);

// Reductions mod p of CM j-invariants under k steps of the norm-l prime form.
// Requires p inert in Q(sqrt(disc)), l split in the order, and H_disc squarefree
// mod p.  base_choice selects the starting root (the torsor has no canonical
// base point).
std::vector<Fp2> cm_reduction_walk(long long disc, long long p, long long ell, int steps,
                                   int base_choice = 0);

struct GraphCycle {
    int basepoint = 0;
    std::vector<int> vertices; // closed: front() == back()
};

// Closes a path with the unique spanning-tree route (breadth-first tree from
// the smallest vertex) from its endpoint back to its start, then removes
// immediate backtracking.
GraphCycle cycle_from_path(const IsogenyGraph& g, const std::vector<int>& path);

// Signed traversal counts of the non-tree edges, a coordinate vector in the
// fundamental cycle basis of the fixed spanning tree.
std::vector<mpz_class> cycle_coordinates(const IsogenyGraph& g, const GraphCycle& cycle);
int cycle_space_rank(const IsogenyGraph& g);

// Undirected edge list (u, v, multiplicity), u <= v, for serialization.
std::vector<std::tuple<int, int, int>> edge_list(const IsogenyGraph& g);

} // namespace msiforge::ssgraph

#endif
