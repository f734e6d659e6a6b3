#include "msiforge/ssgraph.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <queue>
#include <set>

#include "msiforge/quadform.hpp"
#include "msiforge/util.hpp"

namespace msiforge::ssgraph {

// ---------- F_{p^2} ----------

Fp2Field::Fp2Field(long long p) : p_(p) {
    if (p < 3 || !is_prime_u64(static_cast<unsigned long long>(p))) throw std::domain_error("p must be an odd prime");
    t_ = 0;
    for (long long t = 2; t < p; ++t) {
        // Euler criterion
        long long e = (p - 1) / 2;
        long long r = 1, b = t % p;
        long long ee = e;
        while (ee) {
            if (ee & 1) r = (__int128)r * b % p;
            b = (__int128)b * b % p;
            ee >>= 1;
        }
        if (r == p - 1) {
            t_ = t;
            break;
        }
    }
    if (t_ == 0) throw std::logic_error("no quadratic non-residue found");
}

Fp2 Fp2Field::make(long long a, long long b) const {
    a %= p_;
    b %= p_;
    if (a < 0) a += p_;
    if (b < 0) b += p_;
    return Fp2{a, b};
}

Fp2 Fp2Field::add(const Fp2& x, const Fp2& y) const {
    long long a = x.a + y.a;
    long long b = x.b + y.b;
    if (a >= p_) a -= p_;
    if (b >= p_) b -= p_;
    return Fp2{a, b};
}

Fp2 Fp2Field::sub(const Fp2& x, const Fp2& y) const {
    long long a = x.a - y.a;
    long long b = x.b - y.b;
    if (a < 0) a += p_;
    if (b < 0) b += p_;
    return Fp2{a, b};
}

Fp2 Fp2Field::mul(const Fp2& x, const Fp2& y) const {
    // (a1 + b1 s)(a2 + b2 s) = a1 a2 + t b1 b2 + (a1 b2 + a2 b1) s
    long long a = ((__int128)x.a * y.a + (__int128)t_ % p_ * ((__int128)x.b * y.b % p_)) % p_;
    long long b = ((__int128)x.a * y.b + (__int128)x.b * y.a) % p_;
    return Fp2{a, b};
}

Fp2 Fp2Field::neg(const Fp2& x) const {
    return Fp2{x.a ? p_ - x.a : 0, x.b ? p_ - x.b : 0};
}

Fp2 Fp2Field::inv(const Fp2& x) const {
    if (is_zero(x)) throw std::domain_error("inverse of zero");
    // 1/(a + b s) = (a - b s) / (a^2 - t b^2)
    long long norm = (((__int128)x.a * x.a - (__int128)t_ * x.b % p_ * x.b) % p_ + p_) % p_;
    long long ninv = mod_inverse(norm, p_);
    long long a = (__int128)x.a * ninv % p_;
    long long b = (__int128)(p_ - x.b) * ninv % p_;
    return Fp2{a, b % p_};
}

Fp2 Fp2Field::pow(Fp2 x, unsigned long long e) const {
    Fp2 r = make(1);
    while (e) {
        if (e & 1) r = mul(r, x);
        x = mul(x, x);
        e >>= 1;
    }
    return r;
}

// ---------- polynomials over F_{p^2} ----------

namespace {

using Poly = std::vector<Fp2>; // coefficient of Y^i at index i

void poly_trim(Poly& f, const Fp2Field& F) {
    while (!f.empty() && F.is_zero(f.back())) f.pop_back();
}

Poly poly_mod(Poly a, const Poly& m, const Fp2Field& F) {
    poly_trim(a, F);
    int dm = static_cast<int>(m.size()) - 1;
    Fp2 lead_inv = F.inv(m.back());
    while (static_cast<int>(a.size()) - 1 >= dm && !a.empty()) {
        int da = static_cast<int>(a.size()) - 1;
        Fp2 c = F.mul(a.back(), lead_inv);
        for (int i = 0; i <= dm; ++i) {
            a[static_cast<std::size_t>(da - dm + i)] =
                F.sub(a[static_cast<std::size_t>(da - dm + i)], F.mul(c, m[static_cast<std::size_t>(i)]));
        }
        poly_trim(a, F);
    }
    return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& m, const Fp2Field& F) {
    Poly c(a.size() + b.size(), F.make(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (F.is_zero(a[i])) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            c[i + j] = F.add(c[i + j], F.mul(a[i], b[j]));
        }
    }
    return poly_mod(std::move(c), m, F);
}

Poly poly_powmod(Poly base, unsigned long long e, const Poly& m, const Fp2Field& F) {
    Poly r{F.make(1)};
    base = poly_mod(std::move(base), m, F);
    while (e) {
        if (e & 1) r = poly_mulmod(r, base, m, F);
        base = poly_mulmod(base, base, m, F);
        e >>= 1;
    }
    return r;
}

Poly poly_gcd(Poly a, Poly b, const Fp2Field& F) {
    poly_trim(a, F);
    poly_trim(b, F);
    while (!b.empty()) {
        Poly r = poly_mod(a, b, F);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Fp2 inv = F.inv(a.back());
        for (auto& c : a) c = F.mul(c, inv);
    }
    return a;
}

// Divide f by (Y - r); f must vanish at r.
Poly poly_deflate(const Poly& f, const Fp2& r, const Fp2Field& F) {
    Poly q(f.size() - 1, F.make(0));
    Fp2 carry = F.make(0);
    for (int i = static_cast<int>(f.size()) - 1; i >= 1; --i) {
        carry = F.add(f[static_cast<std::size_t>(i)], F.mul(carry, r));
        q[static_cast<std::size_t>(i) - 1] = carry;
    }
    return q;
}

Poly poly_derivative(const Poly& f, const Fp2Field& F) {
    Poly d;
    for (std::size_t i = 1; i < f.size(); ++i) {
        d.push_back(F.mul(f[i], F.make(static_cast<long long>(i % static_cast<std::size_t>(F.p())))));
    }
    poly_trim(d, F);
    return d;
}

// All roots in F_{p^2} with multiplicity, by deterministic equal-degree
// splitting.  The callers' polynomials (Phi_l slices at supersingular j, class
// polynomials at inert p) split completely over F_{p^2}; the squarefree part
// comes from the derivative gcd, which is much cheaper than gcd with
// Y^{p^2} - Y, and every extracted root is verified before deflation.
std::vector<Fp2> poly_roots(Poly f, const Fp2Field& F) {
    std::vector<Fp2> roots;
    poly_trim(f, F);
    if (f.size() <= 1) return roots;
    unsigned long long q = static_cast<unsigned long long>(F.p()) * static_cast<unsigned long long>(F.p());
    for (;;) {
        poly_trim(f, F);
        if (f.size() <= 1) break;
        if (f.size() == 2) {
            roots.push_back(F.mul(F.neg(f[0]), F.inv(f[1])));
            break;
        }
        Poly deriv = poly_derivative(f, F);
        Poly lin = f;
        if (!deriv.empty()) {
            Poly common = poly_gcd(f, deriv, F);
            if (common.size() > 1) {
                // divide the repeated part out
                Poly quot(f.size() - common.size() + 1, F.make(0));
                Poly rem = f;
                Fp2 linv = F.inv(common.back());
                for (int i = static_cast<int>(f.size()) - static_cast<int>(common.size()); i >= 0; --i) {
                    Fp2 cc = F.mul(rem[static_cast<std::size_t>(i) + common.size() - 1], linv);
                    quot[static_cast<std::size_t>(i)] = cc;
                    for (std::size_t k = 0; k < common.size(); ++k) {
                        rem[static_cast<std::size_t>(i) + k] =
                            F.sub(rem[static_cast<std::size_t>(i) + k], F.mul(cc, common[k]));
                    }
                }
                lin = quot;
            }
        } else {
            break; // inseparable: outside our callers' domain
        }
        poly_trim(lin, F);
        if (lin.size() <= 1) break;
        // Peel roots off `lin` by splitting; divide them out of f with multiplicity.
        std::vector<Poly> stack{lin};
        std::vector<Fp2> found;
        std::uint64_t counter = 0;
        while (!stack.empty()) {
            Poly g = stack.back();
            stack.pop_back();
            poly_trim(g, F);
            if (g.size() <= 1) continue;
            if (g.size() == 2) {
                found.push_back(F.mul(F.neg(g[0]), F.inv(g[1])));
                continue;
            }
            // gcd(g, (Y + c)^{(q-1)/2} - 1) for deterministic shifts c; the
            // second coordinate leads so that conjugate root pairs, which only
            // split under shifts outside F_p, separate after O(1) attempts.
            ++counter;
            Fp2 c = F.make(static_cast<long long>((counter / static_cast<std::uint64_t>(F.p())) %
                                                  static_cast<std::uint64_t>(F.p())),
                           static_cast<long long>(counter % static_cast<std::uint64_t>(F.p())));
            Poly shifted{c, F.make(1)};
            Poly pw = poly_powmod(shifted, (q - 1) / 2, g, F);
            if (pw.empty()) pw.resize(1, F.make(0));
            pw[0] = F.sub(pw[0], F.make(1));
            Poly h = poly_gcd(g, pw, F);
            if (h.size() <= 1 || h.size() == g.size()) {
                stack.push_back(g); // try the next shift
                continue;
            }
            // g = h * (g/h)
            Poly rest = g;
            for (;;) {
                // divide rest by h once
                Poly quot(rest.size() - h.size() + 1, F.make(0));
                Poly rem = rest;
                Fp2 linv = F.inv(h.back());
                for (int i = static_cast<int>(rest.size()) - static_cast<int>(h.size()); i >= 0; --i) {
                    Fp2 cc = F.mul(rem[static_cast<std::size_t>(i) + h.size() - 1], linv);
                    quot[static_cast<std::size_t>(i)] = cc;
                    for (std::size_t k = 0; k < h.size(); ++k) {
                        rem[static_cast<std::size_t>(i) + k] = F.sub(rem[static_cast<std::size_t>(i) + k], F.mul(cc, h[k]));
                    }
                }
                poly_trim(rem, F);
                if (!rem.empty()) throw std::logic_error("inexact split in root finding");
                stack.push_back(h);
                stack.push_back(quot);
                break;
            }
        }
        // Extract multiplicities from f.
        for (const auto& r : found) {
            for (;;) {
                // check f(r) == 0
                Fp2 val = F.make(0);
                for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i) val = F.add(F.mul(val, r), f[static_cast<std::size_t>(i)]);
                if (!F.is_zero(val)) break;
                roots.push_back(r);
                f = poly_deflate(f, r, F);
                if (f.size() <= 1) break;
            }
        }
        break;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace

// ---------- modular polynomials ----------

ModularPolynomial modular_polynomial(long long ell) {
    ModularPolynomial mp;
    mp.ell = ell;
    auto add = [&](int i, int j, const char* c) { mp.terms.emplace_back(i, j, mpz_class(c)); };
    if (ell == 2) {
        add(3, 0, "1");
        add(0, 3, "1");
        add(2, 2, "-1");
        add(2, 1, "1488");
        add(1, 2, "1488");
        add(2, 0, "-162000");
        add(0, 2, "-162000");
        add(1, 1, "40773375");
        add(1, 0, "8748000000");
        add(0, 1, "8748000000");
        add(0, 0, "-157464000000000");
    } else if (ell == 3) {
        add(4, 0, "1");
        add(0, 4, "1");
        add(3, 3, "-1");
        add(3, 2, "2232");
        add(2, 3, "2232");
        add(3, 1, "-1069956");
        add(1, 3, "-1069956");
        add(3, 0, "36864000");
        add(0, 3, "36864000");
        add(2, 2, "2587918086");
        add(2, 1, "8900222976000");
        add(1, 2, "8900222976000");
        add(2, 0, "452984832000000");
        add(0, 2, "452984832000000");
        add(1, 1, "-770845966336000000");
        add(1, 0, "1855425871872000000000");
        add(0, 1, "1855425871872000000000");
    } else {
        throw UnsupportedEll();
    }
    return mp;
}

std::vector<Fp2> ModularPolynomial::evaluate_in_y(const Fp2& x, const Fp2Field& field) const {
    std::vector<Fp2> coeffs(static_cast<std::size_t>(degree()) + 1, field.make(0));
    // powers of x
    std::vector<Fp2> xpow(static_cast<std::size_t>(degree()) + 1, field.make(1));
    for (int i = 1; i <= degree(); ++i) xpow[static_cast<std::size_t>(i)] = field.mul(xpow[static_cast<std::size_t>(i) - 1], x);
    for (const auto& [di, dj, c] : terms) {
        mpz_class cm;
        mpz_class pz = mpz_from_ll(field.p());
        mpz_fdiv_r(cm.get_mpz_t(), c.get_mpz_t(), pz.get_mpz_t());
        Fp2 coeff = field.mul(field.make(cm.get_si()), xpow[static_cast<std::size_t>(di)]);
        coeffs[static_cast<std::size_t>(dj)] = field.add(coeffs[static_cast<std::size_t>(dj)], coeff);
    }
    return coeffs;
}

bool ModularPolynomial::is_root_pair(const Fp2& x, const Fp2& y, const Fp2Field& field) const {
    auto f = evaluate_in_y(x, field);
    Fp2 val = field.make(0);
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i) val = field.add(field.mul(val, y), f[static_cast<std::size_t>(i)]);
    return field.is_zero(val);
}

// ---------- supersingularity ----------

bool is_supersingular(long long p, const Fp2& j, const Fp2Field& field) {
    long long n = (p - 1) / 2;
    // Coefficient model: j = 0 -> y^2 = x^3 + 1; j = 1728 -> y^2 = x^3 + x;
    // otherwise A = 3 j (1728 - j), B = 2 j (1728 - j)^2.
    Fp2 A, B;
    Fp2 j1728 = field.sub(field.make(1728 % p), j);
    if (field.is_zero(j)) {
        A = field.make(0);
        B = field.make(1);
    } else if (field.is_zero(j1728)) {
        A = field.make(1);
        B = field.make(0);
    } else {
        A = field.mul(field.make(3), field.mul(j, j1728));
        B = field.mul(field.make(2), field.mul(j, field.mul(j1728, j1728)));
    }
    // Hasse coefficient: sum over a with 3a + b = p - 1, a + b + c = n:
    //   n!/(a! b! c!) A^b B^c,  b = 2n - 3a, c = 2a - n.
    // factorials mod p
    std::vector<long long> fact(static_cast<std::size_t>(n) + 1);
    fact[0] = 1;
    for (long long i = 1; i <= n; ++i) fact[static_cast<std::size_t>(i)] = (__int128)fact[static_cast<std::size_t>(i - 1)] * (i % p) % p;
    auto inv_ll = [&](long long x) { return mod_inverse(x % p, p); };

    long long a_lo = (n + 1) / 2, a_hi = (2 * n) / 3;
    Fp2 acc = field.make(0);
    for (long long a = a_lo; a <= a_hi; ++a) {
        long long b = 2 * n - 3 * a;
        long long c = 2 * a - n;
        if (b < 0 || c < 0) continue;
        long long multinom = fact[static_cast<std::size_t>(n)];
        multinom = (__int128)multinom * inv_ll(fact[static_cast<std::size_t>(a)]) % p;
        multinom = (__int128)multinom * inv_ll(fact[static_cast<std::size_t>(b)]) % p;
        multinom = (__int128)multinom * inv_ll(fact[static_cast<std::size_t>(c)]) % p;
        Fp2 term = field.make(multinom);
        if (b > 0) {
            if (field.is_zero(A)) continue;
            term = field.mul(term, field.pow(A, static_cast<unsigned long long>(b)));
        }
        if (c > 0) {
            if (field.is_zero(B)) continue;
            term = field.mul(term, field.pow(B, static_cast<unsigned long long>(c)));
        }
        acc = field.add(acc, term);
    }
    return field.is_zero(acc);
}

// ---------- supersingular vertex set ----------

namespace {

// A supersingular seed: reduction of a CM j-invariant for a small inert
// discriminant.  Class-number-one discriminants give integer j-invariants.
Fp2 supersingular_seed(long long p, const Fp2Field& field) {
    struct CM {
        long long disc;
        const char* j;
    };
    static const CM table[] = {
        {-3, "0"},
        {-4, "1728"},
        {-7, "-3375"},
        {-8, "8000"},
        {-11, "-32768"},
        {-19, "-884736"},
        {-43, "-884736000"},
        {-67, "-147197952000"},
        {-163, "-262537412640768000"},
    };
    for (const auto& cm : table) {
        if (kronecker_symbol(mpz_from_ll(cm.disc), mpz_from_ll(p)) == -1) {
            mpz_class jz(cm.j);
            mpz_class pz = mpz_from_ll(p);
            mpz_class r;
            mpz_fdiv_r(r.get_mpz_t(), jz.get_mpz_t(), pz.get_mpz_t());
            return field.make(r.get_si());
        }
    }
    // Fall back to a root of a larger inert Hilbert class polynomial.
    for (long long d : {-15, -20, -23, -24, -31, -35, -39, -40, -47, -52, -55, -56, -59}) {
        if (kronecker_symbol(mpz_from_ll(d), mpz_from_ll(p)) != -1) continue;
        auto H = quad::hilbert_class_poly_auto(quad::Discriminant(d));
        Poly f;
        for (const auto& cz : H) {
            mpz_class r, pz = mpz_from_ll(p);
            mpz_fdiv_r(r.get_mpz_t(), cz.get_mpz_t(), pz.get_mpz_t());
            f.push_back(field.make(r.get_si()));
        }
        auto roots = poly_roots(f, field);
        if (!roots.empty()) return roots.front();
    }
    throw std::logic_error("no supersingular seed found");
}

long long supersingular_count(long long p) {
    long long base = p / 12;
    switch (p % 12) {
        case 1: return base;
        case 5: return base + 1;
        case 7: return base + 1;
        default: return base + 2; // p = 11 mod 12
    }
}

} // namespace

namespace {
std::mutex g_sslist_mutex;
std::map<long long, std::vector<Fp2>> g_sslist_cache;
} // namespace

std::vector<Fp2> supersingular_j_list(long long p) {
    if (p < 5) throw std::domain_error("p must be at least 5");
    if (p > 10000) throw std::domain_error("p beyond desk-scale bound");
    {
        std::lock_guard<std::mutex> lock(g_sslist_mutex);
        auto it = g_sslist_cache.find(p);
        if (it != g_sslist_cache.end()) return it->second;
    }
    Fp2Field field(p);
    auto phi2 = modular_polynomial(2);

    Fp2 seed = supersingular_seed(p, field);
    std::set<Fp2> seen{seed};
    std::queue<Fp2> frontier;
    frontier.push(seed);
    while (!frontier.empty()) {
        Fp2 j = frontier.front();
        frontier.pop();
        auto f = poly_roots(phi2.evaluate_in_y(j, field), field);
        for (const auto& r : f) {
            if (!seen.count(r)) {
                seen.insert(r);
                frontier.push(r);
            }
        }
    }
    std::vector<Fp2> out(seen.begin(), seen.end());
    for (const auto& j : out) {
        if (!is_supersingular(p, j, field)) throw std::logic_error("non-supersingular vertex reached");
    }
    if (static_cast<long long>(out.size()) != supersingular_count(p))
        throw std::logic_error("supersingular count mismatch");
    {
        std::lock_guard<std::mutex> lock(g_sslist_mutex);
        g_sslist_cache.emplace(p, out);
    }
    return out;
}

int IsogenyGraph::vertex_index(const Fp2& j) const {
    auto it = std::lower_bound(vertices.begin(), vertices.end(), j);
    if (it == vertices.end() || !(*it == j)) return -1;
    return static_cast<int>(it - vertices.begin());
}

IsogenyGraph build_graph(long long p, long long ell) {
    if (ell == p) throw std::domain_error("l must differ from p");
    IsogenyGraph g;
    g.p = p;
    g.ell = ell;
    Fp2Field field(p);
    g.nonresidue = field.nonresidue();
    g.vertices = supersingular_j_list(p);
    auto phi = modular_polynomial(ell);
    g.adjacency.resize(g.vertices.size());
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        auto roots = poly_roots(phi.evaluate_in_y(g.vertices[i], field), field);
        if (static_cast<long long>(roots.size()) != ell + 1)
            throw std::logic_error("Phi_l does not split with full multiplicity");
        for (const auto& r : roots) {
            int idx = g.vertex_index(r);
            if (idx < 0) throw std::logic_error("neighbor outside the supersingular set");
            g.adjacency[i].push_back(idx);
        }
        std::sort(g.adjacency[i].begin(), g.adjacency[i].end());
    }
    return g;
}

// ---------- CM reduction walk ----------

std::vector<Fp2> cm_reduction_walk(long long disc, long long p, long long ell, int steps, int base_choice) {
    quad::Discriminant d(disc);
    if (kronecker_symbol(mpz_from_ll(disc), mpz_from_ll(p)) != -1)
        throw RamifiedOrInert("p is not inert in the CM field");
    if (kronecker_symbol(mpz_from_ll(disc), mpz_from_ll(ell)) != 1)
        throw RamifiedOrInert("l is not split in the order");

    Fp2Field field(p);
    auto H = quad::hilbert_class_poly_auto(d);
    Poly f;
    for (const auto& cz : H) {
        mpz_class r, pz = mpz_from_ll(p);
        mpz_fdiv_r(r.get_mpz_t(), cz.get_mpz_t(), pz.get_mpz_t());
        f.push_back(field.make(r.get_si()));
    }
    auto roots = poly_roots(f, field);
    if (roots.size() != H.size() - 1) throw RamifiedOrInert("H_disc is not squarefree mod p");
    std::set<Fp2> root_set(roots.begin(), roots.end());

    auto phi = modular_polynomial(ell);
    std::vector<Fp2> walk;
    Fp2 cur = roots.at(static_cast<std::size_t>(base_choice) % roots.size());
    walk.push_back(cur);
    for (int k = 0; k < steps; ++k) {
        std::vector<Fp2> candidates;
        for (const auto& r : roots) {
            if (phi.is_root_pair(cur, r, field)) candidates.push_back(r);
        }
        if (candidates.empty()) throw RamifiedOrInert("no CM neighbor found (unexpected)");
        Fp2 next = candidates.front();
        if (walk.size() >= 2) {
            const Fp2& prev = walk[walk.size() - 2];
            bool picked = false;
            for (const auto& c : candidates) {
                if (!(c == prev)) {
                    next = c;
                    picked = true;
                    break;
                }
            }
            if (!picked) next = candidates.front();
        }
        walk.push_back(next);
        cur = next;
    }
    return walk;
}

// ---------- cycles ----------

namespace {

struct TreeData {
    std::vector<int> parent;       // -1 at the root
    std::vector<int> order;        // BFS order
};

TreeData spanning_tree(const IsogenyGraph& g) {
    TreeData t;
    t.parent.assign(g.vertices.size(), -2); // -2 = unvisited
    std::queue<int> q;
    t.parent[0] = -1;
    q.push(0);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        t.order.push_back(u);
        for (int v : g.adjacency[static_cast<std::size_t>(u)]) {
            if (t.parent[static_cast<std::size_t>(v)] == -2) {
                t.parent[static_cast<std::size_t>(v)] = u;
                q.push(v);
            }
        }
    }
    return t;
}

std::vector<int> tree_route(const TreeData& t, int from, int to) {
    // Paths to the root, then splice at the lowest common ancestor.
    auto to_root = [&](int x) {
        std::vector<int> path{x};
        while (t.parent[static_cast<std::size_t>(x)] >= 0) {
            x = t.parent[static_cast<std::size_t>(x)];
            path.push_back(x);
        }
        return path;
    };
    std::vector<int> a = to_root(from), b = to_root(to);
    // Strip the common suffix.
    std::size_t i = a.size(), j = b.size();
    while (i > 0 && j > 0 && a[i - 1] == b[j - 1]) {
        --i;
        --j;
    }
    std::vector<int> route(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i + 1));
    for (std::size_t k = j + 1; k-- > 0;) route.push_back(b[k]);
    // route runs from..lca..to; drop the duplicated lca entry
    // (a[0..i] ends at lca; b[j..0] starts at lca)
    std::vector<int> clean;
    for (int v : route) {
        if (!clean.empty() && clean.back() == v) continue;
        clean.push_back(v);
    }
    return clean;
}

std::vector<int> reduce_backtracking(std::vector<int> walk) {
    // Cancels (u -> v, v -> u) with u != v; a repeated self-loop is a genuine
    // cycle and stays.
    bool changed = true;
    while (changed && walk.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i + 2 < walk.size(); ++i) {
            if (walk[i] == walk[i + 2] && walk[i] != walk[i + 1]) {
                walk.erase(walk.begin() + static_cast<std::ptrdiff_t>(i + 1),
                           walk.begin() + static_cast<std::ptrdiff_t>(i + 3));
                changed = true;
                break;
            }
        }
    }
    return walk;
}

bool is_tree_edge(const TreeData& t, int u, int v) {
    return t.parent[static_cast<std::size_t>(u)] == v || t.parent[static_cast<std::size_t>(v)] == u;
}

} // namespace

GraphCycle cycle_from_path(const IsogenyGraph& g, const std::vector<int>& path) {
    if (path.empty()) throw std::domain_error("empty path");
    for (int v : path) {
        if (v < 0 || v >= static_cast<int>(g.vertices.size())) throw DisconnectedComponent();
    }
    TreeData tree = spanning_tree(g);
    for (int v : path) {
        if (tree.parent[static_cast<std::size_t>(v)] == -2) throw DisconnectedComponent();
    }
    std::vector<int> walk = path;
    if (path.back() != path.front()) {
        auto route = tree_route(tree, path.back(), path.front());
        for (std::size_t i = 1; i < route.size(); ++i) walk.push_back(route[i]);
    }
    walk = reduce_backtracking(std::move(walk));
    GraphCycle c;
    if (walk.size() < 2) {
        c.basepoint = walk.empty() ? path.front() : walk.front();
        c.vertices = {c.basepoint};
    } else {
        c.basepoint = walk.front();
        c.vertices = walk;
    }
    return c;
}

std::vector<std::tuple<int, int, int>> edge_list(const IsogenyGraph& g) {
    std::map<std::pair<int, int>, int> count;
    for (int u = 0; u < static_cast<int>(g.adjacency.size()); ++u) {
        for (int v : g.adjacency[static_cast<std::size_t>(u)]) {
            if (u <= v) count[{u, v}] += 1;
        }
    }
    // A loop at u contributes l+1-regular degree... each undirected non-loop
    // edge was seen once from its smaller endpoint and once from the larger;
    // we only counted u <= v so non-loop edges are counted once from the
    // smaller side.  Loops u == v appear with their full multiplicity.
    std::vector<std::tuple<int, int, int>> out;
    out.reserve(count.size());
    for (const auto& [key, mult] : count) out.emplace_back(key.first, key.second, mult);
    return out;
}

namespace {

// Off-tree adjacency pairs, one coordinate slot per pair.  Walks are vertex
// sequences, so parallel copies of an edge share a slot.
std::vector<std::pair<int, int>> nontree_pairs(const IsogenyGraph& g, const TreeData& tree) {
    std::vector<std::pair<int, int>> slots;
    for (const auto& [u, v, mult] : edge_list(g)) {
        bool covered_by_tree = (u != v) && is_tree_edge(tree, u, v) && mult == 1;
        if (!covered_by_tree) slots.emplace_back(u, v);
    }
    return slots;
}

} // namespace

int cycle_space_rank(const IsogenyGraph& g) {
    TreeData tree = spanning_tree(g);
    return static_cast<int>(nontree_pairs(g, tree).size());
}

std::vector<mpz_class> cycle_coordinates(const IsogenyGraph& g, const GraphCycle& cycle) {
    TreeData tree = spanning_tree(g);
    auto slots = nontree_pairs(g, tree);
    std::map<std::pair<int, int>, int> slot_index;
    for (std::size_t i = 0; i < slots.size(); ++i) slot_index[slots[i]] = static_cast<int>(i);

    std::vector<mpz_class> coords(slots.size(), 0);
    for (std::size_t i = 0; i + 1 < cycle.vertices.size(); ++i) {
        int u = cycle.vertices[i], v = cycle.vertices[i + 1];
        auto key = std::make_pair(std::min(u, v), std::max(u, v));
        auto it = slot_index.find(key);
        if (it == slot_index.end()) {
            if (u != v && is_tree_edge(tree, u, v)) continue; // pure tree edge
            throw DisconnectedComponent();
        }
        if (u != v && is_tree_edge(tree, u, v)) continue; // tree copy preferred
        if (u == v || u < v) coords[static_cast<std::size_t>(it->second)] += 1;
        else coords[static_cast<std::size_t>(it->second)] -= 1;
    }
    return coords;
}

} // namespace msiforge::ssgraph
