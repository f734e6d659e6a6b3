#include "msiforge/modsym.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "msiforge/util.hpp"

namespace msiforge::modsym {

namespace {

// ---------- P^1(Z/N) ----------

constexpr std::pair<long long, long long> kInvalid{-1, -1};

std::pair<long long, long long> p1_normalize(long long N, long long u, long long v) {
    if (N == 1) return {0, 0};
    u %= N;
    v %= N;
    if (u < 0) u += N;
    if (v < 0) v += N;
    if (u == 0) {
        return gcd_ll(v, N) == 1 ? std::make_pair(0LL, 1LL) : kInvalid;
    }
    long long s, t;
    long long g = xgcd(u, N, s, t);
    if (gcd_ll(g, v) != 1) return kInvalid;
    s %= N;
    if (s < 0) s += N;
    // s inverts u/g mod N/g; bump it to a unit mod N.
    if (g != 1) {
        long long d = N / g;
        while (gcd_ll(s, N) != 1) s = (s + d) % N;
    }
    long long uu = g;
    long long vv = (s % N) * (v % N) % N;
    if (g != 1) {
        long long Ng = N / g;
        long long vNg = vv * Ng % N;
        long long min_v = vv, tcur = 1, vcur = vv;
        for (long long k = 2; k <= g; ++k) {
            vcur = (vcur + vNg) % N;
            tcur = (tcur + Ng) % N;
            if (vcur < min_v && gcd_ll(tcur, N) == 1) min_v = vcur;
        }
        vv = min_v;
    }
    return {uu, vv};
}

// ---------- Smith-style diagonalization over Z ----------

struct Diagonalization {
    IntMat mat;          // diagonalized
    IntMat row_ops;      // W with W * original_rows applied (row-op record)
    IntMat row_ops_inv;  // W^-1
    int diag_rank = 0;
};

void swap_rows(IntMat& m, int i, int j) { std::swap(m[i], m[j]); }

void swap_cols(IntMat& m, int i, int j) {
    for (auto& row : m) std::swap(row[static_cast<std::size_t>(i)], row[static_cast<std::size_t>(j)]);
}

// Diagonalize m (rows x cols) via unimodular row/column operations, tracking
// the row operations and their inverse.  Column ops are untracked: only the
// column space of the result matters to callers.
Diagonalization diagonalize(IntMat m) {
    int rows = static_cast<int>(m.size());
    int cols = rows ? static_cast<int>(m[0].size()) : 0;
    IntMat W(static_cast<std::size_t>(rows), std::vector<mpz_class>(static_cast<std::size_t>(rows), 0));
    IntMat Winv = W;
    for (int i = 0; i < rows; ++i) W[i][static_cast<std::size_t>(i)] = Winv[i][static_cast<std::size_t>(i)] = 1;

    auto add_row = [&](int dst, int src, const mpz_class& q) {
        // row_dst += q * row_src on m and W; inverse col op on Winv.
        for (int k = 0; k < cols; ++k) m[dst][static_cast<std::size_t>(k)] += q * m[src][static_cast<std::size_t>(k)];
        for (int k = 0; k < rows; ++k) W[dst][static_cast<std::size_t>(k)] += q * W[src][static_cast<std::size_t>(k)];
        for (int k = 0; k < rows; ++k) Winv[k][static_cast<std::size_t>(src)] -= q * Winv[k][static_cast<std::size_t>(dst)];
    };
    auto add_col = [&](int dst, int src, const mpz_class& q) {
        for (int k = 0; k < rows; ++k) m[k][static_cast<std::size_t>(dst)] += q * m[k][static_cast<std::size_t>(src)];
    };

    int t = 0;
    while (t < rows && t < cols) {
        // Locate the minimal nonzero pivot in the remaining block.
        int pi = -1, pj = -1;
        mpz_class best = 0;
        for (int i = t; i < rows; ++i) {
            for (int j = t; j < cols; ++j) {
                const mpz_class& x = m[i][static_cast<std::size_t>(j)];
                if (x != 0 && (pi < 0 || cmp(abs(x), best) < 0)) {
                    pi = i;
                    pj = j;
                    best = abs(x);
                }
            }
        }
        if (pi < 0) break;
        if (pi != t) {
            swap_rows(m, pi, t);
            swap_rows(W, pi, t);
            swap_cols(Winv, pi, t);
        }
        if (pj != t) swap_cols(m, pj, t);

        bool clean = true;
        const mpz_class piv = m[t][static_cast<std::size_t>(t)];
        for (int i = t + 1; i < rows; ++i) {
            const mpz_class& x = m[i][static_cast<std::size_t>(t)];
            if (x != 0) {
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), x.get_mpz_t(), piv.get_mpz_t());
                add_row(i, t, -q);
                if (m[i][static_cast<std::size_t>(t)] != 0) clean = false;
            }
        }
        for (int j = t + 1; j < cols; ++j) {
            const mpz_class& x = m[t][static_cast<std::size_t>(j)];
            if (x != 0) {
                mpz_class q;
                mpz_fdiv_q(q.get_mpz_t(), x.get_mpz_t(), piv.get_mpz_t());
                add_col(j, t, -q);
                if (m[t][static_cast<std::size_t>(j)] != 0) clean = false;
            }
        }
        if (clean) {
            if (m[t][static_cast<std::size_t>(t)] < 0) {
                add_row(t, t, -2); // negate row: r <- r - 2r
            }
            ++t;
        }
    }
    Diagonalization d;
    d.diag_rank = t;
    d.mat = std::move(m);
    d.row_ops = std::move(W);
    d.row_ops_inv = std::move(Winv);
    return d;
}

// Kernel lattice of an integer matrix (as columns of the result).
IntMat integer_kernel(const IntMat& a) {
    int rows = static_cast<int>(a.size());
    int cols = rows ? static_cast<int>(a[0].size()) : 0;
    IntMat m = a;
    IntMat C(static_cast<std::size_t>(cols), std::vector<mpz_class>(static_cast<std::size_t>(cols), 0));
    for (int i = 0; i < cols; ++i) C[i][static_cast<std::size_t>(i)] = 1;

    auto col_addmul = [&](int dst, int src, const mpz_class& q) {
        for (int k = 0; k < rows; ++k) m[k][static_cast<std::size_t>(dst)] += q * m[k][static_cast<std::size_t>(src)];
        for (int k = 0; k < cols; ++k) C[k][static_cast<std::size_t>(dst)] += q * C[k][static_cast<std::size_t>(src)];
    };
    auto col_swap = [&](int i, int j) {
        swap_cols(m, i, j);
        swap_cols(C, i, j);
    };

    int lead = 0;
    for (int r = 0; r < rows && lead < cols; ++r) {
        // Reduce row r across columns lead..cols-1 by gcd elimination.
        for (;;) {
            int piv = -1;
            mpz_class best = 0;
            for (int j = lead; j < cols; ++j) {
                const mpz_class& x = m[r][static_cast<std::size_t>(j)];
                if (x != 0 && (piv < 0 || cmp(abs(x), best) < 0)) {
                    piv = j;
                    best = abs(x);
                }
            }
            if (piv < 0) break;
            col_swap(piv, lead);
            bool done = true;
            const mpz_class pv = m[r][static_cast<std::size_t>(lead)];
            for (int j = lead + 1; j < cols; ++j) {
                const mpz_class& x = m[r][static_cast<std::size_t>(j)];
                if (x != 0) {
                    mpz_class q;
                    mpz_fdiv_q(q.get_mpz_t(), x.get_mpz_t(), pv.get_mpz_t());
                    col_addmul(j, lead, -q);
                    if (m[r][static_cast<std::size_t>(j)] != 0) done = false;
                }
            }
            if (done) {
                ++lead;
                break;
            }
        }
    }
    // Columns lead..cols-1 of m are zero; the matching columns of C span ker.
    IntMat ker;
    for (int j = lead; j < cols; ++j) {
        std::vector<mpz_class> v(static_cast<std::size_t>(cols));
        for (int k = 0; k < cols; ++k) v[static_cast<std::size_t>(k)] = C[k][static_cast<std::size_t>(j)];
        ker.push_back(std::move(v));
    }
    // Return as columns: transpose so result[i] is i-th kernel vector.
    return ker;
}

// ---------- rational linear algebra ----------

using RatMat = std::vector<std::vector<mpq_class>>;

RatMat rat_from_int(const IntMat& a) {
    RatMat r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i].reserve(a[i].size());
        for (const auto& x : a[i]) r[i].emplace_back(x);
    }
    return r;
}

// Reduced row echelon form in place; returns pivot columns.
std::vector<int> rref(RatMat& m) {
    std::vector<int> pivots;
    int rows = static_cast<int>(m.size());
    int cols = rows ? static_cast<int>(m[0].size()) : 0;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int piv = -1;
        for (int i = r; i < rows; ++i) {
            if (m[i][static_cast<std::size_t>(c)] != 0) {
                piv = i;
                break;
            }
        }
        if (piv < 0) continue;
        std::swap(m[r], m[piv]);
        mpq_class inv = 1 / m[r][static_cast<std::size_t>(c)];
        for (int j = c; j < cols; ++j) m[r][static_cast<std::size_t>(j)] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i != r && m[i][static_cast<std::size_t>(c)] != 0) {
                mpq_class f = m[i][static_cast<std::size_t>(c)];
                for (int j = c; j < cols; ++j) m[i][static_cast<std::size_t>(j)] -= f * m[r][static_cast<std::size_t>(j)];
            }
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

RatMat rat_product(const RatMat& a, const RatMat& b) {
    std::size_t n = a.size(), k = b.size(), mcols = k ? b[0].size() : 0;
    RatMat r(n, std::vector<mpq_class>(mcols, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < k; ++t) {
            if (a[i][t] == 0) continue;
            for (std::size_t j = 0; j < mcols; ++j) r[i][j] += a[i][t] * b[t][j];
        }
    return r;
}

// Nullspace basis (as column vectors) of a rational matrix.
std::vector<std::vector<mpq_class>> rat_kernel(RatMat m) {
    int rows = static_cast<int>(m.size());
    int cols = rows ? static_cast<int>(m[0].size()) : 0;
    auto pivots = rref(m);
    std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
    for (int c : pivots) is_pivot[static_cast<std::size_t>(c)] = true;
    std::vector<std::vector<mpq_class>> ker;
    for (int free = 0; free < cols; ++free) {
        if (is_pivot[static_cast<std::size_t>(free)]) continue;
        std::vector<mpq_class> v(static_cast<std::size_t>(cols), 0);
        v[static_cast<std::size_t>(free)] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r) {
            v[static_cast<std::size_t>(pivots[r])] = -m[r][static_cast<std::size_t>(free)];
        }
        ker.push_back(std::move(v));
    }
    return ker;
}

// Solve B * x = y for x (B full column rank); throws if inconsistent.
std::vector<mpq_class> rat_solve(const RatMat& B, const std::vector<mpq_class>& y) {
    std::size_t rows = B.size(), cols = rows ? B[0].size() : 0;
    RatMat aug(rows, std::vector<mpq_class>(cols + 1));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) aug[i][j] = B[i][j];
        aug[i][cols] = y[i];
    }
    auto pivots = rref(aug);
    std::vector<mpq_class> x(cols, 0);
    for (std::size_t r = 0; r < pivots.size(); ++r) {
        if (static_cast<std::size_t>(pivots[r]) == cols) throw std::domain_error("inconsistent linear system");
        x[static_cast<std::size_t>(pivots[r])] = aug[r][cols];
    }
    // Verify (guards against rank deficiency).
    for (std::size_t i = 0; i < rows; ++i) {
        mpq_class acc = 0;
        for (std::size_t j = 0; j < cols; ++j) acc += B[i][j] * x[j];
        if (acc != y[i]) throw std::domain_error("inconsistent linear system");
    }
    return x;
}

RatMat rat_inverse(const RatMat& a) {
    std::size_t n = a.size();
    RatMat aug(n, std::vector<mpq_class>(2 * n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
        aug[i][n + i] = 1;
    }
    auto pivots = rref(aug);
    if (pivots.size() != n) throw std::domain_error("matrix not invertible");
    RatMat inv(n, std::vector<mpq_class>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
    return inv;
}

// ---------- continued fractions ----------

struct Rational {
    mpz_class num, den; // den = 0 encodes infinity
};

// Heilbronn matrices of determinant p, Cremona's family.
struct Mat2 {
    long long x, y, z, w;
};

std::vector<Mat2> heilbronn_cremona(long long p) {
    std::vector<Mat2> result;
    result.push_back({1, 0, 0, p});
    for (long long s = 0; s < p; ++s) {
        long long r = s - (p - 1) / 2;
        long long x1 = p, x2 = -r, y1 = 0, y2 = 1;
        long long a = -p, b = r;
        result.push_back({x1, x2, y1, y2});
        while (b != 0) {
            double ratio = static_cast<double>(a) / static_cast<double>(b);
            long long q = static_cast<long long>(std::llround(ratio));
            long long c = a - b * q;
            a = -b;
            b = c;
            long long x3 = q * x2 - x1;
            x1 = x2;
            x2 = x3;
            long long y3 = q * y2 - y1;
            y1 = y2;
            y2 = y3;
            result.push_back({x1, x2, y1, y2});
        }
    }
    return result;
}

} // namespace

// ---------- combinatorial oracles ----------

namespace {
std::vector<std::pair<long long, int>> factorize(long long n) {
    std::vector<std::pair<long long, int>> f;
    for (long long p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            int e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            f.push_back({p, e});
        }
    }
    if (n > 1) f.push_back({n, 1});
    return f;
}

long long euler_phi(long long n) {
    long long r = n;
    for (auto [p, e] : factorize(n)) r = r / p * (p - 1);
    return r;
}
} // namespace

long long p1_size(long long N) {
    long long mu = N;
    for (auto [p, e] : factorize(N)) mu = mu / p * (p + 1);
    return mu;
}

long long cusp_count_X0(long long N) {
    long long c = 0;
    for (long long d = 1; d * d <= N; ++d) {
        if (N % d == 0) {
            c += euler_phi(gcd_ll(d, N / d));
            if (d != N / d) c += euler_phi(gcd_ll(N / d, d));
        }
    }
    return c;
}

long long genus_X0(long long N) {
    long long mu = p1_size(N);
    auto fact = factorize(N);
    long long nu2 = 1, nu3 = 1;
    if (N % 4 == 0) {
        nu2 = 0;
    } else {
        for (auto [p, e] : fact) {
            if (p == 2) continue;
            nu2 *= 1 + ((p % 4 == 1) ? 1 : -1);
        }
    }
    if (N % 9 == 0) {
        nu3 = 0;
    } else {
        for (auto [p, e] : fact) {
            if (p == 3) continue;
            nu3 *= 1 + ((p % 3 == 1) ? 1 : -1);
        }
    }
    long long c = cusp_count_X0(N);
    // 12g = 12 + mu - 3 nu2 - 4 nu3 - 6c
    long long twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * c;
    if (twelve_g % 12 != 0) throw std::logic_error("genus formula: non-integral result");
    return twelve_g / 12;
}

// ---------- cusps ----------

Cusp::Cusp(long long n, long long d) {
    if (d == 0) {
        num = 1;
        den = 0;
        return;
    }
    if (d < 0) {
        n = -n;
        d = -d;
    }
    long long g = gcd_ll(n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

namespace {

bool cusp_equivalent(long long N, const Cusp& c1, const Cusp& c2) {
    // Criterion: s1 q2 = s2 q1 (mod gcd(q1 q2, N)) with p_i s_i = 1 (mod q_i).
    auto inv_mod_cusp = [](long long p, long long q) -> long long {
        if (q == 0) return 1;
        if (q == 1) return 0;
        long long pp = ((p % q) + q) % q;
        return mod_inverse(pp, q);
    };
    long long s1 = inv_mod_cusp(c1.num, c1.den);
    long long s2 = inv_mod_cusp(c2.num, c2.den);
    long long g = gcd_ll(c1.den * c2.den, N);
    if (g == 0) g = N;
    long long lhs = ((s1 * c2.den - s2 * c1.den) % g + g) % g;
    return lhs == 0;
}

} // namespace

// ---------- ManinBasis ----------

ManinBasis::ManinBasis(long long N) : level_(N) {
    if (N < 1) throw std::domain_error("level must be >= 1");

    // P^1(Z/N).
    std::set<std::pair<long long, long long>> seen;
    for (long long u = 0; u < std::max<long long>(N, 1); ++u) {
        for (long long v = 0; v < std::max<long long>(N, 1); ++v) {
            if (gcd_ll(gcd_ll(u, v), N) != 1) continue;
            seen.insert(p1_normalize(N, u, v));
        }
    }
    if (N == 1) seen.insert({0, 0});
    symbols_.assign(seen.begin(), seen.end());
    for (std::size_t i = 0; i < symbols_.size(); ++i) index_[symbols_[i]] = static_cast<int>(i);

    int nsym = static_cast<int>(symbols_.size());

    // Relation vectors: x + x sigma, and x + x tau + x tau^2.
    auto idx_of = [&](long long u, long long v) {
        auto key = p1_normalize(N, u, v);
        auto it = index_.find(key);
        if (it == index_.end()) throw std::logic_error("P1 closure failure");
        return it->second;
    };
    std::set<std::vector<mpz_class>> relset;
    for (int i = 0; i < nsym; ++i) {
        auto [u, v] = symbols_[static_cast<std::size_t>(i)];
        std::vector<mpz_class> r2(static_cast<std::size_t>(nsym), 0);
        r2[static_cast<std::size_t>(i)] += 1;
        r2[static_cast<std::size_t>(idx_of(v, -u))] += 1;
        relset.insert(r2);
        std::vector<mpz_class> r3(static_cast<std::size_t>(nsym), 0);
        r3[static_cast<std::size_t>(i)] += 1;
        r3[static_cast<std::size_t>(idx_of(v, -u - v))] += 1;
        r3[static_cast<std::size_t>(idx_of(-u - v, u))] += 1;
        relset.insert(r3);
    }

    // Columns of R are the relation vectors.
    IntMat R(static_cast<std::size_t>(nsym), std::vector<mpz_class>(relset.size(), 0));
    {
        std::size_t j = 0;
        for (const auto& rel : relset) {
            for (int i = 0; i < nsym; ++i) R[static_cast<std::size_t>(i)][j] = rel[static_cast<std::size_t>(i)];
            ++j;
        }
    }

    auto diag = diagonalize(R);
    int k = diag.diag_rank;
    rank_ = nsym - k;

    // Free quotient: coordinates are rows k..nsym-1 of W; lift is the matching
    // columns of W^-1.
    projection_.assign(static_cast<std::size_t>(rank_), std::vector<mpz_class>(static_cast<std::size_t>(nsym), 0));
    lift_.assign(static_cast<std::size_t>(nsym), std::vector<mpz_class>(static_cast<std::size_t>(rank_), 0));
    for (int i = 0; i < rank_; ++i)
        for (int j = 0; j < nsym; ++j)
            projection_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                diag.row_ops[static_cast<std::size_t>(k + i)][static_cast<std::size_t>(j)];
    for (int i = 0; i < nsym; ++i)
        for (int j = 0; j < rank_; ++j)
            lift_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                diag.row_ops_inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(k + j)];

    // Cusp classes, infinity first, then by increasing denominator/numerator.
    cusp_reps_.push_back(Cusp::infinity());
    for (long long q = 1; q <= N; ++q) {
        for (long long p = 0; p < q; ++p) {
            if (gcd_ll(p, q) != 1) continue;
            Cusp c(p, q);
            bool known = false;
            for (const auto& rep : cusp_reps_) {
                if (cusp_equivalent(N, rep, c)) {
                    known = true;
                    break;
                }
            }
            if (!known) cusp_reps_.push_back(c);
        }
    }
}

int ManinBasis::symbol_index(long long u, long long v) const {
    auto key = p1_normalize(level_, u, v);
    auto it = index_.find(key);
    return it == index_.end() ? -1 : it->second;
}

std::vector<mpz_class> ManinBasis::symbol_class(int index) const {
    std::vector<mpz_class> c(static_cast<std::size_t>(rank_));
    for (int i = 0; i < rank_; ++i) c[static_cast<std::size_t>(i)] = projection_[static_cast<std::size_t>(i)][static_cast<std::size_t>(index)];
    return c;
}

std::vector<mpz_class> ManinBasis::lift(const std::vector<mpz_class>& coords) const {
    std::vector<mpz_class> out(symbols_.size(), 0);
    for (std::size_t i = 0; i < symbols_.size(); ++i)
        for (int j = 0; j < rank_; ++j)
            out[i] += lift_[i][static_cast<std::size_t>(j)] * coords[static_cast<std::size_t>(j)];
    return out;
}

std::vector<mpz_class> ManinBasis::project(const std::vector<mpz_class>& symbol_vec) const {
    std::vector<mpz_class> out(static_cast<std::size_t>(rank_), 0);
    for (int i = 0; i < rank_; ++i)
        for (std::size_t j = 0; j < symbols_.size(); ++j)
            out[static_cast<std::size_t>(i)] += projection_[static_cast<std::size_t>(i)][j] * symbol_vec[j];
    return out;
}

int ManinBasis::cusp_class_index(const Cusp& c) const {
    for (std::size_t i = 0; i < cusp_reps_.size(); ++i) {
        if (cusp_equivalent(level_, cusp_reps_[i], c)) return static_cast<int>(i);
    }
    throw std::logic_error("cusp not matched to any class");
}

std::array<long long, 4> ManinBasis::symbol_lift_matrix(int index) const {
    auto [u, v] = symbols_.at(static_cast<std::size_t>(index));
    long long N = level_;
    if (N == 1) return {1, 0, 0, 1};
    // Find (c, d) = (u, v) mod N with gcd(c, d) = 1.
    long long c = u, d = v;
    bool found = false;
    for (long long i = 0; i <= 2 * N && !found; ++i) {
        for (long long j = 0; j <= 2 * N && !found; ++j) {
            long long cc = u + i * N, dd = v + j * N;
            if (gcd_ll(cc, dd) == 1) {
                c = cc;
                d = dd;
                found = true;
            }
        }
    }
    if (!found) throw std::logic_error("symbol lift failed");
    long long x, y;
    xgcd(d, c, x, y); // x*d + y*c = 1
    long long a = x, b = -y;
    // det = a*d - b*c = x*d + y*c = 1
    return {a, b, c, d};
}

// ---------- classes ----------

bool HomologyClass::is_zero() const {
    for (const auto& x : coords)
        if (x != 0) return false;
    return true;
}

HomologyClass zero_class(const ManinBasis& basis) {
    return HomologyClass{basis.level(), std::vector<mpz_class>(static_cast<std::size_t>(basis.rank()), 0)};
}

HomologyClass operator+(const HomologyClass& a, const HomologyClass& b) {
    if (a.level != b.level || a.coords.size() != b.coords.size())
        throw std::domain_error("class arithmetic across different bases");
    HomologyClass r = a;
    for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] += b.coords[i];
    return r;
}

HomologyClass operator-(const HomologyClass& a, const HomologyClass& b) {
    if (a.level != b.level || a.coords.size() != b.coords.size())
        throw std::domain_error("class arithmetic across different bases");
    HomologyClass r = a;
    for (std::size_t i = 0; i < r.coords.size(); ++i) r.coords[i] -= b.coords[i];
    return r;
}

HomologyClass operator*(const mpz_class& k, const HomologyClass& a) {
    HomologyClass r = a;
    for (auto& x : r.coords) x *= k;
    return r;
}

bool CuspDivisor::is_zero() const {
    for (const auto& x : multiplicities)
        if (x != 0) return false;
    return true;
}

mpz_class CuspDivisor::total() const {
    mpz_class t = 0;
    for (const auto& x : multiplicities) t += x;
    return t;
}

// ---------- modular symbols from cusps ----------

namespace {

long long mod_to_ll(const mpz_class& x, long long N) {
    mpz_class r;
    mpz_class n = mpz_from_ll(N);
    mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), n.get_mpz_t());
    return r.get_si();
}

// Adds the continued-fraction path {infinity -> num/den} into acc (symbol space).
void accumulate_cf_path(const ManinBasis& basis, const Rational& target, std::vector<mpz_class>& acc, int sign) {
    if (target.den == 0) return; // {oo -> oo} = 0
    long long N = basis.level();
    mpz_class num = target.num, den = target.den;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    // Convergents h_k/k_k with h_{-1}/k_{-1} = 1/0 and h_{-2}/k_{-2} = 0/1;
    // each adjacent pair is a unimodular path {h_{k-1}/k_{k-1} -> h_k/k_k}.
    mpz_class hm1 = 1, km1 = 0, hm2 = 0, km2 = 1;
    while (den != 0) {
        mpz_class quot, rem;
        mpz_fdiv_qr(quot.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        mpz_class hcur = quot * hm1 + hm2;
        mpz_class kcur = quot * km1 + km2;
        mpz_class det = hcur * km1 - hm1 * kcur; // +-1
        mpz_class d2 = (det == 1) ? km1 : mpz_class(-km1);
        int idx = basis.symbol_index(mod_to_ll(kcur, N), mod_to_ll(d2, N));
        if (idx < 0) throw std::logic_error("invalid symbol in CF path");
        acc[static_cast<std::size_t>(idx)] += sign;
        hm2 = hm1;
        km2 = km1;
        hm1 = hcur;
        km1 = kcur;
        num = den;
        den = rem;
    }
}

} // namespace

HomologyClass symbol_from_cusps(const Cusp& r, const Cusp& s, const ManinBasis& basis) {
    std::vector<mpz_class> acc(basis.symbols().size(), 0);
    accumulate_cf_path(basis, Rational{mpz_from_ll(s.num), mpz_from_ll(s.den)}, acc, +1);
    accumulate_cf_path(basis, Rational{mpz_from_ll(r.num), mpz_from_ll(r.den)}, acc, -1);
    return HomologyClass{basis.level(), basis.project(acc)};
}

namespace {

HomologyClass symbol_from_rationals(const Rational& r, const Rational& s, const ManinBasis& basis) {
    std::vector<mpz_class> acc(basis.symbols().size(), 0);
    accumulate_cf_path(basis, s, acc, +1);
    accumulate_cf_path(basis, r, acc, -1);
    return HomologyClass{basis.level(), basis.project(acc)};
}

} // namespace

CuspDivisor boundary(const HomologyClass& gamma, const ManinBasis& basis) {
    if (gamma.level != basis.level()) throw std::domain_error("class/basis level mismatch");
    auto symvec = basis.lift(gamma.coords);
    CuspDivisor div;
    div.multiplicities.assign(basis.cusps().size(), 0);
    for (std::size_t i = 0; i < symvec.size(); ++i) {
        if (symvec[i] == 0) continue;
        auto m = basis.symbol_lift_matrix(static_cast<int>(i));
        // boundary {g0 -> ginf} = [a/c] - [b/d]
        int ci = basis.cusp_class_index(Cusp(m[0], m[2]));
        int di = basis.cusp_class_index(Cusp(m[1], m[3]));
        div.multiplicities[static_cast<std::size_t>(ci)] += symvec[i];
        div.multiplicities[static_cast<std::size_t>(di)] -= symvec[i];
    }
    return div;
}

// ---------- Hecke operators ----------

std::vector<mpz_class> apply_matrix(const IntMat& m, const std::vector<mpz_class>& v) {
    std::vector<mpz_class> out(m.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

IntMat matrix_product(const IntMat& a, const IntMat& b) {
    std::size_t n = a.size(), k = b.size(), m = k ? b[0].size() : 0;
    IntMat r(n, std::vector<mpz_class>(m, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < k; ++t) {
            if (a[i][t] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) r[i][j] += a[i][t] * b[t][j];
        }
    return r;
}

bool matrix_equal(const IntMat& a, const IntMat& b) {
    return a == b;
}

namespace {

IntMat identity_matrix(int n) {
    IntMat m(static_cast<std::size_t>(n), std::vector<mpz_class>(static_cast<std::size_t>(n), 0));
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    return m;
}

IntMat matrix_scale(const mpz_class& k, const IntMat& a) {
    IntMat r = a;
    for (auto& row : r)
        for (auto& x : row) x *= k;
    return r;
}

IntMat matrix_sub(const IntMat& a, const IntMat& b) {
    IntMat r = a;
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r[i].size(); ++j) r[i][j] -= b[i][j];
    return r;
}

IntMat projection_matrix(const ManinBasis& basis) {
    int nsym = basis.symbol_count();
    IntMat proj(static_cast<std::size_t>(basis.rank()), std::vector<mpz_class>(static_cast<std::size_t>(nsym), 0));
    for (int t = 0; t < nsym; ++t) {
        auto cls = basis.symbol_class(t);
        for (int i = 0; i < basis.rank(); ++i)
            proj[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = cls[static_cast<std::size_t>(i)];
    }
    return proj;
}

IntMat lift_matrix(const ManinBasis& basis) {
    int nsym = basis.symbol_count();
    IntMat liftm(static_cast<std::size_t>(nsym), std::vector<mpz_class>(static_cast<std::size_t>(basis.rank()), 0));
    for (int j = 0; j < basis.rank(); ++j) {
        std::vector<mpz_class> unit(static_cast<std::size_t>(basis.rank()), 0);
        unit[static_cast<std::size_t>(j)] = 1;
        auto l = basis.lift(unit);
        for (int i = 0; i < nsym; ++i) liftm[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = l[static_cast<std::size_t>(i)];
    }
    return liftm;
}

// T_p for p coprime to the level, via the Heilbronn family on Manin symbols.
IntMat hecke_prime_heilbronn(const ManinBasis& basis, long long p) {
    int nsym = basis.symbol_count();
    IntMat big(static_cast<std::size_t>(nsym), std::vector<mpz_class>(static_cast<std::size_t>(nsym), 0));
    auto mats = heilbronn_cremona(p);
    for (int i = 0; i < nsym; ++i) {
        auto [u, v] = basis.symbols()[static_cast<std::size_t>(i)];
        for (const auto& h : mats) {
            long long uu = u * h.x + v * h.z;
            long long vv = u * h.y + v * h.w;
            int j = basis.symbol_index(uu, vv); // -1 when (uu:vv) leaves P^1
            if (j < 0) continue;
            big[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] += 1;
        }
    }
    return matrix_product(projection_matrix(basis), matrix_product(big, lift_matrix(basis)));
}

// U_q for prime q dividing the level, via coset representatives [[1, j],[0, q]]
// acting on the modular-symbol realization of each basis class.
IntMat hecke_prime_coset(const ManinBasis& basis, long long q) {
    int rank = basis.rank();
    IntMat out(static_cast<std::size_t>(rank), std::vector<mpz_class>(static_cast<std::size_t>(rank), 0));
    for (int col = 0; col < rank; ++col) {
        std::vector<mpz_class> unit(static_cast<std::size_t>(rank), 0);
        unit[static_cast<std::size_t>(col)] = 1;
        auto symvec = basis.lift(unit);
        HomologyClass acc = zero_class(basis);
        for (std::size_t i = 0; i < symvec.size(); ++i) {
            if (symvec[i] == 0) continue;
            auto m = basis.symbol_lift_matrix(static_cast<int>(i));
            // symbol i is the class of {b/d -> a/c}; apply z -> (z + j)/q
            HomologyClass per_symbol = zero_class(basis);
            for (long long j = 0; j < q; ++j) {
                Rational from{mpz_from_ll(m[1] + j * m[3]), mpz_from_ll(q * m[3])};
                Rational to{mpz_from_ll(m[0] + j * m[2]), mpz_from_ll(q * m[2])};
                per_symbol = per_symbol + symbol_from_rationals(from, to, basis);
            }
            acc = acc + symvec[i] * per_symbol;
        }
        for (int i = 0; i < rank; ++i)
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(col)] = acc.coords[static_cast<std::size_t>(i)];
    }
    return out;
}

} // namespace

IntMat hecke_matrix(const ManinBasis& basis, long long n) {
    if (n < 1) throw std::domain_error("Hecke index must be positive");
    IntMat total = identity_matrix(basis.rank());
    for (auto [q, e] : factorize(n)) {
        IntMat prime_power;
        if (basis.level() % q == 0) {
            IntMat Uq = hecke_prime_coset(basis, q);
            prime_power = Uq;
            for (int i = 1; i < e; ++i) prime_power = matrix_product(prime_power, Uq);
        } else {
            IntMat Tq = hecke_prime_heilbronn(basis, q);
            IntMat prev = identity_matrix(basis.rank());
            IntMat cur = Tq;
            for (int i = 1; i < e; ++i) {
                IntMat next = matrix_sub(matrix_product(Tq, cur), matrix_scale(mpz_from_ll(q), prev));
                prev = cur;
                cur = next;
            }
            prime_power = cur;
        }
        total = matrix_product(total, prime_power);
    }
    return total;
}

IntMat star_matrix(const ManinBasis& basis) {
    int nsym = basis.symbol_count();
    IntMat big(static_cast<std::size_t>(nsym), std::vector<mpz_class>(static_cast<std::size_t>(nsym), 0));
    for (int i = 0; i < nsym; ++i) {
        auto [u, v] = basis.symbols()[static_cast<std::size_t>(i)];
        int j = basis.symbol_index(-u, v);
        if (j < 0) throw std::logic_error("star image invalid");
        big[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = 1;
    }
    return matrix_product(projection_matrix(basis), matrix_product(big, lift_matrix(basis)));
}

// ---------- eigen decomposition ----------

namespace {

std::vector<mpz_class> saturate(const std::vector<mpq_class>& v) {
    mpz_class lcm_den = 1;
    for (const auto& x : v) {
        mpz_class d = x.get_den();
        mpz_class g;
        mpz_gcd(g.get_mpz_t(), lcm_den.get_mpz_t(), d.get_mpz_t());
        lcm_den = lcm_den / g * d;
    }
    std::vector<mpz_class> w(v.size());
    mpz_class content = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        mpq_class scaled = v[i] * mpq_class(lcm_den);
        w[i] = scaled.get_num();
        mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), w[i].get_mpz_t());
    }
    if (content == 0) return w;
    int sign = 0;
    for (const auto& x : w) {
        if (x != 0) {
            sign = x > 0 ? 1 : -1;
            break;
        }
    }
    for (auto& x : w) x /= (sign >= 0 ? content : -content);
    return w;
}

struct Subspace {
    RatMat basis; // r x dim, columns span
};

RatMat columns_from_vectors(const std::vector<std::vector<mpq_class>>& vecs, std::size_t dim) {
    RatMat m(dim, std::vector<mpq_class>(vecs.size(), 0));
    for (std::size_t j = 0; j < vecs.size(); ++j)
        for (std::size_t i = 0; i < dim; ++i) m[i][j] = vecs[j][i];
    return m;
}

// Matrix of op restricted to the column span of B: op * B = B * X.
RatMat restrict_operator(const RatMat& op, const RatMat& B) {
    RatMat opB = rat_product(op, B);
    std::size_t dim = B.empty() ? 0 : B[0].size();
    RatMat X(dim, std::vector<mpq_class>(dim));
    for (std::size_t col = 0; col < dim; ++col) {
        std::vector<mpq_class> y(B.size());
        for (std::size_t i = 0; i < B.size(); ++i) y[i] = opB[i][col];
        auto x = rat_solve(B, y);
        for (std::size_t i = 0; i < dim; ++i) X[i][col] = x[i];
    }
    return X;
}

RatMat rat_power(RatMat m, int e) {
    std::size_t n = m.size();
    RatMat r(n, std::vector<mpq_class>(n, 0));
    for (std::size_t i = 0; i < n; ++i) r[i][i] = 1;
    while (e > 0) {
        if (e & 1) r = rat_product(r, m);
        m = rat_product(m, m);
        e >>= 1;
    }
    return r;
}

} // namespace

std::vector<EigenData> eigen_decompose(const ManinBasis& basis, const std::vector<long long>& primes) {
    int r = basis.rank();
    std::vector<EigenData> out;
    if (r == 0) return out;

    // Cuspidal lattice = integer kernel of the boundary map.
    IntMat bmat(basis.cusps().size(), std::vector<mpz_class>(static_cast<std::size_t>(r), 0));
    for (int j = 0; j < r; ++j) {
        std::vector<mpz_class> unit(static_cast<std::size_t>(r), 0);
        unit[static_cast<std::size_t>(j)] = 1;
        auto d = boundary(HomologyClass{basis.level(), unit}, basis);
        for (std::size_t i = 0; i < d.multiplicities.size(); ++i) bmat[i][static_cast<std::size_t>(j)] = d.multiplicities[i];
    }
    IntMat kernel_vecs = integer_kernel(bmat); // list of coordinate vectors
    std::size_t g2 = kernel_vecs.size();       // 2g
    if (g2 == 0) return out;

    RatMat cuspidal(static_cast<std::size_t>(r), std::vector<mpq_class>(g2, 0));
    for (std::size_t j = 0; j < g2; ++j)
        for (int i = 0; i < r; ++i) cuspidal[static_cast<std::size_t>(i)][j] = mpq_class(kernel_vecs[j][static_cast<std::size_t>(i)]);

    // Hecke matrices for the splitting primes (coprime to N only).
    std::vector<long long> split_primes;
    for (long long q : primes)
        if (basis.level() % q != 0) split_primes.push_back(q);
    if (split_primes.empty()) throw UnsupportedHeckeField();

    std::map<long long, RatMat> ops;
    std::map<long long, IntMat> int_ops;
    for (long long q : primes) {
        IntMat m = hecke_matrix(basis, q);
        int_ops[q] = m;
        ops[q] = rat_from_int(m);
    }

    // Split the cuspidal space by integer eigenvalues of each T_q.
    std::vector<Subspace> pieces{Subspace{cuspidal}};
    for (long long q : split_primes) {
        std::vector<Subspace> next;
        long long hasse = static_cast<long long>(2.0 * std::sqrt(static_cast<double>(q))) + 1;
        for (auto& piece : pieces) {
            std::size_t dim = piece.basis.empty() ? 0 : piece.basis[0].size();
            if (dim == 0) continue;
            RatMat Tq = restrict_operator(ops.at(q), piece.basis);
            std::size_t found = 0;
            std::vector<Subspace> split_here;
            for (long long a = -hasse; a <= hasse; ++a) {
                RatMat shifted = Tq;
                for (std::size_t i = 0; i < dim; ++i) shifted[i][i] -= mpq_class(mpz_from_ll(a));
                RatMat pw = rat_power(shifted, static_cast<int>(dim));
                auto ker = rat_kernel(pw);
                if (ker.empty()) continue;
                RatMat sub = rat_product(piece.basis, columns_from_vectors(ker, dim));
                found += ker.size();
                split_here.push_back(Subspace{sub});
            }
            if (found != dim) throw UnsupportedHeckeField();
            for (auto& s : split_here) next.push_back(std::move(s));
        }
        pieces = std::move(next);
    }

    RatMat star = rat_from_int(star_matrix(basis));

    struct Line {
        std::vector<mpz_class> plus, minus;
    };
    std::vector<Line> lines;
    for (auto& piece : pieces) {
        std::size_t dim = piece.basis.empty() ? 0 : piece.basis[0].size();
        if (dim != 2) throw UnsupportedHeckeField();
        RatMat S = restrict_operator(star, piece.basis);
        Line line;
        bool have_plus = false, have_minus = false;
        for (int sign : {+1, -1}) {
            RatMat shifted = S;
            for (std::size_t i = 0; i < dim; ++i) shifted[i][i] -= sign;
            auto ker = rat_kernel(shifted);
            if (ker.size() != 1) throw UnsupportedHeckeField();
            RatMat vec = rat_product(piece.basis, columns_from_vectors(ker, dim));
            std::vector<mpq_class> v(static_cast<std::size_t>(r));
            for (int i = 0; i < r; ++i) v[static_cast<std::size_t>(i)] = vec[static_cast<std::size_t>(i)][0];
            auto sat = saturate(v);
            if (sign > 0) {
                line.plus = sat;
                have_plus = true;
            } else {
                line.minus = sat;
                have_minus = true;
            }
        }
        if (!have_plus || !have_minus) throw UnsupportedHeckeField();
        lines.push_back(std::move(line));
    }

    // Eigenvalues for all requested primes, read off the plus generator.
    auto eigenvalue_of = [&](const IntMat& m, const std::vector<mpz_class>& e) {
        auto img = apply_matrix(m, e);
        std::size_t pivot = 0;
        while (pivot < e.size() && e[pivot] == 0) ++pivot;
        if (pivot == e.size()) throw UnsupportedHeckeField();
        mpz_class num = img[pivot], den = e[pivot];
        mpz_class a = num / den;
        if (a * den != num) throw UnsupportedHeckeField();
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (img[i] != a * e[i]) throw UnsupportedHeckeField();
        }
        return a;
    };

    struct Packet {
        std::vector<mpz_class> key;
        Line line;
        std::map<long long, mpz_class> eigenvalues;
    };
    std::vector<Packet> packets;
    for (auto& line : lines) {
        Packet p;
        p.line = line;
        for (long long q : primes) {
            mpz_class a = eigenvalue_of(int_ops.at(q), line.plus);
            mpz_class a_minus = eigenvalue_of(int_ops.at(q), line.minus);
            if (a != a_minus) throw UnsupportedHeckeField();
            p.eigenvalues[q] = a;
            p.key.push_back(a);
        }
        packets.push_back(std::move(p));
    }
    std::sort(packets.begin(), packets.end(), [](const Packet& a, const Packet& b) { return a.key < b.key; });

    // Eisenstein complement: generalized (q0+1)-eigenspace of T_{q0}.
    long long q0 = split_primes.front();
    RatMat shifted = ops.at(q0);
    for (int i = 0; i < r; ++i) shifted[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] -= mpq_class(mpz_from_ll(q0 + 1));
    auto eis = rat_kernel(rat_power(shifted, r));

    // Dual basis: invert [lines... | eisenstein...].
    std::size_t d = 2 * packets.size();
    if (d + eis.size() != static_cast<std::size_t>(r)) throw UnsupportedHeckeField();
    RatMat cols(static_cast<std::size_t>(r), std::vector<mpq_class>(static_cast<std::size_t>(r), 0));
    for (std::size_t f = 0; f < packets.size(); ++f) {
        for (int i = 0; i < r; ++i) {
            cols[static_cast<std::size_t>(i)][2 * f] = mpq_class(packets[f].line.plus[static_cast<std::size_t>(i)]);
            cols[static_cast<std::size_t>(i)][2 * f + 1] = mpq_class(packets[f].line.minus[static_cast<std::size_t>(i)]);
        }
    }
    for (std::size_t j = 0; j < eis.size(); ++j)
        for (int i = 0; i < r; ++i) cols[static_cast<std::size_t>(i)][d + j] = eis[j][static_cast<std::size_t>(i)];
    RatMat dual = rat_inverse(cols);

    for (std::size_t f = 0; f < packets.size(); ++f) {
        EigenData ed;
        ed.level = basis.level();
        ed.newform_id = static_cast<int>(f);
        ed.eigenvalues = packets[f].eigenvalues;
        ed.plus_generator = HomologyClass{basis.level(), packets[f].line.plus};
        ed.minus_generator = HomologyClass{basis.level(), packets[f].line.minus};
        ed.dual_plus = dual[2 * f];
        ed.dual_minus = dual[2 * f + 1];
        out.push_back(std::move(ed));
    }
    return out;
}

// ---------- class-group constructions ----------

HomologyClass construction1_class(const quad::QuadForm& cls, const HomologyClass& gamma0,
                                  const std::vector<long long>& factor_base, const ManinBasis& basis) {
    for (long long q : factor_base) {
        if (basis.level() % q == 0)
            throw std::domain_error("factor-base prime divides the level");
    }
    auto word = quad::factor_class(cls, factor_base);
    HomologyClass gamma = gamma0;
    for (const auto& pf : word) {
        IntMat t = hecke_matrix(basis, pf.a());
        gamma = HomologyClass{basis.level(), apply_matrix(t, gamma.coords)};
    }
    return gamma;
}

HomologyClass construction2_class(const quad::CMPoint& x0, const quad::CMPoint& xa,
                                  const Cusp& base_cusp, const ManinBasis& basis) {
    long long disc0 = x0.form().discriminant();
    long long disca = xa.form().discriminant();
    if (gcd_ll(disc0, basis.level()) != 1 || gcd_ll(disca, basis.level()) != 1)
        throw DiscriminantLevelClash();
    // Cusp shadows r(x) = Re(tau) = -b/(2a); both legs run through base_cusp.
    Cusp r0(-x0.form().b(), 2 * x0.form().a());
    Cusp ra(-xa.form().b(), 2 * xa.form().a());
    HomologyClass leg0 = symbol_from_cusps(r0, base_cusp, basis);
    HomologyClass leg1 = symbol_from_cusps(base_cusp, ra, basis);
    return leg0 + leg1;
}

StabilizerProbe stabilizer_probe(const ManinBasis& basis, const HomologyClass& gamma0,
                                 const quad::Discriminant& disc, const std::vector<long long>& factor_base,
                                 int trials, std::uint64_t seed) {
    auto classes = quad::enumerate_class_group(disc);
    SplitMix64 rng(seed);
    StabilizerProbe probe;
    probe.trials = trials;
    for (int t = 0; t < trials; ++t) {
        const auto& cls = classes[static_cast<std::size_t>(rng.below(classes.size()))];
        try {
            auto moved = construction1_class(cls, gamma0, factor_base, basis);
            if (moved == gamma0) ++probe.fixes;
        } catch (const quad::FactorBaseInsufficient&) {
            // unfactorable class: skip silently, still counts as a trial
        }
    }
    return probe;
}

} // namespace msiforge::modsym
