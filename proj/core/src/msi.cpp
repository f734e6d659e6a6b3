#include "msiforge/msi.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "msiforge/util.hpp"

namespace msiforge::msi {

PathModel build_path_model_manin(const modsym::ManinBasis& basis, int L) {
    PathModel model;
    if (basis.rank() == 0) throw EmptyModel();
    model.id = "manin-" + std::to_string(basis.level());
    model.max_length = L;
    int r = basis.rank();
    for (int i = 0; i < r; ++i) {
        std::vector<mpz_class> unit(static_cast<std::size_t>(r), 0);
        unit[static_cast<std::size_t>(i)] = 1;
        model.generators.push_back(std::move(unit));
    }
    std::vector<int> all(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) all[static_cast<std::size_t>(i)] = i;
    model.validity.assign(static_cast<std::size_t>(r), all);
    model.branching = static_cast<double>(r);
    return model;
}

PathModel build_path_model_graph(const ssgraph::IsogenyGraph& g, int L) {
    PathModel model;
    model.id = "graph-" + std::to_string(g.p) + "-" + std::to_string(g.ell);
    model.max_length = L;
    // Directed edges with multiplicity; value = cycle coordinates of the
    // closed-up edge.  Keeping parallel darts separate preserves the (l+1)
    // branching of the regular graph.
    std::vector<std::pair<int, int>> darts;
    for (int u = 0; u < static_cast<int>(g.adjacency.size()); ++u) {
        for (int v : g.adjacency[static_cast<std::size_t>(u)]) darts.emplace_back(u, v);
    }
    if (darts.empty()) throw EmptyModel();
    std::sort(darts.begin(), darts.end());
    for (const auto& [u, v] : darts) {
        auto cyc = ssgraph::cycle_from_path(g, {u, v});
        model.generators.push_back(ssgraph::cycle_coordinates(g, cyc));
    }
    model.validity.resize(darts.size());
    double total_out = 0;
    for (std::size_t i = 0; i < darts.size(); ++i) {
        for (std::size_t j = 0; j < darts.size(); ++j) {
            if (darts[i].second == darts[j].first) model.validity[i].push_back(static_cast<int>(j));
        }
        total_out += static_cast<double>(model.validity[i].size());
        if (model.validity[i].empty()) throw EmptyModel();
    }
    model.branching = total_out / static_cast<double>(darts.size());
    return model;
}

bool path_valid(const PathModel& model, const Path& p) {
    if (p.length() > model.max_length) return false;
    for (std::size_t i = 0; i < p.indices.size(); ++i) {
        int idx = p.indices[i];
        if (idx < 0 || idx >= static_cast<int>(model.generator_count())) return false;
        if (i > 0) {
            const auto& allowed = model.validity[static_cast<std::size_t>(p.indices[i - 1])];
            if (!std::binary_search(allowed.begin(), allowed.end(), idx)) return false;
        }
    }
    return true;
}

std::vector<mpz_class> path_value(const PathModel& model, const Path& p) {
    std::vector<mpz_class> v(model.value_dimension(), 0);
    for (int idx : p.indices) {
        const auto& gen = model.generators[static_cast<std::size_t>(idx)];
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += gen[i];
    }
    return v;
}

std::vector<mpz_class> path_multiplicity(const PathModel& model, const Path& p) {
    std::vector<mpz_class> mult(model.generator_count(), 0);
    for (int idx : p.indices) mult[static_cast<std::size_t>(idx)] += 1;
    return mult;
}

std::vector<mpz_class> period_residues(const coleman::PeriodVector& y) {
    std::vector<mpz_class> out;
    out.reserve(y.entries.size());
    for (const auto& e : y.entries) out.push_back(e.residue());
    return out;
}

namespace {

mpz_class modulus_of(const coleman::PeriodMatrix& A) {
    return pow_mpz(mpz_from_ll(A.prime), static_cast<unsigned long>(A.precision));
}

std::vector<mpz_class> reduce_vec(std::vector<mpz_class> v, const mpz_class& mod) {
    for (auto& x : v) {
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
        x = r;
    }
    return v;
}

std::string key_of(const std::vector<mpz_class>& v) {
    std::string k;
    for (const auto& x : v) {
        k += x.get_str();
        k.push_back('|');
    }
    return k;
}

coleman::PeriodVector period_from_residues(const std::vector<mpz_class>& res, const coleman::PeriodMatrix& A) {
    coleman::PeriodVector pv;
    pv.prime = A.prime;
    pv.precision = A.precision;
    pv.form_ids = A.form_ids;
    for (const auto& r : res) pv.entries.emplace_back(A.prime, r, A.precision);
    return pv;
}

} // namespace

Path sample_path(const PathModel& model, const std::string& seed, const std::string& domain_tag, int length) {
    SplitMix64 rng(derive_seed(seed, domain_tag));
    Path p;
    if (model.generator_count() == 0) throw EmptyModel();
    for (int step = 0; step < length; ++step) {
        if (step == 0) {
            p.indices.push_back(static_cast<int>(rng.below(model.generator_count())));
        } else {
            const auto& allowed = model.validity[static_cast<std::size_t>(p.indices.back())];
            if (allowed.empty()) throw EmptyModel();
            p.indices.push_back(allowed[rng.below(allowed.size())]);
        }
    }
    return p;
}

MSIInstance sample_instance(const PathModel& model, const coleman::PeriodMatrix& A, const std::string& seed) {
    Path witness = sample_path(model, seed, "msi/sample", model.max_length);
    mpz_class mod = modulus_of(A);
    auto y = reduce_vec(coleman::apply_period_matrix(A, path_value(model, witness)), mod);
    MSIInstance inst;
    inst.params.ell = A.prime;
    inst.params.m = A.precision;
    inst.params.d = static_cast<int>(A.rows.size());
    inst.params.L = model.max_length;
    inst.params.model_id = model.id;
    inst.params.level = A.form_ids.empty() ? 0 : A.form_ids.front().level;
    inst.target = period_from_residues(y, A);
    inst.witness = witness;
    return inst;
}

bool check_witness(const MSIInstance& inst, const PathModel& model, const coleman::PeriodMatrix& A,
                   const Path& candidate) {
    if (!path_valid(model, candidate)) return false;
    mpz_class mod = modulus_of(A);
    auto img = reduce_vec(coleman::apply_period_matrix(A, path_value(model, candidate)), mod);
    return img == reduce_vec(period_residues(inst.target), mod);
}

namespace {

struct Searcher {
    const PathModel& model;
    const coleman::PeriodMatrix& A;
    mpz_class mod;
    std::vector<mpz_class> target;
    std::uint64_t cap;
    std::uint64_t expansions = 0;

    Searcher(const PathModel& m, const coleman::PeriodMatrix& a, const std::vector<mpz_class>& y,
             std::uint64_t work_cap)
        : model(m), A(a), mod(modulus_of(a)), target(y), cap(work_cap) {}

    void bump() {
        if (++expansions > cap) throw WorkCapExceeded();
    }
};

// Enumerates valid sequences of length <= max_len in lexicographic order,
// calling visit(path, value) for each (including the empty path).
template <typename Visit>
void enumerate_paths(const PathModel& model, int max_len, Searcher& s, Visit&& visit) {
    std::vector<int> stack;
    std::vector<std::vector<mpz_class>> values{std::vector<mpz_class>(model.value_dimension(), 0)};
    if (visit(stack, values.back())) return;
    // Iterative DFS with explicit child iterators.
    std::vector<std::size_t> child_pos{0};
    while (true) {
        int depth = static_cast<int>(stack.size());
        bool descend = false;
        if (depth < max_len) {
            std::size_t n_children = depth == 0
                                         ? model.generator_count()
                                         : model.validity[static_cast<std::size_t>(stack.back())].size();
            std::size_t& pos = child_pos.back();
            if (pos < n_children) {
                int idx = depth == 0 ? static_cast<int>(pos)
                                     : model.validity[static_cast<std::size_t>(stack.back())][pos];
                ++pos;
                s.bump();
                stack.push_back(idx);
                auto v = values.back();
                const auto& gen = model.generators[static_cast<std::size_t>(idx)];
                for (std::size_t i = 0; i < v.size(); ++i) v[i] += gen[i];
                values.push_back(std::move(v));
                child_pos.push_back(0);
                if (visit(stack, values.back())) return;
                descend = true;
            }
        }
        if (!descend) {
            if (stack.empty()) break;
            stack.pop_back();
            values.pop_back();
            child_pos.pop_back();
        }
    }
}

} // namespace

SolveResult solve_bruteforce(const MSIInstance& inst, const PathModel& model, const coleman::PeriodMatrix& A,
                             std::uint64_t work_cap) {
    SolveResult result;
    mpz_class mod = modulus_of(A);
    auto target = reduce_vec(period_residues(inst.target), mod);
    Searcher s(model, A, target, work_cap);
    try {
        enumerate_paths(model, model.max_length, s, [&](const std::vector<int>& stack,
                                                        const std::vector<mpz_class>& value) {
            auto img = reduce_vec(coleman::apply_period_matrix(A, value), mod);
            if (img == target) {
                result.witness = Path{stack};
                return true;
            }
            return false;
        });
    } catch (const WorkCapExceeded&) {
        result.expansions = s.expansions;
        throw;
    }
    result.expansions = s.expansions;
    return result;
}

SolveResult solve_mitm(const MSIInstance& inst, const PathModel& model, const coleman::PeriodMatrix& A,
                       std::uint64_t work_cap) {
    SolveResult result;
    mpz_class mod = modulus_of(A);
    auto target = reduce_vec(period_residues(inst.target), mod);
    int L = model.max_length;
    int H = (L + 1) / 2;

    Searcher s(model, A, target, work_cap);

    // Forward table: images of length-H prefixes, plus direct hits among
    // prefixes of length <= H.
    std::map<std::string, std::vector<Path>> prefix_by_key;
    try {
        enumerate_paths(model, H, s, [&](const std::vector<int>& stack, const std::vector<mpz_class>& value) {
            auto img = reduce_vec(coleman::apply_period_matrix(A, value), mod);
            if (img == target && !result.witness) {
                result.witness = Path{stack};
                return true;
            }
            if (static_cast<int>(stack.size()) == H) {
                prefix_by_key[key_of(img)].push_back(Path{stack});
            }
            return false;
        });
    } catch (const WorkCapExceeded&) {
        result.expansions = s.expansions;
        throw;
    }
    if (result.witness) {
        result.expansions = s.expansions;
        return result;
    }

    // Backward pass: suffixes of length 1..L-H; need target - A*value(suffix).
    try {
        enumerate_paths(model, L - H, s, [&](const std::vector<int>& stack, const std::vector<mpz_class>& value) {
            if (stack.empty()) return false;
            auto img = coleman::apply_period_matrix(A, value);
            std::vector<mpz_class> need(target.size());
            for (std::size_t i = 0; i < need.size(); ++i) {
                mpz_class diff = target[i] - img[i];
                mpz_fdiv_r(need[i].get_mpz_t(), diff.get_mpz_t(), mod.get_mpz_t());
            }
            auto it = prefix_by_key.find(key_of(need));
            if (it == prefix_by_key.end()) return false;
            int first = stack.front();
            for (const auto& prefix : it->second) {
                const auto& allowed = model.validity[static_cast<std::size_t>(prefix.indices.back())];
                if (std::binary_search(allowed.begin(), allowed.end(), first)) {
                    Path full = prefix;
                    full.indices.insert(full.indices.end(), stack.begin(), stack.end());
                    result.witness = full;
                    return true;
                }
            }
            return false;
        });
    } catch (const WorkCapExceeded&) {
        result.expansions = s.expansions;
        throw;
    }
    result.expansions = s.expansions;
    return result;
}

// ---------- linear algebra over Z/l^m ----------

namespace {

int val_mod(const mpz_class& x, long long ell, int m) {
    if (x == 0) return m;
    mpz_class r = x;
    int v = 0;
    while (v < m) {
        mpz_class q, rem;
        mpz_class p = mpz_from_ll(ell);
        mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), r.get_mpz_t(), p.get_mpz_t());
        if (rem != 0) break;
        r = q;
        ++v;
    }
    return v;
}

} // namespace

LinearSolution solve_linear_unconstrained(const std::vector<std::vector<mpz_class>>& A,
                                          const std::vector<mpz_class>& y, long long ell, int m) {
    mpz_class mod = pow_mpz(mpz_from_ll(ell), static_cast<unsigned long>(m));
    int rows = static_cast<int>(A.size());
    int cols = rows ? static_cast<int>(A[0].size()) : 0;

    auto red = [&](const mpz_class& x) {
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), mod.get_mpz_t());
        return r;
    };

    // U * A * V = D with U, V invertible over Z/l^m and D diagonal l-powers.
    std::vector<std::vector<mpz_class>> M(A.size());
    for (int i = 0; i < rows; ++i) {
        M[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(cols));
        for (int j = 0; j < cols; ++j) M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = red(A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
    std::vector<mpz_class> b(y.size());
    for (int i = 0; i < rows; ++i) b[static_cast<std::size_t>(i)] = red(y[static_cast<std::size_t>(i)]);

    // V accumulates column operations.
    std::vector<std::vector<mpz_class>> V(static_cast<std::size_t>(cols),
                                          std::vector<mpz_class>(static_cast<std::size_t>(cols), 0));
    for (int i = 0; i < cols; ++i) V[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;

    std::vector<int> pivot_val;
    int t = 0;
    while (t < rows && t < cols) {
        // minimal-valuation pivot in the remaining block
        int pi = -1, pj = -1, pv = m + 1;
        for (int i = t; i < rows; ++i) {
            for (int j = t; j < cols; ++j) {
                int v = val_mod(M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], ell, m);
                if (v < pv) {
                    pv = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if (pi < 0 || pv >= m) break;
        std::swap(M[static_cast<std::size_t>(pi)], M[static_cast<std::size_t>(t)]);
        std::swap(b[static_cast<std::size_t>(pi)], b[static_cast<std::size_t>(t)]);
        if (pj != t) {
            for (int i = 0; i < rows; ++i)
                std::swap(M[static_cast<std::size_t>(i)][static_cast<std::size_t>(pj)], M[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]);
            for (int i = 0; i < cols; ++i)
                std::swap(V[static_cast<std::size_t>(i)][static_cast<std::size_t>(pj)], V[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]);
        }
        // pivot = unit * l^pv; normalize the pivot row by the unit inverse.
        mpz_class pivot = M[static_cast<std::size_t>(t)][static_cast<std::size_t>(t)];
        mpz_class unit = pivot / pow_mpz(mpz_from_ll(ell), static_cast<unsigned long>(pv));
        mpz_class uinv;
        if (mpz_invert(uinv.get_mpz_t(), unit.get_mpz_t(), mod.get_mpz_t()) == 0)
            throw std::logic_error("unit inversion failed");
        for (int j = t; j < cols; ++j)
            M[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] = red(M[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] * uinv);
        b[static_cast<std::size_t>(t)] = red(b[static_cast<std::size_t>(t)] * uinv);
        mpz_class lpv = pow_mpz(mpz_from_ll(ell), static_cast<unsigned long>(pv));
        // clear column below (rows) -- all entries have valuation >= pv
        for (int i = t + 1; i < rows; ++i) {
            mpz_class e = M[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
            if (e == 0) continue;
            mpz_class f = e / lpv; // exact: e has valuation >= pv
            for (int j = t; j < cols; ++j)
                M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    red(M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - f * M[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)]);
            b[static_cast<std::size_t>(i)] = red(b[static_cast<std::size_t>(i)] - f * b[static_cast<std::size_t>(t)]);
        }
        // clear row to the right (columns)
        for (int j = t + 1; j < cols; ++j) {
            mpz_class e = M[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
            if (e == 0) continue;
            mpz_class f = e / lpv;
            for (int i = 0; i < rows; ++i)
                M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    red(M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - f * M[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]);
            for (int i = 0; i < cols; ++i)
                V[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    red(V[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - f * V[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]);
        }
        pivot_val.push_back(pv);
        ++t;
    }

    LinearSolution sol;
    // D z = b': rows t..rows-1 must have b = 0; rows i < t: l^{v_i} z_i = b_i.
    std::vector<mpz_class> z(static_cast<std::size_t>(cols), 0);
    for (int i = t; i < rows; ++i) {
        if (b[static_cast<std::size_t>(i)] != 0) return sol; // unsolvable
    }
    for (int i = 0; i < t; ++i) {
        int v = pivot_val[static_cast<std::size_t>(i)];
        mpz_class lv = pow_mpz(mpz_from_ll(ell), static_cast<unsigned long>(v));
        mpz_class rem;
        mpz_fdiv_r(rem.get_mpz_t(), b[static_cast<std::size_t>(i)].get_mpz_t(), lv.get_mpz_t());
        if (rem != 0) return sol; // unsolvable at this valuation
        z[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] / lv;
    }
    sol.solvable = true;
    sol.particular.assign(static_cast<std::size_t>(cols), 0);
    for (int i = 0; i < cols; ++i) {
        mpz_class acc = 0;
        for (int k = 0; k < cols; ++k) acc += V[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * z[static_cast<std::size_t>(k)];
        sol.particular[static_cast<std::size_t>(i)] = red(acc);
    }
    // Kernel generators: l^{m - v_i} e_i for pivot columns with v_i > 0, and
    // free columns beyond t.
    auto v_column = [&](int k) {
        std::vector<mpz_class> col(static_cast<std::size_t>(cols));
        for (int i = 0; i < cols; ++i) col[static_cast<std::size_t>(i)] = V[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        return col;
    };
    for (int i = 0; i < t; ++i) {
        int v = pivot_val[static_cast<std::size_t>(i)];
        if (v == 0) continue;
        mpz_class scale = pow_mpz(mpz_from_ll(ell), static_cast<unsigned long>(m - v));
        auto col = v_column(i);
        for (auto& x : col) x = red(x * scale);
        sol.kernel.push_back(std::move(col));
    }
    for (int k = t; k < cols; ++k) sol.kernel.push_back(v_column(k));
    return sol;
}

std::optional<Path> round_to_path_experimental(const PathModel& model, const std::vector<mpz_class>& x,
                                               long long ell, int m) {
    // Desired multiplicity per generator: the centered representative of x_i.
    mpz_class mod = pow_mpz(mpz_from_ll(ell), static_cast<unsigned long>(m));
    std::vector<long long> want(model.generator_count(), 0);
    for (std::size_t i = 0; i < want.size() && i < x.size(); ++i) {
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), x[i].get_mpz_t(), mod.get_mpz_t());
        if (r * 2 > mod) r -= mod;
        long long w = r.get_si();
        want[i] = std::max<long long>(0, w); // negative steps cannot be walked
    }
    Path p;
    long long remaining = 0;
    for (long long w : want) remaining += w;
    if (remaining > model.max_length) return std::nullopt;
    int cur = -1;
    while (remaining > 0) {
        int pick = -1;
        if (cur < 0) {
            for (std::size_t i = 0; i < want.size(); ++i)
                if (want[i] > 0) {
                    pick = static_cast<int>(i);
                    break;
                }
        } else {
            for (int cand : model.validity[static_cast<std::size_t>(cur)]) {
                if (want[static_cast<std::size_t>(cand)] > 0) {
                    pick = cand;
                    break;
                }
            }
        }
        if (pick < 0) return std::nullopt;
        p.indices.push_back(pick);
        --want[static_cast<std::size_t>(pick)];
        --remaining;
        cur = pick;
    }
    return p;
}

// ---------- collision experiment ----------

namespace {

struct ClassTally {
    std::map<std::string, std::uint64_t> class_count; // value key -> #sequences
    std::map<std::string, std::string> class_image;   // value key -> image key
};

void merge_tally(ClassTally& into, const ClassTally& from) {
    for (const auto& [k, v] : from.class_count) into.class_count[k] += v;
    for (const auto& [k, v] : from.class_image) into.class_image.emplace(k, v);
}

} // namespace

CollisionReport collision_experiment(const PathModel& model, const coleman::PeriodMatrix& A,
                                     std::uint64_t trials, const std::string& seed,
                                     std::uint64_t work_cap, int threads) {
    CollisionReport report;
    mpz_class mod = modulus_of(A);
    int d = static_cast<int>(A.rows.size());
    report.ell_power_md = std::pow(static_cast<double>(A.prime), static_cast<double>(A.precision) * d);
    report.predicted_heuristic =
        std::pow(std::pow(model.branching, model.max_length), 2.0) / (2.0 * report.ell_power_md);

    double space_estimate = std::pow(model.branching, model.max_length + 1);
    bool full = space_estimate <= static_cast<double>(work_cap);
    report.full_enumeration = full;

    ClassTally tally;
    std::uint64_t enumerated = 0;

    if (full) {
        // Partition the top-level generator choice across workers.
        int nthreads = std::max(1, threads);
        std::vector<ClassTally> parts(static_cast<std::size_t>(nthreads));
        std::vector<std::uint64_t> counts(static_cast<std::size_t>(nthreads), 0);
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nthreads));
        auto work = [&](int w) {
            try {
                coleman::PeriodMatrix local = A;
                Searcher s(model, local, {}, work_cap);
                // empty path belongs to worker 0
                if (w == 0) {
                    std::vector<mpz_class> zero(model.value_dimension(), 0);
                    auto img = reduce_vec(coleman::apply_period_matrix(local, zero), mod);
                    parts[static_cast<std::size_t>(w)].class_count[key_of(zero)] = 1;
                    parts[static_cast<std::size_t>(w)].class_image[key_of(zero)] = key_of(img);
                    counts[static_cast<std::size_t>(w)] += 1;
                }
                for (std::size_t g0 = static_cast<std::size_t>(w); g0 < model.generator_count();
                     g0 += static_cast<std::size_t>(nthreads)) {
                    // depth-first over all paths starting with g0
                    std::vector<int> stack{static_cast<int>(g0)};
                    std::vector<std::vector<mpz_class>> values;
                    values.push_back(model.generators[g0]);
                    std::vector<std::size_t> child_pos{0};
                    auto visit = [&](const std::vector<int>& st, const std::vector<mpz_class>& value) {
                        auto img = reduce_vec(coleman::apply_period_matrix(local, value), mod);
                        auto& part = parts[static_cast<std::size_t>(w)];
                        std::string vk = key_of(value);
                        part.class_count[vk] += 1;
                        part.class_image.emplace(vk, key_of(img));
                        counts[static_cast<std::size_t>(w)] += 1;
                        (void)st;
                    };
                    visit(stack, values.back());
                    while (!stack.empty()) {
                        int depth = static_cast<int>(stack.size());
                        bool descend = false;
                        if (depth < model.max_length) {
                            const auto& allowed = model.validity[static_cast<std::size_t>(stack.back())];
                            std::size_t& pos = child_pos.back();
                            if (pos < allowed.size()) {
                                int idx = allowed[pos];
                                ++pos;
                                s.bump();
                                stack.push_back(idx);
                                auto v = values.back();
                                const auto& gen = model.generators[static_cast<std::size_t>(idx)];
                                for (std::size_t i = 0; i < v.size(); ++i) v[i] += gen[i];
                                values.push_back(v);
                                child_pos.push_back(0);
                                visit(stack, values.back());
                                descend = true;
                            }
                        }
                        if (!descend) {
                            stack.pop_back();
                            values.pop_back();
                            child_pos.pop_back();
                            if (child_pos.empty()) break;
                        }
                    }
                }
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        };
        if (nthreads == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < nthreads; ++w) pool.emplace_back(work, w);
            for (auto& th : pool) th.join();
        }
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
        for (int w = 0; w < nthreads; ++w) {
            merge_tally(tally, parts[static_cast<std::size_t>(w)]);
            enumerated += counts[static_cast<std::size_t>(w)];
        }
    } else {
        if (trials == 0) throw WorkCapExceeded();
        for (std::uint64_t i = 0; i < trials; ++i) {
            Path p = sample_path(model, seed, "msi/collide/" + std::to_string(i), model.max_length);
            auto value = path_value(model, p);
            auto img = reduce_vec(coleman::apply_period_matrix(A, value), mod);
            std::string vk = key_of(value);
            tally.class_count[vk] += 1;
            tally.class_image.emplace(vk, key_of(img));
            ++enumerated;
        }
    }

    report.paths_enumerated = enumerated;
    report.distinct_classes = tally.class_count.size();
    std::map<std::string, std::uint64_t> bucket; // image key -> distinct classes mapping there
    for (const auto& [vk, ik] : tally.class_image) bucket[ik] += 1;
    std::uint64_t pairs = 0;
    for (const auto& [ik, n] : bucket) pairs += n * (n - 1) / 2;
    report.colliding_pairs = pairs;
    double nc = static_cast<double>(report.distinct_classes);
    report.predicted = nc * nc / (2.0 * report.ell_power_md);
    return report;
}

ParameterVerdict parameter_check(long long ell, int m, int d, long long B, int L, int lambda) {
    if (ell < 2 || m < 1 || d < 1 || B < 1 || L < 1 || lambda < 0)
        throw std::domain_error("parameters must be positive");
    ParameterVerdict v;
    mpz_class BL = pow_mpz(mpz_from_ll(B), static_cast<unsigned long>(L));
    mpz_class two_lambda = pow_mpz(mpz_from_ll(2), static_cast<unsigned long>(lambda));
    v.search_hard = BL >= two_lambda;
    // B^(L/2) >= 2^lambda  <=>  B^L >= 2^(2 lambda)
    mpz_class two_2lambda = pow_mpz(mpz_from_ll(2), static_cast<unsigned long>(2 * lambda));
    v.quantum_margin = BL >= two_2lambda;
    mpz_class lmd = pow_mpz(mpz_from_ll(ell), static_cast<unsigned long>(m) * static_cast<unsigned long>(d));
    mpz_class B2L = pow_mpz(mpz_from_ll(B), 2 * static_cast<unsigned long>(L));
    v.separated = lmd >= B2L;
    return v;
}

std::vector<std::vector<mpz_class>> effective_matrix(const PathModel& model, const coleman::PeriodMatrix& A) {
    mpz_class mod = modulus_of(A);
    std::size_t d = A.rows.size();
    std::size_t r = model.generator_count();
    std::vector<std::vector<mpz_class>> M(d, std::vector<mpz_class>(r, 0));
    for (std::size_t j = 0; j < r; ++j) {
        auto col = coleman::apply_period_matrix(A, model.generators[j]);
        for (std::size_t i = 0; i < d; ++i) {
            mpz_class rr;
            mpz_fdiv_r(rr.get_mpz_t(), col[i].get_mpz_t(), mod.get_mpz_t());
            M[i][j] = rr;
        }
    }
    return M;
}

} // namespace msiforge::msi
