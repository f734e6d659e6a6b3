// msi-forge: class groups, modular-symbol homology, truncated l-adic periods,
// MSI experiments, and the identification protocol, from one binary.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "msiforge/serialize.hpp"
#include "msiforge/util.hpp"

namespace {

using namespace msiforge;
using io::json;

struct CommonOpts {
    std::string out;
    bool pretty = false;
    int threads = 1;
};

void emit(const CommonOpts& opts, const json& j) {
    std::string text = j.dump(2);
    text.push_back('\n');
    if (opts.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(opts.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + opts.out);
        f << text;
    }
}

void emit_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

json load_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open input file: " + path);
    json j;
    f >> j;
    return j;
}

std::vector<std::uint8_t> load_bytes(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open input file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    std::string s = ss.str();
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

std::vector<long long> parse_ll_list(const std::string& csv) {
    std::vector<long long> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoll(item));
    }
    return out;
}

std::vector<long long> default_primes(long long N) {
    std::vector<long long> primes;
    for (long long q : {2LL, 3LL, 5LL, 7LL}) {
        if (N % q != 0) primes.push_back(q);
    }
    for (long long q = 2; q <= N; ++q) {
        if (N % q == 0 && is_prime_u64(static_cast<unsigned long long>(q))) primes.push_back(q);
    }
    std::sort(primes.begin(), primes.end());
    return primes;
}

// Deterministic pipeline pieces shared by periods / msi / idproto / prf.
struct Pipeline {
    std::unique_ptr<modsym::ManinBasis> basis;
    std::vector<modsym::EigenData> eigen;
    coleman::PeriodMatrix A;
    msi::PathModel model;
};

Pipeline make_pipeline(long long N, long long ell, int m, int L, bool plus_only) {
    Pipeline p;
    p.basis = std::make_unique<modsym::ManinBasis>(N);
    p.eigen = modsym::eigen_decompose(*p.basis, default_primes(N));
    coleman::PeriodOptions opts;
    opts.plus_only = plus_only;
    p.A = coleman::period_matrix(*p.basis, p.eigen, ell, m, opts);
    p.model = msi::build_path_model_manin(*p.basis, L);
    return p;
}

// ---------------- subcommand payloads ----------------

struct ClassgroupArgs {
    long long disc = 0;
    bool hilbert = false;
    bool table = false;
    std::string factor;
    std::string base = "2,3,5,7,11,13";
};

int run_classgroup(const ClassgroupArgs& a, const CommonOpts& opts) {
    quad::Discriminant d(a.disc);
    auto forms = quad::enumerate_class_group(d);
    json j;
    j["schema"] = io::kSchema;
    j["disc"] = a.disc;
    j["h"] = forms.size();
    json arr = json::array();
    for (const auto& f : forms) arr.push_back(io::form_to_json(f));
    j["forms"] = arr;
    if (a.hilbert) j["hilbert"] = io::poly_to_json(quad::hilbert_class_poly_auto(d));
    if (!a.factor.empty()) {
        auto abc = parse_ll_list(a.factor);
        if (abc.size() != 3) throw std::invalid_argument("--factor expects a,b,c");
        quad::QuadForm f(abc[0], abc[1], abc[2]);
        auto word = quad::factor_class(f, parse_ll_list(a.base));
        json w = json::array();
        for (const auto& g : word) w.push_back(io::form_to_json(g));
        j["word"] = w;
    }
    if (opts.pretty) {
        std::ostringstream t;
        t << "disc " << a.disc << ": h = " << forms.size() << "\n";
        for (const auto& f : forms) t << "  [" << f.a() << ", " << f.b() << ", " << f.c() << "]\n";
        std::cout << t.str();
        return 0;
    }
    emit(opts, j);
    return 0;
}

struct HomologyArgs {
    long long level = 0;
    bool rank_only = false;
    long long hecke = 0;
    bool eigen = false;
    std::string primes;
};

int run_homology(const HomologyArgs& a, const CommonOpts& opts) {
    modsym::ManinBasis basis(a.level);
    if (a.rank_only && !opts.pretty) {
        json j;
        j["schema"] = io::kSchema;
        j["N"] = a.level;
        j["rank"] = basis.rank();
        emit(opts, j);
        return 0;
    }
    json j;
    j["schema"] = io::kSchema;
    j["N"] = a.level;
    j["rank"] = basis.rank();
    j["p1_size"] = basis.symbol_count();
    j["genus"] = modsym::genus_X0(a.level);
    j["cusps"] = modsym::cusp_count_X0(a.level);
    if (a.hecke > 0) j["hecke"] = io::matrix_to_json(modsym::hecke_matrix(basis, a.hecke));
    if (a.eigen) {
        auto primes = a.primes.empty() ? default_primes(a.level) : parse_ll_list(a.primes);
        auto eigen = modsym::eigen_decompose(basis, primes);
        json forms = json::array();
        for (const auto& f : eigen) {
            json e;
            e["newform"] = f.newform_id;
            json ap;
            for (const auto& [q, aq] : f.eigenvalues) ap[std::to_string(q)] = aq.get_si();
            e["eigenvalues"] = ap;
            e["plus"] = io::homology_to_json(f.plus_generator);
            e["minus"] = io::homology_to_json(f.minus_generator);
            forms.push_back(e);
        }
        j["newforms"] = forms;
    }
    if (opts.pretty) {
        std::cout << "X_0(" << a.level << "): rank " << basis.rank() << ", genus "
                  << modsym::genus_X0(a.level) << ", cusps " << modsym::cusp_count_X0(a.level) << "\n";
        return 0;
    }
    emit(opts, j);
    return 0;
}

struct PeriodsArgs {
    long long level = 0;
    long long ell = 3;
    int m = 6;
    bool matrix = false;
    bool plus_only = false;
    std::string coords;
};

int run_periods(const PeriodsArgs& a, const CommonOpts& opts) {
    modsym::ManinBasis basis(a.level);
    auto eigen = modsym::eigen_decompose(basis, default_primes(a.level));
    coleman::PeriodOptions popts;
    popts.plus_only = a.plus_only;
    json j;
    j["schema"] = io::kSchema;
    j["N"] = a.level;
    j["l"] = a.ell;
    j["m"] = a.m;
    if (a.matrix || a.coords.empty()) {
        j["matrix"] = io::period_matrix_to_json(coleman::period_matrix(basis, eigen, a.ell, a.m, popts));
    }
    if (!a.coords.empty()) {
        auto cs = parse_ll_list(a.coords);
        if (static_cast<int>(cs.size()) != basis.rank())
            throw std::invalid_argument("--coords length must equal the rank");
        modsym::HomologyClass gamma;
        gamma.level = a.level;
        for (long long c : cs) gamma.coords.push_back(mpz_from_ll(c));
        j["period"] = io::period_vector_to_json(
            coleman::period_vector_rational(gamma, eigen, a.ell, a.m, popts));
    }
    emit(opts, j);
    return 0;
}

struct GraphArgs {
    long long p = 0;
    long long ell = 2;
    bool edges = false;
    long long walk_disc = 0;
    int steps = 0;
    int base = 0;
};

int run_graph(const GraphArgs& a, const CommonOpts& opts) {
    json j;
    j["schema"] = io::kSchema;
    if (a.walk_disc != 0) {
        auto walk = ssgraph::cm_reduction_walk(a.walk_disc, a.p, a.ell, a.steps, a.base);
        json w = json::array();
        for (const auto& v : walk) w.push_back(json::array({v.a, v.b}));
        j["p"] = a.p;
        j["ell"] = a.ell;
        j["disc"] = a.walk_disc;
        j["walk"] = w;
        emit(opts, j);
        return 0;
    }
    auto g = ssgraph::build_graph(a.p, a.ell);
    j = io::graph_to_json(g);
    j["schema"] = io::kSchema;
    if (a.edges) {
        json el = json::array();
        for (const auto& [u, v, mult] : ssgraph::edge_list(g)) el.push_back(json::array({u, v, mult}));
        j["edges"] = el;
    }
    emit(opts, j);
    return 0;
}

struct MsiCommonArgs {
    long long level = 11;
    long long ell = 3;
    int m = 4;
    int L = 4;
    bool plus_only = false;
    std::string seed = std::string(64, '0');
    std::string params_file;
};

void apply_params_file(MsiCommonArgs& a) {
    if (a.params_file.empty()) return;
    auto pf = io::parameter_file_from_json(load_json(a.params_file));
    a.level = pf.level;
    a.ell = pf.ell;
    a.m = pf.m;
    a.L = pf.L;
    a.seed = pf.seed;
}

int run_msi_sample(MsiCommonArgs a, const CommonOpts& opts) {
    apply_params_file(a);
    auto pipe = make_pipeline(a.level, a.ell, a.m, a.L, a.plus_only);
    auto inst = msi::sample_instance(pipe.model, pipe.A, a.seed);
    json j = io::instance_to_json(inst);
    j["schema"] = io::kSchema;
    emit(opts, j);
    return 0;
}

struct MsiSolveArgs {
    std::string instance_file;
    std::string method = "bf";
    std::uint64_t work_cap = msi::kDefaultWorkCap;
    bool plus_only = false;
};

int run_msi_solve(const MsiSolveArgs& a, const CommonOpts& opts) {
    auto inst = io::instance_from_json(load_json(a.instance_file));
    auto pipe = make_pipeline(inst.params.level, inst.params.ell, inst.params.m, inst.params.L, a.plus_only);
    json j;
    j["schema"] = io::kSchema;
    j["method"] = a.method;
    if (a.method == "linear") {
        auto sol = msi::solve_linear_unconstrained(pipe.A.rows, msi::period_residues(inst.target),
                                                   inst.params.ell, inst.params.m);
        j["solvable"] = sol.solvable;
        if (sol.solvable) {
            json part = json::array();
            for (const auto& x : sol.particular) part.push_back(x.get_str());
            j["particular"] = part;
            json ker = json::array();
            for (const auto& k : sol.kernel) {
                json kv = json::array();
                for (const auto& x : k) kv.push_back(x.get_str());
                ker.push_back(kv);
            }
            j["kernel"] = ker;
        }
    } else {
        msi::SolveResult res = a.method == "mitm" ? msi::solve_mitm(inst, pipe.model, pipe.A, a.work_cap)
                                                  : msi::solve_bruteforce(inst, pipe.model, pipe.A, a.work_cap);
        j["found"] = res.witness.has_value();
        j["expansions"] = res.expansions;
        if (res.witness) {
            j["witness"] = res.witness->indices;
            j["verified"] = msi::check_witness(inst, pipe.model, pipe.A, *res.witness);
        }
    }
    emit(opts, j);
    return 0;
}

struct MsiCollideArgs : MsiCommonArgs {
    std::uint64_t trials = 0;
    std::uint64_t work_cap = msi::kDefaultWorkCap;
};

int run_msi_collide(MsiCollideArgs a, const CommonOpts& opts) {
    apply_params_file(a);
    auto pipe = make_pipeline(a.level, a.ell, a.m, a.L, a.plus_only);
    auto report = msi::collision_experiment(pipe.model, pipe.A, a.trials, a.seed, a.work_cap, opts.threads);
    json j = io::collision_report_to_json(report);
    j["schema"] = io::kSchema;
    emit(opts, j);
    return 0;
}

struct ParamsArgs {
    long long ell = 3;
    int m = 1;
    int d = 1;
    long long B = 3;
    int L = 20;
    int lambda = 16;
};

int run_params(const ParamsArgs& a, const CommonOpts& opts) {
    auto v = msi::parameter_check(a.ell, a.m, a.d, a.B, a.L, a.lambda);
    json j = io::verdict_to_json(v);
    j["schema"] = io::kSchema;
    j["l"] = a.ell;
    j["m"] = a.m;
    j["d"] = a.d;
    j["B"] = a.B;
    j["L"] = a.L;
    j["lambda"] = a.lambda;
    if (opts.pretty) {
        std::cout << "search_hard=" << (v.search_hard ? "yes" : "no")
                  << " quantum_margin=" << (v.quantum_margin ? "yes" : "no")
                  << " separated=" << (v.separated ? "yes" : "no") << "\n";
        return 0;
    }
    emit(opts, j);
    return 0;
}

struct IdprotoKeygenArgs : MsiCommonArgs {};

int run_idproto_keygen(IdprotoKeygenArgs a, const CommonOpts& opts) {
    apply_params_file(a);
    auto pipe = make_pipeline(a.level, a.ell, a.m, a.L, a.plus_only);
    auto ctx = proto::make_context(pipe.model, pipe.A);
    auto kp = proto::keygen(ctx, a.seed);
    json j = io::keypair_to_json(kp);
    j["schema"] = io::kSchema;
    j["params"] = {{"level", a.level}, {"l", a.ell}, {"m", a.m}, {"L", a.L}};
    emit(opts, j);
    return 0;
}

struct IdprotoRunArgs {
    std::string key_file;
    int rounds = 10;
    std::string seed = std::string(64, '0');
    bool plus_only = false;
};

int run_idproto_run(const IdprotoRunArgs& a, const CommonOpts& opts) {
    json kj = load_json(a.key_file);
    auto kp = io::keypair_from_json(kj);
    const auto& pj = kj.at("params");
    auto pipe = make_pipeline(pj.at("level").get<long long>(), pj.at("l").get<long long>(),
                              pj.at("m").get<int>(), pj.at("L").get<int>(), a.plus_only);
    auto ctx = proto::make_context(pipe.model, pipe.A);
    int ok = 0;
    for (int i = 0; i < a.rounds; ++i) {
        std::string round_seed = a.seed + "/" + std::to_string(i);
        long long c = static_cast<long long>(derive_seed(round_seed, "proto/challenge") % 2);
        auto tr = proto::prove_round(ctx, kp.sk, round_seed, c);
        if (proto::verify(ctx, tr, kp.pk)) ++ok;
    }
    json j;
    j["schema"] = io::kSchema;
    j["rounds"] = a.rounds;
    j["verified"] = ok;
    emit(opts, j);
    return 0;
}

struct IdprotoTranscriptArgs {
    std::string key_file;
    long long challenge = 0;
    std::string seed = std::string(64, '0');
    std::string out_file = "transcript.bin";
    bool plus_only = false;
};

int run_idproto_transcript(const IdprotoTranscriptArgs& a, const CommonOpts&) {
    json kj = load_json(a.key_file);
    auto kp = io::keypair_from_json(kj);
    const auto& pj = kj.at("params");
    auto pipe = make_pipeline(pj.at("level").get<long long>(), pj.at("l").get<long long>(),
                              pj.at("m").get<int>(), pj.at("L").get<int>(), a.plus_only);
    auto ctx = proto::make_context(pipe.model, pipe.A);
    auto tr = proto::prove_round(ctx, kp.sk, a.seed, a.challenge);
    emit_bytes(a.out_file, proto::serialize_transcript(tr));
    return 0;
}

struct IdprotoVerifyArgs {
    std::string key_file;
    std::string transcript_file;
    bool plus_only = false;
};

int run_idproto_verify(const IdprotoVerifyArgs& a, const CommonOpts& opts) {
    json kj = load_json(a.key_file);
    auto kp = io::keypair_from_json(kj);
    const auto& pj = kj.at("params");
    auto pipe = make_pipeline(pj.at("level").get<long long>(), pj.at("l").get<long long>(),
                              pj.at("m").get<int>(), pj.at("L").get<int>(), a.plus_only);
    auto ctx = proto::make_context(pipe.model, pipe.A);
    auto tr = proto::parse_transcript(load_bytes(a.transcript_file));
    json j;
    j["schema"] = io::kSchema;
    j["valid"] = proto::verify(ctx, tr, kp.pk);
    emit(opts, j);
    return 0;
}

struct PrfArgs {
    std::string key_file;
    std::string input_hex;
    bool plus_only = false;
};

int run_prf(const PrfArgs& a, const CommonOpts& opts) {
    json kj = load_json(a.key_file);
    auto kp = io::keypair_from_json(kj);
    const auto& pj = kj.at("params");
    auto pipe = make_pipeline(pj.at("level").get<long long>(), pj.at("l").get<long long>(),
                              pj.at("m").get<int>(), pj.at("L").get<int>(), a.plus_only);
    auto ctx = proto::make_context(pipe.model, pipe.A);
    auto out = proto::prf_eval(ctx, kp.sk, hex_decode(a.input_hex));
    json j;
    j["schema"] = io::kSchema;
    j["output"] = hex_encode(out.data(), out.size());
    emit(opts, j);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"modular-symbol period pipeline and MSI laboratory"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--out", common.out, "write the JSON artifact to a file instead of stdout");
    app.add_flag("--pretty", common.pretty, "human-readable table output where available");
    app.add_option("--threads", common.threads, "worker threads for long-running experiments")
        ->check(CLI::Range(1, 64));

    ClassgroupArgs cg;
    auto* cmd_cg = app.add_subcommand("classgroup", "class group of an imaginary quadratic order");
    cmd_cg->add_option("--disc", cg.disc, "negative discriminant, 0 or 1 mod 4")->required();
    cmd_cg->add_flag("--hilbert", cg.hilbert, "include the Hilbert class polynomial");
    cmd_cg->add_option("--factor", cg.factor, "factor the class a,b,c over the prime-form base");
    cmd_cg->add_option("--base", cg.base, "factor base primes (default 2,3,5,7,11,13)");

    HomologyArgs ho;
    auto* cmd_ho = app.add_subcommand("homology", "Manin-symbol homology of X_0(N)");
    cmd_ho->add_option("--level", ho.level, "level N")->required();
    cmd_ho->add_flag("--rank", ho.rank_only, "print only the rank");
    cmd_ho->add_option("--hecke", ho.hecke, "include the Hecke matrix T_n");
    cmd_ho->add_flag("--eigen", ho.eigen, "include the rational newform decomposition");
    cmd_ho->add_option("--primes", ho.primes, "primes for the eigen decomposition");

    PeriodsArgs pe;
    auto* cmd_pe = app.add_subcommand("periods", "truncated l-adic period map");
    cmd_pe->add_option("--level", pe.level, "level N")->required();
    cmd_pe->add_option("--l", pe.ell, "analysis prime l");
    cmd_pe->add_option("--m", pe.m, "truncation precision m");
    cmd_pe->add_flag("--matrix", pe.matrix, "emit the period matrix");
    cmd_pe->add_flag("--plus-only", pe.plus_only, "use only plus eigen-components");
    cmd_pe->add_option("--coords", pe.coords, "evaluate the period vector of a class");

    GraphArgs gr;
    auto* cmd_gr = app.add_subcommand("graph", "supersingular l-isogeny graph");
    cmd_gr->add_option("--p", gr.p, "characteristic prime")->required();
    cmd_gr->add_option("--ell", gr.ell, "isogeny degree (2 or 3)");
    cmd_gr->add_flag("--edges", gr.edges, "include the undirected edge list");
    cmd_gr->add_option("--walk-disc", gr.walk_disc, "CM discriminant for a reduction walk");
    cmd_gr->add_option("--steps", gr.steps, "walk length");
    cmd_gr->add_option("--base", gr.base, "base root choice for the walk");

    auto* cmd_msi = app.add_subcommand("msi", "MSI instances, solvers, collision experiments");
    cmd_msi->require_subcommand(1);

    MsiCommonArgs ms;
    auto* cmd_sample = cmd_msi->add_subcommand("sample", "sample an instance with a witness");
    auto add_msi_common = [](CLI::App* cmd, MsiCommonArgs& a) {
        cmd->add_option("--level", a.level, "level N");
        cmd->add_option("--l", a.ell, "analysis prime l");
        cmd->add_option("--m", a.m, "precision m");
        cmd->add_option("--L", a.L, "path length bound L");
        cmd->add_flag("--plus-only", a.plus_only, "use only plus eigen-components");
        cmd->add_option("--seed", a.seed, "hex seed (32 bytes)");
        cmd->add_option("--params", a.params_file, "parameter file (JSON)");
    };
    add_msi_common(cmd_sample, ms);

    MsiSolveArgs so;
    auto* cmd_solve = cmd_msi->add_subcommand("solve", "solve an instance");
    cmd_solve->add_option("--instance", so.instance_file, "instance JSON")->required();
    cmd_solve->add_option("--method", so.method, "bf | mitm | linear")
        ->check(CLI::IsMember({"bf", "mitm", "linear"}));
    cmd_solve->add_option("--work-cap", so.work_cap, "node expansion cap");
    cmd_solve->add_flag("--plus-only", so.plus_only, "use only plus eigen-components");

    MsiCollideArgs co;
    auto* cmd_collide = cmd_msi->add_subcommand("collide", "collision counting experiment");
    add_msi_common(cmd_collide, co);
    cmd_collide->add_option("--trials", co.trials, "sample size when full enumeration is infeasible");
    cmd_collide->add_option("--work-cap", co.work_cap, "enumeration cap");

    ParamsArgs mpa;
    auto* cmd_msi_params = cmd_msi->add_subcommand("params", "parameter selection checks");
    cmd_msi_params->add_option("-l,--l", mpa.ell, "analysis prime l");
    cmd_msi_params->add_option("-m,--m", mpa.m, "precision m");
    cmd_msi_params->add_option("-d,--d", mpa.d, "period coordinates d");
    cmd_msi_params->add_option("-B,--B", mpa.B, "branching factor B");
    cmd_msi_params->add_option("-L,--L", mpa.L, "path length L");
    cmd_msi_params->add_option("--lambda", mpa.lambda, "target security level");

    ParamsArgs pa;
    auto* cmd_pa = app.add_subcommand("params", "parameter selection checks");
    bool check_flag = false;
    cmd_pa->add_flag("--check", check_flag, "run the verdicts (default)");
    cmd_pa->add_option("-l,--l", pa.ell, "analysis prime l");
    cmd_pa->add_option("-m,--m", pa.m, "precision m");
    cmd_pa->add_option("-d,--d", pa.d, "period coordinates d");
    cmd_pa->add_option("-B,--B", pa.B, "branching factor B");
    cmd_pa->add_option("-L,--L", pa.L, "path length L");
    cmd_pa->add_option("--lambda", pa.lambda, "target security level");

    auto* cmd_id = app.add_subcommand("idproto", "identification protocol");
    cmd_id->require_subcommand(1);

    IdprotoKeygenArgs kg;
    auto* cmd_kg = cmd_id->add_subcommand("keygen", "generate a key pair");
    add_msi_common(cmd_kg, kg);

    IdprotoRunArgs ir;
    auto* cmd_ir = cmd_id->add_subcommand("run", "run verification rounds");
    cmd_ir->add_option("--key", ir.key_file, "key JSON")->required();
    cmd_ir->add_option("--rounds", ir.rounds, "number of rounds");
    cmd_ir->add_option("--seed", ir.seed, "hex seed");
    cmd_ir->add_flag("--plus-only", ir.plus_only, "use only plus eigen-components");

    IdprotoTranscriptArgs it;
    auto* cmd_it = cmd_id->add_subcommand("transcript", "emit one wire-format transcript");
    cmd_it->add_option("--key", it.key_file, "key JSON")->required();
    cmd_it->add_option("--challenge", it.challenge, "challenge value");
    cmd_it->add_option("--seed", it.seed, "hex seed");
    cmd_it->add_option("--out-file", it.out_file, "output path for the binary transcript");
    cmd_it->add_flag("--plus-only", it.plus_only, "use only plus eigen-components");

    IdprotoVerifyArgs iv;
    auto* cmd_iv = cmd_id->add_subcommand("verify", "verify a wire-format transcript");
    cmd_iv->add_option("--key", iv.key_file, "key JSON")->required();
    cmd_iv->add_option("--transcript", iv.transcript_file, "binary transcript")->required();
    cmd_iv->add_flag("--plus-only", iv.plus_only, "use only plus eigen-components");

    PrfArgs pr;
    auto* cmd_pr = app.add_subcommand("prf", "evaluate the keyed PRF");
    cmd_pr->add_option("--key", pr.key_file, "key JSON")->required();
    cmd_pr->add_option("--input", pr.input_hex, "input bytes as hex");
    cmd_pr->add_flag("--plus-only", pr.plus_only, "use only plus eigen-components");

    // global options remain visible after a subcommand name
    for (auto* sub : app.get_subcommands({})) (void)sub;
    std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* a) {
        for (CLI::App* sub : a->get_subcommands([](const CLI::App*) { return true; })) {
            sub->fallthrough();
            enable_fallthrough(sub);
        }
    };
    enable_fallthrough(&app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_cg->parsed()) return run_classgroup(cg, common);
        if (cmd_ho->parsed()) return run_homology(ho, common);
        if (cmd_pe->parsed()) return run_periods(pe, common);
        if (cmd_gr->parsed()) return run_graph(gr, common);
        if (cmd_msi->parsed()) {
            if (cmd_sample->parsed()) return run_msi_sample(ms, common);
            if (cmd_solve->parsed()) return run_msi_solve(so, common);
            if (cmd_collide->parsed()) return run_msi_collide(co, common);
            if (cmd_msi_params->parsed()) return run_params(mpa, common);
        }
        if (cmd_pa->parsed()) return run_params(pa, common);
        if (cmd_id->parsed()) {
            if (cmd_kg->parsed()) return run_idproto_keygen(kg, common);
            if (cmd_ir->parsed()) return run_idproto_run(ir, common);
            if (cmd_it->parsed()) return run_idproto_transcript(it, common);
            if (cmd_iv->parsed()) return run_idproto_verify(iv, common);
        }
        if (cmd_pr->parsed()) return run_prf(pr, common);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand\n";
    return 2;
}
