#include "msiforge/serialize.hpp"

#include "msiforge/util.hpp"

namespace msiforge::io {

namespace {

long long to_ll_checked(const mpz_class& z) {
    if (!z.fits_slong_p()) throw std::domain_error("integer exceeds the JSON number range");
    return z.get_si();
}

} // namespace

json form_to_json(const quad::QuadForm& f) {
    return json::array({f.a(), f.b(), f.c()});
}

quad::QuadForm form_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw std::invalid_argument("form must be a triple [a,b,c]");
    return quad::QuadForm(j[0].get<long long>(), j[1].get<long long>(), j[2].get<long long>());
}

json poly_to_json(const std::vector<mpz_class>& coeffs) {
    json arr = json::array();
    for (const auto& c : coeffs) arr.push_back(c.get_str());
    return arr;
}

json padic_to_json(const padic::TruncatedPadic& x) {
    json j;
    j["l"] = x.prime();
    j["m"] = x.precision();
    j["residue"] = x.valuation() >= 0 ? x.residue().get_str() : x.unit().get_str();
    j["val"] = x.valuation();
    return j;
}

padic::TruncatedPadic padic_from_json(const json& j) {
    long long ell = j.at("l").get<long long>();
    int m = j.at("m").get<int>();
    int val = j.at("val").get<int>();
    mpz_class res(j.at("residue").get<std::string>());
    if (val >= 0) return padic::TruncatedPadic(ell, res, m);
    return padic::TruncatedPadic::from_unit(ell, res, val, m - val);
}

json homology_to_json(const modsym::HomologyClass& c) {
    json j;
    j["N"] = c.level;
    json coords = json::array();
    for (const auto& x : c.coords) coords.push_back(to_ll_checked(x));
    j["coords"] = coords;
    return j;
}

modsym::HomologyClass homology_from_json(const json& j) {
    modsym::HomologyClass c;
    c.level = j.at("N").get<long long>();
    for (const auto& x : j.at("coords")) c.coords.push_back(mpz_from_ll(x.get<long long>()));
    return c;
}

json matrix_to_json(const modsym::IntMat& m) {
    json j;
    j["rows"] = m.size();
    j["cols"] = m.empty() ? 0 : m[0].size();
    json data = json::array();
    for (const auto& row : m)
        for (const auto& x : row) data.push_back(to_ll_checked(x));
    j["data"] = data;
    return j;
}

modsym::IntMat matrix_from_json(const json& j) {
    std::size_t rows = j.at("rows").get<std::size_t>();
    std::size_t cols = j.at("cols").get<std::size_t>();
    const auto& data = j.at("data");
    if (data.size() != rows * cols) throw std::invalid_argument("matrix data size mismatch");
    modsym::IntMat m(rows, std::vector<mpz_class>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < cols; ++k) m[i][k] = mpz_from_ll(data[i * cols + k].get<long long>());
    return m;
}

json period_vector_to_json(const coleman::PeriodVector& pv) {
    json j;
    j["l"] = pv.prime;
    j["m"] = pv.precision;
    json entries = json::array();
    for (const auto& e : pv.entries) entries.push_back(e.residue().get_str());
    j["entries"] = entries;
    json forms = json::array();
    for (const auto& f : pv.form_ids) forms.push_back(json::array({f.level, f.newform, f.sign}));
    j["forms"] = forms;
    return j;
}

coleman::PeriodVector period_vector_from_json(const json& j) {
    coleman::PeriodVector pv;
    pv.prime = j.at("l").get<long long>();
    pv.precision = j.at("m").get<int>();
    for (const auto& e : j.at("entries")) {
        pv.entries.emplace_back(pv.prime, mpz_class(e.get<std::string>()), pv.precision);
    }
    for (const auto& f : j.at("forms")) {
        pv.form_ids.push_back(coleman::FormId{f[0].get<long long>(), f[1].get<int>(), f[2].get<int>()});
    }
    return pv;
}

json period_matrix_to_json(const coleman::PeriodMatrix& A) {
    json j;
    j["l"] = A.prime;
    j["m"] = A.precision;
    j["rows"] = A.rows.size();
    j["cols"] = A.rows.empty() ? 0 : A.rows[0].size();
    json data = json::array();
    for (const auto& row : A.rows)
        for (const auto& x : row) data.push_back(x.get_str());
    j["data"] = data;
    json forms = json::array();
    for (const auto& f : A.form_ids) forms.push_back(json::array({f.level, f.newform, f.sign}));
    j["forms"] = forms;
    return j;
}

coleman::PeriodMatrix period_matrix_from_json(const json& j) {
    coleman::PeriodMatrix A;
    A.prime = j.at("l").get<long long>();
    A.precision = j.at("m").get<int>();
    std::size_t rows = j.at("rows").get<std::size_t>();
    std::size_t cols = j.at("cols").get<std::size_t>();
    const auto& data = j.at("data");
    if (data.size() != rows * cols) throw std::invalid_argument("matrix data size mismatch");
    A.rows.assign(rows, std::vector<mpz_class>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < cols; ++k) A.rows[i][k] = mpz_class(data[i * cols + k].get<std::string>());
    for (const auto& f : j.at("forms")) {
        A.form_ids.push_back(coleman::FormId{f[0].get<long long>(), f[1].get<int>(), f[2].get<int>()});
    }
    return A;
}

json graph_to_json(const ssgraph::IsogenyGraph& g) {
    json j;
    j["p"] = g.p;
    j["ell"] = g.ell;
    j["nonresidue"] = g.nonresidue;
    json verts = json::array();
    for (const auto& v : g.vertices) verts.push_back(json::array({v.a, v.b}));
    j["vertices"] = verts;
    // neighbors listed as j-invariant coordinate pairs, with multiplicity
    json adj = json::array();
    for (const auto& nb : g.adjacency) {
        json row = json::array();
        for (int idx : nb) {
            const auto& v = g.vertices[static_cast<std::size_t>(idx)];
            row.push_back(json::array({v.a, v.b}));
        }
        adj.push_back(row);
    }
    j["adjacency"] = adj;
    return j;
}

json instance_to_json(const msi::MSIInstance& inst) {
    json j;
    json params;
    params["level"] = inst.params.level;
    params["l"] = inst.params.ell;
    params["m"] = inst.params.m;
    params["d"] = inst.params.d;
    params["L"] = inst.params.L;
    params["model"] = inst.params.model_id;
    j["params"] = params;
    j["y"] = period_vector_to_json(inst.target);
    if (inst.witness) j["witness"] = inst.witness->indices;
    return j;
}

msi::MSIInstance instance_from_json(const json& j) {
    msi::MSIInstance inst;
    const auto& p = j.at("params");
    inst.params.level = p.at("level").get<long long>();
    inst.params.ell = p.at("l").get<long long>();
    inst.params.m = p.at("m").get<int>();
    inst.params.d = p.at("d").get<int>();
    inst.params.L = p.at("L").get<int>();
    inst.params.model_id = p.at("model").get<std::string>();
    inst.target = period_vector_from_json(j.at("y"));
    if (j.contains("witness")) {
        msi::Path w;
        for (const auto& i : j.at("witness")) w.indices.push_back(i.get<int>());
        inst.witness = w;
    }
    return inst;
}

json collision_report_to_json(const msi::CollisionReport& r) {
    json j;
    j["full_enumeration"] = r.full_enumeration;
    j["paths_enumerated"] = r.paths_enumerated;
    j["distinct_classes"] = r.distinct_classes;
    j["observed_pairs"] = r.colliding_pairs;
    j["predicted"] = r.predicted;
    j["predicted_heuristic"] = r.predicted_heuristic;
    j["output_space"] = r.ell_power_md;
    return j;
}

json verdict_to_json(const msi::ParameterVerdict& v) {
    json j;
    j["search_hard"] = v.search_hard;
    j["quantum_margin"] = v.quantum_margin;
    j["separated"] = v.separated;
    return j;
}

json keypair_to_json(const proto::KeyPair& kp) {
    json j;
    j["sk"] = kp.sk.indices;
    j["pk"] = period_vector_to_json(kp.pk);
    return j;
}

proto::KeyPair keypair_from_json(const json& j) {
    proto::KeyPair kp;
    for (const auto& i : j.at("sk")) kp.sk.indices.push_back(i.get<int>());
    kp.pk = period_vector_from_json(j.at("pk"));
    return kp;
}

json parameter_file_to_json(const ParameterFile& p) {
    json j;
    j["schema"] = kSchema;
    j["p"] = p.p;
    j["disc"] = p.disc;
    j["N"] = p.level;
    j["l"] = p.ell;
    j["m"] = p.m;
    j["d"] = p.d;
    j["L"] = p.L;
    j["B"] = p.B;
    j["lambda"] = p.lambda;
    j["seed"] = p.seed;
    return j;
}

ParameterFile parameter_file_from_json(const json& j) {
    ParameterFile p;
    p.p = j.at("p").get<long long>();
    p.disc = j.at("disc").get<long long>();
    p.level = j.at("N").get<long long>();
    p.ell = j.at("l").get<long long>();
    p.m = j.at("m").get<int>();
    p.d = j.at("d").get<int>();
    p.L = j.at("L").get<int>();
    p.B = j.at("B").get<long long>();
    p.lambda = j.at("lambda").get<int>();
    p.seed = j.at("seed").get<std::string>();
    if (p.disc >= 0) throw std::invalid_argument("disc must be negative");
    if ((p.level * p.p) % p.ell == 0) throw std::invalid_argument("l must not divide N*p");
    if (p.seed.size() != 64) throw std::invalid_argument("seed must be 32 bytes of hex");
    hex_decode(p.seed); // validates hex digits
    return p;
}

} // namespace msiforge::io
