#ifndef MSIFORGE_SERIALIZE_HPP
#define MSIFORGE_SERIALIZE_HPP

#include <json.hpp>

#include "msiforge/coleman.hpp"
#include "msiforge/modsym.hpp"
#include "msiforge/msi.hpp"
#include "msiforge/padic.hpp"
#include "msiforge/protocol.hpp"
#include "msiforge/quadform.hpp"
#include "msiforge/ssgraph.hpp"

namespace msiforge::io {

using json = nlohmann::json;

inline constexpr const char* kSchema = "msi-forge/1";

json form_to_json(const quad::QuadForm& f);
quad::QuadForm form_from_json(const json& j);

json poly_to_json(const std::vector<mpz_class>& coeffs); // constant term first, decimal strings

json padic_to_json(const padic::TruncatedPadic& x);
padic::TruncatedPadic padic_from_json(const json& j);

json homology_to_json(const modsym::HomologyClass& c);
modsym::HomologyClass homology_from_json(const json& j);

json matrix_to_json(const modsym::IntMat& m); // dense row-major with dimensions
modsym::IntMat matrix_from_json(const json& j);

json period_vector_to_json(const coleman::PeriodVector& pv);
coleman::PeriodVector period_vector_from_json(const json& j);

json period_matrix_to_json(const coleman::PeriodMatrix& A);
coleman::PeriodMatrix period_matrix_from_json(const json& j);

json graph_to_json(const ssgraph::IsogenyGraph& g);

json instance_to_json(const msi::MSIInstance& inst);
msi::MSIInstance instance_from_json(const json& j);

json collision_report_to_json(const msi::CollisionReport& r);
json verdict_to_json(const msi::ParameterVerdict& v);

json keypair_to_json(const proto::KeyPair& kp);
proto::KeyPair keypair_from_json(const json& j);

// Global parameter file (p, disc, N, l, m, d, L, B, lambda, seed).
struct ParameterFile {
    long long p = 0;
    long long disc = 0;
    long long level = 0;
    long long ell = 0;
    int m = 0;
    int d = 0;
    int L = 0;
    long long B = 0;
    int lambda = 0;
    std::string seed; // 32 bytes as 64 hex chars
};

json parameter_file_to_json(const ParameterFile& p);
ParameterFile parameter_file_from_json(const json& j); // validates invariants

} // namespace msiforge::io

#endif
