#include "msiforge/protocol.hpp"

#include <algorithm>

#include "msiforge/util.hpp"

namespace msiforge::proto {

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

std::vector<mpz_class> matvec(const std::vector<std::vector<mpz_class>>& M, const std::vector<long long>& x,
                              const mpz_class& mod) {
    std::vector<mpz_class> out(M.size(), 0);
    for (std::size_t i = 0; i < M.size(); ++i) {
        mpz_class acc = 0;
        for (std::size_t j = 0; j < x.size(); ++j) acc += M[i][j] * mpz_from_ll(x[j]);
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), acc.get_mpz_t(), mod.get_mpz_t());
        out[i] = r;
    }
    return out;
}

coleman::PeriodVector period_from_residues(const std::vector<mpz_class>& res, const coleman::PeriodMatrix& A) {
    coleman::PeriodVector pv;
    pv.prime = A.prime;
    pv.precision = A.precision;
    pv.form_ids = A.form_ids;
    for (const auto& r : res) pv.entries.emplace_back(A.prime, r, A.precision);
    return pv;
}

std::vector<long long> multiplicity_ll(const msi::PathModel& model, const msi::Path& p) {
    std::vector<long long> m(model.generator_count(), 0);
    for (int idx : p.indices) m[static_cast<std::size_t>(idx)] += 1;
    return m;
}

long long l1_norm(const std::vector<long long>& v) {
    long long n = 0;
    for (long long x : v) n += x < 0 ? -x : x;
    return n;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    if (pos + 4 > in.size()) throw std::invalid_argument("truncated transcript");
    std::uint32_t v = (std::uint32_t(in[pos]) << 24) | (std::uint32_t(in[pos + 1]) << 16) |
                      (std::uint32_t(in[pos + 2]) << 8) | std::uint32_t(in[pos + 3]);
    pos += 4;
    return v;
}

void put_mpz(std::vector<std::uint8_t>& out, const mpz_class& z) {
    if (z < 0) throw std::invalid_argument("negative residue in wire format");
    std::size_t count = (mpz_sizeinbase(z.get_mpz_t(), 2) + 7) / 8;
    std::vector<std::uint8_t> buf(std::max<std::size_t>(count, 1), 0);
    std::size_t written = 0;
    if (z != 0) mpz_export(buf.data(), &written, 1, 1, 1, 0, z.get_mpz_t());
    if (written == 0) {
        buf.assign(1, 0);
        written = 1;
    }
    put_u32(out, static_cast<std::uint32_t>(written));
    out.insert(out.end(), buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(written));
}

mpz_class get_mpz(const std::vector<std::uint8_t>& in, std::size_t& pos) {
    std::uint32_t len = get_u32(in, pos);
    if (pos + len > in.size()) throw std::invalid_argument("truncated transcript");
    mpz_class z = 0;
    if (len > 0) {
        mpz_import(z.get_mpz_t(), len, 1, 1, 1, 0, in.data() + pos);
    }
    pos += len;
    return z;
}

} // namespace

ProtocolContext make_context(const msi::PathModel& model, const coleman::PeriodMatrix& A,
                             long long challenge_space) {
    if (challenge_space < 2) throw std::domain_error("challenge space must have at least two elements");
    ProtocolContext ctx;
    ctx.model = model;
    ctx.A = A;
    ctx.gen_matrix = msi::effective_matrix(model, A);
    ctx.challenge_space = challenge_space;
    return ctx;
}

KeyPair keygen(const ProtocolContext& ctx, const std::string& seed) {
    KeyPair kp;
    kp.sk = msi::sample_path(ctx.model, seed, "proto/keygen", ctx.model.max_length);
    mpz_class mod = modulus_of(ctx.A);
    auto y = reduce_vec(coleman::apply_period_matrix(ctx.A, msi::path_value(ctx.model, kp.sk)), mod);
    kp.pk = period_from_residues(y, ctx.A);
    return kp;
}

Transcript prove_round(const ProtocolContext& ctx, const msi::Path& sk, const std::string& seed,
                       long long challenge) {
    if (challenge < 0 || challenge >= ctx.challenge_space) throw std::domain_error("challenge out of range");
    msi::Path com = msi::sample_path(ctx.model, seed, "proto/commit", ctx.model.max_length);
    mpz_class mod = modulus_of(ctx.A);
    auto t = reduce_vec(coleman::apply_period_matrix(ctx.A, msi::path_value(ctx.model, com)), mod);

    auto resp = multiplicity_ll(ctx.model, com);
    auto skm = multiplicity_ll(ctx.model, sk);
    for (std::size_t i = 0; i < resp.size(); ++i) resp[i] += challenge * skm[i];
    if (l1_norm(resp) > ctx.norm_bound()) throw NormBoundExceeded();

    Transcript tr;
    tr.commitment = period_from_residues(t, ctx.A);
    tr.challenge = challenge;
    tr.response = std::move(resp);
    return tr;
}

bool verify(const ProtocolContext& ctx, const Transcript& t, const coleman::PeriodVector& pk) {
    if (t.challenge < 0 || t.challenge >= ctx.challenge_space) return false;
    if (t.response.size() != ctx.model.generator_count()) return false;
    if (l1_norm(t.response) > ctx.norm_bound()) return false;
    mpz_class mod = modulus_of(ctx.A);
    auto lhs = matvec(ctx.gen_matrix, t.response, mod);
    auto tres = reduce_vec(msi::period_residues(t.commitment), mod);
    auto pkres = reduce_vec(msi::period_residues(pk), mod);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        mpz_class rhs = tres[i] + mpz_from_ll(t.challenge) * pkres[i];
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), rhs.get_mpz_t(), mod.get_mpz_t());
        if (lhs[i] != r) return false;
    }
    return true;
}

std::vector<long long> extract(const Transcript& t1, const Transcript& t2) {
    if (t1.challenge == t2.challenge) throw ChallengeCollision();
    if (t1.response.size() != t2.response.size()) throw std::domain_error("response dimension mismatch");
    long long dc = t1.challenge - t2.challenge;
    std::vector<long long> x(t1.response.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        long long num = t1.response[i] - t2.response[i];
        if (num % dc != 0) throw std::domain_error("extraction requires exact division");
        x[i] = num / dc;
    }
    return x;
}

Transcript simulate(const ProtocolContext& ctx, const coleman::PeriodVector& pk, long long challenge,
                    const std::string& seed) {
    if (challenge < 0 || challenge >= ctx.challenge_space) throw std::domain_error("challenge out of range");
    // Response distributed as an honest one: com-part + c * (random path)-part.
    msi::Path p1 = msi::sample_path(ctx.model, seed, "proto/commit", ctx.model.max_length);
    msi::Path p2 = msi::sample_path(ctx.model, seed, "proto/sim-mask", ctx.model.max_length);
    auto resp = multiplicity_ll(ctx.model, p1);
    auto m2 = multiplicity_ll(ctx.model, p2);
    for (std::size_t i = 0; i < resp.size(); ++i) resp[i] += challenge * m2[i];

    mpz_class mod = modulus_of(ctx.A);
    auto img = matvec(ctx.gen_matrix, resp, mod);
    auto pkres = reduce_vec(msi::period_residues(pk), mod);
    std::vector<mpz_class> t(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        mpz_class v = img[i] - mpz_from_ll(challenge) * pkres[i];
        mpz_fdiv_r(t[i].get_mpz_t(), v.get_mpz_t(), mod.get_mpz_t());
    }
    Transcript tr;
    tr.commitment = period_from_residues(t, ctx.A);
    tr.challenge = challenge;
    tr.response = std::move(resp);
    return tr;
}

std::vector<std::uint8_t> period_vector_bytes(const coleman::PeriodVector& pv) {
    std::vector<std::uint8_t> out;
    put_u32(out, static_cast<std::uint32_t>(pv.prime));
    put_u32(out, static_cast<std::uint32_t>(pv.precision));
    put_u32(out, static_cast<std::uint32_t>(pv.entries.size()));
    for (const auto& e : pv.entries) put_mpz(out, e.residue());
    return out;
}

std::array<std::uint8_t, 32> prf_eval(const ProtocolContext& ctx, const msi::Path& sk,
                                      const std::vector<std::uint8_t>& x) {
    // Parse x as a base-B word along the validity relation.  A sentinel byte
    // keeps distinct-length inputs distinct.
    mpz_class n = 1;
    for (std::uint8_t b : x) n = n * 256 + b;
    msi::Path combined = sk;
    long long budget = ctx.norm_bound() - static_cast<long long>(sk.indices.size());
    while (n > 1 && budget > 0) {
        if (combined.indices.empty()) {
            mpz_class digit = n % static_cast<long>(ctx.model.generator_count());
            combined.indices.push_back(static_cast<int>(digit.get_si()));
            n /= static_cast<long>(ctx.model.generator_count());
        } else {
            const auto& allowed = ctx.model.validity[static_cast<std::size_t>(combined.indices.back())];
            if (allowed.empty()) break;
            mpz_class digit = n % static_cast<long>(allowed.size());
            combined.indices.push_back(allowed[digit.get_ui()]);
            n /= static_cast<long>(allowed.size());
        }
        --budget;
    }
    mpz_class mod = modulus_of(ctx.A);
    auto img = reduce_vec(coleman::apply_period_matrix(ctx.A, msi::path_value(ctx.model, combined)), mod);
    auto bytes = period_vector_bytes(period_from_residues(img, ctx.A));
    return sha256(bytes);
}

std::vector<std::uint8_t> serialize_transcript(const Transcript& t) {
    std::vector<std::uint8_t> out;
    // field 1: commitment (l, m, entries)
    auto tb = period_vector_bytes(t.commitment);
    put_u32(out, static_cast<std::uint32_t>(tb.size()));
    out.insert(out.end(), tb.begin(), tb.end());
    // field 2: challenge
    put_u32(out, static_cast<std::uint32_t>(t.challenge));
    // field 3: response, signed 64-bit big-endian
    put_u32(out, static_cast<std::uint32_t>(t.response.size()));
    for (long long v : t.response) {
        std::uint64_t u = static_cast<std::uint64_t>(v);
        for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
    }
    return out;
}

Transcript parse_transcript(const std::vector<std::uint8_t>& bytes) {
    Transcript t;
    std::size_t pos = 0;
    std::uint32_t tlen = get_u32(bytes, pos);
    std::size_t tend = pos + tlen;
    if (tend > bytes.size()) throw std::invalid_argument("truncated transcript");
    long long ell = get_u32(bytes, pos);
    int m = static_cast<int>(get_u32(bytes, pos));
    std::uint32_t d = get_u32(bytes, pos);
    t.commitment.prime = ell;
    t.commitment.precision = m;
    for (std::uint32_t i = 0; i < d; ++i) {
        t.commitment.entries.emplace_back(ell, get_mpz(bytes, pos), m);
    }
    if (pos != tend) throw std::invalid_argument("malformed commitment field");
    t.challenge = get_u32(bytes, pos);
    std::uint32_t r = get_u32(bytes, pos);
    for (std::uint32_t i = 0; i < r; ++i) {
        if (pos + 8 > bytes.size()) throw std::invalid_argument("truncated transcript");
        std::uint64_t u = 0;
        for (int k = 0; k < 8; ++k) u = (u << 8) | bytes[pos++];
        t.response.push_back(static_cast<long long>(u));
    }
    if (pos != bytes.size()) throw std::invalid_argument("trailing bytes in transcript");
    return t;
}

} // namespace msiforge::proto
