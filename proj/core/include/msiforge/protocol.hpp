#ifndef MSIFORGE_PROTOCOL_HPP
#define MSIFORGE_PROTOCOL_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "msiforge/msi.hpp"

namespace msiforge::proto {

struct NormBoundExceeded : std::runtime_error {
    NormBoundExceeded() : std::runtime_error("response exceeds the l1 bound; resample the commitment") {}
};
struct ChallengeCollision : std::domain_error {
    ChallengeCollision() : std::domain_error("transcripts share the same challenge") {}
};

/*
 * Fixed protocol instance: a path model, the period matrix, and the
 * generator-space matrix A*G the verifier works with.  Challenges live in
 * [0, challenge_space); responses in the l1-ball of radius L * challenge_space.
 */
struct ProtocolContext {
    msi::PathModel model;
    coleman::PeriodMatrix A;
    std::vector<std::vector<mpz_class>> gen_matrix; // d x r mod l^m
    long long challenge_space = 2;
    long long norm_bound() const {
        return static_cast<long long>(model.max_length) * challenge_space;
    }
};

ProtocolContext make_context(const msi::PathModel& model, const coleman::PeriodMatrix& A,
                             long long challenge_space = 2);

struct KeyPair {
    msi::Path sk;
    coleman::PeriodVector pk;
};

struct Transcript {
    coleman::PeriodVector commitment;  // t
    long long challenge = 0;           // c
    std::vector<long long> response;   // generator-space coordinates
};

KeyPair keygen(const ProtocolContext& ctx, const std::string& seed);

// Commitment from a seeded random path; response = coords(com) + c * coords(sk).
Transcript prove_round(const ProtocolContext& ctx, const msi::Path& sk, const std::string& seed,
                       long long challenge);

// Norm bound and A * response = t + c * pk (mod l^m).
bool verify(const ProtocolContext& ctx, const Transcript& t, const coleman::PeriodVector& pk);

// (resp - resp') / (c - c'); exact division required (binary challenges give +-1).
std::vector<long long> extract(const Transcript& t1, const Transcript& t2);

// Honest-response sampler run without the secret: response first, then
// t := A * response - c * pk.
Transcript simulate(const ProtocolContext& ctx, const coleman::PeriodVector& pk, long long challenge,
                    const std::string& seed);

// F_sk(x) = SHA-256(serialization of Pi_m(sk || word(x))), with x parsed
// base-B along the validity relation and the combined path truncated to the
// l1 bound.
std::array<std::uint8_t, 32> prf_eval(const ProtocolContext& ctx, const msi::Path& sk,
                                      const std::vector<std::uint8_t>& x);

// Wire format: length-prefixed big-endian fields in order (t, c, response).
std::vector<std::uint8_t> serialize_transcript(const Transcript& t);
Transcript parse_transcript(const std::vector<std::uint8_t>& bytes);

// Canonical length-prefixed byte serialization of a period vector (the PRF
// hashes exactly these bytes).
std::vector<std::uint8_t> period_vector_bytes(const coleman::PeriodVector& pv);

} // namespace msiforge::proto

#endif
