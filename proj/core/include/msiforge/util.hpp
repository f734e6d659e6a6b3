#ifndef MSIFORGE_UTIL_HPP
#define MSIFORGE_UTIL_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace msiforge {

// Extended gcd: returns g = gcd(a,b) and sets x,y with a*x + b*y = g, g >= 0.
long long xgcd(long long a, long long b, long long& x, long long& y);
long long gcd_ll(long long a, long long b);
long long mod_inverse(long long a, long long m); // throws std::domain_error if not invertible

bool is_prime_u64(unsigned long long n);
std::vector<long long> primes_up_to(long long bound);

// Kronecker symbol (a|n), n > 0 odd or n = 2 handled per the usual extension.
int kronecker_symbol(const mpz_class& a, const mpz_class& n);

// Exact p-adic valuation of a nonzero integer; throws for x = 0.
int valuation(const mpz_class& x, const mpz_class& p);

mpz_class pow_mpz(const mpz_class& base, unsigned long exp);

// mpz_class lacks a long long constructor on LP64-unfriendly interfaces.
mpz_class mpz_from_ll(long long v);

// Deterministic 64-bit stream (splitmix64). Used everywhere randomness is
// needed so that artifacts are reproducible bit-for-bit across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();
    // Uniform in [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

// SHA-256 (FIPS 180-4), self-contained.
std::array<std::uint8_t, 32> sha256(const std::uint8_t* data, std::size_t len);
std::array<std::uint8_t, 32> sha256(const std::vector<std::uint8_t>& data);
std::array<std::uint8_t, 32> sha256(const std::string& data);

std::string hex_encode(const std::uint8_t* data, std::size_t len);
std::vector<std::uint8_t> hex_decode(const std::string& hex); // throws std::invalid_argument

// Derives a 64-bit PRNG seed from an arbitrary seed string and a domain tag,
// by hashing; distinct tags give independent streams.
std::uint64_t derive_seed(const std::string& seed_material, const std::string& domain_tag);

} // namespace msiforge

#endif
