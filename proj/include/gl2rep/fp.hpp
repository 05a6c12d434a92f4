#pragma once

#include <cstdint>

#include "gl2rep/errors.hpp"

namespace gl2rep {

// Scalars live in the prime field F_p with 5 <= p <= 97.  The lower bound is a
// standing assumption of every formula in this library; the upper bound keeps
// products of reduced residues far below 2^64 so dot products can accumulate
// without intermediate reduction.
inline constexpr std::uint64_t kMinPrime = 5;
inline constexpr std::uint64_t kMaxPrime = 97;

constexpr bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline void check_prime(std::uint64_t p) {
  if (!is_prime(p) || p < kMinPrime || p > kMaxPrime)
    throw malformed_input("modulus must be a prime in [5, 97], got " + std::to_string(p));
}

constexpr std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  unsigned __int128 acc = 1, b = base % m;
  while (exp) {
    if (exp & 1) acc = acc * b % m;
    b = b * b % m;
    exp >>= 1;
  }
  return static_cast<std::uint64_t>(acc);
}

// Inverse of a mod m for any modulus (m need not be prime); a must be a unit.
inline std::uint64_t mod_inv(std::uint64_t a, std::uint64_t m) {
  std::int64_t t = 0, nt = 1;
  std::int64_t r = static_cast<std::int64_t>(m), nr = static_cast<std::int64_t>(a % m);
  while (nr != 0) {
    std::int64_t q = r / nr;
    std::int64_t tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) throw domain_error("mod_inv: " + std::to_string(a) + " is not a unit mod " + std::to_string(m));
  if (t < 0) t += static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(t);
}

constexpr std::uint64_t pow_u64(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace gl2rep
