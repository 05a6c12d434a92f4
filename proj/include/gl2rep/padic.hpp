#pragma once

#include <cstdint>

#include "gl2rep/errors.hpp"
#include "gl2rep/fp.hpp"

namespace gl2rep {

// Teichmuller lift: the unique residue mod p^N congruent to lam mod p with
// x^(p-1) = 1.  Frobenius iteration x -> x^p converges in at most N steps.
inline std::uint64_t teichmuller(std::uint64_t lam, std::uint64_t p, unsigned N) {
  check_prime(p);
  if (N < 1) throw malformed_input("teichmuller: N >= 1 required");
  if (lam % p == 0) throw domain_error("teichmuller: residue must be a unit mod p");
  const std::uint64_t pN = pow_u64(p, N);
  std::uint64_t x = lam % pN;
  for (unsigned i = 0; i <= N; ++i) {
    std::uint64_t y = mod_pow(x, p, pN);
    if (y == x) return x;
    x = y;
  }
  throw consistency_error("teichmuller: Frobenius iteration failed to stabilize");
}

}  // namespace gl2rep
