#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gl2rep/errors.hpp"
#include "gl2rep/fp.hpp"
#include "gl2rep/zmat2.hpp"

namespace gl2rep {

// Congruence subgroups of GL_2(Z_p), described symbolically by family + level.
//
//   K        = GL_2(Z_p)
//   K0(p^n)  = [[unit,  * ], [p^n*, unit]]
//   K1       = [[1+p*,  p*], [p*,   1+p*]]          (level fixed at 1)
//   Kn       = [[1+p^n*, p^n*], [p^n*, 1+p^n*]]
//   K1pn     = K1 ∩ K0(p^n) = [[1+p*, p*], [p^n*, 1+p*]]
//   T1(p^n)  = [[1+p*, p^n*], [p^n*, 1+p*]]
//   H        = [[1, 0], [0, 1+p*]]
//   Z1       = (1+p*) * Id
enum class Family { K, K0, K1group, Kn, K1pn, T1, H, Z1 };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::K: return "K";
    case Family::K0: return "K0";
    case Family::K1group: return "K1";
    case Family::Kn: return "Kn";
    case Family::K1pn: return "K1pn";
    case Family::T1: return "T1";
    case Family::H: return "H";
    case Family::Z1: return "Z1";
  }
  return "?";
}

inline bool family_is_leveled(Family f) {
  return f == Family::K0 || f == Family::Kn || f == Family::K1pn || f == Family::T1;
}

struct SubgroupSpec {
  Family family;
  unsigned n;  // level; meaningful only for leveled families
  std::uint64_t p;

  SubgroupSpec(Family f, unsigned n_, std::uint64_t p_) : family(f), n(n_), p(p_) {
    check_prime(p_);
    if (family_is_leveled(f) && n_ < 1)
      throw malformed_input(std::string(family_name(f)) + " requires level n >= 1");
  }

  static SubgroupSpec K(std::uint64_t p) { return {Family::K, 0, p}; }
  static SubgroupSpec K0(unsigned n, std::uint64_t p) { return {Family::K0, n, p}; }
  static SubgroupSpec K1(std::uint64_t p) { return {Family::K1group, 1, p}; }
  static SubgroupSpec Kn(unsigned n, std::uint64_t p) { return {Family::Kn, n, p}; }
  static SubgroupSpec K1pn(unsigned n, std::uint64_t p) { return {Family::K1pn, n, p}; }
  static SubgroupSpec T1(unsigned n, std::uint64_t p) { return {Family::T1, n, p}; }
  static SubgroupSpec H(std::uint64_t p) { return {Family::H, 0, p}; }
  static SubgroupSpec Z1(std::uint64_t p) { return {Family::Z1, 0, p}; }

  // Effective congruence level: the smallest k with K_k contained in the group.
  unsigned level() const {
    switch (family) {
      case Family::K: return 0;
      case Family::K1group: return 1;
      case Family::H:
      case Family::Z1: return 1;
      default: return n;
    }
  }

  bool contained_in_K1() const {
    switch (family) {
      case Family::K1group:
      case Family::Kn:
      case Family::K1pn:
      case Family::T1:
      case Family::Z1:
      case Family::H:  // diag(1, 1+p*) matches the K1 shape
        return true;
      default: return false;
    }
  }

  std::string key() const {
    std::string s = family_name(family);
    if (family_is_leveled(family)) s += "(" + std::to_string(n) + ")";
    return s + "@p" + std::to_string(p);
  }

  friend bool operator==(const SubgroupSpec& a, const SubgroupSpec& b) {
    return a.family == b.family && a.p == b.p &&
           (!family_is_leveled(a.family) || a.n == b.n);
  }
};

// Membership of g (reduced mod p^N) in the congruence shape, read mod p^N.
inline bool subgroup_contains(const SubgroupSpec& spec, const ZMat2& g, unsigned N) {
  const std::uint64_t p = spec.p;
  if (N < 1 || (family_is_leveled(spec.family) && N < spec.n))
    throw precision_error("subgroup_contains: precision p^" + std::to_string(N) +
                          " below level " + std::to_string(spec.n));
  const std::uint64_t pN = pow_u64(p, N);
  auto one_mod = [&](int128 x, unsigned k) {  // x ≡ 1 mod p^k  (k <= N)
    return floor_mod(x - 1, pow_u64(p, k)) == 0;
  };
  auto zero_mod = [&](int128 x, unsigned k) { return floor_mod(x, pow_u64(p, k)) == 0; };
  if (!is_unit_mod_p(ZMat2{floor_mod(g.a, pN), floor_mod(g.b, pN), floor_mod(g.c, pN),
                           floor_mod(g.d, pN)}.det(), p))
    return false;
  switch (spec.family) {
    case Family::K: return true;
    case Family::K0: return zero_mod(g.c, spec.n);
    case Family::K1group: return one_mod(g.a, 1) && one_mod(g.d, 1) && zero_mod(g.b, 1) && zero_mod(g.c, 1);
    case Family::Kn:
      return one_mod(g.a, spec.n) && one_mod(g.d, spec.n) && zero_mod(g.b, spec.n) && zero_mod(g.c, spec.n);
    case Family::K1pn:
      return one_mod(g.a, 1) && one_mod(g.d, 1) && zero_mod(g.b, 1) && zero_mod(g.c, spec.n);
    case Family::T1:
      return one_mod(g.a, 1) && one_mod(g.d, 1) && zero_mod(g.b, spec.n) && zero_mod(g.c, spec.n);
    case Family::H: return floor_mod(g.a - 1, pN) == 0 && zero_mod(g.b, N) && zero_mod(g.c, N) && one_mod(g.d, 1);
    case Family::Z1:
      return one_mod(g.a, 1) && zero_mod(g.b, N) && zero_mod(g.c, N) && floor_mod(g.a - g.d, pN) == 0;
  }
  return false;
}

// Smallest primitive root mod p^N (any primitive root mod p^2 works for all N).
inline std::uint64_t primitive_root(std::uint64_t p, unsigned N) {
  const std::uint64_t p2 = p * p;
  for (std::uint64_t g = 2; g < p; ++g) {
    bool gen_mod_p = true;
    for (std::uint64_t q = 2; q <= p - 1; ++q) {
      if ((p - 1) % q == 0 && is_prime(q) && mod_pow(g, (p - 1) / q, p) == 1) {
        gen_mod_p = false;
        break;
      }
    }
    if (gen_mod_p && (N < 2 || mod_pow(g, p - 1, p2) != 1)) return g;
  }
  throw consistency_error("primitive_root: none found (impossible for prime p)");
}

// Generators of the image of the subgroup in GL_2(Z/p^N), lifted to integer
// matrices with entries in [0, p^N).  Completeness is by row/column elimination:
// clear the lower-left with powers of the lower elementary generator, then the
// upper-right, then the diagonal (1+p or a primitive root generates the
// relevant unit group for odd p).  Tests re-check this with a BFS closure at
// small parameters and by random membership sampling.
inline std::vector<ZMat2> subgroup_generators(const SubgroupSpec& spec, unsigned N) {
  const std::uint64_t p = spec.p;
  if (family_is_leveled(spec.family) && N < spec.n + 1)
    throw precision_error("subgroup_generators: need N >= n+1 for " + spec.key());
  if (N < 2 && spec.family != Family::K && spec.family != Family::K0)
    throw precision_error("subgroup_generators: need N >= 2 for " + spec.key());
  const int128 P = static_cast<int128>(p);
  const int128 pn = static_cast<int128>(pow_u64(p, spec.n));
  switch (spec.family) {
    case Family::K: {
      std::uint64_t g0 = primitive_root(p, N);
      return {ZMat2{1, 1, 0, 1}, ZMat2{1, 0, 1, 1}, ZMat2::diag(static_cast<int128>(g0), 1)};
    }
    case Family::K0: {
      std::uint64_t g0 = primitive_root(p, N);
      return {ZMat2{1, 1, 0, 1}, ZMat2{1, 0, pn, 1}, ZMat2::diag(static_cast<int128>(g0), 1),
              ZMat2::diag(1, static_cast<int128>(g0))};
    }
    case Family::K1group:
      return {ZMat2::diag(1 + P, 1), ZMat2::diag(1, 1 + P), ZMat2{1, P, 0, 1}, ZMat2{1, 0, P, 1}};
    case Family::Kn:
      return {ZMat2::diag(1 + pn, 1), ZMat2::diag(1, 1 + pn), ZMat2{1, pn, 0, 1}, ZMat2{1, 0, pn, 1}};
    case Family::K1pn:
      return {ZMat2::diag(1 + P, 1), ZMat2::diag(1, 1 + P), ZMat2{1, P, 0, 1}, ZMat2{1, 0, pn, 1}};
    case Family::T1:
      return {ZMat2::diag(1 + P, 1), ZMat2::diag(1, 1 + P), ZMat2{1, pn, 0, 1}, ZMat2{1, 0, pn, 1}};
    case Family::H: return {ZMat2::diag(1, 1 + P)};
    case Family::Z1: return {ZMat2::diag(1 + P, 1 + P)};
  }
  throw malformed_input("subgroup_generators: unsupported family");
}

// Order of the image of the subgroup in GL_2(Z/p^N), by counting congruence
// shapes (cross-checked against BFS closure in the tests).
inline std::uint64_t image_order(const SubgroupSpec& spec, unsigned N) {
  const std::uint64_t p = spec.p;
  auto ppow = [&](long e) { return e <= 0 ? std::uint64_t{1} : pow_u64(p, static_cast<unsigned>(e)); };
  const long Nn = static_cast<long>(N), n = static_cast<long>(spec.n);
  switch (spec.family) {
    case Family::K:
      // |GL_2(Z/p^N)| = p^(4(N-1)) * (p^2-1)(p^2-p)
      return ppow(4 * (Nn - 1)) * (p * p - 1) * (p * p - p);
    case Family::K0:
      // a,d units; b free; c in p^n Z: (p-1)^2 p^(2(N-1)) * p^N * p^(N-n)
      return (p - 1) * (p - 1) * ppow(2 * (Nn - 1)) * ppow(Nn) * ppow(Nn - n);
    case Family::K1group: return ppow(4 * (Nn - 1));
    case Family::Kn: return ppow(4 * (Nn - n));
    case Family::K1pn: return ppow(2 * (Nn - 1)) * ppow(Nn - 1) * ppow(Nn - n);
    case Family::T1: return ppow(2 * (Nn - 1)) * ppow(2 * (Nn - n));
    case Family::H: return ppow(Nn - 1);
    case Family::Z1: return ppow(Nn - 1);
  }
  throw malformed_input("image_order: unsupported family");
}

// Uniform random element of the subgroup's image mod p^N, sampled directly
// from the congruence shape (rejection on the determinant where needed).
inline ZMat2 random_member(const SubgroupSpec& spec, unsigned N, std::mt19937_64& rng) {
  const std::uint64_t p = spec.p;
  const std::uint64_t pN = pow_u64(p, N);
  std::uniform_int_distribution<std::uint64_t> full(0, pN - 1);
  auto rnd_pk = [&](unsigned k) {  // random multiple of p^k in [0, p^N)
    if (k >= N) return std::uint64_t{0};
    std::uint64_t pk = pow_u64(p, k);
    std::uniform_int_distribution<std::uint64_t> d(0, pN / pk - 1);
    return d(rng) * pk;
  };
  auto rnd_1pk = [&](unsigned k) { return (1 + rnd_pk(k)) % pN; };
  const unsigned n = spec.n;
  switch (spec.family) {
    case Family::K: {
      while (true) {
        ZMat2 g{static_cast<int128>(full(rng)), static_cast<int128>(full(rng)),
                static_cast<int128>(full(rng)), static_cast<int128>(full(rng))};
        if (is_unit_mod_p(g.det(), p)) return g;
      }
    }
    case Family::K0: {
      while (true) {
        ZMat2 g{static_cast<int128>(full(rng)), static_cast<int128>(full(rng)),
                static_cast<int128>(rnd_pk(n)), static_cast<int128>(full(rng))};
        if (is_unit_mod_p(g.a, p) && is_unit_mod_p(g.d, p)) return g;
      }
    }
    case Family::K1group:
      return {static_cast<int128>(rnd_1pk(1)), static_cast<int128>(rnd_pk(1)),
              static_cast<int128>(rnd_pk(1)), static_cast<int128>(rnd_1pk(1))};
    case Family::Kn:
      return {static_cast<int128>(rnd_1pk(n)), static_cast<int128>(rnd_pk(n)),
              static_cast<int128>(rnd_pk(n)), static_cast<int128>(rnd_1pk(n))};
    case Family::K1pn:
      return {static_cast<int128>(rnd_1pk(1)), static_cast<int128>(rnd_pk(1)),
              static_cast<int128>(rnd_pk(n)), static_cast<int128>(rnd_1pk(1))};
    case Family::T1:
      return {static_cast<int128>(rnd_1pk(1)), static_cast<int128>(rnd_pk(n)),
              static_cast<int128>(rnd_pk(n)), static_cast<int128>(rnd_1pk(1))};
    case Family::H: return ZMat2::diag(1, static_cast<int128>(rnd_1pk(1)));
    case Family::Z1: {
      int128 z = static_cast<int128>(rnd_1pk(1));
      return ZMat2::diag(z, z);
    }
  }
  throw malformed_input("random_member: unsupported family");
}

// Change-of-groups report: with D = diag(1, p^floor(n/2)), the conjugate
// D^-1 K1(p^n) D has off-diagonal valuations (1 + floor(n/2), n - floor(n/2)).
// nPrime is the largest n' with the conjugate inside T1(p^n'); index is the
// index there.  Both follow from the valuations.
struct ConjugationReport {
  unsigned n;
  unsigned upper_val;  // valuation of the upper-right congruence condition
  unsigned lower_val;  // valuation of the lower-left congruence condition
  unsigned n_prime;
  std::uint64_t index;
};

inline ConjugationReport conjugation_report(std::uint64_t p, unsigned n) {
  check_prime(p);
  if (n < 1) throw malformed_input("conjugation_report: n >= 1 required");
  const unsigned f = n / 2;
  const unsigned upper = 1 + f, lower = n - f;
  const unsigned n_prime = upper < lower ? upper : lower;
  const std::uint64_t index = pow_u64(p, (upper - n_prime) + (lower - n_prime));
  return {n, upper, lower, n_prime, index};
}

}  // namespace gl2rep
