#pragma once

#include <cstdint>
#include <vector>

#include "gl2rep/errors.hpp"
#include "gl2rep/fp.hpp"
#include "gl2rep/zmat2.hpp"

namespace gl2rep {

// Point of P^1(Z/p^n), indexing the right cosets K0(p^n)\K.  Affine points
// [c:1] carry the representative [[1,0],[c,1]]; infinite-branch points [1:d]
// (p | d) carry [[0,-1],[1,d]].  A matrix lies in the coset determined by the
// P^1 class of its bottom row.
struct P1Point {
  bool infinite;        // false: [c:1], true: [1:d]
  std::uint64_t coord;  // c mod p^n, or d in pZ/p^n
  unsigned n;
  std::uint64_t p;

  ZMat2 rep() const {
    if (!infinite) return {1, 0, static_cast<int128>(coord), 1};
    return {0, -1, 1, static_cast<int128>(coord)};
  }

  ZMat2 rep_inverse() const {  // exact integer inverse (both reps have det 1)
    if (!infinite) return {1, 0, -static_cast<int128>(coord), 1};
    return {static_cast<int128>(coord), 1, -1, 0};
  }

  // Position in the canonical ordering: affine points by c, then infinite
  // branch by d/p.
  std::size_t index() const {
    std::uint64_t pn = pow_u64(p, n);
    return infinite ? pn + coord / p : coord;
  }

  friend bool operator==(const P1Point& x, const P1Point& y) {
    return x.infinite == y.infinite && x.coord == y.coord && x.n == y.n && x.p == y.p;
  }
};

inline std::size_t p1_size(std::uint64_t p, unsigned n) { return (p + 1) * pow_u64(p, n - 1); }

inline std::vector<P1Point> p1_points(std::uint64_t p, unsigned n) {
  check_prime(p);
  if (n < 1) throw malformed_input("p1_points: n >= 1 required");
  const std::uint64_t pn = pow_u64(p, n);
  std::vector<P1Point> pts;
  pts.reserve(p1_size(p, n));
  for (std::uint64_t c = 0; c < pn; ++c) pts.push_back({false, c, n, p});
  for (std::uint64_t d = 0; d < pn; d += p) pts.push_back({true, d, n, p});
  return pts;
}

// P^1 class of the bottom row of g mod p^n.  Requires the row to be primitive
// mod p (guaranteed when g is invertible mod p^n).
inline P1Point classify_bottom_row(const ZMat2& g, std::uint64_t p, unsigned n) {
  const std::uint64_t pn = pow_u64(p, n);
  std::uint64_t u = static_cast<std::uint64_t>(floor_mod(g.c, pn));
  std::uint64_t v = static_cast<std::uint64_t>(floor_mod(g.d, pn));
  if (v % p != 0) return {false, u * mod_inv(v, pn) % pn, n, p};
  if (u % p == 0) throw domain_error("classify_bottom_row: bottom row not primitive mod p");
  return {true, v * mod_inv(u, pn) % pn, n, p};
}

struct CosetDecomposition {
  P1Point point;
  ZMat2 k0;  // g = k0 * rep(point) as integers (up to the working modulus)
};

// Write g = k0 * gamma_x with k0 in K0(p^n).  The lower-left entry of k0 is
// divisible by p^n exactly (as an integer), so k0 supports the level-n
// conjugated weight when g is known mod p^(n+1) or better.
inline CosetDecomposition coset_decompose(const ZMat2& g, std::uint64_t p, unsigned n) {
  if (!is_unit_mod_p(g.det(), p)) throw domain_error("coset_decompose: g not invertible mod p");
  P1Point x = classify_bottom_row(g, p, n);
  ZMat2 k0 = g * x.rep_inverse();
  if (floor_mod(k0.c, pow_u64(p, n)) != 0)
    throw consistency_error("coset_decompose: k0 escaped K0(p^n)");
  return {x, k0};
}

// Number of orbits of H = <diag(1, 1+p)> acting on K0(p^n)\K on the right.
// The closed form (2n-1)(p-1)+2 is asserted by the callers, not here.
inline std::size_t double_coset_count(std::uint64_t p, unsigned n) {
  check_prime(p);
  if (n < 1) throw malformed_input("double_coset_count: n >= 1 required");
  const std::vector<P1Point> pts = p1_points(p, n);
  const ZMat2 h = ZMat2::diag(1, 1 + static_cast<int128>(p));
  std::vector<std::size_t> next(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    next[i] = classify_bottom_row(pts[i].rep() * h, p, n).index();
  std::vector<char> seen(pts.size(), 0);
  std::size_t orbits = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (seen[i]) continue;
    ++orbits;
    for (std::size_t j = i; !seen[j]; j = next[j]) seen[j] = 1;
  }
  return orbits;
}

}  // namespace gl2rep
