#pragma once

#include <cstdint>
#include <vector>

#include "gl2rep/errors.hpp"
#include "gl2rep/fp.hpp"
#include "gl2rep/zmat2.hpp"

namespace gl2rep {

// Vertex of the tree at distance `level` from the standard vertex, in the
// canonical coset labelling:
//   branch 0:  [[p^k, j], [0, 1]]   with j mod p^k
//   branch 1:  [[1, 0], [p*j, p^k]] with j mod p^(k-1)   (k >= 1)
// Level 0 is the single vertex (0, 0).
struct VertexIndex {
  unsigned level;
  unsigned branch;
  std::uint64_t j;

  friend bool operator==(const VertexIndex& x, const VertexIndex& y) {
    return x.level == y.level && x.branch == y.branch && x.j == y.j;
  }
};

inline ZMat2 vertex_rep(const VertexIndex& v, std::uint64_t p) {
  const int128 pk = static_cast<int128>(pow_u64(p, v.level));
  if (v.branch == 0) return {pk, static_cast<int128>(v.j), 0, 1};
  return {1, 0, static_cast<int128>(p) * static_cast<int128>(v.j), pk};
}

// Vertices at exact distance k: p^k of branch 0 and p^(k-1) of branch 1,
// (p+1)p^(k-1) in total.
inline std::vector<VertexIndex> vertices_at_level(std::uint64_t p, unsigned k) {
  std::vector<VertexIndex> out;
  if (k == 0) {
    out.push_back({0, 0, 0});
    return out;
  }
  for (std::uint64_t j = 0; j < pow_u64(p, k); ++j) out.push_back({k, 0, j});
  for (std::uint64_t j = 0; j < pow_u64(p, k - 1); ++j) out.push_back({k, 1, j});
  return out;
}

struct VertexCanonicalization {
  unsigned p_power;  // e0: homothety factor removed first
  VertexIndex vertex;
  ZMat2 k2;  // integral, unit determinant; A = p^e0 * rep(vertex) * k2 exactly
};

// Canonical form of an integral A with det != 0.  After dividing out the
// minimal entry valuation, the column lattice of A contains a vector with unit
// bottom entry (branch 0, j = a/c of such a column mod p^k) or else has its
// bottom row divisible by p (branch 1).  k2 = rep^-1 * A is exact because the
// defining congruences hold over the integers.
inline VertexCanonicalization vertex_canonicalize(const ZMat2& a_in, std::uint64_t p) {
  check_prime(p);
  if (a_in.det() == 0) throw domain_error("vertex_canonicalize: singular matrix");
  int e0 = val_p(a_in.a, p);
  for (int v : {val_p(a_in.b, p), val_p(a_in.c, p), val_p(a_in.d, p)})
    if (v < e0) e0 = v;
  const int128 pe = static_cast<int128>(pow_u64(p, static_cast<unsigned>(e0)));
  ZMat2 A{a_in.a / pe, a_in.b / pe, a_in.c / pe, a_in.d / pe};
  const unsigned k = static_cast<unsigned>(val_p(A.det(), p));
  const std::uint64_t pk = pow_u64(p, k);

  VertexIndex vx;
  if (is_unit_mod_p(A.c, p) || is_unit_mod_p(A.d, p)) {
    std::uint64_t j;
    if (is_unit_mod_p(A.c, p))
      j = static_cast<std::uint64_t>(floor_mod(A.a, pk)) *
          mod_inv(static_cast<std::uint64_t>(floor_mod(A.c, pk)), pk) % pk;
    else
      j = static_cast<std::uint64_t>(floor_mod(A.b, pk)) *
          mod_inv(static_cast<std::uint64_t>(floor_mod(A.d, pk)), pk) % pk;
    vx = {k, 0, j};
  } else {
    // bottom row divisible by p; top row has a unit since e0 was removed
    std::uint64_t m;  // m = p*j mod p^k
    if (is_unit_mod_p(A.a, p))
      m = static_cast<std::uint64_t>(floor_mod(A.c, pk)) *
          mod_inv(static_cast<std::uint64_t>(floor_mod(A.a, pk)), pk) % pk;
    else
      m = static_cast<std::uint64_t>(floor_mod(A.d, pk)) *
          mod_inv(static_cast<std::uint64_t>(floor_mod(A.b, pk)), pk) % pk;
    vx = {k, 1, m / p};
  }

  const ZMat2 rep = vertex_rep(vx, p);
  const ZMat2 num = rep.adjugate() * A;  // det(rep) = p^k
  ZMat2 k2{num.a / static_cast<int128>(pk), num.b / static_cast<int128>(pk),
           num.c / static_cast<int128>(pk), num.d / static_cast<int128>(pk)};
  if (k2 * ZMat2::diag(static_cast<int128>(pk), static_cast<int128>(pk)) != num ||
      !is_unit_mod_p(k2.det(), p))
    throw consistency_error("vertex_canonicalize: inexact division or non-unit cofactor");
  return {static_cast<unsigned>(e0), vx, k2};
}

}  // namespace gl2rep
