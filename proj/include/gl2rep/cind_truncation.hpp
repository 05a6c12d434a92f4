#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gl2rep/errors.hpp"
#include "gl2rep/fp_matrix.hpp"
#include "gl2rep/krep.hpp"
#include "gl2rep/subgroups.hpp"
#include "gl2rep/tree_vertex.hpp"
#include "gl2rep/weight.hpp"
#include "gl2rep/zmat2.hpp"

namespace gl2rep {

// One vertex moved by a group element: the block lands at dst with the given
// (r+1) x (r+1) cocycle.
struct BlockMove {
  std::size_t dst_vertex;
  FpMatrix block;
};

// Truncation of the compact induction of Sym^r tensor det^a to tree levels
// 0..m, restricted to K.  Basis: (vertex, weight index) with vertices ordered
// by level, branch, then index, so V_{m-1} occupies a prefix of the V_m basis.
// The K-action is computed by exact integer products g * vertex_rep followed
// by canonical form, the unit cofactor acting through the weight.
class TruncatedCInd {
 public:
  TruncatedCInd(const Weight& w, unsigned m, unsigned N) : w_(w), m_(m), N_(N) {
    if (N < m + 3) throw precision_error("TruncatedCInd: need N >= m+3");
    level_offset_.assign(m + 2, 0);
    for (unsigned k = 0; k <= m; ++k) {
      level_offset_[k] = verts_.size();
      auto lv = vertices_at_level(w.p, k);
      verts_.insert(verts_.end(), lv.begin(), lv.end());
    }
    level_offset_[m + 1] = verts_.size();
  }

  const Weight& weight() const { return w_; }
  unsigned truncation() const { return m_; }
  unsigned level() const { return N_; }
  std::uint64_t modulus() const { return w_.p; }

  std::size_t vertex_count() const { return verts_.size(); }
  const VertexIndex& vertex(std::size_t i) const { return verts_[i]; }

  std::size_t dim() const { return verts_.size() * w_.dim(); }

  // Dimension of the sub-truncation V_k (levels <= k).
  std::size_t dim_up_to(unsigned k) const { return level_offset_[k + 1] * w_.dim(); }

  std::size_t level_dim(unsigned k) const {
    return (level_offset_[k + 1] - level_offset_[k]) * w_.dim();
  }

  std::size_t level_first_index(unsigned k) const { return level_offset_[k] * w_.dim(); }

  std::size_t vertex_index(const VertexIndex& v) const {
    if (v.level > m_) throw malformed_input("vertex_index: level beyond truncation");
    std::size_t base = level_offset_[v.level];
    if (v.level == 0) return base;
    return base + (v.branch == 0 ? v.j : pow_u64(w_.p, v.level) + v.j);
  }

  // Action of a unit-determinant g (entries read mod p^N) as one block move
  // per source vertex.  Levels are preserved.
  std::vector<BlockMove> act_blocks(const ZMat2& g_in) const {
    const ZMat2 g = reduce(g_in, pow_u64(w_.p, N_));
    if (!is_unit_mod_p(g.det(), w_.p))
      throw domain_error("TruncatedCInd::act_blocks: determinant not a unit");
    std::vector<BlockMove> moves;
    moves.reserve(verts_.size());
    for (const VertexIndex& v : verts_) {
      VertexCanonicalization c = vertex_canonicalize(g * vertex_rep(v, w_.p), w_.p);
      if (c.p_power != 0 || c.vertex.level != v.level)
        throw consistency_error("act_blocks: unit action moved a vertex across levels");
      moves.push_back({vertex_index(c.vertex), sym_matrix(c.k2, w_)});
    }
    return moves;
  }

  FpMatrix act(const ZMat2& g) const {
    const std::size_t d = w_.dim();
    FpMatrix mat(dim(), dim(), w_.p);
    std::vector<BlockMove> moves = act_blocks(g);
    for (std::size_t src = 0; src < moves.size(); ++src) {
      const std::size_t row0 = moves[src].dst_vertex * d, col0 = src * d;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) mat(row0 + i, col0 + j) = moves[src].block(i, j);
    }
    return mat;
  }

  // dst += act(g) applied to a dense ambient vector.
  void apply_blocks(const std::vector<BlockMove>& moves, std::span<const std::uint32_t> src,
                    std::span<std::uint32_t> dst) const {
    const std::size_t d = w_.dim();
    const std::uint64_t p = w_.p;
    for (std::size_t s = 0; s < moves.size(); ++s) {
      const FpMatrix& blk = moves[s].block;
      const std::size_t in0 = s * d, out0 = moves[s].dst_vertex * d;
      for (std::size_t i = 0; i < d; ++i) {
        std::uint64_t acc = dst[out0 + i];
        for (std::size_t j = 0; j < d; ++j) acc += static_cast<std::uint64_t>(blk(i, j)) * src[in0 + j];
        dst[out0 + i] = static_cast<std::uint32_t>(acc % p);
      }
    }
  }

  // The level-k block as a standalone K-representation (levels are K-stable).
  KRep level_block_rep(unsigned k) const {
    auto self = std::make_shared<TruncatedCInd>(*this);
    const std::size_t d = w_.dim();
    const std::size_t nverts = level_offset_[k + 1] - level_offset_[k];
    const std::size_t first = level_offset_[k];
    auto act = [self, d, nverts, first](const ZMat2& g) {
      FpMatrix mat(nverts * d, nverts * d, self->w_.p);
      std::vector<BlockMove> moves = self->act_blocks(g);
      for (std::size_t v = 0; v < nverts; ++v) {
        const BlockMove& mv = moves[first + v];
        const std::size_t row0 = (mv.dst_vertex - first) * d, col0 = v * d;
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j) mat(row0 + i, col0 + j) = mv.block(i, j);
      }
      return mat;
    };
    return KRep(nverts * d, w_.p, N_, act);
  }

 private:
  Weight w_;
  unsigned m_, N_;
  std::vector<VertexIndex> verts_;
  std::vector<std::size_t> level_offset_;
};

// The Hecke operator T : V_{m-1} -> V_m on the truncated compact induction.
// On a basis element [g, v],
//   T[g, v] = sum_{mu=0..p-1} [g*(p mu / 0 1), S_mu v]  +  [g*(1 0 / 0 p), S_inf v]
// with S_mu = Sym^r(1 -mu / 0 p) and S_inf = Sym^r(p 0 / 0 1) read mod p (the
// determinant twist does not enter the transports).  Each transport is
// canonicalized exactly; the unit cofactor acts through the full weight.
inline FpMatrix hecke_matrix(const TruncatedCInd& V) {
  const Weight& w = V.weight();
  const std::uint64_t p = w.p;
  const unsigned m = V.truncation();
  const std::size_t d = w.dim();
  const std::size_t domain = V.dim_up_to(m - 1);
  const Weight plain(p, w.r, 0);

  struct Transport {
    ZMat2 beta;
    FpMatrix coeff;
  };
  std::vector<Transport> transports;
  for (std::uint64_t mu = 0; mu < p; ++mu)
    transports.push_back({ZMat2{static_cast<int128>(p), static_cast<int128>(mu), 0, 1},
                          sym_matrix(ZMat2{1, -static_cast<int128>(mu), 0, static_cast<int128>(p)}, plain)});
  transports.push_back({ZMat2{1, 0, 0, static_cast<int128>(p)},
                        sym_matrix(ZMat2{static_cast<int128>(p), 0, 0, 1}, plain)});

  FpMatrix T(V.dim(), domain, p);
  const std::size_t src_vertices = domain / d;
  for (std::size_t s = 0; s < src_vertices; ++s) {
    const VertexIndex& v = V.vertex(s);
    for (const Transport& t : transports) {
      VertexCanonicalization c = vertex_canonicalize(vertex_rep(v, p) * t.beta, p);
      if (c.vertex.level != v.level + 1 && !(v.level >= 1 && c.vertex.level == v.level - 1))
        throw consistency_error("hecke_matrix: transport broke the level grading");
      FpMatrix blk = mul(sym_matrix(c.k2, w), t.coeff);
      const std::size_t row0 = V.vertex_index(c.vertex) * d, col0 = s * d;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          T(row0 + i, col0 + j) = static_cast<std::uint32_t>((T(row0 + i, col0 + j) + blk(i, j)) % p);
    }
  }
  return T;
}

// Convenience builders mirroring the per-level blocks of T.
// T^+ | R_k  : rows at level k+1, columns at level k (k <= m-1).
inline FpMatrix hecke_plus_block(const TruncatedCInd& V, const FpMatrix& T, unsigned k) {
  const std::size_t r0 = V.level_first_index(k + 1), nr = V.level_dim(k + 1);
  const std::size_t c0 = V.level_first_index(k), nc = V.level_dim(k);
  FpMatrix out(nr, nc, V.modulus());
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) out(i, j) = T(r0 + i, c0 + j);
  return out;
}

// T^- | R_k  : rows at level k-1, columns at level k (1 <= k <= m-1).
inline FpMatrix hecke_minus_block(const TruncatedCInd& V, const FpMatrix& T, unsigned k) {
  const std::size_t r0 = V.level_first_index(k - 1), nr = V.level_dim(k - 1);
  const std::size_t c0 = V.level_first_index(k), nc = V.level_dim(k);
  FpMatrix out(nr, nc, V.modulus());
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) out(i, j) = T(r0 + i, c0 + j);
  return out;
}

}  // namespace gl2rep
