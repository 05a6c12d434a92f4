#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gl2rep/cind_truncation.hpp"
#include "gl2rep/errors.hpp"
#include "gl2rep/fp_matrix.hpp"
#include "gl2rep/krep.hpp"
#include "gl2rep/subgroups.hpp"
#include "gl2rep/weight.hpp"

namespace gl2rep {

// Feasibility cap on the quotient dimension (= dim R_m); requests above it are
// refused with a cost estimate rather than attempted.
inline constexpr std::size_t kQuotientDimCap = 5000;

inline std::size_t pi_truncation_cost(std::uint64_t p, unsigned r, unsigned m) {
  return (r + 1) * (p + 1) * pow_u64(p, m - 1);
}

// (r, lambda) in {(0, +-1), (p-1, +-1)}: pi is reducible there, so the
// closed-form dimension assertions of the generic case are suppressed.
inline bool degenerate_parameters(const Weight& w, std::uint64_t lambda) {
  lambda %= w.p;
  return (lambda == 1 || lambda == w.p - 1) && (w.r == 0 || w.r == w.p - 1);
}

// Truncation pi(r, lambda, a)^(m): the quotient of V_m (compact induction up
// to tree level m) by (T - lambda) V_{m-1}.  Because T^+ is injective, the
// relation space meets V_m exactly in (T - lambda) V_{m-1}, so the quotient is
// the image of V_m inside the full representation; its invariants under any
// subgroup containing K_{m-1} are therefore exact, not just truncated.
//
// Quotient coordinates are the non-pivot columns of the relation row space in
// deterministic reduced row echelon form.
class PiTruncation {
 public:
  PiTruncation(const Weight& w, std::uint64_t lambda, unsigned m, unsigned N)
      : w_(w), lambda_(lambda % w.p), m_(m), N_(N), ambient_(w, m, N) {
    if (m < 1) throw malformed_input("PiTruncation: m >= 1 required");
    if (pi_truncation_cost(w.p, w.r, m) > kQuotientDimCap)
      throw cap_exceeded("PiTruncation: quotient dimension " +
                         std::to_string(pi_truncation_cost(w.p, w.r, m)) + " exceeds cap " +
                         std::to_string(kQuotientDimCap));
    build();
  }

  const Weight& weight() const { return w_; }
  std::uint64_t hecke_eigenvalue() const { return lambda_; }
  unsigned truncation() const { return m_; }
  unsigned level() const { return N_; }
  std::uint64_t modulus() const { return w_.p; }
  const TruncatedCInd& ambient() const { return ambient_; }

  std::size_t ambient_dim() const { return ambient_.dim(); }
  std::size_t relation_rank() const { return rel_.rank; }
  std::size_t dim() const { return free_cols_.size(); }

  // Matrix of g on the quotient.
  FpMatrix act(const ZMat2& g) const {
    const std::size_t q = dim(), d = w_.dim();
    const std::uint64_t p = w_.p;
    std::vector<BlockMove> moves = ambient_.act_blocks(g);
    // Row f of `t` is the image of quotient basis vector f, in quotient
    // coordinates; assembled row-wise against proj_rows_ then transposed.
    FpMatrix t(q, q, p);
    for (std::size_t f = 0; f < q; ++f) {
      const std::size_t j = free_cols_[f];
      const BlockMove& mv = moves[j / d];
      const std::size_t wcol = j % d;
      for (std::size_t i = 0; i < d; ++i) {
        const std::uint64_t c = mv.block(i, wcol);
        if (!c) continue;
        const std::uint32_t* src = proj_rows_.row(mv.dst_vertex * d + i).data();
        std::uint32_t* dst = &t(f, 0);
        for (std::size_t x = 0; x < q; ++x) dst[x] = static_cast<std::uint32_t>((dst[x] + c * src[x]) % p);
      }
    }
    return t.transpose();
  }

  const std::vector<FpMatrix>& generator_matrices(const SubgroupSpec& spec) const {
    std::scoped_lock lock(cache_->mu);
    auto it = cache_->gens.find(spec.key());
    if (it != cache_->gens.end()) return it->second;
    std::vector<FpMatrix> mats;
    for (const ZMat2& g : subgroup_generators(spec, N_)) mats.push_back(act(g));
    return cache_->gens.emplace(spec.key(), std::move(mats)).first->second;
  }

  // True iff g fixes every column of `basis` (quotient coordinates).  Checked
  // in the ambient space: rho(g) lift(b) - lift(b) must reduce to zero against
  // the relation rows.
  bool fixes(const ZMat2& g, const FpMatrix& basis) const {
    std::vector<BlockMove> moves = ambient_.act_blocks(g);
    const std::size_t D = ambient_.dim();
    std::vector<std::uint32_t> lift(D), image(D);
    for (std::size_t col = 0; col < basis.cols(); ++col) {
      std::fill(lift.begin(), lift.end(), 0);
      std::fill(image.begin(), image.end(), 0);
      for (std::size_t f = 0; f < free_cols_.size(); ++f) lift[free_cols_[f]] = basis(f, col);
      ambient_.apply_blocks(moves, lift, image);
      const std::uint64_t p = w_.p;
      for (std::size_t j = 0; j < D; ++j) image[j] = static_cast<std::uint32_t>((image[j] + p - lift[j]) % p);
      if (!reduces_to_zero(image)) return false;
    }
    return true;
  }

  // Quotient coordinates of ambient basis vector e_j.
  std::span<const std::uint32_t> project_unit(std::size_t j) const { return proj_rows_.row(j); }

  // Image of the level-k block R_k in the quotient, as a (dim x dim R_k) matrix.
  FpMatrix level_image(unsigned k) const {
    const std::size_t q = dim(), first = ambient_.level_first_index(k), nd = ambient_.level_dim(k);
    FpMatrix out(q, nd, w_.p);
    for (std::size_t c = 0; c < nd; ++c) {
      auto row = proj_rows_.row(first + c);
      for (std::size_t i = 0; i < q; ++i) out(i, c) = row[i];
    }
    return out;
  }

  // Image of the direct sum of all blocks of the given level parity.
  FpMatrix parity_image(unsigned parity) const {
    std::size_t cols = 0;
    for (unsigned k = parity; k <= m_; k += 2) cols += ambient_.level_dim(k);
    FpMatrix out(dim(), cols, w_.p);
    std::size_t c0 = 0;
    for (unsigned k = parity; k <= m_; k += 2) {
      const std::size_t first = ambient_.level_first_index(k), nd = ambient_.level_dim(k);
      for (std::size_t c = 0; c < nd; ++c) {
        auto row = proj_rows_.row(first + c);
        for (std::size_t i = 0; i < dim(); ++i) out(i, c0 + c) = row[i];
      }
      c0 += nd;
    }
    return out;
  }

 private:
  struct Cache {
    std::mutex mu;
    std::map<std::string, std::vector<FpMatrix>> gens;
  };

  void build() {
    const std::uint64_t p = w_.p;
    const FpMatrix T = hecke_matrix(ambient_);
    const std::size_t D = ambient_.dim(), Dm1 = ambient_.dim_up_to(m_ - 1);
    // Relation rows: transposed columns of (T - lambda * inclusion).
    FpMatrix rel(Dm1, D, p);
    for (std::size_t c = 0; c < Dm1; ++c) {
      for (std::size_t j = 0; j < D; ++j) rel(c, j) = T(j, c);
      rel(c, c) = static_cast<std::uint32_t>((rel(c, c) + p - lambda_) % p);
    }
    rel_ = rref(rel);
    if (rel_.rank != Dm1)
      throw consistency_error("PiTruncation: ker(T - lambda) on V_{m-1} is nonzero (rank " +
                              std::to_string(rel_.rank) + " of " + std::to_string(Dm1) + ")");
    // Free (non-pivot) columns are the quotient coordinates.
    {
      std::size_t pi = 0;
      for (std::size_t j = 0; j < D; ++j) {
        if (pi < rel_.pivots.size() && rel_.pivots[pi] == j)
          ++pi;
        else
          free_cols_.push_back(j);
      }
    }
    // proj_rows_: row j = quotient coordinates of ambient e_j.
    const std::size_t q = free_cols_.size();
    proj_rows_ = FpMatrix(D, q, p);
    for (std::size_t f = 0; f < q; ++f) proj_rows_(free_cols_[f], f) = 1;
    for (std::size_t i = 0; i < rel_.rank; ++i) {
      const std::size_t piv = rel_.pivots[i];
      for (std::size_t f = 0; f < q; ++f)
        proj_rows_(piv, f) = static_cast<std::uint32_t>((p - rel_.R(i, free_cols_[f])) % p);
    }
    cache_ = std::make_shared<Cache>();
  }

  bool reduces_to_zero(std::vector<std::uint32_t>& v) const {
    const std::uint64_t p = w_.p;
    const std::size_t D = ambient_.dim();
    for (std::size_t i = 0; i < rel_.rank; ++i) {
      const std::uint64_t c = v[rel_.pivots[i]];
      if (!c) continue;
      const std::uint64_t f = p - c;
      auto row = rel_.R.row(i);
      for (std::size_t j = rel_.pivots[i]; j < D; ++j)
        v[j] = static_cast<std::uint32_t>((v[j] + f * row[j]) % p);
    }
    for (std::uint32_t x : v)
      if (x) return false;
    return true;
  }

  Weight w_;
  std::uint64_t lambda_;
  unsigned m_, N_;
  TruncatedCInd ambient_;
  RrefResult rel_;
  std::vector<std::size_t> free_cols_;
  FpMatrix proj_rows_;
  std::shared_ptr<Cache> cache_;
};

inline PiTruncation pi_truncation(const Weight& w, std::uint64_t lambda, unsigned m, unsigned N) {
  return PiTruncation(w, lambda, m, N);
}

// Dimensions of the images R_bar_k of each level block in the quotient,
// k = 0..m.
inline std::vector<std::size_t> bar_R_dims(const PiTruncation& pt) {
  std::vector<std::size_t> dims;
  for (unsigned k = 0; k <= pt.truncation(); ++k) dims.push_back(rank(pt.level_image(k)));
  return dims;
}

struct EvenOddSplit {
  FpMatrix even;  // basis columns of the image of the even-level blocks
  FpMatrix odd;
  std::size_t even_dim = 0, odd_dim = 0;
};

// Images of the even- and odd-level chains in the quotient.  For lambda = 0
// these realize the two direct summands of the supersingular representation;
// their dimensions must add up to dim(pt), and each is K-stable.
inline EvenOddSplit split_even_odd(const PiTruncation& pt) {
  if (pt.hecke_eigenvalue() != 0)
    throw malformed_input("split_even_odd: requires lambda = 0");
  EvenOddSplit s;
  auto even_raw = pt.parity_image(0);
  auto odd_raw = pt.parity_image(1);
  auto col_basis = [](const FpMatrix& m) {
    RrefResult e = rref(m.transpose());
    FpMatrix b(m.rows(), e.rank, m.modulus());
    for (std::size_t i = 0; i < e.rank; ++i)
      for (std::size_t j = 0; j < m.rows(); ++j) b(j, i) = e.R(i, j);
    return b;
  };
  s.even = col_basis(even_raw);
  s.odd = col_basis(odd_raw);
  s.even_dim = s.even.cols();
  s.odd_dim = s.odd.cols();
  if (s.even_dim + s.odd_dim != pt.dim())
    throw consistency_error("split_even_odd: parity images fail to decompose the quotient");
  return s;
}

// Exact invariants of the (un-truncated) representation, computed in the
// truncation; valid once m >= n+1 so the truncation captures all invariants
// of subgroups containing K_n.  Subgroups that contain no K_n (H, Z1) have
// infinite-dimensional invariants in the full representation and are rejected.
inline InvariantsResult invariant_dims(const PiTruncation& pt, const SubgroupSpec& spec,
                                       std::mt19937_64& rng) {
  if (spec.family == Family::H || spec.family == Family::Z1)
    throw domain_error("invariant_dims: " + spec.key() +
                       " contains no K_n; full-representation invariants are not finite");
  const unsigned n = spec.level() > 0 ? spec.level() : 1;
  if (pt.truncation() < n + 1)
    throw malformed_input("invariant_dims: need truncation m >= " + std::to_string(n + 1) +
                          " for " + spec.key() + ", have m = " + std::to_string(pt.truncation()));
  return invariants(pt, spec, rng);
}

// Containment of the K_n-invariants in the designated R_bar levels:
// R_bar_n + R_bar_{n+1} when lambda = 0, R_bar_n when lambda != 0.
inline bool containment_check(const PiTruncation& pt, unsigned n, std::mt19937_64& rng) {
  if (n < 1) throw malformed_input("containment_check: n >= 1 required");
  if (pt.truncation() < n + 1) throw malformed_input("containment_check: need m >= n+1");
  auto inv = invariant_dims(pt, SubgroupSpec::Kn(n, pt.modulus()), rng);
  FpMatrix space = pt.level_image(n);
  if (pt.hecke_eigenvalue() == 0) {
    FpMatrix next = pt.level_image(n + 1);
    FpMatrix joint(space.rows(), space.cols() + next.cols(), pt.modulus());
    for (std::size_t i = 0; i < space.rows(); ++i) {
      for (std::size_t j = 0; j < space.cols(); ++j) joint(i, j) = space(i, j);
      for (std::size_t j = 0; j < next.cols(); ++j) joint(i, space.cols() + j) = next(i, j);
    }
    return columns_contained(joint, inv.basis);
  }
  return columns_contained(space, inv.basis);
}

struct PiInvariantReport {
  std::size_t dim = 0;
  bool stable = false;     // unchanged under m -> m+1
  unsigned m = 0;          // truncation at which `dim` was computed
  unsigned N = 0;
};

// Invariant dimension with the self-auditing stability check: compute at m and
// m+1 and require agreement.  If `grow` is set the pair (m, m+1) slides until
// two consecutive truncations agree or the cap stops the search; growing is
// how weights outside the guaranteed range (r = 0 at lambda = 0) get an m
// large enough.
inline PiInvariantReport pi_invariants_checked(const Weight& w, std::uint64_t lambda,
                                               const SubgroupSpec& spec, unsigned n,
                                               std::mt19937_64& rng,
                                               std::optional<unsigned> m_override = {},
                                               std::optional<unsigned> N_override = {},
                                               bool check_stability = true, bool grow = false) {
  unsigned m = m_override.value_or(n + 1);
  if (N_override && *N_override < m + 3)
    throw precision_error("pi_invariants_checked: N below m+3");
  auto dim_at = [&](unsigned mm) {
    // An explicit N is honored; the stability recompute at mm = m+1 bumps it
    // to stay above the floor.
    unsigned N = std::max(N_override.value_or(mm + 3), mm + 3);
    PiTruncation pt(w, lambda, mm, N);
    return invariant_dims(pt, spec, rng).dim;
  };
  std::size_t d0 = dim_at(m);
  if (!check_stability) return {d0, false, m, N_override.value_or(m + 3)};
  while (true) {
    std::size_t d1 = dim_at(m + 1);
    if (d0 == d1) return {d0, true, m, N_override.value_or(m + 3)};
    if (!grow) return {d0, false, m, N_override.value_or(m + 3)};
    ++m;
    d0 = d1;
    if (pi_truncation_cost(w.p, w.r, m + 1) > kQuotientDimCap)
      throw cap_exceeded("pi_invariants_checked: stability not reached below the dimension cap");
  }
}

// dim pi(r,0,1)^Gamma = dim pi(p-1-r,0,1)^Gamma for Gamma inside K1, where the
// twist by omega^r is invisible.  Both sides are computed in their own
// truncations, grown until stable.
inline bool twist_symmetry_check(unsigned r, const SubgroupSpec& spec, unsigned n, std::uint64_t p,
                                 std::mt19937_64& rng) {
  if (r > p - 1) throw malformed_input("twist_symmetry_check: r out of range");
  if (!spec.contained_in_K1())
    throw domain_error("twist_symmetry_check: subgroup must be contained in K1");
  auto lhs = pi_invariants_checked(Weight(p, r), 0, spec, n, rng, {}, {}, true, true);
  auto rhs = pi_invariants_checked(Weight(p, p - 1 - r), 0, spec, n, rng, {}, {}, true, true);
  return lhs.dim == rhs.dim && lhs.stable && rhs.stable;
}

}  // namespace gl2rep
