#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gl2rep/errors.hpp"
#include "gl2rep/fp_matrix.hpp"
#include "gl2rep/p1_line.hpp"
#include "gl2rep/subgroups.hpp"
#include "gl2rep/weight.hpp"
#include "gl2rep/zmat2.hpp"

namespace gl2rep {

// Finite-dimensional representation of K at level N: an action oracle
// g -> matrix, valid for g known mod p^N.  Generator matrices are cached per
// subgroup spec (write-once, read-many; safe to share across threads).
class KRep {
 public:
  KRep() = default;
  KRep(std::size_t dim, std::uint64_t p, unsigned level,
       std::function<FpMatrix(const ZMat2&)> act, std::vector<std::string> labels = {})
      : dim_(dim), p_(p), level_(level), act_(std::move(act)), labels_(std::move(labels)),
        cache_(std::make_shared<Cache>()) {}

  std::size_t dim() const { return dim_; }
  std::uint64_t modulus() const { return p_; }
  unsigned level() const { return level_; }
  const std::vector<std::string>& labels() const { return labels_; }

  FpMatrix act(const ZMat2& g) const { return act_(g); }

  const std::vector<FpMatrix>& generator_matrices(const SubgroupSpec& spec) const {
    std::scoped_lock lock(cache_->mu);
    auto it = cache_->gens.find(spec.key());
    if (it != cache_->gens.end()) return it->second;
    std::vector<FpMatrix> mats;
    for (const ZMat2& g : subgroup_generators(spec, level_)) mats.push_back(act_(g));
    return cache_->gens.emplace(spec.key(), std::move(mats)).first->second;
  }

  bool fixes(const ZMat2& g, const FpMatrix& basis) const {
    return mul(act_(g), basis) == basis;
  }

 private:
  struct Cache {
    std::mutex mu;
    std::map<std::string, std::vector<FpMatrix>> gens;
  };

  std::size_t dim_ = 0;
  std::uint64_t p_ = kMinPrime;
  unsigned level_ = 1;
  std::function<FpMatrix(const ZMat2&)> act_;
  std::vector<std::string> labels_;
  std::shared_ptr<Cache> cache_;
};

// Sym^r tensor det^a inflated from GL_2(F_p) to K.
inline KRep weight_rep(const Weight& w, unsigned N) {
  return KRep(w.dim(), w.p, N, [w](const ZMat2& g) { return sym_matrix(g, w); });
}

// Ind_{K0(p^n)}^K sigma_n with sigma_n the conjugated weight.  One block per
// P^1(Z/p^n) point; g acts through the coset moves y -> x(y) given by
// gamma_y g = k0 gamma_x, with block cocycle sigma_n(k0).
inline KRep induced_rep(const Weight& w, unsigned n, unsigned N) {
  if (N < n + 1) throw precision_error("induced_rep: need N >= n+1");
  const std::uint64_t p = w.p;
  auto pts = std::make_shared<std::vector<P1Point>>(p1_points(p, n));
  const std::size_t d = w.dim();
  const std::size_t dim = pts->size() * d;
  const std::uint64_t pN = pow_u64(p, N);

  std::vector<std::string> labels;
  labels.reserve(dim);
  for (const auto& x : *pts)
    for (unsigned i = 0; i < d; ++i)
      labels.push_back((x.infinite ? "[1:" + std::to_string(x.coord) + "]"
                                   : "[" + std::to_string(x.coord) + ":1]") +
                       ".e" + std::to_string(i));

  auto act = [w, n, pts, d, dim, pN](const ZMat2& g_in) {
    const ZMat2 g = reduce(g_in, pN);
    FpMatrix m(dim, dim, w.p);
    for (std::size_t y = 0; y < pts->size(); ++y) {
      CosetDecomposition dec = coset_decompose(reduce((*pts)[y].rep() * g, pN), w.p, n);
      FpMatrix blk = sigma_n_matrix(dec.k0, w, n);
      const std::size_t col0 = dec.point.index() * d, row0 = y * d;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m(row0 + i, col0 + j) = blk(i, j);
    }
    return m;
  };
  return KRep(dim, p, N, act, std::move(labels));
}

struct InvariantsResult {
  FpMatrix basis;  // columns span the invariant subspace
  std::size_t dim = 0;
  unsigned verification_rounds = 0;
};

inline constexpr unsigned kVerificationSamples = 200;
inline constexpr unsigned kVerificationRetryCap = 5;

// Invariants of `rep` under the subgroup: kernel intersection over the cached
// generator matrices, fixed-point-verified against random members of the full
// congruence image.  A verification failure means the generator set was
// incomplete; the offenders join the generators and the computation repeats,
// up to a retry cap.
template <typename Rep>
InvariantsResult invariants(const Rep& rep, const SubgroupSpec& spec, std::mt19937_64& rng,
                            unsigned samples = kVerificationSamples) {
  const unsigned N = rep.level();
  std::vector<FpMatrix> mats = rep.generator_matrices(spec);
  FpMatrix basis = intersect_kernels(mats, rep.dim(), rep.modulus(), /*shifted=*/true);
  for (unsigned round = 0; round <= kVerificationRetryCap; ++round) {
    std::vector<ZMat2> failures;
    for (unsigned t = 0; t < samples; ++t) {
      ZMat2 g = random_member(spec, N, rng);
      if (!rep.fixes(g, basis)) failures.push_back(g);
    }
    if (failures.empty()) return {basis, basis.cols(), round};
    for (const ZMat2& g : failures) mats.push_back(rep.act(g));
    basis = intersect_kernels(mats, rep.dim(), rep.modulus(), /*shifted=*/true);
  }
  throw consistency_error("invariants: verification kept failing for " + spec.key() +
                          " (generator set bug)");
}

// Brute-force oracle: intersect kernels over EVERY element of the subgroup's
// image mod p^N.  Only feasible for small images; kept as the independent
// check of the generator-based engine.
template <typename Rep>
InvariantsResult invariants_full_enumeration(const Rep& rep, const SubgroupSpec& spec) {
  const unsigned N = rep.level();
  const std::uint64_t order = image_order(spec, N);
  if (order > 100000)
    throw cap_exceeded("invariants_full_enumeration: image order " + std::to_string(order) +
                       " exceeds 1e5");
  const std::uint64_t pN = pow_u64(spec.p, N);
  std::vector<ZMat2> gens = subgroup_generators(spec, N);
  auto key = [pN](const ZMat2& g) {
    return std::array<std::uint64_t, 4>{
        static_cast<std::uint64_t>(floor_mod(g.a, pN)), static_cast<std::uint64_t>(floor_mod(g.b, pN)),
        static_cast<std::uint64_t>(floor_mod(g.c, pN)), static_cast<std::uint64_t>(floor_mod(g.d, pN))};
  };
  std::map<std::array<std::uint64_t, 4>, ZMat2> seen;
  std::vector<ZMat2> frontier{ZMat2::identity()};
  seen.emplace(key(ZMat2::identity()), ZMat2::identity());
  while (!frontier.empty()) {
    std::vector<ZMat2> next;
    for (const ZMat2& g : frontier)
      for (const ZMat2& s : gens) {
        ZMat2 h = reduce(g * s, pN);
        if (seen.emplace(key(h), h).second) next.push_back(h);
      }
    frontier = std::move(next);
  }
  if (seen.size() != order)
    throw consistency_error("invariants_full_enumeration: closure size " +
                            std::to_string(seen.size()) + " != image order " +
                            std::to_string(order));
  FpMatrix basis = FpMatrix::identity(rep.dim(), rep.modulus());
  for (const auto& [k, g] : seen) {
    if (basis.cols() == 0) break;
    FpMatrix restricted = sub(mul(rep.act(g), basis), basis);
    basis = mul(basis, nullspace(restricted));
  }
  return {basis, basis.cols(), 0};
}

inline constexpr std::size_t kHomSystemCap = 100000;

// Basis of Hom_K(repA, repB): solutions X of X A(g) = B(g) X over the K
// generators at level N.  Each basis column is a vectorised db x da matrix
// with X[i][k] at position i*da + k.
inline FpMatrix hom_space_basis(const KRep& rep_a, const KRep& rep_b, unsigned N) {
  if (rep_a.modulus() != rep_b.modulus()) throw malformed_input("hom_space_basis: modulus mismatch");
  const std::size_t da = rep_a.dim(), db = rep_b.dim();
  const std::uint64_t p = rep_a.modulus();
  if (da * db > kHomSystemCap)
    throw cap_exceeded("hom_space_basis: " + std::to_string(da * db) + " unknowns exceed cap " +
                       std::to_string(kHomSystemCap));
  std::vector<ZMat2> gens = subgroup_generators(SubgroupSpec::K(p), N);
  FpMatrix sys(gens.size() * da * db, da * db, p);
  std::size_t base = 0;
  for (const ZMat2& g : gens) {
    const FpMatrix A = rep_a.act(g), B = rep_b.act(g);
    for (std::size_t i = 0; i < db; ++i)
      for (std::size_t j = 0; j < da; ++j) {
        const std::size_t row = base + i * da + j;
        for (std::size_t k = 0; k < da; ++k)
          sys(row, i * da + k) = static_cast<std::uint32_t>((sys(row, i * da + k) + A(k, j)) % p);
        for (std::size_t k = 0; k < db; ++k)
          sys(row, k * da + j) =
              static_cast<std::uint32_t>((sys(row, k * da + j) + p - B(i, k)) % p);
      }
    base += da * db;
  }
  return nullspace(sys);
}

inline std::size_t hom_space(const KRep& rep_a, const KRep& rep_b, unsigned N) {
  return hom_space_basis(rep_a, rep_b, N).cols();
}

// Reshape a vectorised intertwiner into its db x da matrix.
inline FpMatrix unvectorize_hom(const FpMatrix& column, std::size_t db, std::size_t da) {
  if (column.rows() != da * db || column.cols() != 1)
    throw malformed_input("unvectorize_hom: bad shape");
  FpMatrix X(db, da, column.modulus());
  for (std::size_t i = 0; i < db; ++i)
    for (std::size_t k = 0; k < da; ++k) X(i, k) = column(i * da + k, 0);
  return X;
}

}  // namespace gl2rep
