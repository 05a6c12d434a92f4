#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gl2rep/errors.hpp"
#include "gl2rep/fp_matrix.hpp"
#include "gl2rep/krep.hpp"
#include "gl2rep/pi_quotient.hpp"
#include "gl2rep/subgroups.hpp"

namespace gl2rep {

// ---------------------------------------------------------------------------
// Growth exponents

struct GrowthStep {
  bool exact;    // ratio is an exact power of p
  double value;  // log_p of the ratio (integer when exact)
};

struct GrowthExponents {
  std::vector<GrowthStep> per_step;
  GrowthStep final;
};

inline GrowthExponents growth_exponent(const std::vector<std::size_t>& dims, std::uint64_t p) {
  if (dims.size() < 2) throw malformed_input("growth_exponent: need at least 2 rows");
  for (std::size_t d : dims)
    if (d == 0) throw malformed_input("growth_exponent: dimensions must be positive");
  GrowthExponents out;
  auto p_power_exponent = [p](std::size_t q) -> std::optional<int> {
    int e = 0;
    while (q % p == 0) {
      q /= p;
      ++e;
    }
    return q == 1 ? std::optional<int>(e) : std::nullopt;
  };
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    std::size_t a = dims[i], b = dims[i + 1];
    GrowthStep step{false, std::log(static_cast<double>(b) / a) / std::log(static_cast<double>(p))};
    if (b % a == 0) {
      if (auto e = p_power_exponent(b / a)) step = {true, static_cast<double>(*e)};
    } else if (a % b == 0) {
      if (auto e = p_power_exponent(a / b)) step = {true, -static_cast<double>(*e)};
    }
    out.per_step.push_back(step);
  }
  out.final = out.per_step.back();
  return out;
}

// d_n <= C*n for rows indexed n = n_start, n_start+1, ...
inline bool check_linear_bound(const std::vector<std::size_t>& dims, double C,
                               unsigned n_start = 1) {
  if (C <= 0) throw malformed_input("check_linear_bound: C > 0 required");
  for (std::size_t i = 0; i < dims.size(); ++i)
    if (static_cast<double>(dims[i]) > C * (n_start + i)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Marshall filtration of the unique d-dimensional submodule of F[C_q], q = p^(n-1)

struct MarshallFiltration {
  std::vector<unsigned> alphas;  // non-increasing; sum of p^alpha(i) = d
  std::vector<std::size_t> subquotient_dims;
  bool verified = false;
};

// K1/K1(p^n) is cyclic of order q = p^(n-1); its group algebra is F[u]/(u^q)
// with u = t - 1, and the unique d-dimensional submodule is the ideal
// (u^(q-d)).  The filtration refines it along the base-p digits of d; each
// subquotient is verified cyclic with annihilator exactly u^(p^alpha), which
// pins it as the free rank-one module over the level-(alpha+1) quotient group.
inline MarshallFiltration marshall_filtration(std::size_t d, std::uint64_t p, unsigned n) {
  check_prime(p);
  if (n < 1) throw malformed_input("marshall_filtration: n >= 1 required");
  const std::size_t q = pow_u64(p, n - 1);
  if (d < 1 || d > q)
    throw malformed_input("marshall_filtration: d must lie in [1, p^(n-1)] = [1, " +
                          std::to_string(q) + "]");

  MarshallFiltration out;
  {
    std::size_t rest = d;
    std::size_t pk = 1;
    unsigned e = 0;
    while (pk * p <= rest) {
      pk *= p;
      ++e;
    }
    while (rest > 0) {
      while (pk > rest) {
        pk /= p;
        --e;
      }
      out.alphas.push_back(e);
      out.subquotient_dims.push_back(pk);
      rest -= pk;
    }
  }

  // Explicit verification in F[u]/(u^q).  Monomial positions are the exponent
  // of u; L_i = span{ u^(q - s_i), ..., u^(q-1) } with s_i the partial sums.
  // Multiplication by t = 1 + u sends u^k to u^k + u^(k+1).
  auto t_act = [&](const std::vector<std::uint32_t>& v) {
    std::vector<std::uint32_t> w(v);
    for (std::size_t k = q - 1; k >= 1; --k)
      w[k] = static_cast<std::uint32_t>((w[k] + v[k - 1]) % p);
    return w;
  };
  bool ok = true;
  std::size_t s_prev = 0;
  for (std::size_t i = 0; i < out.alphas.size(); ++i) {
    const std::size_t piece = out.subquotient_dims[i];
    const std::size_t s_i = s_prev + piece;
    // generator u^(q - s_i); subquotient coordinates mod L_{i-1} are the
    // monomial positions q-s_i .. q-s_prev-1 (dimension `piece`).
    std::vector<std::uint32_t> gen(q, 0);
    gen[q - s_i] = 1;
    // cyclic over the group algebra: the t-orbit of the generator spans
    FpMatrix span(piece, piece, p);
    std::vector<std::uint32_t> v = gen;
    for (std::size_t j = 0; j < piece; ++j) {
      for (std::size_t k = 0; k < piece; ++k) span(j, k) = v[q - s_i + k];
      v = t_act(v);
    }
    if (rank(span) != piece) ok = false;
    // after `piece` = p^alpha steps, t has returned to the generator mod
    // L_{i-1}: the subquotient is a module over the level-(alpha+1) quotient
    for (std::size_t k = 0; k < piece; ++k)
      if (v[q - s_i + k] != gen[q - s_i + k]) ok = false;
    // u^(piece-1) * gen survives mod L_{i-1}, so the annihilator is exactly
    // u^piece; its position must sit inside the coordinate window
    if (q - s_i + (piece - 1) != q - s_prev - 1) ok = false;
    s_prev = s_i;
  }
  if (s_prev != d) ok = false;
  for (std::size_t i = 0; i + 1 < out.alphas.size(); ++i)
    if (out.alphas[i] < out.alphas[i + 1]) ok = false;
  out.verified = ok;
  return out;
}

// ---------------------------------------------------------------------------
// Z_p cohomology of a finite-dimensional smooth representation

struct ZpCohomology {
  std::size_t h0;
  std::size_t h1;
};

// For a smooth Z_p-action (the generator u has p-power order), H^0 = ker(u-1)
// and H^1 = coker(u-1); the lemma asserts they have equal dimension.
inline ZpCohomology zp_cohomology(const FpMatrix& u) {
  if (u.rows() != u.cols()) throw malformed_input("zp_cohomology: square matrix required");
  const std::size_t n = u.rows();
  const std::uint64_t p = u.modulus();
  if (rank(u) != n) throw domain_error("zp_cohomology: matrix not invertible");
  // p-power order check: iterate u <- u^p a few times
  FpMatrix v = u;
  const FpMatrix id = FpMatrix::identity(n, p);
  bool found = (v == id);
  for (unsigned k = 0; k < 8 && !found; ++k) {
    FpMatrix w = v;
    for (std::uint64_t i = 1; i < p; ++i) w = mul(w, v);
    v = w;
    found = (v == id);
  }
  if (!found) throw domain_error("zp_cohomology: order of u is not a p-power");
  FpMatrix shifted = sub(u, id);
  std::size_t r = rank(shifted);
  return {nullspace(shifted).cols(), n - r};
}

// ---------------------------------------------------------------------------
// Product groups: invariants of Kronecker actions

inline constexpr std::size_t kKroneckerDimCap = 10000;
inline constexpr unsigned kProductVerificationSamples = 50;

struct ProductFactor {
  std::size_t dim;
  std::uint64_t p;
  unsigned N;
  SubgroupSpec spec;
  std::vector<FpMatrix> gen_mats;
  std::function<FpMatrix(const ZMat2&)> act;
  std::size_t invariant_dim;
};

inline ProductFactor factor_from_pi(const PiTruncation& pt, const SubgroupSpec& spec,
                                    std::mt19937_64& rng) {
  ProductFactor f{pt.dim(), pt.modulus(), pt.level(), spec, pt.generator_matrices(spec),
                  [pt](const ZMat2& g) { return pt.act(g); }, 0};
  f.invariant_dim = invariant_dims(pt, spec, rng).dim;
  return f;
}

inline ProductFactor trivial_factor(std::uint64_t p, const SubgroupSpec& spec, unsigned N) {
  return {1, p, N, spec, {FpMatrix::identity(1, p)},
          [p](const ZMat2&) { return FpMatrix::identity(1, p); }, 1};
}

struct ProductInvariants {
  std::size_t dim_kron;
  std::size_t dim_product;
};

// Invariants of the product group Gamma_1 x Gamma_2 acting on the tensor
// product, via the Kronecker matrices of the generator pairs (g, 1), (1, h);
// compared against the product of the per-factor invariant dimensions.
// Verification samples full pairs (g, h) and applies them through the reshape
// identity (g (x) h) vec(V) = vec(g V h^T) to avoid materializing big blocks.
inline ProductInvariants product_invariants(const ProductFactor& f1, const ProductFactor& f2,
                                            std::mt19937_64& rng) {
  if (f1.p != f2.p) throw malformed_input("product_invariants: modulus mismatch");
  const std::uint64_t p = f1.p;
  const std::size_t dim = f1.dim * f2.dim;
  if (dim > kKroneckerDimCap)
    throw cap_exceeded("product_invariants: Kronecker dimension " + std::to_string(dim) +
                       " exceeds cap " + std::to_string(kKroneckerDimCap) +
                       " (estimated elimination cost ~" + std::to_string(dim / 1000) + "^3 Gops)");
  std::vector<FpMatrix> mats;
  const FpMatrix id1 = FpMatrix::identity(f1.dim, p), id2 = FpMatrix::identity(f2.dim, p);
  for (const FpMatrix& g : f1.gen_mats) mats.push_back(kron(g, id2));
  for (const FpMatrix& h : f2.gen_mats) mats.push_back(kron(id1, h));
  FpMatrix basis = intersect_kernels(mats, dim, p, /*shifted=*/true);

  // sampled verification with genuine group pairs
  for (unsigned t = 0; t < kProductVerificationSamples; ++t) {
    FpMatrix g = f1.act(random_member(f1.spec, f1.N, rng));
    FpMatrix h_t = f2.act(random_member(f2.spec, f2.N, rng)).transpose();
    for (std::size_t c = 0; c < basis.cols(); ++c) {
      FpMatrix V(f1.dim, f2.dim, p);
      for (std::size_t i = 0; i < f1.dim; ++i)
        for (std::size_t j = 0; j < f2.dim; ++j) V(i, j) = basis(i * f2.dim + j, c);
      FpMatrix image = mul(mul(g, V), h_t);
      bool same = true;
      for (std::size_t i = 0; i < f1.dim && same; ++i)
        for (std::size_t j = 0; j < f2.dim && same; ++j)
          if (image(i, j) != V(i, j)) same = false;
      if (!same)
        throw consistency_error("product_invariants: sampled pair moved an invariant vector");
    }
  }
  return {basis.cols(), f1.invariant_dim * f2.invariant_dim};
}

}  // namespace gl2rep
