#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "gl2rep/growth.hpp"
#include "gl2rep/krep.hpp"
#include "gl2rep/pi_quotient.hpp"
#include "gl2rep/report.hpp"
#include "gl2rep/subgroups.hpp"

namespace gl2rep {

// Work queue over independent cells.  Each cell seeds its own RNG, so output
// bytes never depend on the thread count.
inline void parallel_cells(std::size_t count, unsigned threads,
                           const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::scoped_lock lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct TableRequest {
  std::string family;  // ind | barr | barr-h | ps-kn | ps-t1 | ss-kn | ss-t1
  std::uint64_t p = 5;
  unsigned r = 0;
  std::uint64_t lambda = 0;
  unsigned a = 0;
  unsigned n_lo = 1, n_hi = 1;
  std::optional<unsigned> m_override;
  std::optional<unsigned> N_override;
  unsigned threads = 1;
  std::uint64_t seed = 12345;
};

namespace detail {

inline void fill_common_params(Report& rep, const TableRequest& q) {
  rep.params["p"] = std::to_string(q.p);
  rep.params["r"] = std::to_string(q.r);
  rep.params["lambda"] = std::to_string(q.lambda);
  rep.params["a"] = std::to_string(q.a);
  rep.params["family"] = q.family;
  rep.params["n"] = std::to_string(q.n_lo) + ".." + std::to_string(q.n_hi);
  rep.params["seed"] = std::to_string(q.seed);
}

// Supersingular tables require r >= 1; r = 0 runs through the twin weight
// p-1-r (the twist is invisible on every subgroup used here).
inline unsigned effective_ss_r(const TableRequest& q, Report& rep) {
  if (q.lambda % q.p == 0 && q.r == 0) {
    rep.params["computed_via_r"] = std::to_string(q.p - 1);
    return static_cast<unsigned>(q.p - 1);
  }
  return q.r;
}

inline std::size_t dim_R(std::uint64_t p, unsigned r, unsigned k) {
  return k == 0 ? r + 1 : (r + 1) * (p + 1) * pow_u64(p, k - 1);
}

// Per-cell assertions for an invariant dimension: the Morra equality or the
// parity-summand bounds, containments, and the explicit linear-growth
// constants along the T1 route.
inline std::vector<Report::Check> invariant_cell_checks(const PiTruncation& pt,
                                                        const InvariantsResult& inv, unsigned n,
                                                        unsigned r_eff, std::uint64_t p,
                                                        bool subgroup_contains_kn,
                                                        bool supersingular, bool degenerate,
                                                        std::mt19937_64& rng) {
  std::vector<Report::Check> checks;
  auto tag = [&](const std::string& s) { return s + "_n" + std::to_string(n); };
  if (degenerate) {
    checks.push_back({tag("degenerate_parameters_reported"), "true", "true", true});
    return checks;
  }
  if (supersingular) {
    // Morra bound per parity summand, plus containment in R_bar_n + R_bar_{n+1}
    auto s = split_even_odd(pt);
    std::size_t d0 = intersection_dim(inv.basis, s.even);
    std::size_t d1 = intersection_dim(inv.basis, s.odd);
    const std::size_t morra = (p + 1) * pow_u64(p, n - 1);
    checks.push_back({tag("Pi0_le_(p+1)p^(n-1)"), "<= " + std::to_string(morra),
                      std::to_string(d0), d0 <= morra});
    checks.push_back({tag("Pi1_le_(p+1)p^(n-1)"), "<= " + std::to_string(morra),
                      std::to_string(d1), d1 <= morra});
    checks.push_back({tag("parity_split_adds_up"), std::to_string(inv.dim),
                      std::to_string(d0 + d1), d0 + d1 == inv.dim});
    if (subgroup_contains_kn) {
      bool contained = containment_check(pt, n, rng);
      checks.push_back({tag("contained_in_barRn+barRn+1"), "true", contained ? "true" : "false",
                        contained});
    } else {
      // T1 route: the 4 p^2 n bound and its H-invariant refinement, term-wise
      FpMatrix h_act = pt.act(ZMat2::diag(1, 1 + static_cast<int128>(p)));
      FpMatrix h_fixed = nullspace(sub(h_act, FpMatrix::identity(pt.dim(), p)));
      std::size_t hn = intersection_dim(pt.level_image(n), h_fixed);
      std::size_t hn1 = intersection_dim(pt.level_image(n + 1), h_fixed);
      const std::size_t bound = 4 * p * p * n;
      checks.push_back({tag("dim_le_barRn_H_plus_barRn+1_H"), "<= " + std::to_string(hn + hn1),
                        std::to_string(inv.dim), inv.dim <= hn + hn1});
      checks.push_back({tag("barRn_H_le_2dpn"), "<= " + std::to_string(2 * (r_eff + 1) * p * n),
                        std::to_string(hn), hn <= 2 * (r_eff + 1) * p * n});
      checks.push_back({tag("barRn+1_H_le_2dp(n+1)"),
                        "<= " + std::to_string(2 * (r_eff + 1) * p * (n + 1)),
                        std::to_string(hn1), hn1 <= 2 * (r_eff + 1) * p * (n + 1)});
      checks.push_back({tag("H_route_le_4p2n"), "<= " + std::to_string(bound),
                        std::to_string(hn + hn1), hn + hn1 <= bound});
      checks.push_back({tag("dim_le_4p2n"), "<= " + std::to_string(bound),
                        std::to_string(inv.dim), inv.dim <= bound});
    }
    return checks;
  }
  if (subgroup_contains_kn) {
    const std::size_t morra = (p + 1) * pow_u64(p, n - 1);
    checks.push_back({tag("morra_dim_(p+1)p^(n-1)"), std::to_string(morra),
                      std::to_string(inv.dim), inv.dim == morra});
    bool contained = columns_contained(pt.level_image(n), inv.basis);
    checks.push_back({tag("contained_in_barRn"), "true", contained ? "true" : "false", contained});
  } else {
    const std::size_t hbound = 2 * (r_eff + 1) * p * n;
    checks.push_back({tag("dim_le_2dpn"), "<= " + std::to_string(hbound), std::to_string(inv.dim),
                      inv.dim <= hbound});
    checks.push_back({tag("dim_le_4p2n"), "<= " + std::to_string(4 * p * p * n),
                      std::to_string(inv.dim), inv.dim <= 4 * p * p * n});
  }
  return checks;
}

}  // namespace detail

// Dimension tables for the named family, with the family's closed-form or
// bound checks attached.  Rows are deterministic in the request (seed
// included); cells may be computed in parallel.
inline Report dims_table(const TableRequest& q) {
  check_prime(q.p);
  if (q.n_hi < q.n_lo) throw malformed_input("dims_table: empty n range");
  Report rep;
  rep.command = "dims";
  detail::fill_common_params(rep, q);
  const std::size_t cells = q.n_hi - q.n_lo + 1;
  rep.rows.resize(cells);

  if (q.family == "ind") {
    if (q.n_lo < 1) throw malformed_input("ind: n >= 1 required");
    if (detail::dim_R(q.p, q.r, q.n_hi) > 1000000)
      throw cap_exceeded("ind: table dimension " + std::to_string(detail::dim_R(q.p, q.r, q.n_hi)) +
                         " exceeds 1e6");
    for (std::size_t i = 0; i < cells; ++i) {
      const unsigned n = q.n_lo + static_cast<unsigned>(i);
      KRep ind = induced_rep(Weight(q.p, q.r, q.a), n, n + 1);
      rep.rows[i] = {static_cast<long>(n), ind.dim(), std::nullopt};
    }
    for (std::size_t i = 0; i < cells; ++i) {
      const unsigned n = q.n_lo + static_cast<unsigned>(i);
      rep.add_check("ind_dim_formula_n" + std::to_string(n),
                    std::to_string(detail::dim_R(q.p, q.r, n)), std::to_string(rep.rows[i].dim));
    }
    return rep;
  }

  if (q.family == "barr" || q.family == "barr-h") {
    const unsigned r_eff = detail::effective_ss_r(q, rep);  // may substitute the twin weight
    const unsigned m = std::max(q.m_override.value_or(q.n_hi), std::max(q.n_hi, 1u));
    const unsigned N = std::max(q.N_override.value_or(m + 3), m + 3);
    if (pi_truncation_cost(q.p, r_eff, m) > kQuotientDimCap)
      throw cap_exceeded("barr: quotient dimension " +
                         std::to_string(pi_truncation_cost(q.p, r_eff, m)) + " exceeds cap " +
                         std::to_string(kQuotientDimCap));
    PiTruncation pt(Weight(q.p, r_eff, q.a), q.lambda, m, N);
    const bool degenerate = degenerate_parameters(pt.weight(), q.lambda);
    std::optional<FpMatrix> h_fixed;
    if (q.family == "barr-h") {
      FpMatrix h_act = pt.act(ZMat2::diag(1, 1 + static_cast<int128>(q.p)));
      h_fixed = nullspace(sub(h_act, FpMatrix::identity(pt.dim(), q.p)));
    }
    for (std::size_t i = 0; i < cells; ++i) {
      const unsigned k = q.n_lo + static_cast<unsigned>(i);
      if (k > m) throw malformed_input("barr: level k exceeds truncation m");
      std::size_t dim = q.family == "barr-h" ? intersection_dim(pt.level_image(k), *h_fixed)
                                             : rank(pt.level_image(k));
      rep.rows[i] = {static_cast<long>(k), dim, std::nullopt};
    }
    for (std::size_t i = 0; i < cells; ++i) {
      const unsigned k = q.n_lo + static_cast<unsigned>(i);
      if (q.family == "barr-h") {
        // H-invariants of a quotient of Ind sigma_k are bounded by 2 d p k
        // (level 0 sits inside level 2 for the chain bound when lambda = 0)
        const unsigned k_bound = std::max(k, 1u);
        rep.add_check_le("barrH_le_2dpn_k" + std::to_string(k), rep.rows[i].dim,
                         2 * (r_eff + 1) * q.p * k_bound);
      } else if (degenerate) {
        rep.add_check_bool("degenerate_parameters_reported_k" + std::to_string(k), true);
      } else if (q.lambda % q.p == 0) {
        rep.add_check("barR_dim_(r+1)p^k_k" + std::to_string(k),
                      std::to_string((r_eff + 1) * pow_u64(q.p, k)), std::to_string(rep.rows[i].dim));
      } else {
        rep.add_check("barR_dim_full_Rk_k" + std::to_string(k),
                      std::to_string(detail::dim_R(q.p, r_eff, k)), std::to_string(rep.rows[i].dim));
      }
    }
    return rep;
  }

  const bool is_kn = q.family == "ps-kn" || q.family == "ss-kn";
  const bool is_t1 = q.family == "ps-t1" || q.family == "ss-t1";
  if (!is_kn && !is_t1) throw malformed_input("dims_table: unknown family '" + q.family + "'");
  const bool supersingular = q.family[0] == 's';
  if (supersingular && q.lambda % q.p != 0)
    throw malformed_input(q.family + ": requires lambda = 0");
  if (!supersingular && q.lambda % q.p == 0)
    throw malformed_input(q.family + ": requires lambda != 0");
  if (q.n_lo < 1) throw malformed_input("invariant tables: n >= 1 required");

  const unsigned r_eff = detail::effective_ss_r(q, rep);
  {
    const unsigned m_max = q.m_override.value_or(q.n_hi + 1);
    if (pi_truncation_cost(q.p, r_eff, m_max) > kQuotientDimCap)
      throw cap_exceeded(q.family + ": quotient dimension " +
                         std::to_string(pi_truncation_cost(q.p, r_eff, m_max)) + " at n = " +
                         std::to_string(q.n_hi) + " exceeds cap " +
                         std::to_string(kQuotientDimCap));
  }
  const bool degenerate = degenerate_parameters(Weight(q.p, r_eff, q.a), q.lambda);

  std::vector<std::vector<Report::Check>> cell_checks(cells);
  parallel_cells(cells, q.threads, [&](std::size_t i) {
    const unsigned n = q.n_lo + static_cast<unsigned>(i);
    std::mt19937_64 rng(q.seed + 1000003 * n);
    const unsigned m = q.m_override.value_or(n + 1);
    const unsigned N = std::max(q.N_override.value_or(m + 3), m + 3);
    PiTruncation pt(Weight(q.p, r_eff, q.a), q.lambda, m, N);
    SubgroupSpec spec = is_kn ? SubgroupSpec::Kn(n, q.p) : SubgroupSpec::T1(n, q.p);
    auto inv = invariant_dims(pt, spec, rng);
    rep.rows[i] = {static_cast<long>(n), inv.dim, std::nullopt};
    cell_checks[i] =
        detail::invariant_cell_checks(pt, inv, n, r_eff, q.p, is_kn, supersingular, degenerate, rng);
  });
  for (auto& cc : cell_checks)
    for (auto& c : cc) rep.checks.push_back(std::move(c));
  return rep;
}

struct InvariantsRequest {
  std::uint64_t p = 5;
  unsigned r = 0;
  std::uint64_t lambda = 0;
  unsigned a = 0;
  std::string subgroup = "Kn";  // K | K0 | K1 | Kn | K1pn | T1
  unsigned n_lo = 1, n_hi = 1;
  std::optional<unsigned> m_override;
  std::optional<unsigned> N_override;
  bool stability = true;
  bool twist_check = false;  // lambda = 0, subgroup in K1: compare with p-1-r
  unsigned threads = 1;
  std::uint64_t seed = 12345;
};

inline SubgroupSpec subgroup_from_name(const std::string& name, unsigned n, std::uint64_t p) {
  if (name == "K") return SubgroupSpec::K(p);
  if (name == "K0") return SubgroupSpec::K0(n, p);
  if (name == "K1") return SubgroupSpec::K1(p);
  if (name == "Kn") return SubgroupSpec::Kn(n, p);
  if (name == "K1pn") return SubgroupSpec::K1pn(n, p);
  if (name == "T1") return SubgroupSpec::T1(n, p);
  if (name == "H") return SubgroupSpec::H(p);
  if (name == "Z1") return SubgroupSpec::Z1(p);
  throw malformed_input("unknown subgroup family '" + name + "'");
}

// Per-n invariant dimensions of pi(r, lambda, a) under the subgroup, with the
// closed-form and bound assertions of the parameter regime and a stability
// column (dimension unchanged under m -> m+1).  m = n+1, N = m+3 by default.
inline Report invariants_report(const InvariantsRequest& q) {
  check_prime(q.p);
  if (q.n_hi < q.n_lo || q.n_lo < 1) throw malformed_input("invariants: bad n range");
  Report rep;
  rep.command = "invariants";
  rep.params["p"] = std::to_string(q.p);
  rep.params["r"] = std::to_string(q.r);
  rep.params["lambda"] = std::to_string(q.lambda);
  rep.params["a"] = std::to_string(q.a);
  rep.params["subgroup"] = q.subgroup;
  rep.params["n"] = std::to_string(q.n_lo) + ".." + std::to_string(q.n_hi);
  rep.params["seed"] = std::to_string(q.seed);
  const bool supersingular = q.lambda % q.p == 0;

  unsigned r_eff = q.r;
  if (supersingular && q.r == 0) {
    r_eff = static_cast<unsigned>(q.p - 1);
    rep.params["computed_via_r"] = std::to_string(r_eff);
  }
  const Weight w(q.p, r_eff, q.a);
  const bool degenerate = degenerate_parameters(w, q.lambda);

  const std::size_t cells = q.n_hi - q.n_lo + 1;
  {
    const unsigned m_max = q.m_override.value_or(q.n_hi + 1) + (q.stability ? 1 : 0);
    if (pi_truncation_cost(q.p, r_eff, m_max) > kQuotientDimCap)
      throw cap_exceeded("invariants: quotient dimension " +
                         std::to_string(pi_truncation_cost(q.p, r_eff, m_max)) +
                         " (with stability recompute) exceeds cap " +
                         std::to_string(kQuotientDimCap) + "; pass a smaller n or disable stability");
  }
  rep.rows.resize(cells);
  std::vector<std::vector<Report::Check>> cell_checks(cells);
  parallel_cells(cells, q.threads, [&](std::size_t i) {
    const unsigned n = q.n_lo + static_cast<unsigned>(i);
    std::mt19937_64 rng(q.seed + 1000003 * n);
    const unsigned m = q.m_override.value_or(n + 1);
    const unsigned N = std::max(q.N_override.value_or(m + 3), m + 3);
    SubgroupSpec spec = subgroup_from_name(q.subgroup, n, q.p);
    PiTruncation pt(w, q.lambda, m, N);
    auto inv = invariant_dims(pt, spec, rng);
    std::optional<bool> stable;
    if (q.stability) {
      // self-auditing: the dimension must survive both a deeper truncation
      // and one more digit of working precision
      PiTruncation deeper(w, q.lambda, m + 1, std::max(N, m + 4));
      PiTruncation finer(w, q.lambda, m, N + 1);
      stable = invariant_dims(deeper, spec, rng).dim == inv.dim &&
               invariant_dims(finer, spec, rng).dim == inv.dim;
    }
    rep.rows[i] = {static_cast<long>(n), inv.dim, stable};
    // Morra equality / R_bar containment apply when the subgroup IS a K_n
    // (K1 = K_1 included); everything else gets the explicit bound route.
    const bool morra_family = spec.family == Family::Kn || spec.family == Family::K1group;
    cell_checks[i] = detail::invariant_cell_checks(pt, inv, spec.level() > 0 ? spec.level() : 1,
                                                   r_eff, q.p, morra_family, supersingular,
                                                   degenerate, rng);
    if (stable)
      cell_checks[i].push_back({"stable_under_m+1_n" + std::to_string(n), "true",
                                *stable ? "true" : "false", *stable});
    if (q.twist_check) {
      if (!supersingular || !spec.contained_in_K1())
        throw malformed_input("twist check needs lambda = 0 and a subgroup inside K1");
      bool ok = twist_symmetry_check(q.r, spec, n, q.p, rng);
      cell_checks[i].push_back({"twist_symmetry_r" + std::to_string(q.r) + "_vs_r" +
                                    std::to_string(q.p - 1 - q.r) + "_n" + std::to_string(n),
                                "true", ok ? "true" : "false", ok});
    }
  });
  for (auto& cc : cell_checks)
    for (auto& c : cc) rep.checks.push_back(std::move(c));
  return rep;
}

// dims_table plus growth exponents and the trend checks of the family.
inline Report growth_table(const TableRequest& q) {
  Report rep = dims_table(q);
  rep.command = "growth";
  if (rep.rows.size() >= 2) {
    std::vector<std::size_t> dims;
    for (const auto& row : rep.rows) dims.push_back(row.dim);
    auto ex = growth_exponent(dims, q.p);
    rep.exponents = ex.per_step;
    const bool invariant_family = q.family == "ps-kn" || q.family == "ps-t1" ||
                                  q.family == "ss-kn" || q.family == "ss-t1";
    if (invariant_family) {
      bool ok = true;
      for (const GrowthStep& s : ex.per_step)
        if (s.value > 1.0 + 1e-9) ok = false;
      rep.add_check_bool("per_step_exponent_le_1", ok);
    }
  }
  return rep;
}

}  // namespace gl2rep
