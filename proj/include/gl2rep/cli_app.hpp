#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gl2rep/dims_table.hpp"
#include "gl2rep/growth.hpp"
#include "gl2rep/p1_line.hpp"
#include "gl2rep/report.hpp"

namespace gl2rep::cli {

// The workbench pins p to the primes its feasibility grid was sized for.
inline void check_cli_prime(std::uint64_t p) {
  if (p != 5 && p != 7)
    throw CLI::ValidationError("--p", "p must be 5 or 7 (got " + std::to_string(p) + ")");
}

struct NRange {
  unsigned lo = 1, hi = 1;
};

inline NRange parse_range(const std::string& s) {
  auto dots = s.find("..");
  try {
    if (dots == std::string::npos) {
      unsigned v = static_cast<unsigned>(std::stoul(s));
      return {v, v};
    }
    NRange r{static_cast<unsigned>(std::stoul(s.substr(0, dots))),
             static_cast<unsigned>(std::stoul(s.substr(dots + 2)))};
    if (r.hi < r.lo) throw CLI::ValidationError("--n", "empty range " + s);
    return r;
  } catch (const std::invalid_argument&) {
    throw CLI::ValidationError("--n", "expected K or LO..HI, got " + s);
  } catch (const std::out_of_range&) {
    throw CLI::ValidationError("--n", "range value out of bounds in " + s);
  }
}

struct OutputOptions {
  std::string format = "json";
  std::string out_path;
};

inline void add_output_options(CLI::App* cmd, OutputOptions& oo, std::string& config_path) {
  cmd->add_option("--format", oo.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", oo.out_path, "write the report to PATH instead of stdout");
  cmd->add_option("--config", config_path, "plain key=value config file; flags take precedence");
}

// Expand `--config PATH` into `--key value` arguments for every key the user
// did not pass explicitly.  Lines are plain key=value; '#' starts a comment.
inline std::vector<std::string> expand_config_args(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream f(path);
  if (!f) throw malformed_input("cannot read config file: " + path);
  auto user_has = [&](const std::string& key) {
    const std::string flag = "--" + key;
    for (const std::string& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> out = args;
  std::string line;
  while (std::getline(f, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config" || user_has(key)) continue;
    if (value == "true" || value == "false") {  // flags
      if (value == "true") out.push_back("--" + key);
      continue;
    }
    out.push_back("--" + key);
    out.push_back(value);
  }
  return out;
}

inline int emit(const Report& rep, const OutputOptions& oo, std::ostream& out, std::ostream& err) {
  const std::string text = oo.format == "csv" ? to_csv(rep) : to_json(rep);
  if (!oo.out_path.empty()) {
    std::ofstream f(oo.out_path, std::ios::binary);
    if (!f) {
      err << "cannot open output file: " << oo.out_path << "\n";
      return 2;
    }
    f << text;
  } else {
    out << text;
  }
  if (!rep.all_pass()) {
    for (const auto& c : rep.checks)
      if (!c.pass) err << "FAIL " << c.name << ": expected " << c.expected << ", got " << c.actual
                       << "\n";
    return 1;
  }
  return 0;
}

inline unsigned thread_count(int flag_value) {
  if (flag_value > 0) return static_cast<unsigned>(flag_value);
  if (const char* env = std::getenv("GL2REP_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

inline Report cosets_report(std::uint64_t p, NRange range) {
  Report rep;
  rep.command = "verify cosets";
  rep.params["p"] = std::to_string(p);
  rep.params["family"] = "cosets";
  rep.params["n"] = std::to_string(range.lo) + ".." + std::to_string(range.hi);
  for (unsigned n = range.lo; n <= range.hi; ++n) {
    std::size_t count = double_coset_count(p, n);
    rep.rows.push_back({static_cast<long>(n), count, std::nullopt});
    rep.add_check("coset_count_(2n-1)(p-1)+2_n" + std::to_string(n),
                  std::to_string((2 * n - 1) * (p - 1) + 2), std::to_string(count));
  }
  return rep;
}

inline Report hecke_report(std::uint64_t p, unsigned r, unsigned m, std::optional<unsigned> N_opt,
                           std::uint64_t seed) {
  Report rep;
  rep.command = "hecke";
  rep.params["p"] = std::to_string(p);
  rep.params["r"] = std::to_string(r);
  rep.params["family"] = "hecke";
  rep.params["m"] = std::to_string(m);
  rep.params["seed"] = std::to_string(seed);
  const unsigned N = std::max(N_opt.value_or(m + 3), m + 3);
  const Weight w(p, r);
  if (pi_truncation_cost(p, r, m) > kQuotientDimCap)
    throw cap_exceeded("hecke: truncation level dimension " +
                       std::to_string(pi_truncation_cost(p, r, m)) + " exceeds cap");
  TruncatedCInd V(w, m, N);
  FpMatrix T = hecke_matrix(V);
  for (unsigned k = 0; k <= m; ++k)
    rep.rows.push_back({static_cast<long>(k), V.level_dim(k), std::nullopt});

  std::mt19937_64 rng(seed);
  const std::size_t Dm1 = T.cols();
  bool equivariant = true;
  for (int t = 0; t < 20 && equivariant; ++t) {
    ZMat2 g = random_member(SubgroupSpec::K(p), N, rng);
    FpMatrix big = V.act(g);
    FpMatrix small(Dm1, Dm1, p);
    for (std::size_t i = 0; i < Dm1; ++i)
      for (std::size_t j = 0; j < Dm1; ++j) small(i, j) = big(i, j);
    equivariant = mul(big, T) == mul(T, small);
  }
  rep.add_check_bool("K_equivariance_20_random", equivariant);
  for (unsigned k = 0; k + 1 <= m - 1; ++k)
    rep.add_check("rank_Tplus_R" + std::to_string(k), std::to_string(V.level_dim(k)),
                  std::to_string(rank(hecke_plus_block(V, T, k))));
  for (unsigned k = 1; k <= m - 1; ++k)
    rep.add_check("rank_Tminus_R" + std::to_string(k), std::to_string(V.level_dim(k - 1)),
                  std::to_string(rank(hecke_minus_block(V, T, k))));
  for (std::uint64_t lam = 0; lam < p; ++lam) {
    FpMatrix shifted = T;
    for (std::size_t c = 0; c < Dm1; ++c)
      shifted(c, c) = static_cast<std::uint32_t>((shifted(c, c) + p - lam) % p);
    rep.add_check("ker_T_minus_" + std::to_string(lam) + "_trivial", "0",
                  std::to_string(nullspace(shifted).cols()));
  }
  if (r == 0) {
    std::size_t ones = 0, other = 0;
    for (std::size_t i = 0; i < T.rows(); ++i) {
      if (T(i, 0) == 1) ++ones;
      else if (T(i, 0) != 0) ++other;
    }
    rep.add_check("adjacency_column_weight", std::to_string(p + 1),
                  std::to_string(ones + 100 * other));
  }
  return rep;
}

inline Report filtration_report(std::uint64_t p, std::optional<std::size_t> d, unsigned n,
                                unsigned count, std::uint64_t seed) {
  Report rep;
  rep.command = "filtration";
  rep.params["p"] = std::to_string(p);
  rep.params["family"] = "filtration";
  rep.params["n"] = std::to_string(n);
  rep.params["seed"] = std::to_string(seed);
  if (d) {
    rep.params["d"] = std::to_string(*d);
    auto f = marshall_filtration(*d, p, n);
    for (std::size_t i = 0; i < f.alphas.size(); ++i)
      rep.rows.push_back({static_cast<long>(i + 1), f.subquotient_dims[i], std::nullopt});
    rep.add_check_bool("filtration_verified", f.verified);
    std::size_t total = 0;
    for (auto piece : f.subquotient_dims) total += piece;
    rep.add_check("subquotients_sum_to_d", std::to_string(*d), std::to_string(total));
    return rep;
  }
  rep.params["count"] = std::to_string(count);
  std::mt19937_64 rng(seed);
  unsigned passed = 0;
  for (unsigned t = 0; t < count; ++t) {
    unsigned nn = 1 + static_cast<unsigned>(rng() % n);
    std::size_t q = pow_u64(p, nn - 1);
    std::size_t dd = 1 + rng() % q;
    if (marshall_filtration(dd, p, nn).verified) ++passed;
  }
  rep.add_check("random_filtrations_verified", std::to_string(count) + "/" + std::to_string(count),
                std::to_string(passed) + "/" + std::to_string(count));
  return rep;
}

inline Report zp_report(std::uint64_t p, unsigned count, std::uint64_t seed) {
  Report rep;
  rep.command = "zp";
  rep.params["p"] = std::to_string(p);
  rep.params["family"] = "zp";
  rep.params["count"] = std::to_string(count);
  rep.params["seed"] = std::to_string(seed);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> entry(0, static_cast<std::uint32_t>(p - 1));
  unsigned passed = 0;
  for (unsigned t = 0; t < count; ++t) {
    std::size_t nn = 1 + rng() % 6;
    FpMatrix u = FpMatrix::identity(nn, p);
    for (std::size_t i = 0; i < nn; ++i)
      for (std::size_t j = i + 1; j < nn; ++j) u(i, j) = entry(rng);
    // random conjugation
    FpMatrix g(nn, nn, p);
    do {
      for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t j = 0; j < nn; ++j) g(i, j) = entry(rng);
    } while (rank(g) != nn);
    FpMatrix aug(nn, 2 * nn, p);
    for (std::size_t i = 0; i < nn; ++i) {
      for (std::size_t j = 0; j < nn; ++j) aug(i, j) = g(i, j);
      aug(i, nn + i) = 1;
    }
    auto e = rref(aug);
    FpMatrix ginv(nn, nn, p);
    for (std::size_t i = 0; i < nn; ++i)
      for (std::size_t j = 0; j < nn; ++j) ginv(i, j) = e.R(i, nn + j);
    auto c = zp_cohomology(mul(mul(g, u), ginv));
    if (c.h0 == c.h1) ++passed;
  }
  rep.add_check("h0_equals_h1", std::to_string(count) + "/" + std::to_string(count),
                std::to_string(passed) + "/" + std::to_string(count));
  return rep;
}

inline Report product_report(std::uint64_t p, const std::vector<unsigned>& rs,
                             const std::vector<std::uint64_t>& lambdas,
                             const std::vector<unsigned>& as,
                             const std::vector<std::string>& subgroups,
                             const std::vector<unsigned>& ns, std::uint64_t seed) {
  if (rs.size() != 2 || lambdas.size() != 2 || subgroups.size() != 2 || ns.size() != 2 ||
      as.size() != 2)
    throw malformed_input("product: exactly two factors required (comma-separated parameters)");
  Report rep;
  rep.command = "product";
  rep.params["p"] = std::to_string(p);
  rep.params["family"] = "product";
  rep.params["r"] = std::to_string(rs[0]) + "," + std::to_string(rs[1]);
  rep.params["lambda"] = std::to_string(lambdas[0]) + "," + std::to_string(lambdas[1]);
  rep.params["a"] = std::to_string(as[0]) + "," + std::to_string(as[1]);
  rep.params["subgroup"] = subgroups[0] + "," + subgroups[1];
  rep.params["n"] = std::to_string(ns[0]) + "," + std::to_string(ns[1]);
  rep.params["seed"] = std::to_string(seed);
  std::mt19937_64 rng(seed);
  std::vector<ProductFactor> factors;
  for (int i = 0; i < 2; ++i) {
    const unsigned m = ns[i] + 1;
    unsigned r_eff = rs[i];
    if (lambdas[i] % p == 0 && r_eff == 0) r_eff = static_cast<unsigned>(p - 1);
    PiTruncation pt(Weight(p, r_eff, as[i]), lambdas[i], m, m + 3);
    factors.push_back(factor_from_pi(pt, subgroup_from_name(subgroups[i], ns[i], p), rng));
    rep.rows.push_back({i + 1, factors.back().invariant_dim, std::nullopt});
  }
  auto out = product_invariants(factors[0], factors[1], rng);
  rep.add_check("kron_equals_product", std::to_string(out.dim_product),
                std::to_string(out.dim_kron));
  return rep;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"exact mod-p workbench for smooth GL2(Q_p) representations at finite level"};
  app.require_subcommand(1);

  // shared option state
  std::uint64_t p = 5, lambda = 0, seed = 12345;
  unsigned r = 0, a = 0, m_flag = 0;
  int threads_flag = 0;
  std::string n_str = "1", family, subgroup = "Kn";
  std::optional<unsigned> m_opt, N_opt;
  bool no_stability = false, twist_check = false;
  unsigned zp_count = 100, filt_count = 0;
  std::optional<std::size_t> filt_d;
  std::vector<unsigned> rs, as_list, ns;
  std::vector<std::uint64_t> lambdas;
  std::vector<std::string> subgroups;
  std::string config_path;
  OutputOptions oo_verify, oo_dims, oo_inv, oo_hecke, oo_growth, oo_filt, oo_zp, oo_prod;

  auto add_p = [&](CLI::App* cmd) { cmd->add_option("--p", p, "prime (5 or 7)"); };
  auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--seed", seed, "RNG seed"); };
  auto add_mn = [&](CLI::App* cmd) {
    cmd->add_option("--m", m_flag, "truncation override");
    cmd->add_option_function<unsigned>("--N", [&](unsigned v) { N_opt = v; }, "precision override");
  };

  CLI::App* verify = app.add_subcommand("verify", "verify closed formulas");
  CLI::App* cosets = verify->add_subcommand("cosets", "double-coset counts vs (2n-1)(p-1)+2");
  add_p(cosets);
  cosets->add_option("--n", n_str, "level or range LO..HI");
  add_output_options(cosets, oo_verify, config_path);

  CLI::App* dims = app.add_subcommand("dims", "dimension tables by family");
  add_p(dims);
  dims->add_option("--family", family, "ind | barr | barr-h | ps-kn | ps-t1 | ss-kn | ss-t1")
      ->required();
  dims->add_option("--r", r, "symmetric power degree");
  dims->add_option("--lambda", lambda, "Hecke eigenvalue in F_p");
  dims->add_option("--a", a, "determinant twist exponent");
  dims->add_option("--n", n_str, "level or range LO..HI");
  dims->add_option("--threads", threads_flag, "worker threads (or GL2REP_THREADS)");
  add_seed(dims);
  add_mn(dims);
  add_output_options(dims, oo_dims, config_path);

  CLI::App* inv = app.add_subcommand("invariants", "invariant dimensions with bound checks");
  add_p(inv);
  inv->add_option("--r", r, "symmetric power degree");
  inv->add_option("--lambda", lambda, "Hecke eigenvalue in F_p");
  inv->add_option("--a", a, "determinant twist exponent");
  inv->add_option("--subgroup", subgroup, "K | K0 | K1 | Kn | K1pn | T1");
  inv->add_option("--n", n_str, "level or range LO..HI");
  inv->add_flag("--no-stability", no_stability, "skip the m+1 stability recompute");
  inv->add_flag("--twist-check", twist_check, "also check dim equality against r' = p-1-r");
  inv->add_option("--threads", threads_flag, "worker threads (or GL2REP_THREADS)");
  add_seed(inv);
  add_mn(inv);
  add_output_options(inv, oo_inv, config_path);

  CLI::App* hecke = app.add_subcommand("hecke", "Hecke operator structure checks");
  add_p(hecke);
  hecke->add_option("--r", r, "symmetric power degree");
  hecke->add_option("--m", m_flag, "truncation (default 3)");
  add_seed(hecke);
  hecke->add_option_function<unsigned>("--N", [&](unsigned v) { N_opt = v; }, "precision override");
  add_output_options(hecke, oo_hecke, config_path);

  CLI::App* growth = app.add_subcommand("growth", "dimension tables with growth exponents");
  add_p(growth);
  growth->add_option("--family", family, "ind | barr | barr-h | ps-kn | ps-t1 | ss-kn | ss-t1")
      ->required();
  growth->add_option("--r", r, "symmetric power degree");
  growth->add_option("--lambda", lambda, "Hecke eigenvalue in F_p");
  growth->add_option("--a", a, "determinant twist exponent");
  growth->add_option("--n", n_str, "level or range LO..HI");
  growth->add_option("--threads", threads_flag, "worker threads (or GL2REP_THREADS)");
  add_seed(growth);
  add_mn(growth);
  add_output_options(growth, oo_growth, config_path);

  CLI::App* filt = app.add_subcommand("filtration", "group-algebra submodule filtrations");
  add_p(filt);
  filt->add_option_function<std::size_t>("--d", [&](std::size_t v) { filt_d = v; },
                                         "submodule dimension");
  filt->add_option("--n", n_str, "congruence level (modulus exponent)");
  filt->add_option("--count", filt_count, "random trials when --d is absent");
  add_seed(filt);
  add_output_options(filt, oo_filt, config_path);

  CLI::App* zp = app.add_subcommand("zp", "H^0 = H^1 on random smooth Z_p actions");
  add_p(zp);
  zp->add_option("--count", zp_count, "number of random unipotents");
  add_seed(zp);
  add_output_options(zp, oo_zp, config_path);

  CLI::App* prod = app.add_subcommand("product", "two-factor Kronecker invariants");
  add_p(prod);
  prod->add_option("--r", rs, "two degrees, comma separated")->delimiter(',');
  prod->add_option("--lambda", lambdas, "two eigenvalues, comma separated")->delimiter(',');
  prod->add_option("--a", as_list, "two twists, comma separated")->delimiter(',');
  prod->add_option("--subgroup", subgroups, "two subgroup families")->delimiter(',');
  prod->add_option("--n", ns, "two levels")->delimiter(',');
  add_seed(prod);
  add_output_options(prod, oo_prod, config_path);

  try {
    std::vector<std::string> expanded = expand_config_args(args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << e.what() << "\n";
    return 2;
  } catch (const malformed_input& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    check_cli_prime(p);
    if (m_flag > 0) m_opt = m_flag;
    const unsigned threads = thread_count(threads_flag);
    if (cosets->parsed()) return emit(cosets_report(p, parse_range(n_str)), oo_verify, out, err);
    if (dims->parsed() || growth->parsed()) {
      TableRequest q;
      q.family = family;
      q.p = p;
      q.r = r;
      q.lambda = lambda % p;
      q.a = a;
      NRange range = parse_range(n_str);
      q.n_lo = range.lo;
      q.n_hi = range.hi;
      q.m_override = m_opt;
      q.N_override = N_opt;
      q.threads = threads;
      q.seed = seed;
      return emit(dims->parsed() ? dims_table(q) : growth_table(q),
                  dims->parsed() ? oo_dims : oo_growth, out, err);
    }
    if (inv->parsed()) {
      InvariantsRequest q;
      q.p = p;
      q.r = r;
      q.lambda = lambda % p;
      q.a = a;
      q.subgroup = subgroup;
      NRange range = parse_range(n_str);
      q.n_lo = range.lo;
      q.n_hi = range.hi;
      q.m_override = m_opt;
      q.N_override = N_opt;
      q.stability = !no_stability;
      q.twist_check = twist_check;
      q.threads = threads;
      q.seed = seed;
      return emit(invariants_report(q), oo_inv, out, err);
    }
    if (hecke->parsed())
      return emit(hecke_report(p, r, m_flag > 0 ? m_flag : 3, N_opt, seed), oo_hecke, out, err);
    if (filt->parsed()) {
      NRange range = parse_range(n_str);
      if (!filt_d && filt_count == 0)
        throw malformed_input("filtration: pass --d or --count");
      return emit(filtration_report(p, filt_d, range.hi, filt_count, seed), oo_filt, out, err);
    }
    if (zp->parsed()) return emit(zp_report(p, zp_count, seed), oo_zp, out, err);
    if (prod->parsed()) {
      if (as_list.empty()) as_list = {0, 0};
      return emit(product_report(p, rs, lambdas, as_list, subgroups, ns, seed), oo_prod, out, err);
    }
    err << "no subcommand\n";
    return 2;
  } catch (const CLI::Error& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const cap_exceeded& e) {
    err << "refused: " << e.what() << "\n";
    return 2;
  } catch (const malformed_input& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const precision_error& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const gl2rep::domain_error& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const consistency_error& e) {
    err << "internal consistency failure: " << e.what() << "\n";
    return 1;
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace gl2rep::cli
