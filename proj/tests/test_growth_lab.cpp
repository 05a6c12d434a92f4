#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gl2rep/growth.hpp"

using namespace gl2rep;

namespace {

FpMatrix random_unipotent(std::size_t n, std::uint64_t p, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> d(0, static_cast<std::uint32_t>(p - 1));
  FpMatrix u = FpMatrix::identity(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) u(i, j) = d(rng);
  // conjugate by a random invertible matrix to hide the triangular shape
  FpMatrix g(n, n, p);
  do {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g(i, j) = d(rng);
  } while (rank(g) != n);
  // g^-1 via solving g X = I: nullspace trick is overkill; use rref on [g | I]
  FpMatrix aug(n, 2 * n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = g(i, j);
    aug(i, n + i) = 1;
  }
  auto e = rref(aug);
  FpMatrix ginv(n, n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ginv(i, j) = e.R(i, n + j);
  return mul(mul(g, u), ginv);
}

}  // namespace

TEST_CASE("growth exponents") {
  auto e = growth_exponent({6, 30, 150}, 5);
  REQUIRE(e.per_step.size() == 2);
  CHECK(e.per_step[0].exact);
  CHECK(e.per_step[0].value == 1.0);
  CHECK(e.final.exact);
  CHECK(e.final.value == 1.0);

  auto c = growth_exponent({4, 4, 4}, 5);
  CHECK(c.final.exact);
  CHECK(c.final.value == 0.0);

  auto b = growth_exponent({2, 10, 50}, 5);
  CHECK(b.final.exact);
  CHECK(b.final.value == 1.0);

  auto shrink = growth_exponent({50, 10}, 5);
  CHECK(shrink.final.exact);
  CHECK(shrink.final.value == -1.0);

  auto inexact = growth_exponent({2, 6}, 5);
  CHECK(!inexact.final.exact);
  CHECK(inexact.final.value == Catch::Approx(std::log(3.0) / std::log(5.0)));

  CHECK_THROWS_AS(growth_exponent({4}, 5), malformed_input);
  CHECK_THROWS_AS(growth_exponent({4, 0}, 5), malformed_input);
}

TEST_CASE("linear bound checks") {
  CHECK(check_linear_bound({1, 2, 3}, 1.0));
  CHECK(check_linear_bound({100, 200, 300}, 100.0));
  CHECK(!check_linear_bound({101, 200}, 100.0));
  CHECK(!check_linear_bound({1, 2, 7}, 2.0));
  CHECK_THROWS_AS(check_linear_bound({1}, 0.0), malformed_input);
}

TEST_CASE("marshall filtration") {
  SECTION("base-p digits, frozen examples") {
    auto f = marshall_filtration(7, 5, 3);
    CHECK(f.alphas == std::vector<unsigned>{1, 0, 0});
    CHECK(f.subquotient_dims == std::vector<std::size_t>{5, 1, 1});
    CHECK(f.verified);

    auto full = marshall_filtration(25, 5, 3);
    CHECK(full.alphas == std::vector<unsigned>{2});
    CHECK(full.verified);

    auto f13 = marshall_filtration(13, 5, 3);
    CHECK(f13.alphas == std::vector<unsigned>{1, 1, 0, 0, 0});
    CHECK(f13.verified);
  }

  SECTION("out-of-range d is rejected") {
    CHECK_THROWS_AS(marshall_filtration(0, 5, 3), malformed_input);
    CHECK_THROWS_AS(marshall_filtration(26, 5, 3), malformed_input);
  }

  SECTION("50 random (d, n <= 4) at p = 5") {
    std::mt19937_64 rng(404);
    for (int t = 0; t < 50; ++t) {
      unsigned n = 1 + static_cast<unsigned>(rng() % 4);
      std::size_t q = pow_u64(5, n - 1);
      std::size_t d = 1 + rng() % q;
      auto f = marshall_filtration(d, 5, n);
      CHECK(f.verified);
      std::size_t total = 0;
      for (std::size_t piece : f.subquotient_dims) total += piece;
      CHECK(total == d);
    }
  }
}

TEST_CASE("Z_p cohomology") {
  SECTION("identity on F^2") {
    auto c = zp_cohomology(FpMatrix::identity(2, 5));
    CHECK(c.h0 == 2);
    CHECK(c.h1 == 2);
  }

  SECTION("2x2 Jordan block") {
    auto c = zp_cohomology(FpMatrix::from_rows(5, {{1, 1}, {0, 1}}));
    CHECK(c.h0 == 1);
    CHECK(c.h1 == 1);
  }

  SECTION("non-p-power order is rejected") {
    CHECK_THROWS_AS(zp_cohomology(FpMatrix::from_rows(5, {{2, 0}, {0, 1}})), gl2rep::domain_error);
    CHECK_THROWS_AS(zp_cohomology(FpMatrix(2, 2, 5)), gl2rep::domain_error);  // singular
  }

  SECTION("h0 = h1 on 100 random unipotents of sizes 1..6") {
    std::mt19937_64 rng(777);
    for (int t = 0; t < 100; ++t) {
      std::size_t n = 1 + rng() % 6;
      auto c = zp_cohomology(random_unipotent(n, 5, rng));
      CHECK(c.h0 == c.h1);
      CHECK(c.h0 >= 1);
    }
  }
}

TEST_CASE("product invariants") {
  std::mt19937_64 rng(31337);

  SECTION("trivial factor is a unit") {
    PiTruncation pt(Weight(5, 1), 1, 2, 5);
    auto f1 = trivial_factor(5, SubgroupSpec::K1(5), 5);
    auto f2 = factor_from_pi(pt, SubgroupSpec::K1(5), rng);
    auto out = product_invariants(f1, f2, rng);
    CHECK(out.dim_kron == out.dim_product);
    CHECK(out.dim_kron == 6);
  }

  SECTION("two principal series factors multiply: 6 * 6 = 36") {
    PiTruncation a(Weight(5, 1), 1, 2, 5);
    PiTruncation b(Weight(5, 2), 1, 2, 5);
    auto f1 = factor_from_pi(a, SubgroupSpec::K1(5), rng);
    auto f2 = factor_from_pi(b, SubgroupSpec::K1(5), rng);
    REQUIRE(f1.invariant_dim == 6);
    REQUIRE(f2.invariant_dim == 6);
    auto out = product_invariants(f1, f2, rng);
    CHECK(out.dim_kron == 36);
    CHECK(out.dim_product == 36);
  }

  SECTION("supersingular times principal series") {
    PiTruncation ss(Weight(5, 1), 0, 2, 5);
    PiTruncation ps(Weight(5, 1), 1, 2, 5);
    auto f1 = factor_from_pi(ss, SubgroupSpec::K1(5), rng);
    auto f2 = factor_from_pi(ps, SubgroupSpec::T1(1, 5), rng);
    auto out = product_invariants(f1, f2, rng);
    CHECK(out.dim_kron == out.dim_product);
    CHECK(out.dim_kron == f1.invariant_dim * 6);
  }

  SECTION("cap is enforced with a cost estimate") {
    PiTruncation big(Weight(5, 3), 1, 3, 6);  // dim 720
    auto f = factor_from_pi(big, SubgroupSpec::K1(5), rng);
    CHECK_THROWS_AS(product_invariants(f, f, rng), cap_exceeded);
  }
}
