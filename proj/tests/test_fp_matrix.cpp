#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gl2rep/fp_matrix.hpp"

using namespace gl2rep;

namespace {

FpMatrix random_matrix(std::size_t r, std::size_t c, std::uint64_t p, std::mt19937_64& rng) {
  FpMatrix m(r, c, p);
  std::uniform_int_distribution<std::uint32_t> d(0, static_cast<std::uint32_t>(p - 1));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

}  // namespace

TEST_CASE("rref basics") {
  SECTION("proportional rows have rank 1") {
    auto m = FpMatrix::from_rows(5, {{2, 4}, {1, 2}});
    auto e = rref(m);
    CHECK(e.rank == 1);
    CHECK(e.pivots == std::vector<std::size_t>{0});
  }
  SECTION("zero matrix") {
    FpMatrix z(3, 3, 5);
    auto e = rref(z);
    CHECK(e.rank == 0);
    CHECK(e.R.is_zero());
  }
  SECTION("identity") {
    auto id = FpMatrix::identity(4, 7);
    auto e = rref(id);
    CHECK(e.rank == 4);
    CHECK(e.pivots == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK(e.R == id);
  }
  SECTION("rref is idempotent on random matrices") {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 25; ++t) {
      auto m = random_matrix(6, 9, 5, rng);
      auto e = rref(m);
      CHECK(rref(e.R).R == e.R);
    }
  }
}

TEST_CASE("nullspace") {
  SECTION("zero 2x2 has full kernel") {
    FpMatrix z(2, 2, 5);
    CHECK(nullspace(z).cols() == 2);
  }
  SECTION("identity has trivial kernel") {
    CHECK(nullspace(FpMatrix::identity(3, 5)).cols() == 0);
  }
  SECTION("x + y = 0 over F_5") {
    auto m = FpMatrix::from_rows(5, {{1, 1}});
    auto k = nullspace(m);
    REQUIRE(k.cols() == 1);
    // Kernel is the line through (1, 4).
    auto line = FpMatrix::from_rows(5, {{1}, {4}});
    CHECK(intersection_dim(k, line) == 1);
  }
  SECTION("rank-nullity and M*kernel = 0 on random matrices") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 25; ++t) {
      auto m = random_matrix(5, 8, 7, rng);
      auto k = nullspace(m);
      CHECK(rank(m) + k.cols() == m.cols());
      CHECK(mul(m, k).is_zero());
    }
  }
}

TEST_CASE("intersect_kernels") {
  SECTION("empty list gives full space") {
    std::vector<FpMatrix> none;
    CHECK(intersect_kernels(none, 4, 5, true).cols() == 4);
  }
  SECTION("identity fixes everything") {
    std::vector<FpMatrix> mats{FpMatrix::identity(3, 5)};
    CHECK(intersect_kernels(mats, 3, 5, true).cols() == 3);
  }
  SECTION("two diagonals with no common fixed vector") {
    std::vector<FpMatrix> mats{FpMatrix::from_rows(5, {{2, 0}, {0, 1}}),
                               FpMatrix::from_rows(5, {{1, 0}, {0, 3}})};
    CHECK(intersect_kernels(mats, 2, 5, true).cols() == 0);
  }
  SECTION("results are fixed by every input matrix") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 10; ++t) {
      std::vector<FpMatrix> mats;
      for (int i = 0; i < 3; ++i) mats.push_back(random_matrix(6, 6, 5, rng));
      auto b = intersect_kernels(mats, 6, 5, true);
      for (const auto& m : mats) CHECK(mul(m, b) == b);
      auto b0 = intersect_kernels(mats, 6, 5, false);
      for (const auto& m : mats) CHECK(mul(m, b0).is_zero());
    }
  }
  SECTION("size mismatch is rejected") {
    std::vector<FpMatrix> mats{FpMatrix::identity(3, 5)};
    CHECK_THROWS_AS(intersect_kernels(mats, 4, 5, true), malformed_input);
  }
}

TEST_CASE("kron") {
  SECTION("identities") {
    CHECK(kron(FpMatrix::identity(2, 5), FpMatrix::identity(3, 5)) == FpMatrix::identity(6, 5));
  }
  SECTION("shape") {
    std::mt19937_64 rng(1);
    auto a = random_matrix(2, 2, 5, rng);
    auto b = random_matrix(3, 3, 5, rng);
    auto c = kron(a, b);
    CHECK(c.rows() == 6);
    CHECK(c.cols() == 6);
  }
  SECTION("rank is multiplicative") {
    auto a = FpMatrix::from_rows(5, {{1, 2}, {2, 4}});  // rank 1
    auto b = FpMatrix::from_rows(5, {{1, 0, 1}, {0, 1, 0}, {2, 0, 2}});  // rank 2
    REQUIRE(rank(a) == 1);
    REQUIRE(rank(b) == 2);
    CHECK(rank(kron(a, b)) == 2);

    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
      auto x = random_matrix(3, 4, 7, rng);
      auto y = random_matrix(2, 3, 7, rng);
      CHECK(rank(kron(x, y)) == rank(x) * rank(y));
    }
  }
  SECTION("bilinear in each argument") {
    std::mt19937_64 rng(5);
    auto a1 = random_matrix(2, 2, 5, rng), a2 = random_matrix(2, 2, 5, rng);
    auto b = random_matrix(2, 2, 5, rng);
    CHECK(kron(add(a1, a2), b) == add(kron(a1, b), kron(a2, b)));
    CHECK(kron(b, add(a1, a2)) == add(kron(b, a1), kron(b, a2)));
  }
  SECTION("modulus mismatch is rejected") {
    CHECK_THROWS_AS(kron(FpMatrix::identity(2, 5), FpMatrix::identity(2, 7)), malformed_input);
  }
}

TEST_CASE("mixed moduli and bad scalars are rejected") {
  CHECK_THROWS_AS(mul(FpMatrix::identity(2, 5), FpMatrix::identity(2, 7)), malformed_input);
  CHECK_THROWS_AS(FpMatrix(2, 2, 4), malformed_input);
  CHECK_THROWS_AS(FpMatrix(2, 2, 3), malformed_input);   // p >= 5 is a standing assumption
  CHECK_THROWS_AS(FpMatrix(2, 2, 101), malformed_input);
}

TEST_CASE("large eliminations stay exact") {
  // Regression guard: deep back-substitution chains once overflowed the lazy
  // uint64 accumulation; sizes here are large enough to exercise that path.
  std::mt19937_64 rng(20260809);
  for (std::uint64_t p : {5ull, 97ull}) {
    auto m = random_matrix(200, 300, p, rng);
    auto e = rref(m);
    auto k = nullspace(m);
    CHECK(e.rank + k.cols() == m.cols());
    CHECK(mul(m, k).is_zero());
    CHECK(rref(e.R).R == e.R);
    // pivot columns of R are unit vectors
    for (std::size_t i = 0; i < e.pivots.size(); ++i)
      for (std::size_t row = 0; row < e.R.rows(); ++row)
        CHECK(e.R(row, e.pivots[i]) == (row == i ? 1u : 0u));
    // row space is preserved: stacking R onto M does not raise the rank
    FpMatrix stacked(m.rows() + e.R.rows(), m.cols(), p);
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) stacked(i, j) = m(i, j);
    for (std::size_t i = 0; i < e.R.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) stacked(m.rows() + i, j) = e.R(i, j);
    CHECK(rank(stacked) == e.rank);
  }
}

TEST_CASE("mul agrees with a naive triple loop") {
  std::mt19937_64 rng(11);
  auto a = random_matrix(4, 5, 97, rng);
  auto b = random_matrix(5, 3, 97, rng);
  auto c = mul(a, b);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      std::uint64_t s = 0;
      for (std::size_t k = 0; k < 5; ++k) s = (s + static_cast<std::uint64_t>(a(i, k)) * b(k, j)) % 97;
      CHECK(c(i, j) == s);
    }
}
