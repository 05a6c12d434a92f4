#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "gl2rep/krep.hpp"
#include "gl2rep/p1_line.hpp"
#include "gl2rep/subgroups.hpp"
#include "gl2rep/weight.hpp"

using namespace gl2rep;

TEST_CASE("sym_matrix") {
  SECTION("identity acts as identity") {
    for (unsigned r = 0; r <= 4; ++r)
      CHECK(sym_matrix(ZMat2::identity(), Weight(5, r)) == FpMatrix::identity(r + 1, 5));
  }

  SECTION("diagonal matrices on Sym^1") {
    CHECK(sym_matrix(ZMat2::diag(2, 3), Weight(5, 1)) == FpMatrix::from_rows(5, {{2, 0}, {0, 3}}));
  }

  SECTION("upper unipotent on Sym^2 over F_5") {
    auto m = sym_matrix(ZMat2{1, 1, 0, 1}, Weight(5, 2));
    // X^2 -> X^2; XY -> X^2 + XY; Y^2 -> X^2 + 2XY + Y^2
    CHECK(m == FpMatrix::from_rows(5, {{1, 1, 1}, {0, 1, 2}, {0, 0, 1}}));
    ZMat2 g{1, 1, 0, 1};
    CHECK(mul(m, m) == sym_matrix(g * g, Weight(5, 2)));
  }

  SECTION("multiplicative on random pairs, with and without det twist") {
    std::mt19937_64 rng(31);
    auto spec = SubgroupSpec::K(5);
    for (unsigned a : {0u, 2u})
      for (int t = 0; t < 30; ++t) {
        Weight w(5, 3, a);
        ZMat2 g = random_member(spec, 2, rng), h = random_member(spec, 2, rng);
        CHECK(mul(sym_matrix(g, w), sym_matrix(h, w)) == sym_matrix(reduce(g * h, 25), w));
      }
  }

  SECTION("det twist scales by det^a") {
    Weight w(5, 0, 1);
    auto m = sym_matrix(ZMat2::diag(2, 1), w);
    CHECK(m(0, 0) == 2);
  }
}

TEST_CASE("sigma_n_matrix") {
  const Weight w(5, 2);
  SECTION("identity") { CHECK(sigma_n_matrix(ZMat2::identity(), w, 1) == FpMatrix::identity(3, 5)); }

  SECTION("diagonal swaps") {
    CHECK(sigma_n_matrix(ZMat2::diag(2, 3), w, 1) == sym_matrix(ZMat2::diag(3, 2), w));
  }

  SECTION("rejects matrices outside K0(p^n)") {
    CHECK_THROWS_AS(sigma_n_matrix(ZMat2{1, 0, 1, 1}, w, 1), gl2rep::domain_error);
  }

  SECTION("multiplicative on K0(25) samples") {
    std::mt19937_64 rng(77);
    auto spec = SubgroupSpec::K0(2, 5);
    for (int t = 0; t < 50; ++t) {
      ZMat2 g = random_member(spec, 3, rng), h = random_member(spec, 3, rng);
      CHECK(mul(sigma_n_matrix(g, w, 2), sigma_n_matrix(h, w, 2)) ==
            sigma_n_matrix(reduce(g * h, 125), w, 2));
    }
  }
}

TEST_CASE("induced representations") {
  SECTION("dimension formula (r+1)(p+1)p^(n-1)") {
    CHECK(induced_rep(Weight(5, 1), 1, 2).dim() == 12);
    CHECK(induced_rep(Weight(5, 2), 2, 3).dim() == 90);
    CHECK(induced_rep(Weight(5, 0), 3, 4).dim() == 150);
  }

  SECTION("identity acts as identity") {
    auto rep = induced_rep(Weight(5, 1), 1, 2);
    CHECK(rep.act(ZMat2::identity()) == FpMatrix::identity(rep.dim(), 5));
  }

  SECTION("action is a homomorphism on 50 random pairs") {
    auto rep = induced_rep(Weight(5, 2), 1, 3);
    std::mt19937_64 rng(123);
    auto spec = SubgroupSpec::K(5);
    for (int t = 0; t < 50; ++t) {
      ZMat2 g = random_member(spec, 3, rng), h = random_member(spec, 3, rng);
      CHECK(mul(rep.act(g), rep.act(h)) == rep.act(reduce(g * h, 125)));
    }
  }

  SECTION("insufficient precision is rejected") {
    CHECK_THROWS_AS(induced_rep(Weight(5, 1), 2, 2), precision_error);
  }
}

TEST_CASE("invariants engine") {
  std::mt19937_64 rng(9);

  SECTION("H-invariants of Ind(trivial) = H-orbit count on P^1(F_5)") {
    auto rep = induced_rep(Weight(5, 0), 1, 2);
    auto inv = invariants(rep, SubgroupSpec::H(5), rng);
    CHECK(inv.dim == 6);
    CHECK(inv.dim == double_coset_count(5, 1));
  }

  SECTION("K1 acts through the identity on an inflated weight") {
    for (unsigned r : {0u, 2u, 4u}) {
      auto rep = weight_rep(Weight(5, r), 2);
      CHECK(invariants(rep, SubgroupSpec::K1(5), rng).dim == r + 1);
    }
  }

  SECTION("trivial weight is fixed by everything") {
    auto rep = weight_rep(Weight(5, 0), 3);
    for (auto spec : {SubgroupSpec::K(5), SubgroupSpec::K0(2, 5), SubgroupSpec::T1(2, 5),
                      SubgroupSpec::H(5)})
      CHECK(invariants(rep, spec, rng).dim == 1);
  }

  SECTION("containment H < T1(p^n) < K forces non-increasing invariants") {
    auto rep = induced_rep(Weight(5, 1), 1, 3);
    auto dim_h = invariants(rep, SubgroupSpec::H(5), rng).dim;
    auto dim_t1 = invariants(rep, SubgroupSpec::T1(2, 5), rng).dim;
    auto dim_k = invariants(rep, SubgroupSpec::K(5), rng).dim;
    CHECK(dim_h >= dim_t1);
    CHECK(dim_t1 >= dim_k);
  }

  SECTION("stable when the ambient precision rises") {
    for (unsigned N : {2u, 3u}) {
      auto rep = induced_rep(Weight(5, 2), 1, N);
      CHECK(invariants(rep, SubgroupSpec::H(5), rng).dim ==
            invariants(induced_rep(Weight(5, 2), 1, N + 1), SubgroupSpec::H(5), rng).dim);
    }
  }

  SECTION("full enumeration oracle agrees with the generator engine at (5,1,2)") {
    auto rep = induced_rep(Weight(5, 1), 1, 2);
    auto by_gens = invariants(rep, SubgroupSpec::K1(5), rng);
    auto by_enum = invariants_full_enumeration(rep, SubgroupSpec::K1(5));
    CHECK(by_gens.dim == by_enum.dim);
    auto h_gens = invariants(rep, SubgroupSpec::H(5), rng);
    auto h_enum = invariants_full_enumeration(rep, SubgroupSpec::H(5));
    CHECK(h_gens.dim == h_enum.dim);
  }
}

TEST_CASE("hom spaces") {
  SECTION("Hom(trivial, trivial) = 1") {
    auto triv = weight_rep(Weight(5, 0), 2);
    CHECK(hom_space(triv, triv, 2) == 1);
  }

  SECTION("Schur: Hom(Sym^1, Sym^1) = 1 and Hom(Sym^1, Sym^2) = 0 over F_5") {
    auto s1 = weight_rep(Weight(5, 1), 2);
    auto s2 = weight_rep(Weight(5, 2), 2);
    CHECK(hom_space(s1, s1, 2) == 1);
    CHECK(hom_space(s1, s2, 2) == 0);
  }

  SECTION("size cap is enforced") {
    auto big = induced_rep(Weight(5, 4), 3, 4);  // dim 750
    CHECK_THROWS_AS(hom_space(big, big, 4), cap_exceeded);
  }
}
