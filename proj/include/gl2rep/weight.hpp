#pragma once

#include <cstdint>
#include <vector>

#include "gl2rep/errors.hpp"
#include "gl2rep/fp.hpp"
#include "gl2rep/fp_matrix.hpp"
#include "gl2rep/zmat2.hpp"

namespace gl2rep {

// Weight Sym^r tensor det^a of GL_2(F_p).  Basis of Sym^r is X^(r-j) Y^j for
// j = 0..r, so the dimension is r+1.
struct Weight {
  std::uint64_t p;
  unsigned r;
  unsigned a;

  Weight(std::uint64_t p_, unsigned r_, unsigned a_ = 0) : p(p_), r(r_), a(a_ % (p_ - 1)) {
    check_prime(p_);
    if (r_ > p_ - 1) throw malformed_input("Weight: r must lie in [0, p-1]");
  }

  unsigned dim() const { return r + 1; }
};

// Matrix of g on Sym^r tensor det^a, acting by
//   (g . f)(X, Y) = det(g)^a * f(aX + cY, bX + dY).
// Column j holds the coordinates of g . (X^(r-j) Y^j).  Entries of g are read
// mod p; the map is multiplicative: sym_matrix(gh) = sym_matrix(g) sym_matrix(h).
inline FpMatrix sym_matrix(const ZMat2& g, const Weight& w) {
  const std::uint64_t p = w.p;
  const std::uint64_t a = static_cast<std::uint64_t>(floor_mod(g.a, p));
  const std::uint64_t b = static_cast<std::uint64_t>(floor_mod(g.b, p));
  const std::uint64_t c = static_cast<std::uint64_t>(floor_mod(g.c, p));
  const std::uint64_t d = static_cast<std::uint64_t>(floor_mod(g.d, p));
  const std::uint64_t det = ((a * d) % p + p - (b * c) % p) % p;
  const std::uint64_t twist = mod_pow(det, w.a, p);

  FpMatrix m(w.dim(), w.dim(), p);
  // poly1 = (aX + cY)^(r-j), poly2 = (bX + dY)^j, coefficients by X-degree.
  std::vector<std::uint64_t> poly(w.dim());
  for (unsigned j = 0; j <= w.r; ++j) {
    std::fill(poly.begin(), poly.end(), 0);
    poly[0] = 1;
    unsigned deg = 0;
    auto mul_linear = [&](std::uint64_t x_coef, std::uint64_t y_coef) {
      // multiply by (x_coef X + y_coef Y); poly[i] = coeff of X^(deg-i) Y^i
      for (unsigned i = deg + 2; i-- > 0;) {
        std::uint64_t xi = i <= deg ? poly[i] : 0;
        std::uint64_t lower = i > 0 ? poly[i - 1] : 0;
        poly[i] = (xi * x_coef + lower * y_coef) % p;
      }
      ++deg;
    };
    for (unsigned t = 0; t < w.r - j; ++t) mul_linear(a, c);
    for (unsigned t = 0; t < j; ++t) mul_linear(b, d);
    for (unsigned i = 0; i <= w.r; ++i) m(i, j) = static_cast<std::uint32_t>(poly[i] * twist % p);
  }
  return m;
}

// The conjugated level-n weight on K0(p^n):
//   sigma_n([[a, b], [p^n c, d]]) = sigma([[d, c], [p^n b, a]]),
// with the swapped matrix reduced mod p.  Reading off c = g.c / p^n needs g
// known to precision p^(n+1) or better; exact integer entries always qualify.
inline FpMatrix sigma_n_matrix(const ZMat2& g, const Weight& w, unsigned n) {
  const int128 pn = static_cast<int128>(pow_u64(w.p, n));
  if (floor_mod(g.c, pow_u64(w.p, n)) != 0)
    throw domain_error("sigma_n_matrix: matrix not in K0(p^n)");
  ZMat2 swapped{g.d, g.c / pn, pn * g.b, g.a};
  return sym_matrix(swapped, w);
}

}  // namespace gl2rep
