#pragma once

#include <cstdint>
#include <string>

#include "gl2rep/errors.hpp"
#include "gl2rep/fp.hpp"
#include "gl2rep/fp_matrix.hpp"

namespace gl2rep {

using int128 = __int128;

// 2x2 matrix with exact integer entries, read p-adically.  Group elements at
// precision N carry unit determinant mod p^N; tree moves have det = p^e * unit.
// 128-bit entries keep every product chain in this library exact.
struct ZMat2 {
  int128 a = 0, b = 0, c = 0, d = 0;

  constexpr ZMat2() = default;
  constexpr ZMat2(int128 a_, int128 b_, int128 c_, int128 d_) : a(a_), b(b_), c(c_), d(d_) {}

  static constexpr ZMat2 identity() { return {1, 0, 0, 1}; }
  static constexpr ZMat2 diag(int128 x, int128 y) { return {x, 0, 0, y}; }

  constexpr int128 det() const { return a * d - b * c; }

  friend constexpr ZMat2 operator*(const ZMat2& x, const ZMat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }

  friend constexpr bool operator==(const ZMat2& x, const ZMat2& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }

  // Integral adjugate: m * adj(m) = det(m) * I.
  constexpr ZMat2 adjugate() const { return {d, -b, -c, a}; }
};

constexpr std::int64_t floor_mod(int128 x, std::uint64_t m) {
  int128 r = x % static_cast<int128>(m);
  if (r < 0) r += static_cast<int128>(m);
  return static_cast<std::int64_t>(r);
}

inline ZMat2 reduce(const ZMat2& m, std::uint64_t modulus) {
  return {floor_mod(m.a, modulus), floor_mod(m.b, modulus), floor_mod(m.c, modulus),
          floor_mod(m.d, modulus)};
}

// p-adic valuation; val_p(0) is reported as a large sentinel.
inline int val_p(int128 x, std::uint64_t p) {
  if (x == 0) return 1 << 20;
  int v = 0;
  while (x % static_cast<int128>(p) == 0) {
    x /= static_cast<int128>(p);
    ++v;
  }
  return v;
}

inline bool is_unit_mod_p(int128 x, std::uint64_t p) { return floor_mod(x, p) != 0; }

inline std::string to_string(const ZMat2& m, std::uint64_t modulus = 0) {
  auto f = [&](int128 x) {
    if (modulus) x = floor_mod(x, modulus);
    bool neg = x < 0;
    if (neg) x = -x;
    std::string s;
    do {
      s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(x % 10)));
      x /= 10;
    } while (x);
    return neg ? "-" + s : s;
  };
  return "[[" + f(m.a) + "," + f(m.b) + "],[" + f(m.c) + "," + f(m.d) + "]]";
}

inline FpMatrix to_fp(const ZMat2& m, std::uint64_t p) {
  FpMatrix f(2, 2, p);
  f(0, 0) = static_cast<std::uint32_t>(floor_mod(m.a, p));
  f(0, 1) = static_cast<std::uint32_t>(floor_mod(m.b, p));
  f(1, 0) = static_cast<std::uint32_t>(floor_mod(m.c, p));
  f(1, 1) = static_cast<std::uint32_t>(floor_mod(m.d, p));
  return f;
}

}  // namespace gl2rep
