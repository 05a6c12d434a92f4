#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gl2rep/errors.hpp"
#include "gl2rep/fp.hpp"

namespace gl2rep {

// Dense matrix over F_p.  Entries are stored reduced in [0, p).  All entries of
// one matrix share the modulus; mixing moduli across an operation throws.
class FpMatrix {
 public:
  FpMatrix() : rows_(0), cols_(0), p_(kMinPrime) {}

  FpMatrix(std::size_t rows, std::size_t cols, std::uint64_t p)
      : rows_(rows), cols_(cols), p_(p), v_(rows * cols, 0) {
    check_prime(p);
  }

  static FpMatrix identity(std::size_t n, std::uint64_t p) {
    FpMatrix m(n, n, p);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  // Row-major initializer; values are reduced mod p (negatives allowed).
  static FpMatrix from_rows(std::uint64_t p, const std::vector<std::vector<std::int64_t>>& rows) {
    std::size_t r = rows.size(), c = r ? rows[0].size() : 0;
    FpMatrix m(r, c, p);
    for (std::size_t i = 0; i < r; ++i) {
      if (rows[i].size() != c) throw malformed_input("from_rows: ragged row lengths");
      for (std::size_t j = 0; j < c; ++j) {
        std::int64_t x = rows[i][j] % static_cast<std::int64_t>(p);
        if (x < 0) x += static_cast<std::int64_t>(p);
        m(i, j) = static_cast<std::uint32_t>(x);
      }
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint64_t modulus() const { return p_; }

  std::uint32_t& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
  std::uint32_t operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

  std::span<const std::uint32_t> row(std::size_t i) const { return {v_.data() + i * cols_, cols_}; }

  bool operator==(const FpMatrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && p_ == o.p_ && v_ == o.v_;
  }

  bool is_zero() const {
    for (auto x : v_)
      if (x) return false;
    return true;
  }

  FpMatrix transpose() const {
    FpMatrix t(cols_, rows_, p_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  FpMatrix scaled(std::uint64_t c) const {
    FpMatrix out(rows_, cols_, p_);
    c %= p_;
    for (std::size_t k = 0; k < v_.size(); ++k)
      out.v_[k] = static_cast<std::uint32_t>(v_[k] * c % p_);
    return out;
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < rows_; ++i) {
      s += '[';
      for (std::size_t j = 0; j < cols_; ++j) s += std::to_string((*this)(i, j)) + (j + 1 < cols_ ? " " : "");
      s += "]\n";
    }
    return s;
  }

 private:
  std::size_t rows_, cols_;
  std::uint64_t p_;
  std::vector<std::uint32_t> v_;
};

inline void check_same_modulus(const FpMatrix& a, const FpMatrix& b, const char* op) {
  if (a.modulus() != b.modulus())
    throw malformed_input(std::string(op) + ": modulus mismatch " + std::to_string(a.modulus()) +
                          " vs " + std::to_string(b.modulus()));
}

inline FpMatrix add(const FpMatrix& a, const FpMatrix& b) {
  check_same_modulus(a, b, "add");
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw malformed_input("add: shape mismatch");
  FpMatrix c(a.rows(), a.cols(), a.modulus());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = (a(i, j) + b(i, j)) % a.modulus();
  return c;
}

inline FpMatrix sub(const FpMatrix& a, const FpMatrix& b) {
  check_same_modulus(a, b, "sub");
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw malformed_input("sub: shape mismatch");
  const std::uint64_t p = a.modulus();
  FpMatrix c(a.rows(), a.cols(), p);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = static_cast<std::uint32_t>((a(i, j) + p - b(i, j)) % p);
  return c;
}

// C = A*B.  Inner products accumulate in uint64 without intermediate reduction:
// terms are < 97^2, so ~2e15 of them fit below 2^64.
inline FpMatrix mul(const FpMatrix& a, const FpMatrix& b) {
  check_same_modulus(a, b, "mul");
  if (a.cols() != b.rows()) throw malformed_input("mul: inner dimension mismatch");
  const std::uint64_t p = a.modulus();
  FpMatrix c(a.rows(), b.cols(), p);
  std::vector<std::uint64_t> acc(b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      std::uint64_t aik = a(i, k);
      if (!aik) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) acc[j] += aik * brow[j];
    }
    for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = static_cast<std::uint32_t>(acc[j] % p);
  }
  return c;
}

struct RrefResult {
  FpMatrix R;
  std::vector<std::size_t> pivots;  // pivot column per pivot row, ascending
  std::size_t rank = 0;
};

namespace detail {

// Gaussian elimination workspace.  Pivot rows are kept reduced; target rows
// accumulate unreduced uint64 values (each axpy adds < 97^2, and a row is hit
// at most `rank` times, so no overflow for any feasible size here).
class EchelonWorkspace {
 public:
  EchelonWorkspace(const FpMatrix& m)
      : rows_(m.rows()), cols_(m.cols()), p_(m.modulus()), w_(rows_ * cols_) {
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) w_[i * cols_ + j] = m(i, j);
  }

  // Deterministic pivoting: first row (in order) with a nonzero entry in the
  // first unfinished column, so outputs are byte-for-byte reproducible.
  RrefResult run() {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t col = 0; col < cols_ && r < rows_; ++col) {
      std::size_t piv = rows_;
      for (std::size_t i = r; i < rows_; ++i) {
        if (w_[i * cols_ + col] % p_ != 0) {
          piv = i;
          break;
        }
      }
      if (piv == rows_) continue;
      reduce_row(piv);
      if (piv != r) swap_rows(piv, r);
      normalize_pivot(r, col);
      for (std::size_t i = r + 1; i < rows_; ++i) eliminate(i, r, col);
      pivots.push_back(col);
      ++r;
    }
    // Back substitution: clear above each pivot (reduced row echelon form).
    // Each source row is re-reduced first: rows above accumulate unreduced
    // values, and reusing them unreduced as sources would overflow uint64.
    for (std::size_t k = pivots.size(); k-- > 0;) {
      reduce_row(k);
      for (std::size_t i = 0; i < k; ++i) eliminate(i, k, pivots[k]);
    }
    RrefResult out{FpMatrix(rows_, cols_, p_), pivots, pivots.size()};
    for (std::size_t i = 0; i < rows_; ++i) {
      reduce_row(i);
      for (std::size_t j = 0; j < cols_; ++j) out.R(i, j) = static_cast<std::uint32_t>(w_[i * cols_ + j]);
    }
    return out;
  }

 private:
  void reduce_row(std::size_t i) {
    std::uint64_t* row = &w_[i * cols_];
    for (std::size_t j = 0; j < cols_; ++j) row[j] %= p_;
  }

  void swap_rows(std::size_t i, std::size_t j) {
    std::swap_ranges(&w_[i * cols_], &w_[i * cols_] + cols_, &w_[j * cols_]);
  }

  void normalize_pivot(std::size_t r, std::size_t col) {
    std::uint64_t* row = &w_[r * cols_];
    std::uint64_t inv = mod_inv(row[col], p_);
    if (inv == 1) return;
    for (std::size_t j = col; j < cols_; ++j) row[j] = row[j] * inv % p_;
  }

  // w[i] += f * w[r] with f chosen to kill column `col`; w[r] must be reduced
  // with w[r][col] == 1.
  void eliminate(std::size_t i, std::size_t r, std::size_t col) {
    std::uint64_t* tgt = &w_[i * cols_];
    const std::uint64_t* piv = &w_[r * cols_];
    std::uint64_t f = (p_ - tgt[col] % p_) % p_;
    if (!f) return;
    for (std::size_t j = col; j < cols_; ++j) tgt[j] += f * piv[j];
  }

  std::size_t rows_, cols_;
  std::uint64_t p_;
  std::vector<std::uint64_t> w_;
};

}  // namespace detail

inline RrefResult rref(const FpMatrix& m) { return detail::EchelonWorkspace(m).run(); }

inline std::size_t rank(const FpMatrix& m) { return rref(m).rank; }

// Columns form a basis of { x : m x = 0 }; column count = cols - rank.
// Basis vectors have a 1 in their free coordinate, the standard rref kernel.
inline FpMatrix nullspace(const FpMatrix& m) {
  RrefResult e = rref(m);
  const std::uint64_t p = m.modulus();
  std::vector<std::size_t> free_cols;
  {
    std::size_t pi = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (pi < e.pivots.size() && e.pivots[pi] == j)
        ++pi;
      else
        free_cols.push_back(j);
    }
  }
  FpMatrix basis(m.cols(), free_cols.size(), p);
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    std::size_t j = free_cols[k];
    basis(j, k) = 1;
    for (std::size_t i = 0; i < e.pivots.size(); ++i)
      basis(e.pivots[i], k) = static_cast<std::uint32_t>((p - e.R(i, j)) % p);
  }
  return basis;
}

// Basis of the common kernel of all mats (of mats - 1 when shifted), computed
// by successive restriction.  `dim`/`p` fix the ambient space so an empty list
// yields the full space.
inline FpMatrix intersect_kernels(std::span<const FpMatrix> mats, std::size_t dim, std::uint64_t p,
                                  bool shifted) {
  check_prime(p);
  FpMatrix basis = FpMatrix::identity(dim, p);
  for (const FpMatrix& m : mats) {
    if (m.rows() != dim || m.cols() != dim)
      throw malformed_input("intersect_kernels: expected " + std::to_string(dim) + "x" +
                            std::to_string(dim) + ", got " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
    if (m.modulus() != p) throw malformed_input("intersect_kernels: modulus mismatch");
    if (basis.cols() == 0) break;
    FpMatrix restricted = mul(m, basis);
    if (shifted) restricted = sub(restricted, basis);
    basis = mul(basis, nullspace(restricted));
  }
  return basis;
}

inline FpMatrix intersect_kernels(const std::vector<FpMatrix>& mats, std::size_t dim, std::uint64_t p,
                                  bool shifted) {
  return intersect_kernels(std::span<const FpMatrix>(mats), dim, p, shifted);
}

inline FpMatrix kron(const FpMatrix& a, const FpMatrix& b) {
  check_same_modulus(a, b, "kron");
  const std::uint64_t p = a.modulus();
  FpMatrix c(a.rows() * b.rows(), a.cols() * b.cols(), p);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      std::uint64_t aij = a(i, j);
      if (!aij) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          c(i * b.rows() + k, j * b.cols() + l) = static_cast<std::uint32_t>(aij * b(k, l) % p);
    }
  return c;
}

// dim(colspace A  ∩  colspace B) via rk A + rk B - rk [A|B].
inline std::size_t intersection_dim(const FpMatrix& a, const FpMatrix& b) {
  check_same_modulus(a, b, "intersection_dim");
  if (a.rows() != b.rows()) throw malformed_input("intersection_dim: ambient dimension mismatch");
  FpMatrix joint(a.rows(), a.cols() + b.cols(), a.modulus());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) joint(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) joint(i, a.cols() + j) = b(i, j);
  }
  return rank(a) + rank(b) - rank(joint);
}

// True iff every column of `vecs` lies in the column space of `space`.
inline bool columns_contained(const FpMatrix& space, const FpMatrix& vecs) {
  check_same_modulus(space, vecs, "columns_contained");
  if (space.rows() != vecs.rows()) throw malformed_input("columns_contained: ambient dimension mismatch");
  FpMatrix joint(space.rows(), space.cols() + vecs.cols(), space.modulus());
  for (std::size_t i = 0; i < space.rows(); ++i) {
    for (std::size_t j = 0; j < space.cols(); ++j) joint(i, j) = space(i, j);
    for (std::size_t j = 0; j < vecs.cols(); ++j) joint(i, space.cols() + j) = vecs(i, j);
  }
  return rank(joint) == rank(space);
}

}  // namespace gl2rep
