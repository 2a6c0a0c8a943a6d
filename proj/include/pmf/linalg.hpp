#pragma once

// Exact dense linear algebra over Q and F_p: rank, reduced row echelon form,
// and kernels.  Matrices are row-major vectors of rows.

#include <cstdint>
#include <vector>

#include "pmf/arith.hpp"

namespace pmf {

using QMatrix = std::vector<std::vector<Rational>>;
using ZMatrix = std::vector<std::vector<BigInt>>;
using ModMatrix = std::vector<std::vector<std::int64_t>>;

constexpr std::int64_t kDefaultFieldPrime = 1000003;

/// Reduced row echelon form in place over F_p; returns pivot columns.
inline std::vector<std::size_t> rref_mod(ModMatrix& a, std::int64_t p) {
  std::vector<std::size_t> pivots;
  if (a.empty()) return pivots;
  const std::size_t rows = a.size(), cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] % p == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    std::int64_t inv = inv_mod(mod(a[r][c], p), p);
    for (auto& x : a[r]) x = mod(x, p) * inv % p;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      std::int64_t f = mod(a[i][c], p);
      if (f == 0) continue;
      for (std::size_t j = c; j < cols; ++j) {
        if (a[r][j] != 0) a[i][j] = mod(a[i][j] - f * a[r][j], p);
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

/// Rank over F_p, using forward elimination only.
inline std::size_t rank_mod(ModMatrix a, std::int64_t p) {
  if (a.empty()) return 0;
  const std::size_t rows = a.size(), cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && mod(a[piv][c], p) == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    std::int64_t inv = inv_mod(mod(a[r][c], p), p);
    for (std::size_t j = c; j < cols; ++j) a[r][j] = mod(a[r][j], p) * inv % p;
    for (std::size_t i = r + 1; i < rows; ++i) {
      std::int64_t f = mod(a[i][c], p);
      if (f == 0) continue;
      for (std::size_t j = c; j < cols; ++j) {
        if (a[r][j] != 0) a[i][j] = mod(a[i][j] - f * a[r][j], p);
      }
    }
    ++r;
  }
  return r;
}

/// Reduces a rational matrix entrywise into F_p; throws when p divides a
/// denominator.
inline ModMatrix to_mod(const QMatrix& a, std::int64_t p) {
  ModMatrix m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    m[i].reserve(a[i].size());
    for (const auto& x : a[i]) m[i].push_back(reduce_mod(x, p));
  }
  return m;
}

inline ModMatrix to_mod(const ZMatrix& a, std::int64_t p) {
  ModMatrix m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    m[i].reserve(a[i].size());
    for (const auto& x : a[i]) {
      BigInt t = x % static_cast<long>(p);
      m[i].push_back(mod(t.get_si(), p));
    }
  }
  return m;
}

/// Reduced row echelon form over Q in place; returns pivot columns.
inline std::vector<std::size_t> rref(QMatrix& a) {
  std::vector<std::size_t> pivots;
  if (a.empty()) return pivots;
  const std::size_t rows = a.size(), cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    Rational inv = 1 / a[r][c];
    for (std::size_t j = c; j < cols; ++j) a[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) {
        if (a[r][j] != 0) a[i][j] -= f * a[r][j];
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

/// Rank over Q by fraction-free elimination on integer rows (rows are
/// scaled to clear denominators and divided by their content).
inline std::size_t rank_q(const QMatrix& a) {
  if (a.empty()) return 0;
  ZMatrix z(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    BigInt l = 1;
    for (const auto& x : a[i]) l = lcm(l, BigInt(x.get_den()));
    z[i].reserve(a[i].size());
    for (const auto& x : a[i]) z[i].push_back(BigInt(x.get_num() * (l / x.get_den())));
  }
  const std::size_t rows = z.size(), cols = z[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && z[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(z[piv], z[r]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      if (z[i][c] == 0) continue;
      BigInt g = gcd(z[r][c], z[i][c]);
      BigInt fr = z[i][c] / g, fi = z[r][c] / g;
      BigInt content = 0;
      for (std::size_t j = c; j < cols; ++j) {
        z[i][j] = z[i][j] * fi - z[r][j] * fr;
        content = gcd(content, z[i][j]);
      }
      if (content > 1)
        for (std::size_t j = c; j < cols; ++j) z[i][j] /= content;
    }
    ++r;
  }
  return r;
}

inline std::size_t rank_q(const ZMatrix& a) {
  QMatrix q(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (const auto& x : a[i]) q[i].emplace_back(x);
  return rank_q(q);
}

/// Basis of the right kernel {x : A x = 0} over Q.
inline QMatrix kernel(QMatrix a, std::size_t cols) {
  QMatrix basis;
  std::vector<std::size_t> pivots = a.empty() ? std::vector<std::size_t>{} : rref(a);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Basis of the right kernel over F_p.
inline ModMatrix kernel_mod(ModMatrix a, std::size_t cols, std::int64_t p) {
  ModMatrix basis;
  std::vector<std::size_t> pivots = a.empty() ? std::vector<std::size_t>{} : rref_mod(a, p);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<std::int64_t> v(cols, 0);
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = mod(-a[i][f], p);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Scales a rational vector to a primitive integer vector with positive
/// leading nonzero entry.
inline std::vector<BigInt> primitive_integer(const std::vector<Rational>& v) {
  BigInt l = 1;
  for (const auto& x : v) l = lcm(l, BigInt(x.get_den()));
  std::vector<BigInt> out;
  BigInt g = 0;
  for (const auto& x : v) {
    out.emplace_back(x.get_num() * (l / x.get_den()));
    g = gcd(g, out.back());
  }
  if (g == 0) return out;
  BigInt sign = 1;
  for (const auto& x : out)
    if (x != 0) {
      sign = x < 0 ? -1 : 1;
      break;
    }
  for (auto& x : out) x = x / g * sign;
  return out;
}

}  // namespace pmf
