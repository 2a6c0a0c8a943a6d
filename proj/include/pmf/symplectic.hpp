#pragma once

// Degree-2 symplectic matrices (skew form J = [[0, -I], [I, 0]], g'Jg = J),
// membership predicates for Sp4(Z), the paramodular group K(N), its integral
// part and the Siegel parabolic, and the coset machinery for tracing down.

#include <array>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pmf/arith.hpp"

namespace pmf {

using Mat4 = std::array<std::array<Rational, 4>, 4>;
using IMat = std::vector<std::vector<BigInt>>;

inline Mat4 identity4() {
  Mat4 m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = i == j ? 1 : 0;
  return m;
}

inline Mat4 skew_form() {
  Mat4 j{};
  for (auto& row : j) row.fill(0);
  j[0][2] = -1;
  j[1][3] = -1;
  j[2][0] = 1;
  j[3][1] = 1;
  return j;
}

inline Mat4 operator*(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Rational s = 0;
      for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  return c;
}

inline Mat4 transpose(const Mat4& a) {
  Mat4 t{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) t[i][j] = a[j][i];
  return t;
}

inline bool is_symplectic(const Mat4& g) { return transpose(g) * skew_form() * g == skew_form(); }

/// Inverse of a symplectic matrix: J^{-1} g' J.
inline Mat4 symplectic_inverse(const Mat4& g) {
  Mat4 j = skew_form(), jinv = skew_form();
  for (auto& row : jinv)
    for (auto& x : row) x = -x;
  return jinv * transpose(g) * j;
}


inline bool in_sp4z(const Mat4& g) {
  for (const auto& row : g)
    for (const auto& x : row)
      if (!is_integer(x)) return false;
  return is_symplectic(g);
}

/// Paramodular group: symplectic with the entry pattern
/// [* *N * *; * * * */N; * *N * *; *N *N *N *], all * integral.
inline bool in_paramodular(const Mat4& g, long long N) {
  if (!is_symplectic(g)) return false;
  const Rational n(big(N));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Rational x = g[i][j];
      bool times_n = (j == 1 && (i == 0 || i == 2)) || (i == 3 && j != 3);
      bool over_n = i == 1 && j == 3;
      if (times_n) x /= n;
      if (over_n) x *= n;
      if (!is_integer(x)) return false;
    }
  return true;
}

/// K(N) intersected with Sp4(Z).
inline bool in_gamma0_prime(const Mat4& g, long long N) { return in_sp4z(g) && in_paramodular(g, N); }

/// Siegel parabolic: rational symplectic with vanishing lower-left block.
inline bool in_siegel_parabolic(const Mat4& g) {
  for (int i = 2; i < 4; ++i)
    for (int j = 0; j < 2; ++j)
      if (g[i][j] != 0) return false;
  return is_symplectic(g);
}

namespace detail {

/// Column operations: returns U unimodular (n x n) with A U = [H | 0] where
/// H has full column rank (rank r) and the last n - r columns of A U vanish.
inline IMat column_reduce(const IMat& a, IMat& u, std::size_t& rank) {
  const std::size_t rows = a.size(), n = rows ? a[0].size() : 0;
  IMat h = a;
  u.assign(n, std::vector<BigInt>(n, BigInt(0)));
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;
  std::size_t piv = 0;
  auto colop = [&](std::size_t c1, std::size_t c2, const BigInt& a11, const BigInt& a12, const BigInt& a21,
                   const BigInt& a22) {
    // (col c1, col c2) <- (a11 c1 + a21 c2, a12 c1 + a22 c2)
    for (auto* m : {&h, &u})
      for (auto& row : *m) {
        BigInt x = row[c1], y = row[c2];
        row[c1] = a11 * x + a21 * y;
        row[c2] = a12 * x + a22 * y;
      }
  };
  for (std::size_t r = 0; r < rows && piv < n; ++r) {
    for (std::size_t c = piv + 1; c < n; ++c) {
      if (h[r][c] == 0) continue;
      BigInt x = h[r][piv], y = h[r][c], g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
      // [s, -y/g; t, x/g] has determinant 1
      colop(piv, c, s, -y / g, t, x / g);
    }
    if (h[r][piv] != 0) ++piv;
  }
  rank = piv;
  return h;
}

inline BigInt dot(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
  BigInt s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// J applied to an integer 4-vector.
inline std::vector<BigInt> apply_j(const std::vector<BigInt>& x) { return {-x[2], -x[3], x[0], x[1]}; }

/// Integer vector y with y . w = target for primitive w.
inline std::vector<BigInt> solve_unit(const std::vector<BigInt>& w, const BigInt& target) {
  IMat u;
  std::size_t rank;
  auto h = column_reduce(IMat{w}, u, rank);
  BigInt g = h[0][0];
  if (g != 1 && g != -1) throw InvalidInput("vector is not primitive");
  std::vector<BigInt> y(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) y[i] = u[i][0] * g * target;
  return y;
}

}  // namespace detail

/// Completes a primitive integer row vector to a matrix of Sp4(Z) having it
/// as bottom row.
inline Mat4 complete_bottom_row(const std::vector<long long>& v) {
  if (v.size() != 4) throw InvalidInput("bottom row must have four entries");
  std::vector<BigInt> r4;
  for (long long x : v) r4.push_back(big(x));
  BigInt g = 0;
  for (const auto& x : r4) g = gcd(g, x);
  if (g != 1) throw InvalidInput("bottom row is not primitive");
  using detail::apply_j;
  using detail::dot;
  // r2 with r2 J r4' = -1
  auto r2 = detail::solve_unit(apply_j(r4), BigInt(-1));
  // r3 primitive with r3 J r2' = r3 J r4' = 0
  IMat u;
  std::size_t rank;
  detail::column_reduce(IMat{apply_j(r2), apply_j(r4)}, u, rank);
  std::vector<BigInt> r3(4);
  for (int i = 0; i < 4; ++i) r3[i] = u[i][2];
  // rho1 with rho1 J r3' = -1
  auto rho1 = detail::solve_unit(apply_j(r3), BigInt(-1));
  BigInt a = dot(rho1, apply_j(r4)), b = dot(rho1, apply_j(r2));
  std::vector<BigInt> r1(4);
  for (int i = 0; i < 4; ++i) r1[i] = rho1[i] + a * r2[i] - b * r4[i];
  Mat4 m{};
  const std::vector<BigInt>* rows[4] = {&r1, &r2, &r3, &r4};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = Rational((*rows[i])[j]);
  if (!in_sp4z(m)) throw VerificationFailure("bottom-row completion is not symplectic");
  return m;
}

/// Representatives (a, b, c, d) of P^3(Z/q) (first nonzero residue 1) with
/// (aN, bN, cN, d) primitive.
inline std::vector<std::array<long long, 4>> p3_reps(long long q, long long N = 1) {
  if (!is_prime(q)) throw InvalidInput("p3_reps needs a prime");
  if (N % q == 0) throw InvalidInput("q must not divide N");
  std::vector<std::array<long long, 4>> out;
  for (int lead = 0; lead < 4; ++lead) {
    long long free = 3 - lead, count = 1;
    for (int i = 0; i < free; ++i) count *= q;
    for (long long code = 0; code < count; ++code) {
      std::array<long long, 4> v{0, 0, 0, 0};
      v[lead] = 1;
      long long c = code;
      for (int i = lead + 1; i < 4; ++i) {
        v[i] = c % q;
        c /= q;
      }
      // make d coprime to N without changing the class mod q, then divide by the content
      while (std::gcd(v[3], N) != 1) v[3] += q;
      long long g = std::gcd(std::gcd(v[0], v[1]), std::gcd(v[2], v[3]));
      for (auto& x : v) x /= g;
      out.push_back(v);
    }
  }
  return out;
}

/// SL2 representatives of Gamma^0(N) \ SL2(Z), one per point (a : b) of
/// P^1(Z/N) in the first row.
inline std::vector<std::array<long long, 4>> sl2_upper_coset_reps(long long N) {
  std::vector<long long> units;
  for (long long s = 1; s <= std::max<long long>(N, 1); ++s)
    if (std::gcd(s, N) == 1) units.push_back(s);
  std::set<std::pair<long long, long long>> seen;
  std::vector<std::array<long long, 4>> out;
  for (long long a = 0; a < N; ++a)
    for (long long b = 0; b < N; ++b) {
      if (std::gcd(std::gcd(a, b), N) != 1) continue;
      std::pair<long long, long long> best{N, N};
      for (long long s : units) best = std::min(best, std::make_pair(mod(s * a, N), mod(s * b, N)));
      if (!seen.insert(best).second) continue;
      // lift to a coprime integer pair
      long long aa = a, bb = b;
      if (N == 1) {
        aa = 1;
        bb = 0;
      }
      while (std::gcd(aa, bb) != 1) aa += N;
      long long x, y;
      ext_gcd(aa, bb, x, y);  // aa x + bb y = 1
      out.push_back({aa, bb, -y, x});
    }
  return out;
}

/// Klingen embedding of SL2 coset representatives into K(N):
/// [[1,0,0,0],[0,a,0,b/N],[0,0,1,0],[0,cN,0,d]].
inline std::vector<Mat4> klingen_column_reps(long long N) {
  std::vector<Mat4> out;
  for (auto [a, b, c, d] : sl2_upper_coset_reps(N)) {
    Mat4 g = identity4();
    g[1][1] = Rational(big(a));
    g[1][3] = make_rational(b, N);
    g[3][1] = Rational(big(c * N));
    g[3][3] = Rational(big(d));
    if (!in_paramodular(g, N)) throw VerificationFailure("Klingen representative outside K(N)");
    out.push_back(g);
  }
  return out;
}

namespace detail {

inline IMat transpose(const IMat& a) {
  IMat t(a.empty() ? 0 : a[0].size(), std::vector<BigInt>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

inline IMat mul(const IMat& a, const IMat& b) {
  IMat c(a.size(), std::vector<BigInt>(b[0].size(), BigInt(0)));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < b.size(); ++k)
      for (std::size_t j = 0; j < b[0].size(); ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

/// Smith form of a nonsingular 2x2 integer matrix: L P R = diag(e1, e2) with
/// L, R unimodular, 0 < e1 | e2.
inline void smith2(const IMat& p, IMat& l, IMat& r) {
  IMat a = p;
  l = {{1, 0}, {0, 1}};
  r = {{1, 0}, {0, 1}};
  for (int guard = 0; guard < 200; ++guard) {
    IMat u;
    std::size_t rank;
    a = column_reduce(a, u, rank);
    r = mul(r, u);
    IMat at = column_reduce(transpose(a), u, rank);
    a = transpose(at);
    l = mul(transpose(u), l);
    if (a[0][1] != 0 || a[1][0] != 0) continue;
    if (a[1][1] % a[0][0] != 0) {
      // fold row 2 into row 1 and reduce again
      for (int j = 0; j < 2; ++j) {
        a[0][j] += a[1][j];
        l[0][j] += l[1][j];
      }
      continue;
    }
    for (int i = 0; i < 2; ++i)
      if (a[i][i] < 0) {
        a[i][i] = -a[i][i];
        for (int j = 0; j < 2; ++j) l[i][j] = -l[i][j];
      }
    return;
  }
  throw VerificationFailure("smith2 did not converge");
}

}  // namespace detail

/// Factorization g = kappa * u with kappa in K(M) and u in the rational Siegel
/// parabolic, for squarefree M and rational symplectic g.
struct ParabolicDecomposition {
  Mat4 kappa;
  Mat4 u;
};

inline ParabolicDecomposition decompose_paramodular_parabolic(const Mat4& g, long long M) {
  if (!is_squarefree(M)) throw InvalidInput("decomposition needs a squarefree level");
  if (!is_symplectic(g)) throw InvalidInput("matrix is not symplectic");
  if (in_paramodular(g, M)) return {g, identity4()};
  if (in_siegel_parabolic(g)) return {identity4(), g};
  // Lattice Z + Z + Z + MZ, in coordinates v -> (v1, v2, v3, v4 / M).
  IMat span(2, std::vector<BigInt>(4));
  for (int j = 0; j < 2; ++j) {
    std::array<Rational, 4> v;
    for (int i = 0; i < 4; ++i) v[i] = g[i][j];
    v[3] /= Rational(big(M));
    BigInt den = 1;
    for (const auto& x : v) den = lcm(den, BigInt(x.get_den()));
    for (int i = 0; i < 4; ++i) span[j][i] = BigInt(v[i] * Rational(den));
  }
  IMat u1, u2;
  std::size_t rank;
  detail::column_reduce(span, u1, rank);
  IMat perp(2, std::vector<BigInt>(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) perp[j][i] = u1[i][2 + j];
  detail::column_reduce(perp, u2, rank);
  // columns 2, 3 of u2: basis of the saturated Lagrangian; columns 0, 1: a complement
  IMat gram(4, std::vector<BigInt>(4, BigInt(0)));
  gram[0][2] = -1;
  gram[2][0] = 1;
  gram[1][3] = -big(M);
  gram[3][1] = big(M);
  auto col = [&](int j) {
    std::vector<BigInt> v(4);
    for (int i = 0; i < 4; ++i) v[i] = u2[i][j];
    return v;
  };
  auto pair = [&](const std::vector<BigInt>& x, const std::vector<BigInt>& y) {
    BigInt s = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) s += x[i] * gram[i][j] * y[j];
    return s;
  };
  std::vector<BigInt> w[2] = {col(2), col(3)}, c[2] = {col(0), col(1)};
  IMat p(2, std::vector<BigInt>(2));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) p[i][j] = pair(w[i], c[j]);
  IMat l, r;
  detail::smith2(p, l, r);
  std::vector<BigInt> wn[2], cn[2];
  for (int j = 0; j < 2; ++j) {
    wn[j].assign(4, BigInt(0));
    cn[j].assign(4, BigInt(0));
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < 2; ++k) {
        wn[j][i] -= w[k][i] * l[j][k];
        cn[j][i] += c[k][i] * r[k][j];
      }
  }
  BigInt s = pair(cn[0], cn[1]);
  for (int i = 0; i < 4; ++i) cn[1][i] -= s * wn[0][i];
  Mat4 kappa{};
  const std::vector<BigInt>* cols[4] = {&wn[0], &wn[1], &cn[0], &cn[1]};
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      Rational x((*cols[j])[i]);
      if (i == 3) x *= Rational(big(M));
      if (j == 3) x /= Rational(big(M));
      kappa[i][j] = x;
    }
  if (!in_paramodular(kappa, M)) throw VerificationFailure("decomposition left the paramodular group");
  Mat4 u = symplectic_inverse(kappa) * g;
  if (!in_siegel_parabolic(u)) throw VerificationFailure("decomposition left the Siegel parabolic");
  return {kappa, u};
}

/// Coset representatives g_1 g_2 of K(Nq) \ K(N) for a prime q not dividing N:
/// bottom-row completions of P^3(Z/q) times Klingen column representatives.
inline std::vector<Mat4> trace_coset_reps(long long N, long long q) {
  std::vector<Mat4> first;
  for (auto v : p3_reps(q, N)) first.push_back(complete_bottom_row({v[0] * N, v[1] * N, v[2] * N, v[3]}));
  auto second = klingen_column_reps(N);
  std::vector<Mat4> out;
  for (const auto& a : first)
    for (const auto& b : second) out.push_back(a * b);
  return out;
}

}  // namespace pmf
