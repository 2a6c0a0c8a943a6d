#pragma once

// Exact bases of holomorphic and cusp Jacobi forms of even weight built from
// the weak ring generators phi_{-2,1}, phi_{0,1} over E4, E6.

#include <vector>

#include "pmf/jacobi.hpp"
#include "pmf/linalg.hpp"
#include "pmf/series.hpp"
#include "pmf/theta.hpp"

namespace pmf {

/// 1 + c * sum_{n>=1} sigma_{power}(n) q^n
inline FourierSeries<Rational> eisenstein_series(int power, long c, int precision) {
  FourierSeries<Rational> s(precision);
  s.add_term(0, 0, Rational(1));
  for (int n = 1; n < precision; ++n) {
    BigInt sigma = 0;
    for (long long d : divisors(n)) sigma += ipow(big(d), power);
    s.add_term(n, 0, Rational(sigma * c));
  }
  return s;
}

inline FourierSeries<Rational> e2_series(int p) { return eisenstein_series(1, -24, p); }
inline FourierSeries<Rational> e4_series(int p) { return eisenstein_series(3, 240, p); }
inline FourierSeries<Rational> e6_series(int p) { return eisenstein_series(5, -504, p); }

/// theta^2 / eta^6, weight -2 index 1.
inline FourierSeries<Rational> phi_m2_1(int precision) {
  ThetaBlockSpec s;
  s.phi[0] = -4;
  s.phi[1] = 2;
  return convert<Rational>(tb_expand(s, precision)).realigned(0, 0);
}

/// Weight 0 index 1 generator: -24 (D + (5/24) E2) phi_{-2,1}, where D acts on
/// q^n zeta^r by n - r^2/4.
inline FourierSeries<Rational> phi_0_1(int precision) {
  auto a = phi_m2_1(precision);
  FourierSeries<Rational> d(precision);
  for (const auto& [n, p] : a.terms())
    for (const auto& [k2, c] : p) {
      Rational r(k2, 2);
      d.add_term(n, k2, c * (Rational(n) - r * r / 4));
    }
  auto sum = d + (e2_series(precision) * a).scaled(Rational(5, 24));
  return sum.scaled(Rational(-24));
}

/// Monomials E4^a E6^b phi_{-2,1}^i phi_{0,1}^{m-i} spanning weak forms of
/// weight k and index m.
inline std::vector<FourierSeries<Rational>> weak_spanning_set(int k, int m, int precision) {
  std::vector<FourierSeries<Rational>> out;
  auto e4 = e4_series(precision), e6 = e6_series(precision);
  auto a = phi_m2_1(precision), b = phi_0_1(precision);
  auto one = FourierSeries<Rational>::one(precision);
  std::vector<FourierSeries<Rational>> apow{one}, bpow{one};
  for (int i = 1; i <= m; ++i) {
    apow.push_back(apow.back() * a);
    bpow.push_back(bpow.back() * b);
  }
  for (int i = 0; i <= m; ++i) {
    int w = k + 2 * i;
    if (w < 0 || w % 2 != 0) continue;
    auto jac = apow[i] * bpow[m - i];
    for (int b6 = 0; 6 * b6 <= w; ++b6) {
      int rest = w - 6 * b6;
      if (rest % 4 != 0) continue;
      int a4 = rest / 4;
      auto f = jac;
      for (int t = 0; t < a4; ++t) f = f * e4;
      for (int t = 0; t < b6; ++t) f = f * e6;
      out.push_back(f);
    }
  }
  return out;
}

/// Basis of J_{k,m} (cusp = true: cusp forms) with c(n, r) for n < q_precision,
/// as primitive integral expansions.
inline std::vector<JacobiExpansion> jacobi_basis_from_weak_ring(int k, int m, int q_precision, bool cusp) {
  if (m < 1) throw InvalidInput("index must be positive");
  if (k % 2 != 0) throw InvalidInput("weak ring bases are implemented for even weight");
  const int prec = std::max(q_precision, m / 4 + 1);
  auto span = weak_spanning_set(k, m, prec);
  // Constraints: coefficients with 4nm - r^2 < 0 (or <= 0 for cusp forms).
  std::vector<std::pair<int, int>> bad;
  for (int n = 0; n <= m / 4; ++n)
    for (int r = -m; r <= m; ++r) {
      long long d = 4LL * n * m - static_cast<long long>(r) * r;
      if (d < 0 || (cusp && d == 0)) bad.emplace_back(n, r);
    }
  QMatrix cons(bad.size(), std::vector<Rational>(span.size()));
  for (std::size_t j = 0; j < span.size(); ++j)
    for (std::size_t i = 0; i < bad.size(); ++i) cons[i][j] = span[j].coeff(bad[i].first, 2 * bad[i].second);
  QMatrix ker = kernel(cons, span.size());
  std::vector<JacobiExpansion> out;
  for (const auto& v : ker) {
    FourierSeries<Rational> f(prec);
    for (std::size_t j = 0; j < span.size(); ++j)
      if (v[j] != 0) f = f + span[j].scaled(v[j]);
    // normalize to a primitive integral expansion
    std::vector<Rational> flat;
    for (const auto& [n, p] : f.terms())
      for (const auto& [k2, c] : p) flat.push_back(c);
    auto prim = primitive_integer(flat);
    Rational scale = prim.empty() ? Rational(1) : Rational(prim[0]) / flat[0];
    auto fz = convert<BigInt>(f.scaled(scale)).truncated(q_precision);
    JacobiExpansion j = jacobi_from_series(fz, k, m, cusp ? Holomorphy::Cusp : Holomorphy::Weak);
    j.provenance = "weak-ring";
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace pmf
