#pragma once

// Siegel paramodular cusp form expansions stored on canonical class keys,
// with the Gritsenko lift, products, Fourier-Jacobi extraction and
// Atkin-Lehner pullbacks.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "pmf/arith.hpp"
#include "pmf/jacobi.hpp"
#include "pmf/quadform.hpp"

namespace pmf {

/// Truncated expansion of a cusp form in S_k(K(N)).  Coefficients live on
/// canonical keys of definite classes with discriminant 4nmN - r^2 <= det_cap.
class SiegelExpansion {
 public:
  SiegelExpansion() = default;
  SiegelExpansion(int weight, std::shared_ptr<const Level> level, long long det_cap)
      : weight_(weight), level_(std::move(level)), det_cap_(det_cap) {
    if (!level_) throw InvalidInput("SiegelExpansion needs a level");
  }

  int weight() const { return weight_; }
  long long N() const { return level_->N(); }
  const std::shared_ptr<const Level>& level() const { return level_; }
  long long det_cap() const { return det_cap_; }
  const std::map<IndexForm, BigInt>& table() const { return coeffs_; }
  std::optional<int> fricke_sign;
  std::optional<std::vector<int>> al_signature;

  /// Stores a value at the class of t, converting by the determinant sign.
  void set(const IndexForm& t, const BigInt& v) {
    long long D = level_->disc(t);
    if (D <= 0) throw InvalidInput("cusp expansions store only definite indices");
    if (D > det_cap_) return;
    auto ci = level_->canonical(t);
    BigInt val = v;
    if (!ci.plus) val = weight_ % 2 == 0 ? val : BigInt(-val);
    if (ci.plus && ci.minus && weight_ % 2 != 0) {
      if (v != 0) throw VerificationFailure("odd weight coefficient on a class fixed by a determinant -1 element");
      return;
    }
    if (val == 0) coeffs_.erase(ci.key); else coeffs_[ci.key] = val;
  }

  /// a(t) for any semidefinite t; throws PrecisionShortfall beyond the cap.
  BigInt coeff(const IndexForm& t) const {
    long long D = level_->disc(t);
    if (t.n < 0 || t.m < 0 || D < 0) throw InvalidInput("index form is not semidefinite");
    if (D == 0) return 0;
    if (D > det_cap_) throw PrecisionShortfall("Siegel coefficient beyond determinant cap", D);
    auto ci = level_->canonical(t);
    auto it = coeffs_.find(ci.key);
    if (it == coeffs_.end()) return 0;
    if (ci.plus) return it->second;
    return weight_ % 2 == 0 ? it->second : BigInt(-it->second);
  }
  BigInt coeff(long long n, long long r, long long m) const { return coeff(IndexForm{n, r, m}); }

  SiegelExpansion truncated(long long cap) const {
    SiegelExpansion out(weight_, level_, std::min(cap, det_cap_));
    out.fricke_sign = fricke_sign;
    out.al_signature = al_signature;
    for (const auto& [k, v] : coeffs_)
      if (level_->disc(k) <= out.det_cap_) out.coeffs_.emplace(k, v);
    return out;
  }

  /// this += s * o on the common cap.
  SiegelExpansion& axpy(const BigInt& s, const SiegelExpansion& o) {
    if (o.N() != N() || o.weight_ != weight_) throw InvalidInput("axpy: level or weight mismatch");
    *this = truncated(o.det_cap_);
    for (const auto& [k, v] : o.coeffs_) {
      if (level_->disc(k) > det_cap_) continue;
      BigInt nv = s * v;
      auto it = coeffs_.find(k);
      if (it != coeffs_.end()) nv += it->second;
      if (nv == 0) coeffs_.erase(k); else coeffs_[k] = nv;
    }
    if (fricke_sign != o.fricke_sign) fricke_sign.reset();
    if (al_signature != o.al_signature) al_signature.reset();
    return *this;
  }

  friend bool operator==(const SiegelExpansion& a, const SiegelExpansion& b) {
    return a.weight_ == b.weight_ && a.N() == b.N() && a.det_cap_ == b.det_cap_ && a.coeffs_ == b.coeffs_;
  }

  /// Inserts a raw key value without canonicalization (used by readers; the
  /// key must already be canonical).
  void set_canonical(const IndexForm& key, const BigInt& v) {
    if (v == 0) coeffs_.erase(key); else coeffs_[key] = v;
  }

 private:
  int weight_{0};
  std::shared_ptr<const Level> level_;
  long long det_cap_{0};
  std::map<IndexForm, BigInt> coeffs_;
};

/// Fills an expansion by evaluating `value` on every class key up to the cap.
inline SiegelExpansion expansion_from(int weight, std::shared_ptr<const Level> level, long long cap,
                                      const std::function<BigInt(const IndexForm&)>& value) {
  SiegelExpansion f(weight, level, cap);
  for (const auto& key : level->classes_up_to(cap)) {
    auto ci = level->canonical(key);
    if (ci.minus && weight % 2 != 0) continue;
    f.set_canonical(key, value(key));
  }
  return f;
}

/// q-precision a Jacobi form of index N needs to lift up to discriminant cap.
inline int lift_precision_needed(long long N, long long cap) { return static_cast<int>((cap + N * N) / (4 * N)) + 1; }

/// Gritsenko lift: a(n, r, m) = sum_{j | (n, r, m)} j^{k-1} c(nm/j^2, r/j).
inline SiegelExpansion gritsenko_lift(const JacobiExpansion& phi, std::shared_ptr<const Level> level, long long cap) {
  const long long N = level->N();
  if (phi.index() != N) throw InvalidInput("lift input must have index equal to the level");
  if (phi.holomorphy() != Holomorphy::Cusp) throw InvalidInput("lift input must be a cusp form");
  if (phi.weight() < 1) throw InvalidInput("lift input must have positive weight");
  int need = lift_precision_needed(N, cap);
  if (phi.q_precision() < need) throw PrecisionShortfall("Jacobi form too short for the requested cap", need);
  const int k = phi.weight();
  auto value = [&](const IndexForm& t) {
    BigInt acc = 0;
    long long g = std::gcd(std::gcd(t.n, std::llabs(t.r)), t.m);
    for (long long j : divisors(g)) acc += ipow(big(j), k - 1) * phi.coeff(t.n * t.m / (j * j), t.r / j);
    return acc;
  };
  SiegelExpansion f = expansion_from(k, level, cap, value);
  f.fricke_sign = k % 2 == 0 ? 1 : -1;
  return f;
}

/// Product of two cusp expansions at the same level; the result cap is the
/// smaller input cap.
inline SiegelExpansion multiply(const SiegelExpansion& f1, const SiegelExpansion& f2) {
  if (f1.N() != f2.N()) throw InvalidInput("multiply: level mismatch");
  const long long N = f1.N();
  const long long cap = std::min(f1.det_cap(), f2.det_cap());
  auto value = [&](const IndexForm& t) {
    BigInt acc = 0;
    for (long long n1 = 1; n1 < t.n; ++n1)
      for (long long m1 = 1; m1 < t.m; ++m1) {
        long long n2 = t.n - n1, m2 = t.m - m1;
        // 4 n1 m1 N > r1^2 and 4 n2 m2 N > (r - r1)^2
        long long b1 = isqrt(4 * n1 * m1 * N);
        for (long long r1 = -b1; r1 <= b1; ++r1) {
          if (4 * n1 * m1 * N - r1 * r1 <= 0) continue;
          long long r2 = t.r - r1;
          if (4 * n2 * m2 * N - r2 * r2 <= 0) continue;
          BigInt a = f1.coeff(n1, r1, m1);
          if (a == 0) continue;
          acc += a * f2.coeff(n2, r2, m2);
        }
      }
    return acc;
  };
  SiegelExpansion out = expansion_from(f1.weight() + f2.weight(), f1.level(), cap, value);
  if (f1.fricke_sign && f2.fricke_sign) out.fricke_sign = *f1.fricke_sign * *f2.fricke_sign;
  return out;
}

/// phi_m(f) with c(n, r) for n < q_precision (default: the largest the cap allows).
inline JacobiExpansion fourier_jacobi(const SiegelExpansion& f, long long m, int q_precision = -1) {
  if (m < 1) throw InvalidInput("Fourier-Jacobi index must be positive");
  const long long N = f.N(), mN = m * N;
  const int max_prec = static_cast<int>(f.det_cap() / (4 * mN)) + 1;
  if (q_precision < 0) q_precision = max_prec;
  if (q_precision > max_prec) throw PrecisionShortfall("determinant cap too small for the Fourier-Jacobi precision", 4 * mN * (q_precision - 1));
  JacobiExpansion phi(f.weight(), static_cast<int>(mN), Holomorphy::Cusp, q_precision);
  for (long long n = 1; n < q_precision; ++n)
    for (long long r = -mN + 1; r <= mN; ++r) {
      if (4 * n * mN - r * r <= 0) continue;
      BigInt v = f.coeff(n, r, m);
      if (v != 0) phi.set(n, r, v);
    }
  return phi;
}

/// Coefficients of f | mu_c: a(t; f|mu_c) = a(t[alpha_c']; f).
inline SiegelExpansion al_pullback(const SiegelExpansion& f, long long c) {
  const long long N = f.N();
  if (c < 1 || N % c != 0 || std::gcd(c, N / c) != 1) throw InvalidInput("c is not a unitary divisor of N");
  SiegelExpansion out(f.weight(), f.level(), f.det_cap());
  out.fricke_sign = f.fricke_sign;
  out.al_signature = f.al_signature;
  for (const auto& key : f.level()->classes_up_to(f.det_cap())) {
    auto ci = f.level()->canonical(key);
    if (ci.minus && f.weight() % 2 != 0) continue;
    out.set_canonical(key, f.coeff(al_index(key, N, c)));
  }
  return out;
}

}  // namespace pmf
