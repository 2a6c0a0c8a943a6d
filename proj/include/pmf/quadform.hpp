#pragma once

// Index forms t = [[n, r/2], [r/2, mN]] and their classes under the group of
// integral 2x2 matrices of determinant +-1 whose upper-right entry is
// divisible by N, acting by t -> g' t g.
//
// A definite class is identified by the GL2(Z)-reduced form t_o of t together
// with the point of P^1(Z/N) cut out by the second column of a matrix carrying
// t_o to t, minimized over automorphs of t_o.  The canonical key of a class is
// its member with least m, then least r >= 0.

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "pmf/arith.hpp"

namespace pmf {

struct IndexForm {
  long long n{0};
  long long r{0};
  long long m{0};
  friend auto operator<=>(const IndexForm&, const IndexForm&) = default;
};

/// 2x2 integer matrix [[a, b], [c, d]].
struct Mat2 {
  long long a{1}, b{0}, c{0}, d{1};
  long long det() const { return a * d - b * c; }
  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  /// Inverse of a determinant +-1 matrix.
  Mat2 inverse() const {
    long long e = det();
    if (e != 1 && e != -1) throw InvalidInput("Mat2::inverse needs determinant +-1");
    return {d * e, -b * e, -c * e, a * e};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

/// Binary quadratic form A x^2 + B x y + C y^2 (matrix [[A, B/2], [B/2, C]]).
struct BinaryForm {
  long long A{0}, B{0}, C{0};
  long long disc() const { return 4 * A * C - B * B; }
  friend auto operator<=>(const BinaryForm&, const BinaryForm&) = default;
};

/// F[g]: the form x -> F(g x).
inline BinaryForm transform(const BinaryForm& f, const Mat2& g) {
  auto ev = [&](long long x, long long y) { return f.A * x * x + f.B * x * y + f.C * y * y; };
  long long A = ev(g.a, g.c), C = ev(g.b, g.d);
  long long B = 2 * f.A * g.a * g.b + f.B * (g.a * g.d + g.b * g.c) + 2 * f.C * g.c * g.d;
  return {A, B, C};
}

/// GL2(Z)-reduces a positive definite form to 0 <= B <= A <= C.  Returns the
/// reduced form and g with f[g] = reduced.
inline std::pair<BinaryForm, Mat2> gl2_reduce(BinaryForm f) {
  if (f.disc() <= 0 || f.A <= 0) throw InvalidInput("gl2_reduce: form is not positive definite");
  Mat2 g;
  for (;;) {
    // translate B into (-A, A]
    long long k = floor_div(f.A - f.B, 2 * f.A);
    if (k != 0) {
      Mat2 t{1, k, 0, 1};
      f = transform(f, t);
      g = g * t;
    }
    if (f.C < f.A) {
      Mat2 s{0, 1, 1, 0};
      f = transform(f, s);
      g = g * s;
      continue;
    }
    break;
  }
  if (f.B < 0) {
    Mat2 s{1, 0, 0, -1};
    f = transform(f, s);
    g = g * s;
  }
  return {f, g};
}

/// Integral automorphs of a reduced definite form (entries lie in {-1,0,1}).
inline std::vector<Mat2> automorphs(const BinaryForm& f) {
  std::vector<Mat2> out;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c)
        for (int d = -1; d <= 1; ++d) {
          Mat2 h{a, b, c, d};
          long long e = h.det();
          if ((e == 1 || e == -1) && transform(f, h) == f) out.push_back(h);
        }
  return out;
}

/// Squarefree level with helpers for P^1(Z/N) and class canonicalization.
/// Canonicalization results are cached; the cache is guarded by a mutex so a
/// Level may be shared across threads.
class Level {
 public:
  struct ClassInfo {
    IndexForm key;
    bool plus{false};   // some g with t = key[g] has det g = +1
    bool minus{false};  // some g has det g = -1
  };

  explicit Level(long long N) : N_(N) {
    if (N < 1) throw InvalidInput("level must be positive");
    if (!is_squarefree(N)) throw InvalidInput("level must be squarefree");
    primes_ = prime_factors(N);
  }

  long long N() const { return N_; }
  const std::vector<long long>& primes() const { return primes_; }

  /// Size of P^1(Z/N).
  long long p1_size() const {
    long long s = 1;
    for (long long p : primes_) s *= p + 1;
    return s;
  }

  /// Mixed-radix code of the projective point of (x, y) mod N; throws if not primitive.
  long long p1_code(long long x, long long y) const {
    long long code = 0;
    for (long long p : primes_) {
      long long xm = mod(x, p), ym = mod(y, p), c;
      if (xm != 0) c = ym * inv_mod(xm, p) % p;
      else if (ym != 0) c = p;
      else throw InvalidInput("vector is not primitive modulo the level");
      code = code * (p + 1) + c;
    }
    return code;
  }

  /// Representative (x, y) with 0 <= x, y < N of a P^1 code.
  std::pair<long long, long long> p1_point(long long code) const {
    std::vector<long long> digits(primes_.size());
    for (std::size_t i = primes_.size(); i-- > 0;) {
      digits[i] = code % (primes_[i] + 1);
      code /= primes_[i] + 1;
    }
    long long x = 0, y = 0;
    for (std::size_t i = 0; i < primes_.size(); ++i) {
      long long p = primes_[i], M = N_ / p, e = M * inv_mod(M % p, p) % N_;
      long long xp = digits[i] == p ? 0 : 1, yp = digits[i] == p ? 1 : digits[i];
      x = (x + xp * e) % N_;
      y = (y + yp * e) % N_;
    }
    return {x, y};
  }

  /// A matrix in SL2(Z) whose second column reduces to (x, y) mod N.
  Mat2 lift_to_sl2(long long x, long long y) const {
    for (long long j = 0; j < 64; ++j) {
      long long d = y + j * N_;
      if (d == 0) continue;
      for (long long i = 0; i < 64; ++i) {
        long long b = x + i * N_;
        long long u, v;
        long long g = ext_gcd(d, b, u, v);  // u d + v b = g
        if (g != 1 && g != -1) continue;
        // a d - b c = 1 with a = u/g, c = -v/g
        Mat2 m{u * g, b, -v * g, d};
        if (m.det() != 1) continue;
        return m;
      }
    }
    throw VerificationFailure("could not lift projective point to SL2(Z)");
  }

  static BinaryForm as_form(const IndexForm& t, long long N) { return {t.n, t.r, t.m * N}; }
  BinaryForm as_form(const IndexForm& t) const { return as_form(t, N_); }

  IndexForm from_form(const BinaryForm& f) const {
    if (mod(f.C, N_) != 0) throw InvalidInput("form is not an index form of this level");
    return {f.A, f.B, f.C / N_};
  }

  static long long disc(const IndexForm& t, long long N) { return 4 * t.n * t.m * N - t.r * t.r; }
  long long disc(const IndexForm& t) const { return disc(t, N_); }

  /// t[g] for an integral g with upper-right entry divisible by N.
  IndexForm act(const IndexForm& t, const Mat2& g) const {
    if (mod(g.b, N_) != 0) throw InvalidInput("act: matrix is not in the level subgroup");
    return from_form(transform(as_form(t), g));
  }

  struct Invariant {
    BinaryForm reduced;
    long long code;
    friend auto operator<=>(const Invariant&, const Invariant&) = default;
  };

  /// Class invariant of a definite t, plus the determinants realized by
  /// minimizing matrices.
  std::tuple<Invariant, bool, bool> invariant(const IndexForm& t) const {
    auto [red, g0] = gl2_reduce(as_form(t));
    Mat2 g = g0.inverse();  // t = red[g]
    const auto& auts = automorphs_cached(red);
    long long best = -1;
    bool plus = false, minus = false;
    for (const auto& h : auts) {
      Mat2 hg = h * g;
      long long code = p1_code(hg.b, hg.d);
      bool pos = hg.det() == 1;
      if (best < 0 || code < best) {
        best = code;
        plus = pos;
        minus = !pos;
      } else if (code == best) {
        (pos ? plus : minus) = true;
      }
    }
    return {Invariant{red, best}, plus, minus};
  }

  /// Canonical class data of a definite index form.
  ClassInfo canonical(const IndexForm& t) const {
    if (t.n < 0 || t.m < 0) throw InvalidInput("index form has a negative diagonal entry");
    long long D = disc(t);
    if (D < 0) throw InvalidInput("index form is indefinite");
    if (D == 0) throw InvalidInput("semidefinite rank-one index forms are not supported");
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = by_form_.find(t);
      if (it != by_form_.end()) return it->second;
    }
    auto [inv, tp, tm] = invariant(t);
    KeyData kd;
    bool have = false;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = by_invariant_.find(inv);
      if (it != by_invariant_.end()) {
        kd = it->second;
        have = true;
      }
    }
    if (!have) {
      kd = search_key(inv, D, t.m);
      std::lock_guard<std::mutex> lock(mu_);
      by_invariant_.emplace(inv, kd);
    }
    ClassInfo ci;
    ci.key = kd.key;
    // t = key[gamma] with det gamma = det(h_t g_t) * det(h_k g_k)
    ci.plus = (tp && kd.plus) || (tm && kd.minus);
    ci.minus = (tp && kd.minus) || (tm && kd.plus);
    std::lock_guard<std::mutex> lock(mu_);
    by_form_.emplace(t, ci);
    return ci;
  }

  /// Least m over the class of a definite t.
  long long m_N(const IndexForm& t) const { return canonical(t).key.m; }

  /// Canonical keys of all definite classes with 0 < 4nmN - r^2 <= cap.
  std::vector<IndexForm> classes_up_to(long long cap) const {
    std::set<IndexForm> keys;
    const long long P = p1_size();
    std::vector<std::pair<long long, long long>> pts;
    for (long long c = 0; c < P; ++c) pts.push_back(p1_point(c));
    for (long long D = 3; D <= cap; ++D) {
      if (D % 4 != 0 && D % 4 != 3) continue;
      for (const auto& red : reduced_forms(D)) {
        for (const auto& [x, y] : pts) {
          long long val = red.A * x * x + red.B * x * y + red.C * y * y;
          if (mod(val, N_) != 0) continue;
          Mat2 g = lift_to_sl2(x, y);
          IndexForm t = from_form(transform(red, g));
          keys.insert(canonical(t).key);
        }
      }
    }
    return {keys.begin(), keys.end()};
  }

  /// Reduced forms 0 <= B <= A <= C with 4AC - B^2 = D.
  static std::vector<BinaryForm> reduced_forms(long long D) {
    std::vector<BinaryForm> out;
    for (long long A = 1; 3 * A * A <= D; ++A)
      for (long long B = 0; B <= A; ++B) {
        long long num = D + B * B;
        if (num % (4 * A) != 0) continue;
        long long C = num / (4 * A);
        if (C >= A) out.push_back({A, B, C});
      }
    return out;
  }

 private:
  struct KeyData {
    IndexForm key;
    bool plus{false};
    bool minus{false};
  };

  KeyData search_key(const Invariant& inv, long long D, long long m_limit) const {
    for (long long m = 1; m <= m_limit; ++m) {
      const long long mN = m * N_;
      for (long long r = 0; r <= mN; ++r) {
        long long num = D + r * r;
        if (num % (4 * mN) != 0) continue;
        IndexForm cand{num / (4 * mN), r, m};
        auto [red, g0] = gl2_reduce(as_form(cand));
        if (!(red == inv.reduced)) continue;
        auto [ci, cp, cm] = invariant(cand);
        if (ci == inv) return {cand, cp, cm};
      }
    }
    throw VerificationFailure("class key search failed");
  }

  const std::vector<Mat2>& automorphs_cached(const BinaryForm& f) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = auts_.find(f);
    if (it == auts_.end()) it = auts_.emplace(f, automorphs(f)).first;
    return it->second;
  }

  long long N_;
  std::vector<long long> primes_;
  mutable std::mutex mu_;
  mutable std::map<IndexForm, ClassInfo> by_form_;
  mutable std::map<Invariant, KeyData> by_invariant_;
  mutable std::map<BinaryForm, std::vector<Mat2>> auts_;
};

/// Atkin-Lehner pullback index t[alpha_c'] for a unitary divisor c of N.
inline IndexForm al_index(const IndexForm& t, long long N, long long c) {
  if (c < 1 || N % c != 0 || std::gcd(c, N / c) != 1) throw InvalidInput("c is not a unitary divisor of N");
  if (c == 1) return t;
  if (c == N) return {t.m, -t.r, t.n};
  const long long M = N / c;
  const long long ch = mod(inv_mod(M % c, c), c);  // least positive inverse of N/c mod c
  const long long e = 1 - M * ch;
  IndexForm out;
  out.n = t.n * c - t.r * ch + t.m * M * ch * ch;
  out.r = 2 * t.n * N + t.r * (e - ch * M) - 2 * t.m * M * ch * e;
  long long num = t.n * N + t.r * e + t.m * e * e;
  if (num % c != 0) throw VerificationFailure("Atkin-Lehner index is not integral");
  out.m = num / c;
  return out;
}

}  // namespace pmf
