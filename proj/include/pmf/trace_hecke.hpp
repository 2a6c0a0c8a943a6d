#pragma once

// Trace-down from level Nq to level N, Hecke operators T(p), T(p^2) at primes
// not dividing the level, eigen-splitting, and spin Euler factors.

#include <algorithm>
#include <functional>
#include <optional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pmf/linalg.hpp"
#include "pmf/paramodular.hpp"
#include "pmf/symplectic.hpp"

namespace pmf {

/// Exact sum of terms c * e(phase); the value is reduced modulo the
/// cyclotomic polynomial of the common phase denominator.
class CyclotomicSum {
 public:
  void add(const Rational& phase, const Rational& c) {
    if (c == 0) return;
    Rational x = phase - Rational(floor_rational(phase));
    terms_[x] += c;
  }

  /// Common order M of the phases present.
  long long order() const {
    BigInt m = 1;
    for (const auto& [x, c] : terms_) m = lcm(m, BigInt(x.get_den()));
    return m.get_si();
  }

  /// Coefficients on 1, z, ..., z^(phi(M)-1) for z a primitive M-th root.
  std::vector<Rational> reduced() const {
    const long long M = order();
    std::vector<Rational> poly(M, Rational(0));
    for (const auto& [x, c] : terms_) {
      Rational e = x * Rational(big(M));
      poly[BigInt(e).get_si()] += c;
    }
    auto phi = cyclotomic_polynomial(M);
    const std::size_t deg = phi.size() - 1;
    for (std::size_t i = poly.size(); i-- > deg;) {
      Rational lead = poly[i];
      if (lead == 0) continue;
      for (std::size_t j = 0; j <= deg; ++j) poly[i - deg + j] -= lead * Rational(phi[j]);
    }
    poly.resize(deg);
    return poly;
  }

  /// The sum as a rational number; throws if it is not rational.
  Rational value() const {
    if (terms_.empty()) return 0;
    auto r = reduced();
    for (std::size_t i = 1; i < r.size(); ++i)
      if (r[i] != 0) throw VerificationFailure("cyclotomic sum is not rational");
    return r.empty() ? Rational(0) : r[0];
  }

  /// Integer coefficients of the M-th cyclotomic polynomial, constant first.
  static std::vector<BigInt> cyclotomic_polynomial(long long M) {
    std::vector<BigInt> num(M + 1, BigInt(0));
    num[0] = -1;
    num[M] = 1;
    for (long long d : divisors(M)) {
      if (d == M) continue;
      auto den = cyclotomic_polynomial(d);
      // exact division of monic polynomials
      std::vector<BigInt> quo(num.size() - den.size() + 1, BigInt(0));
      for (std::size_t i = quo.size(); i-- > 0;) {
        quo[i] = num[i + den.size() - 1];
        for (std::size_t j = 0; j < den.size(); ++j) num[i + j] -= quo[i] * den[j];
      }
      num = quo;
    }
    return num;
  }

 private:
  static BigInt floor_rational(const Rational& x) {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return q;
  }
  std::map<Rational, Rational> terms_;
};

/// The Levi and unipotent blocks of an element u = [[d*, b], [0, d]] of the
/// Siegel parabolic.
struct ParabolicBlocks {
  std::array<Rational, 4> d;  // d11 d12 d21 d22
  std::array<Rational, 4> b;
  Rational det_d() const { return d[0] * d[3] - d[1] * d[2]; }
};

inline ParabolicBlocks parabolic_blocks(const Mat4& u) {
  return {{u[2][2], u[2][3], u[3][2], u[3][3]}, {u[0][2], u[0][3], u[1][2], u[1][3]}};
}

/// Coset data for the trace from K(Nq) to K(N).
struct TraceDownPlan {
  long long N{1};
  long long q{2};
  std::vector<ParabolicBlocks> blocks;
  Rational max_det_sq{1};  // largest det(d)^2 over the cosets
};

inline TraceDownPlan plan_trace_down(long long N, long long q) {
  if (!is_squarefree(N) || !is_prime(q) || N % q == 0) throw InvalidInput("trace-down needs squarefree N and a prime q not dividing N");
  TraceDownPlan plan{N, q, {}, Rational(0)};
  for (const auto& g : trace_coset_reps(N, q)) {
    auto dec = decompose_paramodular_parabolic(g, N * q);
    if (dec.kappa * dec.u != g) throw VerificationFailure("coset decomposition does not multiply back");
    auto pb = parabolic_blocks(dec.u);
    Rational dd = pb.det_d() * pb.det_d();
    if (dd > plan.max_det_sq) plan.max_det_sq = dd;
    plan.blocks.push_back(pb);
  }
  return plan;
}

/// Determinant cap of the level-Nq input needed for a level-N output cap.
inline long long trace_down_cap_needed(const TraceDownPlan& plan, long long cap) {
  Rational c = plan.max_det_sq * Rational(big(cap));
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), c.get_num_mpz_t(), c.get_den_mpz_t());
  return f.get_si();
}

/// a(t; TrDn f) for the index t = [[n, r/2], [r/2, mN]] of level N.
inline Rational trace_down_coefficient(const TraceDownPlan& plan, const SiegelExpansion& f, const IndexForm& t) {
  const long long Nq = plan.N * plan.q;
  if (f.N() != Nq) throw InvalidInput("trace-down input has the wrong level");
  const int k = f.weight();
  const Rational tn(big(t.n)), tr(make_rational(t.r, 2)), tm(big(t.m * plan.N));
  CyclotomicSum sum;
  for (const auto& pb : plan.blocks) {
    const auto& d = pb.d;
    // s = d t d'
    Rational s11 = d[0] * d[0] * tn + 2 * d[0] * d[1] * tr + d[1] * d[1] * tm;
    Rational s12 = d[0] * d[2] * tn + (d[0] * d[3] + d[1] * d[2]) * tr + d[1] * d[3] * tm;
    Rational s22 = d[2] * d[2] * tn + 2 * d[2] * d[3] * tr + d[3] * d[3] * tm;
    Rational r2 = 2 * s12, mq = s22 / Rational(big(Nq));
    if (!is_integer(s11) || !is_integer(r2) || !is_integer(mq)) continue;
    IndexForm s{BigInt(s11).get_si(), BigInt(r2).get_si(), BigInt(mq).get_si()};
    BigInt a = f.coeff(s);
    if (a == 0) continue;
    // tr(t d' b) with d' b = [[d11 b11 + d21 b21, d11 b12 + d21 b22], [d12 b11 + d22 b21, d12 b12 + d22 b22]]
    const auto& b = pb.b;
    Rational x11 = d[0] * b[0] + d[2] * b[2], x12 = d[0] * b[1] + d[2] * b[3];
    Rational x21 = d[1] * b[0] + d[3] * b[2], x22 = d[1] * b[1] + d[3] * b[3];
    Rational phase = tn * x11 + tr * (x12 + x21) + tm * x22;
    Rational w = 1;
    for (int i = 0; i < k; ++i) w /= pb.det_d();
    sum.add(phase, w * Rational(a));
  }
  return sum.value();
}

/// TrDn f as (integral expansion, denominator): TrDn f = expansion / denominator.
struct TraceDownResult {
  SiegelExpansion scaled;
  BigInt denominator{1};
};

inline TraceDownResult trace_down(const TraceDownPlan& plan, const SiegelExpansion& f, long long det_cap) {
  long long need = trace_down_cap_needed(plan, det_cap);
  if (f.det_cap() < need) throw PrecisionShortfall("trace-down input cap too small", need);
  auto level = std::make_shared<const Level>(plan.N);
  std::map<IndexForm, Rational> values;
  BigInt den = 1;
  for (const auto& key : level->classes_up_to(det_cap)) {
    auto ci = level->canonical(key);
    if (ci.minus && f.weight() % 2 != 0) continue;
    Rational v = trace_down_coefficient(plan, f, key);
    if (v != 0) {
      values.emplace(key, v);
      den = lcm(den, BigInt(v.get_den()));
    }
  }
  TraceDownResult out{SiegelExpansion(f.weight(), level, det_cap), den};
  for (const auto& [key, v] : values) out.scaled.set_canonical(key, BigInt(v * Rational(den)));
  return out;
}

/// One Levi class D = [[d1, x], [0, d2]] of the similitude-m upper-triangular
/// cosets, with the number of translation classes and a basis of the lattice
/// of admissible D'B (coordinates z11, z12, N z22).
struct HeckeLevi {
  long long d1, x, d2;
  BigInt count;
  std::array<std::array<BigInt, 3>, 3> lattice;
};

struct HeckePlan {
  long long N{1};
  long long m{1};
  std::vector<HeckeLevi> levis;
  BigInt coset_count() const {
    BigInt c = 0;
    for (const auto& l : levis) c += l.count;
    return c;
  }
};

namespace detail {

inline BigInt det3(const std::array<std::array<BigInt, 3>, 3>& a) {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

}  // namespace detail

/// Cosets of the full similitude-m Hecke operator at level N, gcd(m, N) = 1.
inline HeckePlan plan_hecke(long long N, long long m) {
  if (m < 1 || std::gcd(m, N) != 1) throw InvalidInput("Hecke operator index must be positive and coprime to the level");
  HeckePlan plan{N, m, {}};
  for (long long d1 : divisors(m))
    for (long long d2 : divisors(m))
      for (long long x = 0; x < d2; ++x) {
        if (mod(m * x, d1 * d2) != 0) continue;
        HeckeLevi lv{d1, x, d2, 0, {}};
        // D'B symmetric: d1 b12 = x b11 + d2 b21; b22 = beta / N
        IMat u;
        std::size_t rank;
        detail::column_reduce(IMat{{big(-x), big(d1), big(-d2), BigInt(0)}}, u, rank);
        for (int j = 0; j < 3; ++j) {
          const BigInt &b11 = u[0][j + 1], &b12 = u[1][j + 1], &beta = u[3][j + 1];
          lv.lattice[j] = {big(d1) * b11, big(d1) * b12, big(N * x) * b12 + big(d2) * beta};
        }
        // D' S D for S = [[s1, s2], [s2, s3 / N]] in the same coordinates
        std::array<std::array<BigInt, 3>, 3> l2;
        l2[0] = {big(d1 * d1), big(d1 * x), big(N * x * x)};
        l2[1] = {BigInt(0), big(d1 * d2), big(2 * N * x * d2)};
        l2[2] = {BigInt(0), BigInt(0), big(d2 * d2)};
        BigInt a = abs(detail::det3(lv.lattice)), b = abs(detail::det3(l2));
        if (a == 0 || b % a != 0) throw VerificationFailure("Hecke translation lattice index is not integral");
        lv.count = b / a;
        plan.levis.push_back(lv);
      }
  return plan;
}

/// a(t; T(m) f) with T(m) = m^(2k-3) sum det(D)^(-k) f((A Z + B) D^(-1)).
inline BigInt hecke_coefficient(const HeckePlan& plan, const SiegelExpansion& f, const IndexForm& t) {
  if (f.N() != plan.N) throw InvalidInput("Hecke plan built for another level");
  const long long N = plan.N, m = plan.m;
  const int k = f.weight();
  Rational total = 0;
  for (const auto& lv : plan.levis) {
    bool trivial = true;
    for (const auto& z : lv.lattice) {
      BigInt v = big(t.n) * z[0] + big(t.r) * z[1] + big(t.m) * z[2];
      if (v % static_cast<long>(m) != 0) { trivial = false; break; }
    }
    if (!trivial) continue;
    const long long d1 = lv.d1, x = lv.x, d2 = lv.d2;
    BigInt s11 = big(d1 * d1) * big(t.n) + big(d1 * x) * big(t.r) + big(x * x) * big(N) * big(t.m);
    BigInt r2 = big(d1 * d2) * big(t.r) + big(2 * x * d2) * big(N) * big(t.m);
    BigInt m2 = big(d2 * d2) * big(t.m);
    if (s11 % static_cast<long>(m) != 0 || r2 % static_cast<long>(m) != 0 || m2 % static_cast<long>(m) != 0) continue;
    IndexForm s{BigInt(s11 / static_cast<long>(m)).get_si(), BigInt(r2 / static_cast<long>(m)).get_si(),
                BigInt(m2 / static_cast<long>(m)).get_si()};
    BigInt a = f.coeff(s);
    if (a == 0) continue;
    total += Rational(lv.count * a) * rpow(m, 2 * k - 3) * rpow(d1 * d2, -k);
  }
  if (!is_integer(total)) throw VerificationFailure("Hecke image coefficient is not integral");
  return total.get_num();
}

/// T(m) f on classes up to det_cap; needs f's cap >= m^2 det_cap.
inline SiegelExpansion hecke_T(const SiegelExpansion& f, long long m, long long det_cap) {
  const long long need = m * m * det_cap;
  if (f.det_cap() < need) throw PrecisionShortfall("Hecke operator needs a larger input cap", need);
  auto plan = plan_hecke(f.N(), m);
  SiegelExpansion out =
      expansion_from(f.weight(), f.level(), det_cap, [&](const IndexForm& t) { return hecke_coefficient(plan, f, t); });
  out.fricke_sign = f.fricke_sign;
  out.al_signature = f.al_signature;
  return out;
}

/// Operators T_{0,1}(p), T_{1,0}(p) for p dividing the level.  Not implemented:
/// acceptance only uses primes coprime to the level.
inline SiegelExpansion hecke_T_bad_prime(const SiegelExpansion& f, long long p, int which, long long det_cap) {
  (void)det_cap;
  (void)which;
  if (f.N() % p != 0) throw InvalidInput("prime does not divide the level");
  throw InvalidInput("Hecke operators at primes dividing the level are experimental and not available");
}

/// Spin Euler factor of a weight-k eigenform at a good prime, constant term
/// first: 1 - l1 T + (l1^2 - l2 - p^(2k-4)) T^2 - l1 p^(2k-3) T^3 + p^(4k-6) T^4.
inline std::vector<BigInt> spin_euler_factor(const BigInt& lp, const BigInt& lp2, long long p, int k = 2) {
  if (!is_prime(p)) throw InvalidInput("Euler factor needs a prime");
  BigInt a = ipow(big(p), 2 * k - 4), b = ipow(big(p), 2 * k - 3), c = ipow(big(p), 4 * k - 6);
  return {BigInt(1), -lp, lp * lp - lp2 - a, -lp * b, c};
}

/// Polynomial in T with integer coefficients, e.g. "1+2T+3T^2".
inline std::string polynomial_string(const std::vector<BigInt>& c, const std::string& var = "T") {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    BigInt a = abs(c[i]);
    bool neg = c[i] < 0;
    if (out.empty()) {
      if (neg) out += "-";
    } else {
      out += neg ? "-" : "+";
    }
    if (i == 0 || a != 1) out += a.get_str();
    if (i >= 1) out += var;
    if (i >= 2) out += "^" + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

/// Matrix of an operator on span(space): op(space[i]) = sum_j M[i][j] space[j],
/// solved on the classes common to the images.  Throws if an image leaves
/// the span or the space is dependent on those classes.
inline QMatrix operator_matrix(const std::vector<SiegelExpansion>& space,
                               const std::function<SiegelExpansion(const SiegelExpansion&)>& op) {
  if (space.empty()) return {};
  std::vector<SiegelExpansion> images;
  long long cap = space[0].det_cap();
  for (const auto& f : space) {
    images.push_back(op(f));
    cap = std::min(cap, images.back().det_cap());
  }
  const auto keys = space[0].level()->classes_up_to(cap);
  const std::size_t n = space.size();
  // rows: classes; columns: basis elements, then one image
  QMatrix a(keys.size(), std::vector<Rational>(n));
  for (std::size_t r = 0; r < keys.size(); ++r)
    for (std::size_t j = 0; j < n; ++j) a[r][j] = Rational(space[j].coeff(keys[r]));
  if (rank_q(a) != n) throw InvalidInput("space is linearly dependent on the classes within the image cap");
  QMatrix m(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i) {
    QMatrix aug = a;
    for (std::size_t r = 0; r < keys.size(); ++r) aug[r].push_back(Rational(images[i].coeff(keys[r])));
    auto piv = rref(aug);
    if (!piv.empty() && piv.back() == n) {
      // locate the offending class
      std::string where;
      for (std::size_t r = 0; r < aug.size(); ++r)
        if (aug[r][n] != 0 && std::all_of(aug[r].begin(), aug[r].begin() + n, [](const Rational& x) { return x == 0; })) {
          where = "row " + std::to_string(r);
          break;
        }
      throw VerificationFailure("span not stable under the operator: image " + std::to_string(i) + " has residual at " + where);
    }
    for (std::size_t k = 0; k < piv.size(); ++k) m[i][piv[k]] = aug[k][n];
  }
  return m;
}

struct EigenPair {
  BigInt value;
  std::vector<std::vector<Rational>> vectors;  // coordinates on the space
};

struct EigenSplit {
  QMatrix matrix;
  std::vector<EigenPair> pairs;
  std::size_t unsplit_dimension{0};  // dimension not covered by integer eigenvalues
};

/// Characteristic polynomial det(x I - M), constant term first (Faddeev-LeVerrier).
inline std::vector<Rational> characteristic_polynomial(const QMatrix& m) {
  const std::size_t n = m.size();
  std::vector<Rational> c(n + 1, Rational(0));
  c[n] = 1;
  QMatrix mk(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t k = 1; k <= n; ++k) {
    // mk <- M (mk + c[n-k+1] I)
    QMatrix t = mk;
    for (std::size_t i = 0; i < n; ++i) t[i][i] += c[n - k + 1];
    QMatrix next(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) {
        if (m[i][l] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) next[i][j] += m[i][l] * t[l][j];
      }
    mk = next;
    Rational tr = 0;
    for (std::size_t i = 0; i < n; ++i) tr += mk[i][i];
    c[n - k] = -tr / Rational(big(static_cast<long long>(k)));
  }
  return c;
}

/// Splits span(space) into eigenspaces of op with integer eigenvalues (Hecke
/// eigenvalues on integral forms are algebraic integers).
inline EigenSplit eigen_split(const std::vector<SiegelExpansion>& space,
                              const std::function<SiegelExpansion(const SiegelExpansion&)>& op) {
  EigenSplit out;
  out.matrix = operator_matrix(space, op);
  const std::size_t n = space.size();
  auto poly = characteristic_polynomial(out.matrix);
  std::vector<BigInt> roots;
  std::size_t found = 0;
  for (;;) {
    // strip zero roots
    if (poly.size() > 1 && poly[0] == 0) {
      roots.push_back(0);
      poly.erase(poly.begin());
      continue;
    }
    if (poly.size() <= 1) break;
    bool integral = true;
    for (const auto& c : poly) integral = integral && is_integer(c);
    if (!integral) break;
    // integer roots divide the constant term
    BigInt c0 = abs(poly[0].get_num());
    std::optional<BigInt> root;
    auto try_root = [&](const BigInt& r) {
      Rational v = 0;
      for (std::size_t i = poly.size(); i-- > 0;) v = v * Rational(r) + poly[i];
      return v == 0;
    };
    for (BigInt d = 1; d * d <= c0 && !root; ++d) {
      if (c0 % d != 0) continue;
      for (const BigInt& cand : {d, BigInt(-d), BigInt(c0 / d), BigInt(-(c0 / d))})
        if (!root && try_root(cand)) root = cand;
    }
    if (!root) break;
    roots.push_back(*root);
    // synthetic division by (x - root)
    std::vector<Rational> q(poly.size() - 1);
    Rational carry = 0;
    for (std::size_t i = poly.size(); i-- > 1;) {
      carry = carry * Rational(*root) + poly[i];
      q[i - 1] = carry;
    }
    poly = q;
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  for (const auto& lam : roots) {
    // left eigenvectors: v M = lam v
    QMatrix a(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i][j] = out.matrix[j][i] - (i == j ? Rational(lam) : Rational(0));
    auto ker = kernel(a, n);
    found += ker.size();
    out.pairs.push_back({lam, ker});
  }
  out.unsplit_dimension = n - found;
  return out;
}

/// Linear combination sum c_i space[i] with rational c (scaled to integral).
inline SiegelExpansion combine(const std::vector<SiegelExpansion>& space, const std::vector<Rational>& c) {
  auto prim = primitive_integer(c);
  SiegelExpansion out(space.at(0).weight(), space[0].level(), space[0].det_cap());
  for (std::size_t i = 0; i < space.size(); ++i)
    if (prim[i] != 0) out.axpy(prim[i], space[i]);
  return out;
}

}  // namespace pmf
