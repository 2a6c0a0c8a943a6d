#pragma once

// Borcherds products of weight-0 weakly holomorphic Jacobi forms: invariants,
// Humbert multiplicities, holomorphy and cuspidality criteria, and truncated
// expansions by the product and the exponential-series formulas.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pmf/arith.hpp"
#include "pmf/jacobi.hpp"
#include "pmf/paramodular.hpp"
#include "pmf/series.hpp"
#include "pmf/theta.hpp"

namespace pmf {

struct BorcherdsInvariants {
  int k{0};
  Rational A, B, C;
  long long D0{0};
  int epsilon{1};
};

struct HumbertRow {
  long long d;
  long long r;  // representative of r mod 2N in [0, N]
  BigInt mult;
  friend bool operator==(const HumbertRow&, const HumbertRow&) = default;
};

/// k = c(0,0)/2, A = c(0,0)/24 + sum_{r>0} c(0,r)/12, B = sum_{r>0} r c(0,r)/2,
/// C = sum_{r>0} r^2 c(0,r)/2, D0 = sum_{n<0} sigma_0(|n|) c(n,0).
inline BorcherdsInvariants invariants(const JacobiExpansion& psi) {
  if (psi.weight() != 0) throw InvalidInput("Borcherds input must have weight 0");
  auto sing = singular_part(psi);  // enforces precision above index/4
  const long long N = psi.index();
  BorcherdsInvariants inv;
  BigInt c00 = psi.coeff(0, 0);
  if (c00 % 2 != 0) throw InvalidInput("c(0,0) must be even to define an integral weight");
  inv.k = static_cast<int>(BigInt(c00 / 2).get_si());
  Rational sum1 = 0, sumr = 0, sumr2 = 0;
  for (long long r = 1; r <= N; ++r) {
    BigInt c = psi.coeff(0, r);
    if (c == 0) continue;
    sum1 += Rational(c);
    sumr += Rational(c * big(r));
    sumr2 += Rational(c * big(r * r));
  }
  inv.A = Rational(c00) / 24 + sum1 / 12;
  inv.B = sumr / 2;
  inv.C = sumr2 / 2;
  inv.A.canonicalize();
  inv.B.canonicalize();
  inv.C.canonicalize();
  BigInt d0 = 0;
  for (const auto& [key, c] : psi.table())
    if (key.first < 0 && key.second == 0) d0 += c * big(sigma0(-key.first));
  inv.D0 = d0.get_si();
  inv.epsilon = ((inv.k + inv.D0) % 2 == 0) ? 1 : -1;
  return inv;
}

/// sum_{j >= 1} c at discriminant -j^2 d in class j r mod 2N.
inline BigInt humbert_multiplicity(const JacobiExpansion& psi, long long d, long long r) {
  const long long N = psi.index();
  if (d <= 0) throw InvalidInput("Humbert discriminant must be positive");
  if (mod(r * r - d, 4 * N) != 0) throw InvalidInput("(d, r) is not realizable: r^2 != d mod 4N");
  auto floor_disc = psi.min_discriminant();
  BigInt acc = 0;
  for (long long j = 1;; ++j) {
    long long D = -j * j * d;
    if (!floor_disc || D < *floor_disc) break;
    acc += psi.coeff_by_discriminant(D, j * r);
  }
  return acc;
}

/// All realizable (d, r mod 2N) for which some term of the multiplicity sum
/// can be nonzero, with their multiplicities, sorted by (d, r).
inline std::vector<HumbertRow> humbert_table(const JacobiExpansion& psi) {
  const long long N = psi.index();
  std::set<std::pair<long long, long long>> cands;
  for (const auto& t : singular_part(psi)) {
    long long D = 4 * t.n * N - t.r * t.r;
    if (D >= 0) continue;
    for (long long j = 1; j * j <= -D; ++j) {
      if ((-D) % (j * j) != 0) continue;
      long long d = -D / (j * j);
      for (long long r = 0; r < 2 * N; ++r) {
        long long jr = mod(j * r, 2 * N);
        if (jr != mod(t.r, 2 * N) && jr != mod(-t.r, 2 * N)) continue;
        if (mod(r * r - d, 4 * N) != 0) continue;
        cands.emplace(d, std::min(r, 2 * N - r));
      }
    }
  }
  std::vector<HumbertRow> out;
  for (auto [d, r] : cands) out.push_back({d, r, humbert_multiplicity(psi, d, r)});
  return out;
}

struct HolomorphyCertificate {
  bool integral{true};
  bool A_integral{false};
  bool multiplicities_nonnegative{false};
  bool holomorphic{false};
  BorcherdsInvariants inv;
  std::vector<HumbertRow> humbert;
};

inline HolomorphyCertificate certify_holomorphic(const JacobiExpansion& psi) {
  HolomorphyCertificate cert;
  cert.inv = invariants(psi);
  cert.humbert = humbert_table(psi);
  cert.integral = true;  // coefficients are stored as integers
  cert.A_integral = is_integer(cert.inv.A);
  cert.multiplicities_nonnegative = true;
  for (const auto& row : cert.humbert)
    if (row.mult < 0) cert.multiplicities_nonnegative = false;
  cert.holomorphic = cert.integral && cert.A_integral && cert.multiplicities_nonnegative;
  return cert;
}

enum class CuspVerdict { Cusp, NotCusp, Inapplicable };

inline std::string to_string(CuspVerdict v) {
  switch (v) {
    case CuspVerdict::Cusp: return "cusp";
    case CuspVerdict::NotCusp: return "not-cusp";
    default: return "inapplicable";
  }
}

/// Cuspidality of a holomorphic Borcherds product at squarefree level: odd
/// weight or weight 2 always; weights 4, 6, 8, 10, 14 exactly when C > 0.
inline CuspVerdict is_paramodular_cusp(const BorcherdsInvariants& inv, long long N) {
  if (!is_squarefree(N)) throw InvalidInput("cuspidality criterion needs squarefree level");
  if (inv.k % 2 != 0 || inv.k == 2) return CuspVerdict::Cusp;
  switch (inv.k) {
    case 4: case 6: case 8: case 10: case 14:
      return inv.C > 0 ? CuspVerdict::Cusp : CuspVerdict::NotCusp;
    default:
      return CuspVerdict::Inapplicable;
  }
}

/// Series in q and zeta of a Jacobi expansion over all r, on q-orders below
/// q_precision, starting at the least stored q-order.
inline FourierSeries<BigInt> series_from_jacobi(const JacobiExpansion& j, int q_precision) {
  long long nmin = 0;
  for (const auto& [k, c] : j.table()) nmin = std::min(nmin, k.first);
  auto floor_disc = j.min_discriminant();
  const long long m = j.index();
  if (q_precision > j.q_precision()) throw PrecisionShortfall("series_from_jacobi beyond stored precision", q_precision);
  FourierSeries<BigInt> s(static_cast<int>(q_precision - nmin), Rational(big(nmin)), 0);
  if (!floor_disc) return s;
  for (long long n = nmin; n < q_precision; ++n) {
    long long bound2 = 4 * n * m - *floor_disc;
    if (bound2 < 0) continue;
    long long rb = isqrt(bound2);
    for (long long r = -rb; r <= rb; ++r) {
      BigInt c = j.coeff(n, r);
      if (c != 0) s.add_term(static_cast<int>(n - nmin), static_cast<int>(2 * r), c);
    }
  }
  return s;
}

/// Weight-0 form from a weight-12 numerator divided by Delta.
inline JacobiExpansion bp_plus_input(const JacobiExpansion& psi12) {
  if (psi12.weight() != 12) throw InvalidInput("numerator must have weight 12");
  const int P = psi12.q_precision();
  ThetaBlockSpec delta;
  delta.phi[0] = 24;
  auto num = series_from_jacobi(psi12, P);
  auto den = tb_expand(delta, P);
  auto q = num * invert(den);
  JacobiExpansion out = jacobi_from_series(q, 0, psi12.index(), Holomorphy::WeaklyHolomorphic);
  out.provenance = psi12.provenance.empty() ? "" : "(" + psi12.provenance + ")/Delta";
  return out;
}

/// Weight-0 form phi|V_2 / phi + correction/Delta for a holomorphic
/// weight-k Jacobi form phi.  The q-precision of the result is reported.
inline JacobiExpansion bp_minus_input(const JacobiExpansion& phi, const JacobiExpansion* correction12 = nullptr) {
  auto v2 = apply_V(phi, 2);
  const int P = v2.q_precision();
  auto num = series_from_jacobi(v2, P);
  auto den = series_from_jacobi(phi, P);
  auto q = divide_exact(num, den);
  JacobiExpansion out = jacobi_from_series(q, 0, phi.index(), Holomorphy::WeaklyHolomorphic);
  if (correction12) {
    auto extra = bp_plus_input(*correction12);
    out.axpy(BigInt(1), extra);
  }
  out.provenance = phi.provenance.empty() ? "" : phi.provenance + "|V2/" + phi.provenance;
  return out;
}

/// Truncated Fourier-Jacobi expansion: level i holds the coefficient of
/// xi^{C + iN} as a series in q, zeta with integral exponents (q offset =
/// first q-order, zeta offset 0), valid on q-orders below q_limit.
struct FJTruncation {
  long long N{0};
  long long C{0};
  long long q_limit{0};
  std::vector<FourierSeries<BigInt>> levels;
};

namespace detail {

/// Sparse (n, r) -> value table for one xi-level.
using Grid = std::map<std::pair<long long, long long>, BigInt>;

inline FourierSeries<BigInt> grid_to_series(const Grid& g, long long qlo, long long q_limit) {
  FourierSeries<BigInt> s(static_cast<int>(q_limit - qlo), Rational(big(qlo)), 0);
  for (const auto& [k, c] : g) {
    if (k.first < qlo) throw VerificationFailure("term below the expected q-order");
    if (k.first < q_limit) s.add_term(static_cast<int>(k.first - qlo), static_cast<int>(2 * k.second), c);
  }
  return s;
}

/// Least q-order any Jacobi coefficient of psi can have at index nm for a
/// fixed multiple m (used to bound factor ranges).
inline long long least_q(const JacobiExpansion& psi) {
  long long nmin = 0;
  for (const auto& [k, c] : psi.table()) nmin = std::min(nmin, k.first);
  return nmin;
}

}  // namespace detail

/// Product formula: q^A zeta^B xi^C prod (1 - q^n zeta^r xi^{mN})^{c(nm, r)}.
inline FJTruncation bl_expand_product(const JacobiExpansion& psi, int fj_terms, long long q_steps) {
  auto inv = invariants(psi);
  if (!is_integer(inv.A) || !is_integer(inv.B) || !is_integer(inv.C)) throw InvalidInput("A, B, C must be integral");
  if (detail::least_q(psi) < 0) throw InvalidInput("product expansion implemented for inputs without negative q-orders");
  const long long N = psi.index();
  const long long A = inv.A.get_num().get_si(), B = inv.B.get_num().get_si();
  const long long q_limit = A + q_steps;
  const long long floor_disc = psi.min_discriminant().value_or(0);
  // psi coefficients are needed for c(nm, r) with n < q_steps, m < fj_terms.
  const long long need = std::max<long long>(N / 4, (q_steps - 1) * (fj_terms - 1)) + 1;
  if (psi.q_precision() < need) throw PrecisionShortfall("weight-0 input too short for the requested expansion", need);

  std::vector<detail::Grid> lv(fj_terms);
  lv[0][{A, B}] = 1;
  // Multiplies the truncated object by (1 - X)^e with X = q^n zeta^r xi^{mN};
  // terms at or beyond q_limit are dropped.
  auto apply = [&](long long n, long long r, long long m, const BigInt& e) {
    if (e == 0) return;
    long long pmax;
    if (m > 0) {
      pmax = (fj_terms - 1) / m;
    } else if (n > 0) {
      pmax = (q_steps - 1) / n;
    } else {
      if (e < 0) throw InvalidInput("negative multiplicity on a pure zeta factor");
      pmax = e.get_si();
    }
    // (1 - X)^e = sum_p binom(e, p) (-X)^p, a series for negative e
    std::vector<BigInt> coef(pmax + 1);
    coef[0] = 1;
    for (long long p = 1; p <= pmax; ++p) coef[p] = -coef[p - 1] * (e - big(p - 1)) / big(p);
    for (int j = fj_terms - 1; j >= 0; --j) {
      detail::Grid add;
      for (long long p = 1; p <= pmax; ++p) {
        long long i = j - p * m;
        if (i < 0 || coef[p] == 0) continue;
        for (const auto& [k, c] : lv[i]) {
          long long nn = k.first + p * n;
          if (nn >= q_limit) continue;
          add[{nn, k.second + p * r}] += c * coef[p];
        }
      }
      for (auto& [k, c] : add) {
        BigInt& slot = lv[j][k];
        slot += c;
        if (slot == 0) lv[j].erase(k);
      }
    }
  };
  const long long rb0 = isqrt(std::max<long long>(0, -floor_disc));
  for (long long n = 0; n < q_steps; ++n)
    for (long long r = -rb0; r <= rb0; ++r) {
      if (n == 0 && r >= 0) continue;
      apply(n, r, 0, psi.coeff(0, r));
    }
  for (long long m = 1; m < fj_terms; ++m)
    for (long long n = 0; n < q_steps; ++n) {
      long long bound2 = 4 * n * m * N - floor_disc;
      if (bound2 < 0) continue;
      long long rb = isqrt(bound2);
      for (long long r = -rb; r <= rb; ++r) apply(n, r, m, psi.coeff(n * m, r));
    }
  FJTruncation out;
  out.N = N;
  out.C = inv.C.get_num().get_si();
  out.q_limit = q_limit;
  for (const auto& g : lv) out.levels.push_back(detail::grid_to_series(g, A, q_limit));
  return out;
}

/// Series formula: TB(phi) xi^C exp(-G) where G has xi^{mN}-coefficient
/// sum_{n,r} sum_{j | (n,r,m)} j^{-1} c(nm/j^2, r/j) q^n zeta^r, phi(r) = c(0,r).
inline FJTruncation bl_expand_series(const JacobiExpansion& psi, int fj_terms, long long q_steps) {
  auto inv = invariants(psi);
  if (!is_integer(inv.A) || !is_integer(inv.B) || !is_integer(inv.C)) throw InvalidInput("A, B, C must be integral");
  if (detail::least_q(psi) < 0) throw InvalidInput("series expansion implemented for inputs without negative q-orders");
  const long long N = psi.index();
  const long long A = inv.A.get_num().get_si();
  const long long floor_disc = psi.min_discriminant().value_or(0);
  const long long need = std::max<long long>(N / 4, (q_steps - 1) * (fj_terms - 1)) + 1;
  if (psi.q_precision() < need) throw PrecisionShortfall("weight-0 input too short for the requested expansion", need);
  const int P = static_cast<int>(q_steps);

  using RS = FourierSeries<Rational>;
  std::vector<RS> g(fj_terms, RS(P));
  for (long long m = 1; m < fj_terms; ++m)
    for (long long n = 0; n < q_steps; ++n) {
      long long bound2 = 4 * n * m * N - m * m * floor_disc;
      if (bound2 < 0) continue;
      long long rb = isqrt(bound2);
      for (long long r = -rb; r <= rb; ++r) {
        Rational a = 0;
        long long g3 = gcd3(n, r < 0 ? -r : r, m);
        for (long long j : divisors(g3))
          a += Rational(psi.coeff(n * m / (j * j), r / j), big(j));
        a.canonicalize();
        if (a != 0) g[m].add_term(static_cast<int>(n), static_cast<int>(2 * r), a);
      }
    }
  auto e = graded_exp_neg(g, RS::one(P));

  ThetaBlockSpec spec;
  for (const auto& t : singular_part(psi))
    if (t.n == 0 && t.r >= 0 && t.c != 0) spec.phi[static_cast<int>(t.r)] = static_cast<int>(t.c.get_si());
  auto tb = convert<Rational>(tb_expand(spec, P));

  FJTruncation out;
  out.N = N;
  out.C = inv.C.get_num().get_si();
  out.q_limit = A + q_steps;
  for (int i = 0; i < fj_terms; ++i) {
    auto level = (tb * e[i]).truncated(P).realigned(Rational(big(A)), Rational(0));
    out.levels.push_back(convert<BigInt>(level));
  }
  return out;
}

/// Siegel coefficients from a truncated Fourier-Jacobi expansion.  Every
/// class with discriminant at most the returned cap has its canonical
/// representative inside the window (or below the first nonzero level, where
/// the coefficient vanishes); every representative in the window must agree.
inline SiegelExpansion siegel_from_fj(const FJTruncation& fj, int weight, std::shared_ptr<const Level> level,
                                      long long det_cap) {
  const long long N = level->N();
  if (fj.N != N) throw InvalidInput("level mismatch");
  if (fj.C % N != 0) throw InvalidInput("first xi exponent is not a multiple of the level");
  const long long m0 = fj.C / N, m1 = m0 + static_cast<long long>(fj.levels.size()) - 1;
  auto at = [&](long long n, long long r, long long m) -> std::optional<BigInt> {
    if (m < m0) return BigInt(0);
    if (m > m1 || n >= fj.q_limit) return std::nullopt;
    const auto& s = fj.levels[m - m0];
    long long qoff = s.q_offset().get_num().get_si();
    if (n < qoff) return BigInt(0);
    return s.coeff(static_cast<int>(n - qoff), static_cast<int>(2 * r));
  };
  SiegelExpansion out(weight, level, det_cap);
  std::optional<long long> usable;
  for (const auto& key : level->classes_up_to(det_cap)) {
    auto v = at(key.n, key.r, key.m);
    if (!v) {
      long long c = level->disc(key) - 1;
      usable = usable ? std::min(*usable, c) : c;
      continue;
    }
    out.set_canonical(key, *v);
  }
  if (usable) throw PrecisionShortfall("class outside the Fourier-Jacobi window; largest usable cap", *usable);
  // consistency over every window entry with discriminant up to the cap
  for (long long m = m0; m <= m1; ++m)
    for (long long n = 0; n < fj.q_limit; ++n) {
      long long rb = isqrt(4 * n * m * N);
      for (long long r = -rb; r <= rb; ++r) {
        long long D = 4 * n * m * N - r * r;
        if (D <= 0 || D > det_cap) continue;
        BigInt got = *at(n, r, m);
        if (got != out.coeff(n, r, m)) throw VerificationFailure("Fourier-Jacobi window is not paramodular at (" +
                                                                  std::to_string(n) + "," + std::to_string(r) + "," +
                                                                  std::to_string(m) + ")");
      }
    }
  return out;
}

/// Siegel coefficients on the classes a window can read; the rest are listed
/// in missing (and stored as 0).  Window entries of readable classes are
/// checked against each other as in siegel_from_fj.
struct PartialSiegel {
  SiegelExpansion known;
  std::set<IndexForm> missing;
};

inline PartialSiegel siegel_partial_from_fj(const FJTruncation& fj, int weight, std::shared_ptr<const Level> level,
                                            long long det_cap) {
  const long long N = level->N();
  if (fj.N != N) throw InvalidInput("level mismatch");
  if (fj.C % N != 0) throw InvalidInput("first xi exponent is not a multiple of the level");
  const long long m0 = fj.C / N, m1 = m0 + static_cast<long long>(fj.levels.size()) - 1;
  auto at = [&](long long n, long long r, long long m) -> std::optional<BigInt> {
    if (m < m0) return BigInt(0);
    if (m > m1 || n >= fj.q_limit) return std::nullopt;
    const auto& s = fj.levels[m - m0];
    long long qoff = s.q_offset().get_num().get_si();
    if (n < qoff) return BigInt(0);
    return s.coeff(static_cast<int>(n - qoff), static_cast<int>(2 * r));
  };
  PartialSiegel out{SiegelExpansion(weight, level, det_cap), {}};
  for (const auto& key : level->classes_up_to(det_cap)) {
    if (auto v = at(key.n, key.r, key.m)) out.known.set_canonical(key, *v);
    else out.missing.insert(key);
  }
  for (long long m = m0; m <= m1; ++m)
    for (long long n = 0; n < fj.q_limit; ++n) {
      long long rb = isqrt(4 * n * m * N);
      for (long long r = -rb; r <= rb; ++r) {
        long long D = 4 * n * m * N - r * r;
        if (D <= 0 || D > det_cap) continue;
        if (out.missing.count(level->canonical({n, r, m}).key)) continue;
        if (*at(n, r, m) != out.known.coeff(n, r, m))
          throw VerificationFailure("Fourier-Jacobi window is not paramodular at (" + std::to_string(n) + "," +
                                    std::to_string(r) + "," + std::to_string(m) + ")");
      }
    }
  return out;
}

}  // namespace pmf
