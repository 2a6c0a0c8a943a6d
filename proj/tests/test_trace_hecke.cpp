#include <gtest/gtest.h>

#include <random>
#include <set>

#include "pmf/theta.hpp"
#include "pmf/trace_hecke.hpp"
#include "pmf/weak_ring.hpp"

using namespace pmf;

namespace {

std::shared_ptr<const Level> level(long long N) { return std::make_shared<const Level>(N); }

long long paramodular_index(long long N) {
  long long c = N;
  for (long long p : prime_factors(N)) c = c / p * (p + 1);
  return c;
}

// Random [[a, N b], [c, d]] with determinant +-1.
Mat2 random_level_matrix(std::mt19937& rng, long long N) {
  std::uniform_int_distribution<long long> dist(-5, 5);
  for (;;) {
    long long a = dist(rng), b = dist(rng);
    if (a == 0) continue;
    long long x, y;
    if (ext_gcd(a, N * b, x, y) != 1) continue;
    Mat2 g{a, N * b, -y, x};
    g = g * Mat2{1, 0, dist(rng), 1};
    if (dist(rng) % 2 == 0) g = g * Mat2{1, 0, 0, -1};
    return g;
  }
}

Rational frac(const BigInt& a, const BigInt& b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

std::array<long long, 4> projective_normal(std::array<long long, 4> v, long long q) {
  for (auto& x : v) x = mod(x, q);
  for (long long x : v)
    if (x != 0) {
      long long inv = inv_mod(x, q);
      for (auto& y : v) y = mod(y * inv, q);
      break;
    }
  return v;
}

}  // namespace

TEST(Cosets, ProjectiveSpaceRepresentatives) {
  for (long long N : {1LL, 6LL}) {
    for (long long q : {2LL, 3LL, 5LL, 7LL, 11LL}) {
      if (N % q == 0) continue;
      auto reps = p3_reps(q, N);
      ASSERT_EQ(static_cast<long long>(reps.size()), 1 + q + q * q + q * q * q) << q;
      std::set<std::array<long long, 4>> classes;
      for (const auto& v : reps) {
        EXPECT_EQ(std::gcd(std::gcd(v[0] * N, v[1] * N), std::gcd(v[2] * N, v[3])), 1);
        classes.insert(projective_normal(v, q));
      }
      EXPECT_EQ(classes.size(), reps.size());
      if (q > 5) continue;
      // every nonzero vector of (Z/q)^4 is a unit multiple of exactly one representative
      for (long long code = 1; code < q * q * q * q; ++code) {
        std::array<long long, 4> w{code % q, code / q % q, code / (q * q) % q, code / (q * q * q)};
        int hits = 0;
        for (const auto& v : reps)
          for (long long s = 1; s < q; ++s) {
            bool eq = true;
            for (int i = 0; i < 4; ++i) eq = eq && mod(s * v[i] - w[i], q) == 0;
            hits += eq;
          }
        EXPECT_EQ(hits, 1);
      }
    }
  }
  EXPECT_THROW(p3_reps(4), InvalidInput);
  EXPECT_THROW(p3_reps(3, 6), InvalidInput);
}

TEST(Cosets, BottomRowCompletion) {
  Mat4 id = complete_bottom_row({0, 0, 0, 1});
  EXPECT_TRUE(in_sp4z(id));
  EXPECT_EQ(id[3][3], 1);
  std::mt19937 rng(11);
  std::uniform_int_distribution<long long> dist(-40, 40);
  int done = 0;
  while (done < 200) {
    std::vector<long long> v{dist(rng), dist(rng), dist(rng), dist(rng)};
    if (std::gcd(std::gcd(v[0], v[1]), std::gcd(v[2], v[3])) != 1) continue;
    Mat4 g = complete_bottom_row(v);
    ASSERT_TRUE(in_sp4z(g));
    for (int j = 0; j < 4; ++j) EXPECT_EQ(g[3][j], Rational(big(v[j])));
    ++done;
  }
  for (long long N : {2LL, 6LL, 35LL}) {
    for (int i = 0; i < 30; ++i) {
      std::vector<long long> v{N * dist(rng), N * dist(rng), N * dist(rng), dist(rng)};
      if (std::gcd(std::gcd(v[0], v[1]), std::gcd(v[2], v[3])) != 1) continue;
      EXPECT_TRUE(in_gamma0_prime(complete_bottom_row(v), N));
    }
  }
  EXPECT_THROW(complete_bottom_row({2, 4, 0, 6}), InvalidInput);
}

TEST(Cosets, KlingenRepresentativeCount) {
  EXPECT_EQ(klingen_column_reps(1).size(), 1u);
  EXPECT_EQ(klingen_column_reps(6).size(), 12u);
  EXPECT_EQ(klingen_column_reps(286).size(), 504u);
  for (long long N = 1; N <= 30; ++N) {
    if (!is_squarefree(N)) continue;
    auto reps = klingen_column_reps(N);
    EXPECT_EQ(static_cast<long long>(reps.size()), paramodular_index(N)) << N;
    // pairwise distinct modulo the integral subgroup
    for (std::size_t i = 0; i < reps.size(); ++i)
      for (std::size_t j = i + 1; j < reps.size(); ++j)
        EXPECT_FALSE(in_gamma0_prime(reps[i] * symplectic_inverse(reps[j]), N)) << N;
  }
}

TEST(Cosets, UpperLevelCosetsByDirectEnumeration) {
  // Classify small SL2(Z) matrices by coset of Gamma^0(N) and count classes.
  for (long long N : {2LL, 6LL, 10LL, 15LL, 30LL}) {
    auto reps = sl2_upper_coset_reps(N);
    std::vector<int> hit(reps.size(), 0);
    for (long long a = -N; a <= 2 * N; ++a)
      for (long long b = -N; b <= 2 * N; ++b) {
        long long x, y;
        if (ext_gcd(a, b, x, y) != 1) continue;
        // g = [[a, b], [-y, x]];  g h^{-1} with h = [[ha, hb], [hc, hd]]
        int owners = 0;
        for (std::size_t i = 0; i < reps.size(); ++i) {
          auto [ha, hb, hc, hd] = reps[i];
          long long ub = -a * hb + b * ha;  // upper-right entry of g h^{-1}
          if (mod(ub, N) == 0) {
            ++owners;
            hit[i] = 1;
          }
        }
        ASSERT_EQ(owners, 1) << N << " " << a << " " << b;
      }
    for (int h : hit) EXPECT_EQ(h, 1) << N;
    EXPECT_EQ(static_cast<long long>(reps.size()), paramodular_index(N));
  }
}

TEST(Cosets, ParabolicDecompositionOfAllTraceCosets) {
  const long long N = 6, q = 5;
  auto reps = trace_coset_reps(N, q);
  EXPECT_EQ(static_cast<long long>(reps.size()), (1 + q + q * q + q * q * q) * paramodular_index(N));
  for (const auto& g : reps) {
    ASSERT_TRUE(in_paramodular(g, N));
    auto dec = decompose_paramodular_parabolic(g, N * q);
    EXPECT_TRUE(in_paramodular(dec.kappa, N * q));
    EXPECT_TRUE(in_siegel_parabolic(dec.u));
    EXPECT_EQ(dec.kappa * dec.u, g);
  }
  // trivial factorizations
  Mat4 k = complete_bottom_row({30, 0, 60, 7});
  auto dk = decompose_paramodular_parabolic(k, 30);
  EXPECT_EQ(dk.kappa, k);
  EXPECT_EQ(dk.u, identity4());
  Mat4 u = identity4();
  u[0][0] = 2;
  u[1][1] = make_rational(1, 3);
  u[2][2] = make_rational(1, 2);
  u[3][3] = 3;
  u[0][2] = make_rational(5, 7);
  ASSERT_TRUE(in_siegel_parabolic(u));
  auto du = decompose_paramodular_parabolic(u, 30);
  EXPECT_EQ(du.kappa, identity4());
  EXPECT_EQ(du.u, u);
  EXPECT_THROW(decompose_paramodular_parabolic(u, 12), InvalidInput);
}

TEST(Cosets, TraceCosetsAreDisjoint) {
  const long long N = 2, q = 3;
  auto reps = trace_coset_reps(N, q);
  ASSERT_EQ(reps.size(), 120u);
  for (std::size_t i = 0; i < reps.size(); ++i)
    for (std::size_t j = i + 1; j < reps.size(); ++j)
      EXPECT_FALSE(in_gamma0_prime(reps[i] * symplectic_inverse(reps[j]), N * q));
}

TEST(Cyclotomic, ExactReduction) {
  CyclotomicSum full;
  for (int j = 0; j < 12; ++j) full.add(make_rational(j, 12), 1);
  EXPECT_EQ(full.value(), 0);
  CyclotomicSum cube;
  cube.add(make_rational(1, 3), 1);
  cube.add(make_rational(5, 3), 1);  // same as 2/3
  EXPECT_EQ(cube.order(), 3);
  EXPECT_EQ(cube.value(), -1);
  CyclotomicSum cosine;  // 2 cos(2 pi / 6) = 1
  cosine.add(make_rational(1, 6), 1);
  cosine.add(make_rational(-1, 6), 1);
  EXPECT_EQ(cosine.value(), 1);
  CyclotomicSum gauss;  // quadratic Gauss sum at 5 is sqrt(5)
  for (int j = 0; j < 5; ++j) gauss.add(make_rational(j * j, 5), 1);
  EXPECT_THROW(gauss.value(), VerificationFailure);
  CyclotomicSum integers;
  integers.add(Rational(3), make_rational(2, 7));
  EXPECT_EQ(integers.value(), make_rational(2, 7));
  EXPECT_EQ(CyclotomicSum().value(), 0);
  // Phi_12 = x^4 - x^2 + 1
  auto phi12 = CyclotomicSum::cyclotomic_polynomial(12);
  EXPECT_EQ(phi12, (std::vector<BigInt>{1, 0, -1, 0, 1}));
}

namespace {

SiegelExpansion lift(const std::string& tb, long long V, long long N, long long cap) {
  auto phi = tb_jacobi(parse_theta_block(tb), static_cast<int>(V * lift_precision_needed(N, cap) + V));
  if (V > 1) phi = apply_V(phi, static_cast<int>(V));
  return gritsenko_lift(phi, level(N), cap);
}

}  // namespace

TEST(TraceDown, OldLiftTracesToMultipleOfLowerLift) {
  // Grit(phi | V_3) at level 30 traced to level 10 against Grit(phi) at level 10.
  const long long cap = 40;
  auto plan = plan_trace_down(10, 3);
  const long long need = trace_down_cap_needed(plan, cap);
  auto f = lift("TB(4;1,1,1,1,2,2,2,2)", 3, 30, need);
  auto down = trace_down(plan, f, cap);
  auto base = lift("TB(4;1,1,1,1,2,2,2,2)", 1, 10, cap);
  ASSERT_FALSE(base.table().empty());
  ASSERT_FALSE(down.scaled.table().empty());
  // proportional: a(down) * a(base; t0) = a(base) * a(down; t0)
  const auto& [t0, b0] = *base.table().begin();
  BigInt d0 = down.scaled.coeff(t0);
  ASSERT_NE(d0, 0);
  for (const auto& key : level(10)->classes_up_to(cap)) EXPECT_EQ(down.scaled.coeff(key) * b0, base.coeff(key) * d0);
  EXPECT_EQ(frac(d0, down.denominator * b0), 80);
}

TEST(TraceDown, OrbitInvarianceOfRawCoefficients) {
  std::mt19937 rng(5);
  for (auto [N, q, tb, V] : std::vector<std::tuple<long long, long long, std::string, long long>>{
           {10, 3, "TB(4;1,1,1,1,2,2,2,2)", 3}, {6, 5, "TB(4;1,1,2,2,3,3,4,4)", 1}}) {
    const long long cap = 60;
    auto plan = plan_trace_down(N, q);
    auto f = lift(tb, V, N * q, trace_down_cap_needed(plan, cap));
    Level L(N);
    int probes = 0;
    for (const auto& key : L.classes_up_to(cap)) {
      Rational a = trace_down_coefficient(plan, f, key);
      for (int i = 0; i < 3; ++i) {
        Mat2 g = random_level_matrix(rng, N);
        IndexForm t = L.act(key, g);
        EXPECT_EQ(trace_down_coefficient(plan, f, t), a) << N << " " << t.n << "," << t.r << "," << t.m;
        ++probes;
      }
    }
    EXPECT_GT(probes, 20);
  }
}

TEST(TraceDown, LinearityAndZero) {
  const long long cap = 30;
  auto plan = plan_trace_down(10, 3);
  const long long need = trace_down_cap_needed(plan, cap);
  auto f = lift("TB(4;1,1,1,1,2,2,2,2)", 3, 30, need);
  auto g = lift("TB(4;1,1,1,1,2,2,3,3)", 2, 30, need);
  auto h = f;
  h.axpy(2, g);
  auto tf = trace_down(plan, f, cap), tg = trace_down(plan, g, cap), th = trace_down(plan, h, cap);
  for (const auto& key : level(10)->classes_up_to(cap)) {
    Rational lhs = frac(th.scaled.coeff(key), th.denominator);
    Rational rhs = frac(tf.scaled.coeff(key), tf.denominator) + 2 * frac(tg.scaled.coeff(key), tg.denominator);
    EXPECT_EQ(lhs, rhs);
  }
  SiegelExpansion zero(4, level(30), need);
  EXPECT_TRUE(trace_down(plan, zero, cap).scaled.table().empty());
  EXPECT_THROW(trace_down(plan, f.truncated(need - 1), cap), PrecisionShortfall);
  EXPECT_THROW(plan_trace_down(6, 3), InvalidInput);
}

namespace {

// q-expansion coefficients 1..P-1 of Delta * E4^a * E6^b from plain power series.
std::vector<BigInt> elliptic_cusp_form(int a, int b, int P) {
  auto mul = [&](const std::vector<BigInt>& x, const std::vector<BigInt>& y) {
    std::vector<BigInt> z(P, BigInt(0));
    for (int i = 0; i < P; ++i)
      for (int j = 0; i + j < P; ++j) z[i + j] += x[i] * y[j];
    return z;
  };
  auto eis = [&](int k, long long c) {
    std::vector<BigInt> e(P, BigInt(0));
    e[0] = 1;
    for (int n = 1; n < P; ++n) {
      BigInt s = 0;
      for (long long d : divisors(n)) s += ipow(big(d), k - 1);
      e[n] = big(c) * s;
    }
    return e;
  };
  std::vector<BigInt> delta(P, BigInt(0));
  delta[1] = 1;
  for (int n = 1; n < P; ++n)
    for (int r = 0; r < 24; ++r) {
      std::vector<BigInt> f(P, BigInt(0));
      f[0] = 1;
      f[n] = -1;
      delta = mul(delta, f);
    }
  for (int i = 0; i < a; ++i) delta = mul(delta, eis(4, 240));
  for (int i = 0; i < b; ++i) delta = mul(delta, eis(6, -504));
  return delta;
}

// Eigenvalues of the lift of the weight 2k-2 level-one newform g:
// T(p): a_p + p^(k-1) + p^(k-2); T(p^2) read off the spin factor
// (1 - p^(k-1) T)(1 - p^(k-2) T)(1 - a_p T + p^(2k-3) T^2).
std::pair<BigInt, BigInt> lift_eigenvalues(const BigInt& ap, long long p, int k) {
  BigInt A = ipow(big(p), k - 1), B = ipow(big(p), k - 2), C = ipow(big(p), 2 * k - 3);
  BigInt lp = ap + A + B;
  BigInt t2 = C + A * B + ap * (A + B);
  BigInt lp2 = lp * lp - ipow(big(p), 2 * k - 4) - t2;
  return {lp, lp2};
}

}  // namespace

TEST(Hecke, CosetCounts) {
  for (long long p : {2LL, 3LL, 5LL}) {
    EXPECT_EQ(plan_hecke(1, p).coset_count(), big((1 + p) * (1 + p * p)));
    EXPECT_EQ(plan_hecke(7, p).coset_count(), big((1 + p) * (1 + p * p)));
  }
  EXPECT_THROW(plan_hecke(6, 2), InvalidInput);
}

TEST(Hecke, IgusaCuspFormEigenvaluesMatchLiftPrediction) {
  const long long cap = 16;
  auto chi10 = lift("TB(10;1,1)", 1, 1, 81 * cap);
  auto g18 = elliptic_cusp_form(0, 1, 10);  // Delta * E6
  ASSERT_EQ(g18[2], -528);
  for (long long p : {2LL, 3LL}) {
    auto [lp, lp2] = lift_eigenvalues(g18[p], p, 10);
    auto tp = hecke_T(chi10, p, cap), tp2 = hecke_T(chi10, p * p, cap);
    const auto window = chi10.truncated(cap);
    for (const auto& [key, v] : window.table()) {
      EXPECT_EQ(tp.coeff(key), lp * v);
      EXPECT_EQ(tp2.coeff(key), lp2 * v);
    }
  }
  EXPECT_EQ(lift_eigenvalues(g18[2], 2, 10).first, 240);
  EXPECT_THROW(hecke_T(chi10, 4, 81 * cap), PrecisionShortfall);
}

TEST(Hecke, LiftSpanStableAndOldformEigenvalue) {
  // Level 2, weight 12: lifts of an index-2 cusp space, one old from level one.
  const long long N = 2, cap = 12, p = 3;
  const long long wide = 9 * 25 * 4;
  auto basis = jacobi_basis_from_weak_ring(12, 2, lift_precision_needed(N, wide) + 2, true);
  ASSERT_GE(basis.size(), 2u);
  std::vector<SiegelExpansion> lifts;
  for (const auto& phi : basis) lifts.push_back(gritsenko_lift(phi, level(N), wide));
  auto split = eigen_split(lifts, [&](const SiegelExpansion& f) { return hecke_T(f, p, cap); });
  auto g22 = elliptic_cusp_form(1, 1, 6);  // Delta * E4 * E6, weight 22
  BigInt old = lift_eigenvalues(g22[p], p, 12).first;
  bool found_old = false;
  std::set<BigInt> values;
  for (const auto& pair : split.pairs) {
    values.insert(pair.value);
    found_old = found_old || pair.value == old;
  }
  EXPECT_TRUE(found_old) << old;
  std::size_t covered = 0;
  for (const auto& pr : split.pairs) covered += pr.vectors.size();
  EXPECT_EQ(split.unsplit_dimension + covered, lifts.size());
  EXPECT_EQ(values.size(), split.pairs.size());
  // eigenvectors are T(3)-eigen, and T(3), T(5) commute on them
  for (const auto& pair : split.pairs)
    for (const auto& v : pair.vectors) {
      auto f = combine(lifts, v);
      auto t3 = hecke_T(f, 3, cap);
      EXPECT_EQ(t3, [&] {
        SiegelExpansion e(f.weight(), f.level(), cap);
        e.axpy(pair.value, f.truncated(cap));
        return e;
      }());
      auto a = hecke_T(hecke_T(f, 5, 9 * 4), 3, 4);
      auto b = hecke_T(hecke_T(f, 3, 25 * 4), 5, 4);
      EXPECT_FALSE(a.table().empty());
      EXPECT_EQ(a, b);
    }
}

TEST(Hecke, NonSplitBlockReported) {
  // Weight 20 index 1: the lift space matches S_38(SL2(Z)), whose two
  // eigenvalues are conjugate quadratic irrationals.
  const long long cap = 8;
  auto basis = jacobi_basis_from_weak_ring(20, 1, lift_precision_needed(1, 4 * cap) + 2, true);
  ASSERT_EQ(basis.size(), 2u);
  std::vector<SiegelExpansion> lifts;
  for (const auto& phi : basis) lifts.push_back(gritsenko_lift(phi, level(1), 4 * cap));
  auto split = eigen_split(lifts, [&](const SiegelExpansion& f) { return hecke_T(f, 2, cap); });
  EXPECT_TRUE(split.pairs.empty());
  EXPECT_EQ(split.unsplit_dimension, 2u);
  auto one = eigen_split({lift("TB(10;1,1)", 1, 1, 4 * cap)}, [&](const SiegelExpansion& f) { return hecke_T(f, 2, cap); });
  ASSERT_EQ(one.pairs.size(), 1u);
  EXPECT_EQ(one.pairs[0].value, 240);
}

TEST(Hecke, SpanEscapeIsReported) {
  const long long cap = 10;
  auto chi10 = lift("TB(10;1,1)", 1, 1, 4 * cap);
  // an operator that does not preserve the span: shift coefficients around
  auto bad = [&](const SiegelExpansion& f) {
    SiegelExpansion g(f.weight(), f.level(), cap);
    const auto window = f.truncated(cap);
    for (const auto& [k, v] : window.table()) g.set_canonical(k, v * big(k.n * k.n));
    return g;
  };
  EXPECT_THROW(eigen_split({chi10}, bad), VerificationFailure);
  EXPECT_THROW(hecke_T_bad_prime(lift("TB(4;1,1,1,1,2,2,2,2)", 1, 10, 20), 2, 0, 5), InvalidInput);
}

TEST(Euler, SpinFactors) {
  EXPECT_EQ(polynomial_string(spin_euler_factor(-2, 0, 2)), "1+2T+3T^2+4T^3+4T^4");
  EXPECT_EQ(polynomial_string(spin_euler_factor(0, -3, 5)), "1+2T^2+25T^4");
  EXPECT_EQ(polynomial_string(spin_euler_factor(-1, 0, 3)), "1+T+3T^3+9T^4");
  // weight 10: the lift factor splits as predicted
  auto [l2, l4] = lift_eigenvalues(-528, 2, 10);
  auto f = spin_euler_factor(l2, l4, 2, 10);
  // (1 - 2^9 T)(1 - 2^8 T)(1 + 528 T + 2^17 T^2)
  std::vector<BigInt> a{1, -512}, b{1, -256}, c{1, 528, 131072};
  auto mul = [](const std::vector<BigInt>& x, const std::vector<BigInt>& y) {
    std::vector<BigInt> z(x.size() + y.size() - 1, BigInt(0));
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j) z[i + j] += x[i] * y[j];
    return z;
  };
  EXPECT_EQ(f, mul(mul(a, b), c));
  EXPECT_EQ(polynomial_string({-1, 0, -1}), "-1-T^2");
  EXPECT_THROW(spin_euler_factor(0, 0, 4), InvalidInput);
}
