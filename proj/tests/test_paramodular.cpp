#include <gtest/gtest.h>

#include <deque>
#include <random>
#include <set>

#include "pmf/paramodular.hpp"
#include "pmf/theta.hpp"
#include "pmf/weak_ring.hpp"

using namespace pmf;

namespace {

// Random element of the level subgroup: [[a, N b], [c, d]] with ad - N b c = +-1.
Mat2 random_level_matrix(std::mt19937& rng, long long N) {
  std::uniform_int_distribution<long long> dist(-6, 6);
  for (;;) {
    long long a = dist(rng), b = dist(rng);
    if (a == 0) continue;
    long long x, y;
    if (ext_gcd(a, N * b, x, y) != 1) continue;
    // a x + N b y = 1  ->  [[a, N b], [-y, x]] has determinant 1
    Mat2 g{a, N * b, -y, x};
    // mix with a lower unipotent and an optional sign flip
    long long s = dist(rng);
    g = g * Mat2{1, 0, s, 1};
    if (dist(rng) % 2 == 0) g = g * Mat2{1, 0, 0, -1};
    return g;
  }
}

std::shared_ptr<const Level> level(long long N) { return std::make_shared<const Level>(N); }

IndexForm random_definite(std::mt19937& rng, long long N, long long bound) {
  std::uniform_int_distribution<long long> nd(1, bound), rd(-3 * bound, 3 * bound);
  for (;;) {
    IndexForm t{nd(rng), rd(rng), nd(rng)};
    if (Level::disc(t, N) > 0) return t;
  }
}

// Orbit exploration under words in a fixed set of small level-subgroup elements,
// restricted to forms with n, m below a bound.
std::set<IndexForm> bounded_orbit(const Level& L, const IndexForm& t, long long bound) {
  const long long N = L.N();
  std::vector<Mat2> gens;
  for (long long a = -3; a <= 3; ++a)
    for (long long b = -2; b <= 2; ++b)
      for (long long c = -3; c <= 3; ++c)
        for (long long d = -3; d <= 3; ++d) {
          Mat2 g{a, b * N, c, d};
          if (g.det() == 1 || g.det() == -1) gens.push_back(g);
        }
  std::set<IndexForm> seen{t};
  std::deque<IndexForm> todo{t};
  while (!todo.empty()) {
    IndexForm u = todo.front();
    todo.pop_front();
    for (const auto& g : gens) {
      IndexForm v = L.act(u, g);
      if (v.n > bound || v.m > bound || v.n < 0 || v.m < 0) continue;
      if (seen.insert(v).second) todo.push_back(v);
    }
  }
  return seen;
}

const char* kBlocks[] = {"TB(4; 1,1,1,1,1,1,2,2)", "TB(4; 1,1,1,1,2,2,2,2)", "TB(3; 1,1,1,1,1,2,2,2,3)",
                         "TB(3; 1,1,1,2,2,2,3,3,3)", "TB(2; 1,1,1,2,2,2,3,3,4,5)"};

}  // namespace

TEST(Quadform, ReductionAndAutomorphs) {
  auto [f, g] = gl2_reduce({10, 17, 8});
  EXPECT_EQ(transform(BinaryForm{10, 17, 8}, g), f);
  EXPECT_LE(0, f.B);
  EXPECT_LE(f.B, f.A);
  EXPECT_LE(f.A, f.C);
  EXPECT_EQ(automorphs({1, 0, 1}).size(), 8u);
  EXPECT_EQ(automorphs({1, 1, 1}).size(), 12u);
  EXPECT_EQ(automorphs({2, 1, 3}).size(), 2u);
  EXPECT_EQ(automorphs({2, 0, 3}).size(), 4u);
}

TEST(Quadform, P1Roundtrip) {
  Level L(30);
  EXPECT_EQ(L.p1_size(), 3 * 4 * 6);
  for (long long c = 0; c < L.p1_size(); ++c) {
    auto [x, y] = L.p1_point(c);
    EXPECT_EQ(L.p1_code(x, y), c);
    Mat2 g = L.lift_to_sl2(x, y);
    EXPECT_EQ(g.det(), 1);
    EXPECT_EQ(L.p1_code(g.b, g.d), c);
  }
}

TEST(Canonical, DiagonalIsItsOwnKey) {
  for (long long N : {1, 2, 6, 7, 30, 37}) {
    Level L(N);
    auto ci = L.canonical({1, 0, 1});
    EXPECT_EQ(ci.key, (IndexForm{1, 0, 1})) << N;
    EXPECT_TRUE(ci.plus);
  }
}

TEST(Canonical, IdempotentAndRejectsBadInput) {
  Level L(10);
  std::mt19937 rng(1);
  for (int i = 0; i < 100; ++i) {
    auto t = random_definite(rng, 10, 6);
    auto key = L.canonical(t).key;
    EXPECT_EQ(L.canonical(key).key, key);
  }
  EXPECT_THROW(L.canonical({1, 10, 1}), InvalidInput);
  EXPECT_THROW(L.canonical({0, 0, 1}), InvalidInput);
  EXPECT_THROW(Level(12), InvalidInput);
}

TEST(Canonical, RandomOrbitInvariance) {
  std::mt19937 rng(2);
  for (long long N : {1, 6, 7, 30}) {
    Level L(N);
    for (int i = 0; i < 20; ++i) {
      auto t = random_definite(rng, N, 5);
      auto ci = L.canonical(t);
      for (int j = 0; j < 50; ++j) {
        Mat2 g = random_level_matrix(rng, N);
        auto cj = L.canonical(L.act(t, g));
        EXPECT_EQ(cj.key, ci.key);
        if (g.det() == 1) {
          EXPECT_TRUE((ci.plus && cj.plus) || (ci.minus && cj.minus));
        } else {
          EXPECT_TRUE((ci.plus && cj.minus) || (ci.minus && cj.plus));
        }
      }
    }
  }
}

TEST(MinimumFunction, BoundedByInputAndMatchesOrbitSearch) {
  std::mt19937 rng(3);
  for (long long N : {2, 5, 6}) {
    Level L(N);
    for (int i = 0; i < 200; ++i) {
      auto t = random_definite(rng, N, 6);
      EXPECT_LE(L.m_N(t), t.m);
      EXPECT_GE(L.m_N(t), 1);
    }
    for (int i = 0; i < 15; ++i) {
      auto t = random_definite(rng, N, 3);
      auto orbit = bounded_orbit(L, t, 12);
      long long best = t.m;
      for (const auto& u : orbit) {
        best = std::min(best, u.m);
        EXPECT_EQ(L.canonical(u).key, L.canonical(t).key);
      }
      EXPECT_EQ(L.m_N(t), best);
    }
  }
}

TEST(ClassEnumeration, KeysAreDistinctAndComplete) {
  Level L(6);
  auto keys = L.classes_up_to(60);
  std::set<IndexForm> ks(keys.begin(), keys.end());
  EXPECT_EQ(ks.size(), keys.size());
  // every definite (n, r, m) with small entries lands on an enumerated key
  for (long long n = 1; n <= 6; ++n)
    for (long long m = 1; m <= 3; ++m)
      for (long long r = -12; r <= 12; ++r) {
        IndexForm t{n, r, m};
        long long D = L.disc(t);
        if (D <= 0 || D > 60) continue;
        EXPECT_TRUE(ks.count(L.canonical(t).key)) << n << " " << r << " " << m;
      }
}

TEST(AtkinLehner, IndexMapPreservesDiscriminantAndSquares) {
  const long long N = 30;
  Level L(N);
  std::mt19937 rng(4);
  for (long long c : {1, 2, 3, 5, 6, 10, 15, 30}) {
    for (int i = 0; i < 30; ++i) {
      auto t = random_definite(rng, N, 5);
      auto u = al_index(t, N, c);
      EXPECT_EQ(L.disc(u), L.disc(t));
      EXPECT_EQ(L.canonical(al_index(u, N, c)).key, L.canonical(t).key) << c;
    }
  }
  EXPECT_THROW(al_index({1, 0, 1}, 12, 2), InvalidInput);
  EXPECT_EQ(al_index({3, 1, 2}, 30, 30), (IndexForm{2, -1, 3}));
}

TEST(Gritsenko, SectionPropertyAndDivisorSum) {
  for (const char* s : kBlocks) {
    auto spec = parse_theta_block(s);
    const long long N = tb_index(spec).get_num().get_si();
    auto L = level(N);
    const long long cap = 4 * N * 2;
    auto phi = tb_jacobi(spec, lift_precision_needed(N, cap));
    ASSERT_EQ(phi.holomorphy(), Holomorphy::Cusp) << s;
    auto f = gritsenko_lift(phi, L, cap);
    auto phi1 = fourier_jacobi(f, 1);
    EXPECT_EQ(phi1, phi.truncated(phi1.q_precision())) << s;
    for (long long n = 1; n <= 2; ++n)
      for (long long r = -N + 1; r <= N; ++r)
        if (4 * n * N - r * r > 0) EXPECT_EQ(f.coeff(n, r, 1), phi.coeff(n, r));
    // a(2, 2, 2) = c(4, 2) + 2^{k-1} c(1, 1)
    if (4 * 2 * 2 * N - 4 <= cap) {
      BigInt expect = phi.coeff(4, 2) + ipow(BigInt(2), phi.weight() - 1) * phi.coeff(1, 1);
      EXPECT_EQ(f.coeff(2, 2, 2), expect) << s;
    }
  }
}

TEST(Gritsenko, FrickeSignAndOrbitProbes) {
  std::mt19937 rng(6);
  for (const char* s : kBlocks) {
    auto spec = parse_theta_block(s);
    const long long N = tb_index(spec).get_num().get_si();
    auto L = level(N);
    const long long cap = 6 * N;
    auto phi = tb_jacobi(spec, lift_precision_needed(N, cap));
    auto f = gritsenko_lift(phi, L, cap);
    const int k = phi.weight();
    const int eps = k % 2 == 0 ? 1 : -1;
    ASSERT_EQ(f.fricke_sign, eps);
    auto g = al_pullback(f, N);
    for (const auto& [key, v] : f.table()) EXPECT_EQ(g.coeff(key), v * eps) << s;
    // direct divisor-sum evaluation on t[gamma] matches (det gamma)^k a(t)
    auto direct = [&](const IndexForm& t) {
      BigInt acc = 0;
      long long gg = std::gcd(std::gcd(t.n, std::llabs(t.r)), t.m);
      for (long long j : divisors(gg)) acc += ipow(big(j), k - 1) * phi.coeff(t.n * t.m / (j * j), t.r / j);
      return acc;
    };
    int probes = 0;
    for (const auto& [key, v] : f.table()) {
      if (probes++ > 20) break;
      for (int j = 0; j < 5; ++j) {
        Mat2 m = random_level_matrix(rng, N);
        IndexForm t = L->act(key, m);
        BigInt sign = (m.det() == -1 && k % 2 != 0) ? -1 : 1;
        EXPECT_EQ(f.coeff(t), sign * v);
        bool covered = true;
        long long gg = std::gcd(std::gcd(t.n, std::llabs(t.r)), t.m);
        for (long long jj : divisors(gg))
          if (!phi.known(t.n * t.m / (jj * jj), t.r / jj)) covered = false;
        if (covered) EXPECT_EQ(direct(t), sign * v);
      }
    }
    // the lift is 1-docked: its first Fourier-Jacobi coefficient is nonzero
    EXPECT_FALSE(fourier_jacobi(f, 1).table().empty());
  }
}

TEST(AtkinLehner, PullbackIdentityAndInvolution) {
  auto L = level(6);
  auto basis = jacobi_basis_from_weak_ring(10, 6, lift_precision_needed(6, 120), true);
  ASSERT_FALSE(basis.empty());
  auto f = gritsenko_lift(basis[0], L, 120);
  EXPECT_EQ(al_pullback(f, 1), f);
  for (long long c : {2, 3, 6}) EXPECT_EQ(al_pullback(al_pullback(f, c), c), f) << c;
  EXPECT_THROW(al_pullback(f, 4), InvalidInput);
}

TEST(Multiply, ZeroCommutativityAndFourierJacobi) {
  auto L = level(7);
  auto phi = tb_jacobi(parse_theta_block("TB(4; 1,1,1,1,1,1,2,2)"), lift_precision_needed(7, 200));
  auto f = gritsenko_lift(phi, L, 200);
  SiegelExpansion zero(4, L, 200);
  EXPECT_TRUE(multiply(f, zero).table().empty());
  auto basis = jacobi_basis_from_weak_ring(10, 7, lift_precision_needed(7, 200), true);
  ASSERT_FALSE(basis.empty());
  auto g = gritsenko_lift(basis[0], L, 200);
  auto fg = multiply(f, g);
  EXPECT_EQ(fg, multiply(g, f));
  EXPECT_EQ(fg.weight(), 14);
  EXPECT_EQ(fg.fricke_sign, 1);
  // phi_2(f g) = phi_1(f) phi_1(g) as Jacobi series
  auto prod2 = fourier_jacobi(fg, 2);
  auto a = fourier_jacobi(f, 1), b = fourier_jacobi(g, 1);
  for (long long n = 1; n < prod2.q_precision(); ++n)
    for (long long r = -13; r <= 14; ++r) {
      BigInt acc = 0;
      for (long long n1 = 1; n1 < n; ++n1)
        for (long long r1 = -2 * 7 * n1; r1 <= 2 * 7 * n1; ++r1) {
          if (4 * n1 * 7 - r1 * r1 <= 0) continue;
          if (4 * (n - n1) * 7 - (r - r1) * (r - r1) <= 0) continue;
          acc += a.coeff(n1, r1) * b.coeff(n - n1, r - r1);
        }
      EXPECT_EQ(prod2.coeff(n, r), acc) << n << " " << r;
    }
  // (Grit phi)^2 at a small index against the direct decomposition sum
  auto f2 = multiply(f, f);
  IndexForm t{2, 3, 2};
  BigInt acc = 0;
  for (long long n1 = 1; n1 < 2; ++n1)
    for (long long m1 = 1; m1 < 2; ++m1)
      for (long long r1 = -20; r1 <= 20; ++r1) {
        IndexForm t1{n1, r1, m1}, t2{2 - n1, 3 - r1, 2 - m1};
        if (L->disc(t1) <= 0 || L->disc(t2) <= 0) continue;
        acc += f.coeff(t1) * f.coeff(t2);
      }
  EXPECT_NE(acc, 0);
  EXPECT_EQ(f2.coeff(t), acc);
}
