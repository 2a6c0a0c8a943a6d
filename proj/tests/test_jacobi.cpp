#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "pmf/jacobi.hpp"
#include "pmf/theta.hpp"
#include "pmf/weak_ring.hpp"

using namespace pmf;

namespace {

// Brute-force scan over translations for the representative with r in (-m, m].
std::pair<long long, long long> reduce_oracle(long long n, long long r, long long m) {
  for (long long l = -1000; l <= 1000; ++l) {
    long long r2 = r - 2 * l * m;
    if (r2 > -m && r2 <= m) return {n - l * r + l * l * m, r2};
  }
  return {0, 0};
}

}  // namespace

TEST(ReduceR, Examples) {
  auto a = reduce_r(5, 2, 3);
  EXPECT_EQ(a.n, 5);
  EXPECT_EQ(a.r, 2);
  EXPECT_EQ(a.lambda, 0);
  auto b = reduce_r(5, 7, 3);
  EXPECT_EQ(b.n, 1);
  EXPECT_EQ(b.r, 1);
  EXPECT_EQ(b.lambda, 1);
  EXPECT_EQ(4 * 5 * 3 - 49, 4 * 1 * 3 - 1);
}

TEST(ReduceR, RandomDiscriminantPreserved) {
  std::mt19937 rng(99);
  std::uniform_int_distribution<long long> nd(-50, 500), rd(-2000, 2000), md(1, 60);
  for (int i = 0; i < 1000; ++i) {
    long long n = nd(rng), r = rd(rng), m = md(rng);
    auto red = reduce_r(n, r, m);
    EXPECT_EQ(4 * n * m - r * r, 4 * red.n * m - red.r * red.r);
    EXPECT_EQ(std::make_pair(red.n, red.r), reduce_oracle(n, r, m));
  }
}

TEST(JacobiExpansionTest, TranslationProbes) {
  auto phi = tb_jacobi(parse_theta_block("TB(4; 1,1,2,2,3,3,4,4)"), 12);
  EXPECT_EQ(phi.index(), 30);
  EXPECT_EQ(phi.holomorphy(), Holomorphy::Cusp);
  std::mt19937 rng(5);
  std::uniform_int_distribution<long long> nd(1, 11), rd(-30, 30), ld(-3, 3);
  for (int i = 0; i < 200; ++i) {
    long long n = nd(rng), r = rd(rng), l = ld(rng), m = 30;
    long long n2 = n + l * r + l * l * m, r2 = r + 2 * l * m;
    EXPECT_EQ(phi.coeff(n, r), phi.coeff(n2, r2));
    EXPECT_EQ(phi.coeff(n, r), phi.coeff(n, -r));
    EXPECT_EQ(phi.coeff(n, r), phi.coeff_by_discriminant(4 * n * m - r * r, r));
  }
  EXPECT_THROW(phi.coeff(12, 0), PrecisionShortfall);
}

TEST(SingularPart, CuspFormHasNone) {
  auto phi = tb_jacobi(parse_theta_block("TB(4; 1,1,2,2,3,3,4,4)"), 10);
  EXPECT_TRUE(singular_part(phi).empty());
  EXPECT_THROW(singular_part(phi.truncated(7)), PrecisionShortfall);
}

TEST(ApplyV, IdentityAndCoprimeEntries) {
  auto phi = tb_jacobi(parse_theta_block("TB(4; 1,1,2,2,3,3,4,4)"), 17);
  EXPECT_EQ(apply_V(phi, 1), phi);
  auto v2 = apply_V(phi, 2);
  EXPECT_EQ(v2.index(), 60);
  EXPECT_EQ(v2.q_precision(), 9);
  for (long long n = 0; n < 9; ++n)
    for (long long r = -60; r <= 60; ++r)
      if (std::gcd(std::gcd(n, r), 2LL) == 1) EXPECT_EQ(v2.coeff(n, r), phi.coeff(2 * n, r));
}

TEST(ApplyV, MatchesMatrixSum) {
  // (phi|V_l)(tau, z) = l^{k-1} sum_{ad = l, b mod d} d^{-k} phi((a tau + b)/d, a z)
  auto phi = tb_jacobi(parse_theta_block("TB(4; 1,1,2,2,3,3,4,4)"), 17);
  const int k = 4;
  for (int l : {2, 3}) {
    auto v = apply_V(phi, l);
    std::map<std::pair<long long, long long>, Rational> oracle;
    for (int a = 1; a <= l; ++a) {
      if (l % a) continue;
      int d = l / a;
      for (long long n = 0; n < phi.q_precision(); ++n)
        for (long long r = -200; r <= 200; ++r) {
          if (!phi.known(n, r)) continue;
          BigInt c = phi.coeff(n, r);
          if (c == 0) continue;
          // sum over b mod d of e(nb/d) is d when d | n, else 0
          if (n % d != 0) continue;
          long long N2 = n * a / d, R2 = r * a;
          if (N2 >= v.q_precision() || R2 > v.index() || R2 <= -v.index()) continue;
          Rational w = rpow(l, k - 1) * rpow(d, -k) * Rational(d);
          oracle[{N2, R2}] += w * Rational(c);
        }
    }
    for (long long n = 0; n < v.q_precision(); ++n)
      for (long long r = -v.index() + 1; r <= v.index(); ++r) {
        Rational expect = oracle.count({n, r}) ? oracle[{n, r}] : Rational(0);
        EXPECT_EQ(Rational(v.coeff(n, r)), expect) << l << " " << n << " " << r;
      }
    EXPECT_EQ(apply_V(apply_V(phi, 1), l), v);
  }
}

TEST(Rank, DuplicatesAndCombinations) {
  auto a = tb_jacobi(parse_theta_block("TB(4; 1,1,2,2,3,3,4,4)"), 6);
  EXPECT_EQ(rank({a, a}), 1u);
  auto basis = jacobi_basis_from_weak_ring(10, 2, 6, true);
  ASSERT_EQ(basis.size(), 1u);
  auto b12 = jacobi_basis_from_weak_ring(12, 3, 6, true);
  ASSERT_GE(b12.size(), 2u);
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> cd(-9, 9);
  std::vector<JacobiExpansion> mixes;
  for (int t = 0; t < 4; ++t) {
    JacobiExpansion m(12, 3, Holomorphy::Cusp, 6);
    for (const auto& e : b12) m.axpy(BigInt(cd(rng)), e);
    mixes.push_back(m);
  }
  EXPECT_LE(rank(mixes), b12.size());
  EXPECT_EQ(rank(b12), b12.size());
  EXPECT_EQ(rank(b12, 0), b12.size());
}

TEST(Rank, RationalRankDominatesModular) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> cd(-5, 5);
  auto b = jacobi_basis_from_weak_ring(12, 4, 5, true);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<JacobiExpansion> forms;
    for (int f = 0; f < 3; ++f) {
      JacobiExpansion m(12, 4, Holomorphy::Cusp, 5);
      for (const auto& e : b) m.axpy(BigInt(cd(rng)), e);
      forms.push_back(m);
    }
    for (long long p : {2LL, 3LL, 5LL, 7LL, 1000003LL}) EXPECT_GE(rank(forms, 0), rank(forms, p));
  }
}

TEST(Rank, Level286WeightTwoThetaBlocks) {
  // Four holomorphic weight-2 theta blocks of index 286; J_{2,286}^cusp has dimension 3.
  std::vector<JacobiExpansion> forms;
  for (const char* s : {"TB(2; 1,2,3,4,5,6,8,10,11,14)", "TB(2; 1,2,4,5,6,7,8,8,12,13)",
                        "TB(2; 1,2,4,5,6,7,8,9,10,14)", "TB(2; 2,2,4,4,6,6,8,10,10,14)"})
    forms.push_back(tb_jacobi(parse_theta_block(s), 8));
  auto dims = DimensionTable::load(PMF_DATA_DIR "/dims.txt");
  EXPECT_EQ(rank(forms), static_cast<std::size_t>(dim_lookup(2, 286, dims)));
  EXPECT_EQ(rank(forms, 0), 3u);
}

TEST(WeakRing, Generators) {
  auto b = phi_0_1(3);
  EXPECT_EQ(b.coeff(0, 2), 1);
  EXPECT_EQ(b.coeff(0, 0), 10);
  EXPECT_EQ(b.coeff(0, -2), 1);
  EXPECT_EQ(b.coeff(1, 4), 10);
  EXPECT_EQ(b.coeff(1, 2), -64);
  EXPECT_EQ(b.coeff(1, 0), 108);
  auto a = phi_m2_1(2);
  EXPECT_EQ(a.coeff(0, 2), 1);
  EXPECT_EQ(a.coeff(0, 0), -2);
}

TEST(WeakRing, KnownCuspDimensions) {
  // J_{10,1}^cusp and J_{12,1}^cusp are one-dimensional; J_{10,2}^cusp too.
  EXPECT_EQ(jacobi_basis_from_weak_ring(10, 1, 4, true).size(), 1u);
  EXPECT_EQ(jacobi_basis_from_weak_ring(12, 1, 4, true).size(), 1u);
  EXPECT_EQ(jacobi_basis_from_weak_ring(8, 1, 4, true).size(), 0u);
  auto j4 = jacobi_basis_from_weak_ring(4, 1, 4, false);
  ASSERT_EQ(j4.size(), 1u);  // E_{4,1}
  EXPECT_EQ(j4[0].coeff(0, 0), 1);
  EXPECT_EQ(j4[0].coeff(1, 1), 56);
}

TEST(DimensionTableTest, LookupsAndGaps) {
  auto t = DimensionTable::load(PMF_DATA_DIR "/dims.txt");
  EXPECT_EQ(dim_lookup(2, 286, t), 3);
  EXPECT_EQ(dim_lookup(4, 286, t), 48);
  EXPECT_THROW(dim_lookup(2, 100000, t), InvalidInput);
  std::istringstream bad("2 286\n");
  EXPECT_THROW(DimensionTable::parse(bad), InvalidInput);
}
