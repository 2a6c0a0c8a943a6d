#include <gtest/gtest.h>

#include <random>

#include "pmf/series.hpp"

using namespace pmf;
using S = FourierSeries<BigInt>;
using SQ = FourierSeries<Rational>;

namespace {

S poly_q(std::initializer_list<long> coeffs, int prec) {
  S s(prec);
  int i = 0;
  for (long c : coeffs) s.add_term(i++, 0, BigInt(c));
  return s;
}

// Small random series with entries in [-3, 3], zeta keys in [-4, 4] (even).
S random_series(std::mt19937& rng, int prec) {
  std::uniform_int_distribution<int> coef(-3, 3), key(-2, 2), count(0, 3);
  S s(prec);
  for (int st = 0; st < prec; ++st) {
    int n = count(rng);
    for (int i = 0; i < n; ++i) s.add_term(st, 2 * key(rng), BigInt(coef(rng)));
  }
  return s;
}

// Theta by its defining sum, evaluated on q-steps below prec (offset 1/8).
S theta_by_sum(int prec) {
  S s(prec, Rational(1, 8));
  for (int n = -40; n <= 40; ++n) {
    long step = static_cast<long>(n) * (n + 1) / 2;
    if (step < prec) s.add_term(static_cast<int>(step), 2 * n + 1, BigInt(n % 2 == 0 ? 1 : -1));
  }
  return s;
}

}  // namespace

TEST(SeriesAdd, Cancellation) {
  S a = poly_q({1, -1}, 5), b = poly_q({0, 1}, 5);
  EXPECT_EQ(a + b, S::one(5));
  EXPECT_EQ(a + S(5), a);
  EXPECT_TRUE((a + (-a)).is_zero());
}

TEST(SeriesAdd, RejectsUnalignableOffsets) {
  S a(4, Rational(1, 24)), b(4, Rational(1, 8));
  a.add_term(0, 0, BigInt(1));
  b.add_term(0, 0, BigInt(1));
  EXPECT_THROW(a + b, InvalidInput);
}

TEST(SeriesAdd, AlignsIntegralOffsetDifference) {
  S a(4, Rational(1, 8)), b(4, Rational(9, 8));
  a.add_term(1, 0, BigInt(2));
  b.add_term(0, 0, BigInt(3));
  S c = a + b;
  EXPECT_EQ(c.q_offset(), Rational(1, 8));
  EXPECT_EQ(c.coeff(1, 0), 5);
  EXPECT_EQ(c.precision(), 4);
}

TEST(SeriesMul, GeometricIdentity) {
  S a = poly_q({1, -1}, 8), b = poly_q({1, 1, 1}, 8);
  EXPECT_EQ(a * b, poly_q({1, 0, 0, -1}, 8));
  EXPECT_EQ(a * S::one(8), a);
}

TEST(SeriesMul, ThetaSquaredMatchesDoubleSum) {
  const int prec = 10;
  S th = theta_by_sum(prec);
  S sq = th * th;
  S oracle(prec, Rational(1, 4));
  for (int n1 = -30; n1 <= 30; ++n1)
    for (int n2 = -30; n2 <= 30; ++n2) {
      long step = static_cast<long>(n1) * (n1 + 1) / 2 + static_cast<long>(n2) * (n2 + 1) / 2;
      if (step >= prec) continue;
      int sign = ((n1 + n2) % 2 == 0) ? 1 : -1;
      oracle.add_term(static_cast<int>(step), 2 * n1 + 1 + 2 * n2 + 1, BigInt(sign));
    }
  EXPECT_EQ(sq.q_offset(), Rational(1, 4));
  EXPECT_EQ(sq, oracle);
  EXPECT_EQ(sq.precision(), prec);
}

TEST(SeriesMul, PrecisionUsesValuation) {
  S a(5), b(5);
  a.add_term(2, 0, BigInt(1));
  b.add_term(0, 0, BigInt(1));
  EXPECT_EQ((a * b).precision(), 5);
  b = S(5);
  b.add_term(1, 0, BigInt(1));
  EXPECT_EQ((a * b).precision(), 6);
}

TEST(SeriesInvert, Geometric) {
  S inv = invert(poly_q({1, -1}, 6));
  for (int i = 0; i < 6; ++i) EXPECT_EQ(inv.coeff(i, 0), 1);
  EXPECT_EQ(inv.precision(), 6);
}

TEST(SeriesInvert, ZetaMonomial) {
  S z(3);
  z.add_term(0, 2, BigInt(1));
  S inv = invert(z);
  EXPECT_EQ(inv.coeff(0, -2), 1);
  EXPECT_EQ(inv.terms().size(), 1u);
}

TEST(SeriesInvert, OneMinusQZeta) {
  S a(7);
  a.add_term(0, 0, BigInt(1));
  a.add_term(1, 2, BigInt(-1));
  S inv = invert(a);
  for (int i = 0; i < 7; ++i) EXPECT_EQ(inv.coeff(i, 2 * i), 1);
  EXPECT_EQ(a * inv, S::one(7));
}

TEST(SeriesInvert, RejectsNonMonomialLead) {
  S a(4);
  a.add_term(0, 1, BigInt(1));
  a.add_term(0, -1, BigInt(-1));
  EXPECT_THROW(invert(a), InvalidInput);
  S b(4);
  b.add_term(0, 0, BigInt(2));
  EXPECT_THROW(invert(b), InvalidInput);
}

TEST(SeriesInvert, RandomUnitLeading) {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 100; ++trial) {
    const int prec = 6;
    S a = random_series(rng, prec);
    S lead(prec);
    // overwrite the q^0 coefficient with a unit monomial
    S tail(prec);
    for (const auto& [st, p] : a.terms())
      if (st > 0) tail.add_poly(st, p);
    lead.add_term(0, 2 * (trial % 5 - 2), BigInt(trial % 2 ? 1 : -1));
    S u = lead + tail;
    EXPECT_EQ(u * invert(u), S::one(prec)) << trial;
  }
}

TEST(SeriesInvert, RationalUnit) {
  SQ a(5);
  a.add_term(0, 0, Rational(3));
  a.add_term(1, 2, Rational(1, 2));
  SQ one(5);
  one.add_term(0, 0, Rational(1));
  EXPECT_EQ(a * invert(a), one);
}

TEST(SeriesDivide, ExactQuotientWithPolynomialLead) {
  // (1 - z^3)/(1 - z) = 1 + z + z^2 at every q order.
  S num(4), den(4);
  num.add_term(0, 0, BigInt(1));
  num.add_term(0, 6, BigInt(-1));
  den.add_term(0, 0, BigInt(1));
  den.add_term(0, 2, BigInt(-1));
  S q = divide_exact(num, den);
  EXPECT_EQ(q.coeff(0, 0), 1);
  EXPECT_EQ(q.coeff(0, 2), 1);
  EXPECT_EQ(q.coeff(0, 4), 1);
  EXPECT_EQ(q * den, num);
  S bad(4);
  bad.add_term(0, 0, BigInt(1));
  EXPECT_THROW(divide_exact(bad, den), VerificationFailure);
}

TEST(SeriesExp, Basics) {
  SQ zero(5);
  zero = SQ(5);
  EXPECT_EQ(exp_neg(zero), SQ::one(5));
  SQ q(5);
  q.add_term(1, 0, Rational(1));
  SQ e = exp_neg(q);
  EXPECT_EQ(e.coeff(0, 0), 1);
  EXPECT_EQ(e.coeff(1, 0), -1);
  EXPECT_EQ(e.coeff(2, 0), Rational(1, 2));
  EXPECT_EQ(e.coeff(3, 0), Rational(-1, 6));
  EXPECT_EQ(e.coeff(4, 0), Rational(1, 24));
}

TEST(SeriesExp, RejectsConstantTerm) {
  SQ a(4);
  a.add_term(0, 0, Rational(1));
  EXPECT_THROW(exp_neg(a), InvalidInput);
}

TEST(SeriesExp, InverseProperty) {
  std::mt19937 rng(777);
  for (int trial = 0; trial < 20; ++trial) {
    S r = random_series(rng, 6);
    SQ a = convert<Rational>(r);
    SQ pos(6);
    for (const auto& [st, p] : a.terms())
      if (st > 0) pos.add_poly(st, p);
    EXPECT_EQ(exp_neg(pos) * exp_neg(-pos), SQ::one(6));
  }
}

TEST(SeriesRing, RandomAlgebraicLaws) {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    S a = random_series(rng, 5), b = random_series(rng, 5), c = random_series(rng, 5);
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ(a * (b + c), a * b + a * c);
  }
}

TEST(SeriesGraded, ExpNegOfNilpotent) {
  // Outer grading with Rational-series coefficients: exp(-x) = 1 - x + x^2/2.
  std::vector<SQ> a(3, SQ(3));
  a[1] = SQ::one(3);
  auto e = graded_exp_neg(a, SQ::one(3));
  EXPECT_EQ(e[0], SQ::one(3));
  EXPECT_EQ(e[1], SQ::one(3).scaled(Rational(-1)));
  EXPECT_EQ(e[2], SQ::one(3).scaled(Rational(1, 2)));
}
