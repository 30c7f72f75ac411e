#include <gtest/gtest.h>

#include "support.hpp"

using namespace analytica;
using analytica::testing::random_form;
using analytica::testing::random_matrix;
using analytica::testing::random_point;

TEST(MonomialBasis, TwoVariablesDegreeTwo) {
  const std::vector<MultiIndex> expected{{2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(monomial_basis(2, 2), expected);
}

TEST(MonomialBasis, ThreeVariablesDegreeTwoHasSixMonomials) { EXPECT_EQ(monomial_basis(3, 2).size(), 6u); }

TEST(MonomialBasis, SingleVariable) {
  const std::vector<MultiIndex> expected{{5}};
  EXPECT_EQ(monomial_basis(1, 5), expected);
}

TEST(MonomialBasis, DegreeZeroIsTheConstant) {
  const std::vector<MultiIndex> expected{{0, 0, 0}};
  EXPECT_EQ(monomial_basis(3, 0), expected);
}

TEST(MonomialBasis, CountMatchesBinomial) {
  for (std::size_t n = 1; n <= 6; ++n)
    for (unsigned d = 0; d <= 8; ++d) {
      const auto basis = monomial_basis(n, d);
      EXPECT_EQ(Rational(basis.size()), binomial(static_cast<unsigned>(n + d - 1), d)) << n << "," << d;
      for (std::size_t k = 1; k < basis.size(); ++k) EXPECT_TRUE(GrlexFirst{}(basis[k - 1], basis[k]));
      for (const auto& m : basis) EXPECT_EQ(total_degree(m), d);
    }
}

TEST(HomogeneousForm, RejectsTermsOfWrongDegree) {
  HomogeneousForm::Terms t{{{1, 0}, Rational(1)}};
  EXPECT_THROW(HomogeneousForm(2, 2, t), DimensionError);
  HomogeneousForm::Terms wrong_length{{{1, 0, 1}, Rational(1)}};
  EXPECT_THROW(HomogeneousForm(2, 2, wrong_length), DimensionError);
}

TEST(HomogeneousForm, ZeroCoefficientsAreNotStored) {
  HomogeneousForm::Terms t{{{1, 1}, Rational(0)}, {{2, 0}, Rational(3)}};
  const HomogeneousForm f(2, 2, t);
  EXPECT_EQ(f.terms().size(), 1u);
  const HomogeneousForm g = f - f;
  EXPECT_TRUE(g.is_zero());
  EXPECT_TRUE(g.terms().empty());
}

TEST(HomogeneousForm, ZeroFormsCompareEqualAcrossDegrees) {
  EXPECT_EQ(HomogeneousForm(3, 2), HomogeneousForm(3, 5));
  EXPECT_NE(HomogeneousForm(3, 2), HomogeneousForm(2, 2));
}

TEST(HomogeneousForm, PrintsReadably) {
  const HomogeneousForm f = HomogeneousForm::monomial({2, 0}, 2) - HomogeneousForm::monomial({1, 1});
  EXPECT_EQ(f.to_string(), "2*x1^2 - x1*x2");
  EXPECT_EQ(HomogeneousForm(2, 3).to_string(), "0");
}

TEST(EvaluateForm, ProductOfCoordinates) {
  const HomogeneousForm f = HomogeneousForm::monomial({1, 1, 1});
  EXPECT_EQ(evaluate_form(f, RVec{1, 2, 3}), 6);
}

TEST(EvaluateForm, ZeroForm) { EXPECT_EQ(evaluate_form(HomogeneousForm(3, 4), RVec{5, 6, 7}), 0); }

TEST(EvaluateForm, SumOfSquares) {
  const HomogeneousForm f = HomogeneousForm::monomial({2, 0}) + HomogeneousForm::monomial({0, 2});
  EXPECT_EQ(evaluate_form(f, RVec{3, 4}), 25);
}

TEST(EvaluateForm, DimensionMismatchThrows) {
  EXPECT_THROW(evaluate_form(HomogeneousForm::monomial({1, 1}), RVec{1, 2, 3}), DimensionError);
}

TEST(EvaluateForm, FloatPathAgrees) {
  SeededRng rng(3);
  const HomogeneousForm f = random_form(rng, 3, 4, 50);
  const RVec p{Rational(1, 2), Rational(-3, 4), Rational(5, 8)};
  EXPECT_NEAR(evaluate_form(f, to_doubles(p)), evaluate_form(f, p).get_d(), 1e-9);
}

TEST(ComposeLinear, ProductOnTheDiagonalLine) {
  const HomogeneousForm f = HomogeneousForm::monomial({1, 1});
  const RMatrix line = RMatrix::from_columns({RVec{1, 1}});
  EXPECT_EQ(compose_linear(f, line), HomogeneousForm::monomial({2}));
}

TEST(ComposeLinear, SumOfSquaresOnCoordinatePlane) {
  const HomogeneousForm f =
      HomogeneousForm::monomial({2, 0, 0}) + HomogeneousForm::monomial({0, 2, 0}) + HomogeneousForm::monomial({0, 0, 2});
  const RMatrix plane = RMatrix::from_columns({unit_vector(3, 0), unit_vector(3, 1)});
  EXPECT_EQ(compose_linear(f, plane), HomogeneousForm::monomial({2, 0}) + HomogeneousForm::monomial({0, 2}));
}

TEST(ComposeLinear, IdentityLeavesTheFormUnchanged) {
  SeededRng rng(11);
  const HomogeneousForm f = random_form(rng, 4, 3);
  EXPECT_EQ(compose_linear(f, RMatrix::identity(4)), f);
}

TEST(ComposeLinear, RowCountMismatchThrows) {
  EXPECT_THROW(compose_linear(HomogeneousForm::monomial({1, 1}), RMatrix::identity(3)), DimensionError);
}

TEST(TowerEvaluate, TruncatedExponentialAtOne) {
  const TaylorTower t(1, {HomogeneousForm::constant(1, 1), HomogeneousForm::monomial({1}),
                          HomogeneousForm::monomial({2})});
  EXPECT_EQ(tower_evaluate(t, RVec{1}, 2), Rational(5, 2));
  EXPECT_EQ(tower_evaluate(t, RVec{1}, 1), 2);
}

TEST(TowerEvaluate, AtTheOriginGivesTheConstant) {
  SeededRng rng(5);
  std::vector<HomogeneousForm> forms;
  for (unsigned r = 0; r <= 5; ++r) forms.push_back(random_form(rng, 3, r));
  const TaylorTower t(3, forms);
  for (unsigned r = 0; r <= 5; ++r) EXPECT_EQ(tower_evaluate(t, zeros(3), r), forms[0].coefficient({0, 0, 0}));
}

TEST(TowerEvaluate, ZeroTower) {
  const TaylorTower t(2, {HomogeneousForm(2, 0), HomogeneousForm(2, 1), HomogeneousForm(2, 2)});
  EXPECT_EQ(tower_evaluate(t, RVec{7, -3}), 0);
}

TEST(TowerEvaluate, RejectsOverlongTruncationAndBadDegrees) {
  const TaylorTower t(1, {HomogeneousForm::constant(1, 1)});
  EXPECT_THROW(tower_evaluate(t, RVec{1}, 1), DimensionError);
  EXPECT_THROW(TaylorTower(1, {HomogeneousForm::monomial({1})}), DimensionError);
}

TEST(DivideByLinear, ExactQuotientAndRemainder) {
  SeededRng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
    const HomogeneousForm q = random_form(rng, n, 3);
    RVec l;
    do {
      l = rng.small_vector(n, 3);
    } while (is_zero(l));
    const HomogeneousForm lin = HomogeneousForm::linear(l);
    const Division exact = divide_by_linear(q * lin, lin);
    EXPECT_EQ(exact.quotient, q);
    EXPECT_TRUE(exact.remainder.is_zero());
    const HomogeneousForm f = random_form(rng, n, 4);
    const Division d = divide_by_linear(f, lin);
    EXPECT_EQ(d.quotient * lin + d.remainder, f);
  }
}

// Properties over random inputs.

TEST(FormProperties, Homogeneity) {
  SeededRng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(0, 4));
    const auto d = static_cast<unsigned>(rng.uniform_int(0, 6));
    const HomogeneousForm f = random_form(rng, n, d, 30);
    const RVec p = random_point(rng, n);
    const Rational lambda = rng.small_rational(9, 9);
    EXPECT_EQ(evaluate_form(f, lambda * p), power(lambda, d) * evaluate_form(f, p));
  }
}

TEST(FormProperties, Functoriality) {
  SeededRng rng(202);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(0, 3));
    const std::size_t k = 1 + static_cast<std::size_t>(rng.uniform_int(0, 3));
    const std::size_t m = 1 + static_cast<std::size_t>(rng.uniform_int(0, 3));
    const auto d = static_cast<unsigned>(rng.uniform_int(0, 4));
    const HomogeneousForm f = random_form(rng, n, d, 20);
    const RMatrix a = random_matrix(rng, n, k);
    const RMatrix b = random_matrix(rng, k, m);
    EXPECT_EQ(compose_linear(compose_linear(f, a), b), compose_linear(f, a * b));
  }
}

TEST(FormProperties, EvaluationIsLinear) {
  SeededRng rng(303);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(0, 4));
    const auto d = static_cast<unsigned>(rng.uniform_int(0, 5));
    const HomogeneousForm f = random_form(rng, n, d), g = random_form(rng, n, d);
    const Rational a = rng.small_rational(20, 20), b = rng.small_rational(20, 20);
    const RVec p = random_point(rng, n);
    EXPECT_EQ(evaluate_form(a * f + b * g, p), a * evaluate_form(f, p) + b * evaluate_form(g, p));
  }
}

TEST(FormProperties, ComposeMatchesPointwiseEvaluation) {
  SeededRng rng(404);
  for (int trial = 0; trial < 60; ++trial) {
    const HomogeneousForm f = random_form(rng, 3, 3, 20);
    const RMatrix a = random_matrix(rng, 3, 2);
    const RVec y = random_point(rng, 2);
    EXPECT_EQ(evaluate_form(compose_linear(f, a), y), evaluate_form(f, a * y));
  }
}
