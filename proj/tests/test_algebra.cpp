#include "bimcalc/algebra.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

using namespace bimcalc;

TEST(Trace, IdentityCountsBlocks) {
  TracialAlgebra a({2, 1});
  EXPECT_NEAR(std::abs(trace(a, identity_element(a)) - cplx(2.0)), 0.0, 1e-15);
}

TEST(Trace, MatrixUnitOfM2) {
  TracialAlgebra a({2});
  EXPECT_NEAR(std::abs(trace(a, matrix_unit(a, 0, 0, 0)) - cplx(0.5)), 0.0, 1e-15);
}

TEST(Trace, StarSquareMatchesWeightedFrobenius) {
  Rng rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    TracialAlgebra a = gen::algebra(rng);
    Element x = random_element(a, rng);
    double brute = 0;
    for (int i = 0; i < a.size(); ++i) {
      double s = 0;
      for (int p = 0; p < a.block(i); ++p)
        for (int q = 0; q < a.block(i); ++q) s += std::norm(x[i](p, q));
      brute += s / a.block(i);
    }
    cplx t = trace(a, adjoint(x) * x);
    EXPECT_NEAR(t.real(), brute, 1e-12);
    EXPECT_NEAR(t.imag(), 0.0, 1e-12);
  }
}

TEST(Trace, IsTracial) {
  Rng rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    TracialAlgebra a = gen::algebra(rng);
    Element x = random_element(a, rng), y = random_element(a, rng);
    EXPECT_LT(std::abs(trace(a, x * y) - trace(a, y * x)), 1e-12);
  }
}

TEST(Trace, RejectsForeignElement) {
  TracialAlgebra a({2}), b({3});
  EXPECT_THROW(trace(a, identity_element(b)), Error);
}

TEST(L2Inner, Examples) {
  TracialAlgebra a({2, 1});
  EXPECT_NEAR(l2_inner(identity_element(a), identity_element(a)).real(), 2.0, 1e-15);
  TracialAlgebra m2({2});
  EXPECT_NEAR(std::abs(l2_inner(matrix_unit(m2, 0, 0, 0), matrix_unit(m2, 0, 1, 1))), 0.0, 1e-15);
}

TEST(L2Inner, MatrixUnitGramOfM3) {
  TracialAlgebra a({3});
  std::vector<Element> units;
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q) units.push_back(matrix_unit(a, 0, p, q));
  for (size_t u = 0; u < units.size(); ++u)
    for (size_t v = 0; v < units.size(); ++v) {
      // oracle: tr(e_u^* e_v)/3 by explicit entries
      cplx expect = 0;
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) expect += std::conj(units[u][0](p, q)) * units[v][0](p, q);
      expect /= 3.0;
      EXPECT_LT(std::abs(l2_inner(units[u], units[v]) - expect), 1e-15);
      EXPECT_NEAR(std::abs(expect), u == v ? 1.0 / 3.0 : 0.0, 1e-15);
    }
}

TEST(L2Inner, ConjugateSymmetricAndDefinite) {
  Rng rng(9);
  for (int rep = 0; rep < 30; ++rep) {
    TracialAlgebra a = gen::algebra(rng);
    Element x = random_element(a, rng), y = random_element(a, rng);
    EXPECT_LT(std::abs(l2_inner(x, y) - std::conj(l2_inner(y, x))), 1e-12);
    EXPECT_GT(l2_norm(x), 0.0);
  }
  TracialAlgebra a({2, 3});
  EXPECT_EQ(l2_norm(zero_element(a)), 0.0);
}

TEST(CentralProjections, SumToIdentity) {
  TracialAlgebra c({1});
  auto pc = minimal_central_projections(c);
  ASSERT_EQ(pc.size(), 1u);
  EXPECT_EQ(max_abs(pc[0].element() - identity_element(c)), 0.0);

  TracialAlgebra a({2, 3});
  auto ps = minimal_central_projections(a);
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_NEAR(trace(a, ps[0].element()).real(), 1.0, 1e-15);
  EXPECT_NEAR(trace(a, ps[1].element()).real(), 1.0, 1e-15);
  Element sum = zero_element(a);
  for (auto& p : ps) sum = sum + p.element();
  EXPECT_EQ(max_abs(sum - identity_element(a)), 0.0);
  EXPECT_EQ(max_abs(ps[0].element() * ps[1].element()), 0.0);
}

TEST(CentralProjections, CompressionExtractsBlocks) {
  Rng rng(10);
  for (int rep = 0; rep < 20; ++rep) {
    TracialAlgebra a = gen::algebra(rng);
    Element x = random_element(a, rng);
    for (auto& p : minimal_central_projections(a)) {
      Element c = p.element() * x * p.element();
      for (int i = 0; i < a.size(); ++i) {
        Mat expect = i == p.block ? x[i] : Mat::Zero(a.block(i), a.block(i));
        EXPECT_LT((c[i] - expect).norm(), 1e-15);
      }
    }
  }
}
