#include "bimcalc/frobenius.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

using namespace bimcalc;

namespace {

// Special algebra X̄ (x) X from a normalized standard solution.
FrobeniusAlgebra dual_pair_algebra(Rng& rng, int max_blocks = 2) {
  TracialAlgebra m = gen::algebra(rng, max_blocks, 2);
  TracialAlgebra n = gen::algebra(rng, max_blocks, 2);
  Bimodule x = gen::connected_bimodule(rng, m, n, 2);
  return from_dual_pair(normalize_right_leg(standardize(solution_from_bases(x))));
}

Mat to_matrix(const CVec& v, int n) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = v(i * n + j);
  return a;
}

}  // namespace

TEST(Frobenius, MatrixAlgebraMultipliesMatrices) {
  // m(a (x) b) against the ordinary matrix product, with vectors read row-major
  Rng rng(3);
  const int n = 3;
  FrobeniusAlgebra f = matrix_algebra(n, 1.0);
  Bimodule hh = fused(f.h, f.h);
  for (int trial = 0; trial < 5; ++trial) {
    CVec a = random_matrix(rng, n * n, 1), b = random_matrix(rng, n * n, 1);
    CVec ab(n * n * n * n);
    for (int p = 0; p < n * n; ++p)
      for (int q = 0; q < n * n; ++q) ab(p * n * n + q) = a(p) * b(q);
    CVec out = f.mult.block(0, 0) * ab;
    EXPECT_LT((to_matrix(out, n) - to_matrix(a, n) * to_matrix(b, n)).norm(), 1e-12);
  }
  (void)hh;
}

TEST(Frobenius, FixtureResiduals) {
  for (int n : {2, 3}) {
    for (double s : {1.0 / std::sqrt(double(n)), 1.0, 2.0}) {
      for (const FrobeniusAlgebra& f : {matrix_algebra(n, s), group_algebra(n, s)}) {
        AlgebraReport r = verify_algebra(f, true);
        EXPECT_LT(r.algebra_residual(), 1e-12);
        EXPECT_LT(r.frobenius, 1e-12);
        bool special = std::abs(s - 1.0 / std::sqrt(double(n))) < 1e-14;
        if (special) {
          EXPECT_LT(r.special, 1e-12);
          EXPECT_LT(*r.standard, 1e-9);
        } else {
          EXPECT_GT(r.special, 0.1);
        }
      }
    }
  }
}

TEST(Frobenius, DimensionOfMatrixAlgebra) {
  AlgebraReport r = verify_algebra(matrix_algebra(3, 1.0 / std::sqrt(3.0)), true);
  EXPECT_NEAR(*r.dimension, 9.0, 1e-9);
  EXPECT_LT(*r.norm_gap, 1e-9);
}

TEST(Frobenius, DualPairAlgebrasAreSpecialAndStandard) {
  Rng rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    FrobeniusAlgebra f = dual_pair_algebra(rng);
    AlgebraReport r = verify_algebra(f, true);
    EXPECT_LT(r.algebra_residual(), 1e-9);
    EXPECT_LT(r.frobenius, 1e-9);
    EXPECT_LT(r.special, 1e-9);
    EXPECT_LT(*r.standard, 1e-8);
  }
}

TEST(Frobenius, BrokenMultiplicationDetected) {
  FrobeniusAlgebra f = group_algebra(3, 1.0 / std::sqrt(3.0));
  f.mult.block(0, 0)(0, 4) += 0.05;
  AlgebraReport r = verify_algebra(f);
  EXPECT_GT(std::max(r.algebra_residual(), r.frobenius), 1e-3);
}

TEST(Specialize, FixturesAndTransported) {
  Rng rng(5);
  std::vector<FrobeniusAlgebra> algs = {matrix_algebra(2, 1.0), group_algebra(3, 2.0)};
  for (int trial = 0; trial < 4; ++trial) {
    FrobeniusAlgebra base = dual_pair_algebra(rng);
    Intertwiner c = base.unit + 0.3 * random_intertwiner(base.unit.dom, base.unit.cod, rng);
    algs.push_back(transport(base, right_multiplication(base, c)));
  }
  for (const auto& f : algs) {
    AlgebraReport before = verify_algebra(f);
    ASSERT_LT(before.frobenius, 1e-8);
    Specialized s = specialize(f);
    AlgebraReport after = verify_algebra(s.algebra);
    EXPECT_LT(after.special, 1e-9);
    EXPECT_LT(after.frobenius, 1e-9);
    EXPECT_LT(after.algebra_residual(), 1e-9);
    EXPECT_LT(s.hom_residual, 1e-9);
    EXPECT_GE(s.min_eig, s.bound * (1 - 1e-9));
  }
}

TEST(Specialize, RejectsNonFrobenius) {
  FrobeniusAlgebra f = group_algebra(3, 1.0);
  f.mult.block(0, 0)(1, 0) += 0.2;
  EXPECT_THROW(specialize(f), Error);
}

TEST(StandardizeAlgebra, NonStandardSpecial) {
  // M = C + C, X in hom(M, C) with one copy of each block, unbalanced gauge with gammabar^* gammabar = 1
  TracialAlgebra m({1, 1}), c({1});
  Bimodule x(m, c, (IMat(1, 2) << 1, 1).finished());
  DualitySolution sol = solution_from_bases(x);
  Intertwiner t = identity(sol.xbar);
  t.block(0, 0) *= std::sqrt(0.2);
  t.block(1, 0) *= std::sqrt(3.0);
  sol = apply_gauge(sol, t);
  double gb = sol.gammabar.block(0, 0).squaredNorm();
  sol = apply_gauge(sol, cplx(std::sqrt(gb)) * identity(sol.xbar));
  ASSERT_NEAR(sol.gammabar.block(0, 0).squaredNorm(), 1.0, 1e-12);
  FrobeniusAlgebra f = from_dual_pair(sol);
  AlgebraReport r = verify_algebra(f, true);
  EXPECT_LT(r.special, 1e-9);
  EXPECT_GT(*r.standard, 1e-2);

  Standardized s = standardize_algebra(f);
  AlgebraReport after = verify_algebra(s.algebra, true);
  EXPECT_LT(after.special, 1e-9);
  EXPECT_LT(after.frobenius, 1e-9);
  EXPECT_LT(*after.standard, 1e-8);
  EXPECT_LT(s.standard_residual, 1e-8);
  EXPECT_LT(homomorphism_residual(f, s.algebra, s.iso), 1e-8);
  EXPECT_NEAR(*after.dimension, *r.dimension, 1e-8);
  EXPECT_NEAR(s.dimension, *r.dimension, 1e-8);
}

TEST(StandardizeAlgebra, RandomSpecialized) {
  Rng rng(17);
  for (int trial = 0; trial < 6; ++trial) {
    FrobeniusAlgebra base = dual_pair_algebra(rng);
    Intertwiner c = base.unit + 0.3 * random_intertwiner(base.unit.dom, base.unit.cod, rng);
    FrobeniusAlgebra sp = specialize(transport(base, right_multiplication(base, c))).algebra;
    Standardized s = standardize_algebra(sp);
    AlgebraReport r = verify_algebra(s.algebra, true);
    EXPECT_LT(r.special, 1e-8) << trial;
    EXPECT_LT(r.algebra_residual(), 1e-8) << trial;
    EXPECT_LT(r.frobenius, 1e-8) << trial;
    EXPECT_LT(*r.standard, 1e-8) << trial;
    EXPECT_LT(homomorphism_residual(sp, s.algebra, s.iso), 1e-8) << trial;
    EXPECT_NEAR(*r.dimension, *verify_algebra(sp, true).dimension, 1e-8) << trial;
  }
}

TEST(StandardizeAlgebra, RejectsNonSpecial) {
  EXPECT_THROW(standardize_algebra(matrix_algebra(2, 1.0)), Error);
}

TEST(RightModuleMaps, CentralProjections) {
  // right-module maps of M_n over C are left multiplications: a factor, one central projection
  Rng rng(1);
  FrobeniusAlgebra f = matrix_algebra(2, 1.0 / std::sqrt(2.0));
  auto r = right_module_maps(f);
  EXPECT_EQ(r.size(), 4u);
  auto z = minimal_central_projections(r, rng);
  ASSERT_EQ(z.size(), 1u);
  EXPECT_LT(distance(z[0], identity(f.h)), 1e-9);
  // C[Z_3] is commutative: three minimal projections
  FrobeniusAlgebra g = group_algebra(3, 1.0 / std::sqrt(3.0));
  EXPECT_EQ(minimal_central_projections(right_module_maps(g), rng).size(), 3u);
}

TEST(StandardizeAlgebra, StandardInputKeepsGaugeScalar) {
  FrobeniusAlgebra f = matrix_algebra(2, 1.0 / std::sqrt(2.0));
  Standardized s = standardize_algebra(f);
  EXPECT_LT(distance(s.gauge, cplx(opnorm(s.gauge)) * identity(f.h)), 1e-8);
  EXPECT_LT(std::abs(s.dimension - 4.0), 1e-8);
}

TEST(Frobenius, NanResidualsAreNotSmall) {
  FrobeniusAlgebra f = group_algebra(2, 1.0 / std::sqrt(2.0));
  f.mult.block(0, 0)(0, 0) = std::numeric_limits<double>::quiet_NaN();
  AlgebraReport r = verify_algebra(f);
  EXPECT_FALSE(r.special < 1.0);
  EXPECT_FALSE(r.algebra_residual() < 1.0);
}
