#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace bimcalc;

namespace {

AlgBimodule transported(const AlgBimodule& xm, const Intertwiner& phi) {
  Intertwiner inv = map_blocks(phi, [](const Mat& b) -> Mat { return b.size() ? Mat(b.inverse()) : b; });
  AlgBimodule out = xm;
  out.l = phi * xm.l * fuse_morphisms(identity(xm.left.h), inv);
  out.r = phi * xm.r * fuse_morphisms(inv, identity(xm.right.h));
  return out;
}

Intertwiner random_module_map(Rng& rng, const AlgBimodule& a, const AlgBimodule& b) {
  Intertwiner f = zero_map(a.x, b.x);
  for (const auto& g : module_maps(a, b)) f = f + cplx(uniform(rng, -1, 1), uniform(rng, -1, 1)) * g;
  return f;
}

}  // namespace

TEST(Modules, SuiteIsSpecial) {
  for (const auto& [name, xm] : fix::module_suite()) {
    ModuleReport r = verify_module(xm);
    EXPECT_LT(r.axioms(), 1e-10) << name;
    EXPECT_LT(r.special(), 1e-10) << name;
    EXPECT_LT(r.left_frobenius, 1e-10) << name;
    EXPECT_LT(r.right_frobenius, 1e-10) << name;
  }
}

TEST(Modules, PerturbedActionBreaksUnit) {
  Rng rng(2);
  AlgBimodule xm = regular_module(fix::m2());
  xm.l = xm.l + 0.01 * random_intertwiner(xm.l.dom, xm.l.cod, rng);
  EXPECT_GT(verify_module(xm).left_unit, 1e-3);
}

TEST(Modules, ShapeMismatchRejected) {
  AlgBimodule xm = regular_module(fix::m2());
  xm.right = fix::two_point_algebra();
  EXPECT_THROW(verify_module(xm), Error);
}

TEST(SpecializeModule, RestoresSpecialness) {
  Rng rng(4);
  for (const auto& [name, xm] : fix::module_suite()) {
    Intertwiner phi = identity(xm.x) + 0.4 * random_intertwiner(xm.x, xm.x, rng);
    AlgBimodule bent = transported(xm, phi);
    ModuleReport before = verify_module(bent);
    ASSERT_LT(before.axioms(), 1e-9) << name;
    SpecializedModule s = specialize_module(bent);
    EXPECT_LT(s.symmetry, 1e-9) << name;
    ModuleReport after = verify_module(s.module);
    EXPECT_LT(after.axioms(), 1e-9) << name;
    EXPECT_LT(after.special(), 1e-9) << name;
    EXPECT_LT(module_map_residual(bent, s.module, s.iso), 1e-9) << name;
  }
}

TEST(SpecializeModule, SpecialInputUnchanged) {
  AlgBimodule xm = regular_module(fix::z3());
  SpecializedModule s = specialize_module(xm);
  EXPECT_LT(distance(s.iso, identity(xm.x)), 1e-10);
}

TEST(SpecializeModule, RescaledRegularAction) {
  // one-block example: Z2 acting on itself through phi = diag(2, 1) in the group basis
  AlgBimodule xm = regular_module(fix::z2());
  Intertwiner phi = identity(xm.x);
  phi.block(0, 0)(0, 0) = 2.0;
  AlgBimodule bent = transported(xm, phi);
  EXPECT_GT(verify_module(bent).special(), 0.1);
  SpecializedModule s = specialize_module(bent);
  EXPECT_LT(verify_module(s.module).special(), 1e-12);
}

TEST(Modules, AdjointOfModuleMapIsModuleMap) {
  Rng rng(6);
  auto suite = fix::module_suite();
  for (const auto& [name, xm] : suite) {
    Intertwiner f = random_module_map(rng, xm, xm);
    EXPECT_LT(module_map_residual(xm, xm, f), 1e-9) << name;
    EXPECT_LT(module_map_residual(xm, xm, adjoint(f)), 1e-9) << name;
  }
  // non-special modules: the adjoint may fail
  AlgBimodule xm = regular_module(fix::z3());
  Intertwiner phi = identity(xm.x) + 0.5 * random_intertwiner(xm.x, xm.x, rng);
  AlgBimodule bent = transported(xm, phi);
  double worst_adjoint = 0;
  for (const auto& g : module_maps(bent, bent)) worst_adjoint = std::max(worst_adjoint, module_map_residual(bent, bent, adjoint(g)));
  EXPECT_GT(worst_adjoint, 1e-3);
}

TEST(PProjection, TrivialAlgebraGivesIdentity) {
  TracialAlgebra c2({1, 2}), c({1});
  AlgBimodule y = trivial_module(Bimodule(c2, c, (IMat(1, 2) << 1, 2).finished()));
  AlgBimodule x = trivial_module(Bimodule(c, c2, (IMat(2, 1) << 2, 1).finished()));
  Intertwiner p = p_projection(y, x);
  EXPECT_LT(distance(p, identity(fused(y.x, x.x))), 1e-12);
  RelativeProduct rp = rel_tensor(y, x);
  EXPECT_EQ(rp.product.x.mult, fused(y.x, x.x).mult);
}

TEST(PProjection, RegularLeftFactor) {
  for (const auto& [name, xm] : fix::module_suite()) {
    AlgBimodule b = regular_module(xm.left);
    Intertwiner p = p_projection(b, xm);
    EXPECT_LT(distance(p, adjoint(xm.l) * xm.l), 1e-10) << name;
    EXPECT_LT(distance(p * p, p), 1e-10) << name;
    EXPECT_LT(distance(adjoint(p), p), 1e-10) << name;
  }
}

TEST(PProjection, RankMatchesDenseOracle) {
  auto suite = fix::module_suite();
  for (const auto& [name, xm] : suite) {
    AlgBimodule a = regular_module(xm.right);
    RelativeProduct rp = rel_tensor(xm, a);
    int rank = numerical_rank(dense(rp.p), 1e-8);
    EXPECT_EQ(rank, rp.product.x.dim()) << name;
    EXPECT_EQ(rp.product.x.mult, xm.x.mult) << name;
  }
}

TEST(PProjection, Naturality) {
  Rng rng(8);
  FrobeniusAlgebra b = fix::m2();
  TracialAlgebra c({1});
  FrobeniusAlgebra tc = trivial_algebra(c);
  AlgBimodule y1 = free_module(tc, Bimodule(c, c, (IMat(1, 1) << 1).finished()), b);
  AlgBimodule y2 = regular_module(b);
  y2.left = tc;
  y2.l = left_unitor(b.h);
  AlgBimodule x1 = free_module(b, Bimodule(c, c, (IMat(1, 1) << 2).finished()), tc);
  AlgBimodule x2 = free_module(b, Bimodule(c, c, (IMat(1, 1) << 1).finished()), tc);
  ASSERT_LT(verify_module(y2).axioms(), 1e-10);
  Intertwiner f = random_module_map(rng, x1, x2), g = random_module_map(rng, y1, y2);
  ASSERT_GT(opnorm(f), 0.1);
  ASSERT_GT(opnorm(g), 0.1);
  Intertwiner p1 = p_projection(y1, x1), p2 = p_projection(y2, x2);
  EXPECT_LT(distance(fuse_morphisms(g, f) * p1, p2 * fuse_morphisms(g, f)), 1e-10);
}

TEST(RelTensor, UnitConstraints) {
  for (const auto& [name, xm] : fix::module_suite()) {
    RelativeProduct left = rel_tensor(regular_module(xm.left), xm);
    Intertwiner u = xm.l * left.s;
    EXPECT_LT(distance(adjoint(u) * u, identity(left.product.x)), 1e-10) << name;
    EXPECT_LT(distance(u * adjoint(u), identity(xm.x)), 1e-10) << name;
    EXPECT_LT(module_map_residual(left.product, xm, u), 1e-10) << name;
    RelativeProduct right = rel_tensor(xm, regular_module(xm.right));
    Intertwiner v = xm.r * right.s;
    EXPECT_LT(distance(v * adjoint(v), identity(xm.x)), 1e-10) << name;
    EXPECT_LT(module_map_residual(right.product, xm, v), 1e-10) << name;
  }
}

TEST(RelTensor, ProductIsSpecial) {
  TracialAlgebra c({1});
  FrobeniusAlgebra b = fix::z3(), tc = trivial_algebra(c);
  AlgBimodule y = free_module(tc, Bimodule(c, c, (IMat(1, 1) << 1).finished()), b);
  AlgBimodule x = free_module(b, Bimodule(c, c, (IMat(1, 1) << 2).finished()), fix::m2());
  RelativeProduct rp = rel_tensor(y, x);
  ModuleReport r = verify_module(rp.product);
  EXPECT_LT(r.axioms(), 1e-10);
  EXPECT_LT(r.special(), 1e-10);
  EXPECT_LT(distance(adjoint(rp.s) * rp.s, identity(rp.product.x)), 1e-12);
  EXPECT_LT(distance(rp.s * adjoint(rp.s), rp.p), 1e-10);
}

TEST(RelTensor, AlgebraOverItself) {
  FrobeniusAlgebra a = fix::two_point_algebra();
  AlgBimodule am = regular_module(a);
  RelativeProduct rp = rel_tensor(am, am);
  EXPECT_EQ(rp.product.x.mult, a.h.mult);
  EXPECT_LT(module_map_residual(rp.product, am, a.mult * rp.s), 1e-10);
}

TEST(RelTensor, MorphismsFunctorialAndStar) {
  Rng rng(9);
  FrobeniusAlgebra b = fix::z2();
  TracialAlgebra c({1});
  FrobeniusAlgebra tc = trivial_algebra(c);
  AlgBimodule y = free_module(tc, Bimodule(c, c, (IMat(1, 1) << 2).finished()), b);
  AlgBimodule x = free_module(b, Bimodule(c, c, (IMat(1, 1) << 1).finished()), tc);
  RelativeProduct rp = rel_tensor(y, x);
  Intertwiner g1 = random_module_map(rng, y, y), g2 = random_module_map(rng, y, y);
  Intertwiner f1 = random_module_map(rng, x, x), f2 = random_module_map(rng, x, x);
  Intertwiner lhs = rel_tensor_morphisms(rp, rp, g2, f2) * rel_tensor_morphisms(rp, rp, g1, f1);
  EXPECT_LT(distance(lhs, rel_tensor_morphisms(rp, rp, g2 * g1, f2 * f1)), 1e-10);
  EXPECT_LT(distance(adjoint(rel_tensor_morphisms(rp, rp, g1, f1)), rel_tensor_morphisms(rp, rp, adjoint(g1), adjoint(f1))), 1e-10);
  EXPECT_LT(distance(rel_tensor_morphisms(rp, rp, identity(y.x), identity(x.x)), identity(rp.product.x)), 1e-12);
  cplx a(0.3, -1.2);
  EXPECT_LT(distance(rel_tensor_morphisms(rp, rp, g1 + a * g2, f1),
                     rel_tensor_morphisms(rp, rp, g1, f1) + a * rel_tensor_morphisms(rp, rp, g2, f1)), 1e-10);
  EXPECT_LT(module_map_residual(rp.product, rp.product, rel_tensor_morphisms(rp, rp, g1, f1)), 1e-10);
}

TEST(RelTensor, AssociatorIsUnitaryModuleMap) {
  TracialAlgebra c({1});
  FrobeniusAlgebra b = fix::z2(), a = fix::m2(), tc = trivial_algebra(c);
  AlgBimodule z = free_module(tc, Bimodule(c, c, (IMat(1, 1) << 1).finished()), b);
  AlgBimodule y = free_module(b, Bimodule(c, c, (IMat(1, 1) << 1).finished()), a);
  AlgBimodule x = free_module(a, Bimodule(c, c, (IMat(1, 1) << 1).finished()), tc);
  RelativeAssociator as = relative_associator(z, y, x);
  const Intertwiner& u = as.unitary;
  EXPECT_LT(distance(adjoint(u) * u, identity(u.dom)), 1e-10);
  EXPECT_LT(distance(u * adjoint(u), identity(u.cod)), 1e-10);
  EXPECT_LT(module_map_residual(as.zy_x.product, as.z_yx.product, u), 1e-10);
}
