// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include "bimcalc/decomposition.hpp"
#include "bimcalc/realization.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace bimcalc;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records a failure with a reason; keeps the first few reasons only.
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (pass || failures < 3) detail << " [" << what << "]";
    pass = false;
    ++failures;
  }
  void below(double value, double tol, const std::string& what) {
    std::ostringstream os;
    os << what << " = " << value << " >= " << tol;
    expect(value < tol, os.str());
  }
  int failures = 0;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Intertwiner random_module_map(Rng& rng, const AlgBimodule& a, const AlgBimodule& b) {
  Intertwiner f = zero_map(a.x, b.x);
  for (const auto& g : module_maps(a, b)) f = f + cplx(uniform(rng, -1, 1), uniform(rng, -1, 1)) * g;
  return f;
}

double unitarity(const Intertwiner& u) {
  return worst({distance(adjoint(u) * u, identity(u.dom)), distance(u * adjoint(u), identity(u.cod))});
}

// 1. solution_from_bases on 50 random bimodules, residual < 1e-10, under 60 s.
void conjugate_equations(Outcome& o) {
  const double tol = 1e-10, budget = 60;
  Rng rng(101);
  double worst_res = 0;
  auto t0 = Clock::now();
  for (int t = 0; t < 50; ++t) {
    Bimodule x = gen::bimodule(rng, 3, 3, 2);
    double r = check_conjugate_equations(solution_from_bases(x)).max();
    worst_res = worst({worst_res, r});
    o.below(r, tol, "residual of " + describe(x));
  }
  double secs = seconds_since(t0);
  o.below(secs, budget, "runtime");
  o.detail << " 50 bimodules, worst residual " << worst_res << " (tol " << tol << "), " << secs << " s";
}

// 2. d(Xbar X) = d(X)^2, d(X Y) <= d(X) d(Y) on 50 pairs; 20 standardization pairs related by a unitary.
void dimension_laws(Outcome& o) {
  const double rel_tol = 1e-8, sub_tol = 1e-8, uniq_tol = 1e-9;
  Rng rng(202);
  auto dim_of = [](const Bimodule& x) { return solution_dimension(standardize(solution_from_bases(x))); };
  double worst_mult = 0, worst_sub = -1e300, worst_uniq = 0;
  int pairs = 0;
  while (pairs < 50) {
    TracialAlgebra l = gen::algebra(rng), m = gen::algebra(rng), n = gen::algebra(rng);
    Bimodule x = gen::connected_bimodule(rng, m, n);
    Bimodule y = gen::bimodule(rng, l, m);
    Bimodule xy = fused(x, y);
    if (xy.is_zero()) continue;
    ++pairs;
    double dx = dim_of(x), dy = dim_of(y);
    double rel = std::abs(dim_of(fused(conjugate(x), x)) / (dx * dx) - 1);
    worst_mult = worst({worst_mult, rel});
    o.below(rel, rel_tol, "d(Xbar X)/d(X)^2 - 1 for " + describe(x));
    double excess = dim_of(xy) - dx * dy;
    worst_sub = std::max(worst_sub, excess);
    o.expect(excess <= sub_tol, "d(XY) > d(X)d(Y) for " + describe(x) + " and " + describe(y));
  }
  for (int t = 0; t < 20; ++t) {
    Bimodule x = gen::connected_bimodule(rng, gen::algebra(rng), gen::algebra(rng));
    DualitySolution base = solution_from_bases(x);
    DualitySolution s1 = standardize(apply_gauge(base, random_intertwiner(base.xbar, base.xbar, rng)));
    DualitySolution s2 = standardize(apply_gauge(base, random_intertwiner(base.xbar, base.xbar, rng)));
    double res = 1;
    Intertwiner u = gauge_between(s1, s2, &res);
    double r = worst({res, unitarity(u)});
    worst_uniq = worst({worst_uniq, r});
    o.below(r, uniq_tol, "standardization gauge for " + describe(x));
  }
  o.detail << " 50 pairs: worst |d(Xbar X)/d(X)^2 - 1| " << worst_mult << " (tol " << rel_tol
           << "), max d(XY) - d(X)d(Y) " << worst_sub << " (tol " << sub_tol << "); 20 standardization pairs, worst "
           << worst_uniq << " (tol " << uniq_tol << ")";
}

// 3. specialize on 20 random Frobenius algebras.
void specialization(Outcome& o) {
  const double tol = 1e-9;
  Rng rng(303);
  double worst_special = 0, worst_hom = 0, worst_bound = -1e300;
  for (int t = 0; t < 20; ++t) {
    FrobeniusAlgebra f = fix::random_frobenius(rng, gen::algebra(rng, 2, 2));
    Specialized s = specialize(f);
    AlgebraReport r = verify_algebra(s.algebra);
    worst_special = worst({worst_special, r.special});
    worst_hom = worst({worst_hom, s.hom_residual});
    worst_bound = std::max(worst_bound, s.bound - s.min_eig);
    o.below(r.special, tol, "special residual");
    o.below(r.algebra_residual(), tol, "algebra axioms");
    o.below(s.hom_residual, tol, "homomorphism residual");
    o.expect(s.min_eig >= s.bound - tol, "eigenvalue bound");
  }
  o.detail << " 20 algebras: worst |mm* - 1| " << worst_special << ", homomorphism " << worst_hom
           << ", max(bound - min eig) " << worst_bound << " (tol " << tol << ")";
}

// 4. relative tensor products over the module suite.
void module_audit(Outcome& o) {
  const double proj_tol = 1e-9, nat_tol = 1e-10, unit_tol = 1e-9, assoc_tol = 1e-9;
  Rng rng(404);
  double w_proj = 0, w_nat = 0, w_unit = 0, w_assoc = 0;
  int count = 0;
  for (const auto& [name, xm] : fix::module_suite()) {
    ++count;
    const std::string n = name;
    AlgBimodule bl = regular_module(xm.left), ar = regular_module(xm.right);
    for (const Intertwiner& p : {p_projection(bl, xm), p_projection(xm, ar)}) {
      double r = worst({distance(p * p, p), distance(adjoint(p), p)});
      w_proj = worst({w_proj, r});
      o.below(r, proj_tol, "projection " + n);
    }
    // naturality: (g (x) f) p1 = p2 (g (x) f) for module maps g on B and f on X
    Intertwiner f = random_module_map(rng, xm, xm), g = random_module_map(rng, bl, bl);
    Intertwiner p = p_projection(bl, xm);
    double nat = distance(fuse_morphisms(g, f) * p, p * fuse_morphisms(g, f));
    w_nat = worst({w_nat, nat});
    o.below(nat, nat_tol, "naturality " + n);
    // B (x)_B X -> X through l_X^*, and X (x)_A A -> X through r_X^*
    RelativeProduct left = rel_tensor(bl, xm), right = rel_tensor(xm, ar);
    Intertwiner u = xm.l * left.s, v = xm.r * right.s;
    double unit = worst({unitarity(u), module_map_residual(left.product, xm, u), unitarity(v),
                         module_map_residual(right.product, xm, v)});
    w_unit = worst({w_unit, unit});
    o.below(unit, unit_tol, "unit constraint " + n);
    RelativeAssociator as = relative_associator(bl, xm, ar);
    double assoc = worst({unitarity(as.unitary), module_map_residual(as.zy_x.product, as.z_yx.product, as.unitary)});
    w_assoc = worst({w_assoc, assoc});
    o.below(assoc, assoc_tol, "associator " + n);
  }
  {
    TracialAlgebra c({1});
    FrobeniusAlgebra b = fix::z2(), a = fix::m2(), tc = trivial_algebra(c);
    Bimodule one(c, c, (IMat(1, 1) << 1).finished()), two(c, c, (IMat(1, 1) << 2).finished());
    AlgBimodule z = free_module(tc, one, b), y = free_module(b, two, a), x = free_module(a, one, tc);
    RelativeAssociator as = relative_associator(z, y, x);
    double assoc = worst({unitarity(as.unitary), module_map_residual(as.zy_x.product, as.z_yx.product, as.unitary)});
    w_assoc = worst({w_assoc, assoc});
    o.below(assoc, assoc_tol, "associator of free chain");
    // naturality between different modules
    AlgBimodule y1 = free_module(tc, one, a), x1 = free_module(a, two, tc), x2 = free_module(a, one, tc);
    AlgBimodule y2 = regular_module(a);
    y2.left = tc;
    y2.l = left_unitor(a.h);
    Intertwiner f = random_module_map(rng, x1, x2), g = random_module_map(rng, y1, y2);
    double nat = distance(fuse_morphisms(g, f) * p_projection(y1, x1), p_projection(y2, x2) * fuse_morphisms(g, f));
    w_nat = worst({w_nat, nat});
    o.below(nat, nat_tol, "naturality across modules");
  }
  o.detail << " " << count << " modules: projection " << w_proj << " (tol " << proj_tol << "), naturality " << w_nat
           << " (tol " << nat_tol << "), unit " << w_unit << " (tol " << unit_tol << "), associator " << w_assoc
           << " (tol " << assoc_tol << ")";
}

// 5. extension, density, u and the Morita checks for M2, Z2 and a random special algebra over C + C.
void realization(Outcome& o) {
  const double tol = 1e-9, budget = 30;
  Rng rng(505);
  struct Case {
    std::string name;
    FrobeniusAlgebra f;
    int center;  // expected, -1 when only the independent solve decides
  };
  std::vector<Case> cases = {{"M2", fix::m2(), 1}, {"Z2", fix::z2(), 2},
                             {"random C+C", fix::random_special(rng, TracialAlgebra({1, 1})), -1}};
  double w = 0;
  auto t0 = Clock::now();
  for (const auto& c : cases) {
    Extension e = extension_algebra(c.f);
    const size_t center = center_of_extension(c.f).size();
    o.expect(e.center.size() == center, c.name + ": center dimension differs from the linear solve");
    if (c.center >= 0) o.expect(static_cast<int>(center) == c.center, c.name + ": center dimension");
    o.expect(static_cast<int>(center) == e.n.size(), c.name + ": center vs number of blocks");
    o.expect(e.inclusion_injective && e.left_action_faithful, c.name + ": inclusion");
    StandardBimodule sx = standard_bimodule_X(e);
    RealizationIso u = iso_u(e, sx);
    MoritaReport m = morita_check(e, sx, u);
    std::vector<std::pair<std::string, double>> checks = {
        {"closure", e.closure},         {"adjoint", e.adjoint_formula}, {"star iso", e.star_iso},
        {"center", e.center_match},     {"inclusion", e.inclusion_hom}, {"k identity", e.k_identity},
        {"u unitary", u.unitary},       {"u bimodular", u.bimodular},   {"u unit", u.unit},
        {"u multiplication", u.mult},   {"modules", m.module_axioms},   {"Xbar X", m.xbar_x},
        {"X Xbar", m.x_xbar},           {"conjugate", check_conjugate_equations(sx.solution).max()}};
    for (const auto& [what, r] : checks) {
      w = worst({w, r});
      o.below(r, tol, c.name + ": " + what);
    }
    o.expect(m.rank_p == m.dim_l2n, c.name + ": rank of p");
  }
  double secs = seconds_since(t0);
  o.below(secs, budget, "runtime");
  o.detail << " M2, Z2, random C+C: worst residual " << w << " (tol " << tol << "), " << secs << " s";
}

// 6. special iff ‖gammabar^* gammabar - 1‖ < 1e-8.
void specialness(Outcome& o) {
  const double tol = 1e-8;
  Rng rng(606);
  std::vector<std::pair<std::string, FrobeniusAlgebra>> special = {
      {"M2", fix::m2()}, {"Z3", fix::z3()}, {"random C+C", fix::random_special(rng, TracialAlgebra({1, 1}))}};
  std::vector<std::pair<std::string, FrobeniusAlgebra>> other = {
      {"M2 scale 1", matrix_algebra(2, 1.0)},
      {"Z2 scale 2", group_algebra(2, 2.0)},
      {"random Frobenius", fix::random_frobenius(rng, TracialAlgebra({1, 2}))}};
  double max_pos = 0, min_neg = 1e300;
  auto gap = [](const FrobeniusAlgebra& f) {
    Extension e = extension_algebra(f);
    return iso_u(e, standard_bimodule_X(e)).special_gap;
  };
  for (const auto& [name, f] : special) {
    o.below(verify_algebra(f).special, tol, name + " special residual");
    double g = gap(f);
    max_pos = std::max(max_pos, g);
    o.below(g, tol, name + " gap");
  }
  for (const auto& [name, f] : other) {
    o.expect(verify_algebra(f).special >= tol, name + " is special");
    double g = gap(f);
    min_neg = std::min(min_neg, g);
    o.expect(g >= tol, name + " gap below tolerance");
  }
  o.detail << " 3 special, largest gap " << max_pos << "; 3 non-special, smallest gap " << min_neg << " (threshold "
           << tol << ")";
}

// 7. skeletal fusion against the Gram-matrix construction on 50 pairs.
void fusion_oracle(Outcome& o) {
  const double tol = 1e-9;
  Rng rng(707);
  double w = 0;
  int pairs = 0;
  while (pairs < 50) {
    TracialAlgebra l = gen::algebra(rng, 2, 2), m = gen::algebra(rng, 2, 2), n = gen::algebra(rng, 2, 2);
    Bimodule y = gen::bimodule(rng, m, n), x = gen::bimodule(rng, l, m);
    Bimodule yx = fused(y, x);
    if (yx.is_zero()) continue;
    ++pairs;
    GramFusion g = fuse_gram_oracle(y, x, rng);
    o.expect(g.quotient_dim == yx.dim() && g.skeletal == yx, "shape for " + describe(y) + " and " + describe(x));
    Mat u = g.unitary;
    double r = worst({g.residual, (u.adjoint() * u - Mat::Identity(u.cols(), u.cols())).norm(),
                      (u * u.adjoint() - Mat::Identity(u.rows(), u.rows())).norm()});
    w = worst({w, r});
    o.below(r, tol, "oracle residual");
  }
  o.detail << " 50 pairs, worst residual " << w << " (tol " << tol << ")";
}

// 8. phi_realize on C and C + C with one generator, against breadth-first reachability.
void decomposition(Outcome& o) {
  const double budget = 120;
  TracialAlgebra c({1}), cc({1, 1});
  auto t0 = Clock::now();
  int rows = 0, words = 0;
  std::string classes;
  for (IMat k : {IMat(IMat::Ones(2, 1)), IMat((IMat(2, 1) << 1, 0).finished())}) {
    Presentation p{{"C", "C+C"}, {c, cc}, {{"X", 0, 1, Bimodule(c, cc, k)}}};
    PhiReport r = phi_realize(p, 3);
    const SimRelation& rel = r.relation;
    auto reach = oracle::reachability(p);
    std::vector<std::pair<int, int>> verts = {{0, 0}, {1, 0}, {1, 1}};
    for (size_t u = 0; u < verts.size(); ++u)
      for (size_t v = 0; v < verts.size(); ++v)
        o.expect((oracle::class_of_block(rel, verts[u].first, verts[u].second) ==
                  oracle::class_of_block(rel, verts[v].first, verts[v].second)) == (reach[u][v] == 1),
                 "partition differs from reachability");
    o.expect(rel.reflexive && rel.symmetric && rel.transitive, "not an equivalence");
    o.expect(r.tables_match(), "hom dimension tables differ");
    o.expect(r.cross_class == 0, "hom between classes");
    for (double res : {r.theta, r.realization, r.functoriality, r.unit_standard}) o.below(res, 1e-9, "phi residual");
    rows += static_cast<int>(r.table.size());
    words += static_cast<int>(rel.words.size());
    classes += (classes.empty() ? "" : "/") + std::to_string(rel.classes.size());
  }
  double secs = seconds_since(t0);
  o.below(secs, budget, "runtime");
  o.detail << " connected/split generator: " << classes << " classes, " << words << " words, " << rows
           << " table rows equal, " << secs << " s";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"conjugate equations", conjugate_equations}, {"dimension laws", dimension_laws},
      {"specialization", specialization},           {"module audit", module_audit},
      {"realization round trip", realization},      {"specialness equivalence", specialness},
      {"fusion oracle", fusion_oracle},             {"decomposition", decomposition}};
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    o.detail.precision(3);
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %zu %s:%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
