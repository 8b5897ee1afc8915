#pragma once

// Deterministic special algebras and modules shared by unit tests and the acceptance run.

#include "bimcalc/algebra_bimodules.hpp"
#include "generators.hpp"

#include <cmath>

namespace fix {

using namespace bimcalc;

// (Xbar (x) X, 1 (x) gammabar^* (x) 1, gamma) for a connected X in hom(M, N), normalized standard solution.
inline FrobeniusAlgebra dual_pair_algebra(const TracialAlgebra& m, const TracialAlgebra& n, const IMat& k) {
  Bimodule x(m, n, k);
  return from_dual_pair(normalize_right_leg(standardize(solution_from_bases(x))));
}

// Special algebra over C + C: X in hom(C + C, C) with multiplicities (1, 1).
inline FrobeniusAlgebra two_point_algebra() {
  return dual_pair_algebra(TracialAlgebra({1, 1}), TracialAlgebra({1}), (IMat(1, 2) << 1, 1).finished());
}

inline FrobeniusAlgebra m2() { return matrix_algebra(2, 1.0 / std::sqrt(2.0)); }
inline FrobeniusAlgebra z2() { return group_algebra(2, 1.0 / std::sqrt(2.0)); }
inline FrobeniusAlgebra z3() { return group_algebra(3, 1.0 / std::sqrt(3.0)); }

// Random special algebra over `m`: dual pair of a random connected bimodule, transported by a
// right multiplication and specialized again, so it is generally not of dual-pair form.
inline FrobeniusAlgebra random_special(Rng& rng, const TracialAlgebra& m, int max_blocks = 2) {
  TracialAlgebra n = gen::algebra(rng, max_blocks, 2);
  FrobeniusAlgebra base = from_dual_pair(normalize_right_leg(standardize(solution_from_bases(gen::connected_bimodule(rng, m, n, 1)))));
  Intertwiner c = base.unit + 0.3 * random_intertwiner(base.unit.dom, base.unit.cod, rng);
  return specialize(transport(base, right_multiplication(base, c))).algebra;
}

// Random Frobenius algebra, generally not special.
inline FrobeniusAlgebra random_frobenius(Rng& rng, const TracialAlgebra& m, int max_blocks = 2) {
  TracialAlgebra n = gen::algebra(rng, max_blocks, 2);
  FrobeniusAlgebra base = from_dual_pair(normalize_right_leg(standardize(solution_from_bases(gen::connected_bimodule(rng, m, n, 2)))));
  Intertwiner c = base.unit + 0.3 * random_intertwiner(base.unit.dom, base.unit.cod, rng);
  return transport(base, right_multiplication(base, c));
}

struct ModuleCase {
  const char* name;
  AlgBimodule module;
};

// Special bimodules: regular modules, free modules and plain bimodules over trivial algebras.
inline std::vector<ModuleCase> module_suite() {
  TracialAlgebra c({1}), c2({1, 1});
  FrobeniusAlgebra tc = trivial_algebra(c), tc2 = trivial_algebra(c2), pt = two_point_algebra();
  std::vector<ModuleCase> out;
  out.push_back({"regular M2", regular_module(m2())});
  out.push_back({"regular Z3", regular_module(z3())});
  out.push_back({"regular two-point", regular_module(pt)});
  out.push_back({"free M2-C", free_module(m2(), Bimodule(c, c, (IMat(1, 1) << 1).finished()), tc)});
  out.push_back({"free Z2-M2", free_module(z2(), Bimodule(c, c, (IMat(1, 1) << 1).finished()), m2())});
  out.push_back({"free two-point-C", free_module(pt, Bimodule(c, c2, (IMat(2, 1) << 1, 1).finished()), tc)});
  out.push_back({"free C-two-point", free_module(tc, Bimodule(c2, c, (IMat(1, 2) << 1, 2).finished()), pt)});
  out.push_back({"plain C+C", trivial_module(Bimodule(c2, c2, (IMat(2, 2) << 1, 0, 1, 1).finished()))});
  return out;
}

}  // namespace fix
