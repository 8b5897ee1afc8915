#pragma once

#include "bimcalc/frobenius.hpp"

namespace bimcalc {

// B-A bimodule: X in hom(L, M), B acts on the left (over M), A on the right (over L).
struct AlgBimodule {
  FrobeniusAlgebra left;   // B
  FrobeniusAlgebra right;  // A
  Bimodule x;
  Intertwiner l;  // B (x) X -> X
  Intertwiner r;  // X (x) A -> X
};

struct ModuleReport {
  double left_assoc = 0, left_unit = 0, right_assoc = 0, right_unit = 0, commute = 0;
  double left_special = 0, right_special = 0;
  // (m_B (x) 1)(1 (x) l^*) = l^* l = (1 (x) l)(m_B^* (x) 1) and the mirror for r; meaningful for special modules
  double left_frobenius = 0, right_frobenius = 0;

  double axioms() const { return worst({left_assoc, left_unit, right_assoc, right_unit, commute}); }
  double special() const { return worst({left_special, right_special}); }
};

void check_shapes(const AlgBimodule& xm);
ModuleReport verify_module(const AlgBimodule& xm);

// Residual of f : X1 -> X2 intertwining both actions.
double module_map_residual(const AlgBimodule& x1, const AlgBimodule& x2, const Intertwiner& f);

// Basis of the bimodule maps X1 -> X2.
std::vector<Intertwiner> module_maps(const AlgBimodule& x1, const AlgBimodule& x2);

struct SpecializedModule {
  AlgBimodule module;
  Intertwiner iso;  // h^-1 : X -> X'
  double symmetry = 0;  // ‖l(1 (x) rr^*)l^* - r(ll^* (x) 1)r^*‖
};
SpecializedModule specialize_module(const AlgBimodule& xm, double tol = 1e-8);

// Algebra acting on itself by multiplication.
AlgBimodule regular_module(const FrobeniusAlgebra& a);
// Free bimodule (B (x) Y) (x) A.
AlgBimodule free_module(const FrobeniusAlgebra& b, const Bimodule& y, const FrobeniusAlgebra& a);
// Any bimodule as a module over the trivial algebras, acting by unitors.
AlgBimodule trivial_module(const Bimodule& y);

// p = (r_Y (x) 1) alpha^-1 (1 (x) l_X^*) on Y (x) X, for Y a C-B and X a B-A bimodule.
Intertwiner p_projection(const AlgBimodule& ym, const AlgBimodule& xm, double tol = 1e-8);

struct RelativeProduct {
  Intertwiner p;
  Intertwiner s;  // isometry Y (x)_B X -> Y (x) X with s s^* = p
  AlgBimodule product;
};

// Isometry onto the range of a projection: per block, eigenvectors of eigenvalue > 1/2 in
// descending order, each with its largest-modulus entry made real positive.
Intertwiner range_isometry(const Intertwiner& p);

RelativeProduct rel_tensor(const AlgBimodule& ym, const AlgBimodule& xm, double tol = 1e-8);
// s2^* (g (x) f) s1
Intertwiner rel_tensor_morphisms(const RelativeProduct& p1, const RelativeProduct& p2, const Intertwiner& g,
                                 const Intertwiner& f);

struct RelativeAssociator {
  RelativeProduct zy, zy_x, yx, z_yx;
  Intertwiner unitary;  // (Z (x)_C Y) (x)_B X -> Z (x)_C (Y (x)_B X), induced by the plain associator
};
RelativeAssociator relative_associator(const AlgBimodule& zm, const AlgBimodule& ym, const AlgBimodule& xm,
                                      double tol = 1e-8);

}  // namespace bimcalc
