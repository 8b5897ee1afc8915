#pragma once

#include "bimcalc/algebra_bimodules.hpp"

#include <array>

namespace bimcalc {

// Left multiplication L_xi : beta -> m(xi (x) beta) as a dense operator on H.
Mat left_multiplication(const FrobeniusAlgebra& f, const Vector& xi);

// N = {L_xi} acting on H, together with a *-isomorphism onto a multi-matrix algebra whose
// matrix units are adapted to the inclusion a -> L_iota(a).
struct Extension {
  FrobeniusAlgebra algebra;
  std::vector<Mat> ops;     // L_xi over the standard basis of H
  std::vector<Mat> center;  // basis of N cap N'
  std::vector<Mat> central_projections;
  TracialAlgebra n;
  std::vector<int> mu;      // multiplicity of each block of N on H
  IMat inclusion;           // s_N x s_M: copies of M_i inside N_q
  // units[q][alpha] is the partial isometry from the alpha-th minimal projection to the reference one;
  // labels[q][alpha] = (i, lambda, r) with M_i's matrix index r inside copy lambda
  std::vector<std::vector<Mat>> units;
  std::vector<std::vector<std::array<int, 3>>> labels;
  Mat k;

  double closure = 0;          // ‖L_a L_b - L_{m(a (x) b)}‖ and unit
  double adjoint_formula = 0;  // ‖L_xi^* - L_{(f^*)^-1 conj(xi)}‖ with the gauge f of the basis solution
  double star_iso = 0;         // phi multiplicative, *-preserving and bijective
  double center_match = 0;     // commutant center vs bimodule self-maps of H
  double inclusion_hom = 0;    // L_iota(a) = a acting on the left, multiplicative
  double k_identity = 0;       // tau_N(k^2 b) = <iota(I), b iota(I)> on the basis
  double k_commutes = 0;
  bool inclusion_injective = false;
  bool left_action_faithful = false;
};

Extension extension_algebra(const FrobeniusAlgebra& f, double tol = 1e-8, std::uint64_t seed = 42);
// Bimodule self-maps of H, i.e. the solution space describing N cap N'.
std::vector<Intertwiner> center_of_extension(const FrobeniusAlgebra& f);
// k >= 0 in N with tau_N(k^2 b) = <iota(I), b iota(I)>; `ext` needs its block structure only.
Mat density_k(const Extension& ext);

Element to_abstract(const Extension& ext, const Mat& b);
Mat from_abstract(const Extension& ext, const Element& a);
double tau_n(const Extension& ext, const Mat& b);
Mat inclusion_op(const Extension& ext, const Element& a);  // L_iota(a)
CVec unit_vector_of(const FrobeniusAlgebra& f);           // iota(I), flattened

struct StandardBimodule {
  Bimodule x;     // L^2(N) as N-M bimodule
  Bimodule xbar;  // conjugate
  DualitySolution solution;
  double gamma_residual = 0, gammabar_residual = 0;  // well-definedness of the dense constructions
};

// L^2(N) in skeletal form with gamma(a) = k (x) L_iota(a), gammabar^*(b1 (x) b2) = b1 k^-1 b2.
StandardBimodule standard_bimodule_X(const Extension& ext);
Vector to_x(const Extension& ext, const Bimodule& x, const Mat& b);     // b in X
Vector to_xbar(const Extension& ext, const Bimodule& x, const Mat& b);  // b in Xbar, as conj(b^*)

struct RealizationIso {
  Intertwiner u;  // H -> Xbar (x)_N X
  FrobeniusAlgebra dual_pair;
  double unitary = 0, bimodular = 0, unit = 0, mult = 0;
  double special_gap = 0;  // ‖gammabar^* gammabar - 1‖
};

RealizationIso iso_u(const Extension& ext, const StandardBimodule& sx);

struct MoritaReport {
  AlgBimodule x_module;     // X as N-H bimodule
  AlgBimodule xbar_module;  // Xbar as H-N bimodule
  double module_axioms = 0;
  double xbar_x = 0;        // u as H-H bimodule unitary onto Xbar (x)_N X
  double x_xbar = 0;        // ‖p^H - gammabar gammabar^*‖ and unitarity of gammabar^* s
  int rank_p = 0, dim_l2n = 0;
  int hom_h = 0, hom_l2n = 0;  // End of H as H-H bimodule vs End of L^2(N)
};

MoritaReport morita_check(const Extension& ext, const StandardBimodule& sx, const RealizationIso& iso,
                          double tol = 1e-8);

}  // namespace bimcalc
