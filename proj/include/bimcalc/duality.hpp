#pragma once

#include "bimcalc/bimodule.hpp"

#include <utility>
#include <vector>

namespace bimcalc {

// gamma : L^2(M) -> Xbar (x) X  and  gammabar : L^2(N) -> X (x) Xbar, for X in hom(M,N).
struct DualitySolution {
  Bimodule x, xbar;
  Intertwiner gamma, gammabar;
};

struct ConjugateResiduals {
  double r1 = 0;  // (gammabar^* (x) 1) a^* (1 (x) gamma) - 1_X
  double r2 = 0;  // (1 (x) gammabar^*) a (gamma (x) 1) - 1_Xbar
  double max() const { return worst({r1, r2}); }
};

ConjugateResiduals check_conjugate_equations(const DualitySolution& sol);

DualitySolution solution_from_bases(const Bimodule& x);

// ((t (x) 1) gamma, (1 (x) (t^-1)^*) gammabar) for invertible t in End(Xbar).
DualitySolution apply_gauge(const DualitySolution& sol, const Intertwiner& t);

// t with (t (x) 1) gamma1 = gamma2; `residual` reports how well the gammabar side matches.
Intertwiner gauge_between(const DualitySolution& s1, const DualitySolution& s2, double* residual = nullptr);

struct Component {
  std::vector<int> rows;  // target blocks
  std::vector<int> cols;  // source blocks
  Restriction part;
};

bool is_connected(const Bimodule& x);
std::vector<Component> connected_components(const Bimodule& x);
// Components of the bipartite support graph of a nonnegative pattern, as (rows, cols).
std::vector<std::pair<std::vector<int>, std::vector<int>>> support_components(const IMat& pattern);

// Standard solution: on every connected component gamma^* gamma and gammabar^* gammabar are the
// same scalar d on each block. Perron-Frobenius weighting of the block norms.
DualitySolution standardize(const DualitySolution& sol, double tol = 1e-8);

// Largest deviation of gamma^* gamma, gammabar^* gammabar from the per-component scalar d.
double standard_residual(const DualitySolution& sol);

// max(||gamma||^2, ||gammabar||^2) per component, maximized.
double solution_dimension(const DualitySolution& sol);

// Independent route: minimize ||gamma||^2 ||gammabar||^2 over positive block-scalar gauges with the
// convex solver; returns d.
double dimension_by_descent(const DualitySolution& sol);

struct DimensionData {
  RMat matrix_dim;
  double scalar_dim = 0;
};

DimensionData dimension(const Bimodule& x);

// Solution for Xbar (x) X built from (gamma, gammabar): both legs equal
// (1 (x) gammabar (x) 1) gamma with the associators written out.
Intertwiner self_dual_unit(const DualitySolution& sol);

}  // namespace bimcalc
