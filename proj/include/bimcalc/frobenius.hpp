#pragma once

#include "bimcalc/duality.hpp"

#include <limits>
#include <optional>

namespace bimcalc {

// (H, m, iota) with H in hom(M,M), m : H (x) H -> H, iota : L^2(M) -> H.
struct FrobeniusAlgebra {
  Bimodule h;
  Intertwiner mult;
  Intertwiner unit;

  const TracialAlgebra& base() const { return h.source; }
};

struct AlgebraReport {
  double unit_left = 0, unit_right = 0, assoc = 0, frobenius = 0, special = 0;
  // Only filled when requested: standard residual of (m* iota, m* iota) and |‖m* iota‖^2 - d|.
  std::optional<double> standard, norm_gap, dimension;

  double algebra_residual() const { return worst({unit_left, unit_right, assoc}); }
};

void check_shapes(const FrobeniusAlgebra& f);
AlgebraReport verify_algebra(const FrobeniusAlgebra& f, bool with_standard = false);

// (m* iota, m* iota) as a solution for (H, H).
DualitySolution frobenius_solution(const FrobeniusAlgebra& f);

struct Specialized {
  FrobeniusAlgebra algebra;
  Intertwiner iso;          // n = (m m*)^{1/2}
  double min_eig = 0;       // of m m*
  double bound = 0;         // 1 / ‖iota‖^2
  double hom_residual = 0;  // ‖n m - m'(n (x) n)‖ and ‖n iota - iota'‖
};

Specialized specialize(const FrobeniusAlgebra& f, double tol = 1e-8);

// (A, t m (t^-1 (x) t^-1), t iota) for invertible t.
FrobeniusAlgebra transport(const FrobeniusAlgebra& f, const Intertwiner& t);
// Residual of t being an algebra map f -> g.
double homomorphism_residual(const FrobeniusAlgebra& f, const FrobeniusAlgebra& g, const Intertwiner& t);

// Right multiplication by c : L^2(M) -> H, i.e. m (1 (x) c).
Intertwiner right_multiplication(const FrobeniusAlgebra& f, const Intertwiner& c);

// t with t m = m (t (x) 1): maps commuting with right multiplication.
std::vector<Intertwiner> right_module_maps(const FrobeniusAlgebra& f);
// Center of N: t m = m (t (x) 1) = m (1 (x) t).
std::vector<Intertwiner> bimodule_self_maps(const FrobeniusAlgebra& f);

// Minimal projections of the center of the *-algebra spanned by `basis` (a unital subalgebra of End(H)).
std::vector<Intertwiner> minimal_central_projections(const std::vector<Intertwiner>& basis, Rng& rng);

struct Standardized {
  FrobeniusAlgebra algebra;
  Intertwiner iso;  // algebra isomorphism from the input
  Intertwiner gauge;  // positive right-module map t
  double standard_residual = 0;
  double dimension = 0;
};

Standardized standardize_algebra(const FrobeniusAlgebra& f, double tol = 1e-8);

// (Xbar (x) X, 1 (x) gammabar^* (x) 1, gamma)
FrobeniusAlgebra from_dual_pair(const DualitySolution& sol, double tol = 1e-8);

// Rescale a standard solution per component so that gammabar^* gammabar = 1.
DualitySolution normalize_right_leg(const DualitySolution& sol);

// Fixtures.
FrobeniusAlgebra trivial_algebra(const TracialAlgebra& m);
// M_n(C) over C with m(e_ab (x) e_cd) = scale delta_bc e_ad; special for scale = 1/sqrt(n).
FrobeniusAlgebra matrix_algebra(int n, double scale);
// C[Z_n] over C with m(g_a (x) g_b) = scale g_{a+b}; special for scale = 1/sqrt(n).
FrobeniusAlgebra group_algebra(int n, double scale);

}  // namespace bimcalc
