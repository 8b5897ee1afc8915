#pragma once

#include "bimcalc/algebra.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bimcalc {

using IMat = Eigen::MatrixXi;

// N-M bimodule in skeletal form. Block (j,i) is C^{n_j} (x) C^{k_ji} (x) C^{m_i};
// N acts on the first leg, M on the last one.
struct Bimodule {
  TracialAlgebra source;  // M, right action
  TracialAlgebra target;  // N, left action
  IMat mult;              // s_N x s_M

  Bimodule() = default;
  Bimodule(TracialAlgebra src, TracialAlgebra tgt, IMat k);

  int k(int j, int i) const { return mult(j, i); }
  int index(int j, int i) const { return j * source.size() + i; }
  int num_blocks() const { return source.size() * target.size(); }
  int block_dim(int j, int i) const { return target.block(j) * mult(j, i) * source.block(i); }
  int dim() const;
  bool is_zero() const { return mult.sum() == 0; }

  bool operator==(const Bimodule& o) const {
    return source == o.source && target == o.target && mult == o.mult;
  }
  bool operator!=(const Bimodule& o) const { return !(*this == o); }
};

std::string describe(const Bimodule& x);

Bimodule unit_bimodule(const TracialAlgebra& a);
Bimodule zero_bimodule(const TracialAlgebra& source, const TracialAlgebra& target);

// ---- vectors

struct Vector {
  Bimodule parent;
  std::vector<CVec> blocks;  // entry (p,q,r) of block (j,i) sits at (p*k + q)*m + r

  const CVec& block(int j, int i) const { return blocks[static_cast<size_t>(parent.index(j, i))]; }
  CVec& block(int j, int i) { return blocks[static_cast<size_t>(parent.index(j, i))]; }
};

Vector zero_vector(const Bimodule& x);
Vector unit_vector(const Bimodule& x, int j, int i, int p, int q, int r);
Vector random_vector(const Bimodule& x, Rng& rng);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(cplx s, const Vector& a);

cplx inner(const Vector& a, const Vector& b);  // linear in the second slot
double norm(const Vector& a);

CVec flatten(const Vector& v);
Vector unflatten(const Bimodule& x, const CVec& flat);
// All unit vectors, in flattened order.
std::vector<Vector> standard_vectors(const Bimodule& x);

// a in M viewed in L^2(M).
Vector algebra_vector(const Element& a);
Element vector_algebra(const Vector& v);

Vector act(const Element& b, const Vector& v, const Element& a);
Vector left_act(const Element& b, const Vector& v);
Vector right_act(const Vector& v, const Element& a);

// <xi, beta>_M and N<beta, xi> with <xi, beta a> = tau_M(<xi,beta>_M a), <xi, b beta> = tau_N(b N<beta,xi>).
Element m_valued_inner(const Vector& xi, const Vector& beta);
Element n_valued_inner(const Vector& beta, const Vector& xi);

// xi = sum N<xi, xi_u> xi_u  and  beta = sum beta_t <beta_t, beta>_M.
std::vector<Vector> left_basis(const Bimodule& x);
std::vector<Vector> right_basis(const Bimodule& x);

// ---- intertwiners

struct Intertwiner {
  Bimodule dom, cod;
  std::vector<Mat> blocks;  // k^cod_ji x k^dom_ji

  const Mat& block(int j, int i) const { return blocks[static_cast<size_t>(dom.index(j, i))]; }
  Mat& block(int j, int i) { return blocks[static_cast<size_t>(dom.index(j, i))]; }
};

void require_parallel(const Bimodule& x, const Bimodule& y, const std::string& what);

Intertwiner identity(const Bimodule& x);
Intertwiner zero_map(const Bimodule& dom, const Bimodule& cod);
Intertwiner random_intertwiner(const Bimodule& dom, const Bimodule& cod, Rng& rng);
Intertwiner operator*(const Intertwiner& g, const Intertwiner& f);  // g after f
Intertwiner operator+(const Intertwiner& f, const Intertwiner& g);
Intertwiner operator-(const Intertwiner& f, const Intertwiner& g);
Intertwiner operator*(cplx s, const Intertwiner& f);
Intertwiner adjoint(const Intertwiner& f);
double opnorm(const Intertwiner& f);  // max over blocks of the spectral norm
double distance(const Intertwiner& f, const Intertwiner& g);
Vector apply(const Intertwiner& f, const Vector& v);

// Block-wise transformation helpers.
Intertwiner map_blocks(const Intertwiner& f, const std::function<Mat(const Mat&)>& op);

int intertwiner_dim(const Bimodule& dom, const Bimodule& cod);
CVec coords(const Intertwiner& f);
Intertwiner from_coords(const Bimodule& dom, const Bimodule& cod, const CVec& c);

// Basis of {t : constraint(t) = 0} for a linear constraint on dom -> cod intertwiners.
std::vector<Intertwiner> solve_intertwiners(const Bimodule& dom, const Bimodule& cod,
                                            const std::function<CVec(const Intertwiner&)>& constraint,
                                            double rtol = 1e-9);

// ---- dense forms (oracle side)

Mat dense(const Intertwiner& f);
Mat dense_left(const Bimodule& x, const Element& b);
Mat dense_right(const Bimodule& x, const Element& a);
// Reads the multiplicity blocks of a linear map known to be an intertwiner.
Intertwiner intertwiner_from_function(const Bimodule& dom, const Bimodule& cod,
                                      const std::function<Vector(const Vector&)>& f);
Intertwiner intertwiner_from_dense(const Bimodule& dom, const Bimodule& cod, const Mat& t);

// ---- conjugation

Bimodule conjugate(const Bimodule& x);
Vector conjugate_vector(const Vector& v);  // antiunitary X -> conj(X)
Intertwiner conjugate_map(const Intertwiner& f);

// ---- fusion

struct FusionSegment {
  int mid;     // block of the shared algebra
  int offset;  // start inside the fused multiplicity leg
  int left;    // multiplicity of the left factor
  int right;   // multiplicity of the right factor
};

struct FusionWitness {
  Bimodule left, right, fused;
  std::vector<std::vector<FusionSegment>> segments;  // indexed like fused blocks
};

// Y in hom(M,N), X in hom(L,M); result is Y (x)_M X in hom(L,N).
FusionWitness fuse(const Bimodule& y, const Bimodule& x);
Bimodule fused(const Bimodule& y, const Bimodule& x);
Vector fuse_vectors(const Vector& y, const Vector& x);
Intertwiner fuse_morphisms(const Intertwiner& g, const Intertwiner& f);
// (Z (x) Y) (x) X -> Z (x) (Y (x) X)
Intertwiner associator(const Bimodule& z, const Bimodule& y, const Bimodule& x);
Intertwiner associator_inv(const Bimodule& z, const Bimodule& y, const Bimodule& x);
// L^2(N) (x) X -> X and X (x) L^2(M) -> X
Intertwiner left_unitor(const Bimodule& x);
Intertwiner right_unitor(const Bimodule& x);

// tau_M(<y1,y2>_M M<x2,x1>), the inner product of y1 (x) x1 with y2 (x) x2.
cplx tensor_inner(const Vector& y1, const Vector& x1, const Vector& y2, const Vector& x2);

struct GramFusion {
  int quotient_dim = 0;
  Bimodule skeletal;
  std::vector<Mat> left_rep;   // one per matrix unit of the target, in orthonormal quotient coordinates
  std::vector<Mat> right_rep;  // one per matrix unit of the source (transposed: entry for e_qp)
  Mat unitary;                 // quotient -> dense skeletal space, intertwining both actions
  double gram_min_eig = 0;
  double residual = 0;         // max action mismatch after conjugating by `unitary`
};

GramFusion fuse_gram_oracle(const Bimodule& y, const Bimodule& x, Rng& rng);

// Unitary u with u rho1(g) = rho2(g) u for all generators, built by twirling a random matrix.
// Each family lists matrix-unit images e_pq for one block, row-major.
struct RepFamily {
  std::vector<int> sizes;          // block sizes
  std::vector<std::vector<Mat>> units;  // units[b][p*m+q]
};
Mat twirl(const std::vector<std::pair<RepFamily, RepFamily>>& actions, const Mat& t);

// ---- direct sums

struct DirectSum {
  Bimodule sum;
  Intertwiner inj1, inj2;  // isometries X1 -> sum, X2 -> sum
};
DirectSum direct_sum(const Bimodule& x1, const Bimodule& x2);

// Sub-bimodule keeping only the blocks with mask(j,i) set; returns the inclusion isometry.
struct Restriction {
  Bimodule sub;
  Intertwiner incl;
};
Restriction restrict_blocks(const Bimodule& x, const std::function<bool(int, int)>& keep);

}  // namespace bimcalc
