#include "bimcalc/duality.hpp"

#include "bimcalc/convex.hpp"

#include <cmath>
#include <numeric>

namespace bimcalc {

ConjugateResiduals check_conjugate_equations(const DualitySolution& sol) {
  const Bimodule &x = sol.x, &xb = sol.xbar;
  require(sol.gamma.dom == unit_bimodule(x.source) && sol.gamma.cod == fused(xb, x), ErrorKind::Structural,
          "gamma has the wrong shape");
  require(sol.gammabar.dom == unit_bimodule(x.target) && sol.gammabar.cod == fused(x, xb), ErrorKind::Structural,
          "gammabar has the wrong shape");
  ConjugateResiduals r;
  Intertwiner z1 = fuse_morphisms(adjoint(sol.gammabar), identity(x)) * associator_inv(x, xb, x) *
                   fuse_morphisms(identity(x), sol.gamma);
  r.r1 = opnorm(z1 - identity(x));
  Intertwiner z2 = fuse_morphisms(identity(xb), adjoint(sol.gammabar)) * associator(xb, x, xb) *
                   fuse_morphisms(sol.gamma, identity(xb));
  r.r2 = opnorm(z2 - identity(xb));
  return r;
}

DualitySolution solution_from_bases(const Bimodule& x) {
  require(!x.is_zero(), ErrorKind::Precondition, "no dual for zero 1-morphism");
  DualitySolution sol{x, conjugate(x), {}, {}};
  const std::vector<Vector> lb = left_basis(x), rb = right_basis(x);
  std::vector<Vector> lbc, rbc;
  for (const auto& v : lb) lbc.push_back(conjugate_vector(v));
  for (const auto& v : rb) rbc.push_back(conjugate_vector(v));
  const Bimodule xbx = fused(sol.xbar, x), xxb = fused(x, sol.xbar);

  sol.gamma = intertwiner_from_function(unit_bimodule(x.source), xbx, [&](const Vector& v) {
    Element a = vector_algebra(v);
    Vector out = zero_vector(xbx);
    for (size_t u = 0; u < lb.size(); ++u) out = out + fuse_vectors(lbc[u], right_act(lb[u], a));
    return out;
  });
  sol.gammabar = intertwiner_from_function(unit_bimodule(x.target), xxb, [&](const Vector& v) {
    Element b = vector_algebra(v);
    Vector out = zero_vector(xxb);
    for (size_t t = 0; t < rb.size(); ++t) out = out + fuse_vectors(left_act(b, rb[t]), rbc[t]);
    return out;
  });
  return sol;
}

DualitySolution apply_gauge(const DualitySolution& sol, const Intertwiner& t) {
  require(t.dom == sol.xbar && t.cod == sol.xbar, ErrorKind::Structural, "gauge must be an endomorphism of Xbar");
  Intertwiner tinv_star = map_blocks(t, [](const Mat& b) -> Mat {
    if (b.size() == 0) return b;
    return b.inverse().adjoint();
  });
  DualitySolution out = sol;
  out.gamma = fuse_morphisms(t, identity(sol.x)) * sol.gamma;
  out.gammabar = fuse_morphisms(identity(sol.x), tinv_star) * sol.gammabar;
  return out;
}

namespace {

// Omega_ij: the (qbar, q) coefficient matrix of gamma inside block (i,i), segment j.
std::vector<std::vector<Mat>> gamma_blocks(const DualitySolution& sol) {
  const Bimodule& x = sol.x;
  FusionWitness w = fuse(sol.xbar, x);
  const int sM = x.source.size(), sN = x.target.size();
  std::vector<std::vector<Mat>> om(static_cast<size_t>(sM), std::vector<Mat>(static_cast<size_t>(sN)));
  for (int i = 0; i < sM; ++i) {
    const Mat& col = sol.gamma.block(i, i);
    for (const auto& s : w.segments[static_cast<size_t>(i * sM + i)]) {
      Mat o(s.left, s.right);
      for (int a = 0; a < s.left; ++a)
        for (int b = 0; b < s.right; ++b) o(a, b) = col(s.offset + a * s.right + b, 0);
      om[static_cast<size_t>(i)][static_cast<size_t>(s.mid)] = o;
    }
  }
  return om;
}

// Omegabar_ji: the (q, qbar) coefficient matrix of gammabar inside block (j,j), segment i.
std::vector<std::vector<Mat>> gammabar_blocks(const DualitySolution& sol) {
  const Bimodule& x = sol.x;
  FusionWitness w = fuse(x, sol.xbar);
  const int sM = x.source.size(), sN = x.target.size();
  std::vector<std::vector<Mat>> om(static_cast<size_t>(sN), std::vector<Mat>(static_cast<size_t>(sM)));
  for (int j = 0; j < sN; ++j) {
    const Mat& col = sol.gammabar.block(j, j);
    for (const auto& s : w.segments[static_cast<size_t>(j * sN + j)]) {
      Mat o(s.left, s.right);
      for (int a = 0; a < s.left; ++a)
        for (int b = 0; b < s.right; ++b) o(a, b) = col(s.offset + a * s.right + b, 0);
      om[static_cast<size_t>(j)][static_cast<size_t>(s.mid)] = o;
    }
  }
  return om;
}

Mat top_singular_pair(const RMat& c, RVec& left, RVec& right) {
  Eigen::JacobiSVD<RMat> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  left = svd.matrixU().col(0).cwiseAbs();
  right = svd.matrixV().col(0).cwiseAbs();
  return Mat::Constant(1, 1, svd.singularValues()(0));
}

// Polar normalization per block and the gauge-invariant norms a_ij = ||t0 Omega||^2, b_ij.
struct PolarData {
  Intertwiner t0;
  RMat a, b;
};

PolarData polar_data(const DualitySolution& sol) {
  const Bimodule& x = sol.x;
  const int sM = x.source.size(), sN = x.target.size();
  auto om = gamma_blocks(sol);
  auto omb = gammabar_blocks(sol);
  PolarData pd{identity(sol.xbar), RMat::Zero(sM, sN), RMat::Zero(sM, sN)};
  for (int i = 0; i < sM; ++i)
    for (int j = 0; j < sN; ++j) {
      if (x.k(j, i) == 0) continue;
      const Mat& o = om[static_cast<size_t>(i)][static_cast<size_t>(j)];
      Mat t = positive_inverse_sqrt(Mat(o * o.adjoint()));
      pd.t0.block(i, j) = t;
      pd.a(i, j) = (t * o).squaredNorm();
      pd.b(i, j) = (omb[static_cast<size_t>(j)][static_cast<size_t>(i)] * t.inverse().conjugate()).squaredNorm();
    }
  return pd;
}

RMat component_matrix(const PolarData& pd, const std::vector<int>& rows, const std::vector<int>& cols) {
  RMat c(cols.size(), rows.size());
  for (size_t ii = 0; ii < cols.size(); ++ii)
    for (size_t jj = 0; jj < rows.size(); ++jj)
      c(ii, jj) = std::sqrt(pd.a(cols[ii], rows[jj]) * pd.b(cols[ii], rows[jj]));
  return c;
}

}  // namespace

Intertwiner gauge_between(const DualitySolution& s1, const DualitySolution& s2, double* residual) {
  require(s1.x == s2.x && s1.xbar == s2.xbar, ErrorKind::Structural, "solutions for different bimodules");
  auto o1 = gamma_blocks(s1), o2 = gamma_blocks(s2);
  Intertwiner t = zero_map(s1.xbar, s1.xbar);
  for (int i = 0; i < s1.x.source.size(); ++i)
    for (int j = 0; j < s1.x.target.size(); ++j) {
      if (s1.x.k(j, i) == 0) continue;
      // t_ij * Omega1 = Omega2, least squares on the right factor
      const Mat& a = o1[static_cast<size_t>(i)][static_cast<size_t>(j)];
      const Mat& b = o2[static_cast<size_t>(i)][static_cast<size_t>(j)];
      t.block(i, j) = least_squares(Mat(a.transpose()), Mat(b.transpose())).transpose();
    }
  if (residual) {
    DualitySolution moved = apply_gauge(s1, t);
    *residual = std::max(distance(moved.gamma, s2.gamma), distance(moved.gammabar, s2.gammabar));
  }
  return t;
}

std::vector<std::pair<std::vector<int>, std::vector<int>>> support_components(const IMat& pattern) {
  const int r = static_cast<int>(pattern.rows()), c = static_cast<int>(pattern.cols());
  std::vector<int> parent(static_cast<size_t>(r + c));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<size_t>(v)] != v) v = parent[static_cast<size_t>(v)] = parent[static_cast<size_t>(parent[static_cast<size_t>(v)])];
    return v;
  };
  std::vector<bool> used(static_cast<size_t>(r + c), false);
  for (int j = 0; j < r; ++j)
    for (int i = 0; i < c; ++i)
      if (pattern(j, i) != 0) {
        used[static_cast<size_t>(j)] = used[static_cast<size_t>(r + i)] = true;
        int a = find(j), b = find(r + i);
        if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
      }
  std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
  std::vector<int> slot(static_cast<size_t>(r + c), -1);
  for (int v = 0; v < r + c; ++v) {
    if (!used[static_cast<size_t>(v)]) continue;
    int root = find(v);
    if (slot[static_cast<size_t>(root)] < 0) {
      slot[static_cast<size_t>(root)] = static_cast<int>(out.size());
      out.emplace_back();
    }
    auto& comp = out[static_cast<size_t>(slot[static_cast<size_t>(root)])];
    if (v < r)
      comp.first.push_back(v);
    else
      comp.second.push_back(v - r);
  }
  return out;
}

std::vector<Component> connected_components(const Bimodule& x) {
  std::vector<Component> out;
  for (auto& [rows, cols] : support_components(x.mult)) {
    std::vector<bool> rr(static_cast<size_t>(x.target.size()), false), cc(static_cast<size_t>(x.source.size()), false);
    for (int j : rows) rr[static_cast<size_t>(j)] = true;
    for (int i : cols) cc[static_cast<size_t>(i)] = true;
    Restriction part = restrict_blocks(x, [&](int j, int i) { return rr[static_cast<size_t>(j)] && cc[static_cast<size_t>(i)]; });
    out.push_back({rows, cols, part});
  }
  return out;
}

bool is_connected(const Bimodule& x) { return connected_components(x).size() == 1; }

DualitySolution standardize(const DualitySolution& sol, double tol) {
  ConjugateResiduals r = check_conjugate_equations(sol);
  require(r.max() < tol, ErrorKind::Precondition,
          "standardize needs a solution of the conjugate equations (residual " + std::to_string(r.max()) + ")");
  const Bimodule& x = sol.x;
  const int sM = x.source.size(), sN = x.target.size();
  PolarData pd = polar_data(sol);
  RMat w = RMat::Zero(sM, sN);
  for (auto& [rows, cols] : support_components(x.mult)) {
    RVec sig, rho;
    top_singular_pair(component_matrix(pd, rows, cols), sig, rho);
    for (size_t ii = 0; ii < cols.size(); ++ii)
      for (size_t jj = 0; jj < rows.size(); ++jj) {
        const int i = cols[ii], j = rows[jj];
        if (x.k(j, i) == 0) continue;
        w(i, j) = std::sqrt(pd.b(i, j) / pd.a(i, j)) * rho(static_cast<Eigen::Index>(jj)) / sig(static_cast<Eigen::Index>(ii));
      }
  }
  Intertwiner t = pd.t0;
  for (int i = 0; i < sM; ++i)
    for (int j = 0; j < sN; ++j)
      if (x.k(j, i)) t.block(i, j) *= std::sqrt(w(i, j));
  return apply_gauge(sol, t);
}

namespace {

// Diagonal entries of gamma^* gamma per source block and gammabar^* gammabar per target block.
void block_norms(const DualitySolution& sol, RVec& ga, RVec& gb) {
  const Bimodule& x = sol.x;
  ga = RVec::Zero(x.source.size());
  gb = RVec::Zero(x.target.size());
  for (int i = 0; i < x.source.size(); ++i) ga(i) = sol.gamma.block(i, i).squaredNorm();
  for (int j = 0; j < x.target.size(); ++j) gb(j) = sol.gammabar.block(j, j).squaredNorm();
}

}  // namespace

double standard_residual(const DualitySolution& sol) {
  RVec ga, gb;
  block_norms(sol, ga, gb);
  PolarData pd = polar_data(sol);
  double res = 0;
  for (auto& [rows, cols] : support_components(sol.x.mult)) {
    const double d = Eigen::JacobiSVD<RMat>(component_matrix(pd, rows, cols)).singularValues()(0);
    for (int i : cols) res = std::max(res, std::abs(ga(i) - d));
    for (int j : rows) res = std::max(res, std::abs(gb(j) - d));
  }
  return res;
}

double solution_dimension(const DualitySolution& sol) {
  RVec ga, gb;
  block_norms(sol, ga, gb);
  double d = 0;
  for (auto& [rows, cols] : support_components(sol.x.mult)) {
    double a = 0, b = 0;
    for (int i : cols) a = std::max(a, ga(i));
    for (int j : rows) b = std::max(b, gb(j));
    d = std::max(d, std::sqrt(a * b));
  }
  return d;
}

double dimension_by_descent(const DualitySolution& sol) {
  const Bimodule& x = sol.x;
  if (x.is_zero()) return 0.0;
  const int sM = x.source.size(), sN = x.target.size();
  PolarData pd = polar_data(sol);
  const RMat &a = pd.a, &b = pd.b;
  LseProgram prog;
  prog.num_groups = 2;
  std::vector<std::vector<int>> var(static_cast<size_t>(sM), std::vector<int>(static_cast<size_t>(sN), -1));
  for (int i = 0; i < sM; ++i)
    for (int j = 0; j < sN; ++j)
      if (x.k(j, i)) var[static_cast<size_t>(i)][static_cast<size_t>(j)] = prog.num_vars++;
  for (int i = 0; i < sM; ++i) {
    LseConstraint c{{}, 0};
    for (int j = 0; j < sN; ++j)
      if (x.k(j, i)) c.terms.push_back({a(i, j), {{var[static_cast<size_t>(i)][static_cast<size_t>(j)], 1.0}}});
    if (!c.terms.empty()) prog.constraints.push_back(c);
  }
  for (int j = 0; j < sN; ++j) {
    LseConstraint c{{}, 1};
    for (int i = 0; i < sM; ++i)
      if (x.k(j, i)) c.terms.push_back({b(i, j), {{var[static_cast<size_t>(i)][static_cast<size_t>(j)], -1.0}}});
    if (!c.terms.empty()) prog.constraints.push_back(c);
  }
  LseResult r = minimize_lse_program(prog);
  return std::exp(r.objective / 2);
}

DimensionData dimension(const Bimodule& x) {
  DimensionData d;
  d.matrix_dim = x.mult.cast<double>();
  if (x.is_zero()) return d;
  for (auto& [rows, cols] : support_components(x.mult)) {
    RMat c(rows.size(), cols.size());
    for (size_t a = 0; a < rows.size(); ++a)
      for (size_t b = 0; b < cols.size(); ++b) c(a, b) = x.mult(rows[a], cols[b]);
    Eigen::JacobiSVD<RMat> svd(c);
    d.scalar_dim = std::max(d.scalar_dim, svd.singularValues()(0));
  }
  return d;
}

Intertwiner self_dual_unit(const DualitySolution& sol) {
  const Bimodule &x = sol.x, &xb = sol.xbar;
  // Xbar (x) X  ->  Xbar (x) ((X (x) Xbar) (x) X)  ->  Xbar (x) (X (x) (Xbar (x) X))  ->  (Xbar (x) X) (x) (Xbar (x) X)
  Intertwiner step = fuse_morphisms(identity(xb), fuse_morphisms(sol.gammabar, identity(x)));
  step = fuse_morphisms(identity(xb), associator(x, xb, x)) * step;
  step = associator_inv(xb, x, fused(xb, x)) * step;
  return step * sol.gamma;
}

}  // namespace bimcalc
