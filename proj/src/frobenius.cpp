#include "bimcalc/frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bimcalc {

void check_shapes(const FrobeniusAlgebra& f) {
  require(f.h.source == f.h.target, ErrorKind::Structural, "algebra object must be an M-M bimodule");
  require(f.mult.dom == fused(f.h, f.h) && f.mult.cod == f.h, ErrorKind::Structural,
          "multiplication must map H (x) H to H");
  require(f.unit.dom == unit_bimodule(f.h.source) && f.unit.cod == f.h, ErrorKind::Structural,
          "unit must map L^2(M) to H");
}

DualitySolution frobenius_solution(const FrobeniusAlgebra& f) {
  Intertwiner g = adjoint(f.mult) * f.unit;
  return {f.h, f.h, g, g};
}

AlgebraReport verify_algebra(const FrobeniusAlgebra& f, bool with_standard) {
  check_shapes(f);
  const Bimodule& h = f.h;
  const Intertwiner one = identity(h);
  const Intertwiner& m = f.mult;
  const Intertwiner ms = adjoint(m);
  AlgebraReport r;
  r.unit_left = distance(m * fuse_morphisms(f.unit, one), one);
  r.unit_right = distance(m * fuse_morphisms(one, f.unit), one);
  r.assoc = distance(m * fuse_morphisms(m, one), m * fuse_morphisms(one, m) * associator(h, h, h));
  Intertwiner msm = ms * m;
  Intertwiner f1 = fuse_morphisms(one, m) * associator(h, h, h) * fuse_morphisms(ms, one);
  Intertwiner f2 = fuse_morphisms(m, one) * associator_inv(h, h, h) * fuse_morphisms(one, ms);
  r.frobenius = worst({distance(f1, msm), distance(f2, msm)});
  r.special = distance(m * ms, one);
  if (with_standard) {
    DualitySolution sol = frobenius_solution(f);
    bool symmetric = h.mult == h.mult.transpose();
    if (symmetric && check_conjugate_equations(sol).max() < 1e-6) {
      r.standard = standard_residual(sol);
      DualitySolution st = standardize(sol, 1e-6);
      r.dimension = solution_dimension(st);
      r.norm_gap = std::abs(opnorm(sol.gamma) * opnorm(sol.gamma) - *r.dimension);
    } else {
      r.standard = std::numeric_limits<double>::infinity();
    }
  }
  return r;
}

FrobeniusAlgebra transport(const FrobeniusAlgebra& f, const Intertwiner& t) {
  Intertwiner tinv = map_blocks(t, [](const Mat& b) -> Mat { return b.size() ? Mat(b.inverse()) : b; });
  return {f.h, t * f.mult * fuse_morphisms(tinv, tinv), t * f.unit};
}

double homomorphism_residual(const FrobeniusAlgebra& f, const FrobeniusAlgebra& g, const Intertwiner& t) {
  return worst({distance(t * f.mult, g.mult * fuse_morphisms(t, t)), distance(t * f.unit, g.unit)});
}

Specialized specialize(const FrobeniusAlgebra& f, double tol) {
  AlgebraReport rep = verify_algebra(f);
  require(worst({rep.algebra_residual(), rep.frobenius}) < tol, ErrorKind::Precondition,
          "specialize needs a Frobenius algebra (unit/assoc/frobenius residual " +
              std::to_string(worst({rep.algebra_residual(), rep.frobenius})) + ")");
  Intertwiner mms = f.mult * adjoint(f.mult);
  Specialized s;
  s.min_eig = std::numeric_limits<double>::infinity();
  for (const auto& b : mms.blocks)
    if (b.size()) s.min_eig = std::min(s.min_eig, Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (b + b.adjoint())).eigenvalues()(0));
  const double in = opnorm(f.unit);
  s.bound = 1.0 / (in * in);
  s.iso = map_blocks(mms, [](const Mat& b) { return positive_sqrt(b, true); });
  s.algebra = transport(f, s.iso);
  s.hom_residual = homomorphism_residual(f, s.algebra, s.iso);
  return s;
}

Intertwiner right_multiplication(const FrobeniusAlgebra& f, const Intertwiner& c) {
  return f.mult * fuse_morphisms(identity(f.h), c);
}

std::vector<Intertwiner> right_module_maps(const FrobeniusAlgebra& f) {
  const Intertwiner one = identity(f.h);
  return solve_intertwiners(f.h, f.h, [&](const Intertwiner& t) {
    return coords(t * f.mult - f.mult * fuse_morphisms(t, one));
  });
}

std::vector<Intertwiner> bimodule_self_maps(const FrobeniusAlgebra& f) {
  const Intertwiner one = identity(f.h);
  return solve_intertwiners(f.h, f.h, [&](const Intertwiner& t) {
    CVec a = coords(t * f.mult - f.mult * fuse_morphisms(t, one));
    CVec b = coords(t * f.mult - f.mult * fuse_morphisms(one, t));
    CVec out(a.size() + b.size());
    out << a, b;
    return out;
  });
}

std::vector<Intertwiner> minimal_central_projections(const std::vector<Intertwiner>& basis, Rng& rng) {
  require(!basis.empty(), ErrorKind::Precondition, "empty algebra");
  const Bimodule& h = basis[0].dom;
  const int n = static_cast<int>(basis.size());
  // center: combinations commuting with every basis element
  Mat a;
  for (int c = 0; c < n; ++c) {
    CVec col;
    for (int b = 0; b < n; ++b) {
      CVec part = coords(basis[c] * basis[b] - basis[b] * basis[c]);
      CVec next(col.size() + part.size());
      next << col, part;
      col = next;
    }
    if (c == 0) a = Mat::Zero(col.size(), n);
    a.col(c) = col;
  }
  Mat ns = nullspace(a, 1e-9);
  Intertwiner z = zero_map(h, h);
  for (Eigen::Index c = 0; c < ns.cols(); ++c) {
    Intertwiner e = zero_map(h, h);
    for (int b = 0; b < n; ++b) e = e + ns(b, c) * basis[b];
    z = z + cplx(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)) * e;
  }
  Intertwiner herm = 0.5 * (z + adjoint(z));
  // eigenvalues of a generic central self-adjoint element label the minimal projections
  struct Ev {
    double value;
    int block;
    CVec vec;
  };
  std::vector<Ev> evs;
  for (int j = 0; j < h.target.size(); ++j)
    for (int i = 0; i < h.source.size(); ++i) {
      const Mat& b = herm.block(j, i);
      if (b.size() == 0) continue;
      Eigen::SelfAdjointEigenSolver<Mat> es(b);
      for (Eigen::Index c = 0; c < b.rows(); ++c) evs.push_back({es.eigenvalues()(c), h.index(j, i), es.eigenvectors().col(c)});
    }
  std::sort(evs.begin(), evs.end(), [](const Ev& x, const Ev& y) { return x.value < y.value; });
  RVec vals(static_cast<Eigen::Index>(evs.size()));
  for (size_t c = 0; c < evs.size(); ++c) vals(static_cast<Eigen::Index>(c)) = evs[c].value;
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  std::vector<Intertwiner> out;
  for (const auto& cl : cluster_eigenvalues(vals, 1e-6 * scale)) {
    Intertwiner p = zero_map(h, h);
    for (int idx : cl) {
      const Ev& e = evs[static_cast<size_t>(idx)];
      p.blocks[static_cast<size_t>(e.block)] += e.vec * e.vec.adjoint();
    }
    out.push_back(p);
  }
  return out;
}

namespace {

std::vector<int> component_of_blocks(const Bimodule& h) {
  std::vector<int> comp(static_cast<size_t>(h.source.size()), -1);
  int c = 0;
  for (auto& [rows, cols] : support_components(h.mult)) {
    for (int i : cols) comp[static_cast<size_t>(i)] = c;
    ++c;
  }
  return comp;
}

Intertwiner hermitian_function(const Intertwiner& f, double (*fn)(double)) {
  return map_blocks(f, [fn](const Mat& b) -> Mat {
    if (b.size() == 0) return b;
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (b + b.adjoint()));
    RVec ev = es.eigenvalues().unaryExpr(fn);
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  });
}

// Real basis of the self-adjoint part of a *-closed span.
std::vector<Intertwiner> hermitian_basis(const std::vector<Intertwiner>& span) {
  std::vector<Intertwiner> cand;
  for (const auto& r : span) {
    cand.push_back(r + adjoint(r));
    cand.push_back(cplx(0, 1) * (r - adjoint(r)));
  }
  const Eigen::Index len = coords(cand[0]).size();
  RMat a(2 * len, static_cast<Eigen::Index>(cand.size()));
  for (size_t c = 0; c < cand.size(); ++c) {
    CVec v = coords(cand[c]);
    a.col(static_cast<Eigen::Index>(c)) << v.real(), v.imag();
  }
  Eigen::JacobiSVD<RMat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVec& sv = svd.singularValues();
  std::vector<Intertwiner> out;
  for (Eigen::Index k = 0; k < sv.size() && sv(k) > 1e-9 * sv(0); ++k) {
    Intertwiner h = zero_map(cand[0].dom, cand[0].cod);
    for (size_t c = 0; c < cand.size(); ++c) h = h + cplx(svd.matrixV()(static_cast<Eigen::Index>(c), k) / sv(k)) * cand[c];
    out.push_back(h);
  }
  return out;
}

// Minimizes sum_c max_{i in c} log <u_i, (P (x) P^-1) u_i> over positive P in the span of `herm`.
// Along geodesics P^{1/2} e^{sX} P^{1/2} each term is a log-sum-exp in s, so a barrier Newton
// method re-centred at every step converges to the global minimum.
Intertwiner fit_module_gauge(const Intertwiner& u, const std::vector<Intertwiner>& herm, const std::vector<int>& comp,
                             int groups) {
  const Bimodule& h = herm[0].dom;
  const int nv = static_cast<int>(herm.size()), dim = nv + groups;
  std::vector<int> active;
  for (int i = 0; i < static_cast<int>(comp.size()); ++i)
    if (comp[static_cast<size_t>(i)] >= 0 && u.block(i, i).size() && u.block(i, i).norm() > 0) active.push_back(i);
  const Intertwiner one = identity(h);
  std::vector<Intertwiner> gen;
  for (const auto& x : herm) gen.push_back(fuse_morphisms(x, one) - fuse_morphisms(one, x));

  Intertwiner p = one;
  Intertwiner w = u;
  auto log_values = [&](const Intertwiner& ww) {
    RVec out(static_cast<Eigen::Index>(active.size()));
    for (size_t a = 0; a < active.size(); ++a) out(static_cast<Eigen::Index>(a)) = std::log(ww.block(active[a], active[a]).squaredNorm());
    return out;
  };
  auto moved = [&](const Intertwiner& x) {
    Intertwiner half = hermitian_function(0.5 * x, [](double v) { return std::exp(v); });
    Intertwiner ihalf = hermitian_function(-0.5 * x, [](double v) { return std::exp(v); });
    return fuse_morphisms(half, ihalf) * w;
  };
  RVec s = RVec::Constant(groups, -std::numeric_limits<double>::infinity());
  RVec lv = log_values(w);
  for (size_t a = 0; a < active.size(); ++a) {
    double& sc = s(comp[static_cast<size_t>(active[a])]);
    sc = std::max(sc, lv(static_cast<Eigen::Index>(a)) + 1.0);
  }
  for (int c = 0; c < groups; ++c)
    if (!std::isfinite(s(c))) s(c) = 0;

  auto barrier = [&](const RVec& vals, const RVec& ss, double t, bool& feasible) {
    double f = t * ss.sum();
    feasible = true;
    for (size_t a = 0; a < active.size(); ++a) {
      double gap = ss(comp[static_cast<size_t>(active[a])]) - vals(static_cast<Eigen::Index>(a));
      if (gap <= 0) {
        feasible = false;
        return 0.0;
      }
      f -= std::log(gap);
    }
    return f;
  };

  const double m = static_cast<double>(active.size());
  for (double t = 1.0;; t *= 10.0) {
    for (int it = 0; it < 200; ++it) {
      RVec grad = RVec::Zero(dim);
      RMat hess = RMat::Zero(dim, dim);
      grad.tail(groups).setConstant(t);
      std::vector<Intertwiner> kw;
      for (const auto& g : gen) kw.push_back(g * w);
      for (int i : active) {
        const CVec wi = w.block(i, i).col(0);
        const double v = wi.squaredNorm();
        RVec g(nv);
        RMat hv(nv, nv);
        std::vector<CVec> ys;
        for (int a = 0; a < nv; ++a) ys.push_back(kw[static_cast<size_t>(a)].block(i, i).col(0));
        for (int a = 0; a < nv; ++a) {
          g(a) = wi.dot(ys[static_cast<size_t>(a)]).real() / v;
          for (int b = 0; b <= a; ++b) hv(a, b) = hv(b, a) = ys[static_cast<size_t>(a)].dot(ys[static_cast<size_t>(b)]).real() / v;
        }
        hv -= g * g.transpose();
        const int c = comp[static_cast<size_t>(i)];
        const double gap = s(c) - std::log(v);
        RVec dh = RVec::Zero(dim);
        dh.head(nv) = -g;
        dh(nv + c) = 1.0;
        grad -= dh / gap;
        hess += dh * dh.transpose() / (gap * gap);
        hess.topLeftCorner(nv, nv) += hv / gap;
      }
      hess.diagonal().array() += 1e-12 * std::max(1.0, hess.diagonal().maxCoeff());
      RVec step = -hess.ldlt().solve(grad);
      const double dec = -grad.dot(step);
      if (!std::isfinite(dec) || dec / 2 < 1e-14) break;
      bool feas = false;
      const double f0 = barrier(log_values(w), s, t, feas);
      double len = 1.0;
      bool accepted = false;
      Intertwiner x = zero_map(h, h);
      for (int ls = 0; ls < 60 && !accepted; ++ls, len *= 0.5) {
        x = zero_map(h, h);
        for (int a = 0; a < nv; ++a) x = x + cplx(len * step(a)) * herm[static_cast<size_t>(a)];
        double f1 = barrier(log_values(moved(x)), s + len * step.tail(groups), t, feas);
        accepted = feas && f1 <= f0 - 0.25 * len * dec;
        if (accepted) break;
      }
      if (!accepted) break;
      Intertwiner sp = hermitian_function(p, [](double v) { return std::sqrt(std::max(v, 0.0)); });
      p = sp * hermitian_function(x, [](double v) { return std::exp(v); }) * sp;
      p = cplx(1.0 / opnorm(p)) * p;
      Intertwiner rp = hermitian_function(p, [](double v) { return std::sqrt(v); });
      Intertwiner irp = hermitian_function(p, [](double v) { return 1.0 / std::sqrt(v); });
      w = fuse_morphisms(rp, irp) * u;
      s += len * step.tail(groups);
    }
    if (m / t < 1e-11) break;
  }
  return p;
}

}  // namespace

Standardized standardize_algebra(const FrobeniusAlgebra& f, double tol) {
  AlgebraReport rep = verify_algebra(f);
  require(rep.special < tol && rep.algebra_residual() < tol && rep.frobenius < tol, ErrorKind::Precondition,
          "standardize_algebra needs a special Frobenius algebra (special residual " + std::to_string(rep.special) + ")");
  const Bimodule& h = f.h;
  std::vector<int> comp = component_of_blocks(h);
  const int groups = *std::max_element(comp.begin(), comp.end()) + 1;
  Intertwiner p = fit_module_gauge(adjoint(f.mult) * f.unit, hermitian_basis(right_module_maps(f)), comp, groups);

  Standardized out;
  const Intertwiner t = hermitian_function(p, [](double v) { return std::sqrt(v); });
  const Intertwiner tinv = hermitian_function(p, [](double v) { return 1.0 / std::sqrt(v); });
  out.gauge = t;
  FrobeniusAlgebra moved{h, f.mult * fuse_morphisms(identity(h), tinv), t * f.unit};
  Specialized sp = specialize(moved, 1e-6);
  out.algebra = sp.algebra;
  out.iso = sp.iso * t;
  DualitySolution ds = frobenius_solution(out.algebra);
  out.standard_residual = standard_residual(ds);
  out.dimension = solution_dimension(ds);
  return out;
}

FrobeniusAlgebra from_dual_pair(const DualitySolution& sol, double tol) {
  require(check_conjugate_equations(sol).max() < tol, ErrorKind::Precondition,
          "from_dual_pair needs a solution of the conjugate equations");
  const Bimodule &x = sol.x, &xb = sol.xbar;
  Bimodule h = fused(xb, x);
  Intertwiner m = associator(xb, x, h);
  m = fuse_morphisms(identity(xb), associator_inv(x, xb, x)) * m;
  m = fuse_morphisms(identity(xb), fuse_morphisms(adjoint(sol.gammabar), identity(x))) * m;
  return {h, m, sol.gamma};
}

DualitySolution normalize_right_leg(const DualitySolution& sol) {
  Intertwiner t = identity(sol.xbar);
  RVec gb(sol.x.target.size());
  for (int j = 0; j < sol.x.target.size(); ++j) gb(j) = sol.gammabar.block(j, j).squaredNorm();
  for (auto& [rows, cols] : support_components(sol.x.mult)) {
    double d = 0;
    for (int j : rows) d = std::max(d, gb(j));
    for (int i : cols)
      for (int j : rows)
        if (sol.x.k(j, i)) t.block(i, j) *= std::sqrt(d);
  }
  return apply_gauge(sol, t);
}

FrobeniusAlgebra trivial_algebra(const TracialAlgebra& m) {
  Bimodule u = unit_bimodule(m);
  return {u, identity(u), identity(u)};
}

namespace {

TracialAlgebra complex_numbers() { return TracialAlgebra({1}); }

}  // namespace

FrobeniusAlgebra matrix_algebra(int n, double scale) {
  TracialAlgebra c = complex_numbers();
  Bimodule h(c, c, (IMat(1, 1) << n * n).finished());
  Bimodule hh = fused(h, h);
  Intertwiner m = zero_map(hh, h);
  const int k = n * n;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) m.block(0, 0)(a * n + d, (a * n + b) * k + (b * n + d)) = scale;
  Intertwiner u = zero_map(unit_bimodule(c), h);
  for (int a = 0; a < n; ++a) u.block(0, 0)(a * n + a, 0) = 1.0 / scale;
  return {h, m, u};
}

FrobeniusAlgebra group_algebra(int n, double scale) {
  TracialAlgebra c = complex_numbers();
  Bimodule h(c, c, (IMat(1, 1) << n).finished());
  Bimodule hh = fused(h, h);
  Intertwiner m = zero_map(hh, h);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) m.block(0, 0)((a + b) % n, a * n + b) = scale;
  Intertwiner u = zero_map(unit_bimodule(c), h);
  u.block(0, 0)(0, 0) = 1.0 / scale;
  return {h, m, u};
}

}  // namespace bimcalc
