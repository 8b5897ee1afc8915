#include "bimcalc/realization.hpp"

#include <cmath>
#include <string>

namespace bimcalc {

namespace {

Mat random_combination(const std::vector<Mat>& basis, Rng& rng) {
  Mat out = Mat::Zero(basis[0].rows(), basis[0].cols());
  for (const auto& b : basis) out += cplx(uniform(rng, -1, 1), uniform(rng, -1, 1)) * b;
  return out;
}

Mat combination(const std::vector<Mat>& basis, const CVec& c) {
  Mat out = Mat::Zero(basis[0].rows(), basis[0].cols());
  for (size_t s = 0; s < basis.size(); ++s) out += c(static_cast<Eigen::Index>(s)) * basis[s];
  return out;
}

CVec vec(const Mat& a) { return Eigen::Map<const CVec>(a.data(), a.size()); }

// Spectral projections of a Hermitian matrix, eigenvalues clustered with a relative gap.
std::vector<Mat> spectral_projections(const Mat& h, const Mat& frame, double rel_gap) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  const RVec& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<Mat> out;
  for (const auto& cl : cluster_eigenvalues(ev, rel_gap * scale)) {
    Mat v(h.rows(), static_cast<Eigen::Index>(cl.size()));
    for (size_t c = 0; c < cl.size(); ++c) v.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(cl[c]);
    Mat w = frame * v;
    out.push_back(w * w.adjoint());
  }
  return out;
}

Mat range_basis(const Mat& p) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (p + p.adjoint()));
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c = 0; c < p.rows(); ++c)
    if (es.eigenvalues()(c) > 0.5) keep.push_back(c);
  Mat q(p.rows(), static_cast<Eigen::Index>(keep.size()));
  for (size_t c = 0; c < keep.size(); ++c) q.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
  return q;
}

int rounded(double v) { return static_cast<int>(std::lround(v)); }

}  // namespace

Mat left_multiplication(const FrobeniusAlgebra& f, const Vector& xi) {
  const Bimodule& h = f.h;
  Mat out(h.dim(), h.dim());
  auto basis = standard_vectors(h);
  for (size_t c = 0; c < basis.size(); ++c)
    out.col(static_cast<Eigen::Index>(c)) = flatten(apply(f.mult, fuse_vectors(xi, basis[c])));
  return out;
}

CVec unit_vector_of(const FrobeniusAlgebra& f) {
  return flatten(apply(f.unit, algebra_vector(identity_element(f.base()))));
}

Mat inclusion_op(const Extension& ext, const Element& a) { return dense_left(ext.algebra.h, a); }

Element to_abstract(const Extension& ext, const Mat& b) {
  std::vector<Mat> mats;
  for (int q = 0; q < ext.n.size(); ++q) {
    const auto& u = ext.units[static_cast<size_t>(q)];
    const int n = ext.n.block(q);
    std::vector<Mat> ub(u.size());
    for (size_t a = 0; a < u.size(); ++a) ub[a] = u[a] * b;
    Mat phi(n, n);
    for (int a = 0; a < n; ++a)
      for (int c = 0; c < n; ++c)
        phi(a, c) = (ub[static_cast<size_t>(a)] * u[static_cast<size_t>(c)].adjoint()).trace() /
                    static_cast<double>(ext.mu[static_cast<size_t>(q)]);
    mats.push_back(phi);
  }
  return from_blocks(ext.n, mats);
}

Mat from_abstract(const Extension& ext, const Element& a) {
  require(a.parent == ext.n, ErrorKind::Structural, "element of the wrong algebra");
  const Eigen::Index d = ext.algebra.h.dim();
  Mat out = Mat::Zero(d, d);
  for (int q = 0; q < ext.n.size(); ++q) {
    const auto& u = ext.units[static_cast<size_t>(q)];
    for (size_t x = 0; x < u.size(); ++x)
      for (size_t y = 0; y < u.size(); ++y) {
        const cplx c = a.mats[static_cast<size_t>(q)](static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
        if (c != cplx(0)) out += c * u[x].adjoint() * u[y];
      }
  }
  return out;
}

double tau_n(const Extension& ext, const Mat& b) {
  double out = 0;
  for (const auto& z : ext.central_projections) out += ((z * b).trace() / z.trace()).real();
  return out;
}

std::vector<Intertwiner> center_of_extension(const FrobeniusAlgebra& f) { return bimodule_self_maps(f); }

Mat density_k(const Extension& ext) {
  const auto& ops = ext.ops;
  const Eigen::Index d = static_cast<Eigen::Index>(ops.size());
  const CVec one = unit_vector_of(ext.algebra);
  Mat g(d, d);
  CVec rhs(d);
  for (Eigen::Index t = 0; t < d; ++t) {
    rhs(t) = one.dot(ops[static_cast<size_t>(t)] * one);
    for (Eigen::Index s = 0; s < d; ++s) {
      // tau_N is only real on Hermitian input, so take the full complex trace here
      cplx v = 0;
      for (const auto& z : ext.central_projections)
        v += (z * ops[static_cast<size_t>(s)] * ops[static_cast<size_t>(t)]).trace() / z.trace().real();
      g(t, s) = v;
    }
  }
  double res = 0;
  CVec c = least_squares(g, rhs, &res);
  require(res < 1e-8 * std::max(1.0, rhs.norm()), ErrorKind::Numerical, "trace equations for k have no solution");
  Mat kk = combination(ops, c);
  return positive_sqrt(0.5 * (kk + kk.adjoint()), true, 1e-12);
}

Extension extension_algebra(const FrobeniusAlgebra& f, double tol, std::uint64_t seed) {
  AlgebraReport rep = verify_algebra(f);
  require(worst({rep.algebra_residual(), rep.frobenius}) < tol, ErrorKind::Precondition,
          "extension_algebra needs a Frobenius algebra (residual " +
              std::to_string(worst({rep.algebra_residual(), rep.frobenius})) + ")");
  Rng rng(seed);
  Extension ext;
  ext.algebra = f;
  const Bimodule& h = f.h;
  const TracialAlgebra& m = f.base();
  const int d = h.dim();
  auto basis = standard_vectors(h);
  for (const auto& e : basis) ext.ops.push_back(left_multiplication(f, e));

  // closure under products and unit
  const CVec one = unit_vector_of(f);
  ext.closure = (combination(ext.ops, one) - Mat::Identity(d, d)).norm();
  for (int s = 0; s < d; ++s)
    for (int t = 0; t < d; ++t) {
      CVec c = flatten(apply(f.mult, fuse_vectors(basis[static_cast<size_t>(s)], basis[static_cast<size_t>(t)])));
      ext.closure = worst({ext.closure, (ext.ops[static_cast<size_t>(s)] * ext.ops[static_cast<size_t>(t)] -
                                         combination(ext.ops, c)).norm()});
    }

  // adjoints through the gauge between the basis solution and (m^* iota, m^* iota)
  require(h.mult == h.mult.transpose(), ErrorKind::Precondition, "Frobenius algebra must be self-conjugate");
  {
    double gres = 0;
    Intertwiner gauge = gauge_between(solution_from_bases(h), frobenius_solution(f), &gres);
    Intertwiner inv_star = map_blocks(adjoint(gauge), [](const Mat& b) -> Mat { return b.size() ? Mat(b.inverse()) : b; });
    inv_star.dom = h;
    inv_star.cod = h;
    ext.adjoint_formula = gres;
    for (int s = 0; s < d; ++s) {
      Vector xb = conjugate_vector(basis[static_cast<size_t>(s)]);
      xb.parent = h;
      CVec c = flatten(apply(inv_star, xb));
      ext.adjoint_formula = worst({ext.adjoint_formula, (ext.ops[static_cast<size_t>(s)].adjoint() - combination(ext.ops, c)).norm()});
    }
  }

  // center by commutant inside N
  {
    Mat a(static_cast<Eigen::Index>(d) * d * d, d);
    for (int s = 0; s < d; ++s)
      for (int t = 0; t < d; ++t) {
        const Mat& ls = ext.ops[static_cast<size_t>(s)];
        const Mat& lt = ext.ops[static_cast<size_t>(t)];
        a.block(static_cast<Eigen::Index>(t) * d * d, s, static_cast<Eigen::Index>(d) * d, 1) = vec(ls * lt - lt * ls);
      }
    Mat ns = nullspace(a, 1e-9);
    for (Eigen::Index c = 0; c < ns.cols(); ++c) ext.center.push_back(combination(ext.ops, ns.col(c)));
  }
  {
    auto self_maps = center_of_extension(f);
    double match = std::abs(static_cast<double>(self_maps.size()) - static_cast<double>(ext.center.size()));
    if (!ext.center.empty()) {
      Mat span(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(ext.center.size()));
      for (size_t c = 0; c < ext.center.size(); ++c) span.col(static_cast<Eigen::Index>(c)) = vec(ext.center[c]);
      for (const auto& t : self_maps) {
        CVec target = vec(dense(t));
        double res = 0;
        least_squares(span, target, &res);
        match = worst({match, res / std::max(1.0, target.norm())});
      }
    }
    ext.center_match = match;
  }

  // minimal central projections
  {
    Mat z = Mat::Zero(d, d);
    for (const auto& c : ext.center) z += cplx(uniform(rng, -1, 1), uniform(rng, -1, 1)) * c;
    ext.central_projections = spectral_projections(z + z.adjoint(), Mat::Identity(d, d), 1e-6);
  }

  // inclusion-adapted matrix units in each block
  std::vector<int> sizes;
  ext.inclusion = IMat::Zero(static_cast<Eigen::Index>(ext.central_projections.size()), m.size());
  for (size_t q = 0; q < ext.central_projections.size(); ++q) {
    const Mat& zq = ext.central_projections[q];
    Mat stacked(static_cast<Eigen::Index>(d) * d, d);
    for (int s = 0; s < d; ++s) stacked.col(s) = vec(zq * ext.ops[static_cast<size_t>(s)]);
    const int dim_q = numerical_rank(stacked, 1e-9);
    const int nq = rounded(std::sqrt(static_cast<double>(dim_q)));
    require(nq * nq == dim_q, ErrorKind::Numerical, "block of N is not a full matrix algebra");
    const int mu = rounded(zq.trace().real() / nq);
    require(mu * nq == rounded(zq.trace().real()), ErrorKind::Numerical, "block of N has inconsistent multiplicity");
    ext.mu.push_back(mu);

    std::vector<Mat> units;
    std::vector<std::array<int, 3>> labels;
    Mat ref;
    for (int i = 0; i < m.size(); ++i) {
      Mat p = zq * dense_left(h, matrix_unit(m, i, 0, 0));
      Mat frame = range_basis(p);
      if (frame.cols() == 0) continue;
      Mat x = random_combination(ext.ops, rng);
      std::vector<Mat> minimal = spectral_projections(frame.adjoint() * (x + x.adjoint()) * frame, frame, 1e-6);
      for (const auto& fl : minimal)
        require(rounded(fl.trace().real()) == mu, ErrorKind::Numerical, "minimal projections of N not resolved");
      ext.inclusion(static_cast<Eigen::Index>(q), i) = static_cast<int>(minimal.size());
      for (size_t lam = 0; lam < minimal.size(); ++lam) {
        Mat v;
        if (ref.size() == 0) {
          ref = minimal[lam];
          v = ref;
        } else {
          double c = 0;
          for (int attempt = 0; attempt < 20 && c < 1e-6; ++attempt) {
            v = ref * random_combination(ext.ops, rng) * minimal[lam];
            c = (v.adjoint() * v).trace().real() / mu;
          }
          require(c >= 1e-6, ErrorKind::Numerical, "no partial isometry between minimal projections");
          v /= std::sqrt(c);
        }
        for (int r = 0; r < m.block(i); ++r) {
          units.push_back(v * dense_left(h, matrix_unit(m, i, 0, r)));
          labels.push_back({i, static_cast<int>(lam), r});
        }
      }
    }
    require(static_cast<int>(units.size()) == nq, ErrorKind::Numerical, "inclusion does not fill the block of N");
    sizes.push_back(nq);
    ext.units.push_back(units);
    ext.labels.push_back(labels);
  }
  ext.n = TracialAlgebra(sizes);

  // phi is a *-isomorphism
  ext.star_iso = 0;
  for (int trial = 0; trial < 4; ++trial) {
    Mat x = random_combination(ext.ops, rng), y = random_combination(ext.ops, rng);
    Element px = to_abstract(ext, x), py = to_abstract(ext, y);
    ext.star_iso = worst({ext.star_iso, max_abs(to_abstract(ext, x * y) - px * py),
                          max_abs(to_abstract(ext, Mat(x.adjoint())) - adjoint(px)),
                          (from_abstract(ext, px) - x).norm()});
  }

  // inclusion: L_iota(a) is left multiplication by a, and a -> L_iota(a) is multiplicative
  ext.inclusion_hom = 0;
  Mat incl(static_cast<Eigen::Index>(d) * d, m.dim());
  int col = 0;
  for (int i = 0; i < m.size(); ++i)
    for (int r = 0; r < m.block(i); ++r)
      for (int s = 0; s < m.block(i); ++s) {
        Element e = matrix_unit(m, i, r, s);
        Mat via_unit = left_multiplication(f, apply(f.unit, algebra_vector(e)));
        ext.inclusion_hom = worst({ext.inclusion_hom, (via_unit - dense_left(h, e)).norm()});
        for (int t = 0; t < m.block(i); ++t)
          ext.inclusion_hom = worst({ext.inclusion_hom, (via_unit * dense_left(h, matrix_unit(m, i, s, t)) -
                                                         dense_left(h, matrix_unit(m, i, r, t))).norm()});
        incl.col(col++) = vec(via_unit);
      }
  ext.inclusion_injective = numerical_rank(incl, 1e-9) == m.dim();
  ext.left_action_faithful = true;
  for (int i = 0; i < m.size(); ++i)
    if (h.mult.row(i).sum() == 0) ext.left_action_faithful = false;

  ext.k = density_k(ext);
  const CVec iv = unit_vector_of(f);
  for (const auto& b : ext.ops) {
    cplx lhs = 0;
    Mat kb = ext.k * ext.k * b;
    for (const auto& z : ext.central_projections) lhs += (z * kb).trace() / z.trace().real();
    ext.k_identity = worst({ext.k_identity, std::abs(lhs - iv.dot(b * iv))});
  }
  for (int i = 0; i < m.size(); ++i)
    for (int r = 0; r < m.block(i); ++r)
      for (int s = 0; s < m.block(i); ++s) {
        Mat e = dense_left(h, matrix_unit(m, i, r, s));
        ext.k_commutes = worst({ext.k_commutes, (ext.k * e - e * ext.k).norm()});
      }
  return ext;
}

Vector to_x(const Extension& ext, const Bimodule& x, const Mat& b) {
  Element phi = to_abstract(ext, b);
  Vector out = zero_vector(x);
  const TracialAlgebra& m = ext.algebra.base();
  for (int q = 0; q < ext.n.size(); ++q) {
    const int nq = ext.n.block(q);
    const double scale = 1.0 / std::sqrt(static_cast<double>(nq));
    const auto& labels = ext.labels[static_cast<size_t>(q)];
    for (size_t a = 0; a < labels.size(); ++a) {
      const auto [i, lam, r] = labels[a];
      const int k = x.k(q, i), mi = m.block(i);
      CVec& blk = out.block(q, i);
      for (int p = 0; p < nq; ++p)
        blk((p * k + lam) * mi + r) = phi.mats[static_cast<size_t>(q)](p, static_cast<Eigen::Index>(a)) * scale;
    }
  }
  return out;
}

Vector to_xbar(const Extension& ext, const Bimodule& x, const Mat& b) {
  return conjugate_vector(to_x(ext, x, Mat(b.adjoint())));
}

StandardBimodule standard_bimodule_X(const Extension& ext) {
  const FrobeniusAlgebra& f = ext.algebra;
  const TracialAlgebra& m = f.base();
  StandardBimodule out;
  out.x = Bimodule(m, ext.n, ext.inclusion);
  out.xbar = conjugate(out.x);
  const Bimodule& x = out.x;
  const Bimodule& xb = out.xbar;
  const Bimodule um = unit_bimodule(m), un = unit_bimodule(ext.n);

  // gamma(a) = k (x) L_iota(a)
  const Vector kbar = to_xbar(ext, x, ext.k);
  const Bimodule xbx = fused(xb, x);
  auto units_m = standard_vectors(um);
  Mat g(xbx.dim(), um.dim());
  for (size_t c = 0; c < units_m.size(); ++c) {
    Mat la = inclusion_op(ext, vector_algebra(units_m[c]));
    g.col(static_cast<Eigen::Index>(c)) = flatten(fuse_vectors(kbar, to_x(ext, x, la)));
  }
  Intertwiner gamma = intertwiner_from_dense(um, xbx, g);
  out.gamma_residual = (dense(gamma) - g).norm();

  // gammabar^*(b1 (x) b2) = b1 k^-1 b2 on the spanning set of products of basis operators
  const Bimodule xxb = fused(x, xb);
  const size_t d = ext.ops.size();
  std::vector<Vector> xs, xbs;
  std::vector<Element> abs;
  for (const auto& b : ext.ops) {
    xs.push_back(to_x(ext, x, b));
    xbs.push_back(to_xbar(ext, x, b));
    abs.push_back(to_abstract(ext, b));
  }
  Element kinv = to_abstract(ext, Mat(ext.k.inverse()));
  Mat span(xxb.dim(), static_cast<Eigen::Index>(d * d)), target(un.dim(), static_cast<Eigen::Index>(d * d));
  for (size_t s = 0; s < d; ++s)
    for (size_t t = 0; t < d; ++t) {
      const Eigen::Index c = static_cast<Eigen::Index>(s * d + t);
      span.col(c) = flatten(fuse_vectors(xs[s], xbs[t]));
      target.col(c) = flatten(algebra_vector(abs[s] * kinv * abs[t]));
    }
  Mat gs = least_squares(Mat(span.adjoint()), Mat(target.adjoint())).adjoint();
  Intertwiner gbs = intertwiner_from_dense(xxb, un, gs);
  out.gammabar_residual = worst({(gs * span - target).norm() / std::max(1.0, target.norm()), (dense(gbs) - gs).norm()});
  out.solution = {x, xb, gamma, adjoint(gbs)};
  return out;
}

RealizationIso iso_u(const Extension& ext, const StandardBimodule& sx) {
  const FrobeniusAlgebra& f = ext.algebra;
  const Bimodule& h = f.h;
  const Bimodule xbx = fused(sx.xbar, sx.x);
  const Vector kx = to_x(ext, sx.x, ext.k);
  Mat u(xbx.dim(), h.dim());
  for (size_t s = 0; s < ext.ops.size(); ++s)
    u.col(static_cast<Eigen::Index>(s)) = flatten(fuse_vectors(to_xbar(ext, sx.x, ext.ops[s]), kx));
  RealizationIso out;
  out.u = intertwiner_from_dense(h, xbx, u);
  out.bimodular = (dense(out.u) - u).norm();
  out.unitary = worst({distance(adjoint(out.u) * out.u, identity(h)), distance(out.u * adjoint(out.u), identity(xbx))});
  require(out.unitary < 1e-6, ErrorKind::Numerical,
          "realization map is not unitary (residual " + std::to_string(out.unitary) + ", bimodular " +
              std::to_string(out.bimodular) + ")");
  out.dual_pair = from_dual_pair(sx.solution, 1e-6);
  out.unit = distance(out.u * f.unit, sx.solution.gamma);
  out.mult = distance(out.u * f.mult, out.dual_pair.mult * fuse_morphisms(out.u, out.u));
  out.special_gap = distance(adjoint(sx.solution.gammabar) * sx.solution.gammabar, identity(unit_bimodule(ext.n)));
  return out;
}

MoritaReport morita_check(const Extension& ext, const StandardBimodule& sx, const RealizationIso& iso, double tol) {
  const FrobeniusAlgebra& f = ext.algebra;
  require(verify_algebra(f).special < tol, ErrorKind::Precondition, "morita_check needs a special algebra");
  const Bimodule &x = sx.x, &xb = sx.xbar, &h = f.h;
  const Intertwiner gbs = adjoint(sx.solution.gammabar);
  const FrobeniusAlgebra tn = trivial_algebra(ext.n);
  MoritaReport rep;
  // X (x) H -> X (x) (Xbar (x) X) -> (X (x) Xbar) (x) X -> L^2(N) (x) X -> X
  Intertwiner rx = left_unitor(x) * fuse_morphisms(gbs, identity(x)) * associator_inv(x, xb, x) *
                   fuse_morphisms(identity(x), iso.u);
  rep.x_module = {tn, f, x, left_unitor(x), rx};
  // H (x) Xbar -> (Xbar (x) X) (x) Xbar -> Xbar (x) (X (x) Xbar) -> Xbar (x) L^2(N) -> Xbar
  Intertwiner lxb = right_unitor(xb) * fuse_morphisms(identity(xb), gbs) * associator(xb, x, xb) *
                    fuse_morphisms(iso.u, identity(xb));
  rep.xbar_module = {f, tn, xb, lxb, right_unitor(xb)};
  ModuleReport mx = verify_module(rep.x_module), mxb = verify_module(rep.xbar_module);
  rep.module_axioms = worst({mx.axioms(), mx.special(), mxb.axioms(), mxb.special()});

  // Xbar (x)_N X = Xbar (x) X, compared with the regular H-H bimodule through u
  RelativeProduct over_n = rel_tensor(rep.xbar_module, rep.x_module, tol);
  Intertwiner w = adjoint(over_n.s) * iso.u;
  rep.xbar_x = worst({module_map_residual(regular_module(f), over_n.product, w),
                      distance(adjoint(w) * w, identity(h)), distance(w * adjoint(w), identity(over_n.product.x))});

  // X (x)_H Xbar: p^H = gammabar gammabar^*, and gammabar^* s is a unitary onto L^2(N)
  RelativeProduct over_h = rel_tensor(rep.x_module, rep.xbar_module, tol);
  Intertwiner v = gbs * over_h.s;
  const Bimodule un = unit_bimodule(ext.n);
  rep.x_xbar = worst({distance(over_h.p, sx.solution.gammabar * gbs), distance(adjoint(v) * v, identity(over_h.product.x)),
                      distance(v * adjoint(v), identity(un))});
  rep.rank_p = over_h.product.x.dim();
  rep.dim_l2n = un.dim();
  rep.hom_h = static_cast<int>(module_maps(regular_module(f), regular_module(f)).size());
  rep.hom_l2n = static_cast<int>(solve_intertwiners(un, un, [](const Intertwiner&) { return CVec(); }).size());
  return rep;
}

}  // namespace bimcalc
