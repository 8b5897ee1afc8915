#include "bimcalc/algebra_bimodules.hpp"

#include <string>

namespace bimcalc {

void check_shapes(const AlgBimodule& xm) {
  check_shapes(xm.left);
  check_shapes(xm.right);
  require(xm.x.target == xm.left.base() && xm.x.source == xm.right.base(), ErrorKind::Structural,
          "module and algebras live over different base algebras");
  require(xm.l.dom == fused(xm.left.h, xm.x) && xm.l.cod == xm.x, ErrorKind::Structural,
          "left action must map B (x) X to X");
  require(xm.r.dom == fused(xm.x, xm.right.h) && xm.r.cod == xm.x, ErrorKind::Structural,
          "right action must map X (x) A to X");
}

ModuleReport verify_module(const AlgBimodule& xm) {
  check_shapes(xm);
  const Bimodule &b = xm.left.h, &a = xm.right.h, &x = xm.x;
  const Intertwiner ib = identity(b), ia = identity(a), ix = identity(x);
  const Intertwiner &l = xm.l, &r = xm.r, &mb = xm.left.mult, &ma = xm.right.mult;
  ModuleReport rep;
  rep.left_assoc = distance(l * fuse_morphisms(mb, ix), l * fuse_morphisms(ib, l) * associator(b, b, x));
  rep.left_unit = distance(l * fuse_morphisms(xm.left.unit, ix), ix);
  rep.right_assoc = distance(r * fuse_morphisms(ix, ma) * associator(x, a, a), r * fuse_morphisms(r, ia));
  rep.right_unit = distance(r * fuse_morphisms(ix, xm.right.unit), ix);
  rep.commute = distance(r * fuse_morphisms(l, ia), l * fuse_morphisms(ib, r) * associator(b, x, a));
  rep.left_special = distance(l * adjoint(l), ix);
  rep.right_special = distance(r * adjoint(r), ix);
  const Intertwiner lsl = adjoint(l) * l, rsr = adjoint(r) * r;
  rep.left_frobenius =
      worst({distance(fuse_morphisms(mb, ix) * associator_inv(b, b, x) * fuse_morphisms(ib, adjoint(l)), lsl),
             distance(fuse_morphisms(ib, l) * associator(b, b, x) * fuse_morphisms(adjoint(mb), ix), lsl)});
  rep.right_frobenius =
      worst({distance(fuse_morphisms(ix, ma) * associator(x, a, a) * fuse_morphisms(adjoint(r), ia), rsr),
             distance(fuse_morphisms(r, ia) * associator_inv(x, a, a) * fuse_morphisms(ix, adjoint(ma)), rsr)});
  return rep;
}

double module_map_residual(const AlgBimodule& x1, const AlgBimodule& x2, const Intertwiner& f) {
  require(f.dom == x1.x && f.cod == x2.x, ErrorKind::Structural, "map between the wrong modules");
  return worst({distance(f * x1.l, x2.l * fuse_morphisms(identity(x1.left.h), f)),
                distance(f * x1.r, x2.r * fuse_morphisms(f, identity(x1.right.h)))});
}

std::vector<Intertwiner> module_maps(const AlgBimodule& x1, const AlgBimodule& x2) {
  const Intertwiner ib = identity(x1.left.h), ia = identity(x1.right.h);
  return solve_intertwiners(x1.x, x2.x, [&](const Intertwiner& f) {
    CVec a = coords(f * x1.l - x2.l * fuse_morphisms(ib, f));
    CVec b = coords(f * x1.r - x2.r * fuse_morphisms(f, ia));
    CVec out(a.size() + b.size());
    out << a, b;
    return out;
  });
}

SpecializedModule specialize_module(const AlgBimodule& xm, double tol) {
  require(verify_algebra(xm.left).special < tol && verify_algebra(xm.right).special < tol, ErrorKind::Precondition,
          "specialize_module needs special algebras");
  ModuleReport rep = verify_module(xm);
  require(rep.axioms() < tol, ErrorKind::Precondition,
          "specialize_module needs a bimodule (axiom residual " + std::to_string(rep.axioms()) + ")");
  const Intertwiner& l = xm.l;
  const Intertwiner& r = xm.r;
  Intertwiner lr = l * fuse_morphisms(identity(xm.left.h), r * adjoint(r)) * adjoint(l);
  Intertwiner rl = r * fuse_morphisms(l * adjoint(l), identity(xm.right.h)) * adjoint(r);
  SpecializedModule out;
  out.symmetry = distance(lr, rl);
  Intertwiner h = map_blocks(lr, [](const Mat& m) { return positive_sqrt(m, true); });
  Intertwiner hinv = map_blocks(lr, [](const Mat& m) { return positive_inverse_sqrt(m); });
  out.iso = hinv;
  out.module = xm;
  out.module.l = hinv * l * fuse_morphisms(identity(xm.left.h), h);
  out.module.r = hinv * r * fuse_morphisms(h, identity(xm.right.h));
  return out;
}

AlgBimodule regular_module(const FrobeniusAlgebra& a) {
  const Bimodule& h = a.h;
  return {a, a, h, a.mult, a.mult};
}

AlgBimodule free_module(const FrobeniusAlgebra& b, const Bimodule& y, const FrobeniusAlgebra& a) {
  const Bimodule by = fused(b.h, y);
  const Bimodule x = fused(by, a.h);
  Intertwiner l = fuse_morphisms(fuse_morphisms(b.mult, identity(y)) * associator_inv(b.h, b.h, y), identity(a.h)) *
                  associator_inv(b.h, by, a.h);
  Intertwiner r = fuse_morphisms(identity(by), a.mult) * associator(by, a.h, a.h);
  return {b, a, x, l, r};
}

AlgBimodule trivial_module(const Bimodule& y) {
  return {trivial_algebra(y.target), trivial_algebra(y.source), y, left_unitor(y), right_unitor(y)};
}

namespace {

void require_special(const AlgBimodule& xm, double tol, const char* what) {
  ModuleReport rep = verify_module(xm);
  require(rep.axioms() < tol && rep.special() < tol, ErrorKind::Precondition,
          std::string(what) + " needs special bimodules (axioms " + std::to_string(rep.axioms()) + ", special " +
              std::to_string(rep.special()) + ")");
  require(verify_algebra(xm.left).special < tol && verify_algebra(xm.right).special < tol, ErrorKind::Precondition,
          std::string(what) + " needs special algebras");
}

}  // namespace

Intertwiner p_projection(const AlgBimodule& ym, const AlgBimodule& xm, double tol) {
  require(ym.right.h == xm.left.h && distance(ym.right.mult, xm.left.mult) < tol &&
              distance(ym.right.unit, xm.left.unit) < tol,
          ErrorKind::Structural, "modules are over different middle algebras");
  require_special(ym, tol, "p_projection");
  require_special(xm, tol, "p_projection");
  const Bimodule &y = ym.x, &x = xm.x, &b = xm.left.h;
  return fuse_morphisms(ym.r, identity(x)) * associator_inv(y, b, x) * fuse_morphisms(identity(y), adjoint(xm.l));
}

Intertwiner range_isometry(const Intertwiner& p) {
  const Bimodule& z = p.dom;
  IMat k = IMat::Zero(z.target.size(), z.source.size());
  std::vector<Mat> cols(p.blocks.size());
  for (int j = 0; j < z.target.size(); ++j)
    for (int i = 0; i < z.source.size(); ++i) {
      const Mat& b = p.block(j, i);
      if (b.size() == 0) continue;
      Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (b + b.adjoint()));
      std::vector<Eigen::Index> keep;
      for (Eigen::Index c = b.rows() - 1; c >= 0; --c)
        if (es.eigenvalues()(c) > 0.5) keep.push_back(c);
      Mat v(b.rows(), static_cast<Eigen::Index>(keep.size()));
      for (size_t c = 0; c < keep.size(); ++c) {
        CVec col = es.eigenvectors().col(keep[c]);
        Eigen::Index arg = 0;
        col.cwiseAbs().maxCoeff(&arg);
        col *= std::conj(col(arg)) / std::abs(col(arg));
        v.col(static_cast<Eigen::Index>(c)) = col;
      }
      k(j, i) = static_cast<int>(keep.size());
      cols[static_cast<size_t>(z.index(j, i))] = v;
    }
  Bimodule sub(z.source, z.target, k);
  Intertwiner s = zero_map(sub, z);
  for (size_t b = 0; b < cols.size(); ++b)
    if (cols[b].size()) s.blocks[b] = cols[b];
  return s;
}

RelativeProduct rel_tensor(const AlgBimodule& ym, const AlgBimodule& xm, double tol) {
  RelativeProduct out;
  out.p = p_projection(ym, xm, tol);
  out.s = range_isometry(out.p);
  const Bimodule &y = ym.x, &x = xm.x, &c = ym.left.h, &a = xm.right.h;
  const Bimodule& z = out.s.dom;
  const Intertwiner ss = adjoint(out.s);
  Intertwiner l = ss * fuse_morphisms(ym.l, identity(x)) * associator_inv(c, y, x) * fuse_morphisms(identity(c), out.s);
  Intertwiner r = ss * fuse_morphisms(identity(y), xm.r) * associator(y, x, a) * fuse_morphisms(out.s, identity(a));
  out.product = {ym.left, xm.right, z, l, r};
  return out;
}

Intertwiner rel_tensor_morphisms(const RelativeProduct& p1, const RelativeProduct& p2, const Intertwiner& g,
                                 const Intertwiner& f) {
  return adjoint(p2.s) * fuse_morphisms(g, f) * p1.s;
}

RelativeAssociator relative_associator(const AlgBimodule& zm, const AlgBimodule& ym, const AlgBimodule& xm,
                                      double tol) {
  RelativeAssociator out;
  out.zy = rel_tensor(zm, ym, tol);
  out.zy_x = rel_tensor(out.zy.product, xm, tol);
  out.yx = rel_tensor(ym, xm, tol);
  out.z_yx = rel_tensor(zm, out.yx.product, tol);
  const Bimodule &z = zm.x, &y = ym.x, &x = xm.x;
  out.unitary = adjoint(out.z_yx.s) * fuse_morphisms(identity(z), adjoint(out.yx.s)) * associator(z, y, x) *
                fuse_morphisms(out.zy.s, identity(x)) * out.zy_x.s;
  return out;
}

}  // namespace bimcalc
