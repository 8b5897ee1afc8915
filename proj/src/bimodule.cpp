#include "bimcalc/bimodule.hpp"

#include <cmath>
#include <sstream>

namespace bimcalc {

namespace {

using RowMap = Eigen::Map<RowMat>;
using ConstRowMap = Eigen::Map<const RowMat>;

ConstRowMap view(const CVec& v, int rows, int cols) { return ConstRowMap(v.data(), rows, cols); }
RowMap view(CVec& v, int rows, int cols) { return RowMap(v.data(), rows, cols); }

void check_vector(const Vector& v) {
  require(static_cast<int>(v.blocks.size()) == v.parent.num_blocks(), ErrorKind::Structural,
          "vector block count mismatch");
}

void check_same_parent(const Vector& a, const Vector& b) {
  require(a.parent == b.parent, ErrorKind::Structural, "vectors of different bimodules");
}

}  // namespace

Bimodule::Bimodule(TracialAlgebra src, TracialAlgebra tgt, IMat k)
    : source(std::move(src)), target(std::move(tgt)), mult(std::move(k)) {
  require(mult.rows() == target.size() && mult.cols() == source.size(), ErrorKind::Structural,
          "multiplicity matrix must be target blocks x source blocks");
  require(mult.size() == 0 || mult.minCoeff() >= 0, ErrorKind::Structural,
          "multiplicities must be nonnegative");
}

int Bimodule::dim() const {
  int d = 0;
  for (int j = 0; j < target.size(); ++j)
    for (int i = 0; i < source.size(); ++i) d += block_dim(j, i);
  return d;
}

std::string describe(const Bimodule& x) {
  std::ostringstream os;
  os << describe(x.target) << "-" << describe(x.source) << " [";
  for (int j = 0; j < x.mult.rows(); ++j) {
    if (j) os << ";";
    for (int i = 0; i < x.mult.cols(); ++i) os << (i ? "," : "") << x.mult(j, i);
  }
  os << "]";
  return os.str();
}

Bimodule unit_bimodule(const TracialAlgebra& a) {
  return Bimodule(a, a, IMat::Identity(a.size(), a.size()));
}

Bimodule zero_bimodule(const TracialAlgebra& source, const TracialAlgebra& target) {
  return Bimodule(source, target, IMat::Zero(target.size(), source.size()));
}

// ---- vectors

Vector zero_vector(const Bimodule& x) {
  Vector v{x, {}};
  for (int j = 0; j < x.target.size(); ++j)
    for (int i = 0; i < x.source.size(); ++i) v.blocks.push_back(CVec::Zero(x.block_dim(j, i)));
  return v;
}

Vector unit_vector(const Bimodule& x, int j, int i, int p, int q, int r) {
  Vector v = zero_vector(x);
  v.block(j, i)((p * x.k(j, i) + q) * x.source.block(i) + r) = 1.0;
  return v;
}

Vector random_vector(const Bimodule& x, Rng& rng) {
  Vector v{x, {}};
  for (int j = 0; j < x.target.size(); ++j)
    for (int i = 0; i < x.source.size(); ++i) v.blocks.push_back(random_matrix(rng, x.block_dim(j, i), 1));
  return v;
}

Vector operator+(const Vector& a, const Vector& b) {
  check_same_parent(a, b);
  Vector v = a;
  for (size_t n = 0; n < v.blocks.size(); ++n) v.blocks[n] += b.blocks[n];
  return v;
}

Vector operator-(const Vector& a, const Vector& b) {
  check_same_parent(a, b);
  Vector v = a;
  for (size_t n = 0; n < v.blocks.size(); ++n) v.blocks[n] -= b.blocks[n];
  return v;
}

Vector operator*(cplx s, const Vector& a) {
  Vector v = a;
  for (auto& b : v.blocks) b *= s;
  return v;
}

cplx inner(const Vector& a, const Vector& b) {
  check_same_parent(a, b);
  cplx s = 0;
  for (size_t n = 0; n < a.blocks.size(); ++n) s += a.blocks[n].dot(b.blocks[n]);
  return s;
}

double norm(const Vector& a) { return std::sqrt(std::max(0.0, inner(a, a).real())); }

CVec flatten(const Vector& v) {
  check_vector(v);
  CVec out(v.parent.dim());
  int off = 0;
  for (const auto& b : v.blocks) {
    out.segment(off, b.size()) = b;
    off += static_cast<int>(b.size());
  }
  return out;
}

Vector unflatten(const Bimodule& x, const CVec& flat) {
  require(flat.size() == x.dim(), ErrorKind::Structural, "flat vector has wrong length");
  Vector v = zero_vector(x);
  int off = 0;
  for (auto& b : v.blocks) {
    b = flat.segment(off, b.size());
    off += static_cast<int>(b.size());
  }
  return v;
}

std::vector<Vector> standard_vectors(const Bimodule& x) {
  std::vector<Vector> out;
  const int d = x.dim();
  for (int n = 0; n < d; ++n) {
    CVec e = CVec::Zero(d);
    e(n) = 1.0;
    out.push_back(unflatten(x, e));
  }
  return out;
}

Vector algebra_vector(const Element& a) {
  Bimodule u = unit_bimodule(a.parent);
  Vector v = zero_vector(u);
  for (int i = 0; i < a.parent.size(); ++i) {
    const int m = a.parent.block(i);
    view(v.block(i, i), m, m) = a[i] / std::sqrt(static_cast<double>(m));
  }
  return v;
}

Element vector_algebra(const Vector& v) {
  const TracialAlgebra& a = v.parent.source;
  require(v.parent == unit_bimodule(a), ErrorKind::Structural, "vector is not in a unit bimodule");
  Element e = zero_element(a);
  for (int i = 0; i < a.size(); ++i) {
    const int m = a.block(i);
    e[i] = view(v.block(i, i), m, m) * std::sqrt(static_cast<double>(m));
  }
  return e;
}

Vector left_act(const Element& b, const Vector& v) {
  const Bimodule& x = v.parent;
  require(b.parent == x.target, ErrorKind::Structural, "left action by an element of the wrong algebra");
  Vector out = v;
  for (int j = 0; j < x.target.size(); ++j)
    for (int i = 0; i < x.source.size(); ++i) {
      const int n = x.target.block(j), km = x.k(j, i) * x.source.block(i);
      if (km == 0) continue;
      view(out.block(j, i), n, km) = b[j] * view(v.block(j, i), n, km);
    }
  return out;
}

Vector right_act(const Vector& v, const Element& a) {
  const Bimodule& x = v.parent;
  require(a.parent == x.source, ErrorKind::Structural, "right action by an element of the wrong algebra");
  Vector out = v;
  for (int j = 0; j < x.target.size(); ++j)
    for (int i = 0; i < x.source.size(); ++i) {
      const int nk = x.target.block(j) * x.k(j, i), m = x.source.block(i);
      if (nk == 0) continue;
      view(out.block(j, i), nk, m) = view(v.block(j, i), nk, m) * a[i];
    }
  return out;
}

Vector act(const Element& b, const Vector& v, const Element& a) { return right_act(left_act(b, v), a); }

Element m_valued_inner(const Vector& xi, const Vector& beta) {
  check_same_parent(xi, beta);
  const Bimodule& x = xi.parent;
  Element out = zero_element(x.source);
  for (int i = 0; i < x.source.size(); ++i) {
    const int m = x.source.block(i);
    for (int j = 0; j < x.target.size(); ++j) {
      const int nk = x.target.block(j) * x.k(j, i);
      if (nk == 0) continue;
      out[i] += view(xi.block(j, i), nk, m).adjoint() * view(beta.block(j, i), nk, m);
    }
    out[i] *= static_cast<double>(m);
  }
  return out;
}

Element n_valued_inner(const Vector& beta, const Vector& xi) {
  check_same_parent(xi, beta);
  const Bimodule& x = xi.parent;
  Element out = zero_element(x.target);
  for (int j = 0; j < x.target.size(); ++j) {
    const int n = x.target.block(j);
    for (int i = 0; i < x.source.size(); ++i) {
      const int km = x.k(j, i) * x.source.block(i);
      if (km == 0) continue;
      out[j] += view(beta.block(j, i), n, km) * view(xi.block(j, i), n, km).adjoint();
    }
    out[j] *= static_cast<double>(n);
  }
  return out;
}

std::vector<Vector> left_basis(const Bimodule& x) {
  std::vector<Vector> out;
  for (int j = 0; j < x.target.size(); ++j)
    for (int i = 0; i < x.source.size(); ++i) {
      const int km = x.k(j, i) * x.source.block(i);
      const double s = 1.0 / std::sqrt(static_cast<double>(x.target.block(j)));
      for (int u = 0; u < km; ++u) {
        Vector v = zero_vector(x);
        v.block(j, i)(u) = s;
        out.push_back(std::move(v));
      }
    }
  return out;
}

std::vector<Vector> right_basis(const Bimodule& x) {
  std::vector<Vector> out;
  for (int j = 0; j < x.target.size(); ++j)
    for (int i = 0; i < x.source.size(); ++i) {
      const int nk = x.target.block(j) * x.k(j, i), m = x.source.block(i);
      const double s = 1.0 / std::sqrt(static_cast<double>(m));
      for (int t = 0; t < nk; ++t) {
        Vector v = zero_vector(x);
        v.block(j, i)(t * m) = s;
        out.push_back(std::move(v));
      }
    }
  return out;
}

// ---- intertwiners

void require_parallel(const Bimodule& x, const Bimodule& y, const std::string& what) {
  require(x.source == y.source && x.target == y.target, ErrorKind::Structural,
          what + ": bimodules " + describe(x) + " and " + describe(y) + " are not parallel");
}

Intertwiner zero_map(const Bimodule& dom, const Bimodule& cod) {
  require_parallel(dom, cod, "intertwiner");
  Intertwiner f{dom, cod, {}};
  for (int j = 0; j < dom.target.size(); ++j)
    for (int i = 0; i < dom.source.size(); ++i) f.blocks.push_back(Mat::Zero(cod.k(j, i), dom.k(j, i)));
  return f;
}

Intertwiner identity(const Bimodule& x) {
  Intertwiner f = zero_map(x, x);
  for (auto& b : f.blocks) b.setIdentity();
  return f;
}

Intertwiner random_intertwiner(const Bimodule& dom, const Bimodule& cod, Rng& rng) {
  Intertwiner f = zero_map(dom, cod);
  for (auto& b : f.blocks) b = random_matrix(rng, static_cast<int>(b.rows()), static_cast<int>(b.cols()));
  return f;
}

Intertwiner operator*(const Intertwiner& g, const Intertwiner& f) {
  require(f.cod == g.dom, ErrorKind::Structural,
          "composition: " + describe(f.cod) + " does not match " + describe(g.dom));
  Intertwiner h{f.dom, g.cod, {}};
  for (size_t n = 0; n < f.blocks.size(); ++n) h.blocks.push_back(g.blocks[n] * f.blocks[n]);
  return h;
}

Intertwiner operator+(const Intertwiner& f, const Intertwiner& g) {
  require(f.dom == g.dom && f.cod == g.cod, ErrorKind::Structural, "sum of non-parallel intertwiners");
  Intertwiner h = f;
  for (size_t n = 0; n < h.blocks.size(); ++n) h.blocks[n] += g.blocks[n];
  return h;
}

Intertwiner operator-(const Intertwiner& f, const Intertwiner& g) {
  require(f.dom == g.dom && f.cod == g.cod, ErrorKind::Structural, "difference of non-parallel intertwiners");
  Intertwiner h = f;
  for (size_t n = 0; n < h.blocks.size(); ++n) h.blocks[n] -= g.blocks[n];
  return h;
}

Intertwiner operator*(cplx s, const Intertwiner& f) {
  Intertwiner h = f;
  for (auto& b : h.blocks) b *= s;
  return h;
}

Intertwiner adjoint(const Intertwiner& f) {
  Intertwiner h{f.cod, f.dom, {}};
  for (const auto& b : f.blocks) h.blocks.push_back(b.adjoint());
  return h;
}

double opnorm(const Intertwiner& f) {
  double r = 0;
  for (const auto& b : f.blocks) {
    const double v = opnorm(b);
    if (!(v <= r)) r = v;  // keeps NaN
  }
  return r;
}

double distance(const Intertwiner& f, const Intertwiner& g) { return opnorm(f - g); }

Vector apply(const Intertwiner& f, const Vector& v) {
  require(v.parent == f.dom, ErrorKind::Structural, "intertwiner applied to a vector of the wrong bimodule");
  Vector out = zero_vector(f.cod);
  const Bimodule& x = f.dom;
  for (int j = 0; j < x.target.size(); ++j)
    for (int i = 0; i < x.source.size(); ++i) {
      const int n = x.target.block(j), m = x.source.block(i);
      const int k1 = x.k(j, i), k2 = f.cod.k(j, i);
      if (k1 == 0 || k2 == 0) continue;
      const Mat& b = f.block(j, i);
      for (int p = 0; p < n; ++p) {
        ConstRowMap in(v.block(j, i).data() + p * k1 * m, k1, m);
        RowMap o(out.block(j, i).data() + p * k2 * m, k2, m);
        o = b * in;
      }
    }
  return out;
}

Intertwiner map_blocks(const Intertwiner& f, const std::function<Mat(const Mat&)>& op) {
  Intertwiner h = f;
  for (auto& b : h.blocks) b = op(b);
  return h;
}

int intertwiner_dim(const Bimodule& dom, const Bimodule& cod) {
  return static_cast<int>((dom.mult.array() * cod.mult.array()).sum());
}

CVec coords(const Intertwiner& f) {
  CVec c(intertwiner_dim(f.dom, f.cod));
  int off = 0;
  for (const auto& b : f.blocks)
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      for (Eigen::Index s = 0; s < b.cols(); ++s) c(off++) = b(r, s);
  return c;
}

Intertwiner from_coords(const Bimodule& dom, const Bimodule& cod, const CVec& c) {
  require(c.size() == intertwiner_dim(dom, cod), ErrorKind::Structural, "coordinate vector has wrong length");
  Intertwiner f = zero_map(dom, cod);
  int off = 0;
  for (auto& b : f.blocks)
    for (Eigen::Index r = 0; r < b.rows(); ++r)
      for (Eigen::Index s = 0; s < b.cols(); ++s) b(r, s) = c(off++);
  return f;
}

std::vector<Intertwiner> solve_intertwiners(const Bimodule& dom, const Bimodule& cod,
                                            const std::function<CVec(const Intertwiner&)>& constraint,
                                            double rtol) {
  const int n = intertwiner_dim(dom, cod);
  std::vector<Intertwiner> out;
  if (n == 0) return out;
  Mat a;
  for (int c = 0; c < n; ++c) {
    CVec e = CVec::Zero(n);
    e(c) = 1.0;
    CVec col = constraint(from_coords(dom, cod, e));
    if (c == 0) a = Mat::Zero(col.size(), n);
    a.col(c) = col;
  }
  Mat ns = nullspace(a, rtol);
  for (Eigen::Index c = 0; c < ns.cols(); ++c) out.push_back(from_coords(dom, cod, ns.col(c)));
  return out;
}

// ---- dense forms

Mat dense(const Intertwiner& f) {
  Mat out = Mat::Zero(f.cod.dim(), f.dom.dim());
  int r = 0, c = 0;
  const Bimodule& x = f.dom;
  for (int j = 0; j < x.target.size(); ++j)
    for (int i = 0; i < x.source.size(); ++i) {
      const int n = x.target.block(j), m = x.source.block(i);
      const int k1 = x.k(j, i), k2 = f.cod.k(j, i);
      if (k1 && k2)
        out.block(r, c, n * k2 * m, n * k1 * m) =
            kron(Mat::Identity(n, n), kron(f.block(j, i), Mat::Identity(m, m)));
      r += n * k2 * m;
      c += n * k1 * m;
    }
  return out;
}

Mat dense_left(const Bimodule& x, const Element& b) {
  require(b.parent == x.target, ErrorKind::Structural, "left action by an element of the wrong algebra");
  Mat out = Mat::Zero(x.dim(), x.dim());
  int off = 0;
  for (int j = 0; j < x.target.size(); ++j)
    for (int i = 0; i < x.source.size(); ++i) {
      const int km = x.k(j, i) * x.source.block(i), n = x.target.block(j);
      if (km) out.block(off, off, n * km, n * km) = kron(b[j], Mat::Identity(km, km));
      off += n * km;
    }
  return out;
}

Mat dense_right(const Bimodule& x, const Element& a) {
  require(a.parent == x.source, ErrorKind::Structural, "right action by an element of the wrong algebra");
  Mat out = Mat::Zero(x.dim(), x.dim());
  int off = 0;
  for (int j = 0; j < x.target.size(); ++j)
    for (int i = 0; i < x.source.size(); ++i) {
      const int nk = x.target.block(j) * x.k(j, i), m = x.source.block(i);
      if (nk) out.block(off, off, nk * m, nk * m) = kron(Mat::Identity(nk, nk), a[i].transpose());
      off += nk * m;
    }
  return out;
}

Intertwiner intertwiner_from_function(const Bimodule& dom, const Bimodule& cod,
                                      const std::function<Vector(const Vector&)>& f) {
  Intertwiner out = zero_map(dom, cod);
  for (int j = 0; j < dom.target.size(); ++j)
    for (int i = 0; i < dom.source.size(); ++i) {
      const int m = dom.source.block(i), k2 = cod.k(j, i);
      if (k2 == 0) continue;
      for (int q = 0; q < dom.k(j, i); ++q) {
        Vector img = f(unit_vector(dom, j, i, 0, q, 0));
        require(img.parent == cod, ErrorKind::Structural, "linear map lands in the wrong bimodule");
        for (int q2 = 0; q2 < k2; ++q2) out.block(j, i)(q2, q) = img.block(j, i)(q2 * m);
      }
    }
  return out;
}

Intertwiner intertwiner_from_dense(const Bimodule& dom, const Bimodule& cod, const Mat& t) {
  require(t.rows() == cod.dim() && t.cols() == dom.dim(), ErrorKind::Structural, "dense map has wrong shape");
  return intertwiner_from_function(dom, cod, [&](const Vector& v) { return unflatten(cod, t * flatten(v)); });
}

// ---- conjugation

Bimodule conjugate(const Bimodule& x) { return Bimodule(x.target, x.source, x.mult.transpose()); }

Vector conjugate_vector(const Vector& v) {
  const Bimodule& x = v.parent;
  Vector out = zero_vector(conjugate(x));
  for (int j = 0; j < x.target.size(); ++j)
    for (int i = 0; i < x.source.size(); ++i) {
      const int n = x.target.block(j), k = x.k(j, i), m = x.source.block(i);
      const CVec& in = v.block(j, i);
      CVec& o = out.block(i, j);
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < k; ++q)
          for (int r = 0; r < m; ++r) o((r * k + q) * n + p) = std::conj(in((p * k + q) * m + r));
    }
  return out;
}

Intertwiner conjugate_map(const Intertwiner& f) {
  Intertwiner out = zero_map(conjugate(f.dom), conjugate(f.cod));
  for (int j = 0; j < f.dom.target.size(); ++j)
    for (int i = 0; i < f.dom.source.size(); ++i) out.block(i, j) = f.block(j, i).conjugate();
  return out;
}

// ---- fusion

FusionWitness fuse(const Bimodule& y, const Bimodule& x) {
  require(y.source == x.target, ErrorKind::Structural,
          "fusion: " + describe(y) + " cannot be fused with " + describe(x));
  FusionWitness w{y, x, Bimodule(x.source, y.target, y.mult * x.mult), {}};
  const int sN = y.target.size(), sM = y.source.size(), sL = x.source.size();
  w.segments.resize(static_cast<size_t>(sN * sL));
  for (int k = 0; k < sN; ++k)
    for (int i = 0; i < sL; ++i) {
      int off = 0;
      for (int j = 0; j < sM; ++j) {
        const int a = y.k(k, j), b = x.k(j, i);
        if (a * b == 0) continue;
        w.segments[static_cast<size_t>(k * sL + i)].push_back({j, off, a, b});
        off += a * b;
      }
    }
  return w;
}

Bimodule fused(const Bimodule& y, const Bimodule& x) { return fuse(y, x).fused; }

Vector fuse_vectors(const Vector& yv, const Vector& xv) {
  FusionWitness w = fuse(yv.parent, xv.parent);
  const Bimodule &y = w.left, &x = w.right, &z = w.fused;
  Vector out = zero_vector(z);
  const int sL = x.source.size();
  for (int k = 0; k < z.target.size(); ++k)
    for (int i = 0; i < sL; ++i) {
      const int n = z.target.block(k), l = z.source.block(i), kz = z.k(k, i);
      if (kz == 0) continue;
      CVec& o = out.block(k, i);
      for (const auto& s : w.segments[static_cast<size_t>(k * sL + i)]) {
        const int m = y.source.block(s.mid);
        Mat prod = std::sqrt(static_cast<double>(m)) * view(yv.block(k, s.mid), n * s.left, m) *
                   view(xv.block(s.mid, i), m, s.right * l);
        for (int p = 0; p < n; ++p)
          for (int a = 0; a < s.left; ++a)
            for (int b = 0; b < s.right; ++b)
              for (int r = 0; r < l; ++r)
                o((p * kz + s.offset + a * s.right + b) * l + r) = prod(p * s.left + a, b * l + r);
      }
    }
  return out;
}

Intertwiner fuse_morphisms(const Intertwiner& g, const Intertwiner& f) {
  FusionWitness w1 = fuse(g.dom, f.dom);
  FusionWitness w2 = fuse(g.cod, f.cod);
  Intertwiner out = zero_map(w1.fused, w2.fused);
  const int sL = f.dom.source.size();
  for (int k = 0; k < w1.fused.target.size(); ++k)
    for (int i = 0; i < sL; ++i) {
      const auto& s1 = w1.segments[static_cast<size_t>(k * sL + i)];
      const auto& s2 = w2.segments[static_cast<size_t>(k * sL + i)];
      Mat& o = out.block(k, i);
      size_t b = 0;
      for (const auto& a : s1) {
        while (b < s2.size() && s2[b].mid < a.mid) ++b;
        if (b == s2.size() || s2[b].mid != a.mid) continue;
        o.block(s2[b].offset, a.offset, s2[b].left * s2[b].right, a.left * a.right) =
            kron(g.block(k, a.mid), f.block(a.mid, i));
      }
    }
  return out;
}

namespace {

int segment_offset(const std::vector<FusionSegment>& segs, int mid) {
  for (const auto& s : segs)
    if (s.mid == mid) return s.offset;
  return -1;
}

}  // namespace

Intertwiner associator(const Bimodule& z, const Bimodule& y, const Bimodule& x) {
  FusionWitness zy = fuse(z, y);
  FusionWitness yx = fuse(y, x);
  FusionWitness dom = fuse(zy.fused, x);
  FusionWitness cod = fuse(z, yx.fused);
  Intertwiner out = zero_map(dom.fused, cod.fused);
  const int sA3 = z.target.size(), sA2 = z.source.size(), sA1 = y.source.size(), sA0 = x.source.size();
  for (int l = 0; l < sA3; ++l)
    for (int i = 0; i < sA0; ++i) {
      const auto& dsegs = dom.segments[static_cast<size_t>(l * sA0 + i)];
      const auto& csegs = cod.segments[static_cast<size_t>(l * sA0 + i)];
      Mat& o = out.block(l, i);
      for (int j = 0; j < sA1; ++j) {
        const int kx = x.k(j, i);
        if (kx == 0) continue;
        const int doff = segment_offset(dsegs, j);
        if (doff < 0) continue;
        const int kzy = zy.fused.k(l, j);
        for (int k = 0; k < sA2; ++k) {
          const int kz = z.k(l, k), ky = y.k(k, j);
          if (kz * ky == 0) continue;
          const int zyoff = segment_offset(zy.segments[static_cast<size_t>(l * sA1 + j)], k);
          const int coff = segment_offset(csegs, k);
          const int yxoff = segment_offset(yx.segments[static_cast<size_t>(k * sA0 + i)], j);
          const int kyx = yx.fused.k(k, i);
          for (int a = 0; a < kz; ++a)
            for (int b = 0; b < ky; ++b)
              for (int c = 0; c < kx; ++c) {
                const int qzy = zyoff + a * ky + b;
                const int src = doff + qzy * kx + c;
                const int dst = coff + a * kyx + yxoff + b * kx + c;
                o(dst, src) = 1.0;
              }
        }
        (void)kzy;
      }
    }
  return out;
}

Intertwiner associator_inv(const Bimodule& z, const Bimodule& y, const Bimodule& x) {
  return adjoint(associator(z, y, x));
}

Intertwiner left_unitor(const Bimodule& x) {
  Intertwiner f = zero_map(fused(unit_bimodule(x.target), x), x);
  for (auto& b : f.blocks) b.setIdentity();
  return f;
}

Intertwiner right_unitor(const Bimodule& x) {
  Intertwiner f = zero_map(fused(x, unit_bimodule(x.source)), x);
  for (auto& b : f.blocks) b.setIdentity();
  return f;
}

cplx tensor_inner(const Vector& y1, const Vector& x1, const Vector& y2, const Vector& x2) {
  Element a = m_valued_inner(y1, y2);
  Element b = n_valued_inner(x2, x1);
  return trace(a.parent, a * b);
}

// ---- Gram oracle

Mat twirl(const std::vector<std::pair<RepFamily, RepFamily>>& actions, const Mat& t) {
  Mat cur = t;
  for (const auto& [r1, r2] : actions) {
    Mat next = Mat::Zero(cur.rows(), cur.cols());
    for (size_t b = 0; b < r1.sizes.size(); ++b) {
      const int m = r1.sizes[b];
      for (int p = 0; p < m; ++p)
        next += r2.units[b][static_cast<size_t>(p * m)] * cur * r1.units[b][static_cast<size_t>(p)];
    }
    cur = next;
  }
  return cur;
}

namespace {

RepFamily dense_family(const Bimodule& x, bool left) {
  RepFamily f;
  const TracialAlgebra& a = left ? x.target : x.source;
  for (int b = 0; b < a.size(); ++b) {
    const int m = a.block(b);
    f.sizes.push_back(m);
    std::vector<Mat> units;
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        units.push_back(left ? dense_left(x, matrix_unit(a, b, p, q)) : dense_right(x, matrix_unit(a, b, q, p)));
    f.units.push_back(std::move(units));
  }
  return f;
}

}  // namespace

GramFusion fuse_gram_oracle(const Bimodule& y, const Bimodule& x, Rng& rng) {
  GramFusion out;
  out.skeletal = fused(y, x);
  std::vector<Vector> ys = right_basis(y);
  std::vector<Vector> xs = standard_vectors(x);
  const int ny = static_cast<int>(ys.size()), nx = static_cast<int>(xs.size());
  const int ns = ny * nx;
  if (ns == 0) {
    out.quotient_dim = 0;
    return out;
  }

  // Pairings <y_t, b y_t'>_M and M<x_s' a, x_s> only need the M-valued products once.
  std::vector<Element> yy(static_cast<size_t>(ny * ny));
  for (int t = 0; t < ny; ++t)
    for (int u = 0; u < ny; ++u) yy[static_cast<size_t>(t * ny + u)] = m_valued_inner(ys[t], ys[u]);
  std::vector<Element> xx(static_cast<size_t>(nx * nx));
  for (int s = 0; s < nx; ++s)
    for (int v = 0; v < nx; ++v) xx[static_cast<size_t>(v * nx + s)] = n_valued_inner(xs[v], xs[s]);

  const TracialAlgebra& mid = y.source;
  auto gram_with = [&](const std::vector<Element>& ya, const std::vector<Element>& xa) {
    Mat g(ns, ns);
    for (int t = 0; t < ny; ++t)
      for (int s = 0; s < nx; ++s)
        for (int u = 0; u < ny; ++u)
          for (int v = 0; v < nx; ++v)
            g(t * nx + s, u * nx + v) =
                trace(mid, ya[static_cast<size_t>(t * ny + u)] * xa[static_cast<size_t>(v * nx + s)]);
    return g;
  };

  Mat g = gram_with(yy, xx);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g + g.adjoint()));
  const RVec& ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  out.gram_min_eig = ev(0);
  if (ev(0) < -1e-9 * std::max(1.0, top))
    fail(ErrorKind::Numerical, "Gram matrix has a negative eigenvalue " + std::to_string(ev(0)));
  std::vector<int> keep;
  for (Eigen::Index n = 0; n < ev.size(); ++n)
    if (ev(n) > 1e-10 * top) keep.push_back(static_cast<int>(n));
  const int qd = static_cast<int>(keep.size());
  out.quotient_dim = qd;
  Mat vk(ns, qd);
  RVec isq(qd);
  for (int c = 0; c < qd; ++c) {
    vk.col(c) = es.eigenvectors().col(keep[static_cast<size_t>(c)]);
    isq(c) = 1.0 / std::sqrt(ev(keep[static_cast<size_t>(c)]));
  }
  auto compress = [&](const Mat& ga) -> Mat {
    return isq.cast<cplx>().asDiagonal() * (vk.adjoint() * ga * vk) * isq.cast<cplx>().asDiagonal();
  };

  RepFamily lq, rq;
  const TracialAlgebra& tgt = y.target;
  for (int b = 0; b < tgt.size(); ++b) {
    const int m = tgt.block(b);
    lq.sizes.push_back(m);
    std::vector<Mat> units;
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) {
        Element e = matrix_unit(tgt, b, p, q);
        std::vector<Element> ya(yy.size());
        for (int t = 0; t < ny; ++t)
          for (int u = 0; u < ny; ++u) ya[static_cast<size_t>(t * ny + u)] = m_valued_inner(ys[t], left_act(e, ys[u]));
        units.push_back(compress(gram_with(ya, xx)));
        out.left_rep.push_back(units.back());
      }
    lq.units.push_back(std::move(units));
  }
  const TracialAlgebra& src = x.source;
  for (int b = 0; b < src.size(); ++b) {
    const int m = src.block(b);
    rq.sizes.push_back(m);
    std::vector<Mat> units;
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) {
        Element e = matrix_unit(src, b, q, p);
        std::vector<Element> xa(xx.size());
        for (int s = 0; s < nx; ++s)
          for (int v = 0; v < nx; ++v) xa[static_cast<size_t>(v * nx + s)] = n_valued_inner(right_act(xs[v], e), xs[s]);
        units.push_back(compress(gram_with(yy, xa)));
        out.right_rep.push_back(units.back());
      }
    rq.units.push_back(std::move(units));
  }

  const Bimodule& z = out.skeletal;
  if (qd != z.dim()) {
    out.residual = 1.0;
    return out;
  }
  RepFamily lz = dense_family(z, true), rz = dense_family(z, false);
  Mat t = twirl({{lq, lz}, {rq, rz}}, random_matrix(rng, z.dim(), qd));
  out.unitary = polar_unitary(t);
  double res = opnorm(Mat(out.unitary.adjoint() * out.unitary - Mat::Identity(qd, qd)));
  for (size_t b = 0; b < lq.units.size(); ++b)
    for (size_t n = 0; n < lq.units[b].size(); ++n)
      res = std::max(res, opnorm(Mat(out.unitary * lq.units[b][n] - lz.units[b][n] * out.unitary)));
  for (size_t b = 0; b < rq.units.size(); ++b)
    for (size_t n = 0; n < rq.units[b].size(); ++n)
      res = std::max(res, opnorm(Mat(out.unitary * rq.units[b][n] - rz.units[b][n] * out.unitary)));
  out.residual = res;
  return out;
}

// ---- direct sums and restrictions

DirectSum direct_sum(const Bimodule& x1, const Bimodule& x2) {
  require_parallel(x1, x2, "direct sum");
  DirectSum d{Bimodule(x1.source, x1.target, x1.mult + x2.mult), {}, {}};
  d.inj1 = zero_map(x1, d.sum);
  d.inj2 = zero_map(x2, d.sum);
  for (int j = 0; j < x1.target.size(); ++j)
    for (int i = 0; i < x1.source.size(); ++i) {
      const int a = x1.k(j, i), b = x2.k(j, i);
      d.inj1.block(j, i).topRows(a).setIdentity();
      if (b) d.inj2.block(j, i).bottomRows(b).setIdentity();
    }
  return d;
}

Restriction restrict_blocks(const Bimodule& x, const std::function<bool(int, int)>& keep) {
  IMat k = x.mult;
  for (int j = 0; j < x.target.size(); ++j)
    for (int i = 0; i < x.source.size(); ++i)
      if (!keep(j, i)) k(j, i) = 0;
  Restriction r{Bimodule(x.source, x.target, k), {}};
  r.incl = zero_map(r.sub, x);
  for (int j = 0; j < x.target.size(); ++j)
    for (int i = 0; i < x.source.size(); ++i)
      if (k(j, i)) r.incl.block(j, i).setIdentity();
  return r;
}

}  // namespace bimcalc
