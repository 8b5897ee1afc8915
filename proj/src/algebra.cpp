#include "bimcalc/algebra.hpp"

#include <cmath>
#include <sstream>

namespace bimcalc {

TracialAlgebra::TracialAlgebra(std::vector<int> sizes, std::vector<std::string> names)
    : blocks(std::move(sizes)), labels(std::move(names)) {
  require(!blocks.empty(), ErrorKind::Structural, "algebra needs at least one block");
  for (int m : blocks) require(m >= 1, ErrorKind::Structural, "block sizes must be positive");
  require(labels.empty() || labels.size() == blocks.size(), ErrorKind::Structural,
          "label count does not match block count");
}

int TracialAlgebra::dim() const {
  int d = 0;
  for (int m : blocks) d += m * m;
  return d;
}

std::string describe(const TracialAlgebra& a) {
  std::ostringstream os;
  for (int i = 0; i < a.size(); ++i) {
    if (i) os << "+";
    if (a.block(i) == 1)
      os << "C";
    else
      os << "M" << a.block(i);
  }
  return os.str();
}

namespace {

void check_parent(const TracialAlgebra& a, const Element& x) {
  require(x.parent == a && x.mats.size() == a.blocks.size(), ErrorKind::Structural,
          "element does not belong to algebra " + describe(a));
  for (int i = 0; i < a.size(); ++i)
    require(x[i].rows() == a.block(i) && x[i].cols() == a.block(i), ErrorKind::Structural,
            "block shape mismatch in element");
}

void check_same(const Element& x, const Element& y) {
  require(x.parent == y.parent, ErrorKind::Structural, "elements of different algebras");
}

}  // namespace

Element zero_element(const TracialAlgebra& a) {
  Element e{a, {}};
  for (int m : a.blocks) e.mats.push_back(Mat::Zero(m, m));
  return e;
}

Element identity_element(const TracialAlgebra& a) {
  Element e{a, {}};
  for (int m : a.blocks) e.mats.push_back(Mat::Identity(m, m));
  return e;
}

Element matrix_unit(const TracialAlgebra& a, int block, int row, int col) {
  Element e = zero_element(a);
  e[block](row, col) = 1.0;
  return e;
}

Element random_element(const TracialAlgebra& a, Rng& rng) {
  Element e{a, {}};
  for (int m : a.blocks) e.mats.push_back(random_matrix(rng, m, m));
  return e;
}

Element from_blocks(const TracialAlgebra& a, std::vector<Mat> mats) {
  Element e{a, std::move(mats)};
  check_parent(a, e);
  return e;
}

Element operator+(const Element& x, const Element& y) {
  check_same(x, y);
  Element e = x;
  for (size_t i = 0; i < e.mats.size(); ++i) e.mats[i] += y.mats[i];
  return e;
}

Element operator-(const Element& x, const Element& y) {
  check_same(x, y);
  Element e = x;
  for (size_t i = 0; i < e.mats.size(); ++i) e.mats[i] -= y.mats[i];
  return e;
}

Element operator*(const Element& x, const Element& y) {
  check_same(x, y);
  Element e = x;
  for (size_t i = 0; i < e.mats.size(); ++i) e.mats[i] = x.mats[i] * y.mats[i];
  return e;
}

Element operator*(cplx s, const Element& x) {
  Element e = x;
  for (auto& m : e.mats) m *= s;
  return e;
}

Element adjoint(const Element& x) {
  Element e = x;
  for (auto& m : e.mats) m = Mat(m.adjoint());
  return e;
}

double max_abs(const Element& x) {
  double r = 0;
  for (const auto& m : x.mats)
    if (m.size()) r = std::max(r, m.cwiseAbs().maxCoeff());
  return r;
}

cplx trace(const TracialAlgebra& a, const Element& x) {
  check_parent(a, x);
  cplx t = 0;
  for (int i = 0; i < a.size(); ++i) t += x[i].trace() / static_cast<double>(a.block(i));
  return t;
}

cplx l2_inner(const Element& x, const Element& y) {
  check_same(x, y);
  return trace(x.parent, adjoint(x) * y);
}

double l2_norm(const Element& x) { return std::sqrt(std::max(0.0, l2_inner(x, x).real())); }

Element CentralProjection::element() const {
  Element e = zero_element(parent);
  e[block] = Mat::Identity(parent.block(block), parent.block(block));
  return e;
}

std::vector<CentralProjection> minimal_central_projections(const TracialAlgebra& a) {
  std::vector<CentralProjection> out;
  for (int i = 0; i < a.size(); ++i) out.push_back({a, i});
  return out;
}

std::vector<Element> orthonormal_basis(const TracialAlgebra& a) {
  std::vector<Element> out;
  for (int i = 0; i < a.size(); ++i)
    for (int p = 0; p < a.block(i); ++p)
      for (int q = 0; q < a.block(i); ++q)
        out.push_back(std::sqrt(static_cast<double>(a.block(i))) * matrix_unit(a, i, p, q));
  return out;
}

}  // namespace bimcalc
