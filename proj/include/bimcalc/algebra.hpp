#pragma once

#include "bimcalc/linalg.hpp"

#include <string>
#include <vector>

namespace bimcalc {

// Finite direct sum of matrix blocks; the trace is the sum of the block tracial states.
struct TracialAlgebra {
  std::vector<int> blocks;
  std::vector<std::string> labels;

  TracialAlgebra() = default;
  explicit TracialAlgebra(std::vector<int> sizes, std::vector<std::string> names = {});

  int size() const { return static_cast<int>(blocks.size()); }
  int block(int i) const { return blocks[static_cast<size_t>(i)]; }
  int dim() const;  // sum of m_i^2

  bool operator==(const TracialAlgebra& o) const { return blocks == o.blocks; }
  bool operator!=(const TracialAlgebra& o) const { return !(*this == o); }
};

std::string describe(const TracialAlgebra& a);

struct Element {
  TracialAlgebra parent;
  std::vector<Mat> mats;

  const Mat& operator[](int i) const { return mats[static_cast<size_t>(i)]; }
  Mat& operator[](int i) { return mats[static_cast<size_t>(i)]; }
};

Element zero_element(const TracialAlgebra& a);
Element identity_element(const TracialAlgebra& a);
Element matrix_unit(const TracialAlgebra& a, int block, int row, int col);
Element random_element(const TracialAlgebra& a, Rng& rng);
Element from_blocks(const TracialAlgebra& a, std::vector<Mat> mats);

Element operator+(const Element& x, const Element& y);
Element operator-(const Element& x, const Element& y);
Element operator*(const Element& x, const Element& y);
Element operator*(cplx s, const Element& x);
Element adjoint(const Element& x);
double max_abs(const Element& x);

cplx trace(const TracialAlgebra& a, const Element& x);
cplx l2_inner(const Element& x, const Element& y);
double l2_norm(const Element& x);

// Minimal central projection of block i is the identity of that block.
struct CentralProjection {
  TracialAlgebra parent;
  int block = 0;
  Element element() const;
};

std::vector<CentralProjection> minimal_central_projections(const TracialAlgebra& a);

// Orthonormal (for l2_inner) basis of matrix units scaled by sqrt(m_i).
std::vector<Element> orthonormal_basis(const TracialAlgebra& a);

}  // namespace bimcalc
