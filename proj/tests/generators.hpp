#pragma once

// Hand-rolled random instances for property tests.

#include "bimcalc/bimodule.hpp"

namespace gen {

using namespace bimcalc;

inline TracialAlgebra algebra(Rng& rng, int max_blocks = 3, int max_size = 3) {
  int s = uniform_int(rng, 1, max_blocks);
  std::vector<int> b;
  for (int i = 0; i < s; ++i) b.push_back(uniform_int(rng, 1, max_size));
  return TracialAlgebra(b);
}

inline IMat multiplicities(Rng& rng, int rows, int cols, int max_k = 2) {
  IMat k(rows, cols);
  for (int j = 0; j < rows; ++j)
    for (int i = 0; i < cols; ++i) k(j, i) = uniform_int(rng, 0, max_k);
  if (k.sum() == 0) k(uniform_int(rng, 0, rows - 1), uniform_int(rng, 0, cols - 1)) = 1;
  return k;
}

// Every row and column has a nonzero entry, so both actions are faithful.
inline IMat full_support(Rng& rng, int rows, int cols, int max_k = 2) {
  IMat k = multiplicities(rng, rows, cols, max_k);
  for (int j = 0; j < rows; ++j)
    if (k.row(j).sum() == 0) k(j, uniform_int(rng, 0, cols - 1)) = 1;
  for (int i = 0; i < cols; ++i)
    if (k.col(i).sum() == 0) k(uniform_int(rng, 0, rows - 1), i) = 1;
  return k;
}

inline Bimodule bimodule(Rng& rng, const TracialAlgebra& src, const TracialAlgebra& tgt, int max_k = 2) {
  return Bimodule(src, tgt, multiplicities(rng, tgt.size(), src.size(), max_k));
}

inline Bimodule bimodule(Rng& rng, int max_blocks = 3, int max_size = 3, int max_k = 2) {
  TracialAlgebra a = algebra(rng, max_blocks, max_size);
  TracialAlgebra b = algebra(rng, max_blocks, max_size);
  return bimodule(rng, a, b, max_k);
}

// Mostly zero: one guaranteed entry plus each other entry with probability 1/4.
inline Bimodule sparse_bimodule(Rng& rng, const TracialAlgebra& src, const TracialAlgebra& tgt) {
  IMat k = IMat::Zero(tgt.size(), src.size());
  k(uniform_int(rng, 0, tgt.size() - 1), uniform_int(rng, 0, src.size() - 1)) = 1;
  for (int j = 0; j < tgt.size(); ++j)
    for (int i = 0; i < src.size(); ++i)
      if (uniform_int(rng, 0, 3) == 0) k(j, i) = 1;
  return Bimodule(src, tgt, k);
}

// Connected bimodule: support graph is a single component.
inline Bimodule connected_bimodule(Rng& rng, const TracialAlgebra& src, const TracialAlgebra& tgt, int max_k = 2) {
  IMat k = IMat::Zero(tgt.size(), src.size());
  // spanning path through all rows and columns, then random extra entries
  int j = 0, i = 0;
  k(0, 0) = uniform_int(rng, 1, max_k);
  while (j + 1 < tgt.size() || i + 1 < src.size()) {
    if (j + 1 < tgt.size() && (i + 1 >= src.size() || uniform_int(rng, 0, 1))) ++j;
    else ++i;
    k(j, i) = uniform_int(rng, 1, max_k);
  }
  for (int a = 0; a < tgt.size(); ++a)
    for (int b = 0; b < src.size(); ++b)
      if (k(a, b) == 0 && uniform_int(rng, 0, 2) == 0) k(a, b) = uniform_int(rng, 1, max_k);
  return Bimodule(src, tgt, k);
}

}  // namespace gen
