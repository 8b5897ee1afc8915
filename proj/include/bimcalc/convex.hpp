#pragma once

#include "bimcalc/linalg.hpp"

#include <utility>
#include <vector>

namespace bimcalc {

// Geometric program in log form:
//   minimize sum_g s_g  subject to  log sum_k coef_k exp(<a_k, y>) <= s_{group}
// for each constraint. Solved by a log-barrier Newton method.
struct LseTerm {
  double coef = 1.0;
  std::vector<std::pair<int, double>> lin;  // sparse a_k
};

struct LseConstraint {
  std::vector<LseTerm> terms;
  int group = 0;
};

struct LseProgram {
  int num_vars = 0;
  int num_groups = 0;
  std::vector<LseConstraint> constraints;
};

struct LseResult {
  RVec y;
  RVec s;
  double objective = 0;
  int newton_steps = 0;
};

LseResult minimize_lse_program(const LseProgram& prog, double gap = 1e-11);

}  // namespace bimcalc
