#include "bimcalc/convex.hpp"

#include <cmath>
#include <limits>

namespace bimcalc {

namespace {

struct Lse {
  double value;
  RVec grad;  // over y
  RMat hess;
};

Lse evaluate(const LseConstraint& c, const RVec& y, bool second) {
  const int n = static_cast<int>(y.size());
  std::vector<double> e(c.terms.size());
  double top = -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < c.terms.size(); ++k) {
    double v = std::log(c.terms[k].coef);
    for (auto [idx, w] : c.terms[k].lin) v += w * y(idx);
    e[k] = v;
    top = std::max(top, v);
  }
  double sum = 0;
  for (double& v : e) {
    v = std::exp(v - top);
    sum += v;
  }
  Lse out{top + std::log(sum), RVec::Zero(n), RMat()};
  std::vector<RVec> dirs;
  for (size_t k = 0; k < c.terms.size(); ++k) {
    const double p = e[k] / sum;
    RVec a = RVec::Zero(n);
    for (auto [idx, w] : c.terms[k].lin) a(idx) += w;
    out.grad += p * a;
    if (second) dirs.push_back(a);
  }
  if (second) {
    out.hess = RMat::Zero(n, n);
    for (size_t k = 0; k < c.terms.size(); ++k) out.hess += (e[k] / sum) * dirs[k] * dirs[k].transpose();
    out.hess -= out.grad * out.grad.transpose();
  }
  return out;
}

}  // namespace

LseResult minimize_lse_program(const LseProgram& prog, double gap) {
  const int n = prog.num_vars, g = prog.num_groups, dim = n + g;
  const int m = static_cast<int>(prog.constraints.size());
  require(m > 0 && g > 0, ErrorKind::Precondition, "empty geometric program");

  RVec x = RVec::Zero(dim);
  x.tail(g).setConstant(-std::numeric_limits<double>::infinity());
  for (const auto& c : prog.constraints)
    x(n + c.group) = std::max(x(n + c.group), evaluate(c, RVec::Zero(n), false).value + 1.0);
  for (int k = 0; k < g; ++k)
    if (!std::isfinite(x(n + k))) x(n + k) = 0;

  auto barrier = [&](const RVec& z, double t, bool& feasible) {
    double f = t * z.tail(g).sum();
    feasible = true;
    for (const auto& c : prog.constraints) {
      double h = z(n + c.group) - evaluate(c, z.head(n), false).value;
      if (h <= 0) {
        feasible = false;
        return 0.0;
      }
      f -= std::log(h);
    }
    return f;
  };

  LseResult res;
  double t = 1.0;
  while (true) {
    for (int it = 0; it < 200; ++it) {
      RVec grad = RVec::Zero(dim);
      RMat hess = RMat::Zero(dim, dim);
      grad.tail(g).setConstant(t);
      for (const auto& c : prog.constraints) {
        Lse l = evaluate(c, x.head(n), true);
        const double h = x(n + c.group) - l.value;
        RVec dh = RVec::Zero(dim);
        dh.head(n) = -l.grad;
        dh(n + c.group) = 1.0;
        grad -= dh / h;
        hess += dh * dh.transpose() / (h * h);
        hess.topLeftCorner(n, n) += l.hess / h;
      }
      // the program is invariant along shift directions; a tiny ridge keeps the solve regular
      hess.diagonal().array() += 1e-12 * std::max(1.0, hess.diagonal().maxCoeff());
      RVec step = -hess.ldlt().solve(grad);
      const double dec = -grad.dot(step);
      ++res.newton_steps;
      if (dec / 2 < 1e-14) break;
      bool feas = false;
      const double f0 = barrier(x, t, feas);
      double s = 1.0;
      for (int ls = 0; ls < 60; ++ls, s *= 0.5) {
        double f1 = barrier(x + s * step, t, feas);
        if (feas && f1 <= f0 - 0.25 * s * dec) break;
      }
      x += s * step;
    }
    if (m / t < gap) break;
    t *= 10.0;
  }
  res.y = x.head(n);
  res.s = x.tail(g);
  res.objective = res.s.sum();
  return res;
}

}  // namespace bimcalc
