#include "mvpd/solver.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace mvpd {

namespace {

void require_nondegenerate(const ProjectionScalars& s) {
  if (s.degenerate()) {
    throw SolveError("degenerate mean vector");
  }
}

PrimalSolution primal_at(const ProjectionBasis& basis, double target_return) {
  const ProjectionScalars& s = basis.scalars;
  require_nondegenerate(s);

  const double r = target_return;
  PrimalSolution sol;
  sol.k = (s.c - s.b * r) / s.d_discriminant;
  sol.theta = (s.a * r - s.b) / s.d_discriminant;
  sol.portfolio = sol.k * basis.j_inv_ones + sol.theta * basis.j_inv_means;
  sol.epsilon = 0.5 * (sol.k + r * sol.theta);
  sol.q_w = sol.portfolio.squaredNorm() / static_cast<double>(sol.portfolio.size());
  sol.sharpe = r / std::sqrt(2.0 * sol.epsilon);
  return sol;
}

}  // namespace

ProjectionBasis projection_basis(const MarketSample& sample) {
  const Eigen::MatrixXd j = wishart_matrix(sample);
  Eigen::LLT<Eigen::MatrixXd> llt(j);
  if (llt.info() != Eigen::Success) {
    throw SolveError("singular Wishart matrix");
  }

  const Eigen::Index n = j.rows();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  ProjectionBasis basis;
  basis.j_inv_ones = detail::checked_solve(llt, j, ones);
  basis.j_inv_means = detail::checked_solve(llt, j, sample.means);

  const double inv_n = 1.0 / static_cast<double>(n);
  ProjectionScalars& s = basis.scalars;
  s.a = inv_n * ones.dot(basis.j_inv_ones);
  s.b = inv_n * sample.means.dot(basis.j_inv_ones);
  s.c = inv_n * sample.means.dot(basis.j_inv_means);
  s.d_discriminant = s.a * s.c - s.b * s.b;
  if (!(s.a > 0.0) || !(s.c > 0.0)) {
    throw SolveError("singular Wishart matrix");
  }
  return basis;
}

ProjectionScalars projection_scalars(const MarketSample& sample) {
  return projection_basis(sample).scalars;
}

PrimalSolution solve_primal(const ProjectionBasis& basis, double target_return) {
  return primal_at(basis, target_return);
}

PrimalSolution solve_primal(const MarketSample& sample, double target_return) {
  return primal_at(projection_basis(sample), target_return);
}

DualSolution solve_dual(const ProjectionBasis& basis, double target_risk,
                        DualBranch branch) {
  const ProjectionScalars& s = basis.scalars;
  require_nondegenerate(s);

  double radicand = 2.0 * target_risk * s.a - 1.0;
  if (radicand < -1e-12) {
    throw SolveError("infeasible risk level");
  }
  if (radicand < 0.0) {
    radicand = 0.0;  // rounding at the minimum-variance boundary
  }

  const double sign = (branch == DualBranch::Maximize) ? 1.0 : -1.0;
  const double sqrt_d = std::sqrt(s.d_discriminant);
  const double root = std::sqrt(radicand);

  DualSolution sol;
  sol.branch = branch;
  sol.r_extremal = s.b / s.a + sign * sqrt_d * root / s.a;

  // w = (k/theta) J^-1 e + (1/theta) J^-1 r, written through u = 1/theta so
  // the boundary limit u -> 0 stays finite.
  const double u = sign * root / sqrt_d;
  sol.portfolio = ((1.0 - s.b * u) / s.a) * basis.j_inv_ones + u * basis.j_inv_means;
  sol.theta = (u != 0.0) ? 1.0 / u
                         : sign * std::numeric_limits<double>::infinity();
  sol.k = (sol.theta - s.b) / s.a;
  sol.q_w = sol.portfolio.squaredNorm() / static_cast<double>(sol.portfolio.size());
  sol.sharpe = sol.r_extremal / std::sqrt(2.0 * target_risk);
  return sol;
}

DualSolution solve_dual(const MarketSample& sample, double target_risk,
                        DualBranch branch) {
  return solve_dual(projection_basis(sample), target_risk, branch);
}

std::vector<PrimalSolution> efficient_frontier(const MarketSample& sample,
                                               const std::vector<double>& return_grid) {
  const ProjectionBasis basis = projection_basis(sample);
  std::vector<PrimalSolution> frontier;
  frontier.reserve(return_grid.size());
  for (double r : return_grid) {
    frontier.push_back(primal_at(basis, r));
  }
  return frontier;
}

}  // namespace mvpd
