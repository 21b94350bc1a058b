#pragma once

#include <Eigen/Dense>

#include <vector>

#include "mvpd/common.hpp"
#include "mvpd/market.hpp"

namespace mvpd {

/// The three quadratic forms of a sample that every closed-form solution is
/// built from, normalized per asset:
///   a = e^T J^-1 e / N,  b = r^T J^-1 e / N,  c = r^T J^-1 r / N,
/// plus the discriminant D = a c - b^2 of the 2x2 multiplier system.
/// D >= 0 always (Cauchy-Schwarz in the J^-1 inner product) and D = 0 iff
/// the mean vector is proportional to the ones vector.
struct ProjectionScalars {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d_discriminant = 0.0;

  /// Relative test for r ~ e; solvers refuse degenerate samples.
  bool degenerate() const { return d_discriminant <= 1e-12 * a * c; }

  /// Expected return of the budget-only risk minimizer (parabola vertex).
  double min_variance_return() const { return b / a; }

  /// Risk of the budget-only minimizer, N / (2 e^T J^-1 e).
  double min_variance_risk() const { return 0.5 / a; }
};

/// Scalars plus the two solved vectors J^-1 e and J^-1 r. Every optimal
/// portfolio of the sample lies in their span, so one factorization and this
/// pair of solves price the entire frontier.
struct ProjectionBasis {
  ProjectionScalars scalars;
  Eigen::VectorXd j_inv_ones;   // J^-1 e
  Eigen::VectorXd j_inv_means;  // J^-1 r
};

/// Minimal-risk portfolio under budget and expected-return constraints.
struct PrimalSolution {
  double epsilon = 0.0;       // minimal investment risk per asset
  Eigen::VectorXd portfolio;  // optimal holdings, sum w_i = N
  double k = 0.0;             // budget multiplier
  double theta = 0.0;         // expected-return multiplier
  double q_w = 0.0;           // investment concentration, sum w_i^2 / N
  double sharpe = 0.0;        // R / sqrt(2 epsilon)
};

/// Extremal expected return under budget and fixed-risk constraints.
/// At the minimum-variance boundary (clamped radicand) the risk multiplier
/// diverges; k and theta are then +-infinity while the portfolio and
/// r_extremal are the finite limits.
struct DualSolution {
  double r_extremal = 0.0;  // max branch R' or min branch R''
  DualBranch branch = DualBranch::Maximize;
  Eigen::VectorXd portfolio;
  double k = 0.0;
  double theta = 0.0;
  double q_w = 0.0;
  double sharpe = 0.0;  // r_extremal / sqrt(2 eps')
};

/// Factorizes J once and solves for the two basis vectors.
/// Throws SolveError("singular Wishart matrix") when J is not positive
/// definite (e.g. fewer independent scenarios than assets).
ProjectionBasis projection_basis(const MarketSample& sample);

ProjectionScalars projection_scalars(const MarketSample& sample);

/// Exact finite-N primal solution at expected return R:
///   w = k J^-1 e + theta J^-1 r with (k, theta) from the 2x2 system
///   [[a, b], [b, c]] (k, theta)^T = (1, R)^T, and epsilon = (k + R theta)/2.
/// Throws SolveError("degenerate mean vector") when D <= 1e-12 a c.
PrimalSolution solve_primal(const ProjectionBasis& basis, double target_return);
PrimalSolution solve_primal(const MarketSample& sample, double target_return);

/// Exact finite-N dual solution at risk level eps'. The feasibility radicand
/// is s = 2 eps' a - 1; s < -1e-12 throws SolveError("infeasible risk
/// level"), s in [-1e-12, 0) is treated as the boundary. The Maximize branch
/// takes theta = +sqrt(D)/sqrt(s), Minimize the negative root, giving
///   r_extremal = b/a +- sqrt(D) sqrt(s) / a.
DualSolution solve_dual(const ProjectionBasis& basis, double target_risk,
                        DualBranch branch);
DualSolution solve_dual(const MarketSample& sample, double target_risk,
                        DualBranch branch);

/// Batched primal solves sharing one factorization; elementwise identical to
/// independent solve_primal calls.
std::vector<PrimalSolution> efficient_frontier(const MarketSample& sample,
                                               const std::vector<double>& return_grid);

}  // namespace mvpd
