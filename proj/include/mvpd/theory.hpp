#pragma once

#include "mvpd/common.hpp"
#include "mvpd/market.hpp"

namespace mvpd {

/// The four ensemble moments the large-N closed forms depend on. Everything
/// else about the market distributions drops out in the limit.
struct EnsembleMoments {
  double alpha = 3.0;             // scenario ratio p/N, must exceed 1
  double return_variance = 1.0;   // variance of a centered return rate
  double mean_of_means = 1.0;     // mean of the per-asset expected returns
  double variance_of_means = 1.0; // variance of the per-asset expected returns

  void validate() const;
  static EnsembleMoments from_params(const MarketParams& params);
};

enum class TheoryRegime { Quenched, Annealed };

/// One point of a closed-form curve. `epsilon_or_return` is the minimal risk
/// for primal curves and the extremal expected return for dual curves.
struct TheoryPoint {
  double x_value = 0.0;
  double epsilon_or_return = 0.0;
  double q_w = 0.0;
  double sharpe = 0.0;
  TheoryRegime regime = TheoryRegime::Quenched;
};

/// Tangency point of the quenched frontier.
struct MaxSharpePoint {
  double s_max = 0.0;    // sqrt(m^2 + s^2) / (sd sqrt(alpha - 1))
  double r_star = 0.0;   // m + s^2 / m
  double eps_star = 0.0; // risk attained at r_star
};

/// Quenched (typical single-realization) minimal risk at expected return R:
///   eps  = sd^2 (alpha - 1)/2 * (1 + (R - m)^2 / s^2)
///   q_w  = alpha/(alpha - 1) * (1 + (R - m)^2 / s^2)
///   S    = R / sqrt(2 eps)
/// where sd^2 is the return variance, m and s^2 the moments of the means.
TheoryPoint quenched_primal(const EnsembleMoments& moments, double target_return);

/// Quenched extremal expected return at risk level eps':
///   R'   = m +- s sqrt(2 eps' / (sd^2 (alpha - 1)) - 1)   (branch sign)
///   q_w  = alpha/(alpha - 1) * 2 eps' / (sd^2 (alpha - 1))
///   S    = R' / sqrt(2 eps')
/// Throws SolveError("infeasible risk level") below the minimum-variance
/// risk sd^2 (alpha - 1)/2.
TheoryPoint quenched_dual(const EnsembleMoments& moments, double eps_prime,
                          DualBranch branch);

/// Annealed (optimize-the-average) counterparts:
///   eps_OR = sd^2 alpha / 2 * (1 + (R - m)^2 / s^2),
///   q_w_OR = 1 + (R - m)^2 / s^2.
/// Always strictly above the quenched risk: eps_OR / eps = alpha/(alpha-1).
TheoryPoint annealed_primal(const EnsembleMoments& moments, double target_return);

/// Annealed dual (maximize branch only):
///   R'_OR  = m + s sqrt(2 eps' / (sd^2 alpha) - 1),
///   q_w_OR = 2 eps' / (sd^2 alpha).
/// Feasible only for eps' >= sd^2 alpha / 2.
TheoryPoint annealed_dual(const EnsembleMoments& moments, double eps_prime);

/// Maximum Sharpe ratio and where it is attained, identical whether the
/// frontier is swept over returns or over risk levels.
/// Throws SolveError("undefined tangency") when m = 0.
MaxSharpePoint max_sharpe(const EnsembleMoments& moments);

}  // namespace mvpd
