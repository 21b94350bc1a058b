#include "mvpd/theory.hpp"

#include <cmath>

namespace mvpd {

void EnsembleMoments::validate() const {
  if (!(alpha > 1.0)) {
    throw std::invalid_argument("invalid scenario ratio (alpha must exceed 1)");
  }
  if (!(return_variance > 0.0)) {
    throw std::invalid_argument("return_variance must be positive");
  }
  if (!(variance_of_means > 0.0)) {
    throw std::invalid_argument("variance_of_means must be positive");
  }
  if (!std::isfinite(mean_of_means)) {
    throw std::invalid_argument("mean_of_means must be finite");
  }
}

EnsembleMoments EnsembleMoments::from_params(const MarketParams& params) {
  params.validate();
  EnsembleMoments m;
  m.alpha = params.scenario_ratio();
  m.return_variance = params.return_variance;
  m.mean_of_means = params.mean_of_means;
  m.variance_of_means = params.variance_of_means;
  return m;
}

// At finite inverse temperature the quenched risk carries an extra 1/(2 beta)
// term, eps(beta) = 1/(2 beta) + sd^2 (alpha-1)/2 (1 + (R-m)^2/s^2), with
// susceptibility chi_w = 1/(beta sd^2 (alpha-1)). Only the beta -> infinity
// endpoint is exposed here; q_w is already temperature-free.
TheoryPoint quenched_primal(const EnsembleMoments& moments, double target_return) {
  moments.validate();
  const double excess = target_return - moments.mean_of_means;
  const double shape = 1.0 + excess * excess / moments.variance_of_means;

  TheoryPoint pt;
  pt.regime = TheoryRegime::Quenched;
  pt.x_value = target_return;
  pt.epsilon_or_return = 0.5 * moments.return_variance * (moments.alpha - 1.0) * shape;
  pt.q_w = moments.alpha / (moments.alpha - 1.0) * shape;
  pt.sharpe = target_return / std::sqrt(2.0 * pt.epsilon_or_return);
  return pt;
}

TheoryPoint quenched_dual(const EnsembleMoments& moments, double eps_prime,
                          DualBranch branch) {
  moments.validate();
  const double min_risk = 0.5 * moments.return_variance * (moments.alpha - 1.0);
  const double ratio = eps_prime / min_risk;  // 2 eps' / (sd^2 (alpha - 1))
  if (ratio < 1.0) {
    throw SolveError("infeasible risk level");
  }

  const double sign = (branch == DualBranch::Maximize) ? 1.0 : -1.0;
  TheoryPoint pt;
  pt.regime = TheoryRegime::Quenched;
  pt.x_value = eps_prime;
  pt.epsilon_or_return = moments.mean_of_means +
      sign * std::sqrt(moments.variance_of_means) * std::sqrt(ratio - 1.0);
  pt.q_w = moments.alpha / (moments.alpha - 1.0) * ratio;
  pt.sharpe = pt.epsilon_or_return / std::sqrt(2.0 * eps_prime);
  return pt;
}

TheoryPoint annealed_primal(const EnsembleMoments& moments, double target_return) {
  moments.validate();
  const double excess = target_return - moments.mean_of_means;
  const double shape = 1.0 + excess * excess / moments.variance_of_means;

  TheoryPoint pt;
  pt.regime = TheoryRegime::Annealed;
  pt.x_value = target_return;
  pt.epsilon_or_return = 0.5 * moments.return_variance * moments.alpha * shape;
  pt.q_w = shape;
  pt.sharpe = target_return / std::sqrt(2.0 * pt.epsilon_or_return);
  return pt;
}

TheoryPoint annealed_dual(const EnsembleMoments& moments, double eps_prime) {
  moments.validate();
  const double ratio = 2.0 * eps_prime / (moments.return_variance * moments.alpha);
  if (ratio < 1.0) {
    throw SolveError("infeasible risk level");
  }

  TheoryPoint pt;
  pt.regime = TheoryRegime::Annealed;
  pt.x_value = eps_prime;
  pt.epsilon_or_return = moments.mean_of_means +
      std::sqrt(moments.variance_of_means) * std::sqrt(ratio - 1.0);
  pt.q_w = ratio;
  pt.sharpe = pt.epsilon_or_return / std::sqrt(2.0 * eps_prime);
  return pt;
}

MaxSharpePoint max_sharpe(const EnsembleMoments& moments) {
  moments.validate();
  const double m = moments.mean_of_means;
  if (m == 0.0) {
    throw SolveError("undefined tangency (mean_of_means is zero)");
  }
  const double s2 = moments.variance_of_means;

  MaxSharpePoint pt;
  pt.s_max = std::sqrt(m * m + s2) /
             std::sqrt(moments.return_variance * (moments.alpha - 1.0));
  pt.r_star = m + s2 / m;
  pt.eps_star = 0.5 * moments.return_variance * (moments.alpha - 1.0) * (1.0 + s2 / (m * m));
  return pt;
}

}  // namespace mvpd
