#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "mvpd/common.hpp"

namespace mvpd {

enum class Distribution { Gaussian, UniformMatchedMoments };

/// Generative description of the random market ensemble: N assets, p return
/// scenarios per asset, and the first two moments of the centered return
/// rates and of the per-asset mean returns. Only moments are pinned; the
/// distribution shape is selectable (results depend on moments alone).
struct MarketParams {
  int n_assets = 250;
  int n_scenarios = 750;
  double return_variance = 1.0;    // variance of a centered return rate entry
  double mean_of_means = 1.0;      // mean of the per-asset expected returns
  double variance_of_means = 1.0;  // variance of the per-asset expected returns
  Distribution return_dist = Distribution::Gaussian;
  Distribution mean_dist = Distribution::Gaussian;
  std::uint64_t master_seed = 42;

  /// Scenario ratio p/N; every closed form below requires it to exceed 1.
  double scenario_ratio() const {
    return static_cast<double>(n_scenarios) / static_cast<double>(n_assets);
  }

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

/// One disorder realization. `x_scaled` holds the centered return rates
/// already divided by sqrt(N), so downstream code works directly with the
/// scaled return-rate matrix and its Wishart matrix J = X X^T.
struct MarketSample {
  Eigen::MatrixXd x_scaled;  // n_assets x n_scenarios
  Eigen::VectorXd means;     // length n_assets
  std::int64_t sample_index = 0;
};

/// Draws sample `sample_index` of the ensemble.
///
/// Reproducibility contract: the generator state is derived from
/// (master_seed, sample_index) by a counter scheme, so any subset of samples
/// can be generated in any order (or concurrently) and a given index always
/// yields a bit-identical sample. Within one sample the draw order is fixed:
/// the means vector first, then the return matrix column by column, each
/// variate consuming a fixed number of engine outputs.
MarketSample sample_market(const MarketParams& params, std::int64_t sample_index);

/// J = X X^T for the sample's scaled return matrix.
Eigen::MatrixXd wishart_matrix(const MarketSample& sample);

/// Solves J y = v for each right-hand side through one shared
/// positive-definite factorization; the inverse is never formed. Every
/// returned solution satisfies ||J y - v|| <= 1e-10 ||v||.
/// Throws SolveError("singular Wishart matrix") if the factorization fails
/// or cannot reach that residual.
std::vector<Eigen::VectorXd> wishart_apply_inverse(
    const MarketSample& sample, const std::vector<Eigen::VectorXd>& vectors);

namespace detail {

/// Solve J y = v from an existing factorization, enforcing the 1e-10
/// relative residual contract (one refinement pass, then SolveError).
Eigen::VectorXd checked_solve(const Eigen::LLT<Eigen::MatrixXd>& llt,
                              const Eigen::MatrixXd& j, const Eigen::VectorXd& v);

}  // namespace detail

}  // namespace mvpd
