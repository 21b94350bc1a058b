#include "mvpd/market.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>

namespace mvpd {

namespace {

// splitmix64 finalizer applied to a per-sample counter. Keeps sample streams
// independent of generation order.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in [0,1), 53-bit resolution, one engine output.
double uniform_01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; always consumes exactly two engine
// outputs, which pins the draw order independently of the C++ library.
double standard_normal(std::mt19937_64& eng) {
  const double u1 = static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;  // (0,1]
  const double u2 = uniform_01(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// One variate with the requested mean/variance under the requested shape.
double draw(std::mt19937_64& eng, Distribution dist, double mean, double variance) {
  if (dist == Distribution::Gaussian) {
    return mean + std::sqrt(variance) * standard_normal(eng);
  }
  // Uniform on [mean - h, mean + h] with h chosen to match the variance.
  const double half_width = std::sqrt(3.0 * variance);
  return mean + half_width * (2.0 * uniform_01(eng) - 1.0);
}

}  // namespace

void MarketParams::validate() const {
  if (n_assets <= 0) {
    throw std::invalid_argument("n_assets must be positive");
  }
  if (n_scenarios <= n_assets) {
    throw std::invalid_argument("n_scenarios must exceed n_assets");
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

MarketSample sample_market(const MarketParams& params, std::int64_t sample_index) {
  params.validate();
  if (sample_index < 0) {
    throw std::invalid_argument("sample_index must be non-negative");
  }

  const int n = params.n_assets;
  const int p = params.n_scenarios;
  std::mt19937_64 eng(mix_seed(params.master_seed, static_cast<std::uint64_t>(sample_index)));

  MarketSample sample;
  sample.sample_index = sample_index;

  sample.means.resize(n);
  for (int i = 0; i < n; ++i) {
    sample.means[i] = draw(eng, params.mean_dist, params.mean_of_means,
                           params.variance_of_means);
  }

  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  sample.x_scaled.resize(n, p);
  for (int mu = 0; mu < p; ++mu) {
    for (int i = 0; i < n; ++i) {
      sample.x_scaled(i, mu) =
          inv_sqrt_n * draw(eng, params.return_dist, 0.0, params.return_variance);
    }
  }
  return sample;
}

Eigen::MatrixXd wishart_matrix(const MarketSample& sample) {
  const Eigen::Index n = sample.x_scaled.rows();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  j.selfadjointView<Eigen::Lower>().rankUpdate(sample.x_scaled);
  j.triangularView<Eigen::StrictlyUpper>() = j.transpose();
  return j;
}

namespace detail {

// Shared solve path: factorization + residual guarantee. One refinement pass
// is attempted before declaring the matrix singular.
Eigen::VectorXd checked_solve(const Eigen::LLT<Eigen::MatrixXd>& llt,
                              const Eigen::MatrixXd& j, const Eigen::VectorXd& v) {
  Eigen::VectorXd y = llt.solve(v);
  const double v_norm = v.norm();
  const double tol = 1e-10 * (v_norm > 0.0 ? v_norm : 1.0);
  double residual = (j * y - v).norm();
  if (residual > tol) {
    y += llt.solve(v - j * y);
    residual = (j * y - v).norm();
    if (residual > tol) {
      throw SolveError("singular Wishart matrix");
    }
  }
  return y;
}

}  // namespace detail

std::vector<Eigen::VectorXd> wishart_apply_inverse(
    const MarketSample& sample, const std::vector<Eigen::VectorXd>& vectors) {
  const Eigen::MatrixXd j = wishart_matrix(sample);
  Eigen::LLT<Eigen::MatrixXd> llt(j);
  if (llt.info() != Eigen::Success) {
    throw SolveError("singular Wishart matrix");
  }
  std::vector<Eigen::VectorXd> solutions;
  solutions.reserve(vectors.size());
  for (const Eigen::VectorXd& v : vectors) {
    if (v.size() != j.rows()) {
      throw std::invalid_argument("right-hand side length mismatch");
    }
    solutions.push_back(detail::checked_solve(llt, j, v));
  }
  return solutions;
}

}  // namespace mvpd
