#include "mvpd/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace mvpd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Values of one sample across the whole grid; ok[i] == 0 marks a recorded
// solver failure at grid point i.
struct SampleRow {
  std::vector<double> primary;
  std::vector<double> qw;
  std::vector<double> sharpe;
  std::vector<unsigned char> ok;

  explicit SampleRow(std::size_t n_points)
      : primary(n_points, kNaN), qw(n_points, kNaN), sharpe(n_points, kNaN),
        ok(n_points, 0) {}
};

SampleRow evaluate_sample(const SweepSpec& spec, int sample_index) {
  SampleRow row(spec.grid.size());
  const MarketSample sample = sample_market(spec.params, sample_index);

  ProjectionBasis basis;
  try {
    basis = projection_basis(sample);
  } catch (const SolveError&) {
    return row;  // whole sample unusable, every point recorded as failed
  }

  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    try {
      if (spec.kind == SweepKind::PrimalOverR) {
        const PrimalSolution sol = solve_primal(basis, spec.grid[i]);
        row.primary[i] = sol.epsilon;
        row.qw[i] = sol.q_w;
        row.sharpe[i] = sol.sharpe;
      } else {
        const DualSolution sol = solve_dual(basis, spec.grid[i], spec.branch);
        row.primary[i] = sol.r_extremal;
        row.qw[i] = sol.q_w;
        row.sharpe[i] = sol.sharpe;
      }
      row.ok[i] = 1;
    } catch (const SolveError&) {
      row.ok[i] = 0;
    }
  }
  return row;
}

// Mean and standard error in fixed sample order so results do not depend on
// the schedule that produced the rows.
void aggregate(const std::vector<SampleRow>& rows, std::size_t point,
               const std::vector<double>& SampleRow::*field, double& mean, double& se,
               int& n_ok) {
  n_ok = 0;
  double sum = 0.0;
  for (const SampleRow& row : rows) {
    if (row.ok[point]) {
      sum += (row.*field)[point];
      ++n_ok;
    }
  }
  mean = sum / n_ok;
  double ssd = 0.0;
  for (const SampleRow& row : rows) {
    if (row.ok[point]) {
      const double d = (row.*field)[point] - mean;
      ssd += d * d;
    }
  }
  se = std::sqrt(ssd / (n_ok - 1)) / std::sqrt(static_cast<double>(n_ok));
}

TheoryPoint nan_point(double x, TheoryRegime regime) {
  TheoryPoint pt;
  pt.x_value = x;
  pt.epsilon_or_return = kNaN;
  pt.q_w = kNaN;
  pt.sharpe = kNaN;
  pt.regime = regime;
  return pt;
}

void attach_theory(const SweepSpec& spec, SweepResult& result) {
  const EnsembleMoments moments = EnsembleMoments::from_params(spec.params);
  for (double x : spec.grid) {
    if (spec.kind == SweepKind::PrimalOverR) {
      result.theory_quenched.push_back(quenched_primal(moments, x));
      result.theory_annealed.push_back(annealed_primal(moments, x));
    } else {
      try {
        result.theory_quenched.push_back(quenched_dual(moments, x, spec.branch));
      } catch (const SolveError&) {
        result.theory_quenched.push_back(nan_point(x, TheoryRegime::Quenched));
      }
      if (spec.branch == DualBranch::Maximize) {
        try {
          result.theory_annealed.push_back(annealed_dual(moments, x));
        } catch (const SolveError&) {
          result.theory_annealed.push_back(nan_point(x, TheoryRegime::Annealed));
        }
      } else {
        result.theory_annealed.push_back(nan_point(x, TheoryRegime::Annealed));
      }
    }
  }
}

SweepResult run_sweep_impl(const SweepSpec& spec, bool parallel) {
  spec.validate();
  const int n_samples = spec.n_samples;
  const std::size_t n_points = spec.grid.size();

  const auto t0 = std::chrono::steady_clock::now();

  std::vector<SampleRow> rows(n_samples, SampleRow(n_points));
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int c = 0; c < n_samples; ++c) {
      rows[c] = evaluate_sample(spec, c);
    }
  } else {
    for (int c = 0; c < n_samples; ++c) {
      rows[c] = evaluate_sample(spec, c);
    }
  }

  SweepResult result;
  result.kind = spec.kind;
  result.branch = spec.branch;
  result.per_point.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    PointStats& pt = result.per_point[i];
    pt.x_value = spec.grid[i];
    aggregate(rows, i, &SampleRow::primary, pt.mean_primary, pt.se_primary, pt.n_ok);
    if (pt.n_ok < 2) {
      throw std::runtime_error("insufficient valid samples at grid point " +
                               std::to_string(spec.grid[i]));
    }
    int n_ok_unused = 0;
    aggregate(rows, i, &SampleRow::qw, pt.mean_qw, pt.se_qw, n_ok_unused);
    aggregate(rows, i, &SampleRow::sharpe, pt.mean_sharpe, pt.se_sharpe, n_ok_unused);
    pt.n_failed = n_samples - pt.n_ok;
  }

  attach_theory(spec, result);

  result.provenance.master_seed = spec.params.master_seed;
  result.provenance.params = spec.params;
  result.provenance.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace

void SweepSpec::validate() const {
  params.validate();
  if (grid.empty()) {
    throw std::invalid_argument("grid must be non-empty");
  }
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (!(grid[i] < grid[i + 1])) {
      throw std::invalid_argument("grid must be strictly increasing");
    }
  }
  if (n_samples < 2) {
    throw std::invalid_argument("n_samples must be at least 2");
  }
}

SweepResult run_sweep(const SweepSpec& spec) { return run_sweep_impl(spec, true); }

SweepResult run_sweep_serial(const SweepSpec& spec) {
  return run_sweep_impl(spec, false);
}

std::vector<DualityRecord> duality_audit(const MarketSample& sample,
                                         const std::vector<double>& return_grid) {
  const ProjectionBasis basis = projection_basis(sample);
  const double vertex_return = basis.scalars.min_variance_return();

  std::vector<DualityRecord> records;
  records.reserve(return_grid.size());
  for (double r : return_grid) {
    const PrimalSolution primal = solve_primal(basis, r);
    const DualBranch branch =
        (r >= vertex_return) ? DualBranch::Maximize : DualBranch::Minimize;
    const DualSolution dual = solve_dual(basis, primal.epsilon, branch);

    DualityRecord rec;
    rec.target_return = r;
    rec.return_residual = std::abs(dual.r_extremal - r);
    rec.portfolio_residual =
        (dual.portfolio - primal.portfolio).lpNorm<Eigen::Infinity>();
    records.push_back(rec);
  }
  return records;
}

namespace {

// Dense Gaussian elimination with partial pivoting on a row-major square
// matrix; the oracle's only linear solver.
std::vector<double> gauss_solve(std::vector<double> m, std::vector<double> rhs,
                                int n) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(m[col * n + col]);
    for (int row = col + 1; row < n; ++row) {
      const double cand = std::abs(m[row * n + col]);
      if (cand > best) {
        best = cand;
        pivot = row;
      }
    }
    if (best == 0.0) {
      throw SolveError("ill-conditioned elimination");
    }
    if (pivot != col) {
      for (int j = col; j < n; ++j) {
        std::swap(m[col * n + j], m[pivot * n + j]);
      }
      std::swap(rhs[col], rhs[pivot]);
    }
    for (int row = col + 1; row < n; ++row) {
      const double f = m[row * n + col] / m[col * n + col];
      if (f == 0.0) {
        continue;
      }
      for (int j = col; j < n; ++j) {
        m[row * n + j] -= f * m[col * n + j];
      }
      rhs[row] -= f * rhs[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (int row = n - 1; row >= 0; --row) {
    double acc = rhs[row];
    for (int j = row + 1; j < n; ++j) {
      acc -= m[row * n + j] * x[j];
    }
    x[row] = acc / m[row * n + row];
  }
  return x;
}

}  // namespace

PrimalSolution qp_oracle(const MarketSample& sample, double target_return) {
  const int n = static_cast<int>(sample.x_scaled.rows());
  if (n < 3) {
    throw std::invalid_argument("qp_oracle requires at least 3 assets");
  }
  const Eigen::VectorXd& r = sample.means;

  // Pivot pair: the extreme mean entries, maximizing the |r_i - r_j| spread.
  int i_lo = 0;
  int i_hi = 0;
  for (int i = 1; i < n; ++i) {
    if (r[i] < r[i_lo]) i_lo = i;
    if (r[i] > r[i_hi]) i_hi = i;
  }
  const double det = r[i_hi] - r[i_lo];
  const double scale = std::max({1.0, std::abs(r[i_lo]), std::abs(r[i_hi])});
  if (std::abs(det) <= 1e-12 * scale) {
    throw SolveError("ill-conditioned elimination");
  }

  // Constraints e^T w = N, r^T w = N R pin the pivot coordinates:
  //   w[i_lo] = u0 + sum_f m0(f) w_f,  w[i_hi] = u1 + sum_f m1(f) w_f,
  // with the 2x2 block [[1, 1], [r_lo, r_hi]] inverted by hand.
  const double nd = static_cast<double>(n);
  const double u0 = (r[i_hi] * nd - nd * target_return) / det;
  const double u1 = (nd * target_return - r[i_lo] * nd) / det;

  std::vector<int> free_idx;
  free_idx.reserve(n - 2);
  for (int i = 0; i < n; ++i) {
    if (i != i_lo && i != i_hi) {
      free_idx.push_back(i);
    }
  }
  const int n_free = static_cast<int>(free_idx.size());

  // w = T z + s over the free coordinates z.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n_free);
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(n);
  shift[i_lo] = u0;
  shift[i_hi] = u1;
  for (int f = 0; f < n_free; ++f) {
    const int g = free_idx[f];
    t(g, f) = 1.0;
    t(i_lo, f) = -(r[i_hi] - r[g]) / det;
    t(i_hi, f) = -(r[g] - r[i_lo]) / det;
  }

  const Eigen::MatrixXd j = wishart_matrix(sample);
  const Eigen::MatrixXd h = t.transpose() * j * t;
  const Eigen::VectorXd rhs = -t.transpose() * (j * shift);

  std::vector<double> h_flat(static_cast<std::size_t>(n_free) * n_free);
  std::vector<double> rhs_flat(n_free);
  for (int row = 0; row < n_free; ++row) {
    for (int col = 0; col < n_free; ++col) {
      h_flat[static_cast<std::size_t>(row) * n_free + col] = h(row, col);
    }
    rhs_flat[row] = rhs[row];
  }
  const std::vector<double> z = gauss_solve(std::move(h_flat), std::move(rhs_flat), n_free);

  Eigen::VectorXd w = shift;
  for (int f = 0; f < n_free; ++f) {
    w += z[f] * t.col(f);
  }

  const Eigen::VectorXd jw = j * w;
  PrimalSolution sol;
  sol.portfolio = w;
  sol.epsilon = 0.5 * w.dot(jw) / nd;
  sol.q_w = w.squaredNorm() / nd;
  sol.sharpe = target_return / std::sqrt(2.0 * sol.epsilon);
  // Multipliers recovered from stationarity J w = k e + theta r at the pivots.
  sol.theta = (jw[i_hi] - jw[i_lo]) / det;
  sol.k = jw[i_lo] - sol.theta * r[i_lo];
  return sol;
}

ComparisonReport compare_with_theory(const SweepResult& result) {
  const char* primary_name =
      (result.kind == SweepKind::PrimalOverR) ? "epsilon" : "r_prime";

  ComparisonReport report;
  int n_pass = 0;
  for (std::size_t i = 0; i < result.per_point.size(); ++i) {
    const PointStats& pt = result.per_point[i];
    const TheoryPoint& th = result.theory_quenched[i];

    const double theory_vals[3] = {th.epsilon_or_return, th.q_w, th.sharpe};
    const double means[3] = {pt.mean_primary, pt.mean_qw, pt.mean_sharpe};
    const double ses[3] = {pt.se_primary, pt.se_qw, pt.se_sharpe};
    const char* names[3] = {primary_name, "q_w", "sharpe"};

    for (int s = 0; s < 3; ++s) {
      if (!std::isfinite(theory_vals[s])) {
        continue;  // no closed form at this point, nothing to compare
      }
      ComparisonEntry entry;
      entry.x_value = pt.x_value;
      entry.stat = names[s];
      const double diff = means[s] - theory_vals[s];
      entry.z_score = (ses[s] > 0.0)
                          ? diff / ses[s]
                          : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      entry.rel_error = (theory_vals[s] != 0.0)
                            ? std::abs(diff / theory_vals[s])
                            : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      entry.pass = std::abs(entry.z_score) <= 3.0 || entry.rel_error <= 0.02;
      n_pass += entry.pass ? 1 : 0;
      report.entries.push_back(entry);
    }
  }
  report.pass_fraction =
      report.entries.empty() ? 1.0
                             : static_cast<double>(n_pass) / report.entries.size();
  report.pass = report.pass_fraction >= 0.9;
  return report;
}

}  // namespace mvpd
