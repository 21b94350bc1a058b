#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvpd/common.hpp"
#include "mvpd/market.hpp"
#include "mvpd/solver.hpp"
#include "mvpd/theory.hpp"

namespace mvpd {

enum class SweepKind { PrimalOverR, DualOverEps };

/// A configuration-average experiment: evaluate every grid point on each of
/// n_samples independently drawn market realizations, then average.
struct SweepSpec {
  SweepKind kind = SweepKind::PrimalOverR;
  std::vector<double> grid;  // R values or eps' values, strictly increasing
  int n_samples = 100;
  MarketParams params;
  DualBranch branch = DualBranch::Maximize;  // used by DualOverEps only

  void validate() const;
};

/// Per-grid-point sample statistics. `primary` is the minimal risk for
/// primal sweeps and the extremal expected return for dual sweeps. Standard
/// errors are sample standard deviation / sqrt(n_ok).
struct PointStats {
  double x_value = 0.0;
  double mean_primary = 0.0;
  double se_primary = 0.0;
  double mean_qw = 0.0;
  double se_qw = 0.0;
  double mean_sharpe = 0.0;
  double se_sharpe = 0.0;
  int n_ok = 0;
  int n_failed = 0;
};

struct SweepProvenance {
  std::uint64_t master_seed = 0;
  MarketParams params;
  double wall_time_seconds = 0.0;
};

/// Sweep output: statistics plus the matching closed-form curves. Theory
/// entries are NaN-filled where the closed form is infeasible (e.g. the
/// annealed dual below its minimum risk, or any annealed value on a
/// Minimize-branch sweep, which has no annealed counterpart).
struct SweepResult {
  SweepKind kind = SweepKind::PrimalOverR;
  DualBranch branch = DualBranch::Maximize;
  std::vector<PointStats> per_point;
  std::vector<TheoryPoint> theory_quenched;
  std::vector<TheoryPoint> theory_annealed;
  SweepProvenance provenance;
};

/// Runs the sweep with sample-level OpenMP parallelism. Per-sample solver
/// failures (infeasible risk level, degenerate mean vector, singular Wishart
/// matrix) increment n_failed at the affected points; any point left with
/// n_ok < 2 aborts with "insufficient valid samples". Results are
/// bit-identical for a fixed master seed regardless of thread count:
/// per-sample values are pure functions of (master_seed, sample_index) and
/// aggregation runs in sample order after the parallel region.
SweepResult run_sweep(const SweepSpec& spec);

/// Same computation on a plain serial loop; reference for the parallel path
/// and the baseline of the benchmark tool. Output is bit-identical to
/// run_sweep.
SweepResult run_sweep_serial(const SweepSpec& spec);

/// Round-trip check of the primal-dual structure on one sample: solve the
/// primal at R, feed the attained risk to the dual (Maximize branch at and
/// above the minimum-variance return b/a, Minimize below), and report how
/// far the recovered return and portfolio are from the primal ones.
struct DualityRecord {
  double target_return = 0.0;
  double return_residual = 0.0;     // |r_extremal - R|
  double portfolio_residual = 0.0;  // max-norm portfolio difference
};
std::vector<DualityRecord> duality_audit(const MarketSample& sample,
                                         const std::vector<double>& return_grid);

/// Independent primal oracle: eliminates the two equality constraints by
/// pivoting on the extreme entries of the mean vector, reduces to an
/// unconstrained positive-definite quadratic in N-2 variables, and solves
/// its normal equations by dense Gaussian elimination with partial pivoting.
/// Shares nothing with solve_primal except matrix multiplication. Intended
/// for small instances (N up to ~50).
/// Throws SolveError("ill-conditioned elimination") when the pivot pair is
/// numerically dependent (mean vector proportional to ones).
PrimalSolution qp_oracle(const MarketSample& sample, double target_return);

/// Per-point z-scores of a sweep against its quenched theory curve. A point
/// statistic passes when |z| <= 3 or its relative error is within 2%; the
/// overall verdict needs at least 90% of the compared statistics passing.
struct ComparisonEntry {
  double x_value = 0.0;
  std::string stat;
  double z_score = 0.0;
  double rel_error = 0.0;
  bool pass = false;
};
struct ComparisonReport {
  std::vector<ComparisonEntry> entries;
  double pass_fraction = 0.0;
  bool pass = false;
};
ComparisonReport compare_with_theory(const SweepResult& result);

}  // namespace mvpd
