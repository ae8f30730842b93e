#pragma once

#include <string>
#include <vector>

#include "remlab/cost_model.hpp"
#include "remlab/trace.hpp"

namespace remlab {

/// Overhead budget: the remoting cost must stay within epsilon_fraction of
/// the local baseline.
struct Budget {
  double epsilon_fraction = 0.05;  // in (0, 1]
  double baseline_us = 0;          // > 0

  double epsilon_us() const { return epsilon_fraction * baseline_us; }
  void validate() const;
};

/// Search domain; candidates strictly increasing.
struct Grid {
  std::vector<double> rtts_us;
  std::vector<double> bandwidths_bytes_per_us;

  void validate() const;
  static Grid default_grid();  // RTT {1,5,10,20,50,100} us x BW {1,10,40,100,200} Gbps
};

struct GridPoint {
  double rtt_us = 0;
  double bandwidth_bytes_per_us = 0;
  double total_cost_us = 0;
  bool satisfied = false;
};

/// All evaluated grid points plus the Pareto-minimal satisfying set
/// (loosest network first: maximal rtt, minimal bandwidth).
struct RequirementFrontier {
  std::vector<GridPoint> points;    // row-major: rtt outer, bandwidth inner
  std::vector<GridPoint> frontier;  // empty + diagnostic when nothing satisfies
  std::string diagnostic;

  const GridPoint* find(double rtt_us, double bandwidth_bytes_per_us) const;
};

/// Evaluates total_cost at every grid point with the given start overhead
/// and returns the satisfaction matrix and Pareto frontier.
RequirementFrontier derive_requirements(const Trace& trace, const Budget& budget,
                                        const Grid& grid, double start_us = 0);

/// Analytic d(total_cost)/d(rtt) = n_async/2 + n_sync; bandwidth does not
/// enter the derivative but is kept for finite-difference cross-checks.
double rtt_slope(const Trace& trace, double bandwidth_bytes_per_us);

/// Full-grid degradation matrix, rows following grid.rtts_us and columns
/// grid.bandwidths_bytes_per_us.
std::vector<std::vector<double>> sweep(const Trace& trace, const Grid& grid,
                                       double baseline_us, double start_us = 0);

}  // namespace remlab
