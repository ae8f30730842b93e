#include "remlab/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace remlab {

void Budget::validate() const {
  if (!(epsilon_fraction > 0) || epsilon_fraction > 1)
    throw std::invalid_argument("epsilon_fraction must be in (0, 1]");
  if (!(baseline_us > 0)) throw std::invalid_argument("baseline_us must be > 0");
}

void Grid::validate() const {
  if (rtts_us.empty() || bandwidths_bytes_per_us.empty())
    throw std::invalid_argument("grid axes must be nonempty");
  for (const auto* axis : {&rtts_us, &bandwidths_bytes_per_us})
    for (std::size_t i = 0; i + 1 < axis->size(); ++i)
      if (!((*axis)[i] < (*axis)[i + 1]))
        throw std::invalid_argument("grid axes must be strictly increasing");
}

Grid Grid::default_grid() {
  Grid g;
  g.rtts_us = {1, 5, 10, 20, 50, 100};
  for (double gbps : {1, 10, 40, 100, 200})
    g.bandwidths_bytes_per_us.push_back(gbps_to_bytes_per_us(gbps));
  return g;
}

const GridPoint* RequirementFrontier::find(double rtt_us, double bandwidth_bytes_per_us) const {
  for (const GridPoint& p : points)
    if (p.rtt_us == rtt_us && p.bandwidth_bytes_per_us == bandwidth_bytes_per_us) return &p;
  return nullptr;
}

RequirementFrontier derive_requirements(const Trace& trace, const Budget& budget,
                                        const Grid& grid, double start_us) {
  budget.validate();
  grid.validate();
  RequirementFrontier out;
  const double eps = budget.epsilon_us();
  for (double rtt : grid.rtts_us) {
    for (double bw : grid.bandwidths_bytes_per_us) {
      NetworkConfig net;
      net.rtt_us = rtt;
      net.bandwidth_bytes_per_us = bw;
      net.start_us = start_us;
      double cost = total_cost(trace, net).total_us;
      out.points.push_back({rtt, bw, cost, cost <= eps});
    }
  }
  // Pareto-minimal network demand: keep satisfying points not dominated by
  // another satisfying point with rtt at least as high and bandwidth at most
  // as high.
  for (const GridPoint& p : out.points) {
    if (!p.satisfied) continue;
    bool dominated = false;
    for (const GridPoint& q : out.points) {
      if (!q.satisfied || &p == &q) continue;
      bool looser = q.rtt_us >= p.rtt_us && q.bandwidth_bytes_per_us <= p.bandwidth_bytes_per_us;
      bool strict = q.rtt_us > p.rtt_us || q.bandwidth_bytes_per_us < p.bandwidth_bytes_per_us;
      if (looser && strict) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.frontier.push_back(p);
  }
  if (out.frontier.empty())
    out.diagnostic = "no grid point satisfies the budget (epsilon_us = " +
                     std::to_string(eps) + "); tighten the grid or relax the budget";
  return out;
}

double rtt_slope(const Trace& trace, double bandwidth_bytes_per_us) {
  (void)bandwidth_bytes_per_us;  // the derivative is bandwidth-independent
  double n_async = 0, n_sync = 0;
  for (const ApiCall& c : trace.calls) {
    if (c.cls == ApiClass::Async) n_async += 1;
    else if (c.cls == ApiClass::Sync) n_sync += 1;
  }
  return n_async / 2.0 + n_sync;
}

std::vector<std::vector<double>> sweep(const Trace& trace, const Grid& grid,
                                       double baseline_us, double start_us) {
  grid.validate();
  if (!(baseline_us > 0)) throw std::invalid_argument("baseline_us must be > 0");
  std::vector<std::vector<double>> matrix;
  matrix.reserve(grid.rtts_us.size());
  for (double rtt : grid.rtts_us) {
    std::vector<double> row;
    row.reserve(grid.bandwidths_bytes_per_us.size());
    for (double bw : grid.bandwidths_bytes_per_us) {
      NetworkConfig net;
      net.rtt_us = rtt;
      net.bandwidth_bytes_per_us = bw;
      net.start_us = start_us;
      row.push_back(degradation(trace, net, baseline_us));
    }
    matrix.push_back(std::move(row));
  }
  return matrix;
}

}  // namespace remlab
