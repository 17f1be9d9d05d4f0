#ifndef NLEA_SIMULATE_HPP
#define NLEA_SIMULATE_HPP

#include <functional>
#include <string>
#include <vector>

#include "nlea/polynomial.hpp"
#include "nlea/sampling.hpp"

namespace nlea {

/// Fixed-step trajectory on the uniform grid t_i = i * step. `finite` turns
/// false (and the trace is truncated) if the state leaves the representable
/// range.
struct SimTrace {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::string field_id;
  bool finite = true;

  int dim() const { return states.empty() ? 0 : static_cast<int>(states[0].size()); }
};

/// Classical fixed-step RK4. The field must be real: complex coefficient
/// residue above the pruning threshold is rejected.
SimTrace integrate(const PolyVec& field, const std::vector<double>& x0, double horizon,
                   double step, const std::string& field_id = "");

struct SimMetrics {
  double peak_norm = 0.0;
  double settling_time = 0.0;
  bool settling_defined = false;
  double final_norm = 0.0;
  bool converged = false;
};

/// Peak / settling / convergence summary. Settling time is the first grid
/// time after which the norm stays within band * |x(0)|.
SimMetrics metrics(const SimTrace& trace, double band = 0.02, double conv_tol = 1e-3);

/// Max pointwise distance between the trace at `step` and at `step / 2`,
/// compared on the coarse grid. The step-halving validation quoted alongside
/// any reported number.
double step_halving_error(const PolyVec& field, const std::vector<double>& x0, double horizon,
                          double step);

struct SweepRow {
  double parameter = 0.0;
  SimMetrics metrics;
  double validation_error = 0.0;
  bool ok = false;
  std::string error;
};

/// One metrics row per parameter value; a failing instantiation is recorded
/// and the sweep continues.
std::vector<SweepRow> sweep(const std::function<PolyVec(double)>& family,
                            const std::vector<double>& values, const std::vector<double>& x0,
                            double horizon, double step, double band = 0.02,
                            double conv_tol = 1e-3);

struct BasinReport {
  int total = 0;
  int converged = 0;
  double fraction = 0.0;
  std::vector<std::vector<double>> failed_points;
};

/// Integrate from every grid point of the box and report the converged
/// fraction; an empirical probe of the region of attraction.
BasinReport basin_probe(const PolyVec& field, const SamplingBox& box, int grid, double horizon,
                        double step, double conv_tol = 1e-3);

}  // namespace nlea

#endif  // NLEA_SIMULATE_HPP
