#include "nlea/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace nlea {

namespace {

double norm2(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

bool all_finite(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

SimTrace integrate(const PolyVec& field, const std::vector<double>& x0, double horizon,
                   double step, const std::string& field_id) {
  if (field.dim() != field.num_vars() || static_cast<int>(x0.size()) != field.dim())
    throw DimensionError("integrate: field and initial state dimensions differ");
  if (step <= 0.0 || horizon < 0.0) throw PreconditionError("integrate: bad horizon or step");
  const double imag = [&] {
    double m = 0.0;
    for (const Polynomial& p : field.entries()) m = std::max(m, p.max_imag_modulus());
    return m;
  }();
  if (imag > Polynomial::kPruneRel * (1.0 + field.max_coeff_modulus()))
    throw PreconditionError("integrate: field has non-real coefficients");

  const int n = field.dim();
  const long steps = std::lround(horizon / step);

  SimTrace trace;
  trace.field_id = field_id;
  trace.times.reserve(steps + 1);
  trace.states.reserve(steps + 1);
  trace.times.push_back(0.0);
  trace.states.push_back(x0);

  std::vector<double> x = x0, k1(n), k2(n), k3(n), k4(n), tmp(n);
  auto eval = [&](const std::vector<double>& at, std::vector<double>& out) {
    for (int i = 0; i < n; ++i) out[i] = field[i].eval_real(at);
  };

  for (long s = 1; s <= steps; ++s) {
    eval(x, k1);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * step * k1[i];
    eval(tmp, k2);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * step * k2[i];
    eval(tmp, k3);
    for (int i = 0; i < n; ++i) tmp[i] = x[i] + step * k3[i];
    eval(tmp, k4);
    for (int i = 0; i < n; ++i)
      x[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!all_finite(x) || norm2(x) > 1e12) {
      trace.finite = false;
      break;
    }
    trace.times.push_back(s * step);
    trace.states.push_back(x);
  }
  return trace;
}

SimMetrics metrics(const SimTrace& trace, double band, double conv_tol) {
  if (trace.states.empty()) throw PreconditionError("metrics: empty trace");
  SimMetrics m;
  std::vector<double> norms;
  norms.reserve(trace.states.size());
  for (const auto& st : trace.states) norms.push_back(norm2(st));
  m.peak_norm = *std::max_element(norms.begin(), norms.end());
  m.final_norm = norms.back();
  m.converged = trace.finite && m.final_norm <= conv_tol;

  if (trace.finite) {
    const double threshold = band * norms.front();
    std::size_t last_outside = 0;
    bool any_outside = false;
    for (std::size_t i = 0; i < norms.size(); ++i) {
      if (norms[i] > threshold) {
        last_outside = i;
        any_outside = true;
      }
    }
    if (!any_outside) {
      m.settling_time = 0.0;
      m.settling_defined = true;
    } else if (last_outside + 1 < norms.size()) {
      m.settling_time = trace.times[last_outside + 1];
      m.settling_defined = true;
    }
  }
  return m;
}

double step_halving_error(const PolyVec& field, const std::vector<double>& x0, double horizon,
                          double step) {
  SimTrace coarse = integrate(field, x0, horizon, step);
  SimTrace fine = integrate(field, x0, horizon, step / 2.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < coarse.states.size(); ++i) {
    const std::size_t j = 2 * i;
    if (j >= fine.states.size()) break;
    double d = 0.0;
    for (std::size_t c = 0; c < coarse.states[i].size(); ++c) {
      const double diff = coarse.states[i][c] - fine.states[j][c];
      d += diff * diff;
    }
    worst = std::max(worst, std::sqrt(d));
  }
  return worst;
}

std::vector<SweepRow> sweep(const std::function<PolyVec(double)>& family,
                            const std::vector<double>& values, const std::vector<double>& x0,
                            double horizon, double step, double band, double conv_tol) {
  std::vector<SweepRow> rows;
  rows.reserve(values.size());
  for (double v : values) {
    SweepRow row;
    row.parameter = v;
    try {
      PolyVec field = family(v);
      SimTrace trace = integrate(field, x0, horizon, step);
      row.metrics = metrics(trace, band, conv_tol);
      row.validation_error = step_halving_error(field, x0, horizon, step);
      row.ok = true;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

BasinReport basin_probe(const PolyVec& field, const SamplingBox& box, int grid, double horizon,
                        double step, double conv_tol) {
  BasinReport rep;
  for (const auto& pt : sample_grid(box, grid)) {
    ++rep.total;
    SimTrace trace = integrate(field, pt, horizon, step);
    SimMetrics m = metrics(trace, 0.02, conv_tol);
    if (m.converged)
      ++rep.converged;
    else
      rep.failed_points.push_back(pt);
  }
  rep.fraction = rep.total ? static_cast<double>(rep.converged) / rep.total : 0.0;
  return rep;
}

}  // namespace nlea
