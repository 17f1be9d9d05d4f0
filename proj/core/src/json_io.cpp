#include "nlea/json_io.hpp"

#include <cstdio>
#include <iomanip>

namespace nlea {

namespace {

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

ordered_json to_json(const Polynomial& p) {
  ordered_json terms = ordered_json::array();
  for (const auto& [m, c] : p.terms()) {
    ordered_json t;
    t["exp"] = m;
    t["re"] = c.real();
    t["im"] = c.imag();
    terms.push_back(std::move(t));
  }
  return ordered_json{{"num_vars", p.num_vars()}, {"terms", std::move(terms)}};
}

ordered_json to_json(const PolyVec& v) {
  ordered_json arr = ordered_json::array();
  for (const Polynomial& p : v.entries()) arr.push_back(to_json(p));
  return arr;
}

Polynomial polynomial_from_json(const ordered_json& j) {
  Polynomial p(j.at("num_vars").get<int>());
  for (const auto& t : j.at("terms")) {
    Monomial m = t.at("exp").get<Monomial>();
    p.add_term(m, Complex(t.at("re").get<double>(), t.at("im").get<double>()));
  }
  return p;
}

ordered_json to_json(const EigenReport& rep) {
  ordered_json samples = ordered_json::array();
  for (const SampleRecord& s : rep.samples)
    samples.push_back({{"point", s.point}, {"value", s.value}, {"label", s.label}});
  return ordered_json{{"verdict", rep.verdict},
                      {"max_residual", rep.max_residual},
                      {"tolerance", rep.tolerance},
                      {"residual", to_json(rep.residual)},
                      {"samples", std::move(samples)}};
}

ordered_json to_json(const StabilityReport& rep) {
  ordered_json signs = ordered_json::array();
  for (const auto& sc : rep.sign_checks) {
    signs.push_back({{"nonpositive_everywhere", sc.nonpositive_everywhere},
                     {"violation_point", sc.violation_point},
                     {"violation_value", sc.violation_value},
                     {"strictly_negative_somewhere", sc.strictly_negative_somewhere},
                     {"witness_point", sc.witness_point},
                     {"witness_value", sc.witness_value}});
  }
  ordered_json fails = ordered_json::array();
  for (const auto& [i, j] : rep.commutation_failures) fails.push_back({i, j});
  return ordered_json{{"verdict", rep.verdict},
                      {"commutation_ok", rep.commutation_ok},
                      {"commutation_max_residual", rep.commutation_max_residual},
                      {"commutation_failures", std::move(fails)},
                      {"span_ok", rep.span_ok},
                      {"min_singular_value", rep.min_singular_value},
                      {"span_worst_point", rep.span_worst_point},
                      {"sign_ok", rep.sign_ok},
                      {"sign_checks", std::move(signs)},
                      {"points_sampled", rep.points_sampled}};
}

ordered_json to_json(const SylvesterSolution& sol) {
  return ordered_json{{"truncation_degree", sol.truncation_degree},
                      {"solution", to_json(sol.pi)},
                      {"per_degree_residual", sol.per_degree_residual},
                      {"resonance_margin", sol.resonance_margin},
                      {"non_unique_degrees", sol.non_unique_degrees}};
}

ordered_json to_json(const ResidualReport& rep) {
  return ordered_json{{"identically_zero", rep.identically_zero},
                      {"per_degree", rep.per_degree},
                      {"max_through_degree", rep.max_through_degree},
                      {"residual", to_json(rep.residual)}};
}

ordered_json to_json(const PushforwardReport& rep) {
  return ordered_json{{"verdict", rep.verdict},
                      {"value_match", to_json(rep.value_match)},
                      {"vector_match", to_json(rep.vector_match)},
                      {"nonvanishing_ok", rep.nonvanishing_ok},
                      {"min_vector_norm", rep.min_vector_norm},
                      {"min_norm_point", rep.min_norm_point}};
}

ordered_json to_json(const AssignmentReport& rep) {
  ordered_json stages = ordered_json::array();
  for (const StageRecord& st : rep.stages) {
    ordered_json s{{"stage", st.stage}, {"verdict", st.verdict}};
    if (st.residual >= 0.0) s["residual"] = st.residual;
    if (!st.note.empty()) s["note"] = st.note;
    stages.push_back(std::move(s));
  }
  ordered_json out{{"verdict", rep.verdict}, {"stages", std::move(stages)}};
  if (rep.solution) out["sylvester"] = to_json(*rep.solution);
  if (rep.closed_loop.dim() > 0) out["closed_loop"] = to_json(rep.closed_loop);
  return out;
}

ordered_json to_json(const LinearAssignmentReport& rep) {
  ordered_json pi = ordered_json::array();
  for (int i = 0; i < rep.sylvester.pi.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < rep.sylvester.pi.cols(); ++j) row.push_back(rep.sylvester.pi(i, j));
    pi.push_back(std::move(row));
  }
  ordered_json K = ordered_json::array();
  for (int i = 0; i < rep.K.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < rep.K.cols(); ++j) row.push_back(rep.K(i, j));
    K.push_back(std::move(row));
  }
  ordered_json eigs = ordered_json::array();
  for (int i = 0; i < rep.closed_loop_eigenvalues.size(); ++i)
    eigs.push_back({{"re", rep.closed_loop_eigenvalues(i).real()},
                    {"im", rep.closed_loop_eigenvalues(i).imag()}});
  ordered_json overlaps = ordered_json::array();
  for (const auto& [a, s] : rep.sylvester.overlaps)
    overlaps.push_back({{"a_re", a.real()}, {"a_im", a.imag()},
                        {"s_re", s.real()}, {"s_im", s.imag()}});
  return ordered_json{{"verdict", rep.verdict},
                      {"pi", std::move(pi)},
                      {"K", std::move(K)},
                      {"sylvester_residual", rep.sylvester.residual},
                      {"unique", rep.sylvester.unique},
                      {"overlaps", std::move(overlaps)},
                      {"closed_loop_eigenvalues", std::move(eigs)},
                      {"containment_error", rep.containment_error}};
}

ordered_json to_json(const SimMetrics& m) {
  return ordered_json{{"peak_norm", m.peak_norm},
                      {"settling_time", m.settling_defined ? ordered_json(m.settling_time)
                                                           : ordered_json(nullptr)},
                      {"final_norm", m.final_norm},
                      {"converged", m.converged}};
}

ordered_json to_json(const BasinReport& rep) {
  return ordered_json{{"total", rep.total},
                      {"converged", rep.converged},
                      {"fraction", rep.fraction},
                      {"failed_points", rep.failed_points}};
}

ordered_json to_json(const std::vector<SweepRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const SweepRow& r : rows) {
    ordered_json row{{"parameter", r.parameter}, {"ok", r.ok}};
    if (r.ok) {
      row["metrics"] = to_json(r.metrics);
      row["validation_error"] = r.validation_error;
    } else {
      row["error"] = r.error;
    }
    arr.push_back(std::move(row));
  }
  return arr;
}

void write_trace_csv(std::ostream& os, const SimTrace& trace) {
  os << "t";
  for (int i = 1; i <= trace.dim(); ++i) os << ",x" << i;
  os << "\n";
  for (std::size_t r = 0; r < trace.times.size(); ++r) {
    os << fmt(trace.times[r]);
    for (double v : trace.states[r]) os << "," << fmt(v);
    os << "\n";
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "parameter,peak_norm,settling_time,final_norm,converged,validation_error\n";
  for (const SweepRow& r : rows) {
    os << fmt(r.parameter) << ",";
    if (r.ok) {
      os << fmt(r.metrics.peak_norm) << ","
         << (r.metrics.settling_defined ? fmt(r.metrics.settling_time) : "") << ","
         << fmt(r.metrics.final_norm) << "," << (r.metrics.converged ? 1 : 0) << ","
         << fmt(r.validation_error) << "\n";
    } else {
      os << ",,,," << "\n";
    }
  }
}

void print_stage_table(std::ostream& os, const AssignmentReport& rep) {
  os << std::left << std::setw(28) << "stage" << std::setw(14) << "residual"
     << std::setw(8) << "verdict" << "note\n";
  for (const StageRecord& st : rep.stages) {
    os << std::left << std::setw(28) << st.stage << std::setw(14)
       << (st.residual >= 0.0 ? fmt(st.residual) : std::string("-")) << std::setw(8)
       << (st.verdict ? "pass" : "FAIL") << st.note << "\n";
  }
  os << std::left << std::setw(28) << "overall" << std::setw(14) << "-" << std::setw(8)
     << (rep.verdict ? "pass" : "FAIL") << "\n";
}

}  // namespace nlea
