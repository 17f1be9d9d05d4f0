#ifndef NLEA_JSON_IO_HPP
#define NLEA_JSON_IO_HPP

#include <ostream>
#include <string>

#include "json.hpp"
#include "nlea/eigenpair.hpp"
#include "nlea/polynomial.hpp"
#include "nlea/simulate.hpp"
#include "nlea/sylvester.hpp"
#include "nlea/synthesis.hpp"

namespace nlea {

using ordered_json = nlohmann::ordered_json;

/// Canonical polynomial serialization:
/// {"num_vars": n, "terms": [{"exp": [...], "re": r, "im": i}, ...]}
/// with terms in graded-lex order.
ordered_json to_json(const Polynomial& p);
ordered_json to_json(const PolyVec& v);
Polynomial polynomial_from_json(const ordered_json& j);

ordered_json to_json(const EigenReport& rep);
ordered_json to_json(const StabilityReport& rep);
ordered_json to_json(const SylvesterSolution& sol);
ordered_json to_json(const ResidualReport& rep);
ordered_json to_json(const PushforwardReport& rep);
ordered_json to_json(const AssignmentReport& rep);
ordered_json to_json(const LinearAssignmentReport& rep);
ordered_json to_json(const SimMetrics& m);
ordered_json to_json(const BasinReport& rep);
ordered_json to_json(const std::vector<SweepRow>& rows);

/// CSV with header t,x1,...,xn and one row per step.
void write_trace_csv(std::ostream& os, const SimTrace& trace);
/// CSV with one row per sweep parameter value.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Human-readable stage table for assignment reports.
void print_stage_table(std::ostream& os, const AssignmentReport& rep);

}  // namespace nlea

#endif  // NLEA_JSON_IO_HPP
