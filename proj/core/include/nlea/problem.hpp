#ifndef NLEA_PROBLEM_HPP
#define NLEA_PROBLEM_HPP

#include <optional>
#include <string>
#include <vector>

#include "nlea/eigenpair.hpp"
#include "nlea/polynomial.hpp"
#include "nlea/sampling.hpp"

namespace nlea {

enum class ProblemKind { LinearPartialAssign, RightAssign, LeftAssign, VerifyOnly, Simulate };

std::string to_string(ProblemKind kind);

/// A fully parsed problem file: variables declared, every expression parsed,
/// dimension invariants checked. See docs/problem-format.md for the schema.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::VerifyOnly;

  std::vector<std::string> x_names;  // plant state
  std::vector<std::string> w_names;  // exo state
  std::vector<std::string> y_names;  // plant output (left problems)
  std::vector<std::string> e_names;  // observer error (left problems)
  std::vector<std::string> z_names() const;  // x ++ e

  // Right-problem plant.
  std::optional<PolyVec> f;     // n over x
  std::optional<PolyMatrix> g;  // n x m over x

  // Left-problem observer data.
  std::optional<PolyVec> obs_h;  // m over x
  std::optional<PolyVec> obs_p;  // n over (xi, y)

  // Exo system.
  std::optional<PolyVec> s;  // nu over w
  std::vector<EigenPair> targets;

  // Design data.
  std::optional<PolyVec> l;    // m over w
  std::optional<PolyVec> k;    // m over x
  std::optional<PolyVec> r;    // nu over (w, y_err)
  std::optional<PolyVec> rho;  // nu over z
  std::vector<EigenPair> candidates;  // x-space (right) or z-space (left)
  std::vector<EigenPair> preserve;

  // Linear problem matrices.
  struct LinearData {
    std::vector<std::vector<double>> A, B, S, L;
  };
  std::optional<LinearData> linear;

  // Standalone eigenpair checks: pair on the open- or closed-loop field;
  // `input` is a constant open-loop input for "closed" checks on plants
  // without a feedback (u = const).
  struct Check {
    std::string system;  // "open" or "closed"
    double input = 0.0;
    bool has_input = false;
    EigenPair pair;
  };
  std::vector<Check> checks;

  // Simulation block.
  struct SimBlock {
    std::vector<double> x0;
    std::vector<double> sweep_values;
  };
  std::optional<SimBlock> sim;

  // Options.
  int degree = 5;
  double tol_rel = 1e-9;
  int grid = 21;
  double horizon = 10.0;
  double step = 1e-3;
  double band = 0.02;
  double conv_tol = 1e-3;
  std::optional<SamplingBox> box;
  std::optional<std::vector<std::vector<double>>> anchor;
};

/// Parse a problem from JSON text. Throws ParseError on malformed JSON or
/// expressions, DimensionError (naming the field) on inconsistent shapes.
ProblemSpec load_problem(const std::string& json_text);

/// Parse a problem from a file on disk.
ProblemSpec load_problem_file(const std::string& path);

}  // namespace nlea

#endif  // NLEA_PROBLEM_HPP
