#ifndef NLEA_SYNTHESIS_HPP
#define NLEA_SYNTHESIS_HPP

#include <optional>
#include <string>
#include <vector>

#include "nlea/eigenpair.hpp"
#include "nlea/polynomial.hpp"
#include "nlea/sylvester.hpp"

namespace nlea {

/// Input-affine plant x' = f(x) + g(x) u with an optional state feedback
/// u = k(x).
struct ControlSystem {
  PolyVec f;     // n entries over x
  PolyMatrix g;  // n x m over x
  std::optional<PolyVec> k;  // m entries over x

  void validate() const;
};

/// Reference dynamics w' = s(w) carrying the eigenstructure to embed.
struct ExoSystem {
  PolyVec s;  // nu entries over w
  std::vector<EigenPair> targets;

  void validate() const;
};

/// Autonomous plant x' = f(x) with output y = h(x) and observer correction
/// p(xi, y) satisfying p(x, h(x)) = 0. p's variables are (xi_1..xi_n,
/// y_1..y_m) in that order.
struct ObserverProblem {
  PolyVec f;  // n entries over x
  PolyVec h;  // m entries over x
  PolyVec p;  // n entries over (xi, y)

  int state_dim() const { return f.dim(); }
  int output_dim() const { return h.dim(); }
  void validate() const;
};

/// f + g k, expanded.
PolyVec build_closed_loop(const ControlSystem& sys);

/// Residual of k(pi(w)) - l(w).
EigenReport verify_feedback_matching(const PolyVec& k, const PolyVec& pi, const PolyVec& l,
                                     const CheckOptions& opt = {});

/// The two pushforward identities tying a plant-space candidate pair to an
/// exo-space target pair through the embedding pi, plus a sampled
/// nonvanishing check of the pushed-forward eigenvector.
struct PushforwardReport {
  EigenReport value_match;   // lambda_tilde(pi(w)) - lambda(w)
  EigenReport vector_match;  // v_tilde(pi(w)) - (dpi/dw) v(w)
  bool nonvanishing_ok = false;
  double min_vector_norm = 0.0;
  std::vector<double> min_norm_point;
  bool verdict = false;
};

PushforwardReport check_pushforward_right(const PolyVec& pi, const EigenPair& target,
                                          const EigenPair& candidate, const SamplingBox& box,
                                          int grid, const CheckOptions& opt = {});

/// The interconnected (x, e) system of a plant/observer pair:
/// z = (x, e), e = xi - x.
struct ErrorSystem {
  PolyVec F;       // [f(x); f(x+e) - f(x)], 2n entries over z
  PolyVec q_of_z;  // [0; p(x+e, h(x))] = q(z, H(z)), 2n entries over z
  PolyVec H;       // [h(x); 0], 2m entries over z
};

ErrorSystem build_error_system(const ObserverProblem& prob, const CheckOptions& opt = {});

/// Candidate left pair on z-space from an exo left pair through rho:
/// lambda_tilde(z) = lambda(-rho(z)), v_tilde^T = -v^T(-rho(z)) drho/dz.
/// Throws RankDeficientError when the constructed vector is identically zero.
EigenPair construct_left_candidate(const PolyVec& rho, const EigenPair& target);

/// One line of an assignment report; `residual` is the stage's max
/// coefficient residual where meaningful (-1 otherwise).
struct StageRecord {
  std::string stage;
  bool verdict = false;
  double residual = -1.0;
  std::string note;
};

struct AssignmentReport {
  std::vector<StageRecord> stages;
  std::optional<SylvesterSolution> solution;
  PolyVec closed_loop;
  std::vector<EigenPair> closed_loop_pairs;
  bool verdict = false;

  void add_stage(std::string stage, bool ok, double residual = -1.0, std::string note = "");
};

struct AssignOptions {
  CheckOptions check;
  SeriesOptions series;
  /// Box for sampled nonvanishing / rank checks; defaults to [-1, 1]^d.
  std::optional<SamplingBox> box;
  int grid = 21;
  double rank_tol = 1e-6;
};

/// Degree-1 embedding coefficient implied by the pushforward identity at the
/// origin, Pi1 v_i(0) = v_tilde_i(0), least squares over the given pairs.
/// Returns nullopt when the target vectors all vanish at the origin.
std::optional<Eigen::MatrixXd> embedding_anchor(const std::vector<EigenPair>& targets,
                                                const std::vector<EigenPair>& candidates, int nu,
                                                int n);

/// State-feedback assignment pipeline: verify the exo targets, solve the
/// Sylvester PDE by series, check k(pi) = l, the pushforward identities, the
/// full rank of dpi/dw on the sampled box, and re-verify every candidate pair
/// against the assembled closed loop. Preservation targets are checked
/// against the feedback-invariance condition and re-verified on the closed
/// loop.
AssignmentReport assign_right(const ControlSystem& sys, const ExoSystem& exo, const PolyVec& l,
                              const PolyVec& k_candidate,
                              const std::vector<EigenPair>& candidates, int N,
                              const std::vector<EigenPair>& preservation_targets = {},
                              const AssignOptions& opt = {});

/// Output-injection (observer) assignment pipeline on the error system.
/// When rho is given it is certified against the dual PDE (and, when r is
/// given too, against the injection-consistency identity); otherwise rho is
/// solved by series with the injection folded into the closed-loop field.
/// Candidates are constructed from rho per target and verified on the closed
/// loop; preservation targets are checked against the injection condition
/// and re-verified.
AssignmentReport assign_left(const ObserverProblem& prob, const ExoSystem& exo, int N,
                             const std::vector<EigenPair>& preservation_targets,
                             const std::optional<PolyVec>& rho_candidate,
                             const std::optional<PolyVec>& r_given,
                             const AssignOptions& opt = {});

/// Linear partial assignment: Pi from the Sylvester equation, K = L pinv(Pi),
/// and the closed-loop spectrum containment check.
struct LinearAssignmentReport {
  LinearSylvesterResult sylvester;
  Eigen::MatrixXd K;
  Eigen::VectorXcd closed_loop_eigenvalues;
  /// max over mu in sigma(S) of the distance to the nearest closed-loop
  /// eigenvalue.
  double containment_error = 0.0;
  bool verdict = false;
};

LinearAssignmentReport linear_partial_assign(const LinearSylvesterProblem& prob,
                                             double contain_tol = 1e-6);

}  // namespace nlea

#endif  // NLEA_SYNTHESIS_HPP
