#ifndef NLEA_EIGENPAIR_HPP
#define NLEA_EIGENPAIR_HPP

#include <optional>
#include <string>
#include <vector>

#include "nlea/polynomial.hpp"
#include "nlea/sampling.hpp"

namespace nlea {

enum class EigenSide { Right, Left };

/// A candidate (lambda(w), v(w)) pair for a system w' = s(w). Right pairs
/// satisfy [v, s] = lambda * v; left pairs satisfy
/// v^T ds/dw + (dv/dw s)^T = lambda v^T.
struct EigenPair {
  EigenSide side = EigenSide::Right;
  Polynomial value;  // lambda
  PolyVec vector;    // v
  std::string domain_note;

  void validate() const;
};

struct SampleRecord {
  std::vector<double> point;
  double value = 0.0;
  std::string label;
};

/// Outcome of a polynomial identity check. `residual` is the left-minus-right
/// side of the identity; the verdict holds iff max_residual <= tolerance.
struct EigenReport {
  PolyVec residual;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool verdict = false;
  std::vector<SampleRecord> samples;
};

struct CheckOptions {
  /// tolerance = tol_rel * (1 + largest input coefficient modulus),
  /// unless tol_abs overrides it.
  double tol_rel = 1e-9;
  std::optional<double> tol_abs;

  double resolve(double input_scale) const {
    return tol_abs ? *tol_abs : tol_rel * (1.0 + input_scale);
  }
};

/// [v, s] = (ds/dw) v - (dv/dw) s.
PolyVec lie_bracket(const PolyVec& v, const PolyVec& s);

EigenReport check_right_eigenpair(const PolyVec& s, const EigenPair& pair,
                                  const CheckOptions& opt = {});
EigenReport check_left_eigenpair(const PolyVec& s, const EigenPair& pair,
                                 const CheckOptions& opt = {});

/// Feedback invariance condition [v, g*k] = 0: when it holds, an open-loop
/// right pair survives the feedback k unchanged.
EigenReport check_right_preservation(const PolyVec& v, const PolyMatrix& g, const PolyVec& k,
                                     const CheckOptions& opt = {});

/// Output-injection invariance condition
/// v^T dq/dz + (dv/dz q)^T = 0 with q = q(z, H(z)) already composed.
EigenReport check_left_preservation(const PolyVec& v, const PolyVec& q_of_z,
                                    const CheckOptions& opt = {});

struct StabilityOptions {
  CheckOptions identity;
  double rank_tol = 1e-6;
  /// Re(lambda) must not exceed this anywhere on the sampled region...
  double sign_slack = 1e-9;
  /// ...and must dip below -strict_neg somewhere.
  double strict_neg = 1e-6;
};

/// Report for the three sampled partial-stability conditions: pairwise
/// commutation of the eigenvector fields (exact identity), pointwise span
/// dimension, and the sign pattern of the eigenvalue real parts.
struct StabilityReport {
  bool commutation_ok = false;
  double commutation_max_residual = 0.0;
  std::vector<std::pair<int, int>> commutation_failures;

  bool span_ok = false;
  double min_singular_value = 0.0;
  std::vector<double> span_worst_point;

  struct SignCheck {
    bool nonpositive_everywhere = false;
    std::vector<double> violation_point;
    double violation_value = 0.0;
    bool strictly_negative_somewhere = false;
    std::vector<double> witness_point;
    double witness_value = 0.0;
  };
  std::vector<SignCheck> sign_checks;
  bool sign_ok = false;

  int points_sampled = 0;
  bool verdict = false;
};

StabilityReport check_stability_conditions(const std::vector<EigenPair>& pairs, const PolyVec& s,
                                           const SamplingBox& box, int grid,
                                           const StabilityOptions& opt = {});

}  // namespace nlea

#endif  // NLEA_EIGENPAIR_HPP
