#ifndef NLEA_SYLVESTER_HPP
#define NLEA_SYLVESTER_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "nlea/polynomial.hpp"

namespace nlea {

/// A Pi + B L = Pi S with real matrices A (n x n), B (n x m), L (m x nu),
/// S (nu x nu).
struct LinearSylvesterProblem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd L;
  Eigen::MatrixXd S;
};

struct LinearSylvesterResult {
  Eigen::MatrixXd pi;  // n x nu
  /// Frobenius norm of A*pi + B*L - pi*S.
  double residual = 0.0;
  /// True when sigma(A) and sigma(S) are disjoint, so pi is the unique
  /// solution. When false the returned pi is the least-squares solution
  /// closest to the anchor (minimum-norm without one) and `overlaps` lists
  /// the offending eigenvalue pairs.
  bool unique = true;
  std::vector<std::pair<Complex, Complex>> overlaps;
  double min_singular_value = 0.0;
};

/// Solve the linear Sylvester equation by Kronecker vectorization.
/// `anchor`, when given, resolves a rank-deficient solve toward the closest
/// point of the solution set.
LinearSylvesterResult solve_linear_sylvester(const LinearSylvesterProblem& prob,
                                             const Eigen::MatrixXd* anchor = nullptr,
                                             double spectra_tol = 1e-9);

/// K = L * pinv(Pi), the minimum-norm row solution of K Pi = L.
/// Throws RankDeficientError unless Pi has full column rank.
Eigen::MatrixXd feedback_from_embedding(const Eigen::MatrixXd& L, const Eigen::MatrixXd& Pi,
                                        double rank_tol = 1e-9);

/// Eigenvalues of a real matrix, via the dense eigensolver.
Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& A);

/// Truncated power-series solution of a Sylvester-type PDE, together with
/// the per-degree certification data.
struct SylvesterSolution {
  PolyVec pi;  // no constant term
  int truncation_degree = 0;
  /// Max coefficient modulus of the PDE residual restricted to each
  /// homogeneous degree 1..N.
  std::vector<double> per_degree_residual;
  /// Smallest singular value encountered across the per-degree solves.
  double resonance_margin = 0.0;
  /// Degrees whose operator was rank-deficient (solution chosen closest to
  /// the anchor / minimum-norm); empty means every degree was unique.
  std::vector<int> non_unique_degrees;
};

struct SeriesOptions {
  /// Degree-1 coefficient guess (n x nu for the primal equation, nu x N for
  /// the dual); used only to pick a member of a rank-deficient degree-1
  /// solution family.
  std::optional<Eigen::MatrixXd> anchor;
  /// A per-degree operator counts as singular below this times its norm.
  double resonance_rel_tol = 1e-8;
  /// A singular degree is accepted when its least-squares residual stays
  /// below this times the data scale; otherwise ResonanceError.
  double consistency_rel_tol = 1e-7;
};

/// f(pi(w)) + g(pi(w)) l(w) = (dpi/dw) s(w); unknown pi: R^nu -> R^n.
struct NonlinearSylvesterProblem {
  PolyVec f;    // n entries over x
  PolyMatrix g; // n x m over x
  PolyVec l;    // m entries over w
  PolyVec s;    // nu entries over w
};

SylvesterSolution solve_nonlinear_sylvester_series(const NonlinearSylvesterProblem& prob, int N,
                                                   const SeriesOptions& opt = {});

/// -s(-rho(z)) = (drho/dz) F(z) + r(-rho(z), H(z)); unknown rho: R^N -> R^nu.
/// r's variables are (w_1..w_nu, y_1..y_M) in that order.
struct DualSylvesterProblem {
  PolyVec F;  // N entries over z
  PolyVec H;  // M entries over z
  PolyVec r;  // nu entries over (w, y)
  PolyVec s;  // nu entries over w
};

SylvesterSolution solve_dual_sylvester_series(const DualSylvesterProblem& prob, int N,
                                              const SeriesOptions& opt = {});

/// PDE residual of a candidate solution (solver output or a closed form).
struct ResidualReport {
  PolyVec residual;  // full residual polynomial, untruncated
  std::vector<double> per_degree;  // degrees 0..N
  double max_through_degree = 0.0;
  /// True when the untruncated residual is the zero polynomial, i.e. the
  /// candidate satisfies the PDE globally, not just through degree N.
  bool identically_zero = false;
};

ResidualReport sylvester_residual(const NonlinearSylvesterProblem& prob, const PolyVec& pi, int N);
ResidualReport dual_sylvester_residual(const DualSylvesterProblem& prob, const PolyVec& rho, int N);

/// All monomials of the given total degree over num_vars variables, in
/// graded-lex order.
std::vector<Monomial> monomials_of_degree(int num_vars, int degree);

}  // namespace nlea

#endif  // NLEA_SYLVESTER_HPP
