#include "nlea/sylvester.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace nlea {

namespace {

using Mcd = Eigen::MatrixXcd;
using Vcd = Eigen::VectorXcd;

void enumerate_rec(int remaining_vars, int remaining_degree, Monomial& cur,
                   std::vector<Monomial>& out) {
  if (remaining_vars == 1) {
    cur.push_back(remaining_degree);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int e = 0; e <= remaining_degree; ++e) {
    cur.push_back(e);
    enumerate_rec(remaining_vars - 1, remaining_degree - e, cur, out);
    cur.pop_back();
  }
}

/// Coefficient matrix of the degree-1 part: entry (i, j) multiplies variable j
/// in component i.
Mcd linear_part_matrix(const PolyVec& v) {
  Mcd A = Mcd::Zero(v.dim(), v.num_vars());
  for (int i = 0; i < v.dim(); ++i) {
    const Polynomial lin = v[i].homogeneous_part(1);
    for (const auto& [m, c] : lin.terms()) {
      for (int j = 0; j < v.num_vars(); ++j) {
        if (m[j] == 1) {
          A(i, j) = c;
          break;
        }
      }
    }
  }
  return A;
}

PolyVec apply_matrix(const Mcd& A, const PolyVec& h) {
  std::vector<Polynomial> out;
  out.reserve(A.rows());
  for (int i = 0; i < A.rows(); ++i) {
    Polynomial acc = Polynomial::zero(h.num_vars());
    for (int j = 0; j < A.cols(); ++j) {
      if (A(i, j) != Complex(0.0, 0.0)) acc = acc + h[j] * A(i, j);
    }
    out.push_back(std::move(acc));
  }
  return PolyVec(std::move(out));
}

void require_vanishing_at_origin(const PolyVec& v, const char* name) {
  double c0 = 0.0;
  for (const Polynomial& p : v.entries()) c0 = std::max(c0, p.homogeneous_part(0).max_coeff_modulus());
  if (c0 > 1e-12 * (1.0 + v.max_coeff_modulus()))
    throw PreconditionError(std::string(name) + " must vanish at the origin");
}

struct LsSolve {
  Vcd x;
  double smin = 0.0;
  double smax = 0.0;
  bool rank_deficient = false;
  double ls_residual = 0.0;
};

/// Least-squares solve; a rank-deficient system returns the solution closest
/// to the anchor (minimum norm when absent).
LsSolve solve_ls_anchored(const Mcd& M, const Vcd& b, const Vcd* anchor, double rel_tol) {
  Eigen::JacobiSVD<Mcd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  LsSolve r;
  r.smax = sv.size() ? sv.maxCoeff() : 0.0;
  r.smin = sv.size() ? sv.minCoeff() : 0.0;
  const double cutoff = rel_tol * std::max(r.smax, 1.0);
  const int rank_limit = std::min(M.rows(), M.cols());

  Vcd y = svd.matrixU().adjoint() * b;
  Vcd z = Vcd::Zero(M.cols());
  int rank = 0;
  for (int i = 0; i < rank_limit; ++i) {
    if (sv(i) > cutoff) {
      z(i) = y(i) / sv(i);
      ++rank;
    }
  }
  r.x = svd.matrixV() * z;
  r.rank_deficient = rank < M.cols();
  if (r.rank_deficient && anchor != nullptr) {
    // Project the anchor's offset onto the null space and add it.
    Vcd delta = *anchor - r.x;
    Vcd corr = Vcd::Zero(M.cols());
    for (int i = rank_limit; i < M.cols(); ++i)
      corr += svd.matrixV().col(i) * (svd.matrixV().col(i).adjoint() * delta);
    for (int i = 0; i < rank_limit; ++i) {
      if (sv(i) <= cutoff)
        corr += svd.matrixV().col(i) * (svd.matrixV().col(i).adjoint() * delta);
    }
    r.x += corr;
  }
  r.ls_residual = (M * r.x - b).norm();
  return r;
}

/// Shared degree-by-degree driver. `residual` is the full PDE residual as a
/// functional of the candidate; `lin_op` is its (exact) linearization on a
/// homogeneous component, which for these equations involves only the
/// degree-1 data.
struct SeriesContext {
  int unknown_dim;
  int domain_vars;
  std::function<PolyVec(const PolyVec&)> residual;
  std::function<PolyVec(const PolyVec&)> lin_op;
};

SylvesterSolution run_series(const SeriesContext& ctx, int N, const SeriesOptions& opt) {
  if (N < 1) throw PreconditionError("truncation degree must be >= 1");
  SylvesterSolution sol;
  sol.truncation_degree = N;
  sol.resonance_margin = std::numeric_limits<double>::infinity();

  PolyVec pi = PolyVec::zero(ctx.unknown_dim, ctx.domain_vars);

  for (int k = 1; k <= N; ++k) {
    const std::vector<Monomial> monos = monomials_of_degree(ctx.domain_vars, k);
    const int mk = static_cast<int>(monos.size());
    const int dim = ctx.unknown_dim * mk;
    auto flat = [mk](int comp, int mono) { return comp * mk + mono; };

    PolyVec res_k = ctx.residual(pi).homogeneous_part(k);
    Vcd b(dim);
    for (int c = 0; c < ctx.unknown_dim; ++c)
      for (int j = 0; j < mk; ++j) b(flat(c, j)) = -res_k[c].coeff(monos[j]);

    Mcd O(dim, dim);
    for (int c2 = 0; c2 < ctx.unknown_dim; ++c2) {
      for (int j2 = 0; j2 < mk; ++j2) {
        PolyVec h = PolyVec::zero(ctx.unknown_dim, ctx.domain_vars);
        h[c2] = Polynomial::monomial(ctx.domain_vars, monos[j2], Complex(1.0, 0.0));
        PolyVec lh = ctx.lin_op(h);
        for (int c = 0; c < ctx.unknown_dim; ++c)
          for (int j = 0; j < mk; ++j) O(flat(c, j), flat(c2, j2)) = lh[c].coeff(monos[j]);
      }
    }

    Vcd anchor_vec;
    const Vcd* anchor_ptr = nullptr;
    if (k == 1 && opt.anchor) {
      if (opt.anchor->rows() != ctx.unknown_dim || opt.anchor->cols() != ctx.domain_vars)
        throw DimensionError("anchor shape must be unknown_dim x domain_vars");
      anchor_vec = Vcd::Zero(dim);
      for (int j = 0; j < mk; ++j) {
        for (int v = 0; v < ctx.domain_vars; ++v) {
          if (monos[j][v] == 1) {
            for (int c = 0; c < ctx.unknown_dim; ++c)
              anchor_vec(flat(c, j)) = Complex((*opt.anchor)(c, v), 0.0);
            break;
          }
        }
      }
      anchor_ptr = &anchor_vec;
    }

    LsSolve ls = solve_ls_anchored(O, b, anchor_ptr, opt.resonance_rel_tol);
    sol.resonance_margin = std::min(sol.resonance_margin, ls.smin);
    if (ls.rank_deficient) {
      if (ls.ls_residual > opt.consistency_rel_tol * (1.0 + b.norm()))
        throw ResonanceError(k, ls.smin);
      sol.non_unique_degrees.push_back(k);
    }

    for (int c = 0; c < ctx.unknown_dim; ++c)
      for (int j = 0; j < mk; ++j)
        if (ls.x(flat(c, j)) != Complex(0.0, 0.0)) pi[c].add_term(monos[j], ls.x(flat(c, j)));
  }

  PolyVec final_res = ctx.residual(pi);
  sol.per_degree_residual.reserve(N);
  for (int k = 1; k <= N; ++k)
    sol.per_degree_residual.push_back(max_coeff_residual(final_res.homogeneous_part(k)));
  sol.pi = std::move(pi);
  return sol;
}

PolyVec primal_residual(const NonlinearSylvesterProblem& prob, const PolyVec& pi) {
  std::span<const Polynomial> sub(pi.entries());
  PolyVec f_pi = prob.f.compose(sub);
  PolyMatrix g_pi = prob.g.compose(sub);
  return f_pi + g_pi * prob.l - jacobian(pi) * prob.s;
}

PolyVec dual_residual(const DualSylvesterProblem& prob, const PolyVec& rho) {
  PolyVec minus_rho = -rho;
  PolyVec s_comp = prob.s.compose(std::span<const Polynomial>(minus_rho.entries()));
  std::vector<Polynomial> sub_r = minus_rho.entries();
  sub_r.insert(sub_r.end(), prob.H.entries().begin(), prob.H.entries().end());
  PolyVec r_comp = prob.r.compose(std::span<const Polynomial>(sub_r));
  return (-s_comp) - jacobian(rho) * prob.F - r_comp;
}

void validate_primal(const NonlinearSylvesterProblem& prob) {
  const int n = prob.f.dim();
  if (prob.f.num_vars() != n) throw DimensionError("f must be a square field (R^n -> R^n)");
  if (prob.g.rows() != n || prob.g.num_vars() != n)
    throw DimensionError("g must be n x m over the plant variables");
  if (prob.l.dim() != prob.g.cols()) throw DimensionError("l must have one entry per input");
  if (prob.s.num_vars() != prob.s.dim()) throw DimensionError("s must be a square field");
  if (prob.l.num_vars() != prob.s.num_vars())
    throw DimensionError("l and s must share the exo variables");
  require_vanishing_at_origin(prob.f, "f");
  require_vanishing_at_origin(prob.l, "l");
  require_vanishing_at_origin(prob.s, "s");
}

void validate_dual(const DualSylvesterProblem& prob) {
  const int nz = prob.F.dim();
  if (prob.F.num_vars() != nz) throw DimensionError("F must be a square field");
  if (prob.H.num_vars() != nz) throw DimensionError("H must share F's variables");
  if (prob.s.num_vars() != prob.s.dim()) throw DimensionError("s must be a square field");
  if (prob.r.dim() != prob.s.dim()) throw DimensionError("r must have one entry per exo state");
  if (prob.r.num_vars() != prob.s.dim() + prob.H.dim())
    throw DimensionError("r must be a function of (w, y)");
  require_vanishing_at_origin(prob.F, "F");
  require_vanishing_at_origin(prob.H, "H");
  require_vanishing_at_origin(prob.r, "r");
  require_vanishing_at_origin(prob.s, "s");
}

ResidualReport make_residual_report(PolyVec residual, int N) {
  ResidualReport rep;
  rep.identically_zero = residual.is_zero();
  rep.per_degree.reserve(N + 1);
  for (int k = 0; k <= N; ++k) {
    rep.per_degree.push_back(max_coeff_residual(residual.homogeneous_part(k)));
    rep.max_through_degree = std::max(rep.max_through_degree, rep.per_degree.back());
  }
  rep.residual = std::move(residual);
  return rep;
}

}  // namespace

std::vector<Monomial> monomials_of_degree(int num_vars, int degree) {
  if (num_vars < 1 || degree < 0) throw DimensionError("monomials_of_degree: bad arguments");
  std::vector<Monomial> out;
  Monomial cur;
  enumerate_rec(num_vars, degree, cur, out);
  std::sort(out.begin(), out.end(), GradedLexLess{});
  return out;
}

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
  return es.eigenvalues();
}

LinearSylvesterResult solve_linear_sylvester(const LinearSylvesterProblem& prob,
                                             const Eigen::MatrixXd* anchor, double spectra_tol) {
  const int n = static_cast<int>(prob.A.rows());
  const int m = static_cast<int>(prob.B.cols());
  const int nu = static_cast<int>(prob.S.rows());
  if (prob.A.cols() != n || prob.B.rows() != n || prob.S.cols() != nu || prob.L.rows() != m ||
      prob.L.cols() != nu)
    throw DimensionError("linear Sylvester problem shapes are inconsistent");

  LinearSylvesterResult res;
  const Eigen::VectorXcd eig_a = eigenvalues(prob.A);
  const Eigen::VectorXcd eig_s = eigenvalues(prob.S);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(eig_a(i)));
  for (int j = 0; j < nu; ++j) scale = std::max(scale, std::abs(eig_s(j)));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < nu; ++j) {
      if (std::abs(eig_a(i) - eig_s(j)) <= spectra_tol * (1.0 + scale)) {
        res.unique = false;
        res.overlaps.emplace_back(eig_a(i), eig_s(j));
      }
    }
  }

  // Vectorize: (I (x) A - S^T (x) I) vec(Pi) = -vec(B L).
  Mcd M = Mcd::Zero(n * nu, n * nu);
  for (int j = 0; j < nu; ++j)
    M.block(j * n, j * n, n, n) += prob.A.cast<Complex>();
  for (int j = 0; j < nu; ++j)
    for (int j2 = 0; j2 < nu; ++j2)
      M.block(j * n, j2 * n, n, n) -=
          Complex(prob.S(j2, j), 0.0) * Mcd::Identity(n, n);

  const Eigen::MatrixXd BL = prob.B * prob.L;
  Vcd b(n * nu);
  for (int j = 0; j < nu; ++j)
    for (int i = 0; i < n; ++i) b(j * n + i) = Complex(-BL(i, j), 0.0);

  Vcd anchor_vec;
  const Vcd* anchor_ptr = nullptr;
  if (anchor != nullptr) {
    if (anchor->rows() != n || anchor->cols() != nu)
      throw DimensionError("anchor must be n x nu");
    anchor_vec = Vcd::Zero(n * nu);
    for (int j = 0; j < nu; ++j)
      for (int i = 0; i < n; ++i) anchor_vec(j * n + i) = Complex((*anchor)(i, j), 0.0);
    anchor_ptr = &anchor_vec;
  }

  LsSolve ls = solve_ls_anchored(M, b, anchor_ptr, 1e-12);
  res.min_singular_value = ls.smin;
  res.pi.resize(n, nu);
  for (int j = 0; j < nu; ++j)
    for (int i = 0; i < n; ++i) res.pi(i, j) = ls.x(j * n + i).real();
  res.residual = (prob.A * res.pi + BL - res.pi * prob.S).norm();
  return res;
}

Eigen::MatrixXd feedback_from_embedding(const Eigen::MatrixXd& L, const Eigen::MatrixXd& Pi,
                                        double rank_tol) {
  if (L.cols() != Pi.cols()) throw DimensionError("L and Pi must agree on nu");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Pi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv.maxCoeff() : 0.0;
  if (sv.size() < Pi.cols() || sv.minCoeff() <= rank_tol * std::max(1.0, smax))
    throw RankDeficientError("embedding matrix is not of full column rank");
  Eigen::MatrixXd pinv =
      svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
  return L * pinv;
}

SylvesterSolution solve_nonlinear_sylvester_series(const NonlinearSylvesterProblem& prob, int N,
                                                   const SeriesOptions& opt) {
  validate_primal(prob);
  const Mcd A = linear_part_matrix(prob.f);
  const PolyVec s1 = prob.s.homogeneous_part(1);
  SeriesContext ctx{
      prob.f.dim(), prob.s.dim(),
      [&prob](const PolyVec& pi) { return primal_residual(prob, pi); },
      [A, s1](const PolyVec& h) { return apply_matrix(A, h) - jacobian(h) * s1; }};
  return run_series(ctx, N, opt);
}

SylvesterSolution solve_dual_sylvester_series(const DualSylvesterProblem& prob, int N,
                                              const SeriesOptions& opt) {
  validate_dual(prob);
  const int nu = prob.s.dim();
  const Mcd SR = linear_part_matrix(prob.s) + linear_part_matrix(prob.r).leftCols(nu);
  const PolyVec F1 = prob.F.homogeneous_part(1);
  SeriesContext ctx{
      nu, prob.F.dim(),
      [&prob](const PolyVec& rho) { return dual_residual(prob, rho); },
      [SR, F1](const PolyVec& h) { return apply_matrix(SR, h) - jacobian(h) * F1; }};
  return run_series(ctx, N, opt);
}

ResidualReport sylvester_residual(const NonlinearSylvesterProblem& prob, const PolyVec& pi,
                                  int N) {
  validate_primal(prob);
  if (pi.dim() != prob.f.dim() || pi.num_vars() != prob.s.num_vars())
    throw DimensionError("candidate pi has the wrong shape");
  return make_residual_report(primal_residual(prob, pi), N);
}

ResidualReport dual_sylvester_residual(const DualSylvesterProblem& prob, const PolyVec& rho,
                                       int N) {
  validate_dual(prob);
  if (rho.dim() != prob.s.dim() || rho.num_vars() != prob.F.num_vars())
    throw DimensionError("candidate rho has the wrong shape");
  return make_residual_report(dual_residual(prob, rho), N);
}

}  // namespace nlea
