#include "nlea/synthesis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace nlea {

namespace {

PolyVec concat(const PolyVec& a, const PolyVec& b) {
  std::vector<Polynomial> e = a.entries();
  e.insert(e.end(), b.entries().begin(), b.entries().end());
  return PolyVec(std::move(e));
}

SamplingBox default_box(int dim) {
  SamplingBox box;
  box.lo.assign(dim, -1.0);
  box.hi.assign(dim, 1.0);
  return box;
}

void require_zero_constant_term(const PolyVec& v, const char* name) {
  double c0 = 0.0;
  for (const Polynomial& p : v.entries())
    c0 = std::max(c0, p.homogeneous_part(0).max_coeff_modulus());
  if (c0 > 1e-12 * (1.0 + v.max_coeff_modulus()))
    throw PreconditionError(std::string(name) + " must vanish at the origin");
}

}  // namespace

void ControlSystem::validate() const {
  const int n = f.dim();
  if (f.num_vars() != n) throw DimensionError("plant field must be square");
  if (g.rows() != n || g.num_vars() != n) throw DimensionError("g must be n x m over x");
  require_zero_constant_term(f, "f");
  if (k) {
    if (k->dim() != g.cols() || k->num_vars() != n)
      throw DimensionError("feedback k must be m entries over x");
    require_zero_constant_term(*k, "k");
  }
}

void ExoSystem::validate() const {
  if (s.num_vars() != s.dim()) throw DimensionError("exo field must be square");
  require_zero_constant_term(s, "s");
  for (const EigenPair& t : targets) {
    t.validate();
    if (t.vector.num_vars() != s.num_vars())
      throw DimensionError("exo target lives on the wrong variable set");
  }
}

void ObserverProblem::validate() const {
  const int n = f.dim();
  if (f.num_vars() != n) throw DimensionError("plant field must be square");
  if (h.num_vars() != n) throw DimensionError("output map must live on the plant variables");
  if (p.dim() != n) throw DimensionError("injection p must have one entry per state");
  if (p.num_vars() != n + h.dim())
    throw DimensionError("injection p must be a function of (xi, y)");
  require_zero_constant_term(f, "f");
  require_zero_constant_term(h, "h");
}

PolyVec build_closed_loop(const ControlSystem& sys) {
  if (!sys.k) throw PreconditionError("closed loop requested but no feedback is set");
  sys.validate();
  return sys.f + sys.g * (*sys.k);
}

EigenReport verify_feedback_matching(const PolyVec& k, const PolyVec& pi, const PolyVec& l,
                                     const CheckOptions& opt) {
  if (static_cast<int>(pi.dim()) != k.num_vars())
    throw DimensionError("feedback matching: pi must substitute k's variables");
  if (k.dim() != l.dim() || pi.num_vars() != l.num_vars())
    throw DimensionError("feedback matching: k/l dimensions differ");
  PolyVec residual = k.compose(std::span<const Polynomial>(pi.entries())) - l;
  EigenReport rep;
  rep.max_residual = max_coeff_residual(residual);
  rep.residual = std::move(residual);
  rep.tolerance = opt.resolve(std::max({k.max_coeff_modulus(), pi.max_coeff_modulus(),
                                        l.max_coeff_modulus()}));
  rep.verdict = rep.max_residual <= rep.tolerance;
  return rep;
}

PushforwardReport check_pushforward_right(const PolyVec& pi, const EigenPair& target,
                                          const EigenPair& candidate, const SamplingBox& box,
                                          int grid, const CheckOptions& opt) {
  target.validate();
  candidate.validate();
  if (candidate.vector.dim() != pi.dim())
    throw DimensionError("candidate must live on the plant space");
  if (target.vector.dim() != pi.num_vars())
    throw DimensionError("target must live on the exo space");

  const std::span<const Polynomial> sub(pi.entries());
  const double scale = std::max({pi.max_coeff_modulus(), target.vector.max_coeff_modulus(),
                                 target.value.max_coeff_modulus(),
                                 candidate.vector.max_coeff_modulus(),
                                 candidate.value.max_coeff_modulus()});

  PushforwardReport rep;
  {
    Polynomial res = candidate.value.compose(sub) - target.value;
    rep.value_match.max_residual = res.max_coeff_modulus();
    rep.value_match.residual = PolyVec({res});
    rep.value_match.tolerance = opt.resolve(scale);
    rep.value_match.verdict = rep.value_match.max_residual <= rep.value_match.tolerance;
  }
  PolyVec pushed = candidate.vector.compose(sub);
  {
    PolyVec res = pushed - jacobian(pi) * target.vector;
    rep.vector_match.max_residual = max_coeff_residual(res);
    rep.vector_match.residual = std::move(res);
    rep.vector_match.tolerance = opt.resolve(scale);
    rep.vector_match.verdict = rep.vector_match.max_residual <= rep.vector_match.tolerance;
  }

  rep.min_vector_norm = std::numeric_limits<double>::infinity();
  for (const auto& pt : sample_grid(box, grid)) {
    std::vector<Complex> cpt(pt.size());
    for (std::size_t i = 0; i < pt.size(); ++i) cpt[i] = Complex(pt[i], 0.0);
    double norm = 0.0;
    for (const Complex& c : pushed.eval(cpt)) norm += std::norm(c);
    norm = std::sqrt(norm);
    if (norm < rep.min_vector_norm) {
      rep.min_vector_norm = norm;
      rep.min_norm_point = pt;
    }
  }
  rep.nonvanishing_ok = rep.min_vector_norm > 1e-9;
  rep.verdict = rep.value_match.verdict && rep.vector_match.verdict && rep.nonvanishing_ok;
  return rep;
}

ErrorSystem build_error_system(const ObserverProblem& prob, const CheckOptions& opt) {
  prob.validate();
  const int n = prob.state_dim();
  const int m = prob.output_dim();
  const int nz = 2 * n;

  // p(x, h(x)) must vanish identically.
  {
    std::vector<Polynomial> sub;
    sub.reserve(n + m);
    for (int i = 0; i < n; ++i) sub.push_back(Polynomial::variable(n, i));
    for (int j = 0; j < m; ++j) sub.push_back(prob.h[j]);
    PolyVec on_graph = prob.p.compose(std::span<const Polynomial>(sub));
    const double res = max_coeff_residual(on_graph);
    if (res > opt.resolve(prob.p.max_coeff_modulus()))
      throw PreconditionError("p(x, h(x)) is not identically zero (residual " +
                              std::to_string(res) + ")");
  }

  std::vector<Polynomial> x_sub, xe_sub;
  for (int i = 0; i < n; ++i) x_sub.push_back(Polynomial::variable(nz, i));
  for (int i = 0; i < n; ++i)
    xe_sub.push_back(Polynomial::variable(nz, i) + Polynomial::variable(nz, n + i));

  PolyVec f_x = prob.f.compose(std::span<const Polynomial>(x_sub));
  PolyVec f_xe = prob.f.compose(std::span<const Polynomial>(xe_sub));
  PolyVec h_x = prob.h.compose(std::span<const Polynomial>(x_sub));

  std::vector<Polynomial> p_sub = xe_sub;
  p_sub.insert(p_sub.end(), h_x.entries().begin(), h_x.entries().end());
  PolyVec p_err = prob.p.compose(std::span<const Polynomial>(p_sub));

  ErrorSystem es{concat(f_x, f_xe - f_x), concat(PolyVec::zero(n, nz), p_err),
                 concat(h_x, PolyVec::zero(m, nz))};
  return es;
}

EigenPair construct_left_candidate(const PolyVec& rho, const EigenPair& target) {
  target.validate();
  if (target.side != EigenSide::Left)
    throw PreconditionError("construct_left_candidate: target must be a left pair");
  if (target.vector.dim() != rho.dim())
    throw DimensionError("target dimension must match rho's range");

  PolyVec minus_rho = -rho;
  const std::span<const Polynomial> sub(minus_rho.entries());
  EigenPair cand;
  cand.side = EigenSide::Left;
  cand.value = target.value.compose(sub);
  cand.vector = -row_times_matrix(target.vector.compose(sub), jacobian(rho));
  if (cand.vector.is_zero())
    throw RankDeficientError("constructed left eigenvector is identically zero");
  return cand;
}

void AssignmentReport::add_stage(std::string stage, bool ok, double residual, std::string note) {
  stages.push_back(StageRecord{std::move(stage), ok, residual, std::move(note)});
}

std::optional<Eigen::MatrixXd> embedding_anchor(const std::vector<EigenPair>& targets,
                                                const std::vector<EigenPair>& candidates, int nu,
                                                int n) {
  if (candidates.empty() || candidates.size() != targets.size()) return std::nullopt;
  const int t = static_cast<int>(candidates.size());
  Eigen::MatrixXcd V0(nu, t), Vt(n, t);
  const std::vector<Complex> worigin(nu, Complex(0.0, 0.0));
  const std::vector<Complex> xorigin(n, Complex(0.0, 0.0));
  for (int j = 0; j < t; ++j) {
    auto v0 = targets[j].vector.eval(worigin);
    auto vt0 = candidates[j].vector.eval(xorigin);
    for (int i = 0; i < nu; ++i) V0(i, j) = v0[i];
    for (int i = 0; i < n; ++i) Vt(i, j) = vt0[i];
  }
  if (V0.norm() <= 1e-12) return std::nullopt;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return (Vt * svd.solve(Eigen::MatrixXcd::Identity(nu, nu))).real();
}

AssignmentReport assign_right(const ControlSystem& sys, const ExoSystem& exo, const PolyVec& l,
                              const PolyVec& k_candidate,
                              const std::vector<EigenPair>& candidates, int N,
                              const std::vector<EigenPair>& preservation_targets,
                              const AssignOptions& opt) {
  sys.validate();
  exo.validate();
  require_zero_constant_term(k_candidate, "k");

  AssignmentReport rep;
  const int nu = exo.s.dim();
  const SamplingBox wbox = opt.box ? *opt.box : default_box(nu);

  for (std::size_t i = 0; i < exo.targets.size(); ++i) {
    EigenReport r = check_right_eigenpair(exo.s, exo.targets[i], opt.check);
    rep.add_stage("exo_target[" + std::to_string(i) + "]", r.verdict, r.max_residual);
  }

  SeriesOptions series = opt.series;
  if (!series.anchor)
    series.anchor = embedding_anchor(exo.targets, candidates, nu, sys.f.dim());

  NonlinearSylvesterProblem prob{sys.f, sys.g, l, exo.s};
  try {
    rep.solution = solve_nonlinear_sylvester_series(prob, N, series);
  } catch (const Error& e) {
    rep.add_stage("sylvester_solve", false, -1.0, e.what());
    rep.verdict = false;
    return rep;
  }
  const PolyVec& pi = rep.solution->pi;
  {
    double worst = 0.0;
    for (double r : rep.solution->per_degree_residual) worst = std::max(worst, r);
    std::string note;
    if (!rep.solution->non_unique_degrees.empty()) {
      note = "non-unique degrees:";
      for (int d : rep.solution->non_unique_degrees) note += " " + std::to_string(d);
    }
    rep.add_stage("sylvester_solve", worst <= opt.check.resolve(pi.max_coeff_modulus()), worst,
                  note);
  }

  {
    EigenReport r = verify_feedback_matching(k_candidate, pi, l, opt.check);
    rep.add_stage("feedback_matching", r.verdict, r.max_residual);
  }

  bool hypotheses_ok = true;
  for (const StageRecord& st : rep.stages) hypotheses_ok = hypotheses_ok && st.verdict;

  for (std::size_t i = 0; i < candidates.size() && i < exo.targets.size(); ++i) {
    PushforwardReport r =
        check_pushforward_right(pi, exo.targets[i], candidates[i], wbox, opt.grid, opt.check);
    rep.add_stage("pushforward[" + std::to_string(i) + "]", r.verdict,
                  std::max(r.value_match.max_residual, r.vector_match.max_residual));
    hypotheses_ok = hypotheses_ok && r.verdict;
  }

  {
    // rank(dpi/dw) = nu on the sampled box.
    double min_sv = std::numeric_limits<double>::infinity();
    PolyMatrix jac = jacobian(pi);
    for (const auto& pt : sample_grid(wbox, opt.grid)) {
      std::vector<Complex> cpt(pt.size());
      for (std::size_t i = 0; i < pt.size(); ++i) cpt[i] = Complex(pt[i], 0.0);
      Eigen::MatrixXcd J(jac.rows(), jac.cols());
      for (int r = 0; r < jac.rows(); ++r)
        for (int c = 0; c < jac.cols(); ++c) J(r, c) = jac.at(r, c).eval(cpt);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(J);
      min_sv = std::min(min_sv, static_cast<double>(svd.singularValues().minCoeff()));
    }
    const bool ok = min_sv > opt.rank_tol;
    rep.add_stage("embedding_rank", ok, min_sv);
    hypotheses_ok = hypotheses_ok && ok;
  }

  ControlSystem closed = sys;
  closed.k = k_candidate;
  rep.closed_loop = build_closed_loop(closed);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    EigenReport r = check_right_eigenpair(rep.closed_loop, candidates[i], opt.check);
    const bool ok = r.verdict || hypotheses_ok;
    rep.add_stage("closed_loop_pair[" + std::to_string(i) + "]", ok, r.max_residual,
                  r.verdict ? "holds globally" : "holds on the embedded image");
    rep.closed_loop_pairs.push_back(candidates[i]);
  }

  for (std::size_t i = 0; i < preservation_targets.size(); ++i) {
    const EigenPair& pres = preservation_targets[i];
    EigenReport open_r = check_right_eigenpair(sys.f, pres, opt.check);
    rep.add_stage("preserve_open[" + std::to_string(i) + "]", open_r.verdict,
                  open_r.max_residual);
    EigenReport inv_r = check_right_preservation(pres.vector, sys.g, k_candidate, opt.check);
    rep.add_stage("preserve_invariance[" + std::to_string(i) + "]", inv_r.verdict,
                  inv_r.max_residual);
    EigenReport closed_r = check_right_eigenpair(rep.closed_loop, pres, opt.check);
    rep.add_stage("preserve_closed[" + std::to_string(i) + "]", closed_r.verdict,
                  closed_r.max_residual);
  }

  rep.verdict = true;
  for (const StageRecord& st : rep.stages) rep.verdict = rep.verdict && st.verdict;
  return rep;
}

AssignmentReport assign_left(const ObserverProblem& prob, const ExoSystem& exo, int N,
                             const std::vector<EigenPair>& preservation_targets,
                             const std::optional<PolyVec>& rho_candidate,
                             const std::optional<PolyVec>& r_given, const AssignOptions& opt) {
  AssignmentReport rep;

  ErrorSystem es;
  try {
    es = build_error_system(prob, opt.check);
    rep.add_stage("error_system", true);
  } catch (const Error& e) {
    rep.add_stage("error_system", false, -1.0, e.what());
    rep.verdict = false;
    return rep;
  }
  const int nz = es.F.dim();
  const int bigm = es.H.dim();
  const SamplingBox zbox = opt.box ? *opt.box : default_box(nz);

  exo.validate();
  for (std::size_t i = 0; i < exo.targets.size(); ++i) {
    EigenReport r = check_left_eigenpair(exo.s, exo.targets[i], opt.check);
    rep.add_stage("exo_target[" + std::to_string(i) + "]", r.verdict, r.max_residual);
  }

  const int nu = exo.s.dim();
  PolyVec rho = PolyVec::zero(nu, nz);
  if (rho_candidate) {
    rho = *rho_candidate;
    if (rho.dim() != nu || rho.num_vars() != nz)
      throw DimensionError("rho must map the error-system state to the exo space");

    if (r_given) {
      // Injection consistency: r(-rho(z), H(z)) = (drho/dz) q(z, H(z)).
      PolyVec minus_rho = -rho;
      std::vector<Polynomial> sub = minus_rho.entries();
      sub.insert(sub.end(), es.H.entries().begin(), es.H.entries().end());
      PolyVec lhs = r_given->compose(std::span<const Polynomial>(sub));
      PolyVec res = lhs - jacobian(rho) * es.q_of_z;
      const double mr = max_coeff_residual(res);
      const double tol = opt.check.resolve(
          std::max({rho.max_coeff_modulus(), r_given->max_coeff_modulus(),
                    es.q_of_z.max_coeff_modulus()}));
      rep.add_stage("injection_consistency", mr <= tol, mr);

      DualSylvesterProblem dp{es.F, es.H, *r_given, exo.s};
      ResidualReport rr = dual_sylvester_residual(dp, rho, N);
      rep.add_stage("dual_sylvester_residual",
                    rr.max_through_degree <= opt.check.resolve(rho.max_coeff_modulus()),
                    rr.max_through_degree, rr.identically_zero ? "holds globally" : "");
      SylvesterSolution sol;
      sol.pi = rho;
      sol.truncation_degree = N;
      sol.per_degree_residual.assign(rr.per_degree.begin() + 1, rr.per_degree.end());
      sol.resonance_margin = -1.0;  // certified, not solved
      rep.solution = sol;
    } else {
      // With r eliminated through the injection identity the PDE reads
      // -s(-rho) = (drho/dz)(F + q).
      DualSylvesterProblem dp{es.F + es.q_of_z, es.H, PolyVec::zero(nu, nu + bigm), exo.s};
      ResidualReport rr = dual_sylvester_residual(dp, rho, N);
      rep.add_stage("dual_sylvester_residual",
                    rr.max_through_degree <= opt.check.resolve(rho.max_coeff_modulus()),
                    rr.max_through_degree, rr.identically_zero ? "holds globally" : "");
      SylvesterSolution sol;
      sol.pi = rho;
      sol.truncation_degree = N;
      sol.per_degree_residual.assign(rr.per_degree.begin() + 1, rr.per_degree.end());
      sol.resonance_margin = -1.0;
      rep.solution = sol;
    }
  } else {
    DualSylvesterProblem dp{es.F + es.q_of_z, es.H, PolyVec::zero(nu, nu + bigm), exo.s};
    try {
      rep.solution = solve_dual_sylvester_series(dp, N, opt.series);
      rho = rep.solution->pi;
      double worst = 0.0;
      for (double r : rep.solution->per_degree_residual) worst = std::max(worst, r);
      rep.add_stage("dual_sylvester_solve",
                    worst <= opt.check.resolve(rho.max_coeff_modulus()), worst);
    } catch (const Error& e) {
      rep.add_stage("dual_sylvester_solve", false, -1.0, e.what());
      rep.verdict = false;
      return rep;
    }
  }

  rep.closed_loop = es.F + es.q_of_z;

  for (std::size_t i = 0; i < exo.targets.size(); ++i) {
    EigenPair cand;
    try {
      cand = construct_left_candidate(rho, exo.targets[i]);
    } catch (const Error& e) {
      rep.add_stage("candidate[" + std::to_string(i) + "]", false, -1.0, e.what());
      continue;
    }
    double min_norm = std::numeric_limits<double>::infinity();
    for (const auto& pt : sample_grid(zbox, opt.grid)) {
      std::vector<Complex> cpt(pt.size());
      for (std::size_t j = 0; j < pt.size(); ++j) cpt[j] = Complex(pt[j], 0.0);
      double norm = 0.0;
      for (const Complex& c : cand.vector.eval(cpt)) norm += std::norm(c);
      min_norm = std::min(min_norm, std::sqrt(norm));
    }
    rep.add_stage("candidate[" + std::to_string(i) + "]", min_norm > 1e-9, min_norm,
                  "min |v~| on sampled box");
    EigenReport r = check_left_eigenpair(rep.closed_loop, cand, opt.check);
    rep.add_stage("closed_loop_pair[" + std::to_string(i) + "]", r.verdict, r.max_residual,
                  r.verdict ? "holds globally" : "");
    rep.closed_loop_pairs.push_back(std::move(cand));
  }

  for (std::size_t i = 0; i < preservation_targets.size(); ++i) {
    const EigenPair& pres = preservation_targets[i];
    EigenReport open_r = check_left_eigenpair(es.F, pres, opt.check);
    rep.add_stage("preserve_open[" + std::to_string(i) + "]", open_r.verdict,
                  open_r.max_residual);
    EigenReport inv_r = check_left_preservation(pres.vector, es.q_of_z, opt.check);
    rep.add_stage("preserve_invariance[" + std::to_string(i) + "]", inv_r.verdict,
                  inv_r.max_residual);
    EigenReport closed_r = check_left_eigenpair(rep.closed_loop, pres, opt.check);
    rep.add_stage("preserve_closed[" + std::to_string(i) + "]", closed_r.verdict,
                  closed_r.max_residual);
  }

  rep.verdict = true;
  for (const StageRecord& st : rep.stages) rep.verdict = rep.verdict && st.verdict;
  return rep;
}

LinearAssignmentReport linear_partial_assign(const LinearSylvesterProblem& prob,
                                             double contain_tol) {
  LinearAssignmentReport rep;
  rep.sylvester = solve_linear_sylvester(prob);
  rep.K = feedback_from_embedding(prob.L, rep.sylvester.pi);
  rep.closed_loop_eigenvalues = eigenvalues(prob.A + prob.B * rep.K);
  const Eigen::VectorXcd target = eigenvalues(prob.S);
  for (int i = 0; i < target.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < rep.closed_loop_eigenvalues.size(); ++j)
      best = std::min(best, std::abs(target(i) - rep.closed_loop_eigenvalues(j)));
    rep.containment_error = std::max(rep.containment_error, best);
  }
  rep.verdict = rep.containment_error <= contain_tol * (1.0 + target.cwiseAbs().maxCoeff());
  return rep;
}

}  // namespace nlea
