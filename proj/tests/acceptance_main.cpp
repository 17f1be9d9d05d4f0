// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Usage: acceptance <problems-dir>
#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <vector>

#include "nlea/expr.hpp"
#include "nlea/problem.hpp"
#include "nlea/simulate.hpp"
#include "nlea/synthesis.hpp"
#include "support.hpp"

using namespace nlea;
using namespace nlea_test;

namespace {

struct Criterion {
  std::string label;
  std::function<bool(std::string&)> run;
};

std::string g_problems_dir;

ProblemSpec load(const std::string& name) {
  return load_problem_file(g_problems_dir + "/" + name);
}

PolyVec check_field(const ProblemSpec& spec, const ProblemSpec::Check& chk) {
  if (spec.obs_p) {
    ObserverProblem prob{*spec.f, *spec.obs_h, *spec.obs_p};
    ErrorSystem es = build_error_system(prob);
    return chk.system == "open" ? es.F : es.F + es.q_of_z;
  }
  if (chk.system == "open") return *spec.f;
  if (chk.has_input) {
    PolyVec u = PolyVec::zero(spec.g->cols(), spec.f->num_vars());
    for (int i = 0; i < u.dim(); ++i)
      u[i] = Polynomial::constant(spec.f->num_vars(), Complex(chk.input, 0.0));
    return *spec.f + *spec.g * u;
  }
  return build_closed_loop(ControlSystem{*spec.f, *spec.g, spec.k});
}

PolyVec linear_field(const Eigen::MatrixXd& M) {
  const int cols = static_cast<int>(M.cols());
  std::vector<Polynomial> out;
  for (int i = 0; i < M.rows(); ++i) {
    Polynomial row(cols);
    for (int j = 0; j < cols; ++j) row = row + Polynomial::variable(cols, j) * M(i, j);
    out.push_back(row);
  }
  return PolyVec(std::move(out));
}

PolyMatrix constant_matrix(const Eigen::MatrixXd& M, int num_vars) {
  PolyMatrix out(static_cast<int>(M.rows()), static_cast<int>(M.cols()), num_vars);
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) out.at(i, j) = Polynomial::constant(num_vars, M(i, j));
  return out;
}

DualSylvesterProblem observer_dual(const ProblemSpec& spec, ErrorSystem& es_out) {
  ObserverProblem prob{*spec.f, *spec.obs_h, *spec.obs_p};
  es_out = build_error_system(prob);
  return DualSylvesterProblem{es_out.F, es_out.H, *spec.r, *spec.s};
}

// ---------------------------------------------------------------------------

bool criterion1(std::string& detail) {
  int checked = 0;
  double worst = 0.0;
  for (const char* file :
       {"motivating.json", "example1.json", "example1_preserve.json", "observer.json"}) {
    ProblemSpec spec = load(file);
    for (const auto& chk : spec.checks) {
      PolyVec field = check_field(spec, chk);
      EigenReport rep = chk.pair.side == EigenSide::Right
                            ? check_right_eigenpair(field, chk.pair)
                            : check_left_eigenpair(field, chk.pair);
      worst = std::max(worst, rep.max_residual);
      if (!rep.verdict || rep.max_residual > 1e-9) return false;
      ++checked;
    }
  }
  detail = std::to_string(checked) + " pairs, worst residual " + std::to_string(worst);
  return checked == 16;
}

bool criterion2(std::string& detail) {
  ProblemSpec ex1 = load("example1.json");
  NonlinearSylvesterProblem prob{*ex1.f, *ex1.g, *ex1.l, *ex1.s};
  ResidualReport primal = sylvester_residual(prob, V({"w", "w"}, {"w"}), 5);
  if (!(primal.max_through_degree == 0.0 && primal.identically_zero)) return false;

  ProblemSpec obs = load("observer.json");
  ErrorSystem es;
  DualSylvesterProblem dual = observer_dual(obs, es);
  ResidualReport dres = dual_sylvester_residual(dual, *obs.rho, 3);
  detail = "primal residual exactly 0; dual residual " +
           std::to_string(dres.max_through_degree) + " through degree 3";
  return dres.max_through_degree <= 1e-10;
}

bool criterion3(std::string& detail) {
  ProblemSpec ex1 = load("example1.json");
  NonlinearSylvesterProblem prob{*ex1.f, *ex1.g, *ex1.l, *ex1.s};
  SeriesOptions opt;
  opt.anchor = embedding_anchor(ex1.targets, ex1.candidates, 1, 2);
  SylvesterSolution sol = solve_nonlinear_sylvester_series(prob, 5, opt);
  const double dev = (sol.pi - V({"w", "w"}, {"w"})).max_coeff_modulus();
  if (dev > 1e-10) return false;
  for (double r : sol.per_degree_residual)
    if (r > 1e-10) return false;

  ProblemSpec obs = load("observer.json");
  ErrorSystem es;
  DualSylvesterProblem dual = observer_dual(obs, es);
  SeriesOptions dopt;
  Eigen::MatrixXd anchor(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) anchor(i, j) = (*obs.anchor)[i][j];
  dopt.anchor = anchor;
  SylvesterSolution dsol = solve_dual_sylvester_series(dual, 3, dopt);
  const double ddev = (dsol.pi - *obs.rho).max_coeff_modulus();
  for (double r : dsol.per_degree_residual)
    if (r > 1e-10) return false;
  detail = "embedding deviation " + std::to_string(dev) + ", reduction deviation " +
           std::to_string(ddev);
  return ddev <= 1e-10;
}

bool criterion4(std::string& detail) {
  ProblemSpec ex1p = load("example1_preserve.json");
  const EigenPair& pres = ex1p.preserve.at(0);
  EigenReport inv = check_right_preservation(pres.vector, *ex1p.g, *ex1p.k);
  if (!inv.verdict || inv.max_residual > 1e-9) return false;
  PolyVec closed = build_closed_loop(ControlSystem{*ex1p.f, *ex1p.g, ex1p.k});
  EigenReport re = check_right_eigenpair(closed, pres);
  if (!re.verdict || re.max_residual > 1e-9) return false;

  ProblemSpec obs = load("observer.json");
  ObserverProblem oprob{*obs.f, *obs.obs_h, *obs.obs_p};
  ErrorSystem es = build_error_system(oprob);
  const EigenPair& opres = obs.preserve.at(0);
  EigenReport linv = check_left_preservation(opres.vector, es.q_of_z);
  if (!linv.verdict || linv.max_residual > 1e-9) return false;
  EigenReport lre = check_left_eigenpair(es.F + es.q_of_z, opres);
  detail = "feedback residual " + std::to_string(inv.max_residual) + ", injection residual " +
           std::to_string(linv.max_residual);
  return lre.verdict && lre.max_residual <= 1e-9;
}

bool criterion5(std::string& detail) {
  std::mt19937 rng(505);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> npick(3, 6), mpick(1, 3), nupick(1, 3);
  int done = 0;
  double worst = 0.0;
  while (done < 50) {
    const int n = npick(rng);
    const int m = std::min(mpick(rng), n);
    const int nu = std::min(nupick(rng), n - 1);
    Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return u(rng); });
    Eigen::MatrixXd B = Eigen::MatrixXd::NullaryExpr(n, m, [&] { return u(rng); });
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(nu, nu);
    for (int i = 0; i < nu; ++i) S(i, i) = -1.0 - 0.7 * i - 0.1 * u(rng);
    Eigen::MatrixXd L = Eigen::MatrixXd::NullaryExpr(m, nu, [&] { return u(rng); });

    // Controllability via the Kalman matrix rank.
    Eigen::MatrixXd ctrb(n, n * m);
    Eigen::MatrixXd Ak = Eigen::MatrixXd::Identity(n, n);
    for (int k = 0; k < n; ++k) {
      ctrb.middleCols(k * m, m) = Ak * B;
      Ak = A * Ak;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> csvd(ctrb);
    if (csvd.singularValues().minCoeff() < 1e-6) continue;

    LinearSylvesterResult lin = solve_linear_sylvester({A, B, L, S});
    if (!lin.unique) continue;
    Eigen::JacobiSVD<Eigen::MatrixXd> psvd(lin.pi);
    if (psvd.singularValues().size() < nu || psvd.singularValues().minCoeff() < 1e-6) continue;

    Eigen::MatrixXd K = feedback_from_embedding(L, lin.pi);
    Eigen::VectorXcd closed = eigenvalues(A + B * K);
    for (int i = 0; i < nu; ++i) {
      double best = 1e300;
      for (int j = 0; j < closed.size(); ++j)
        best = std::min(best, std::abs(closed(j) - Complex(S(i, i), 0)));
      worst = std::max(worst, best);
      if (best > 1e-6) return false;
    }
    ++done;
  }
  detail = "50 instances, worst spectral containment error " + std::to_string(worst);
  return true;
}

bool criterion6(std::string& detail) {
  std::mt19937 rng(606);
  std::uniform_real_distribution<double> mu_dist(-2.0, -0.5);
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  int raised = 0, succeeded = 0;
  for (int t = 0; t < 10; ++t) {
    const double mu = mu_dist(rng);
    const double L = mag(rng);
    const double gamma = mag(rng);
    Eigen::MatrixXd A{{2 * mu, 0}, {0, 3 * mu}};
    PolyVec f = linear_field(A);
    f[0] = f[0] + P("x1^2", kX12) * gamma;
    NonlinearSylvesterProblem prob{f, constant_matrix(Eigen::MatrixXd{{1}, {1}}, 2),
                                   PolyVec({Polynomial::variable(1, 0) * L}),
                                   PolyVec({Polynomial::variable(1, 0) * mu})};
    try {
      solve_nonlinear_sylvester_series(prob, 2);
    } catch (const ResonanceError& e) {
      if (e.degree == 2) ++raised;
    }
  }
  for (int t = 0; t < 10; ++t) {
    const double mu = mu_dist(rng);
    const double L = mag(rng);
    const double gamma = mag(rng);
    Eigen::MatrixXd A{{2.5 * mu, 0}, {0, 3.7 * mu}};
    PolyVec f = linear_field(A);
    f[0] = f[0] + P("x1^2", kX12) * gamma;
    NonlinearSylvesterProblem prob{f, constant_matrix(Eigen::MatrixXd{{1}, {1}}, 2),
                                   PolyVec({Polynomial::variable(1, 0) * L}),
                                   PolyVec({Polynomial::variable(1, 0) * mu})};
    SylvesterSolution sol = solve_nonlinear_sylvester_series(prob, 2);
    bool ok = true;
    for (double r : sol.per_degree_residual)
      ok = ok && r <= 1e-9 * (1.0 + sol.pi.max_coeff_modulus());
    if (ok) ++succeeded;
  }
  detail = std::to_string(raised) + "/10 resonant raised at degree 2, " +
           std::to_string(succeeded) + "/10 controls solved";
  return raised == 10 && succeeded == 10;
}

bool criterion7(std::string& detail) {
  ProblemSpec spec = load("motivating.json");
  auto family = [&](double b) {
    PolyVec u = PolyVec::zero(spec.g->cols(), 2);
    for (int i = 0; i < u.dim(); ++i) u[i] = Polynomial::constant(2, b);
    return *spec.f + *spec.g * u;
  };
  auto rows = sweep(family, {0, 1, 2, 3, 4}, {1.0, 1.0}, 10.0, 1e-3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok || rows[i].validation_error > 1e-6) return false;
    if (!rows[i].metrics.settling_defined) return false;
    if (i > 0) {
      if (!(rows[i].metrics.peak_norm > rows[i - 1].metrics.peak_norm)) return false;
      if (!(rows[i].metrics.settling_time <= rows[i - 1].metrics.settling_time)) return false;
    }
  }
  detail = "peaks " + std::to_string(rows.front().metrics.peak_norm) + " .. " +
           std::to_string(rows.back().metrics.peak_norm) + ", settling " +
           std::to_string(rows.front().metrics.settling_time) + " .. " +
           std::to_string(rows.back().metrics.settling_time);
  return true;
}

bool criterion8(std::string& detail) {
  ProblemSpec obs = load("observer.json");
  ObserverProblem prob{*obs.f, *obs.obs_h, *obs.obs_p};
  ExoSystem exo{*obs.s, obs.targets};
  AssignmentReport rep = assign_left(prob, exo, 3, obs.preserve, obs.rho, obs.r);
  if (!rep.verdict) return false;

  // Restrict the closed loop to the error block.
  std::vector<Polynomial> sub = {Polynomial::zero(2), Polynomial::zero(2),
                                 Polynomial::variable(2, 0), Polynomial::variable(2, 1)};
  PolyVec err({rep.closed_loop[2].compose(sub), rep.closed_loop[3].compose(sub)});

  SimTrace trace = integrate(err, {1.0, 1.0}, 10.0, 1e-3);
  for (std::size_t i = 0; i < trace.times.size(); i += 250) {
    const double t = trace.times[i];
    if (std::abs(trace.states[i][1] - std::exp(-t)) > 1e-6) return false;
    if (std::abs(trace.states[i][0] - (2 * std::exp(-t) - std::exp(-2 * t))) > 1e-6)
      return false;
  }
  const double final_norm = std::hypot(trace.states.back()[0], trace.states.back()[1]);
  detail = "|e(10)| = " + std::to_string(final_norm) + ", matches the closed form to 1e-6";
  return final_norm <= 1e-3;
}

bool criterion9(std::string& detail) {
  ProblemSpec spec = load("example1_preserve.json");
  PolyVec closed = build_closed_loop(ControlSystem{*spec.f, *spec.g, spec.k});
  SamplingBox box{{0.0, -0.9}, {1.0, 0.9}, {}};
  BasinReport rep = basin_probe(closed, box, 21, 20.0, 2e-3, 1e-3);
  detail = std::to_string(rep.converged) + "/" + std::to_string(rep.total) + " converged";
  return rep.total == 441 && rep.fraction == 1.0;
}

bool criterion10(std::string& detail) {
  std::mt19937 rng(1010);
  int cases = 0;

  for (int t = 0; t < 60; ++t) {  // bracket properties
    PolyVec a = random_field(rng, 2, 3, true);
    PolyVec b = random_field(rng, 2, 3, true);
    PolyVec c = random_field(rng, 2, 3, true);
    const double scale = 1.0 + a.max_coeff_modulus() * b.max_coeff_modulus();
    if ((lie_bracket(a, b) + lie_bracket(b, a)).max_coeff_modulus() > 1e-10 * scale)
      return false;
    Complex alpha(grid_coeff(rng), grid_coeff(rng)), beta(grid_coeff(rng), grid_coeff(rng));
    PolyVec lin = lie_bracket(a.scaled(alpha) + b.scaled(beta), c) -
                  (lie_bracket(a, c).scaled(alpha) + lie_bracket(b, c).scaled(beta));
    if (lin.max_coeff_modulus() > 1e-9 * (1 + c.max_coeff_modulus())) return false;
    cases += 2;
  }

  for (int t = 0; t < 60; ++t) {  // Leibniz, exactly
    Polynomial p = random_poly(rng, 2, 3, true);
    Polynomial q = random_poly(rng, 2, 3, true);
    Polynomial lhs = (p * q).partial(t % 2);
    Polynomial rhs = p.partial(t % 2) * q + p * q.partial(t % 2);
    if ((lhs - rhs).max_coeff_modulus() != 0.0) return false;
    ++cases;
  }

  for (int t = 0; t < 60; ++t) {  // compose/eval commutation
    Polynomial p = random_poly(rng, 2, 3, true);
    std::vector<Polynomial> sub = {random_poly(rng, 3, 2, true), random_poly(rng, 3, 2, true)};
    auto pt = random_point(rng, 3);
    Complex got = p.compose(sub).eval(pt);
    Complex want = p.eval(std::vector<Complex>{sub[0].eval(pt), sub[1].eval(pt)});
    if (std::abs(got - want) > 1e-9 * (1.0 + std::abs(want))) return false;
    ++cases;
  }

  {  // RK4 order
    auto err = [](double h) {
      SimTrace t = integrate(PolyVec({-Polynomial::variable(1, 0)}), {1.0}, 1.0, h);
      return std::abs(t.states.back()[0] - std::exp(-1.0));
    };
    const double ratio = err(1e-2) / err(5e-3);
    if (ratio < 14.0 || ratio > 18.0) return false;
    ++cases;
  }

  const std::vector<std::string> vars = {"x1", "x2", "x3"};
  for (int t = 0; t < 200; ++t) {  // serializer round trip
    Polynomial p = random_poly(rng, 3, 3, t % 2 == 0);
    if (parse_poly(to_expression_string(p, vars), vars) != p) return false;
    ++cases;
  }

  detail = std::to_string(cases) + " randomized cases";
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <problems-dir>\n";
    return 2;
  }
  g_problems_dir = argv[1];

  std::vector<Criterion> criteria = {
      {"eigenpair identity suite (16 bundled pairs, residual <= 1e-9)", criterion1},
      {"closed-form solutions satisfy the Sylvester equations", criterion2},
      {"series solvers recover the closed-form solutions", criterion3},
      {"preservation conditions hold and the pairs survive", criterion4},
      {"linear baseline: sigma(S) enters the closed-loop spectrum (50 runs)", criterion5},
      {"resonance raised at degree 2 (10 runs), controls solve (10 runs)", criterion6},
      {"input sweep: peaks increase, settling times do not (b = 0..4)", criterion7},
      {"observer error converges and matches the closed form", criterion8},
      {"basin probe: full convergence on the 21x21 sampled region", criterion9},
      {"property suites: brackets, Leibniz, compose/eval, RK4 order, round trip",
       criterion10},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << (i + 1) << ": "
              << criteria[i].label << (detail.empty() ? "" : " -- " + detail) << "\n";
    if (!ok) ++failures;
  }
  if (failures) {
    std::cout << failures << " of " << criteria.size() << " criteria failed\n";
    return 1;
  }
  std::cout << "all " << criteria.size() << " criteria passed\n";
  return 0;
}
