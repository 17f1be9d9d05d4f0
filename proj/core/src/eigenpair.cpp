#include "nlea/eigenpair.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace nlea {

void EigenPair::validate() const {
  if (vector.is_zero()) throw PreconditionError("eigenvector must not be identically zero");
  if (value.num_vars() != vector.num_vars())
    throw DimensionError("eigenvalue / eigenvector variable counts differ");
}

PolyVec lie_bracket(const PolyVec& v, const PolyVec& s) {
  if (v.dim() != s.dim() || v.num_vars() != s.num_vars())
    throw DimensionError("lie_bracket: fields must share dimension and variables");
  if (v.dim() != v.num_vars())
    throw DimensionError("lie_bracket: fields must be square (dim == num_vars)");
  return jacobian(s) * v - jacobian(v) * s;
}

namespace {

EigenReport report_from_residual(PolyVec residual, double input_scale, const CheckOptions& opt) {
  EigenReport rep;
  rep.max_residual = max_coeff_residual(residual);
  rep.residual = std::move(residual);
  rep.tolerance = opt.resolve(input_scale);
  rep.verdict = rep.max_residual <= rep.tolerance;
  return rep;
}

}  // namespace

EigenReport check_right_eigenpair(const PolyVec& s, const EigenPair& pair,
                                  const CheckOptions& opt) {
  pair.validate();
  if (pair.side != EigenSide::Right)
    throw PreconditionError("check_right_eigenpair: pair is not a right pair");
  if (pair.vector.dim() != s.dim() || pair.vector.num_vars() != s.num_vars())
    throw DimensionError("check_right_eigenpair: dimension mismatch");

  PolyVec residual = lie_bracket(pair.vector, s) - pair.vector.scaled(pair.value);
  const double scale = std::max({s.max_coeff_modulus(), pair.vector.max_coeff_modulus(),
                                 pair.value.max_coeff_modulus()});
  return report_from_residual(std::move(residual), scale, opt);
}

EigenReport check_left_eigenpair(const PolyVec& s, const EigenPair& pair,
                                 const CheckOptions& opt) {
  pair.validate();
  if (pair.side != EigenSide::Left)
    throw PreconditionError("check_left_eigenpair: pair is not a left pair");
  if (pair.vector.dim() != s.dim() || pair.vector.num_vars() != s.num_vars())
    throw DimensionError("check_left_eigenpair: dimension mismatch");

  // v^T (ds/dw) + ((dv/dw) s)^T - lambda v^T, as a row vector.
  PolyVec vJs = row_times_matrix(pair.vector, jacobian(s));
  PolyVec vdot = jacobian(pair.vector) * s;
  PolyVec residual = vJs + vdot - pair.vector.scaled(pair.value);
  const double scale = std::max({s.max_coeff_modulus(), pair.vector.max_coeff_modulus(),
                                 pair.value.max_coeff_modulus()});
  return report_from_residual(std::move(residual), scale, opt);
}

EigenReport check_right_preservation(const PolyVec& v, const PolyMatrix& g, const PolyVec& k,
                                     const CheckOptions& opt) {
  if (g.cols() != k.dim()) throw DimensionError("check_right_preservation: g/k shapes differ");
  if (g.rows() != v.dim() || g.num_vars() != v.num_vars() || k.num_vars() != v.num_vars())
    throw DimensionError("check_right_preservation: dimension mismatch");
  PolyVec residual = lie_bracket(v, g * k);
  const double scale =
      std::max({v.max_coeff_modulus(), k.max_coeff_modulus(), (g * k).max_coeff_modulus()});
  return report_from_residual(std::move(residual), scale, opt);
}

EigenReport check_left_preservation(const PolyVec& v, const PolyVec& q_of_z,
                                    const CheckOptions& opt) {
  if (v.dim() != q_of_z.dim() || v.num_vars() != q_of_z.num_vars())
    throw DimensionError("check_left_preservation: dimension mismatch");
  PolyVec residual = row_times_matrix(v, jacobian(q_of_z)) + jacobian(v) * q_of_z;
  const double scale = std::max(v.max_coeff_modulus(), q_of_z.max_coeff_modulus());
  return report_from_residual(std::move(residual), scale, opt);
}

StabilityReport check_stability_conditions(const std::vector<EigenPair>& pairs, const PolyVec& s,
                                           const SamplingBox& box, int grid,
                                           const StabilityOptions& opt) {
  const int nu = s.dim();
  if (static_cast<int>(pairs.size()) != nu)
    throw DimensionError("check_stability_conditions: need one pair per state dimension");
  for (const EigenPair& p : pairs) p.validate();

  StabilityReport rep;

  // (a) pairwise commutation as an exact polynomial identity.
  rep.commutation_ok = true;
  double scale = s.max_coeff_modulus();
  for (const EigenPair& p : pairs)
    scale = std::max({scale, p.vector.max_coeff_modulus(), p.value.max_coeff_modulus()});
  const double ident_tol = opt.identity.resolve(scale);
  for (int i = 0; i < nu; ++i) {
    for (int j = i + 1; j < nu; ++j) {
      const double r = max_coeff_residual(lie_bracket(pairs[i].vector, pairs[j].vector));
      rep.commutation_max_residual = std::max(rep.commutation_max_residual, r);
      if (r > ident_tol) {
        rep.commutation_ok = false;
        rep.commutation_failures.emplace_back(i, j);
      }
    }
  }

  // (b), (c) sampled conditions over the grid.
  const auto points = sample_grid(box, grid);
  rep.points_sampled = static_cast<int>(points.size());
  rep.span_ok = true;
  rep.min_singular_value = std::numeric_limits<double>::infinity();
  rep.sign_checks.resize(nu);
  for (auto& sc : rep.sign_checks) sc.nonpositive_everywhere = true;

  for (const auto& pt : points) {
    std::vector<Complex> cpt(pt.size());
    for (std::size_t i = 0; i < pt.size(); ++i) cpt[i] = Complex(pt[i], 0.0);

    Eigen::MatrixXcd V(nu, nu);
    for (int j = 0; j < nu; ++j) {
      const auto col = pairs[j].vector.eval(cpt);
      for (int i = 0; i < nu; ++i) V(i, j) = col[i];
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
    const double smin = svd.singularValues().minCoeff();
    if (smin < rep.min_singular_value) {
      rep.min_singular_value = smin;
      rep.span_worst_point = pt;
    }
    if (smin <= opt.rank_tol) rep.span_ok = false;

    for (int j = 0; j < nu; ++j) {
      const double re = pairs[j].value.eval(cpt).real();
      auto& sc = rep.sign_checks[j];
      if (re > opt.sign_slack && (sc.nonpositive_everywhere || re > sc.violation_value)) {
        sc.nonpositive_everywhere = false;
        sc.violation_point = pt;
        sc.violation_value = re;
      }
      if (re < -opt.strict_neg && (!sc.strictly_negative_somewhere || re < sc.witness_value)) {
        sc.strictly_negative_somewhere = true;
        sc.witness_point = pt;
        sc.witness_value = re;
      }
    }
  }

  rep.sign_ok = true;
  for (const auto& sc : rep.sign_checks)
    if (!sc.nonpositive_everywhere || !sc.strictly_negative_somewhere) rep.sign_ok = false;

  rep.verdict = rep.commutation_ok && rep.span_ok && rep.sign_ok && rep.points_sampled > 0;
  return rep;
}

}  // namespace nlea
