#ifndef NLEA_POLYNOMIAL_HPP
#define NLEA_POLYNOMIAL_HPP

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nlea/errors.hpp"

namespace nlea {

using Complex = std::complex<double>;

/// Exponent multi-index; entry i is the power of variable i.
using Monomial = std::vector<int>;

/// Graded lexicographic order: total degree first, then lexicographic.
/// Gives every polynomial a canonical term order for serialization and
/// comparison.
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Sparse multivariate polynomial with complex double coefficients.
///
/// Values are immutable in spirit: every operation returns a new polynomial
/// and leaves its operands untouched, so instances can be shared freely
/// across threads. Coefficients whose modulus falls below
/// prune_threshold() of the result are dropped after every operation, which
/// keeps identities that hold exactly at the coefficient level exact under
/// floating point.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Complex, GradedLexLess>;

  /// Relative pruning threshold: terms with |c| < kPruneRel*(1+max|c|) die.
  static constexpr double kPruneRel = 1e-12;

  Polynomial() : num_vars_(0) {}
  explicit Polynomial(int num_vars);

  static Polynomial zero(int num_vars) { return Polynomial(num_vars); }
  static Polynomial constant(int num_vars, Complex c);
  static Polynomial variable(int num_vars, int index);
  static Polynomial monomial(int num_vars, Monomial exponents, Complex c);

  int num_vars() const { return num_vars_; }
  bool is_zero() const { return terms_.empty(); }
  /// Total degree; -1 for the zero polynomial.
  int total_degree() const;
  const TermMap& terms() const { return terms_; }
  Complex coeff(const Monomial& m) const;
  /// Largest coefficient modulus; 0 for the zero polynomial.
  double max_coeff_modulus() const;
  /// Largest |imaginary part| over all coefficients.
  double max_imag_modulus() const;

  Polynomial operator-() const;
  Polynomial operator+(const Polynomial& rhs) const;
  Polynomial operator-(const Polynomial& rhs) const;
  Polynomial operator*(const Polynomial& rhs) const;
  Polynomial operator*(Complex scalar) const;
  Polynomial operator*(double scalar) const { return *this * Complex(scalar, 0.0); }

  /// Formal partial derivative with respect to variable `var`.
  Polynomial partial(int var) const;

  /// Substitute subst[i] for variable i and expand. All substituted
  /// polynomials must share a variable count, which becomes the result's.
  Polynomial compose(std::span<const Polynomial> subst) const;

  /// Sum of the terms of total degree exactly k.
  Polynomial homogeneous_part(int k) const;
  /// Sum of the terms of total degree <= max_degree.
  Polynomial truncated(int max_degree) const;

  Complex eval(std::span<const Complex> point) const;
  /// Evaluation at a real point using only the real parts of the
  /// coefficients; callers are expected to have checked max_imag_modulus().
  double eval_real(std::span<const double> point) const;

  bool operator==(const Polynomial& rhs) const {
    return num_vars_ == rhs.num_vars_ && terms_ == rhs.terms_;
  }

  /// Add c * x^m in place (used by builders/parsers), then prune.
  void add_term(const Monomial& m, Complex c);

 private:
  void prune();

  int num_vars_;
  TermMap terms_;
};

inline Polynomial operator*(Complex scalar, const Polynomial& p) { return p * scalar; }
inline Polynomial operator*(double scalar, const Polynomial& p) { return p * scalar; }

/// Column vector of polynomials over a common variable set. Never empty.
class PolyVec {
 public:
  PolyVec() = default;
  explicit PolyVec(std::vector<Polynomial> entries);
  PolyVec(std::initializer_list<Polynomial> entries)
      : PolyVec(std::vector<Polynomial>(entries)) {}

  static PolyVec zero(int dim, int num_vars);

  int dim() const { return static_cast<int>(entries_.size()); }
  int num_vars() const;
  const Polynomial& operator[](int i) const { return entries_[i]; }
  Polynomial& operator[](int i) { return entries_[i]; }
  const std::vector<Polynomial>& entries() const { return entries_; }

  PolyVec operator+(const PolyVec& rhs) const;
  PolyVec operator-(const PolyVec& rhs) const;
  PolyVec operator-() const;
  /// Entrywise product with a scalar polynomial (e.g. lambda * v).
  PolyVec scaled(const Polynomial& s) const;
  PolyVec scaled(Complex s) const;

  PolyVec compose(std::span<const Polynomial> subst) const;
  PolyVec homogeneous_part(int k) const;
  PolyVec truncated(int max_degree) const;

  bool is_zero() const;
  double max_coeff_modulus() const;
  std::vector<Complex> eval(std::span<const Complex> point) const;
  std::vector<double> eval_real(std::span<const double> point) const;

  bool operator==(const PolyVec& rhs) const { return entries_ == rhs.entries_; }

 private:
  std::vector<Polynomial> entries_;
};

/// Dense rows x cols grid of polynomials over a common variable set.
class PolyMatrix {
 public:
  PolyMatrix() : rows_(0), cols_(0) {}
  PolyMatrix(int rows, int cols, int num_vars);

  static PolyMatrix from_rows(const std::vector<std::vector<Polynomial>>& rows);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int num_vars() const;
  const Polynomial& at(int r, int c) const { return data_[index(r, c)]; }
  Polynomial& at(int r, int c) { return data_[index(r, c)]; }

  /// Matrix-vector product (rows x cols) * (cols) -> (rows).
  PolyVec operator*(const PolyVec& v) const;
  PolyMatrix compose(std::span<const Polynomial> subst) const;

 private:
  std::size_t index(int r, int c) const { return static_cast<std::size_t>(r) * cols_ + c; }

  int rows_, cols_;
  std::vector<Polynomial> data_;
};

/// Jacobian matrix: entry (i, j) = d v_i / d x_j.
PolyMatrix jacobian(const PolyVec& v);

/// Row-vector times matrix: result_j = sum_i v_i * m(i, j).
PolyVec row_times_matrix(const PolyVec& v, const PolyMatrix& m);

/// Directional derivative along a field: grad(p) . f.
Polynomial derivative_along(const Polynomial& p, const PolyVec& f);

/// max over entries of max_coeff_modulus; the residual metric for identity
/// checks.
double max_coeff_residual(const PolyVec& v);

}  // namespace nlea

#endif  // NLEA_POLYNOMIAL_HPP
