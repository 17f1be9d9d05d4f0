#include "nlea/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nlea {

namespace {

int degree_of(const Monomial& m) {
  return std::accumulate(m.begin(), m.end(), 0);
}

}  // namespace

bool GradedLexLess::operator()(const Monomial& a, const Monomial& b) const {
  const int da = degree_of(a);
  const int db = degree_of(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Polynomial::Polynomial(int num_vars) : num_vars_(num_vars) {
  if (num_vars < 1) throw DimensionError("polynomial needs at least one variable");
}

Polynomial Polynomial::constant(int num_vars, Complex c) {
  Polynomial p(num_vars);
  p.add_term(Monomial(num_vars, 0), c);
  return p;
}

Polynomial Polynomial::variable(int num_vars, int index) {
  Polynomial p(num_vars);
  if (index < 0 || index >= num_vars) throw DimensionError("variable index out of range");
  Monomial m(num_vars, 0);
  m[index] = 1;
  p.add_term(m, Complex(1.0, 0.0));
  return p;
}

Polynomial Polynomial::monomial(int num_vars, Monomial exponents, Complex c) {
  Polynomial p(num_vars);
  if (static_cast<int>(exponents.size()) != num_vars)
    throw DimensionError("exponent vector length != num_vars");
  for (int e : exponents)
    if (e < 0) throw DimensionError("negative exponent");
  p.add_term(exponents, c);
  return p;
}

int Polynomial::total_degree() const {
  if (terms_.empty()) return -1;
  // Graded order: the last term has maximal total degree.
  return degree_of(terms_.rbegin()->first);
}

Complex Polynomial::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
}

double Polynomial::max_coeff_modulus() const {
  double m = 0.0;
  for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

double Polynomial::max_imag_modulus() const {
  double m = 0.0;
  for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c.imag()));
  return m;
}

void Polynomial::add_term(const Monomial& m, Complex c) {
  if (static_cast<int>(m.size()) != num_vars_)
    throw DimensionError("monomial length != num_vars");
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) it->second += c;
  prune();
}

void Polynomial::prune() {
  double maxmod = 0.0;
  for (const auto& [m, c] : terms_) maxmod = std::max(maxmod, std::abs(c));
  const double thr = kPruneRel * (1.0 + maxmod);
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) < thr)
      it = terms_.erase(it);
    else
      ++it;
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial r(num_vars_);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
  return r;
}

Polynomial Polynomial::operator+(const Polynomial& rhs) const {
  if (num_vars_ != rhs.num_vars_) throw DimensionError("operand variable counts differ");
  Polynomial r(num_vars_);
  r.terms_ = terms_;
  for (const auto& [m, c] : rhs.terms_) {
    auto [it, inserted] = r.terms_.try_emplace(m, c);
    if (!inserted) it->second += c;
  }
  r.prune();
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& rhs) const { return *this + (-rhs); }

Polynomial Polynomial::operator*(const Polynomial& rhs) const {
  if (num_vars_ != rhs.num_vars_) throw DimensionError("operand variable counts differ");
  Polynomial r(num_vars_);
  Monomial prod(num_vars_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : rhs.terms_) {
      for (int i = 0; i < num_vars_; ++i) prod[i] = ma[i] + mb[i];
      auto [it, inserted] = r.terms_.try_emplace(prod, ca * cb);
      if (!inserted) it->second += ca * cb;
    }
  }
  r.prune();
  return r;
}

Polynomial Polynomial::operator*(Complex scalar) const {
  Polynomial r(num_vars_);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * scalar);
  r.prune();
  return r;
}

Polynomial Polynomial::partial(int var) const {
  if (var < 0 || var >= num_vars_) throw DimensionError("partial: variable index out of range");
  Polynomial r(num_vars_);
  for (const auto& [m, c] : terms_) {
    if (m[var] == 0) continue;
    Monomial d = m;
    d[var] -= 1;
    r.terms_.emplace(std::move(d), c * static_cast<double>(m[var]));
  }
  r.prune();
  return r;
}

Polynomial Polynomial::compose(std::span<const Polynomial> subst) const {
  if (static_cast<int>(subst.size()) != num_vars_)
    throw DimensionError("compose: substitution arity != num_vars");
  const int out_vars = subst.empty() ? 0 : subst[0].num_vars();
  for (const Polynomial& q : subst)
    if (q.num_vars() != out_vars)
      throw DimensionError("compose: substituted polynomials disagree on num_vars");

  // Per-variable power tables up to the highest exponent actually used.
  std::vector<int> max_exp(num_vars_, 0);
  for (const auto& [m, c] : terms_)
    for (int i = 0; i < num_vars_; ++i) max_exp[i] = std::max(max_exp[i], m[i]);

  std::vector<std::vector<Polynomial>> powers(num_vars_);
  for (int i = 0; i < num_vars_; ++i) {
    powers[i].reserve(max_exp[i] + 1);
    powers[i].push_back(Polynomial::constant(out_vars, 1.0));
    for (int e = 1; e <= max_exp[i]; ++e) powers[i].push_back(powers[i].back() * subst[i]);
  }

  Polynomial r(out_vars);
  for (const auto& [m, c] : terms_) {
    Polynomial term = Polynomial::constant(out_vars, c);
    for (int i = 0; i < num_vars_; ++i)
      if (m[i] > 0) term = term * powers[i][m[i]];
    r = r + term;
  }
  return r;
}

Polynomial Polynomial::homogeneous_part(int k) const {
  Polynomial r(num_vars_);
  for (const auto& [m, c] : terms_)
    if (degree_of(m) == k) r.terms_.emplace(m, c);
  return r;
}

Polynomial Polynomial::truncated(int max_degree) const {
  Polynomial r(num_vars_);
  for (const auto& [m, c] : terms_)
    if (degree_of(m) <= max_degree) r.terms_.emplace(m, c);
  return r;
}

Complex Polynomial::eval(std::span<const Complex> point) const {
  if (static_cast<int>(point.size()) != num_vars_)
    throw DimensionError("eval: point dimension != num_vars");
  std::vector<int> max_exp(num_vars_, 0);
  for (const auto& [m, c] : terms_)
    for (int i = 0; i < num_vars_; ++i) max_exp[i] = std::max(max_exp[i], m[i]);
  std::vector<std::vector<Complex>> powers(num_vars_);
  for (int i = 0; i < num_vars_; ++i) {
    powers[i].reserve(max_exp[i] + 1);
    powers[i].push_back(Complex(1.0, 0.0));
    for (int e = 1; e <= max_exp[i]; ++e) powers[i].push_back(powers[i].back() * point[i]);
  }
  Complex acc(0.0, 0.0);
  for (const auto& [m, c] : terms_) {
    Complex t = c;
    for (int i = 0; i < num_vars_; ++i)
      if (m[i] > 0) t *= powers[i][m[i]];
    acc += t;
  }
  return acc;
}

double Polynomial::eval_real(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != num_vars_)
    throw DimensionError("eval_real: point dimension != num_vars");
  std::vector<int> max_exp(num_vars_, 0);
  for (const auto& [m, c] : terms_)
    for (int i = 0; i < num_vars_; ++i) max_exp[i] = std::max(max_exp[i], m[i]);
  std::vector<std::vector<double>> powers(num_vars_);
  for (int i = 0; i < num_vars_; ++i) {
    powers[i].reserve(max_exp[i] + 1);
    powers[i].push_back(1.0);
    for (int e = 1; e <= max_exp[i]; ++e) powers[i].push_back(powers[i].back() * point[i]);
  }
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c.real();
    for (int i = 0; i < num_vars_; ++i)
      if (m[i] > 0) t *= powers[i][m[i]];
    acc += t;
  }
  return acc;
}

PolyVec::PolyVec(std::vector<Polynomial> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw DimensionError("PolyVec must be nonempty");
  const int nv = entries_[0].num_vars();
  for (const Polynomial& p : entries_)
    if (p.num_vars() != nv) throw DimensionError("PolyVec entries disagree on num_vars");
}

PolyVec PolyVec::zero(int dim, int num_vars) {
  return PolyVec(std::vector<Polynomial>(dim, Polynomial::zero(num_vars)));
}

int PolyVec::num_vars() const { return entries_.empty() ? 0 : entries_[0].num_vars(); }

PolyVec PolyVec::operator+(const PolyVec& rhs) const {
  if (dim() != rhs.dim()) throw DimensionError("PolyVec dimensions differ");
  std::vector<Polynomial> out;
  out.reserve(entries_.size());
  for (int i = 0; i < dim(); ++i) out.push_back(entries_[i] + rhs.entries_[i]);
  return PolyVec(std::move(out));
}

PolyVec PolyVec::operator-(const PolyVec& rhs) const { return *this + (-rhs); }

PolyVec PolyVec::operator-() const {
  std::vector<Polynomial> out;
  out.reserve(entries_.size());
  for (const Polynomial& p : entries_) out.push_back(-p);
  return PolyVec(std::move(out));
}

PolyVec PolyVec::scaled(const Polynomial& s) const {
  std::vector<Polynomial> out;
  out.reserve(entries_.size());
  for (const Polynomial& p : entries_) out.push_back(p * s);
  return PolyVec(std::move(out));
}

PolyVec PolyVec::scaled(Complex s) const {
  std::vector<Polynomial> out;
  out.reserve(entries_.size());
  for (const Polynomial& p : entries_) out.push_back(p * s);
  return PolyVec(std::move(out));
}

PolyVec PolyVec::compose(std::span<const Polynomial> subst) const {
  std::vector<Polynomial> out;
  out.reserve(entries_.size());
  for (const Polynomial& p : entries_) out.push_back(p.compose(subst));
  return PolyVec(std::move(out));
}

PolyVec PolyVec::homogeneous_part(int k) const {
  std::vector<Polynomial> out;
  out.reserve(entries_.size());
  for (const Polynomial& p : entries_) out.push_back(p.homogeneous_part(k));
  return PolyVec(std::move(out));
}

PolyVec PolyVec::truncated(int max_degree) const {
  std::vector<Polynomial> out;
  out.reserve(entries_.size());
  for (const Polynomial& p : entries_) out.push_back(p.truncated(max_degree));
  return PolyVec(std::move(out));
}

bool PolyVec::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Polynomial& p) { return p.is_zero(); });
}

double PolyVec::max_coeff_modulus() const {
  double m = 0.0;
  for (const Polynomial& p : entries_) m = std::max(m, p.max_coeff_modulus());
  return m;
}

std::vector<Complex> PolyVec::eval(std::span<const Complex> point) const {
  std::vector<Complex> out;
  out.reserve(entries_.size());
  for (const Polynomial& p : entries_) out.push_back(p.eval(point));
  return out;
}

std::vector<double> PolyVec::eval_real(std::span<const double> point) const {
  std::vector<double> out;
  out.reserve(entries_.size());
  for (const Polynomial& p : entries_) out.push_back(p.eval_real(point));
  return out;
}

PolyMatrix::PolyMatrix(int rows, int cols, int num_vars)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols,
                                      Polynomial::zero(num_vars)) {
  if (rows < 1 || cols < 1) throw DimensionError("PolyMatrix must be nonempty");
}

PolyMatrix PolyMatrix::from_rows(const std::vector<std::vector<Polynomial>>& rows) {
  if (rows.empty() || rows[0].empty()) throw DimensionError("PolyMatrix must be nonempty");
  const int nc = static_cast<int>(rows[0].size());
  const int nv = rows[0][0].num_vars();
  PolyMatrix m(static_cast<int>(rows.size()), nc, nv);
  for (int r = 0; r < m.rows(); ++r) {
    if (static_cast<int>(rows[r].size()) != nc) throw DimensionError("ragged PolyMatrix rows");
    for (int c = 0; c < nc; ++c) {
      if (rows[r][c].num_vars() != nv)
        throw DimensionError("PolyMatrix entries disagree on num_vars");
      m.at(r, c) = rows[r][c];
    }
  }
  return m;
}

int PolyMatrix::num_vars() const { return data_.empty() ? 0 : data_[0].num_vars(); }

PolyVec PolyMatrix::operator*(const PolyVec& v) const {
  if (v.dim() != cols_) throw DimensionError("matrix-vector dimension mismatch");
  std::vector<Polynomial> out;
  out.reserve(rows_);
  for (int r = 0; r < rows_; ++r) {
    Polynomial acc = Polynomial::zero(num_vars());
    for (int c = 0; c < cols_; ++c) acc = acc + at(r, c) * v[c];
    out.push_back(std::move(acc));
  }
  return PolyVec(std::move(out));
}

PolyMatrix PolyMatrix::compose(std::span<const Polynomial> subst) const {
  const int out_vars = subst.empty() ? num_vars() : subst[0].num_vars();
  PolyMatrix m(rows_, cols_, out_vars);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) m.at(r, c) = at(r, c).compose(subst);
  return m;
}

PolyMatrix jacobian(const PolyVec& v) {
  PolyMatrix m(v.dim(), v.num_vars(), v.num_vars());
  for (int i = 0; i < v.dim(); ++i)
    for (int j = 0; j < v.num_vars(); ++j) m.at(i, j) = v[i].partial(j);
  return m;
}

PolyVec row_times_matrix(const PolyVec& v, const PolyMatrix& m) {
  if (v.dim() != m.rows()) throw DimensionError("row-vector/matrix dimension mismatch");
  std::vector<Polynomial> out;
  out.reserve(m.cols());
  for (int j = 0; j < m.cols(); ++j) {
    Polynomial acc = Polynomial::zero(m.num_vars());
    for (int i = 0; i < m.rows(); ++i) acc = acc + v[i] * m.at(i, j);
    out.push_back(std::move(acc));
  }
  return PolyVec(std::move(out));
}

Polynomial derivative_along(const Polynomial& p, const PolyVec& f) {
  if (p.num_vars() != f.num_vars() || f.dim() != p.num_vars())
    throw DimensionError("derivative_along: dimension mismatch");
  Polynomial acc = Polynomial::zero(p.num_vars());
  for (int i = 0; i < f.dim(); ++i) acc = acc + p.partial(i) * f[i];
  return acc;
}

double max_coeff_residual(const PolyVec& v) { return v.max_coeff_modulus(); }

}  // namespace nlea
