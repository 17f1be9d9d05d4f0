#ifndef NLEA_TEST_SUPPORT_HPP
#define NLEA_TEST_SUPPORT_HPP

#include <random>
#include <string>
#include <vector>

#include "nlea/expr.hpp"
#include "nlea/polynomial.hpp"

namespace nlea_test {

using nlea::Complex;
using nlea::Monomial;
using nlea::Polynomial;
using nlea::PolyVec;

inline const std::vector<std::string> kX12 = {"x1", "x2"};
inline const std::vector<std::string> kW = {"w"};

inline Polynomial P(const std::string& src, const std::vector<std::string>& vars) {
  return nlea::parse_poly(src, vars);
}

inline PolyVec V(const std::vector<std::string>& srcs, const std::vector<std::string>& vars) {
  std::vector<Polynomial> entries;
  for (const auto& s : srcs) entries.push_back(P(s, vars));
  return PolyVec(std::move(entries));
}

/// Coefficients on the grid k/8 are exactly representable and stay exact
/// through products and serialization.
inline double grid_coeff(std::mt19937& rng) {
  std::uniform_int_distribution<int> k(-16, 16);
  int v = 0;
  while (v == 0) v = k(rng);
  return v / 8.0;
}

inline Polynomial random_poly(std::mt19937& rng, int nvars, int max_exp, bool complex_coeffs,
                              int num_terms = 5) {
  std::uniform_int_distribution<int> expd(0, max_exp);
  Polynomial p(nvars);
  for (int t = 0; t < num_terms; ++t) {
    Monomial m(nvars);
    for (int i = 0; i < nvars; ++i) m[i] = expd(rng);
    const double re = grid_coeff(rng);
    const double im = complex_coeffs ? grid_coeff(rng) : 0.0;
    p.add_term(m, Complex(re, im));
  }
  return p;
}

inline PolyVec random_field(std::mt19937& rng, int nvars, int max_exp, bool complex_coeffs) {
  std::vector<Polynomial> entries;
  for (int i = 0; i < nvars; ++i)
    entries.push_back(random_poly(rng, nvars, max_exp, complex_coeffs));
  return PolyVec(std::move(entries));
}

inline std::vector<Complex> random_point(std::mt19937& rng, int nvars) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Complex> pt(nvars);
  for (auto& c : pt) c = Complex(u(rng), u(rng));
  return pt;
}

}  // namespace nlea_test

#endif
