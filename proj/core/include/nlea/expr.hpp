#ifndef NLEA_EXPR_HPP
#define NLEA_EXPR_HPP

#include <string>
#include <string_view>
#include <vector>

#include "nlea/polynomial.hpp"

namespace nlea {

/// Parse a polynomial expression over the named variables.
///
/// Grammar: sums of signed terms; terms are products of factors joined by
/// `*` (optional between factors) or divided by a numeric literal; factors
/// are numbers, the imaginary unit `i`, variable names, parenthesized sums,
/// and `base^k` powers with non-negative integer k. Examples:
///   "-x1 - x1^2/2 + x1*x2 + 2*x2 - x2^2"
///   "-1 + 2*x2 + 2*i*x1"
///   "(1+2*i)*(x1 - x2)^2"
/// Throws ParseError on malformed input or unknown identifiers.
Polynomial parse_poly(std::string_view src, const std::vector<std::string>& vars);

/// Canonical expression string; parse_poly(to_expression_string(p, vars), vars)
/// reproduces p exactly.
std::string to_expression_string(const Polynomial& p, const std::vector<std::string>& vars);

}  // namespace nlea

#endif  // NLEA_EXPR_HPP
