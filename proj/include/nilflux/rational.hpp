#ifndef NILFLUX_RATIONAL_HPP
#define NILFLUX_RATIONAL_HPP

#include <boost/multiprecision/gmp.hpp>
#include <string>
#include <vector>

namespace nilflux {

// Exact arithmetic everywhere. All rationals are kept canonical: values are
// only ever created from integers and ring operations, never from raw
// numerator/denominator pairs.
using Integer =
    boost::multiprecision::number<boost::multiprecision::gmp_int, boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

/// Builds the canonical rational p/q. q must be nonzero.
Rational make_rational(const Integer& p, const Integer& q);

/// Parses "p", "-p" or "p/q" with integer p, q. Decimal notation such as
/// "0.33" is rejected rather than rounded.
Rational parse_rational(const std::string& text);

/// Canonical text form: "p" for integers, "p/q" otherwise.
std::string rational_to_string(const Rational& r);

bool is_integer(const Rational& r);

/// Largest integer <= r.
Integer floor_int(const Rational& r);
/// Smallest integer >= r.
Integer ceil_int(const Rational& r);

/// Lexicographic comparison of rational vectors (used for canonical orderings).
int compare_vectors(const std::vector<Rational>& a, const std::vector<Rational>& b);

} // namespace nilflux

#endif
