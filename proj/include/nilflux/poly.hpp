#ifndef NILFLUX_POLY_HPP
#define NILFLUX_POLY_HPP

#include "nilflux/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace nilflux {

/// Sparse monomial: variable name -> positive exponent.
using Monomial = std::map<std::string, int>;

/// The reserved isotopy-time symbol. Manifold coordinates may not use it.
inline const std::string kTimeSymbol = "u";

/// Exact multivariate polynomial over the rationals. Variables are named;
/// manifold coordinates, the time symbol u, and free parameters (a, b, ...)
/// all live in the same ring. Canonical form: no stored zero coefficients.
class PolyScalar {
public:
    PolyScalar() = default;
    PolyScalar(const Rational& c);
    PolyScalar(long c) : PolyScalar(Rational(c)) {}

    static PolyScalar variable(const std::string& name);
    static PolyScalar monomial(const Monomial& m, const Rational& c);

    bool is_zero() const { return terms_.empty(); }
    /// True when no variables occur at all.
    bool is_constant() const;
    /// True when none of `vars` occur (other variables may).
    bool is_constant_in(const std::vector<std::string>& vars) const;
    bool depends_on(const std::string& var) const;

    /// Value of a constant polynomial; throws otherwise.
    Rational constant_value() const;
    /// Coefficient of the given monomial (zero if absent).
    Rational coefficient(const Monomial& m) const;

    int degree_in(const std::string& var) const;
    /// Total degree counting only the listed variables.
    int total_degree_in(const std::vector<std::string>& vars) const;

    PolyScalar operator-() const;
    PolyScalar& operator+=(const PolyScalar& rhs);
    PolyScalar& operator-=(const PolyScalar& rhs);
    friend PolyScalar operator+(PolyScalar a, const PolyScalar& b) { return a += b; }
    friend PolyScalar operator-(PolyScalar a, const PolyScalar& b) { return a -= b; }
    friend PolyScalar operator*(const PolyScalar& a, const PolyScalar& b);
    PolyScalar& operator*=(const PolyScalar& rhs) { return *this = *this * rhs; }
    PolyScalar operator*(const Rational& c) const;
    PolyScalar pow(int exponent) const;

    friend bool operator==(const PolyScalar& a, const PolyScalar& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const PolyScalar& a, const PolyScalar& b) { return !(a == b); }
    bool operator<(const PolyScalar& rhs) const { return terms_ < rhs.terms_; }

    /// Simultaneous substitution of variables by polynomials.
    PolyScalar substitute(const std::map<std::string, PolyScalar>& assignment) const;

    PolyScalar derivative(const std::string& var) const;

    /// Definite integral of the polynomial in `var` over [0, 1];
    /// the result no longer involves `var`.
    PolyScalar integrate_unit(const std::string& var) const;

    /// Affine view in the given variables: writes the polynomial as
    /// c0 + sum_i c_i * vars[i] with all c rational constants.
    /// Fails (returns false) when the polynomial is not affine in `vars`
    /// or involves any variable outside `vars`.
    bool affine_decompose(const std::vector<std::string>& vars,
                          Rational& constant_out,
                          std::vector<Rational>& coeffs_out) const;

    const std::map<Monomial, Rational>& terms() const { return terms_; }

    /// Deterministic text form, e.g. "1/2*s^2*u - 3".
    std::string str() const;

private:
    void prune();
    std::map<Monomial, Rational> terms_;
};

inline PolyScalar operator*(const Rational& c, const PolyScalar& p) { return p * c; }

} // namespace nilflux

#endif
