#ifndef NILFLUX_LINALG_HPP
#define NILFLUX_LINALG_HPP

#include "nilflux/rational.hpp"

#include <optional>
#include <vector>

namespace nilflux {

using RationalVector = std::vector<Rational>;
using RationalMatrix = std::vector<RationalVector>; // row-major
using IntegerVector = std::vector<Integer>;
using IntegerMatrix = std::vector<IntegerVector>;   // row-major

RationalMatrix identity_matrix(std::size_t n);
RationalVector mat_vec(const RationalMatrix& a, const RationalVector& v);
RationalMatrix mat_mul(const RationalMatrix& a, const RationalMatrix& b);

Rational determinant(RationalMatrix a);
std::optional<RationalMatrix> invert(const RationalMatrix& a);

std::size_t rank(RationalMatrix a);

/// One solution of A x = b, or nullopt when inconsistent.
std::optional<RationalVector> solve(const RationalMatrix& a, const RationalVector& b);

/// Basis of the null space of A (each vector has A x = 0).
std::vector<RationalVector> kernel_basis(const RationalMatrix& a);

/// Extends the span of `have` by those vectors of `candidates` that are
/// independent of it; returns the indices of the chosen candidates.
std::vector<std::size_t> complement_indices(const std::vector<RationalVector>& have,
                                            const std::vector<RationalVector>& candidates);

/// True when v lies in the rational span of the given vectors.
bool in_span(const std::vector<RationalVector>& basis, const RationalVector& v);

/// Column-style Hermite reduction: returns H and unimodular U with A*U = H,
/// H in column echelon form (pivots positive, entries left of a pivot reduced).
struct HermiteResult {
    IntegerMatrix h;
    IntegerMatrix u;
    std::vector<std::size_t> pivot_rows; // row of the pivot of each nonzero column
};
HermiteResult hermite_columns(IntegerMatrix a);

/// General integer solution of A z = b: z = particular + L * t, t integer.
struct IntegerSolveResult {
    IntegerVector particular;
    std::vector<IntegerVector> lattice; // basis of the solution lattice
};
std::optional<IntegerSolveResult> integer_solve(const IntegerMatrix& a, const IntegerVector& b);

} // namespace nilflux

#endif
