#ifndef NILFLUX_POLYHEDRON_HPP
#define NILFLUX_POLYHEDRON_HPP

#include "nilflux/affine.hpp"
#include "nilflux/manifold.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nilflux {

enum class Rel { lt, le };

/// coeffs . x + constant  REL  0 over the owning polyhedron's variables.
struct LinearConstraint {
    RationalVector coeffs;
    Rational constant;
    Rel rel = Rel::le;

    bool satisfied_by(const RationalVector& point) const;
};

/// Conjunction of strict/non-strict affine inequalities over named rational
/// variables. Unconstrained coordinates are simply absent from the list.
class Polyhedron {
public:
    explicit Polyhedron(std::vector<std::string> vars);

    static Polyhedron from_region(const CoordRegion& region, const CoordinateSystem& coords);

    const std::vector<std::string>& vars() const { return vars_; }
    const std::vector<LinearConstraint>& constraints() const { return cons_; }

    void add(LinearConstraint c);
    /// Removes duplicates, trivially-true rows, and same-direction slack.
    void canonicalize();

    /// Exact Fourier-Motzkin projection away from the named variables.
    Polyhedron eliminate(const std::vector<std::string>& drop) const;

    Polyhedron conjunction(const Polyhedron& other) const;
    /// The given constraint replaced by its negation (complement half-space).
    static LinearConstraint negation(const LinearConstraint& c);

    bool contains_point(const RationalVector& point) const;

    std::size_t var_index(const std::string& name) const;

private:
    std::vector<std::string> vars_;
    std::vector<LinearConstraint> cons_;
};

struct FeasibilityResult {
    bool empty;
    RationalVector witness; // a rational point when nonempty
};

/// Exact feasibility via full elimination, with witness reconstruction.
FeasibilityResult is_empty(const Polyhedron& p);

/// Every point of p lies in q (same variable lists).
bool subset_of(const Polyhedron& p, const Polyhedron& q);
bool same_set(const Polyhedron& p, const Polyhedron& q);

/// Exact affine image (forward) or preimage (inverse) of a polyhedron.
enum class Direction { forward, inverse };
Polyhedron apply_affine(const AffineMap& map, const Polyhedron& p, Direction dir);

/// A rule valid on a declared polyhedral domain, together with the set of
/// coordinates the underlying global map fixes pointwise everywhere.
class PartialAffineMap {
public:
    PartialAffineMap(AffineMap rule, Polyhedron domain, std::vector<std::size_t> preserved);

    const AffineMap& rule() const { return rule_; }
    const Polyhedron& domain() const { return domain_; }
    const std::vector<std::size_t>& preserved() const { return preserved_; }

private:
    AffineMap rule_;
    Polyhedron domain_;
    std::vector<std::size_t> preserved_;
};

/// forward: image of P (requires P inside the domain); inverse: preimage of P
/// under the rule (requires the preimage to land inside the domain).
Polyhedron apply_partial(const PartialAffineMap& f, const Polyhedron& p, Direction dir);

} // namespace nilflux

#endif
