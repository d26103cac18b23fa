#ifndef NILFLUX_DISPLACEMENT_HPP
#define NILFLUX_DISPLACEMENT_HPP

#include "nilflux/polyhedron.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nilflux {

enum class DisplacementOutcome { disjoint, intersects, inconclusive };

/// Exact witness of an intersection. For quotient queries, phi(point) equals
/// the deck element applied to `partner`; for cover-level commutator queries
/// only `point` is used.
struct DisplacementWitness {
    RationalVector point;
    RationalVector partner;
    IntegerVector deck_word;
    std::optional<AffineMap> deck;
};

/// Disjoint preserved-coordinate projections, re-checkable independently.
struct SeparationCertificate {
    std::vector<std::string> projection_vars;
    Polyhedron first;
    Polyhedron second;
};

struct DisplacementVerdict {
    DisplacementOutcome outcome;
    std::string detail;
    std::optional<DisplacementWitness> witness;
    std::optional<SeparationCertificate> separation;
};

/// Cover-level displacement of V0 by the commutator [lift, f]. Sound
/// verifier: Disjoint when the projections of lift^{-1}(f^{-1}(V0)) and
/// lift^{-1}(V0) onto the preserved coordinates of f are disjoint;
/// Intersects only with an exact in-domain witness; Inconclusive otherwise.
DisplacementVerdict commutator_displacement(const AffineMap& lift, const PartialAffineMap& f,
                                            const Polyhedron& v0);

/// Quotient-level disjointness of phi(R) and R: searches for deck parameters
/// z and cover points p, q in R with phi(p) = g_z(q). The congruence path is
/// exact and bound-free; `bound` only limits the branching fallback that
/// resolves parameter-coordinate products.
DisplacementVerdict quotient_disjoint(const AffineMap& phi, const CoordRegion& region,
                                      const ManifoldModel& model, const Integer& bound = 8);

} // namespace nilflux

#endif
