#ifndef NILFLUX_FLUX_HPP
#define NILFLUX_FLUX_HPP

#include "nilflux/manifold.hpp"

namespace nilflux {

/// A flux value. `form` is frame-basis whenever the coefficients come out
/// constant there (the invariant case); otherwise the coordinate-basis result
/// is kept and `invariant` is false.
struct FluxValue {
    DiffForm form;
    bool invariant;
    std::string convention;
};

/// Integral over u in [0,1] of the contraction of the (possibly u-dependent)
/// field into omega. For u-independent fields this is plain contraction.
FluxValue flux_field(const VecField& x, const DiffForm& omega, const ManifoldModel& model);

/// Flux of an affine symplectomorphism along the straight-line isotopy
/// phi_u = (1-u) id + u phi. Requires a descending, unipotent map whose
/// interpolation stays invertible on [0,1].
FluxValue flux_of_map(const AffineMap& phi, const DiffForm& omega, const ManifoldModel& model);

/// Free part of H_1: lattice generators modulo the commutator subgroup.
class H1Structure {
public:
    explicit H1Structure(const ManifoldModel& model);

    /// Generator indices that survive as a basis of the free quotient.
    const std::vector<std::size_t>& basis() const { return basis_; }
    /// Image of the center, as lattice-basis vectors over `basis()` coords.
    const std::vector<IntegerVector>& center_image() const { return center_image_; }
    /// Class of a vector over the full generator basis.
    IntegerVector reduce(IntegerVector full) const;

private:
    std::vector<std::size_t> basis_;
    IntegerMatrix hnf_;                  // column echelon form of the commutator matrix
    std::vector<std::size_t> pivot_rows_;
    std::vector<IntegerVector> center_image_;
};

/// Dual of a homology class, as ι(V)Ω₀ against the invariant frame field V
/// matching the class; returned in the frame basis. Linear in h.
DiffForm poincare_dual(const RationalVector& h_in_basis, const ManifoldModel& model);

/// A loop of symplectomorphisms: its generating field (components may be
/// polynomial in u) and the H_1 class its point-evaluation traces.
struct LoopSpec {
    std::string label;
    VecField field;
    IntegerVector evaluation; // over the H1Structure basis
};

/// The loops used in the computations shipped with the presets.
std::vector<LoopSpec> preset_loops(const ManifoldModel& model);

/// Two-sided description of the flux subgroup: the lattice spanned by the
/// verified loop fluxes, plus the superset the evaluation diagram permits
/// (one particular solution per center-image generator, and the kernel of
/// wedging with [omega] on H^1).
struct FluxLattice {
    std::vector<std::string> loop_labels;
    std::vector<DiffForm> verified;
    std::vector<DiffForm> particular;
    std::vector<DiffForm> kernel;
    std::vector<IntegerVector> center_image; // over the H1 basis
    std::vector<std::size_t> h1_basis;       // generator indices
    Rational volume;
};

FluxLattice flux_lattice(const ManifoldModel& model, const DiffForm& omega,
                         const std::vector<LoopSpec>& loops);

enum class Membership { yes, no, outside_constraint };

struct MembershipResult {
    Membership outcome;
    IntegerVector coefficients; // on yes: v = sum coeff_i * verified_i
};

/// Integer membership in the verified lattice; `outside_constraint` when v
/// is not even in the real span the diagram allows.
MembershipResult in_flux_lattice(const DiffForm& v, const FluxLattice& gamma,
                                 const ManifoldModel& model);

} // namespace nilflux

#endif
