#ifndef NILFLUX_MANIFOLD_HPP
#define NILFLUX_MANIFOLD_HPP

#include "nilflux/form.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nilflux {

/// Fundamental-group bookkeeping. The center and commutator-subgroup data are
/// inputs (integer vectors over the lattice-generator basis), not derived.
struct Pi1Data {
    std::vector<std::string> labels;
    std::vector<IntegerVector> center;
    std::vector<IntegerVector> commutator;
};

enum class CoordConstraintKind { free_coord, fixed_coord, band_coord };

struct CoordConstraint {
    CoordConstraintKind kind = CoordConstraintKind::free_coord;
    Rational value;  // fixed value or band center
    Rational radius; // band half-width (> 0)

    static CoordConstraint free() { return {}; }
    static CoordConstraint fixed(Rational v) {
        return {CoordConstraintKind::fixed_coord, std::move(v), Rational(0)};
    }
    static CoordConstraint band(Rational center, Rational radius) {
        return {CoordConstraintKind::band_coord, std::move(center), std::move(radius)};
    }
};

/// Per-coordinate region: free | fixed | open band, in cover coordinates.
struct CoordRegion {
    std::vector<CoordConstraint> constraints;

    std::size_t free_count() const;
    void validate() const; // at least one free coordinate, band radii > 0
};

/// Raw data for building a model; see the shipped presets for the layout.
struct ModelData {
    std::string name;
    CoordinateSystem coordinates;
    std::vector<DiffForm> coframe;    // coordinate-basis 1-forms
    std::vector<DiffForm> structure;  // frame-basis 2-forms, d of the coframe
    std::vector<std::string> frame_labels;
    std::vector<AffineMap> lattice;   // deck-group generators
    DiffForm volume_form;             // coordinate-basis top form, unit covolume
    Pi1Data pi1;
};

/// A nilmanifold chart: invariant coframe over a lattice quotient of R^n.
/// Immutable after validated construction.
class ManifoldModel {
public:
    explicit ManifoldModel(ModelData data);

    static ManifoldModel kodaira_thurston();
    static ManifoldModel torus4();
    /// "kodaira-thurston" or "torus4".
    static ManifoldModel preset(const std::string& name);

    const std::string& name() const { return data_.name; }
    std::size_t dimension() const { return data_.coordinates.size(); }
    const CoordinateSystem& coordinates() const { return data_.coordinates; }
    const FrameData& frame() const { return frame_; }
    const std::vector<AffineMap>& lattice() const { return data_.lattice; }
    const DiffForm& volume_form() const { return data_.volume_form; }
    const Pi1Data& pi1() const { return data_.pi1; }
    const std::vector<std::string>& frame_labels() const { return data_.frame_labels; }

    /// Frame vector field dual to the i-th coframe element.
    VecField dual_frame_field(std::size_t i) const;

    /// Whether deck-membership queries can decompose candidates exactly
    /// (ordered-word pins validated at construction).
    bool deck_decomposition_available() const { return !pins_.empty(); }

    /// Writes `candidate` as an ordered word in the lattice generators.
    /// Returns the exponents, or nullopt (with `residual`) when the candidate
    /// is not such a word.
    std::optional<IntegerVector> deck_decompose(const AffineMap& candidate,
                                                AffineMap* residual = nullptr) const;

    DiffForm coordinate_form(IndexTuple indices, PolyScalar coeff) const;
    DiffForm frame_form(IndexTuple indices, PolyScalar coeff) const;
    /// Index of a coordinate name; throws when absent.
    std::size_t coordinate_index(const std::string& name) const;

private:
    struct DeckPin {
        bool in_linear;
        std::size_t row, col; // col unused for translation pins
        Rational unit;
    };
    void validate() const;
    void derive_pins();

    ModelData data_;
    FrameData frame_;
    std::vector<DeckPin> pins_; // empty when decomposition is unavailable
};

// --- descent to the quotient ------------------------------------------------

struct DescentWitness {
    std::size_t generator;
    IntegerVector word;   // ordered-word exponents of the conjugated generator
    AffineMap deck;       // the witness deck element
};

enum class DescentOutcome { yes, no, inconclusive };

struct MapDescentResult {
    DescentOutcome outcome;
    std::vector<DescentWitness> witnesses;          // on yes
    std::optional<std::size_t> failing_generator;   // on no / inconclusive
    std::optional<AffineMap> residual;              // on no: the obstruction
    std::string detail;
};

/// Checks phi o g = g' o phi for every lattice generator g, searching g'
/// among deck words with integer entries bounded by `bound`.
MapDescentResult map_descends(const AffineMap& phi, const ManifoldModel& model,
                              const Integer& bound = 8);

struct FieldDescentResult {
    bool descends;
    std::optional<std::size_t> failing_generator;
    std::optional<VecField> pushed; // pushforward under the failing generator
};

/// A field descends iff it is invariant under pushforward by every generator.
FieldDescentResult field_descends(const VecField& x, const ManifoldModel& model);

// --- symplectic structure ----------------------------------------------------

struct SymplecticReport {
    bool closed;
    bool nondegenerate;
    PolyScalar volume; // omega^m = m! * volume * volume_form
};

/// Verifies lattice invariance (NotInvariant on failure), closedness, and the
/// top-wedge volume (NotHomogeneous when the coefficient is not constant in
/// the coordinates; free parameters may remain).
SymplecticReport is_symplectic(const DiffForm& omega, const ManifoldModel& model);

// --- invariant (Chevalley-Eilenberg) cohomology ------------------------------

struct CohomologyBasis {
    int betti;
    std::vector<DiffForm> representatives; // closed frame forms spanning H^k
};

/// Solver over the finite-dimensional complex of constant-coefficient frame
/// forms. Build once per model, query per degree.
class CohomologySolver {
public:
    explicit CohomologySolver(const ManifoldModel& model);

    int betti(int k) const;
    const std::vector<DiffForm>& representatives(int k) const;

    /// Coordinates of a closed constant frame k-form with respect to the
    /// chosen representatives, modulo exact forms. Throws NotClosed.
    RationalVector class_coordinates(const DiffForm& form) const;

    /// Primitive within the complex, or nullopt when the class is nonzero.
    std::optional<DiffForm> primitive(const DiffForm& form) const;

    /// Exterior monomials of degree k in lexicographic order.
    const std::vector<IndexTuple>& monomials(int k) const;

    RationalVector to_vector(const DiffForm& form) const;
    DiffForm from_vector(int k, const RationalVector& v) const;

private:
    const ManifoldModel& model_;
    std::vector<std::vector<IndexTuple>> monomials_;   // per degree
    std::vector<RationalMatrix> d_matrix_;             // D_k : k -> k+1
    std::vector<std::vector<RationalVector>> kernel_;  // per degree
    std::vector<std::vector<RationalVector>> image_;   // image of D_{k-1} in degree k
    std::vector<std::vector<RationalVector>> rep_vectors_;
    std::vector<std::vector<DiffForm>> reps_;
};

CohomologyBasis ce_cohomology(const ManifoldModel& model, int k);

struct ExactnessResult {
    bool exact;
    std::optional<DiffForm> primitive;
};

/// Decides exactness inside the invariant complex; requires a closed form
/// with constant frame coefficients.
ExactnessResult is_exact(const DiffForm& form, const ManifoldModel& model);

/// Restricts omega to the tangent plane of a 2-dimensional coordinate torus
/// (exactly two free coordinates, the rest fixed) and tests for zero.
bool is_lagrangian(const CoordRegion& region, const DiffForm& omega,
                   const ManifoldModel& model);

} // namespace nilflux

#endif
