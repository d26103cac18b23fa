#ifndef NILFLUX_FORM_HPP
#define NILFLUX_FORM_HPP

#include "nilflux/affine.hpp"
#include "nilflux/poly.hpp"

#include <map>
#include <string>
#include <vector>

namespace nilflux {

enum class Basis { coordinate, frame };

/// Ordered coordinate names of the chart; forms and fields carry a copy so
/// every operation can check it works over the same chart.
using CoordinateSystem = std::vector<std::string>;

/// Strictly increasing tuple of basis indices labelling an exterior monomial.
using IndexTuple = std::vector<int>;

/// Sorts an index tuple, tracking the permutation sign. sign == 0 signals a
/// repeated index (the monomial vanishes). This is the only sign source for
/// exterior algebra; everything else routes through it.
struct SortedIndices {
    IndexTuple indices;
    int sign;
};
SortedIndices sort_indices(IndexTuple raw);

/// Exterior form of fixed degree with PolyScalar coefficients over a named
/// coordinate chart, expressed in either the coordinate or an invariant frame
/// basis. Canonical form: strictly increasing index tuples, no zero terms.
class DiffForm {
public:
    DiffForm(CoordinateSystem coords, int degree, Basis basis);

    static DiffForm zero(CoordinateSystem coords, int degree, Basis basis);
    /// Single term c * e_{i1} ^ ... ^ e_{ik}; indices need not be sorted.
    static DiffForm term(CoordinateSystem coords, IndexTuple indices,
                         PolyScalar coeff, Basis basis);

    void add_term(IndexTuple indices, const PolyScalar& coeff);

    const CoordinateSystem& coords() const { return coords_; }
    std::size_t dimension() const { return coords_.size(); }
    int degree() const { return degree_; }
    Basis basis() const { return basis_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<IndexTuple, PolyScalar>& terms() const { return terms_; }
    PolyScalar coefficient(const IndexTuple& sorted_indices) const;

    /// True when every coefficient is free of the coordinates and of u.
    bool has_constant_coefficients() const;

    DiffForm operator-() const;
    DiffForm& operator+=(const DiffForm& rhs);
    DiffForm& operator-=(const DiffForm& rhs);
    friend DiffForm operator+(DiffForm a, const DiffForm& b) { return a += b; }
    friend DiffForm operator-(DiffForm a, const DiffForm& b) { return a -= b; }
    DiffForm scaled(const PolyScalar& f) const;
    DiffForm scaled(const Rational& c) const;

    friend bool operator==(const DiffForm& a, const DiffForm& b) {
        return a.coords_ == b.coords_ && a.degree_ == b.degree_ &&
               a.basis_ == b.basis_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const DiffForm& a, const DiffForm& b) { return !(a == b); }

    std::string str(const std::vector<std::string>& basis_labels = {}) const;

private:
    CoordinateSystem coords_;
    int degree_;
    Basis basis_;
    std::map<IndexTuple, PolyScalar> terms_;
};

/// Vector field with one PolyScalar component per coordinate direction.
class VecField {
public:
    VecField(CoordinateSystem coords, std::vector<PolyScalar> components);
    static VecField zero(CoordinateSystem coords);

    const CoordinateSystem& coords() const { return coords_; }
    std::size_t dimension() const { return coords_.size(); }
    const std::vector<PolyScalar>& components() const { return components_; }
    const PolyScalar& component(std::size_t i) const { return components_[i]; }

    VecField operator-() const;
    friend VecField operator+(const VecField& a, const VecField& b);
    VecField scaled(const PolyScalar& f) const;

    friend bool operator==(const VecField& a, const VecField& b) {
        return a.coords_ == b.coords_ && a.components_ == b.components_;
    }

private:
    CoordinateSystem coords_;
    std::vector<PolyScalar> components_;
};

/// Frame dictionary of a chart: the invariant coframe written in coordinates,
/// its inverse, and the structure derivatives driving the frame differential.
struct FrameData {
    CoordinateSystem coords;
    std::vector<DiffForm> coframe;             // frame_i as coordinate 1-forms
    std::vector<DiffForm> coordinate_in_frame; // dx_v as frame 1-forms
    std::vector<DiffForm> structure;           // d(frame_i) as frame 2-forms
    std::vector<std::string> frame_labels;
};

/// Inverts the coframe over the polynomial ring (determinant must be a
/// nonzero constant; otherwise DegenerateFrame) and bundles the dictionary.
FrameData make_frame_data(const CoordinateSystem& coords,
                          std::vector<DiffForm> coframe,
                          std::vector<DiffForm> structure,
                          std::vector<std::string> frame_labels);

DiffForm wedge(const DiffForm& a, const DiffForm& b);

/// Exterior derivative. Coordinate-basis forms need no frame data; frame
/// forms differentiate through the structure relations.
DiffForm exterior_derivative(const DiffForm& a, const FrameData* frame = nullptr);

/// Interior product (contraction). Frame-basis input converts through the
/// given frame data first; the result is a coordinate-basis form.
DiffForm interior(const VecField& x, const DiffForm& a, const FrameData* frame = nullptr);

/// Pullback along an invertible affine map of the chart.
DiffForm pullback(const AffineMap& phi, const DiffForm& a);

/// Pushforward of a vector field along an invertible affine map.
VecField pushforward(const AffineMap& phi, const VecField& x);

DiffForm change_basis(const DiffForm& a, Basis target, const FrameData& frame);

/// Basis-independent equality: compare after conversion to coordinates.
bool forms_equal(const DiffForm& a, const DiffForm& b, const FrameData* frame = nullptr);

/// Exact time-t flow of an affine vector field with nilpotent linear part.
AffineMap exp_affine_field(const VecField& x, const Rational& time);

} // namespace nilflux

#endif
