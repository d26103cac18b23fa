#include "nilflux/form.hpp"
#include "nilflux/errors.hpp"

#include <algorithm>
#include <sstream>

namespace nilflux {

SortedIndices sort_indices(IndexTuple raw) {
    int sign = 1;
    // Insertion sort, flipping the sign per swap; small tuples only.
    for (std::size_t i = 1; i < raw.size(); ++i) {
        std::size_t j = i;
        while (j > 0 && raw[j - 1] > raw[j]) {
            std::swap(raw[j - 1], raw[j]);
            sign = -sign;
            --j;
        }
    }
    for (std::size_t i = 1; i < raw.size(); ++i)
        if (raw[i - 1] == raw[i]) return {std::move(raw), 0};
    return {std::move(raw), sign};
}

DiffForm::DiffForm(CoordinateSystem coords, int degree, Basis basis)
    : coords_(std::move(coords)), degree_(degree), basis_(basis) {
    if (degree < 0) throw BadDimension("negative form degree");
}

DiffForm DiffForm::zero(CoordinateSystem coords, int degree, Basis basis) {
    return DiffForm(std::move(coords), degree, basis);
}

DiffForm DiffForm::term(CoordinateSystem coords, IndexTuple indices,
                        PolyScalar coeff, Basis basis) {
    DiffForm f(std::move(coords), static_cast<int>(indices.size()), basis);
    f.add_term(std::move(indices), coeff);
    return f;
}

void DiffForm::add_term(IndexTuple indices, const PolyScalar& coeff) {
    if (static_cast<int>(indices.size()) != degree_)
        throw BadDimension("index tuple length disagrees with form degree");
    for (int i : indices)
        if (i < 0 || i >= static_cast<int>(coords_.size()))
            throw BadDimension("basis index out of range");
    auto sorted = sort_indices(std::move(indices));
    if (sorted.sign == 0 || coeff.is_zero()) return;
    PolyScalar add = sorted.sign == 1 ? coeff : -coeff;
    auto [it, inserted] = terms_.try_emplace(sorted.indices, add);
    if (!inserted) {
        it->second += add;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

PolyScalar DiffForm::coefficient(const IndexTuple& sorted_indices) const {
    auto it = terms_.find(sorted_indices);
    return it == terms_.end() ? PolyScalar() : it->second;
}

bool DiffForm::has_constant_coefficients() const {
    std::vector<std::string> banned = coords_;
    banned.push_back(kTimeSymbol);
    for (const auto& [idx, c] : terms_)
        if (!c.is_constant_in(banned)) return false;
    return true;
}

DiffForm DiffForm::operator-() const {
    DiffForm f(coords_, degree_, basis_);
    for (const auto& [idx, c] : terms_) f.terms_[idx] = -c;
    return f;
}

DiffForm& DiffForm::operator+=(const DiffForm& rhs) {
    if (coords_ != rhs.coords_ || basis_ != rhs.basis_ || degree_ != rhs.degree_)
        throw BasisMismatch("adding forms over different charts, bases or degrees");
    for (const auto& [idx, c] : rhs.terms_) {
        auto [it, inserted] = terms_.try_emplace(idx, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
    return *this;
}

DiffForm& DiffForm::operator-=(const DiffForm& rhs) { return *this += -rhs; }

DiffForm DiffForm::scaled(const PolyScalar& f) const {
    DiffForm out(coords_, degree_, basis_);
    for (const auto& [idx, c] : terms_) {
        PolyScalar p = c * f;
        if (!p.is_zero()) out.terms_[idx] = std::move(p);
    }
    return out;
}

DiffForm DiffForm::scaled(const Rational& c) const { return scaled(PolyScalar(c)); }

std::string DiffForm::str(const std::vector<std::string>& basis_labels) const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [idx, c] : terms_) {
        if (!first) out << " + ";
        first = false;
        out << "(" << c.str() << ")";
        for (int i : idx) {
            out << "*";
            if (!basis_labels.empty())
                out << basis_labels[static_cast<std::size_t>(i)];
            else if (basis_ == Basis::coordinate)
                out << "d" << coords_[static_cast<std::size_t>(i)];
            else
                out << "e" << i;
        }
    }
    return out.str();
}

VecField::VecField(CoordinateSystem coords, std::vector<PolyScalar> components)
    : coords_(std::move(coords)), components_(std::move(components)) {
    if (coords_.size() != components_.size())
        throw BadDimension("component count disagrees with chart dimension");
}

VecField VecField::zero(CoordinateSystem coords) {
    auto n = coords.size();
    return VecField(std::move(coords), std::vector<PolyScalar>(n));
}

VecField VecField::operator-() const {
    std::vector<PolyScalar> comps;
    comps.reserve(components_.size());
    for (const auto& c : components_) comps.push_back(-c);
    return VecField(coords_, std::move(comps));
}

VecField operator+(const VecField& a, const VecField& b) {
    if (a.coords_ != b.coords_) throw BasisMismatch("adding fields over different charts");
    std::vector<PolyScalar> comps;
    comps.reserve(a.components_.size());
    for (std::size_t i = 0; i < a.components_.size(); ++i)
        comps.push_back(a.components_[i] + b.components_[i]);
    return VecField(a.coords_, std::move(comps));
}

VecField VecField::scaled(const PolyScalar& f) const {
    std::vector<PolyScalar> comps;
    comps.reserve(components_.size());
    for (const auto& c : components_) comps.push_back(c * f);
    return VecField(coords_, std::move(comps));
}

namespace {

void require_same_chart(const DiffForm& a, const DiffForm& b) {
    if (a.coords() != b.coords()) throw BasisMismatch("forms over different charts");
    if (a.basis() != b.basis()) throw BasisMismatch("forms in different bases");
}

// Determinant of a PolyScalar matrix by cofactor expansion (small n).
PolyScalar poly_determinant(const std::vector<std::vector<PolyScalar>>& m) {
    std::size_t n = m.size();
    if (n == 0) return PolyScalar(Rational(1));
    if (n == 1) return m[0][0];
    PolyScalar det;
    int sign = 1;
    for (std::size_t j = 0; j < n; ++j) {
        if (!m[0][j].is_zero()) {
            std::vector<std::vector<PolyScalar>> minor;
            minor.reserve(n - 1);
            for (std::size_t i = 1; i < n; ++i) {
                std::vector<PolyScalar> row;
                row.reserve(n - 1);
                for (std::size_t k = 0; k < n; ++k)
                    if (k != j) row.push_back(m[i][k]);
                minor.push_back(std::move(row));
            }
            PolyScalar cof = m[0][j] * poly_determinant(minor);
            det += sign == 1 ? cof : -cof;
        }
        sign = -sign;
    }
    return det;
}

} // namespace

FrameData make_frame_data(const CoordinateSystem& coords,
                          std::vector<DiffForm> coframe,
                          std::vector<DiffForm> structure,
                          std::vector<std::string> frame_labels) {
    std::size_t n = coords.size();
    if (coframe.size() != n) throw ModelError("coframe must have one 1-form per coordinate");
    if (structure.size() != n) throw ModelError("structure data must cover every frame 1-form");

    std::vector<std::vector<PolyScalar>> c(n, std::vector<PolyScalar>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const DiffForm& row = coframe[i];
        if (row.basis() != Basis::coordinate || row.degree() != 1 || row.coords() != coords)
            throw ModelError("coframe rows must be coordinate-basis 1-forms on the chart");
        for (const auto& [idx, coeff] : row.terms())
            c[i][static_cast<std::size_t>(idx[0])] = coeff;
    }

    PolyScalar det = poly_determinant(c);
    if (!det.is_constant() || det.is_zero())
        throw DegenerateFrame("coframe determinant is " + det.str() +
                              "; a nonzero constant is required");
    Rational det_value = det.constant_value();

    // Adjugate over the polynomial ring, divided by the constant determinant.
    std::vector<DiffForm> coordinate_in_frame;
    coordinate_in_frame.reserve(n);
    for (std::size_t v = 0; v < n; ++v) {
        DiffForm dx(coords, 1, Basis::frame);
        for (std::size_t i = 0; i < n; ++i) {
            // Cofactor C_{i v}: delete row i and column v.
            std::vector<std::vector<PolyScalar>> minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                std::vector<PolyScalar> row;
                for (std::size_t k = 0; k < n; ++k)
                    if (k != v) row.push_back(c[r][k]);
                minor.push_back(std::move(row));
            }
            PolyScalar cof = poly_determinant(minor);
            if (((i + v) % 2) == 1) cof = -cof;
            cof = cof * (Rational(1) / det_value);
            if (!cof.is_zero()) dx.add_term({static_cast<int>(i)}, cof);
        }
        coordinate_in_frame.push_back(std::move(dx));
    }

    for (const auto& s : structure)
        if (s.basis() != Basis::frame || s.degree() != 2 || s.coords() != coords)
            throw ModelError("structure derivatives must be frame-basis 2-forms");

    if (frame_labels.size() != n) throw ModelError("one frame label per coordinate required");
    return FrameData{coords, std::move(coframe), std::move(coordinate_in_frame),
                     std::move(structure), std::move(frame_labels)};
}

DiffForm wedge(const DiffForm& a, const DiffForm& b) {
    require_same_chart(a, b);
    DiffForm out(a.coords(), a.degree() + b.degree(), a.basis());
    for (const auto& [ia, ca] : a.terms())
        for (const auto& [ib, cb] : b.terms()) {
            IndexTuple merged = ia;
            merged.insert(merged.end(), ib.begin(), ib.end());
            out.add_term(std::move(merged), ca * cb);
        }
    return out;
}

namespace {

DiffForm frame_monomial(const CoordinateSystem& coords, const IndexTuple& idx) {
    return DiffForm::term(coords, idx, PolyScalar(Rational(1)), Basis::frame);
}

// d applied to a pure frame monomial e_{i1} ^ ... ^ e_{ik} through the
// structure derivatives, by the graded Leibniz rule.
DiffForm frame_monomial_derivative(const FrameData& frame, const IndexTuple& idx) {
    const auto& coords = frame.coords;
    DiffForm out(coords, static_cast<int>(idx.size()) + 1, Basis::frame);
    for (std::size_t j = 0; j < idx.size(); ++j) {
        IndexTuple left(idx.begin(), idx.begin() + static_cast<long>(j));
        IndexTuple right(idx.begin() + static_cast<long>(j) + 1, idx.end());
        DiffForm piece = wedge(frame_monomial(coords, left),
                               wedge(frame.structure[static_cast<std::size_t>(idx[j])],
                                     frame_monomial(coords, right)));
        out += (j % 2 == 0) ? piece : -piece;
    }
    return out;
}

// The coordinate differential of a scalar, as a 1-form in the wanted basis.
DiffForm scalar_differential(const CoordinateSystem& coords, const PolyScalar& f,
                             Basis target, const FrameData* frame) {
    DiffForm df(coords, 1, Basis::coordinate);
    for (std::size_t v = 0; v < coords.size(); ++v) {
        PolyScalar dv = f.derivative(coords[v]);
        if (!dv.is_zero()) df.add_term({static_cast<int>(v)}, dv);
    }
    if (target == Basis::coordinate) return df;
    return change_basis(df, Basis::frame, *frame);
}

} // namespace

DiffForm exterior_derivative(const DiffForm& a, const FrameData* frame) {
    if (a.basis() == Basis::coordinate) {
        DiffForm out(a.coords(), a.degree() + 1, Basis::coordinate);
        for (const auto& [idx, c] : a.terms())
            for (std::size_t v = 0; v < a.coords().size(); ++v) {
                PolyScalar dv = c.derivative(a.coords()[v]);
                if (dv.is_zero()) continue;
                IndexTuple with = {static_cast<int>(v)};
                with.insert(with.end(), idx.begin(), idx.end());
                out.add_term(std::move(with), dv);
            }
        return out;
    }
    if (frame == nullptr)
        throw BasisMismatch("frame-basis differential needs the frame structure data");
    DiffForm out(a.coords(), a.degree() + 1, Basis::frame);
    for (const auto& [idx, c] : a.terms()) {
        DiffForm df = scalar_differential(a.coords(), c, Basis::frame, frame);
        out += wedge(df, frame_monomial(a.coords(), idx));
        out += frame_monomial_derivative(*frame, idx).scaled(c);
    }
    return out;
}

DiffForm interior(const VecField& x, const DiffForm& a, const FrameData* frame) {
    if (x.coords() != a.coords()) throw BasisMismatch("field and form over different charts");
    DiffForm form = a;
    if (form.basis() == Basis::frame) {
        if (frame == nullptr)
            throw BasisMismatch("frame-basis contraction needs the frame data");
        form = change_basis(form, Basis::coordinate, *frame);
    }
    if (form.degree() == 0) return DiffForm::zero(form.coords(), 0, Basis::coordinate);
    DiffForm out(form.coords(), form.degree() - 1, Basis::coordinate);
    for (const auto& [idx, c] : form.terms())
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const PolyScalar& comp = x.component(static_cast<std::size_t>(idx[j]));
            if (comp.is_zero()) continue;
            IndexTuple rest;
            rest.reserve(idx.size() - 1);
            for (std::size_t k = 0; k < idx.size(); ++k)
                if (k != j) rest.push_back(idx[k]);
            PolyScalar coeff = c * comp;
            out.add_term(std::move(rest), (j % 2 == 0) ? coeff : -coeff);
        }
    return out;
}

DiffForm pullback(const AffineMap& phi, const DiffForm& a) {
    if (a.basis() != Basis::coordinate)
        throw BasisMismatch("pullback expects a coordinate-basis form");
    if (phi.dimension() != a.dimension())
        throw BadDimension("map and form dimension disagree");
    if (determinant(phi.linear()) == 0)
        throw SingularMap("pullback along a non-invertible map");

    const auto& coords = a.coords();
    std::map<std::string, PolyScalar> subst;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        PolyScalar comp(phi.translation()[i]);
        for (std::size_t j = 0; j < coords.size(); ++j)
            if (phi.linear()[i][j] != 0)
                comp += PolyScalar::variable(coords[j]) * PolyScalar(phi.linear()[i][j]);
        subst[coords[i]] = std::move(comp);
    }

    // phi^* dx_i = sum_j A_ij dx_j.
    std::vector<DiffForm> pulled_dx;
    pulled_dx.reserve(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        DiffForm df(coords, 1, Basis::coordinate);
        for (std::size_t j = 0; j < coords.size(); ++j)
            if (phi.linear()[i][j] != 0)
                df.add_term({static_cast<int>(j)}, PolyScalar(phi.linear()[i][j]));
        pulled_dx.push_back(std::move(df));
    }

    DiffForm out(coords, a.degree(), Basis::coordinate);
    for (const auto& [idx, c] : a.terms()) {
        DiffForm piece = DiffForm::term(coords, {}, c.substitute(subst), Basis::coordinate);
        for (int i : idx) piece = wedge(piece, pulled_dx[static_cast<std::size_t>(i)]);
        out += piece;
    }
    return out;
}

VecField pushforward(const AffineMap& phi, const VecField& x) {
    if (phi.dimension() != x.dimension())
        throw BadDimension("map and field dimension disagree");
    AffineMap inv = phi.inverse();
    const auto& coords = x.coords();
    std::map<std::string, PolyScalar> subst;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        PolyScalar comp(inv.translation()[i]);
        for (std::size_t j = 0; j < coords.size(); ++j)
            if (inv.linear()[i][j] != 0)
                comp += PolyScalar::variable(coords[j]) * PolyScalar(inv.linear()[i][j]);
        subst[coords[i]] = std::move(comp);
    }
    std::vector<PolyScalar> comps(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i)
        for (std::size_t j = 0; j < coords.size(); ++j)
            if (phi.linear()[i][j] != 0)
                comps[i] += x.component(j).substitute(subst) * PolyScalar(phi.linear()[i][j]);
    return VecField(coords, std::move(comps));
}

DiffForm change_basis(const DiffForm& a, Basis target, const FrameData& frame) {
    if (a.coords() != frame.coords) throw BasisMismatch("form chart disagrees with frame data");
    if (a.basis() == target) return a;
    const std::vector<DiffForm>& dictionary =
        target == Basis::coordinate ? frame.coframe : frame.coordinate_in_frame;
    DiffForm out(a.coords(), a.degree(), target);
    for (const auto& [idx, c] : a.terms()) {
        DiffForm piece = DiffForm::term(a.coords(), {}, c, target);
        for (int i : idx) piece = wedge(piece, dictionary[static_cast<std::size_t>(i)]);
        out += piece;
    }
    return out;
}

bool forms_equal(const DiffForm& a, const DiffForm& b, const FrameData* frame) {
    DiffForm ca = a, cb = b;
    if (ca.basis() == Basis::frame) {
        if (!frame) throw BasisMismatch("frame data needed to compare frame forms");
        ca = change_basis(ca, Basis::coordinate, *frame);
    }
    if (cb.basis() == Basis::frame) {
        if (!frame) throw BasisMismatch("frame data needed to compare frame forms");
        cb = change_basis(cb, Basis::coordinate, *frame);
    }
    return ca == cb;
}

AffineMap exp_affine_field(const VecField& x, const Rational& time) {
    const auto& coords = x.coords();
    std::size_t n = coords.size();
    RationalMatrix lin(n, RationalVector(n, Rational(0)));
    RationalVector trans(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
        Rational c0;
        RationalVector row;
        if (!x.component(i).affine_decompose(coords, c0, row))
            throw NotAffine("component " + std::to_string(i) + " is " +
                            x.component(i).str());
        lin[i] = std::move(row);
        trans[i] = c0;
    }
    auto index = nilpotency_index(lin);
    if (!index)
        throw NotNilpotent("linear part of the field is not nilpotent");

    // x(t) = exp(tN) x0 + S(t) v with S(t) = sum_k N^k t^{k+1} / (k+1)!.
    RationalMatrix flow = identity_matrix(n);
    RationalMatrix shift(n, RationalVector(n, Rational(0)));
    RationalMatrix power = identity_matrix(n);
    Rational t_pow(1);
    Rational factorial(1);
    for (int k = 0; k < *index; ++k) {
        if (k > 0) {
            power = mat_mul(power, lin);
            t_pow *= time;
            factorial *= k;
        }
        Rational flow_c = t_pow / factorial;            // t^k / k!
        Rational shift_c = t_pow * time / (factorial * (k + 1)); // t^{k+1} / (k+1)!
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (k > 0) flow[i][j] += flow_c * power[i][j];
                shift[i][j] += shift_c * power[i][j];
            }
    }
    return AffineMap(std::move(flow), mat_vec(shift, trans));
}

} // namespace nilflux
