#include "nilflux/manifold.hpp"
#include "nilflux/errors.hpp"

#include <algorithm>
#include <functional>

namespace nilflux {

std::size_t CoordRegion::free_count() const {
    std::size_t n = 0;
    for (const auto& c : constraints)
        if (c.kind == CoordConstraintKind::free_coord) ++n;
    return n;
}

void CoordRegion::validate() const {
    if (free_count() == 0)
        throw PreconditionError("region must leave at least one coordinate free");
    for (const auto& c : constraints)
        if (c.kind == CoordConstraintKind::band_coord && c.radius <= 0)
            throw PreconditionError("band radius must be positive");
}

// ---------------------------------------------------------------------------

ManifoldModel::ManifoldModel(ModelData data)
    : data_(std::move(data)),
      frame_(make_frame_data(data_.coordinates, data_.coframe, data_.structure,
                             data_.frame_labels)) {
    validate();
    derive_pins();
}

void ManifoldModel::validate() const {
    const auto& coords = data_.coordinates;
    std::size_t n = coords.size();
    if (n == 0) throw ModelError("empty coordinate list");
    for (const auto& c : coords)
        if (c == kTimeSymbol)
            throw ModelError("coordinate name '" + kTimeSymbol + "' is reserved");
    if (data_.lattice.empty()) throw ModelError("no lattice generators");
    for (const auto& g : data_.lattice)
        if (g.dimension() != n) throw ModelError("lattice generator dimension mismatch");

    // Coframe invariance under every generator.
    for (std::size_t gi = 0; gi < data_.lattice.size(); ++gi)
        for (std::size_t i = 0; i < n; ++i)
            if (pullback(data_.lattice[gi], frame_.coframe[i]) != frame_.coframe[i])
                throw ModelError("coframe form " + data_.frame_labels[i] +
                                 " is not invariant under generator " + std::to_string(gi));

    // Structure derivatives must agree with the coordinate differential.
    for (std::size_t i = 0; i < n; ++i) {
        DiffForm d_coord = exterior_derivative(frame_.coframe[i]);
        if (change_basis(d_coord, Basis::frame, frame_) != frame_.structure[i])
            throw ModelError("structure derivative of " + data_.frame_labels[i] +
                             " disagrees with the coordinate differential");
    }

    // Volume form: coordinate top form, invariant under the lattice.
    if (data_.volume_form.degree() != static_cast<int>(n) ||
        data_.volume_form.basis() != Basis::coordinate ||
        data_.volume_form.coords() != coords || data_.volume_form.is_zero())
        throw ModelError("volume form must be a nonzero coordinate top form");
    for (const auto& g : data_.lattice)
        if (pullback(g, data_.volume_form) != data_.volume_form)
            throw ModelError("volume form is not lattice invariant");

    // pi1 data shape.
    std::size_t r = data_.lattice.size();
    if (data_.pi1.labels.size() != r)
        throw ModelError("pi1 labels must match the lattice generators");
    for (const auto& v : data_.pi1.center)
        if (v.size() != r) throw ModelError("center vector length mismatch");
    for (const auto& v : data_.pi1.commutator)
        if (v.size() != r) throw ModelError("commutator vector length mismatch");
}

namespace {

Rational pin_value(const AffineMap& m, bool in_linear, std::size_t row, std::size_t col) {
    if (in_linear) {
        Rational v = m.linear()[row][col];
        if (row == col) v -= 1;
        return v;
    }
    return m.translation()[row];
}

} // namespace

void ManifoldModel::derive_pins() {
    std::size_t r = data_.lattice.size();
    std::size_t n = dimension();

    // Powers g^e for e in [-2, 2], used by the exhaustive checks below.
    std::vector<std::vector<AffineMap>> powers;
    for (const auto& g : data_.lattice) {
        std::vector<AffineMap> p;
        for (int e = -2; e <= 2; ++e) p.push_back(g.power(e));
        powers.push_back(std::move(p));
    }
    auto word_of = [&](std::size_t first, const std::vector<int>& exps) {
        AffineMap w = AffineMap::identity(n);
        for (std::size_t i = 0; i < exps.size(); ++i)
            w = w.compose(powers[first + i][static_cast<std::size_t>(exps[i] + 2)]);
        return w;
    };
    auto enumerate = [&](std::size_t len, const std::function<bool(const std::vector<int>&)>& f) {
        std::vector<int> exps(len, -2);
        while (true) {
            if (!f(exps)) return false;
            std::size_t i = 0;
            while (i < len && exps[i] == 2) { exps[i] = -2; ++i; }
            if (i == len) return true;
            ++exps[i];
        }
    };

    // Entries of bounded generator words are polynomials of per-variable
    // degree < 5 in the exponents, so agreement on the grid [-2,2]^k is an
    // identity for all integer exponents.
    pins_.clear();
    for (std::size_t gi = 0; gi < r; ++gi) {
        std::vector<DeckPin> candidates;
        for (std::size_t row = 0; row < n; ++row) {
            for (std::size_t col = 0; col < n; ++col) {
                Rational v = pin_value(data_.lattice[gi], true, row, col);
                if (v != 0) candidates.push_back({true, row, col, v});
            }
            Rational v = pin_value(data_.lattice[gi], false, row, 0);
            if (v != 0) candidates.push_back({false, row, 0, v});
        }
        bool found = false;
        for (const auto& pin : candidates) {
            bool ok = enumerate(r - gi, [&](const std::vector<int>& exps) {
                AffineMap w = word_of(gi, exps);
                return pin_value(w, pin.in_linear, pin.row, pin.col) ==
                       Rational(exps[0]) * pin.unit;
            });
            if (ok) { pins_.push_back(pin); found = true; break; }
        }
        if (!found) { pins_.clear(); return; }
    }

    // Round-trip: ordered words decompose back to their exponents, and
    // reverse-ordered words decompose to an equal deck element.
    bool ok = enumerate(r, [&](const std::vector<int>& exps) {
        AffineMap w = word_of(0, exps);
        auto dec = deck_decompose(w);
        if (!dec) return false;
        for (std::size_t i = 0; i < r; ++i)
            if ((*dec)[i] != exps[i]) return false;
        AffineMap rev = AffineMap::identity(n);
        for (std::size_t i = r; i-- > 0;)
            rev = rev.compose(powers[i][static_cast<std::size_t>(exps[i] + 2)]);
        return deck_decompose(rev).has_value();
    });
    if (!ok) pins_.clear();
}

std::optional<IntegerVector> ManifoldModel::deck_decompose(const AffineMap& candidate,
                                                           AffineMap* residual) const {
    if (pins_.empty()) {
        if (residual) *residual = candidate;
        return std::nullopt;
    }
    static const Integer kGuard = Integer(1000000);
    AffineMap res = candidate;
    IntegerVector exps;
    for (std::size_t i = 0; i < pins_.size(); ++i) {
        Rational e = pin_value(res, pins_[i].in_linear, pins_[i].row, pins_[i].col) /
                     pins_[i].unit;
        if (!is_integer(e) || abs(numerator(e)) > kGuard) {
            if (residual) *residual = res;
            return std::nullopt;
        }
        Integer ei = numerator(e);
        exps.push_back(ei);
        res = data_.lattice[i].power(-ei.convert_to<long>()).compose(res);
    }
    if (!res.is_identity()) {
        if (residual) *residual = res;
        return std::nullopt;
    }
    return exps;
}

DiffForm ManifoldModel::coordinate_form(IndexTuple indices, PolyScalar coeff) const {
    return DiffForm::term(data_.coordinates, std::move(indices), std::move(coeff),
                          Basis::coordinate);
}

DiffForm ManifoldModel::frame_form(IndexTuple indices, PolyScalar coeff) const {
    return DiffForm::term(data_.coordinates, std::move(indices), std::move(coeff),
                          Basis::frame);
}

std::size_t ManifoldModel::coordinate_index(const std::string& name) const {
    auto it = std::find(data_.coordinates.begin(), data_.coordinates.end(), name);
    if (it == data_.coordinates.end()) throw UsageError("unknown coordinate '" + name + "'");
    return static_cast<std::size_t>(it - data_.coordinates.begin());
}

VecField ManifoldModel::dual_frame_field(std::size_t i) const {
    std::vector<PolyScalar> comps(dimension());
    for (std::size_t v = 0; v < dimension(); ++v)
        comps[v] = frame_.coordinate_in_frame[v].coefficient({static_cast<int>(i)});
    return VecField(data_.coordinates, std::move(comps));
}

ManifoldModel ManifoldModel::kodaira_thurston() {
    CoordinateSystem coords = {"s", "t", "x", "y"};
    auto c1 = [&](int i) {
        return DiffForm::term(coords, {i}, PolyScalar(Rational(1)), Basis::coordinate);
    };
    DiffForm gamma = c1(2);
    gamma.add_term({3}, -PolyScalar::variable("s"));

    std::vector<DiffForm> coframe = {c1(0), c1(1), gamma, c1(3)};
    DiffForm zero2 = DiffForm::zero(coords, 2, Basis::frame);
    DiffForm d_gamma = DiffForm::term(coords, {0, 3}, PolyScalar(Rational(-1)), Basis::frame);
    std::vector<DiffForm> structure = {zero2, zero2, d_gamma, zero2};

    RationalMatrix shear = identity_matrix(4);
    shear[2][3] = 1;
    std::vector<AffineMap> lattice = {
        AffineMap(shear, {Rational(1), Rational(0), Rational(0), Rational(0)}),
        AffineMap::translation({Rational(0), Rational(1), Rational(0), Rational(0)}),
        AffineMap::translation({Rational(0), Rational(0), Rational(1), Rational(0)}),
        AffineMap::translation({Rational(0), Rational(0), Rational(0), Rational(1)})};

    DiffForm volume =
        DiffForm::term(coords, {0, 1, 2, 3}, PolyScalar(Rational(1)), Basis::coordinate);

    Pi1Data pi1;
    pi1.labels = {"gs", "gt", "gx", "gy"};
    pi1.center = {{0, 1, 0, 0}, {0, 0, 1, 0}};
    pi1.commutator = {{0, 0, 1, 0}};

    return ManifoldModel(ModelData{"kodaira-thurston", coords, std::move(coframe),
                                   std::move(structure),
                                   {"ds", "dt", "gamma", "dy"},
                                   std::move(lattice), std::move(volume), std::move(pi1)});
}

ManifoldModel ManifoldModel::torus4() {
    CoordinateSystem coords = {"x1", "x2", "x3", "x4"};
    std::vector<DiffForm> coframe, structure;
    std::vector<AffineMap> lattice;
    for (int i = 0; i < 4; ++i) {
        coframe.push_back(
            DiffForm::term(coords, {i}, PolyScalar(Rational(1)), Basis::coordinate));
        structure.push_back(DiffForm::zero(coords, 2, Basis::frame));
        RationalVector b(4, Rational(0));
        b[static_cast<std::size_t>(i)] = 1;
        lattice.push_back(AffineMap::translation(b));
    }
    DiffForm volume =
        DiffForm::term(coords, {0, 1, 2, 3}, PolyScalar(Rational(1)), Basis::coordinate);
    Pi1Data pi1;
    pi1.labels = {"g1", "g2", "g3", "g4"};
    pi1.center = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    pi1.commutator = {};
    return ManifoldModel(ModelData{"torus4", coords, std::move(coframe), std::move(structure),
                                   {"dx1", "dx2", "dx3", "dx4"},
                                   std::move(lattice), std::move(volume), std::move(pi1)});
}

ManifoldModel ManifoldModel::preset(const std::string& name) {
    if (name == "kodaira-thurston") return kodaira_thurston();
    if (name == "torus4") return torus4();
    throw UsageError("unknown model preset '" + name +
                     "' (expected kodaira-thurston or torus4)");
}

// ---------------------------------------------------------------------------

MapDescentResult map_descends(const AffineMap& phi, const ManifoldModel& model,
                              const Integer& bound) {
    MapDescentResult result{DescentOutcome::yes, {}, std::nullopt, std::nullopt, ""};
    if (determinant(phi.linear()) == 0)
        throw PreconditionError("descent check requires an invertible map");
    if (!model.deck_decomposition_available()) {
        result.outcome = DescentOutcome::inconclusive;
        result.detail = "no ordered-word decomposition available for this lattice";
        return result;
    }
    AffineMap phi_inv = phi.inverse();
    for (std::size_t gi = 0; gi < model.lattice().size(); ++gi) {
        AffineMap candidate = phi.compose(model.lattice()[gi]).compose(phi_inv);
        AffineMap residual = candidate;
        auto word = model.deck_decompose(candidate, &residual);
        if (!word) {
            result.outcome = DescentOutcome::no;
            result.failing_generator = gi;
            result.residual = residual;
            result.detail = "conjugated generator is not a deck word";
            result.witnesses.clear();
            return result;
        }
        bool within = true;
        for (const auto& row : candidate.linear())
            for (const auto& v : row)
                if (abs(v) > Rational(bound)) within = false;
        for (const auto& v : candidate.translation())
            if (abs(v) > Rational(bound)) within = false;
        if (!within) {
            result.outcome = DescentOutcome::inconclusive;
            result.failing_generator = gi;
            result.detail = "witness deck element exceeds the search bound";
            result.witnesses.clear();
            return result;
        }
        result.witnesses.push_back(DescentWitness{gi, *word, candidate});
    }
    return result;
}

FieldDescentResult field_descends(const VecField& x, const ManifoldModel& model) {
    for (std::size_t gi = 0; gi < model.lattice().size(); ++gi) {
        VecField pushed = pushforward(model.lattice()[gi], x);
        if (!(pushed == x)) return FieldDescentResult{false, gi, pushed};
    }
    return FieldDescentResult{true, std::nullopt, std::nullopt};
}

// ---------------------------------------------------------------------------

SymplecticReport is_symplectic(const DiffForm& omega, const ManifoldModel& model) {
    if (omega.degree() != 2) throw PreconditionError("symplectic candidate must be a 2-form");
    if (omega.coords() != model.coordinates())
        throw BasisMismatch("form chart disagrees with the model");
    DiffForm w = omega.basis() == Basis::frame
                     ? change_basis(omega, Basis::coordinate, model.frame())
                     : omega;
    for (const auto& g : model.lattice())
        if (pullback(g, w) != w)
            throw NotInvariant("2-form is not invariant under the lattice");

    std::size_t n = model.dimension();
    if (n % 2 != 0) throw BadDimension("even dimension required");
    std::size_t m = n / 2;

    bool closed = exterior_derivative(w).is_zero();

    DiffForm top = w;
    Rational mfact(1);
    for (std::size_t k = 2; k <= m; ++k) {
        top = wedge(top, w);
        mfact *= Rational(static_cast<long>(k));
    }
    IndexTuple all;
    for (std::size_t i = 0; i < n; ++i) all.push_back(static_cast<int>(i));
    Rational unit = model.volume_form().coefficient(all).constant_value();
    PolyScalar vol = top.coefficient(all) * (Rational(1) / (mfact * unit));

    std::vector<std::string> banned = model.coordinates();
    banned.push_back(kTimeSymbol);
    if (!vol.is_constant_in(banned))
        throw NotHomogeneous("top wedge coefficient is not constant: " + vol.str());

    return SymplecticReport{closed, !vol.is_zero(), vol};
}

// ---------------------------------------------------------------------------

namespace {

std::vector<IndexTuple> combinations(std::size_t n, int k) {
    std::vector<IndexTuple> out;
    IndexTuple current;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(current.size()) == k) {
            out.push_back(current);
            return;
        }
        for (int i = start; i < static_cast<int>(n); ++i) {
            current.push_back(i);
            rec(i + 1);
            current.pop_back();
        }
    };
    rec(0);
    return out;
}

} // namespace

CohomologySolver::CohomologySolver(const ManifoldModel& model) : model_(model) {
    std::size_t n = model.dimension();
    monomials_.resize(n + 1);
    for (int k = 0; k <= static_cast<int>(n); ++k)
        monomials_[static_cast<std::size_t>(k)] = combinations(n, k);

    d_matrix_.resize(n + 1);
    for (int k = 0; k < static_cast<int>(n); ++k) {
        const auto& dom = monomials_[static_cast<std::size_t>(k)];
        const auto& codom = monomials_[static_cast<std::size_t>(k + 1)];
        RationalMatrix d(codom.size(), RationalVector(dom.size(), Rational(0)));
        for (std::size_t j = 0; j < dom.size(); ++j) {
            DiffForm img = exterior_derivative(
                model.frame_form(dom[j], PolyScalar(Rational(1))), &model.frame());
            for (std::size_t i = 0; i < codom.size(); ++i) {
                PolyScalar c = img.coefficient(codom[i]);
                if (!c.is_zero()) d[i][j] = c.constant_value();
            }
        }
        d_matrix_[static_cast<std::size_t>(k)] = std::move(d);
    }

    kernel_.resize(n + 1);
    image_.resize(n + 1);
    rep_vectors_.resize(n + 1);
    reps_.resize(n + 1);
    for (int k = 0; k <= static_cast<int>(n); ++k) {
        std::size_t dim_k = monomials_[static_cast<std::size_t>(k)].size();
        if (k < static_cast<int>(n)) {
            kernel_[static_cast<std::size_t>(k)] =
                kernel_basis(d_matrix_[static_cast<std::size_t>(k)]);
        } else {
            for (std::size_t j = 0; j < dim_k; ++j) {
                RationalVector v(dim_k, Rational(0));
                v[j] = 1;
                kernel_[static_cast<std::size_t>(k)].push_back(std::move(v));
            }
        }
        if (k > 0) {
            const auto& d_prev = d_matrix_[static_cast<std::size_t>(k - 1)];
            std::vector<RationalVector> columns;
            for (std::size_t j = 0; j < d_prev[0].size(); ++j) {
                RationalVector col(d_prev.size());
                bool nonzero = false;
                for (std::size_t i = 0; i < d_prev.size(); ++i) {
                    col[i] = d_prev[i][j];
                    if (col[i] != 0) nonzero = true;
                }
                if (nonzero) columns.push_back(std::move(col));
            }
            auto chosen = complement_indices({}, columns);
            for (auto idx : chosen) image_[static_cast<std::size_t>(k)].push_back(columns[idx]);
        }
        auto rep_idx = complement_indices(image_[static_cast<std::size_t>(k)],
                                          kernel_[static_cast<std::size_t>(k)]);
        for (auto idx : rep_idx) {
            rep_vectors_[static_cast<std::size_t>(k)].push_back(
                kernel_[static_cast<std::size_t>(k)][idx]);
            reps_[static_cast<std::size_t>(k)].push_back(
                from_vector(k, kernel_[static_cast<std::size_t>(k)][idx]));
        }
    }
}

const std::vector<IndexTuple>& CohomologySolver::monomials(int k) const {
    if (k < 0 || k > static_cast<int>(model_.dimension()))
        throw BadDimension("degree out of range");
    return monomials_[static_cast<std::size_t>(k)];
}

int CohomologySolver::betti(int k) const {
    if (k < 0 || k > static_cast<int>(model_.dimension())) return 0;
    return static_cast<int>(rep_vectors_[static_cast<std::size_t>(k)].size());
}

const std::vector<DiffForm>& CohomologySolver::representatives(int k) const {
    if (k < 0 || k > static_cast<int>(model_.dimension()))
        throw BadDimension("degree out of range");
    return reps_[static_cast<std::size_t>(k)];
}

RationalVector CohomologySolver::to_vector(const DiffForm& form) const {
    if (form.basis() != Basis::frame)
        throw BasisMismatch("invariant complex works on frame-basis forms");
    if (form.coords() != model_.coordinates())
        throw BasisMismatch("form chart disagrees with the model");
    int k = form.degree();
    const auto& mono = monomials(k);
    RationalVector v(mono.size(), Rational(0));
    for (std::size_t i = 0; i < mono.size(); ++i) {
        PolyScalar c = form.coefficient(mono[i]);
        if (!c.is_constant())
            throw PreconditionError("invariant complex needs constant coefficients, got " +
                                    c.str());
        v[i] = c.constant_value();
    }
    return v;
}

DiffForm CohomologySolver::from_vector(int k, const RationalVector& v) const {
    const auto& mono = monomials(k);
    DiffForm f(model_.coordinates(), k, Basis::frame);
    for (std::size_t i = 0; i < mono.size(); ++i)
        if (v[i] != 0) f.add_term(mono[i], PolyScalar(v[i]));
    return f;
}

RationalVector CohomologySolver::class_coordinates(const DiffForm& form) const {
    int k = form.degree();
    RationalVector v = to_vector(form);
    if (k < static_cast<int>(model_.dimension())) {
        RationalVector dv = mat_vec(d_matrix_[static_cast<std::size_t>(k)], v);
        for (const auto& x : dv)
            if (x != 0) throw NotClosed("class coordinates of a non-closed form");
    }
    const auto& im = image_[static_cast<std::size_t>(k)];
    const auto& reps = rep_vectors_[static_cast<std::size_t>(k)];
    std::size_t dim = v.size();
    RationalMatrix a(dim, RationalVector(im.size() + reps.size(), Rational(0)));
    for (std::size_t j = 0; j < im.size(); ++j)
        for (std::size_t i = 0; i < dim; ++i) a[i][j] = im[j][i];
    for (std::size_t j = 0; j < reps.size(); ++j)
        for (std::size_t i = 0; i < dim; ++i) a[i][im.size() + j] = reps[j][i];
    auto sol = solve(a, v);
    if (!sol) throw Error("internal: closed form outside kernel span");
    return RationalVector(sol->begin() + static_cast<long>(im.size()), sol->end());
}

std::optional<DiffForm> CohomologySolver::primitive(const DiffForm& form) const {
    int k = form.degree();
    RationalVector v = to_vector(form);
    if (k < static_cast<int>(model_.dimension())) {
        RationalVector dv = mat_vec(d_matrix_[static_cast<std::size_t>(k)], v);
        for (const auto& x : dv)
            if (x != 0) throw NotClosed("exactness test on a non-closed form");
    }
    if (k == 0) {
        for (const auto& x : v)
            if (x != 0) return std::nullopt;
        return DiffForm::zero(model_.coordinates(), 0, Basis::frame);
    }
    auto sol = solve(d_matrix_[static_cast<std::size_t>(k - 1)], v);
    if (!sol) return std::nullopt;
    return from_vector(k - 1, *sol);
}

CohomologyBasis ce_cohomology(const ManifoldModel& model, int k) {
    CohomologySolver solver(model);
    return CohomologyBasis{solver.betti(k), solver.representatives(k)};
}

ExactnessResult is_exact(const DiffForm& form, const ManifoldModel& model) {
    DiffForm f = form.basis() == Basis::frame
                     ? form
                     : change_basis(form, Basis::frame, model.frame());
    CohomologySolver solver(model);
    auto p = solver.primitive(f);
    if (p) return ExactnessResult{true, std::move(p)};
    return ExactnessResult{false, std::nullopt};
}

bool is_lagrangian(const CoordRegion& region, const DiffForm& omega,
                   const ManifoldModel& model) {
    std::size_t n = model.dimension();
    if (region.constraints.size() != n)
        throw BadDimension("region must constrain every coordinate");
    if (region.free_count() != 2)
        throw BadDimension("a Lagrangian 2-torus needs exactly two free coordinates");
    std::map<std::string, PolyScalar> fixed;
    std::vector<int> free_idx;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = region.constraints[i];
        switch (c.kind) {
        case CoordConstraintKind::free_coord:
            free_idx.push_back(static_cast<int>(i));
            break;
        case CoordConstraintKind::fixed_coord:
            fixed[model.coordinates()[i]] = PolyScalar(c.value);
            break;
        case CoordConstraintKind::band_coord:
            throw PreconditionError("Lagrangian test needs fixed (not banded) coordinates");
        }
    }
    DiffForm w = omega.basis() == Basis::frame
                     ? change_basis(omega, Basis::coordinate, model.frame())
                     : omega;
    PolyScalar restricted = w.coefficient({free_idx[0], free_idx[1]}).substitute(fixed);
    return restricted.is_zero();
}

} // namespace nilflux
