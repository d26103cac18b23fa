#include "nilflux/flux.hpp"
#include "nilflux/errors.hpp"

#include <algorithm>
#include <functional>

namespace nilflux {

namespace {

const std::string kStraightLineConvention =
    "straight-line isotopy: phi_u = (1-u)*id + u*phi on the linear part and translation";

DiffForm to_coordinate(const DiffForm& f, const ManifoldModel& model) {
    return f.basis() == Basis::coordinate ? f
                                          : change_basis(f, Basis::coordinate, model.frame());
}

FluxValue package_one_form(DiffForm coordinate_form, const ManifoldModel& model,
                           std::string convention) {
    DiffForm framed = change_basis(coordinate_form, Basis::frame, model.frame());
    if (framed.has_constant_coefficients())
        return FluxValue{std::move(framed), true, std::move(convention)};
    return FluxValue{std::move(coordinate_form), false, std::move(convention)};
}

// --- univariate Sturm count for the isotopy invertibility check -------------

using UniPoly = std::vector<Rational>; // coefficient of u^i at index i

void uni_trim(UniPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

Rational uni_eval(const UniPoly& p, const Rational& x) {
    Rational acc(0);
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

UniPoly uni_derivative(const UniPoly& p) {
    UniPoly d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rational(static_cast<long>(i)));
    return d;
}

UniPoly uni_mod(UniPoly a, const UniPoly& b) {
    uni_trim(a);
    while (a.size() >= b.size() && !a.empty()) {
        Rational f = a.back() / b.back();
        std::size_t shift = a.size() - b.size();
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
        uni_trim(a);
    }
    return a;
}

UniPoly uni_gcd(UniPoly a, UniPoly b) {
    uni_trim(a);
    uni_trim(b);
    while (!b.empty()) {
        UniPoly r = uni_mod(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

UniPoly uni_divide_exact(const UniPoly& a, const UniPoly& b) {
    UniPoly rem = a, quot(a.size(), Rational(0));
    uni_trim(rem);
    while (rem.size() >= b.size() && !rem.empty()) {
        Rational f = rem.back() / b.back();
        std::size_t shift = rem.size() - b.size();
        quot[shift] = f;
        for (std::size_t i = 0; i < b.size(); ++i) rem[shift + i] -= f * b[i];
        uni_trim(rem);
    }
    uni_trim(quot);
    return quot;
}

int sign_changes(const std::vector<UniPoly>& chain, const Rational& x) {
    int changes = 0, last = 0;
    for (const auto& p : chain) {
        Rational v = uni_eval(p, x);
        int s = v == 0 ? 0 : (v > 0 ? 1 : -1);
        if (s == 0) continue;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

/// Number of distinct real roots of p in (a, b], assuming p(a) != 0.
int sturm_roots(UniPoly p, const Rational& a, const Rational& b) {
    uni_trim(p);
    if (p.size() <= 1) return 0;
    UniPoly g = uni_gcd(p, uni_derivative(p));
    if (g.size() > 1) p = uni_divide_exact(p, g); // squarefree part
    std::vector<UniPoly> chain{p, uni_derivative(p)};
    while (chain.back().size() > 1) {
        UniPoly r = uni_mod(chain[chain.size() - 2], chain.back());
        if (r.empty()) break;
        for (auto& c : r) c = -c;
        chain.push_back(std::move(r));
    }
    return sign_changes(chain, a) - sign_changes(chain, b);
}

} // namespace

FluxValue flux_field(const VecField& x, const DiffForm& omega, const ManifoldModel& model) {
    if (x.coords() != model.coordinates())
        throw BasisMismatch("field chart disagrees with the model");
    DiffForm w = to_coordinate(omega, model);
    if (!exterior_derivative(w).is_zero())
        throw PreconditionError("flux needs a closed 2-form");
    DiffForm contracted = interior(x, w, &model.frame());
    DiffForm integrated(model.coordinates(), 1, Basis::coordinate);
    for (const auto& [idx, c] : contracted.terms())
        integrated.add_term(idx, c.integrate_unit(kTimeSymbol));
    return package_one_form(std::move(integrated), model, "");
}

FluxValue flux_of_map(const AffineMap& phi, const DiffForm& omega, const ManifoldModel& model) {
    std::size_t n = model.dimension();
    if (phi.dimension() != n) throw BadDimension("map dimension disagrees with the model");

    auto descent = map_descends(phi, model);
    if (descent.outcome != DescentOutcome::yes)
        throw PreconditionError("flux of a map that does not descend to the quotient");

    // det((1-u) I + u A) must not vanish on [0, 1].
    std::vector<std::vector<PolyScalar>> interp(n, std::vector<PolyScalar>(n));
    PolyScalar u = PolyScalar::variable(kTimeSymbol);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            PolyScalar entry = u * PolyScalar(phi.linear()[i][j]);
            if (i == j) entry += PolyScalar(Rational(1)) - u;
            interp[i][j] = entry;
        }
    // poly_determinant lives in form.cpp; recompute here via expansion by minors.
    std::function<PolyScalar(const std::vector<std::vector<PolyScalar>>&)> det_rec =
        [&](const std::vector<std::vector<PolyScalar>>& m) -> PolyScalar {
        if (m.empty()) return PolyScalar(Rational(1));
        if (m.size() == 1) return m[0][0];
        PolyScalar acc;
        int sign = 1;
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (!m[0][j].is_zero()) {
                std::vector<std::vector<PolyScalar>> minor;
                for (std::size_t i = 1; i < m.size(); ++i) {
                    std::vector<PolyScalar> row;
                    for (std::size_t k = 0; k < m.size(); ++k)
                        if (k != j) row.push_back(m[i][k]);
                    minor.push_back(std::move(row));
                }
                PolyScalar cof = m[0][j] * det_rec(minor);
                acc += sign == 1 ? cof : -cof;
            }
            sign = -sign;
        }
        return acc;
    };
    PolyScalar det_poly = det_rec(interp);
    UniPoly det_coeffs(n + 1, Rational(0));
    for (const auto& [m, c] : det_poly.terms()) {
        int e = m.empty() ? 0 : m.begin()->second;
        det_coeffs[static_cast<std::size_t>(e)] = c;
    }
    if (uni_eval(det_coeffs, Rational(1)) == 0 ||
        sturm_roots(det_coeffs, Rational(0), Rational(1)) > 0)
        throw BadIsotopy("straight-line interpolation is singular somewhere on [0,1]");

    if (!phi.is_unipotent())
        throw NotNilpotent("exact straight-line flux needs a unipotent linear part");

    // X_u(y) = E (I + uE)^{-1} (y - u b) + b with E = A - I nilpotent.
    RationalMatrix e_mat = phi.linear();
    for (std::size_t i = 0; i < n; ++i) e_mat[i][i] -= 1;
    int index = *nilpotency_index(e_mat);

    // inv(u) = sum_k (-u)^k E^k.
    std::vector<RationalMatrix> e_pow{identity_matrix(n)};
    for (int k = 1; k < index; ++k) e_pow.push_back(mat_mul(e_pow.back(), e_mat));

    std::vector<PolyScalar> y_minus_ub(n);
    for (std::size_t i = 0; i < n; ++i)
        y_minus_ub[i] = PolyScalar::variable(model.coordinates()[i]) -
                        u * PolyScalar(phi.translation()[i]);

    std::vector<PolyScalar> inner(n);
    for (int k = 0; k < index; ++k) {
        PolyScalar uk = (k % 2 == 0 ? u.pow(k) : -u.pow(k));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (e_pow[static_cast<std::size_t>(k)][i][j] != 0)
                    inner[i] += uk * PolyScalar(e_pow[static_cast<std::size_t>(k)][i][j]) *
                                y_minus_ub[j];
    }
    std::vector<PolyScalar> comps(n);
    for (std::size_t i = 0; i < n; ++i) {
        comps[i] = PolyScalar(phi.translation()[i]);
        for (std::size_t j = 0; j < n; ++j)
            if (e_mat[i][j] != 0) comps[i] += PolyScalar(e_mat[i][j]) * inner[j];
    }
    FluxValue value = flux_field(VecField(model.coordinates(), std::move(comps)), omega, model);
    value.convention = kStraightLineConvention;
    return value;
}

// ---------------------------------------------------------------------------

H1Structure::H1Structure(const ManifoldModel& model) {
    std::size_t r = model.lattice().size();
    const auto& comm = model.pi1().commutator;
    IntegerMatrix c(r, IntegerVector(std::max<std::size_t>(comm.size(), 1), 0));
    for (std::size_t j = 0; j < comm.size(); ++j)
        for (std::size_t i = 0; i < r; ++i) c[i][j] = comm[j][i];
    auto hr = hermite_columns(c);
    hnf_ = hr.h;
    pivot_rows_ = hr.pivot_rows;
    for (std::size_t j = 0; j < pivot_rows_.size(); ++j)
        if (hnf_[pivot_rows_[j]][j] != 1)
            throw ModelError("torsion in the generator quotient (Hermite pivot != 1)");
    std::vector<bool> is_pivot(r, false);
    for (auto p : pivot_rows_) is_pivot[p] = true;
    for (std::size_t i = 0; i < r; ++i)
        if (!is_pivot[i]) basis_.push_back(i);

    std::vector<IntegerVector> reduced;
    for (const auto& z : model.pi1().center) reduced.push_back(reduce(z));
    if (!reduced.empty()) {
        IntegerMatrix m(basis_.size(), IntegerVector(reduced.size(), 0));
        for (std::size_t j = 0; j < reduced.size(); ++j)
            for (std::size_t i = 0; i < basis_.size(); ++i) m[i][j] = reduced[j][i];
        auto img = hermite_columns(m);
        for (std::size_t j = 0; j < img.pivot_rows.size(); ++j) {
            IntegerVector v(basis_.size());
            for (std::size_t i = 0; i < basis_.size(); ++i) v[i] = img.h[i][j];
            center_image_.push_back(std::move(v));
        }
    }
}

IntegerVector H1Structure::reduce(IntegerVector full) const {
    for (std::size_t j = 0; j < pivot_rows_.size(); ++j) {
        Integer alpha = full[pivot_rows_[j]]; // pivot entries are 1
        if (alpha == 0) continue;
        for (std::size_t i = 0; i < full.size(); ++i) full[i] -= alpha * hnf_[i][j];
    }
    IntegerVector out;
    out.reserve(basis_.size());
    for (auto b : basis_) out.push_back(full[b]);
    return out;
}

DiffForm poincare_dual(const RationalVector& h_in_basis, const ManifoldModel& model) {
    H1Structure h1(model);
    if (h_in_basis.size() != h1.basis().size())
        throw BadDimension("class vector length disagrees with the H1 basis");
    VecField v = VecField::zero(model.coordinates());
    for (std::size_t j = 0; j < h_in_basis.size(); ++j)
        if (h_in_basis[j] != 0)
            v = v + model.dual_frame_field(h1.basis()[j]).scaled(PolyScalar(h_in_basis[j]));
    DiffForm dual = interior(v, model.volume_form());
    return change_basis(dual, Basis::frame, model.frame());
}

std::vector<LoopSpec> preset_loops(const ManifoldModel& model) {
    H1Structure h1(model);
    std::size_t r = model.lattice().size();
    std::vector<LoopSpec> loops;
    if (model.name() == "kodaira-thurston") {
        std::vector<PolyScalar> minus_dt(4);
        minus_dt[1] = PolyScalar(Rational(-1));
        IntegerVector ev_t(r, 0);
        ev_t[1] = -1;
        loops.push_back(LoopSpec{"rotation-minus-t", VecField(model.coordinates(), minus_dt),
                                 h1.reduce(ev_t)});
        std::vector<PolyScalar> dx(4);
        dx[2] = PolyScalar(Rational(1));
        IntegerVector ev_x(r, 0);
        ev_x[2] = 1;
        loops.push_back(
            LoopSpec{"rotation-x", VecField(model.coordinates(), dx), h1.reduce(ev_x)});
        return loops;
    }
    if (model.name() == "torus4") {
        for (std::size_t i = 0; i < 4; ++i) {
            std::vector<PolyScalar> comp(4);
            comp[i] = PolyScalar(Rational(1));
            IntegerVector ev(r, 0);
            ev[i] = 1;
            loops.push_back(LoopSpec{"rotation-x" + std::to_string(i + 1),
                                     VecField(model.coordinates(), comp), h1.reduce(ev)});
        }
        return loops;
    }
    throw UsageError("no preset loops for model '" + model.name() + "'");
}

FluxLattice flux_lattice(const ManifoldModel& model, const DiffForm& omega,
                         const std::vector<LoopSpec>& loops) {
    if (model.dimension() != 4)
        throw BadDimension("the evaluation diagram is normalized for dimension 4 "
                           "(where the (n-1)! factor is 1)");
    auto report = is_symplectic(omega, model);
    if (!report.closed || !report.nondegenerate)
        throw PreconditionError("flux subgroup needs a closed nondegenerate form");
    Rational volume = report.volume.constant_value();

    DiffForm w_frame = omega.basis() == Basis::frame
                           ? omega
                           : change_basis(omega, Basis::frame, model.frame());
    if (!w_frame.has_constant_coefficients())
        throw NotInvariant("form has non-constant frame coefficients");

    CohomologySolver solver(model);
    H1Structure h1(model);
    const auto& h1_reps = solver.representatives(1);

    // Matrix of wedging with [omega]: H^1 -> H^{n-1}.
    std::size_t h3 = static_cast<std::size_t>(solver.betti(3));
    RationalMatrix m(h3, RationalVector(h1_reps.size(), Rational(0)));
    for (std::size_t j = 0; j < h1_reps.size(); ++j) {
        RationalVector cls = solver.class_coordinates(wedge(h1_reps[j], w_frame));
        for (std::size_t i = 0; i < h3; ++i) m[i][j] = cls[i];
    }

    FluxLattice gamma;
    gamma.volume = volume;
    gamma.h1_basis = h1.basis();
    gamma.center_image = h1.center_image();

    for (const auto& h : h1.center_image()) {
        RationalVector hq;
        for (const auto& z : h) hq.push_back(Rational(z));
        RationalVector target =
            solver.class_coordinates(poincare_dual(hq, model).scaled(volume));
        auto sol = solve(m, target);
        if (!sol)
            throw DiagramViolation("dual of a center class misses the image of wedge-[omega]");
        DiffForm part(model.coordinates(), 1, Basis::frame);
        for (std::size_t j = 0; j < h1_reps.size(); ++j)
            part += h1_reps[j].scaled((*sol)[j]);
        gamma.particular.push_back(std::move(part));
    }
    for (const auto& k : kernel_basis(m)) {
        DiffForm ker(model.coordinates(), 1, Basis::frame);
        for (std::size_t j = 0; j < h1_reps.size(); ++j) ker += h1_reps[j].scaled(k[j]);
        gamma.kernel.push_back(std::move(ker));
    }

    for (const auto& loop : loops) {
        auto fd = field_descends(loop.field, model);
        if (!fd.descends)
            throw PreconditionError("loop '" + loop.label +
                                    "': generating field does not descend");
        if (loop.evaluation.size() != h1.basis().size())
            throw BadDimension("loop '" + loop.label + "': evaluation class length");
        FluxValue f = flux_field(loop.field, omega, model);
        if (!f.invariant)
            throw DiagramViolation("loop '" + loop.label + "': flux is not invariant");
        RationalVector lhs = solver.class_coordinates(wedge(f.form, w_frame));
        RationalVector ev;
        for (const auto& z : loop.evaluation) ev.push_back(Rational(z));
        RationalVector rhs =
            solver.class_coordinates(poincare_dual(ev, model).scaled(volume));
        if (lhs != rhs)
            throw DiagramViolation("loop '" + loop.label +
                                   "': flux wedge [omega] differs from volume * dual class");
        gamma.loop_labels.push_back(loop.label);
        gamma.verified.push_back(f.form);
    }
    return gamma;
}

namespace {

RationalVector frame_one_form_vector(const DiffForm& f, const ManifoldModel& model) {
    DiffForm framed = f.basis() == Basis::frame ? f : change_basis(f, Basis::frame, model.frame());
    if (framed.degree() != 1) throw BadDimension("expected a 1-form");
    if (!framed.has_constant_coefficients())
        throw NotInvariant("1-form has non-constant frame coefficients");
    RationalVector v(model.dimension(), Rational(0));
    for (const auto& [idx, c] : framed.terms())
        v[static_cast<std::size_t>(idx[0])] = c.constant_value();
    return v;
}

} // namespace

MembershipResult in_flux_lattice(const DiffForm& v, const FluxLattice& gamma,
                                 const ManifoldModel& model) {
    RationalVector target = frame_one_form_vector(v, model);
    std::size_t n = model.dimension();

    std::vector<RationalVector> gen_vecs;
    for (const auto& g : gamma.verified) gen_vecs.push_back(frame_one_form_vector(g, model));

    RationalMatrix a(n, RationalVector(gen_vecs.size(), Rational(0)));
    for (std::size_t j = 0; j < gen_vecs.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) a[i][j] = gen_vecs[j][i];
    if (rank(a) != gen_vecs.size())
        throw PreconditionError("verified generators are not independent");

    if (auto sol = solve(a, target)) {
        bool integral = std::all_of(sol->begin(), sol->end(),
                                    [](const Rational& c) { return is_integer(c); });
        if (integral) {
            IntegerVector coeffs;
            for (const auto& c : *sol) coeffs.push_back(numerator(c));
            return MembershipResult{Membership::yes, std::move(coeffs)};
        }
        return MembershipResult{Membership::no, {}};
    }

    std::vector<RationalVector> constraint_span;
    for (const auto& p : gamma.particular)
        constraint_span.push_back(frame_one_form_vector(p, model));
    for (const auto& k : gamma.kernel)
        constraint_span.push_back(frame_one_form_vector(k, model));
    if (!in_span(constraint_span, target))
        return MembershipResult{Membership::outside_constraint, {}};
    return MembershipResult{Membership::no, {}};
}

} // namespace nilflux
