#include "nilflux/polyhedron.hpp"
#include "nilflux/errors.hpp"

#include <algorithm>
#include <map>

namespace nilflux {

bool LinearConstraint::satisfied_by(const RationalVector& point) const {
    Rational v = constant;
    for (std::size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * point[i];
    return rel == Rel::lt ? v < 0 : v <= 0;
}

Polyhedron::Polyhedron(std::vector<std::string> vars) : vars_(std::move(vars)) {}

Polyhedron Polyhedron::from_region(const CoordRegion& region, const CoordinateSystem& coords) {
    if (region.constraints.size() != coords.size())
        throw BadDimension("region must constrain every coordinate");
    Polyhedron p(coords);
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const auto& c = region.constraints[i];
        RationalVector unit(coords.size(), Rational(0));
        unit[i] = 1;
        RationalVector minus(coords.size(), Rational(0));
        minus[i] = -1;
        switch (c.kind) {
        case CoordConstraintKind::free_coord:
            break;
        case CoordConstraintKind::fixed_coord:
            // Equality as a pair of non-strict inequalities.
            p.add({unit, -c.value, Rel::le});
            p.add({minus, c.value, Rel::le});
            break;
        case CoordConstraintKind::band_coord:
            p.add({unit, -c.value - c.radius, Rel::lt});
            p.add({minus, c.value - c.radius, Rel::lt});
            break;
        }
    }
    p.canonicalize();
    return p;
}

void Polyhedron::add(LinearConstraint c) {
    if (c.coeffs.size() != vars_.size())
        throw BadDimension("constraint width disagrees with the variable list");
    cons_.push_back(std::move(c));
}

void Polyhedron::canonicalize() {
    std::vector<LinearConstraint> kept;
    for (auto& c : cons_) {
        bool all_zero = std::all_of(c.coeffs.begin(), c.coeffs.end(),
                                    [](const Rational& x) { return x == 0; });
        if (all_zero) {
            bool holds = c.rel == Rel::lt ? c.constant < 0 : c.constant <= 0;
            if (!holds) kept.push_back(std::move(c)); // infeasibility marker
            continue;
        }
        // Scale so the first nonzero coefficient has absolute value 1.
        Rational lead(0);
        for (const auto& x : c.coeffs)
            if (x != 0) { lead = abs(x); break; }
        if (lead != 1) {
            for (auto& x : c.coeffs) x /= lead;
            c.constant /= lead;
        }
        kept.push_back(std::move(c));
    }
    // Same-direction slack removal: for identical coefficient vectors keep the
    // tightest constant (largest; ties go to the strict relation).
    std::map<RationalVector, LinearConstraint> best;
    std::vector<LinearConstraint> markers;
    for (auto& c : kept) {
        bool all_zero = std::all_of(c.coeffs.begin(), c.coeffs.end(),
                                    [](const Rational& x) { return x == 0; });
        if (all_zero) { markers.push_back(std::move(c)); continue; }
        auto it = best.find(c.coeffs);
        if (it == best.end()) {
            best.emplace(c.coeffs, std::move(c));
        } else if (c.constant > it->second.constant ||
                   (c.constant == it->second.constant && c.rel == Rel::lt)) {
            it->second = std::move(c);
        }
    }
    cons_.clear();
    for (auto& m : markers) cons_.push_back(std::move(m));
    for (auto& [k, c] : best) cons_.push_back(std::move(c));
    std::sort(cons_.begin(), cons_.end(), [](const LinearConstraint& a, const LinearConstraint& b) {
        int cmp = compare_vectors(a.coeffs, b.coeffs);
        if (cmp != 0) return cmp < 0;
        if (a.rel != b.rel) return a.rel == Rel::lt;
        return a.constant < b.constant;
    });
}

namespace {

// Projects away the variable at `idx`, combining lower and upper bounds;
// strictness propagates (strict + non-strict stays strict).
std::vector<LinearConstraint> fm_step(const std::vector<LinearConstraint>& cons, std::size_t idx) {
    std::vector<LinearConstraint> keep, lower, upper;
    for (const auto& c : cons) {
        if (c.coeffs[idx] == 0) keep.push_back(c);
        else if (c.coeffs[idx] > 0) upper.push_back(c);
        else lower.push_back(c);
    }
    for (const auto& lo : lower)
        for (const auto& up : upper) {
            Rational a = up.coeffs[idx], b = -lo.coeffs[idx];
            LinearConstraint combined;
            combined.coeffs.resize(lo.coeffs.size());
            for (std::size_t j = 0; j < lo.coeffs.size(); ++j)
                combined.coeffs[j] = a * lo.coeffs[j] + b * up.coeffs[j];
            combined.constant = a * lo.constant + b * up.constant;
            combined.rel = (lo.rel == Rel::lt || up.rel == Rel::lt) ? Rel::lt : Rel::le;
            keep.push_back(std::move(combined));
        }
    return keep;
}

std::vector<LinearConstraint> drop_column(const std::vector<LinearConstraint>& cons,
                                          std::size_t idx) {
    std::vector<LinearConstraint> out;
    out.reserve(cons.size());
    for (const auto& c : cons) {
        LinearConstraint d;
        d.rel = c.rel;
        d.constant = c.constant;
        d.coeffs.reserve(c.coeffs.size() - 1);
        for (std::size_t j = 0; j < c.coeffs.size(); ++j)
            if (j != idx) d.coeffs.push_back(c.coeffs[j]);
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace

std::size_t Polyhedron::var_index(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) throw UsageError("unknown polyhedron variable '" + name + "'");
    return static_cast<std::size_t>(it - vars_.begin());
}

Polyhedron Polyhedron::eliminate(const std::vector<std::string>& drop) const {
    std::vector<std::string> to_drop = drop;
    std::sort(to_drop.begin(), to_drop.end());
    Polyhedron current = *this;
    current.canonicalize();
    for (const auto& name : to_drop) {
        std::size_t idx = current.var_index(name);
        auto cons = fm_step(current.cons_, idx);
        cons = drop_column(cons, idx);
        std::vector<std::string> vars = current.vars_;
        vars.erase(vars.begin() + static_cast<long>(idx));
        Polyhedron next(std::move(vars));
        for (auto& c : cons) next.add(std::move(c));
        next.canonicalize();
        current = std::move(next);
    }
    return current;
}

Polyhedron Polyhedron::conjunction(const Polyhedron& other) const {
    if (vars_ != other.vars_) throw BadDimension("conjunction over different variable lists");
    Polyhedron p(vars_);
    for (const auto& c : cons_) p.add(c);
    for (const auto& c : other.cons_) p.add(c);
    p.canonicalize();
    return p;
}

LinearConstraint Polyhedron::negation(const LinearConstraint& c) {
    LinearConstraint n;
    n.coeffs.reserve(c.coeffs.size());
    for (const auto& x : c.coeffs) n.coeffs.push_back(-x);
    n.constant = -c.constant;
    n.rel = c.rel == Rel::lt ? Rel::le : Rel::lt; // complement flips strictness
    return n;
}

bool Polyhedron::contains_point(const RationalVector& point) const {
    if (point.size() != vars_.size()) throw BadDimension("point dimension mismatch");
    return std::all_of(cons_.begin(), cons_.end(),
                       [&](const LinearConstraint& c) { return c.satisfied_by(point); });
}

FeasibilityResult is_empty(const Polyhedron& p) {
    // Eliminate every variable, keeping each stage for back-substitution.
    std::vector<Polyhedron> stages{p};
    stages.back().canonicalize();
    std::vector<std::string> order = p.vars();
    for (const auto& name : order) stages.push_back(stages.back().eliminate({name}));

    for (const auto& c : stages.back().constraints()) {
        bool holds = c.rel == Rel::lt ? c.constant < 0 : c.constant <= 0;
        if (!holds) return FeasibilityResult{true, {}};
    }

    // Walk back, choosing a rational value inside each one-variable interval.
    std::map<std::string, Rational> assign;
    for (std::size_t level = order.size(); level-- > 0;) {
        const Polyhedron& stage = stages[level];
        const std::string& name = order[level];
        std::size_t idx = stage.var_index(name);
        std::optional<Rational> lo, hi;
        bool lo_strict = false, hi_strict = false;
        for (const auto& c : stage.constraints()) {
            if (c.coeffs[idx] == 0) continue;
            Rational rest = c.constant;
            for (std::size_t j = 0; j < c.coeffs.size(); ++j) {
                if (j == idx || c.coeffs[j] == 0) continue;
                rest += c.coeffs[j] * assign.at(stage.vars()[j]);
            }
            Rational bound = -rest / c.coeffs[idx];
            if (c.coeffs[idx] > 0) {
                if (!hi || bound < *hi) { hi = bound; hi_strict = c.rel == Rel::lt; }
                else if (bound == *hi && c.rel == Rel::lt) hi_strict = true;
            } else {
                if (!lo || bound > *lo) { lo = bound; lo_strict = c.rel == Rel::lt; }
                else if (bound == *lo && c.rel == Rel::lt) lo_strict = true;
            }
        }
        Rational value(0);
        if (lo && hi) value = (*lo == *hi) ? *lo : (*lo + *hi) / 2;
        else if (lo) value = lo_strict ? *lo + 1 : *lo;
        else if (hi) value = hi_strict ? *hi - 1 : *hi;
        assign[name] = value;
    }
    RationalVector witness;
    witness.reserve(order.size());
    for (const auto& name : order) witness.push_back(assign.at(name));
    return FeasibilityResult{false, std::move(witness)};
}

bool subset_of(const Polyhedron& p, const Polyhedron& q) {
    if (p.vars() != q.vars()) throw BadDimension("subset test over different variable lists");
    for (const auto& c : q.constraints()) {
        Polyhedron outside(p.vars());
        for (const auto& pc : p.constraints()) outside.add(pc);
        outside.add(Polyhedron::negation(c));
        if (!is_empty(outside).empty) return false;
    }
    return true;
}

bool same_set(const Polyhedron& p, const Polyhedron& q) {
    return subset_of(p, q) && subset_of(q, p);
}

Polyhedron apply_affine(const AffineMap& map, const Polyhedron& p, Direction dir) {
    if (map.dimension() != p.vars().size())
        throw BadDimension("map dimension disagrees with the polyhedron");
    // forward image {g(x) : x in P} = {y : g^{-1}(y) in P}; preimage substitutes g.
    const AffineMap subst = dir == Direction::forward ? map.inverse() : map;
    Polyhedron out(p.vars());
    for (const auto& c : p.constraints()) {
        LinearConstraint n;
        n.rel = c.rel;
        n.constant = c.constant;
        n.coeffs.assign(c.coeffs.size(), Rational(0));
        for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
            if (c.coeffs[i] == 0) continue;
            n.constant += c.coeffs[i] * subst.translation()[i];
            for (std::size_t j = 0; j < c.coeffs.size(); ++j)
                n.coeffs[j] += c.coeffs[i] * subst.linear()[i][j];
        }
        out.add(std::move(n));
    }
    out.canonicalize();
    return out;
}

PartialAffineMap::PartialAffineMap(AffineMap rule, Polyhedron domain,
                                   std::vector<std::size_t> preserved)
    : rule_(std::move(rule)), domain_(std::move(domain)), preserved_(std::move(preserved)) {
    std::size_t n = rule_.dimension();
    if (domain_.vars().size() != n)
        throw BadDimension("domain dimension disagrees with the rule");
    std::sort(preserved_.begin(), preserved_.end());
    for (auto i : preserved_)
        if (i >= n) throw BadDimension("preserved coordinate index out of range");
    // The rule must fix every preserved coordinate on the whole domain:
    // rule_i(x) - x_i vanishes there (checked as two strict infeasibilities).
    for (auto i : preserved_) {
        LinearConstraint diff;
        diff.coeffs.assign(n, Rational(0));
        for (std::size_t j = 0; j < n; ++j) diff.coeffs[j] = rule_.linear()[i][j];
        diff.coeffs[i] -= 1;
        diff.constant = rule_.translation()[i];
        diff.rel = Rel::lt;

        LinearConstraint minus_diff;
        minus_diff.coeffs.reserve(n);
        for (const auto& x : diff.coeffs) minus_diff.coeffs.push_back(-x);
        minus_diff.constant = -diff.constant;
        minus_diff.rel = Rel::lt;

        Polyhedron below = domain_;
        below.add(diff);
        Polyhedron above = domain_;
        above.add(minus_diff);
        if (!is_empty(below).empty || !is_empty(above).empty)
            throw PreconditionError("rule moves preserved coordinate " + std::to_string(i) +
                                    " on its domain");
    }
}

Polyhedron apply_partial(const PartialAffineMap& f, const Polyhedron& p, Direction dir) {
    if (dir == Direction::forward) {
        if (!subset_of(p, f.domain()))
            throw DomainError("region is not contained in the rule's domain");
        return apply_affine(f.rule(), p, Direction::forward);
    }
    Polyhedron pre = apply_affine(f.rule(), p, Direction::inverse);
    if (!subset_of(pre, f.domain()))
        throw DomainError("preimage leaves the rule's domain");
    return pre;
}

} // namespace nilflux
