#include "nilflux/displacement.hpp"
#include "nilflux/errors.hpp"

#include <algorithm>
#include <set>

namespace nilflux {

// --- commutator schema -------------------------------------------------------

DisplacementVerdict commutator_displacement(const AffineMap& lift, const PartialAffineMap& f,
                                            const Polyhedron& v0) {
    if (f.preserved().empty())
        throw PreconditionError("commutator schema needs a nonempty preserved set");
    if (v0.vars() != f.domain().vars())
        throw BadDimension("region and rule domain use different variable lists");
    if (lift.dimension() != v0.vars().size())
        throw BadDimension("lift dimension disagrees with the region");

    auto inconclusive = [](std::string why) {
        return DisplacementVerdict{DisplacementOutcome::inconclusive, std::move(why),
                                   std::nullopt, std::nullopt};
    };

    // The projection argument reads preimages off the rule alone, which is
    // only valid when the domain is carved out by preserved coordinates.
    std::set<std::size_t> preserved(f.preserved().begin(), f.preserved().end());
    for (const auto& c : f.domain().constraints())
        for (std::size_t j = 0; j < c.coeffs.size(); ++j)
            if (c.coeffs[j] != 0 && !preserved.count(j))
                return inconclusive("rule domain constrains the non-preserved coordinate '" +
                                    v0.vars()[j] + "'");

    if (!subset_of(v0, f.domain()))
        return inconclusive("region is not contained in the rule domain");

    Polyhedron b(v0.vars());
    try {
        b = apply_partial(f, v0, Direction::inverse);
    } catch (const DomainError& e) {
        return inconclusive(std::string("preimage step failed: ") + e.what());
    }

    Polyhedron a_prime = apply_affine(lift, b, Direction::inverse);
    Polyhedron c_set = apply_affine(lift, v0, Direction::inverse);

    std::vector<std::string> nonpreserved, preserved_names;
    for (std::size_t j = 0; j < v0.vars().size(); ++j)
        (preserved.count(j) ? preserved_names : nonpreserved).push_back(v0.vars()[j]);

    Polyhedron proj_a = a_prime.eliminate(nonpreserved);
    Polyhedron proj_c = c_set.eliminate(nonpreserved);
    if (is_empty(proj_a.conjunction(proj_c)).empty) {
        SeparationCertificate cert{preserved_names, proj_a, proj_c};
        return DisplacementVerdict{DisplacementOutcome::disjoint,
                                   "preserved-coordinate projections are disjoint",
                                   std::nullopt, std::move(cert)};
    }

    // Try an exact witness of A' meeting f^{-1}(C) inside the domain.
    Polyhedron d = apply_affine(f.rule(), c_set, Direction::inverse).conjunction(f.domain());
    auto feas = is_empty(a_prime.conjunction(d));
    if (!feas.empty) {
        DisplacementWitness w{feas.witness, {}, {}, std::nullopt};
        return DisplacementVerdict{DisplacementOutcome::intersects,
                                   "witness point lies in both commutator preimages",
                                   std::move(w), std::nullopt};
    }
    return inconclusive("projections overlap but no in-domain witness exists");
}

// --- quotient-level disjointness ----------------------------------------------

namespace {

struct SymAffine {
    std::vector<std::vector<PolyScalar>> linear;
    std::vector<PolyScalar> translation;
};

// Binomial coefficient C(z, k) as a polynomial in the symbol z.
PolyScalar binomial_poly(const std::string& z, int k) {
    PolyScalar p(Rational(1));
    Rational kfact(1);
    for (int i = 0; i < k; ++i) {
        p = p * (PolyScalar::variable(z) - PolyScalar(Rational(i)));
        kfact *= Rational(i + 1);
    }
    return p * (Rational(1) / kfact);
}

// g^z for a unipotent generator, as polynomials in the exponent symbol:
// A^z = sum_k C(z,k) E^k and the translation sum_k C(z,k+1) E^k b, E = A - I.
SymAffine symbolic_power(const AffineMap& g, const std::string& z) {
    std::size_t n = g.dimension();
    RationalMatrix e = g.linear();
    for (std::size_t i = 0; i < n; ++i) e[i][i] -= 1;
    auto index = nilpotency_index(e);
    if (!index) throw NotNilpotent("deck generator is not unipotent");

    std::vector<RationalMatrix> pow{identity_matrix(n)};
    for (int k = 1; k < *index; ++k) pow.push_back(mat_mul(pow.back(), e));

    SymAffine out;
    out.linear.assign(n, std::vector<PolyScalar>(n));
    out.translation.assign(n, PolyScalar());
    for (int k = 0; k < *index; ++k) {
        PolyScalar ck = binomial_poly(z, k);
        PolyScalar ck1 = binomial_poly(z, k + 1);
        RationalVector eb = mat_vec(pow[static_cast<std::size_t>(k)], g.translation());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                if (pow[static_cast<std::size_t>(k)][i][j] != 0)
                    out.linear[i][j] += ck * PolyScalar(pow[static_cast<std::size_t>(k)][i][j]);
            if (eb[i] != 0) out.translation[i] += ck1 * PolyScalar(eb[i]);
        }
    }
    return out;
}

SymAffine sym_compose(const SymAffine& f, const SymAffine& g) {
    std::size_t n = f.translation.size();
    SymAffine out;
    out.linear.assign(n, std::vector<PolyScalar>(n));
    out.translation = f.translation;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k)
                if (!f.linear[i][k].is_zero() && !g.linear[k][j].is_zero())
                    out.linear[i][j] += f.linear[i][k] * g.linear[k][j];
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (!f.linear[i][k].is_zero() && !g.translation[k].is_zero())
                out.translation[i] += f.linear[i][k] * g.translation[k];
    return out;
}

AffineMap sym_evaluate(const SymAffine& w, const std::map<std::string, PolyScalar>& assign) {
    std::size_t n = w.translation.size();
    RationalMatrix a(n, RationalVector(n, Rational(0)));
    RationalVector b(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            a[i][j] = w.linear[i][j].substitute(assign).constant_value();
        b[i] = w.translation[i].substitute(assign).constant_value();
    }
    return AffineMap(std::move(a), std::move(b));
}

struct QuotientSolver {
    const ManifoldModel& model;
    const AffineMap& phi;
    const CoordRegion& region;
    Integer bound;

    std::vector<std::string> z_names;
    SymAffine word;
    long nodes = 0;
    bool exhausted_window = false;
    static constexpr long kNodeCap = 50000;

    struct State {
        std::vector<PolyScalar> equations;
        std::vector<std::pair<PolyScalar, Rel>> inequalities;
        std::vector<PolyScalar> deck_equalities; // affine, deck parameters only
        std::vector<std::pair<std::string, PolyScalar>> determined;
        std::map<std::string, Rational> values; // pinned deck params + later witness fills
        std::set<std::string> real_vars;
        std::set<std::string> deck_vars;
    };

    static bool is_affine(const PolyScalar& p) {
        for (const auto& [m, c] : p.terms()) {
            int deg = 0;
            for (const auto& [v, e] : m) deg += e;
            if (deg > 1) return false;
        }
        return true;
    }

    static std::set<std::string> vars_of(const PolyScalar& p) {
        std::set<std::string> out;
        for (const auto& [m, c] : p.terms())
            for (const auto& [v, e] : m) out.insert(v);
        return out;
    }

    static bool var_in_product(const PolyScalar& p, const std::string& v) {
        for (const auto& [m, c] : p.terms()) {
            if (!m.count(v)) continue;
            int deg = 0;
            for (const auto& [var, e] : m) deg += e;
            if (deg > 1 || m.at(v) > 1) return true;
        }
        return false;
    }

    void substitute_everywhere(State& st, const std::string& v, const PolyScalar& expr) const {
        std::map<std::string, PolyScalar> sub{{v, expr}};
        for (auto& e : st.equations) e = e.substitute(sub);
        for (auto& [ie, rel] : st.inequalities) ie = ie.substitute(sub);
        for (auto& e : st.deck_equalities) e = e.substitute(sub);
        st.real_vars.erase(v);
        st.deck_vars.erase(v);
    }

    // Pins uniquely-determined deck parameters out of the affine pure-deck
    // equalities. Returns false (certifying emptiness) on a non-integral or
    // inconsistent pin; `pinned` reports whether progress was made.
    bool pin_deck_values(State& st, bool& pinned, std::string& why) const {
        pinned = false;
        std::vector<std::string> zv(st.deck_vars.begin(), st.deck_vars.end());
        if (st.deck_equalities.empty()) return true;
        RationalMatrix m;
        for (const auto& e : st.deck_equalities) {
            Rational c0;
            RationalVector coeffs;
            if (!e.affine_decompose(zv, c0, coeffs)) continue;
            coeffs.push_back(c0);
            m.push_back(std::move(coeffs));
        }
        if (m.empty()) return true;
        // Row-reduce [A | c]; rows 0 = nonzero mean inconsistency, single-var
        // rows pin that variable.
        RationalMatrix red = m;
        std::size_t rows = red.size(), cols = zv.size() + 1, r = 0;
        for (std::size_t c = 0; c + 1 < cols && r < rows; ++c) {
            std::size_t p = r;
            while (p < rows && red[p][c] == 0) ++p;
            if (p == rows) continue;
            std::swap(red[p], red[r]);
            Rational inv = Rational(1) / red[r][c];
            for (auto& x : red[r]) x *= inv;
            for (std::size_t i = 0; i < rows; ++i) {
                if (i == r || red[i][c] == 0) continue;
                Rational f = red[i][c];
                for (std::size_t j = 0; j < cols; ++j) red[i][j] -= f * red[r][j];
            }
            ++r;
        }
        for (std::size_t i = 0; i < rows; ++i) {
            std::size_t nz = 0, last = 0;
            for (std::size_t j = 0; j + 1 < cols; ++j)
                if (red[i][j] != 0) { ++nz; last = j; }
            if (nz == 0) {
                if (red[i][cols - 1] != 0) {
                    why = "deck-parameter equations are inconsistent";
                    return false;
                }
                continue;
            }
            if (nz == 1) {
                Rational value = -red[i][cols - 1] / red[i][last];
                if (!is_integer(value)) {
                    why = "deck parameter " + zv[last] + " is forced to " +
                          rational_to_string(value) + ", which is not an integer";
                    return false;
                }
                st.values[zv[last]] = value;
                substitute_everywhere(st, zv[last], PolyScalar(value));
                pinned = true;
                return true; // variable list changed; caller re-enters
            }
        }
        return true;
    }

    struct Outcome {
        DisplacementOutcome verdict;
        std::string detail;
        std::optional<DisplacementWitness> witness;
    };

    Outcome solve(State st) {
        if (++nodes > kNodeCap)
            return Outcome{DisplacementOutcome::inconclusive,
                           "search budget exhausted", std::nullopt};
        // Simplification loop.
        while (true) {
            bool progress = false;
            // Constant and pure-deck equations.
            for (std::size_t i = 0; i < st.equations.size();) {
                PolyScalar& e = st.equations[i];
                if (e.is_zero()) {
                    st.equations.erase(st.equations.begin() + static_cast<long>(i));
                    progress = true;
                    continue;
                }
                if (e.is_constant()) {
                    return Outcome{DisplacementOutcome::disjoint,
                                   "matching equation reduces to " +
                                       rational_to_string(e.constant_value()) + " = 0",
                                   std::nullopt};
                }
                auto vars = vars_of(e);
                bool pure_deck = is_affine(e) &&
                                 std::all_of(vars.begin(), vars.end(), [&](const std::string& v) {
                                     return st.deck_vars.count(v) > 0;
                                 });
                if (pure_deck) {
                    st.deck_equalities.push_back(e);
                    st.equations.erase(st.equations.begin() + static_cast<long>(i));
                    progress = true;
                    continue;
                }
                ++i;
            }
            bool pinned = false;
            std::string why;
            if (!pin_deck_values(st, pinned, why))
                return Outcome{DisplacementOutcome::disjoint, why, std::nullopt};
            if (pinned) { continue; }

            // Drop equations solvable by an otherwise-unused real variable.
            for (std::size_t i = 0; i < st.equations.size() && !progress; ++i) {
                const PolyScalar& e = st.equations[i];
                for (const auto& v : vars_of(e)) {
                    if (!st.real_vars.count(v) || var_in_product(e, v)) continue;
                    Rational coeff = e.coefficient(Monomial{{v, 1}});
                    if (coeff == 0) continue;
                    bool elsewhere = false;
                    for (std::size_t k = 0; k < st.equations.size() && !elsewhere; ++k)
                        if (k != i && vars_of(st.equations[k]).count(v)) elsewhere = true;
                    for (const auto& [ie, rel] : st.inequalities)
                        if (vars_of(ie).count(v)) { elsewhere = true; break; }
                    if (elsewhere) continue;
                    PolyScalar rest = e - PolyScalar::variable(v) * PolyScalar(coeff);
                    PolyScalar expr = rest * (Rational(-1) / coeff);
                    st.determined.emplace_back(v, expr);
                    st.real_vars.erase(v);
                    st.equations.erase(st.equations.begin() + static_cast<long>(i));
                    progress = true;
                    break;
                }
            }
            if (progress) continue;

            // Substitute a real variable out of a fully affine equation.
            for (std::size_t i = 0; i < st.equations.size() && !progress; ++i) {
                const PolyScalar& e = st.equations[i];
                if (!is_affine(e)) continue;
                for (const auto& v : vars_of(e)) {
                    if (!st.real_vars.count(v)) continue;
                    bool in_product_somewhere = false;
                    for (const auto& eq : st.equations)
                        if (var_in_product(eq, v)) { in_product_somewhere = true; break; }
                    if (in_product_somewhere) continue;
                    Rational coeff = e.coefficient(Monomial{{v, 1}});
                    if (coeff == 0) continue;
                    PolyScalar rest = e - PolyScalar::variable(v) * PolyScalar(coeff);
                    PolyScalar expr = rest * (Rational(-1) / coeff);
                    st.determined.emplace_back(v, expr);
                    PolyScalar eq_removed = st.equations[i];
                    st.equations.erase(st.equations.begin() + static_cast<long>(i));
                    substitute_everywhere(st, v, expr);
                    progress = true;
                    break;
                }
            }
            if (!progress) break;
        }

        if (!st.equations.empty()) {
            // Product terms survive; branch on a deck parameter they involve.
            std::string branch_var;
            for (const auto& e : st.equations) {
                for (const auto& [m, c] : e.terms()) {
                    int deg = 0;
                    for (const auto& [v, ex] : m) deg += ex;
                    if (deg < 2) continue;
                    for (const auto& [v, ex] : m)
                        if (st.deck_vars.count(v)) { branch_var = v; break; }
                    if (!branch_var.empty()) break;
                }
                if (!branch_var.empty()) break;
            }
            if (branch_var.empty())
                return Outcome{DisplacementOutcome::inconclusive,
                               "nonlinear matching equations without deck parameters",
                               std::nullopt};
            for (Integer v = -bound; v <= bound; ++v) {
                State branch = st;
                branch.values[branch_var] = Rational(v);
                substitute_everywhere(branch, branch_var, PolyScalar(Rational(v)));
                Outcome out = solve(std::move(branch));
                if (out.verdict == DisplacementOutcome::intersects) return out;
                if (out.verdict == DisplacementOutcome::inconclusive &&
                    out.detail == "search budget exhausted")
                    return out;
            }
            return Outcome{DisplacementOutcome::inconclusive,
                           "bounded branching on deck parameter " + branch_var +
                               " found no witness and cannot certify disjointness",
                           std::nullopt};
        }

        return finish_linear(std::move(st));
    }

    // All equations consumed: eliminate the reals, then decide the integer
    // feasibility of the deck-parameter system.
    Outcome finish_linear(State st) {
        std::vector<std::string> reals(st.real_vars.begin(), st.real_vars.end());
        std::vector<std::string> decks(st.deck_vars.begin(), st.deck_vars.end());
        std::vector<std::string> all = reals;
        all.insert(all.end(), decks.begin(), decks.end());

        Polyhedron joint(all);
        for (const auto& [ie, rel] : st.inequalities) {
            Rational c0;
            RationalVector coeffs;
            if (!ie.affine_decompose(all, c0, coeffs))
                return Outcome{DisplacementOutcome::inconclusive,
                               "inequality is not affine after simplification", std::nullopt};
            joint.add(LinearConstraint{std::move(coeffs), c0, rel});
        }
        joint.canonicalize();
        Polyhedron deck_poly = joint.eliminate(reals);
        if (is_empty(deck_poly).empty)
            return Outcome{DisplacementOutcome::disjoint,
                           "real-coordinate constraints are infeasible for every deck element",
                           std::nullopt};

        // Integer solve of the affine deck equalities.
        IntegerMatrix a;
        IntegerVector rhs;
        for (const auto& e : st.deck_equalities) {
            Rational c0;
            RationalVector coeffs;
            if (!e.affine_decompose(decks, c0, coeffs))
                return Outcome{DisplacementOutcome::inconclusive,
                               "deck equality is not affine", std::nullopt};
            Integer lcm(1);
            lcm = lcm * denominator(c0) / gcd(lcm, denominator(c0));
            for (const auto& c : coeffs) {
                Integer d = denominator(c);
                lcm = lcm * d / gcd(lcm, d);
            }
            IntegerVector row;
            for (const auto& c : coeffs) row.push_back(numerator(c * Rational(lcm)));
            a.push_back(std::move(row));
            rhs.push_back(numerator(-c0 * Rational(lcm)));
        }
        IntegerVector z0(decks.size(), 0);
        std::vector<IntegerVector> lattice;
        if (!a.empty()) {
            auto sol = integer_solve(a, rhs);
            if (!sol)
                return Outcome{DisplacementOutcome::disjoint,
                               "deck-parameter congruences have no integer solution",
                               std::nullopt};
            z0 = sol->particular;
            lattice = sol->lattice;
        } else {
            for (std::size_t i = 0; i < decks.size(); ++i) {
                IntegerVector t(decks.size(), 0);
                t[i] = 1;
                lattice.push_back(std::move(t));
            }
        }

        // Substitute z = z0 + L t into the deck polyhedron.
        std::vector<std::string> tvars;
        for (std::size_t i = 0; i < lattice.size(); ++i)
            tvars.push_back("t" + std::to_string(i));
        Polyhedron tpoly(tvars);
        for (const auto& c : deck_poly.constraints()) {
            LinearConstraint tc;
            tc.rel = c.rel;
            tc.constant = c.constant;
            tc.coeffs.assign(tvars.size(), Rational(0));
            for (std::size_t zi = 0; zi < decks.size(); ++zi) {
                if (c.coeffs[zi] == 0) continue;
                tc.constant += c.coeffs[zi] * Rational(z0[zi]);
                for (std::size_t j = 0; j < lattice.size(); ++j)
                    tc.coeffs[j] += c.coeffs[zi] * Rational(lattice[j][zi]);
            }
            tpoly.add(std::move(tc));
        }
        tpoly.canonicalize();

        exhausted_window = false;
        auto tpoint = integer_point(tpoly);
        if (!tpoint && exhausted_window)
            return Outcome{DisplacementOutcome::inconclusive,
                           "unbounded deck-parameter range; no witness in the search window",
                           std::nullopt};
        if (!tpoint)
            return Outcome{DisplacementOutcome::disjoint,
                           "no integer deck parameters satisfy the projected constraints",
                           std::nullopt};

        // Witness reconstruction.
        for (std::size_t zi = 0; zi < decks.size(); ++zi) {
            Integer v = z0[zi];
            for (std::size_t j = 0; j < lattice.size(); ++j) v += lattice[j][zi] * (*tpoint)[j];
            st.values[decks[zi]] = Rational(v);
        }
        Polyhedron real_poly(reals);
        for (const auto& [ie, rel] : st.inequalities) {
            std::map<std::string, PolyScalar> sub;
            for (const auto& d : decks) sub[d] = PolyScalar(st.values.at(d));
            PolyScalar e = ie.substitute(sub);
            Rational c0;
            RationalVector coeffs;
            if (!e.affine_decompose(reals, c0, coeffs))
                return Outcome{DisplacementOutcome::inconclusive,
                               "witness reconstruction failed", std::nullopt};
            real_poly.add(LinearConstraint{std::move(coeffs), c0, rel});
        }
        real_poly.canonicalize();
        auto feas = is_empty(real_poly);
        if (feas.empty)
            return Outcome{DisplacementOutcome::inconclusive,
                           "integer parameters found but real witness missing", std::nullopt};
        for (std::size_t i = 0; i < reals.size(); ++i) st.values[reals[i]] = feas.witness[i];
        for (std::size_t i = st.determined.size(); i-- > 0;) {
            std::map<std::string, PolyScalar> sub;
            for (const auto& [k, v] : st.values) sub[k] = PolyScalar(v);
            st.values[st.determined[i].first] =
                st.determined[i].second.substitute(sub).constant_value();
        }
        return build_witness(st);
    }

    // Exact recursive integer search; sets exhausted_window when an unbounded
    // direction had to be truncated (Disjoint is then not claimable).
    std::optional<IntegerVector> integer_point(const Polyhedron& poly) {
        if (++nodes > kNodeCap) { exhausted_window = true; return std::nullopt; }
        if (poly.vars().empty())
            return is_empty(poly).empty ? std::nullopt : std::optional<IntegerVector>({});
        const std::string var = poly.vars().front();
        std::vector<std::string> others(poly.vars().begin() + 1, poly.vars().end());
        Polyhedron interval = poly.eliminate(others);
        if (is_empty(interval).empty) return std::nullopt;

        std::optional<Rational> lo, hi;
        bool lo_strict = false, hi_strict = false;
        bool unbounded = false;
        for (const auto& c : interval.constraints()) {
            if (c.coeffs[0] == 0) continue;
            Rational bound_v = -c.constant / c.coeffs[0];
            if (c.coeffs[0] > 0) {
                if (!hi || bound_v < *hi) { hi = bound_v; hi_strict = c.rel == Rel::lt; }
                else if (bound_v == *hi && c.rel == Rel::lt) hi_strict = true;
            } else {
                if (!lo || bound_v > *lo) { lo = bound_v; lo_strict = c.rel == Rel::lt; }
                else if (bound_v == *lo && c.rel == Rel::lt) lo_strict = true;
            }
        }
        Integer first, last;
        if (lo && hi) {
            first = lo_strict && is_integer(*lo) ? floor_int(*lo) + 1 : ceil_int(*lo);
            last = hi_strict && is_integer(*hi) ? ceil_int(*hi) - 1 : floor_int(*hi);
        } else if (lo) {
            first = lo_strict && is_integer(*lo) ? floor_int(*lo) + 1 : ceil_int(*lo);
            last = first + 2 * bound;
            unbounded = true;
        } else if (hi) {
            last = hi_strict && is_integer(*hi) ? ceil_int(*hi) - 1 : floor_int(*hi);
            first = last - 2 * bound;
            unbounded = true;
        } else {
            first = -bound;
            last = bound;
            unbounded = true;
        }
        if (unbounded) exhausted_window = true;
        for (Integer v = first; v <= last; ++v) {
            Polyhedron sub(others);
            for (const auto& c : poly.constraints()) {
                LinearConstraint sc;
                sc.rel = c.rel;
                sc.constant = c.constant + c.coeffs[0] * Rational(v);
                sc.coeffs.assign(c.coeffs.begin() + 1, c.coeffs.end());
                sub.add(std::move(sc));
            }
            sub.canonicalize();
            auto rest = integer_point(sub);
            if (rest) {
                IntegerVector out{v};
                out.insert(out.end(), rest->begin(), rest->end());
                return out;
            }
        }
        return std::nullopt;
    }

    Outcome build_witness(State& st) {
        std::size_t n = model.dimension();
        RationalVector p(n), q(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& coord = model.coordinates()[i];
            const auto& c = region.constraints[i];
            if (c.kind == CoordConstraintKind::fixed_coord) {
                p[i] = c.value;
                q[i] = c.value;
            } else {
                p[i] = st.values.at("p." + coord);
                q[i] = st.values.at("q." + coord);
            }
        }
        std::map<std::string, PolyScalar> zsub;
        IntegerVector word;
        for (const auto& z : z_names) {
            Rational v = st.values.at(z);
            zsub[z] = PolyScalar(v);
            word.push_back(numerator(v));
        }
        AffineMap deck = sym_evaluate(word_map(), zsub);
        // Exact recheck of the certificate.
        RationalVector lhs = phi.apply(p);
        RationalVector rhs = deck.apply(q);
        if (lhs != rhs)
            return Outcome{DisplacementOutcome::inconclusive,
                           "witness recheck failed", std::nullopt};
        DisplacementWitness w{p, q, word, deck};
        return Outcome{DisplacementOutcome::intersects,
                       "phi(p) = g(q) with p, q in the region and g a deck element",
                       std::move(w)};
    }

    const SymAffine& word_map() const { return word; }
};

} // namespace

DisplacementVerdict quotient_disjoint(const AffineMap& phi, const CoordRegion& region,
                                      const ManifoldModel& model, const Integer& bound) {
    region.validate();
    if (region.constraints.size() != model.dimension())
        throw BadDimension("region must constrain every model coordinate");
    auto descent = map_descends(phi, model, bound);
    if (descent.outcome != DescentOutcome::yes)
        throw PreconditionError("quotient displacement needs a descending map");

    QuotientSolver solver{model, phi, region, bound};
    std::size_t n = model.dimension();
    std::size_t r = model.lattice().size();

    for (std::size_t i = 0; i < r; ++i)
        solver.z_names.push_back("z" + std::to_string(i));
    SymAffine w = symbolic_power(model.lattice()[0], solver.z_names[0]);
    for (std::size_t i = 1; i < r; ++i)
        w = sym_compose(w, symbolic_power(model.lattice()[i], solver.z_names[i]));
    solver.word = std::move(w);

    QuotientSolver::State st;
    for (const auto& z : solver.z_names) st.deck_vars.insert(z);

    // Point variables; fixed coordinates substitute immediately.
    std::map<std::string, PolyScalar> pvals, qvals;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& coord = model.coordinates()[i];
        const auto& c = region.constraints[i];
        if (c.kind == CoordConstraintKind::fixed_coord) {
            pvals[coord] = PolyScalar(c.value);
            qvals[coord] = PolyScalar(c.value);
        } else {
            std::string pn = "p." + coord, qn = "q." + coord;
            pvals[coord] = PolyScalar::variable(pn);
            qvals[coord] = PolyScalar::variable(qn);
            st.real_vars.insert(pn);
            st.real_vars.insert(qn);
            if (c.kind == CoordConstraintKind::band_coord) {
                st.inequalities.emplace_back(
                    PolyScalar::variable(pn) - PolyScalar(c.value + c.radius), Rel::lt);
                st.inequalities.emplace_back(
                    PolyScalar(c.value - c.radius) - PolyScalar::variable(pn), Rel::lt);
                st.inequalities.emplace_back(
                    PolyScalar::variable(qn) - PolyScalar(c.value + c.radius), Rel::lt);
                st.inequalities.emplace_back(
                    PolyScalar(c.value - c.radius) - PolyScalar::variable(qn), Rel::lt);
            }
        }
    }

    // phi(p) = W(z)(q), row by row.
    for (std::size_t i = 0; i < n; ++i) {
        PolyScalar lhs(phi.translation()[i]);
        for (std::size_t j = 0; j < n; ++j)
            if (phi.linear()[i][j] != 0)
                lhs += PolyScalar(phi.linear()[i][j]) * pvals[model.coordinates()[j]];
        PolyScalar rhs = solver.word.translation[i];
        for (std::size_t j = 0; j < n; ++j)
            if (!solver.word.linear[i][j].is_zero())
                rhs += solver.word.linear[i][j] * qvals[model.coordinates()[j]];
        st.equations.push_back(lhs - rhs);
    }

    auto out = solver.solve(std::move(st));
    DisplacementVerdict verdict{out.verdict, out.detail, std::move(out.witness), std::nullopt};
    return verdict;
}

} // namespace nilflux
