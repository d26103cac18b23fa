#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nilflux/errors.hpp"
#include "nilflux/manifold.hpp"
#include "support/test_support.hpp"

using namespace nilflux;

namespace {

const ManifoldModel& kt() {
    static ManifoldModel m = ManifoldModel::kodaira_thurston();
    return m;
}
const ManifoldModel& t4() {
    static ManifoldModel m = ManifoldModel::torus4();
    return m;
}

PolyScalar rat(long n, long d = 1) { return PolyScalar(make_rational(n, d)); }

DiffForm omega_standard() {
    DiffForm w = kt().coordinate_form({0, 1}, rat(1));
    w += kt().coordinate_form({2, 3}, rat(1));
    return w;
}

DiffForm omega_linear(const Rational& a, const Rational& b, const Rational& e,
                      const Rational& f) {
    DiffForm w = kt().frame_form({2, 0}, PolyScalar(a));
    w += kt().frame_form({2, 3}, PolyScalar(b));
    w += kt().frame_form({0, 1}, PolyScalar(e));
    w += kt().frame_form({3, 1}, PolyScalar(f));
    return w;
}

DiffForm torus_omega(const std::map<std::pair<int, int>, Rational>& a) {
    DiffForm w = DiffForm::zero(t4().coordinates(), 2, Basis::coordinate);
    for (const auto& [ij, c] : a)
        w += t4().coordinate_form({ij.first, ij.second}, PolyScalar(c));
    return w;
}

AffineMap kt_translation(const Rational& ds, const Rational& dt, const Rational& dx,
                         const Rational& dy) {
    return AffineMap::translation({ds, dt, dx, dy});
}

CoordRegion region_fixing(const std::map<std::size_t, Rational>& fixed, std::size_t n = 4) {
    CoordRegion r;
    r.constraints.assign(n, CoordConstraint::free());
    for (const auto& [i, v] : fixed) r.constraints[i] = CoordConstraint::fixed(v);
    return r;
}

} // namespace

TEST_CASE("shipped models pass their construction validations") {
    CHECK(kt().dimension() == 4);
    CHECK(t4().dimension() == 4);
    CHECK(kt().deck_decomposition_available());
    CHECK(t4().deck_decomposition_available());
    CHECK_THROWS_AS(ManifoldModel::preset("klein-bottle"), UsageError);
}

TEST_CASE("model validation rejects a non-invariant coframe") {
    // Use dx alone in place of the shear-invariant frame form.
    CoordinateSystem coords = {"s", "t", "x", "y"};
    auto c1 = [&](int i) { return DiffForm::term(coords, {i}, rat(1), Basis::coordinate); };
    std::vector<DiffForm> coframe = {c1(0), c1(1), c1(2), c1(3)};
    DiffForm zero2 = DiffForm::zero(coords, 2, Basis::frame);
    RationalMatrix shear = identity_matrix(4);
    shear[2][3] = 1;
    ModelData data{"broken",
                   coords,
                   coframe,
                   {zero2, zero2, zero2, zero2},
                   {"ds", "dt", "dx", "dy"},
                   {AffineMap(shear, {Rational(1), Rational(0), Rational(0), Rational(0)})},
                   DiffForm::term(coords, {0, 1, 2, 3}, rat(1), Basis::coordinate),
                   Pi1Data{{"g"}, {}, {}}};
    CHECK_THROWS_AS(ManifoldModel(std::move(data)), ModelError);
}

TEST_CASE("translation maps descend with deck witnesses") {
    auto res = map_descends(kt_translation(make_rational(1, 5), make_rational(-1, 2),
                                           make_rational(1, 3), Rational(0)),
                            kt());
    REQUIRE(res.outcome == DescentOutcome::yes);
    CHECK(res.witnesses.size() == 4);
    for (const auto& w : res.witnesses)
        CHECK(w.deck == kt().lattice()[w.generator]); // translations centralize the deck group

    auto id_res = map_descends(AffineMap::identity(4), kt());
    CHECK(id_res.outcome == DescentOutcome::yes);
}

TEST_CASE("the linear-family representative descends") {
    // (s, t, x, y) -> (s + bc, t - alpha, x + beta - ac s, y - ac)
    Rational a(1), b(2), c = make_rational(1, 5), alpha = make_rational(1, 2),
             beta = make_rational(1, 3);
    RationalMatrix lin = identity_matrix(4);
    lin[2][0] = -a * c;
    AffineMap phi(lin, {b * c, -alpha, beta, -a * c});
    CHECK(map_descends(phi, kt()).outcome == DescentOutcome::yes);
}

TEST_CASE("a shear by half fails to descend with a residual witness") {
    RationalMatrix lin = identity_matrix(4);
    lin[2][0] = make_rational(1, 2); // x -> x + s/2
    AffineMap phi(lin, RationalVector(4, Rational(0)));
    auto res = map_descends(phi, kt());
    REQUIRE(res.outcome == DescentOutcome::no);
    REQUIRE(res.residual.has_value());
    // The gluing generator forces a residual translation by 1/2 in x.
    CHECK(res.failing_generator == 0);
}

TEST_CASE("witnesses beyond the bound are inconclusive, not negative") {
    // Conjugating the shear generator by a y-translation of 100 produces a
    // deck witness with an x-entry of -100, past the default bound.
    AffineMap big = kt_translation(Rational(0), Rational(0), Rational(0), Rational(100));
    auto res = map_descends(big, kt(), 8);
    CHECK(res.outcome == DescentOutcome::inconclusive);
    auto res2 = map_descends(big, kt(), 128);
    CHECK(res2.outcome == DescentOutcome::yes);
}

TEST_CASE("field descent on the nilmanifold") {
    auto mk = [&](std::map<std::size_t, PolyScalar> comps) {
        std::vector<PolyScalar> c(4);
        for (auto& [i, p] : comps) c[i] = std::move(p);
        return VecField(kt().coordinates(), std::move(c));
    };
    CHECK(field_descends(mk({{2, rat(1)}}), kt()).descends);      // d/dx
    CHECK_FALSE(field_descends(mk({{3, rat(1)}}), kt()).descends); // d/dy picks up d/dx
    auto bad = field_descends(mk({{3, rat(1)}}), kt());
    REQUIRE(bad.failing_generator.has_value());
    CHECK(*bad.failing_generator == 0);
    REQUIRE(bad.pushed.has_value());
    CHECK(bad.pushed->component(2) == rat(1)); // the extra d/dx term

    // X = (1/(be-af)) (-a s dx - a dy + b ds) at (1,2,3,4).
    Rational inv = Rational(1) / Rational(2);
    auto x = mk({{0, PolyScalar(Rational(2) * inv)},
                 {2, -PolyScalar::variable("s") * PolyScalar(inv)},
                 {3, PolyScalar(-inv)}});
    CHECK(field_descends(x, kt()).descends);
}

TEST_CASE("symplectic reports for the shipped families") {
    auto std_report = is_symplectic(omega_standard(), kt());
    CHECK(std_report.closed);
    CHECK(std_report.nondegenerate);
    CHECK(std_report.volume.constant_value() == 1);

    for (auto [a, b, e, f] : std::vector<std::array<long, 4>>{
             {1, 2, 3, 4}, {0, 1, 1, 0}, {2, 3, 1, 2}, {1, 1, 1, 1}}) {
        auto rep = is_symplectic(omega_linear(a, b, e, f), kt());
        CHECK(rep.closed);
        Rational expect = Rational(b) * Rational(e) - Rational(a) * Rational(f);
        CHECK(rep.volume.constant_value() == expect);
        CHECK(rep.nondegenerate == (expect != 0));
    }

    auto tor = is_symplectic(torus_omega({{{0, 1}, Rational(1)},
                                          {{2, 3}, Rational(1)},
                                          {{0, 2}, make_rational(1, 2)},
                                          {{1, 3}, make_rational(1, 3)}}),
                             t4());
    // a12 a34 - a13 a24 + a14 a23 = 1 - 1/6 + 0.
    CHECK(tor.volume.constant_value() == make_rational(5, 6));
    CHECK(tor.nondegenerate);
}

TEST_CASE("non-invariant forms are rejected") {
    DiffForm w = kt().coordinate_form({0, 1}, PolyScalar::variable("s"));
    w += kt().coordinate_form({2, 3}, rat(1));
    CHECK_THROWS_AS(is_symplectic(w, kt()), NotInvariant);
}

TEST_CASE("invariant cohomology of the nilmanifold") {
    std::vector<int> expected = {1, 3, 4, 3, 1};
    CohomologySolver solver(kt());
    for (int k = 0; k <= 4; ++k) CHECK(solver.betti(k) == expected[static_cast<std::size_t>(k)]);

    // Representative spans match the stated generators.
    auto span_matches = [&](int k, const std::vector<DiffForm>& stated) {
        const auto& reps = solver.representatives(k);
        if (static_cast<int>(stated.size()) != solver.betti(k)) return false;
        for (const auto& s : stated) {
            RationalVector cls = solver.class_coordinates(s);
            bool nonzero = false;
            for (const auto& c : cls) nonzero = nonzero || c != 0;
            if (!nonzero) return false;
        }
        // Classes of the stated forms span the same space as the reps.
        RationalMatrix m;
        for (const auto& s : stated) m.push_back(solver.class_coordinates(s));
        return rank(m) == static_cast<std::size_t>(solver.betti(k));
    };
    CHECK(span_matches(1, {kt().frame_form({0}, rat(1)), kt().frame_form({1}, rat(1)),
                           kt().frame_form({3}, rat(1))}));
    CHECK(span_matches(2, {kt().frame_form({2, 0}, rat(1)), kt().frame_form({2, 3}, rat(1)),
                           kt().frame_form({0, 1}, rat(1)), kt().frame_form({3, 1}, rat(1))}));
    CHECK(span_matches(3,
                       {kt().frame_form({2, 3, 1}, rat(1)), kt().frame_form({2, 3, 0}, rat(1)),
                        kt().frame_form({2, 0, 1}, rat(1))}));

    // Euler characteristic and duality of ranks.
    int chi = 0;
    for (int k = 0; k <= 4; ++k) chi += (k % 2 == 0 ? 1 : -1) * solver.betti(k);
    CHECK(chi == 0);
    for (int k = 0; k <= 4; ++k) CHECK(solver.betti(k) == solver.betti(4 - k));
}

TEST_CASE("torus cohomology is the full exterior algebra") {
    CohomologySolver solver(t4());
    std::vector<int> binom = {1, 4, 6, 4, 1};
    for (int k = 0; k <= 4; ++k) CHECK(solver.betti(k) == binom[static_cast<std::size_t>(k)]);
}

TEST_CASE("exactness inside the invariant complex") {
    // dy ^ ds ^ dt is exact with primitive gamma ^ dt.
    DiffForm target = kt().frame_form({3, 0, 1}, rat(1));
    auto res = is_exact(target, kt());
    REQUIRE(res.exact);
    REQUIRE(res.primitive.has_value());
    CHECK(exterior_derivative(*res.primitive, &kt().frame()) == target);

    auto zero = is_exact(DiffForm::zero(kt().coordinates(), 3, Basis::frame), kt());
    CHECK(zero.exact);
    CHECK(exterior_derivative(*zero.primitive, &kt().frame()).is_zero());

    CHECK_FALSE(is_exact(kt().frame_form({0}, rat(1)), kt()).exact); // ds is a nonzero class

    DiffForm not_closed = kt().frame_form({2}, rat(1)); // gamma
    CHECK_THROWS_AS(is_exact(not_closed, kt()), NotClosed);
}

TEST_CASE("Lagrangian coordinate tori") {
    CoordRegion l_ty = region_fixing({{1, Rational(0)}, {3, Rational(0)}});
    CHECK(is_lagrangian(l_ty, omega_standard(), kt()));

    testing::Rng rng(48);
    CoordRegion l_sy = region_fixing({{0, Rational(0)}, {3, Rational(0)}});
    for (int i = 0; i < 10; ++i) {
        Rational a = rng.rational(), b = rng.rational(), e = rng.rational(), f = rng.rational();
        if (b * e - a * f == 0) { --i; continue; }
        CHECK(is_lagrangian(l_sy, omega_linear(a, b, e, f), kt()));
    }

    CoordRegion l_sx = region_fixing({{0, Rational(0)}, {2, Rational(0)}});
    CHECK(is_lagrangian(l_sx, omega_linear(1, 2, 3, 0), kt()));
    CHECK_FALSE(is_lagrangian(l_sx, omega_linear(1, 2, 3, 1), kt()));
    CHECK_FALSE(is_lagrangian(l_sx, omega_linear(1, 2, 3, make_rational(-2, 3)), kt()));

    CHECK_THROWS_AS(is_lagrangian(region_fixing({{1, Rational(0)}}), omega_standard(), kt()),
                    BadDimension);
}

TEST_CASE("field descent matches the descent of its flows") {
    auto mk = [&](std::map<std::size_t, PolyScalar> comps) {
        std::vector<PolyScalar> c(4);
        for (auto& [i, p] : comps) c[i] = std::move(p);
        return VecField(kt().coordinates(), std::move(c));
    };
    std::vector<VecField> fields = {
        mk({{2, rat(1)}}),                                      // descends
        mk({{1, rat(-1)}}),                                     // descends
        mk({{3, rat(1)}}),                                      // does not
        mk({{0, rat(1)}, {2, -PolyScalar::variable("s")}}),     // descends (shear generator)
    };
    for (const auto& x : fields) {
        bool field_ok = field_descends(x, kt()).descends;
        bool all_flows_descend = true;
        for (Rational time : {Rational(1), make_rational(1, 2), Rational(-1)}) {
            auto flow = exp_affine_field(x, time);
            auto res = map_descends(flow, kt());
            if (field_ok)
                CHECK(res.outcome == DescentOutcome::yes);
            else if (res.outcome != DescentOutcome::yes)
                all_flows_descend = false;
        }
        // A field descends exactly when every flow time does; a failing field
        // must be caught by at least one of the spot times.
        CHECK(field_ok == all_flows_descend);
    }
}
