#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nilflux/errors.hpp"
#include "nilflux/form.hpp"
#include "nilflux/manifold.hpp"
#include "support/test_support.hpp"

using namespace nilflux;

namespace {

const ManifoldModel& kt() {
    static ManifoldModel m = ManifoldModel::kodaira_thurston();
    return m;
}

PolyScalar rat(long n, long d = 1) { return PolyScalar(make_rational(n, d)); }

DiffForm coord(IndexTuple idx, PolyScalar c) { return kt().coordinate_form(std::move(idx), std::move(c)); }
DiffForm frame(IndexTuple idx, PolyScalar c) { return kt().frame_form(std::move(idx), std::move(c)); }

DiffForm omega_standard() {
    DiffForm w = coord({0, 1}, rat(1));
    w += coord({2, 3}, rat(1));
    return w;
}

// a gamma^ds + b gamma^dy + e ds^dt + f dy^dt in the invariant frame
// (ds, dt, gamma, dy) = (0, 1, 2, 3).
DiffForm omega_linear_frame(PolyScalar a, PolyScalar b, PolyScalar e, PolyScalar f) {
    DiffForm w = frame({2, 0}, std::move(a));
    w += frame({2, 3}, std::move(b));
    w += frame({0, 1}, std::move(e));
    w += frame({3, 1}, std::move(f));
    return w;
}

VecField field_from(std::map<std::size_t, PolyScalar> comps) {
    std::vector<PolyScalar> c(4);
    for (auto& [i, p] : comps) c[i] = std::move(p);
    return VecField(kt().coordinates(), std::move(c));
}

} // namespace

TEST_CASE("permutation sign bookkeeping") {
    auto s1 = sort_indices({0, 1, 2});
    CHECK(s1.sign == 1);
    auto s2 = sort_indices({1, 0, 2});
    CHECK(s2.sign == -1);
    auto s3 = sort_indices({2, 3, 1});
    CHECK(s3.sign == 1); // cyclic
    auto s4 = sort_indices({1, 1});
    CHECK(s4.sign == 0);
}

TEST_CASE("wedge of disjoint coordinate blocks") {
    DiffForm a = coord({0, 1}, rat(1));
    DiffForm b = coord({2, 3}, rat(1));
    CHECK(wedge(a, b) == coord({0, 1, 2, 3}, rat(1)));
}

TEST_CASE("wedge dt with the linear family, symbolic coefficients") {
    PolyScalar a = PolyScalar::variable("a"), b = PolyScalar::variable("b");
    PolyScalar e = PolyScalar::variable("e"), f = PolyScalar::variable("f");
    DiffForm w = omega_linear_frame(a, b, e, f);
    DiffForm dt = frame({1}, rat(1));
    // dt ^ w = a gamma^ds^dt + b gamma^dy^dt.
    DiffForm expected = frame({2, 0, 1}, a) + frame({2, 3, 1}, b);
    CHECK(wedge(dt, w) == expected);
}

TEST_CASE("square of the standard form against the expansion oracle") {
    DiffForm w = omega_standard();
    DiffForm sq = wedge(w, w);
    CHECK(sq == coord({0, 1, 2, 3}, rat(2)));
    CHECK(sq == testing::oracle_wedge(w, w));
}

TEST_CASE("exterior derivative in both bases") {
    // d(gamma ^ dt) = dy ^ ds ^ dt through the structure relations.
    DiffForm gdt = frame({2, 1}, rat(1));
    DiffForm d_gdt = exterior_derivative(gdt, &kt().frame());
    CHECK(d_gdt == frame({3, 0, 1}, rat(1)));

    CHECK(exterior_derivative(coord({0}, rat(1))).is_zero());

    // gamma in coordinates: dx - s dy.
    DiffForm gamma_coord = coord({2}, rat(1)) + coord({3}, -PolyScalar::variable("s"));
    DiffForm d_gamma = exterior_derivative(gamma_coord);
    CHECK(d_gamma == coord({0, 3}, rat(-1)));
}

TEST_CASE("interior products from the standard flux computations") {
    DiffForm w = omega_standard();
    CHECK(interior(field_from({{1, rat(-1)}}), w) == coord({0}, rat(1))); // -dt |-> ds
    CHECK(interior(field_from({{2, rat(1)}}), w) == coord({3}, rat(1)));  // dx |-> dy
    CHECK(interior(VecField::zero(kt().coordinates()), w).is_zero());
}

TEST_CASE("interior product hits dt for the autonomous field of the linear family") {
    // (a, b, e, f) = (1, 2, 3, 4): X = (1/(be-af)) (-a s dx - a dy + b ds).
    Rational det(2); // be - af = 6 - 4
    PolyScalar inv(Rational(1) / det);
    VecField x = field_from({{0, rat(2) * inv},
                             {2, -PolyScalar::variable("s") * inv},
                             {3, rat(-1) * inv}});
    DiffForm w = omega_linear_frame(rat(1), rat(2), rat(3), rat(4));
    CHECK(interior(x, w, &kt().frame()) == coord({1}, rat(1)));
}

TEST_CASE("pullbacks of the standard form") {
    DiffForm w = omega_standard();
    AffineMap translation = AffineMap::translation(
        {make_rational(1, 5), make_rational(-1, 2), make_rational(1, 3), Rational(0)});
    CHECK(pullback(translation, w) == w);
    CHECK(pullback(AffineMap::identity(4), w) == w);
    CHECK(pullback(kt().lattice()[0], w) == w); // the shear gluing map
    RationalMatrix sing(4, RationalVector(4, Rational(0)));
    CHECK_THROWS_AS(pullback(AffineMap(sing, RationalVector(4, Rational(0))), w), SingularMap);
}

TEST_CASE("change of basis dictionary") {
    DiffForm dx = coord({2}, rat(1));
    DiffForm dx_frame = change_basis(dx, Basis::frame, kt().frame());
    CHECK(dx_frame == frame({2}, rat(1)) + frame({3}, PolyScalar::variable("s")));

    DiffForm gdy = frame({2, 3}, rat(1));
    CHECK(change_basis(gdy, Basis::coordinate, kt().frame()) == coord({2, 3}, rat(1)));

    DiffForm sxy = coord({0, 2, 3}, rat(1));
    CHECK(change_basis(sxy, Basis::frame, kt().frame()) == frame({0, 2, 3}, rat(1)));
}

TEST_CASE("flow of affine fields") {
    // Pure translation generator.
    VecField x = field_from({{0, rat(1, 5)}, {1, rat(-1, 2)}, {2, rat(1, 3)}});
    AffineMap flow = exp_affine_field(x, Rational(1));
    CHECK(flow == AffineMap::translation(
                      {make_rational(1, 5), make_rational(-1, 2), make_rational(1, 3),
                       Rational(0)}));

    CHECK(exp_affine_field(VecField::zero(kt().coordinates()), make_rational(7, 3)) ==
          AffineMap::identity(4));

    // X = ds - s dx - dy integrates to (s+1, t, x - s - 1/2, y - 1).
    VecField gen = field_from({{0, rat(1)}, {2, -PolyScalar::variable("s")}, {3, rat(-1)}});
    AffineMap m = exp_affine_field(gen, Rational(1));
    RationalVector p = {Rational(0), Rational(0), Rational(0), Rational(0)};
    RationalVector q = m.apply(p);
    CHECK(q == RationalVector{Rational(1), Rational(0), make_rational(-1, 2), Rational(-1)});
    RationalVector p2 = {Rational(2), Rational(0), Rational(0), Rational(0)};
    CHECK(m.apply(p2) ==
          RationalVector{Rational(3), Rational(0), make_rational(-5, 2), Rational(-1)});

    CHECK_THROWS_AS(exp_affine_field(field_from({{0, PolyScalar::variable("s").pow(2)}}),
                                     Rational(1)),
                    NotAffine);
    CHECK_THROWS_AS(exp_affine_field(field_from({{0, PolyScalar::variable("s")}}), Rational(1)),
                    NotNilpotent);
}

TEST_CASE("basis mismatch is rejected") {
    CHECK_THROWS_AS(wedge(coord({0}, rat(1)), frame({1}, rat(1))), BasisMismatch);
}

TEST_CASE("graded commutativity, associativity, Leibniz on random forms") {
    testing::Rng rng(42);
    const auto& coords = kt().coordinates();
    std::vector<std::string> cvars = {"s", "t", "x", "y"};
    for (int iter = 0; iter < 120; ++iter) {
        int p = rng.uniform(0, 3), q = rng.uniform(0, 3), r = rng.uniform(0, 2);
        DiffForm a = rng.form(coords, p, Basis::coordinate, cvars);
        DiffForm b = rng.form(coords, q, Basis::coordinate, cvars);
        DiffForm c = rng.form(coords, r, Basis::coordinate, cvars);

        DiffForm ab = wedge(a, b), ba = wedge(b, a);
        CHECK(ab == ((p * q) % 2 == 0 ? ba : -ba));
        CHECK(wedge(wedge(a, b), c) == wedge(a, wedge(b, c)));
        CHECK(wedge(a, DiffForm::zero(coords, q, Basis::coordinate)).is_zero());
        CHECK(ab == testing::oracle_wedge(a, b));

        CHECK(exterior_derivative(exterior_derivative(a)).is_zero());
        DiffForm lhs = exterior_derivative(ab);
        DiffForm rhs = wedge(exterior_derivative(a), b) +
                       (p % 2 == 0 ? wedge(a, exterior_derivative(b))
                                   : -wedge(a, exterior_derivative(b)));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("frame differential agrees with the coordinate route and squares to zero") {
    testing::Rng rng(43);
    const auto& fd = kt().frame();
    std::vector<std::string> cvars = {"s", "t", "x", "y"};
    for (int iter = 0; iter < 80; ++iter) {
        int p = rng.uniform(0, 3);
        DiffForm a = rng.form(kt().coordinates(), p, Basis::frame, cvars);
        DiffForm via_frame = exterior_derivative(a, &fd);
        DiffForm via_coord = change_basis(
            exterior_derivative(change_basis(a, Basis::coordinate, fd)), Basis::frame, fd);
        CHECK(via_frame == via_coord);
        CHECK(exterior_derivative(via_frame, &fd).is_zero());
    }
}

TEST_CASE("interior product is an antiderivation with square zero") {
    testing::Rng rng(44);
    const auto& coords = kt().coordinates();
    std::vector<std::string> cvars = {"s", "t", "x", "y"};
    for (int iter = 0; iter < 120; ++iter) {
        int p = rng.uniform(1, 3), q = rng.uniform(1, 2);
        DiffForm a = rng.form(coords, p, Basis::coordinate, cvars);
        DiffForm b = rng.form(coords, q, Basis::coordinate, cvars);
        VecField x = rng.field(coords, cvars);

        DiffForm lhs = interior(x, wedge(a, b));
        DiffForm rhs = wedge(interior(x, a), b) +
                       (p % 2 == 0 ? wedge(a, interior(x, b)) : -wedge(a, interior(x, b)));
        CHECK(lhs == rhs);
        CHECK(interior(x, interior(x, a)).is_zero());

        // Multiplying by a function commutes with contraction (the degree-0
        // case of the antiderivation law).
        PolyScalar g = rng.poly(cvars);
        CHECK(interior(x, a.scaled(g)) == interior(x, a).scaled(g));

        VecField y = rng.field(coords, cvars);
        DiffForm bilinear = interior(x.scaled(g) + y, a);
        CHECK(bilinear == interior(x, a).scaled(g) + interior(y, a));
    }
}

TEST_CASE("change of basis round-trips and commutes with wedge and d") {
    testing::Rng rng(45);
    const auto& fd = kt().frame();
    std::vector<std::string> cvars = {"s", "t", "x", "y"};
    for (int iter = 0; iter < 80; ++iter) {
        int p = rng.uniform(0, 2), q = rng.uniform(0, 2);
        DiffForm a = rng.form(kt().coordinates(), p, Basis::coordinate, cvars);
        DiffForm b = rng.form(kt().coordinates(), q, Basis::coordinate, cvars);
        CHECK(change_basis(change_basis(a, Basis::frame, fd), Basis::coordinate, fd) == a);

        DiffForm wf = change_basis(wedge(a, b), Basis::frame, fd);
        CHECK(wf == wedge(change_basis(a, Basis::frame, fd), change_basis(b, Basis::frame, fd)));

        DiffForm df = change_basis(exterior_derivative(a), Basis::frame, fd);
        CHECK(df == exterior_derivative(change_basis(a, Basis::frame, fd), &fd));

        CHECK(forms_equal(a, change_basis(a, Basis::frame, fd), &fd));
    }
}

TEST_CASE("pullback is functorial and commutes with wedge and d") {
    testing::Rng rng(46);
    const auto& coords = kt().coordinates();
    std::vector<std::string> cvars = {"s", "t", "x", "y"};
    for (int iter = 0; iter < 80; ++iter) {
        int p = rng.uniform(0, 2), q = rng.uniform(0, 2);
        DiffForm a = rng.form(coords, p, Basis::coordinate, cvars);
        DiffForm b = rng.form(coords, q, Basis::coordinate, cvars);
        AffineMap phi = exp_affine_field(rng.nilpotent_affine_field(coords), rng.rational(2, 2));
        AffineMap psi = exp_affine_field(rng.nilpotent_affine_field(coords), rng.rational(2, 2));

        CHECK(pullback(phi, wedge(a, b)) == wedge(pullback(phi, a), pullback(phi, b)));
        CHECK(pullback(phi, exterior_derivative(a)) == exterior_derivative(pullback(phi, a)));
        CHECK(pullback(phi.compose(psi), a) == pullback(psi, pullback(phi, a)));
    }
}

TEST_CASE("one-parameter group law of affine flows") {
    testing::Rng rng(47);
    const auto& coords = kt().coordinates();
    for (int iter = 0; iter < 120; ++iter) {
        VecField x = rng.nilpotent_affine_field(coords);
        Rational tu = rng.rational(4, 3), tv = rng.rational(4, 3);
        AffineMap a = exp_affine_field(x, tu);
        AffineMap b = exp_affine_field(x, tv);
        CHECK(a.compose(b) == exp_affine_field(x, tu + tv));
        CHECK(exp_affine_field(x, Rational(0)) == AffineMap::identity(4));
    }
}
