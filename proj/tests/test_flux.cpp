#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nilflux/errors.hpp"
#include "nilflux/flux.hpp"
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
PolyScalar var(const std::string& v) { return PolyScalar::variable(v); }

DiffForm omega_standard() {
    DiffForm w = kt().coordinate_form({0, 1}, rat(1));
    w += kt().coordinate_form({2, 3}, rat(1));
    return w;
}

DiffForm omega_linear(PolyScalar a, PolyScalar b, PolyScalar e, PolyScalar f) {
    DiffForm w = kt().frame_form({2, 0}, std::move(a));
    w += kt().frame_form({2, 3}, std::move(b));
    w += kt().frame_form({0, 1}, std::move(e));
    w += kt().frame_form({3, 1}, std::move(f));
    return w;
}

VecField field_from(const ManifoldModel& m, std::map<std::size_t, PolyScalar> comps) {
    std::vector<PolyScalar> c(m.dimension());
    for (auto& [i, p] : comps) c[i] = std::move(p);
    return VecField(m.coordinates(), std::move(c));
}

// Generating field of the linear-family representative:
// bc d/ds - alpha d/dt + (beta - ac s) d/dx - ac d/dy.
VecField family_generator(PolyScalar a, PolyScalar b, PolyScalar c, PolyScalar alpha,
                          PolyScalar beta) {
    return field_from(kt(), {{0, b * c},
                             {1, -alpha},
                             {2, beta - a * c * var("s")},
                             {3, -(a * c)}});
}

// alpha (e ds + f dy) + beta (a ds + b dy) + c (be - af) dt, in the frame.
DiffForm family_flux(PolyScalar a, PolyScalar b, PolyScalar e, PolyScalar f, PolyScalar c,
                     PolyScalar alpha, PolyScalar beta) {
    DiffForm v = kt().frame_form({0}, alpha * e + beta * a);
    v += kt().frame_form({3}, alpha * f + beta * b);
    v += kt().frame_form({1}, c * (b * e - a * f));
    return v;
}

AffineMap family_map(const Rational& a, const Rational& b, const Rational& c,
                     const Rational& alpha, const Rational& beta) {
    RationalMatrix lin = identity_matrix(4);
    lin[2][0] = -a * c;
    return AffineMap(lin, {b * c, -alpha, beta, -a * c});
}

} // namespace

TEST_CASE("fluxes of the standard loops") {
    auto minus_dt = field_from(kt(), {{1, rat(-1)}});
    auto fx = flux_field(minus_dt, omega_standard(), kt());
    CHECK(fx.invariant);
    CHECK(fx.form == kt().frame_form({0}, rat(1))); // ds

    auto dx = field_from(kt(), {{2, rat(1)}});
    auto fy = flux_field(dx, omega_standard(), kt());
    CHECK(fy.invariant);
    CHECK(fy.form == kt().frame_form({3}, rat(1))); // dy

    CHECK(flux_field(VecField::zero(kt().coordinates()), omega_standard(), kt()).form.is_zero());
}

TEST_CASE("flux of the linear-family generator, fully symbolic") {
    PolyScalar a = var("a"), b = var("b"), e = var("e"), f = var("f");
    PolyScalar c = var("c"), alpha = var("alpha"), beta = var("beta");
    auto fx = flux_field(family_generator(a, b, c, alpha, beta), omega_linear(a, b, e, f), kt());
    CHECK(fx.invariant);
    CHECK(fx.form == family_flux(a, b, e, f, c, alpha, beta));
}

TEST_CASE("flux of the linear-family generator at the pinned tuple") {
    PolyScalar a = rat(1), b = rat(2), e = rat(3), f = rat(4);
    PolyScalar c = rat(1, 5), alpha = rat(1, 2), beta = rat(1, 3);
    auto fx = flux_field(family_generator(a, b, c, alpha, beta), omega_linear(a, b, e, f), kt());
    CHECK(fx.form == family_flux(a, b, e, f, c, alpha, beta));
}

TEST_CASE("time-independent fields reduce to plain contraction") {
    testing::Rng rng(50);
    std::vector<std::string> cvars = {"s"};
    for (int i = 0; i < 40; ++i) {
        VecField x = rng.field(kt().coordinates(), cvars);
        if (!field_descends(x, kt()).descends) continue;
        auto fx = flux_field(x, omega_standard(), kt());
        DiffForm direct = interior(x, omega_standard());
        DiffForm got = fx.invariant
                           ? change_basis(fx.form, Basis::coordinate, kt().frame())
                           : fx.form;
        CHECK(got == direct);
    }
}

TEST_CASE("flux is linear in the field and the form") {
    testing::Rng rng(51);
    for (int i = 0; i < 40; ++i) {
        VecField x = field_from(kt(), {{1, rng.poly({"u"})}, {2, rng.poly({"u"})}});
        VecField y = field_from(kt(), {{0, rng.poly({"u"})}, {2, rng.poly({"u"})}});
        DiffForm w1 = omega_standard();
        DiffForm w2 = change_basis(omega_linear(rat(1), rat(2), rat(3), rat(4)),
                                   Basis::coordinate, kt().frame());
        auto fxy = flux_field(x + y, w1, kt());
        auto fx = flux_field(x, w1, kt());
        auto fy = flux_field(y, w1, kt());
        CHECK(fxy.form == fx.form + fy.form);
        auto fw = flux_field(x, w1 + w2, kt());
        auto fw1 = flux_field(x, w1, kt());
        auto fw2 = flux_field(x, w2, kt());
        CHECK(fw.form == fw1.form + fw2.form);
    }
}

TEST_CASE("non-invariant fluxes are flagged and reported in coordinates") {
    // s d/dt contracts to -s ds, which has no constant frame expression
    // (and indeed the field does not descend).
    VecField x = field_from(kt(), {{1, var("s")}});
    auto fx = flux_field(x, omega_standard(), kt());
    CHECK_FALSE(fx.invariant);
    CHECK(fx.form.basis() == Basis::coordinate);
    CHECK(fx.form == kt().coordinate_form({0}, -var("s")));
}

TEST_CASE("straight-line flux of the standard family map") {
    AffineMap phi = family_map(0, 1, make_rational(1, 5), make_rational(1, 2),
                               make_rational(1, 3));
    // With (a,b,e,f) = (0,1,1,0) this is the translation (c, -alpha, beta, 0).
    auto fx = flux_of_map(phi, omega_standard(), kt());
    CHECK(fx.invariant);
    DiffForm expected = kt().frame_form({0}, rat(1, 2));
    expected += kt().frame_form({3}, rat(1, 3));
    expected += kt().frame_form({1}, rat(1, 5));
    CHECK(fx.form == expected);
    CHECK(fx.convention.find("straight-line") != std::string::npos);

    CHECK(flux_of_map(AffineMap::identity(4), omega_standard(), kt()).form.is_zero());
}

TEST_CASE("straight-line flux of the linear family picks up the quadratic correction") {
    Rational a(1), b(2), e(3), f(4), c = make_rational(1, 5), alpha = make_rational(1, 2),
             beta = make_rational(1, 3);
    AffineMap phi = family_map(a, b, c, alpha, beta);
    DiffForm w = omega_linear(rat(1), rat(2), rat(3), rat(4));
    auto fx = flux_of_map(phi, w, kt());
    // flux = v + (a b c^2 / 2)(a ds + b dy).
    Rational corr = a * b * c * c / 2;
    DiffForm expected = family_flux(rat(1), rat(2), rat(3), rat(4), PolyScalar(c),
                                    PolyScalar(alpha), PolyScalar(beta));
    expected += kt().frame_form({0}, PolyScalar(corr * a));
    expected += kt().frame_form({3}, PolyScalar(corr * b));
    CHECK(fx.form == expected);

    // With a = 0 the correction vanishes and all three routes agree.
    AffineMap phi0 = family_map(0, b, c, alpha, beta);
    DiffForm w0 = omega_linear(rat(0), rat(2), rat(3), rat(4));
    auto fx0 = flux_of_map(phi0, w0, kt());
    CHECK(fx0.form == family_flux(rat(0), rat(2), rat(3), rat(4), PolyScalar(c),
                                  PolyScalar(alpha), PolyScalar(beta)));
}

TEST_CASE("the family map differs from its generator's time-1 flow by the stated amount") {
    Rational a(1), b(2), c = make_rational(1, 5), alpha = make_rational(1, 2),
             beta = make_rational(1, 3);
    AffineMap stated = family_map(a, b, c, alpha, beta);
    AffineMap flowed = exp_affine_field(
        family_generator(rat(1), rat(2), rat(1, 5), rat(1, 2), rat(1, 3)), Rational(1));
    CHECK(flowed.linear() == stated.linear());
    RationalVector diff(4);
    for (std::size_t i = 0; i < 4; ++i)
        diff[i] = flowed.translation()[i] - stated.translation()[i];
    // Only the x-component moves, by -a b c^2 / 2.
    CHECK(diff == RationalVector{Rational(0), Rational(0), -(a * b * c * c / 2), Rational(0)});

    AffineMap stated0 = family_map(0, b, c, alpha, beta);
    AffineMap flowed0 = exp_affine_field(
        family_generator(rat(0), rat(2), rat(1, 5), rat(1, 2), rat(1, 3)), Rational(1));
    CHECK(stated0 == flowed0);
}

TEST_CASE("pure translations match the flux of their constant field") {
    testing::Rng rng(52);
    for (int i = 0; i < 30; ++i) {
        RationalVector v = {rng.rational(), rng.rational(), rng.rational(), Rational(0)};
        AffineMap tr = AffineMap::translation(v);
        if (map_descends(tr, kt()).outcome != DescentOutcome::yes) continue;
        VecField x = field_from(kt(), {{0, PolyScalar(v[0])},
                                       {1, PolyScalar(v[1])},
                                       {2, PolyScalar(v[2])},
                                       {3, PolyScalar(v[3])}});
        CHECK(flux_of_map(tr, omega_standard(), kt()).form ==
              flux_field(x, omega_standard(), kt()).form);
    }
}

TEST_CASE("isotopy and unipotence guards") {
    RationalMatrix minus = identity_matrix(4);
    for (auto& row : minus)
        for (auto& x : row) x = -x;
    DiffForm w = t4().coordinate_form({0, 1}, rat(1));
    w += t4().coordinate_form({2, 3}, rat(1));
    CHECK_THROWS_AS(flux_of_map(AffineMap(minus, RationalVector(4, Rational(0))), w, t4()),
                    BadIsotopy);

    // An integer hyperbolic block descends and keeps the interpolation
    // invertible, but has no exact polynomial generating field.
    RationalMatrix cat = identity_matrix(4);
    cat[0][0] = 2;
    cat[0][1] = 1;
    cat[1][0] = 1;
    cat[1][1] = 1;
    CHECK_THROWS_AS(flux_of_map(AffineMap(cat, RationalVector(4, Rational(0))), w, t4()),
                    NotNilpotent);
}

TEST_CASE("duals of homology classes") {
    H1Structure h1(kt());
    CHECK(h1.basis() == std::vector<std::size_t>{0, 1, 3});
    REQUIRE(h1.center_image().size() == 1);
    CHECK(h1.center_image()[0] == IntegerVector{0, 1, 0});

    // dual(e_t) = -gamma ^ dy ^ ds.
    DiffForm pd_t = poincare_dual({Rational(0), Rational(1), Rational(0)}, kt());
    CHECK(pd_t == kt().frame_form({0, 2, 3}, rat(-1)));
    CHECK(poincare_dual({Rational(0), Rational(0), Rational(0)}, kt()).is_zero());

    DiffForm pd_1 = poincare_dual({Rational(1), Rational(0), Rational(0), Rational(0)}, t4());
    CHECK(pd_1 == t4().frame_form({1, 2, 3}, rat(1)));

    // Injectivity on the basis: the three dual classes are independent.
    CohomologySolver solver(kt());
    RationalMatrix m;
    for (std::size_t i = 0; i < 3; ++i) {
        RationalVector h(3, Rational(0));
        h[i] = 1;
        m.push_back(solver.class_coordinates(poincare_dual(h, kt())));
    }
    CHECK(rank(m) == 3);
}

TEST_CASE("flux subgroup of the standard structure") {
    auto gamma = flux_lattice(kt(), omega_standard(), preset_loops(kt()));
    REQUIRE(gamma.verified.size() == 2);
    CHECK(gamma.verified[0] == kt().frame_form({0}, rat(1))); // ds
    CHECK(gamma.verified[1] == kt().frame_form({3}, rat(1))); // dy
    REQUIRE(gamma.particular.size() == 1);
    CHECK(gamma.particular[0] == kt().frame_form({0}, rat(-1))); // -ds, dt-component zero
    REQUIRE(gamma.kernel.size() == 1);
    CHECK(gamma.kernel[0] == kt().frame_form({3}, rat(1))); // dy spans ker(wedge [omega])
    CHECK(gamma.volume == 1);
}

TEST_CASE("flux subgroup of the linear family") {
    testing::Rng rng(53);
    std::vector<std::array<Rational, 4>> tuples = {
        {Rational(1), Rational(2), Rational(3), Rational(4)}};
    while (tuples.size() < 4) {
        std::array<Rational, 4> t = {rng.rational(), rng.rational(), rng.rational(),
                                     rng.rational()};
        if (t[1] * t[2] - t[0] * t[3] != 0) tuples.push_back(t);
    }
    for (const auto& [a, b, e, f] : tuples) {
        auto gamma = flux_lattice(
            kt(), omega_linear(PolyScalar(a), PolyScalar(b), PolyScalar(e), PolyScalar(f)),
            preset_loops(kt()));
        REQUIRE(gamma.verified.size() == 2);
        DiffForm first = kt().frame_form({0}, PolyScalar(e)) + kt().frame_form({3}, PolyScalar(f));
        DiffForm second = kt().frame_form({0}, PolyScalar(a)) + kt().frame_form({3}, PolyScalar(b));
        CHECK(gamma.verified[0] == first);
        CHECK(gamma.verified[1] == second);
        CHECK(gamma.volume == b * e - a * f);
    }
}

TEST_CASE("torus flux lattice equals the rotation fluxes") {
    testing::Rng rng(54);
    int done = 0;
    while (done < 5) {
        std::map<std::pair<int, int>, Rational> a;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) a[{i, j}] = rng.rational();
        Rational pf = a[{0, 1}] * a[{2, 3}] - a[{0, 2}] * a[{1, 3}] + a[{0, 3}] * a[{1, 2}];
        if (pf == 0) continue;
        ++done;
        DiffForm w = DiffForm::zero(t4().coordinates(), 2, Basis::coordinate);
        for (const auto& [ij, c] : a)
            w += t4().coordinate_form({ij.first, ij.second}, PolyScalar(c));
        auto gamma = flux_lattice(t4(), w, preset_loops(t4()));
        REQUIRE(gamma.verified.size() == 4);
        CHECK(gamma.kernel.empty()); // wedge [omega] injective
        for (int i = 0; i < 4; ++i) {
            DiffForm xi = DiffForm::zero(t4().coordinates(), 1, Basis::frame);
            for (int j = 0; j < 4; ++j) {
                Rational aij = i < j ? a[{i, j}] : (i == j ? Rational(0) : -a[{j, i}]);
                if (aij != 0) xi += t4().frame_form({j}, PolyScalar(aij));
            }
            CHECK(gamma.verified[static_cast<std::size_t>(i)] == xi);
        }
        CHECK(gamma.volume == pf);
    }
}

TEST_CASE("membership in the verified lattice and the diagram constraint") {
    auto gamma = flux_lattice(kt(), omega_standard(), preset_loops(kt()));

    DiffForm ds_plus_dy = kt().frame_form({0}, rat(1)) + kt().frame_form({3}, rat(1));
    auto yes = in_flux_lattice(ds_plus_dy, gamma, kt());
    REQUIRE(yes.outcome == Membership::yes);
    CHECK(yes.coefficients == IntegerVector{1, 1});

    auto no = in_flux_lattice(kt().frame_form({0}, rat(1, 2)), gamma, kt());
    CHECK(no.outcome == Membership::no);

    auto outside = in_flux_lattice(kt().frame_form({1}, rat(1)), gamma, kt());
    CHECK(outside.outcome == Membership::outside_constraint);

    for (std::size_t i = 0; i < gamma.verified.size(); ++i) {
        auto self = in_flux_lattice(gamma.verified[i], gamma, kt());
        REQUIRE(self.outcome == Membership::yes);
        for (std::size_t j = 0; j < gamma.verified.size(); ++j)
            CHECK(self.coefficients[j] == (i == j ? 1 : 0));
    }
}

TEST_CASE("diagram consistency is enforced for loop data") {
    // A loop claiming the wrong evaluation class must be rejected.
    auto loops = preset_loops(kt());
    loops[0].evaluation = IntegerVector{1, 0, 0}; // wrong class for the -t rotation
    CHECK_THROWS_AS(flux_lattice(kt(), omega_standard(), loops), DiagramViolation);
}
