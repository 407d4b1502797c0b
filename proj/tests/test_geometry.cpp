#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "lakevort/domain.hpp"

using namespace lakevort;

namespace {

DomainSpec unit_disc_spec(int nx = 128) {
    DomainSpec s;
    s.shape = Shape::make_disc({0.0, 0.0}, 1.0);
    s.depth = DepthSpec::constant(1.0);
    s.nx = nx;
    return s;
}

} // namespace

TEST_CASE("convex hull basics") {
    std::vector<Vec2> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}, {0.2, 0.8}};
    auto hull = convex_hull(pts);
    CHECK(hull.size() == 4);
    CHECK(point_set_diameter(pts) == doctest::Approx(std::sqrt(2.0)));
    CHECK(hull_contains(hull, {0.5, 0.5}));
    CHECK(hull_contains(hull, {0.0, 0.0}));
    CHECK_FALSE(hull_contains(hull, {1.2, 0.5}));
}

TEST_CASE("unit disc: areas, diameter, boundary distance") {
    auto dom = build_domain(unit_disc_spec(128));
    const double pi = 3.14159265358979323846;
    // Cell-counted area converges like O(h); 2% at nx=128 is ample.
    CHECK(dom.area_m == doctest::Approx(pi).epsilon(0.02));
    CHECK(dom.area_nu == dom.area_m); // b == 1: the two measures agree
    CHECK(dom.diameter == doctest::Approx(2.0).epsilon(0.02));

    // Distance to the staircase boundary tracks 1 - |x| to within a few cells.
    Vec2 p{0.25, 0.1};
    double d = dist_to_boundary(dom, p);
    CHECK(std::fabs(d - (1.0 - norm(p))) < 3.0 * dom.grid.h);
    CHECK(dist_to_boundary(dom, {2.0, 0.0}) == 0.0);
    CHECK(dist_to_boundary(dom, {0.0, 1.5}) == 0.0);
}

TEST_CASE("weighted area for affine depth on the unit square") {
    DomainSpec s;
    s.shape = Shape::make_rectangle({0.0, 0.0}, {1.0, 1.0});
    s.depth = DepthSpec::affine(1.0, 1.0, 0.0); // b = 1 + x
    s.nx = 64;
    auto dom = build_domain(s);
    CHECK(dom.area_m == doctest::Approx(1.0).epsilon(1e-12));
    // integral of 1 + x over the unit square = 3/2; midpoint rule is exact in y
    // and second order in x, and 1 + x is linear, so this is exact.
    CHECK(dom.area_nu == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(dom.sup_depth == doctest::Approx(2.0).epsilon(0.05));
    CHECK(dom.inf_depth == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("weighted integral of radial depth over the unit disc") {
    DomainSpec s = unit_disc_spec(256);
    s.depth = DepthSpec::radial_bump(2.0, 1.0, {0.0, 0.0}); // b = 2 - r^2
    auto dom = build_domain(s);
    // integral of (2 - r^2) over the unit disc = 2 pi - pi/2 = 3 pi / 2.
    const double exact = 1.5 * 3.14159265358979323846;
    CHECK(dom.area_nu == doctest::Approx(exact).epsilon(0.02));
}

TEST_CASE("deep set finds the depth maximum") {
    DomainSpec s = unit_disc_spec(128);
    s.depth = DepthSpec::radial_bump(2.0, 1.0, {0.3, -0.2});
    auto dom = build_domain(s);
    auto ds = deep_set(dom);
    REQUIRE_FALSE(ds.points.empty());
    for (const Vec2& p : ds.points) CHECK(dist(p, {0.3, -0.2}) < 3.0 * dom.grid.h);
    CHECK(ds.sup_depth == doctest::Approx(2.0).epsilon(1e-3));

    SUBCASE("neighborhood membership") {
        auto ds2 = deep_set(dom, 0.0, 0.25);
        CHECK(ds2.in_neighborhood({0.3, -0.2}));
        CHECK(ds2.in_neighborhood({0.45, -0.2}));
        CHECK_FALSE(ds2.in_neighborhood({0.9, 0.4}));
    }
}

TEST_CASE("constant depth: every interior cell is deep") {
    auto dom = build_domain(unit_disc_spec(32));
    auto ds = deep_set(dom);
    CHECK(ds.points.size() == dom.interior.size());
}

TEST_CASE("interior connectivity is enforced") {
    // Dumbbell whose waist is a corridor thinner than a cell: no cell center
    // lands in the strip 0.499 < y < 0.501 for 0.3 < x < 0.7, so the mask has
    // two components.
    DomainSpec s;
    s.shape = Shape::make_polygon({{0.0, 0.0},
                                   {0.3, 0.0},
                                   {0.3, 0.499},
                                   {0.7, 0.499},
                                   {0.7, 0.0},
                                   {1.0, 0.0},
                                   {1.0, 1.0},
                                   {0.7, 1.0},
                                   {0.7, 0.501},
                                   {0.3, 0.501},
                                   {0.3, 1.0},
                                   {0.0, 1.0}});
    s.depth = DepthSpec::constant(1.0);
    s.nx = 64;
    CHECK_THROWS_AS(build_domain(s), std::invalid_argument);
}

TEST_CASE("holes are rejected") {
    // A genuine annulus cannot be described by one simple polygon; emulate a
    // hole by a C-shape whose gap is thinner than a cell so the flood fill
    // cannot escape.  At nx=64 on [-1,1], h = 1/32; gap width 1e-3.
    const double pi = 3.14159265358979323846;
    int n = 40;
    std::vector<Vec2> cshape;
    for (int k = 0; k <= n; ++k) {
        double t = 1e-3 / 2 + (2.0 * pi - 1e-3) * k / n;
        cshape.push_back({std::cos(t), std::sin(t)});
    }
    for (int k = n; k >= 0; --k) {
        double t = 1e-3 / 2 + (2.0 * pi - 1e-3) * k / n;
        cshape.push_back({0.5 * std::cos(t), 0.5 * std::sin(t)});
    }
    DomainSpec s;
    s.shape = Shape::make_polygon(cshape);
    s.depth = DepthSpec::constant(1.0);
    s.nx = 64;
    try {
        build_domain(s);
        FAIL("expected the hole to be rejected");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("hole") != std::string::npos);
    }
}

TEST_CASE("degenerate depth is clamped at the floor") {
    DomainSpec s;
    s.shape = Shape::make_rectangle({0.0, 0.0}, {1.0, 1.0});
    s.depth = DepthSpec::product_distance(1.0, 1.0); // vanishes at the boundary
    s.nx = 64;
    auto dom = build_domain(s);
    CHECK(dom.depth_floor > 0.0);
    CHECK(dom.depth_floor == doctest::Approx(1e-6 * dom.sup_depth).epsilon(1e-9));
    for (int c : dom.interior) CHECK(dom.depth[c] >= dom.depth_floor);

    SUBCASE("explicit floor wins") {
        s.depth_floor = 1e-3;
        auto dom2 = build_domain(s);
        CHECK(dom2.depth_floor == 1e-3);
        for (int c : dom2.interior) CHECK(dom2.depth[c] >= 1e-3);
    }
}

TEST_CASE("tiny grids are rejected") {
    DomainSpec s = unit_disc_spec(4);
    CHECK_THROWS_AS(build_domain(s), std::invalid_argument);
}

TEST_CASE("integration rejects mismatched grids") {
    auto dom = build_domain(unit_disc_spec(32));
    Grid other{16, 16, 0.125, {0.0, 0.0}};
    ScalarField f(other, 1.0);
    CHECK_THROWS_AS(integrate_m(dom, f), std::invalid_argument);
}

TEST_CASE("holder exponent tracks the depth profile") {
    // Power-of-distance depth on a disc: exponent q governs the shore.
    DomainSpec s = unit_disc_spec(32);
    s.depth = DepthSpec::product_distance(1.0, 0.5);
    auto dom = build_domain(s);
    CHECK(dom.holder_alpha == doctest::Approx(0.5));
    // The rectangle product profile is linear in each edge distance.
    DomainSpec r;
    r.shape = Shape::make_rectangle({0.0, 0.0}, {1.0, 1.0});
    r.depth = DepthSpec::product_distance(1.0, 0.5);
    r.nx = 32;
    CHECK(build_domain(r).holder_alpha == doctest::Approx(1.0));
    CHECK(build_domain(unit_disc_spec(32)).holder_alpha == doctest::Approx(1.0));
}
