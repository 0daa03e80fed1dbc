#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <vector>

#include "gyre/errors.hpp"
#include "gyre/geometry.hpp"

using namespace gyre;
using std::numbers::pi;

namespace {

std::vector<Vec2> circle_points(int n, double radius = 1.0)
{
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) pts.push_back(radius * unit_from_angle(two_pi * i / n));
    return pts;
}

ImplicitBoundary unit_circle_fit()
{
    const auto on = circle_points(8);
    const InteriorConstraint c{{0.0, 0.0}, -1.0};
    return fit_implicit_boundary(on, std::span(&c, 1));
}

ImplicitBoundary racetrack_fit()
{
    const auto on = racetrack_points();
    const InteriorConstraint c{{0.0, 0.0}, -1.0};
    return fit_implicit_boundary(on, std::span(&c, 1));
}

Vec2 central_gradient(const auto& fn, Vec2 q, double h = 1e-6)
{
    return {(fn(q + Vec2{h, 0.0}) - fn(q - Vec2{h, 0.0})) / (2 * h),
            (fn(q + Vec2{0.0, h}) - fn(q - Vec2{0.0, h})) / (2 * h)};
}

Vec2 random_interior(const ImplicitBoundary& b, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> ux(b.bounds_min().x1, b.bounds_max().x1);
    std::uniform_real_distribution<double> uy(b.bounds_min().x2, b.bounds_max().x2);
    for (;;) {
        const Vec2 q{ux(rng), uy(rng)};
        if (b.gamma(q) < -1e-3) return q;
    }
}

} // namespace

TEST_CASE("unit circle fit interpolates its constraints")
{
    const ImplicitBoundary b = unit_circle_fit();
    CHECK(std::abs(b.gamma({1.0, 0.0})) < 1e-9);
    for (Vec2 p : circle_points(8)) CHECK(std::abs(b.gamma(p)) < 1e-9);
    CHECK(b.gamma({0.0, 0.0}) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(b.gamma({2.0, 0.0}) > 0.0);
    CHECK(b.centers().size() == 9);
    CHECK(b.weights().size() == 9);
}

TEST_CASE("racetrack fit")
{
    const auto on = racetrack_points();
    REQUIRE(on.size() == 64);
    // stadium: straights at |x2| = 1.5 for |x1| <= 0.75, caps of radius 1.5 about (+-0.75, 0)
    for (Vec2 p : on) {
        const double dx = std::max(std::abs(p.x1) - 0.75, 0.0);
        CHECK(std::hypot(dx, p.x2) == doctest::Approx(1.5).epsilon(1e-12));
    }
    const double perimeter = 2.0 * 1.5 + 2.0 * pi * 1.5;
    for (std::size_t i = 0; i < on.size(); ++i) {
        const double gap = norm(on[(i + 1) % on.size()] - on[i]);
        CHECK(gap <= perimeter / 64 + 1e-12);
        CHECK(gap > 0.95 * perimeter / 64);
    }
    CHECK(on.front().x1 == doctest::Approx(2.25));

    const ImplicitBoundary b = racetrack_fit();
    for (Vec2 p : on) CHECK(std::abs(b.gamma(p)) < 1e-9);
    CHECK(b.gamma({0.0, 0.0}) == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(b.gamma({3.0, 0.0}) > 0.0);
    CHECK(b.gamma({0.0, 2.0}) > 0.0);
    CHECK(b.bounds_max().x1 == doctest::Approx(2.25));
    CHECK(b.bounds_max().x2 == doctest::Approx(1.5));
    CHECK_THROWS_AS(racetrack_points(2.0, 3.0), DomainError);
}

TEST_CASE("degenerate boundary constraints")
{
    const InteriorConstraint c{{0.0, 0.0}, -1.0};
    auto on = circle_points(8);
    on.push_back(on[3]);
    CHECK_THROWS_AS(fit_implicit_boundary(on, std::span(&c, 1)), SingularSystemError);

    const std::vector<Vec2> two = {{1.0, 0.0}, {0.0, 1.0}};
    CHECK_THROWS_AS(fit_implicit_boundary(two, std::span(&c, 1)), DomainError);
    CHECK_THROWS_AS(fit_implicit_boundary(circle_points(8), {}), DomainError);

    // a collinear set leaves the affine part undetermined
    const std::vector<Vec2> line = {{-1.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}};
    const InteriorConstraint on_line{{2.0, 0.0}, -1.0};
    CHECK_THROWS_AS(fit_implicit_boundary(line, std::span(&on_line, 1)), SingularSystemError);
}

TEST_CASE("boundary constraint file")
{
    const auto path = std::filesystem::temp_directory_path() / "gyre_constraints.txt";
    {
        std::ofstream out(path);
        out << "# unit square-ish\n1 0 0\n0 1 0\n-1 0 0\n\n0 -1 0   # bottom\n0 0 -1\n";
    }
    const BoundaryConstraints bc = load_boundary_constraints(path);
    CHECK(bc.on_points.size() == 4);
    REQUIRE(bc.interior.size() == 1);
    CHECK(bc.interior[0].value == -1.0);

    {
        std::ofstream out(path);
        out << "1 0 0\n0 1\n";
    }
    try {
        load_boundary_constraints(path);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    {
        std::ofstream out(path);
        out << "1 0 0.5\n";
    }
    CHECK_THROWS_AS(load_boundary_constraints(path), ParseError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_boundary_constraints(path), ParseError);
}

TEST_CASE("shape navigation")
{
    const ImplicitBoundary b = unit_circle_fit();
    const ShapeNavParams nav{10.0};
    for (Vec2 p : circle_points(8)) CHECK(std::abs(shape_navigation(b, nav, p)) < 1e-17);
    CHECK(shape_navigation(b, nav, {0.0, 0.0}) == doctest::Approx(1.0 / 11.0).epsilon(1e-9));

    const double g = b.gamma({0.5, 0.0});
    CHECK(g < 0.0);
    CHECK(shape_navigation(b, nav, {0.5, 0.0}) == doctest::Approx(g * g / (g * g + 9.5)).epsilon(1e-14));

    // R0 barely covering the point leaves a non-positive denominator where gamma is small
    const ShapeNavParams tight{0.5};
    CHECK_THROWS_AS(shape_navigation(b, tight, {0.95, 0.0}), DomainError);
    CHECK_THROWS_AS(shape_navigation_gradient(b, tight, {0.95, 0.0}), DomainError);
}

TEST_CASE("shape navigation stays in [0, 1)")
{
    const ImplicitBoundary b = racetrack_fit();
    const ShapeNavParams nav{default_workspace_radius(4.5, 3.0)};
    std::mt19937_64 rng(8);
    for (int i = 0; i < 200; ++i) {
        const double phi = shape_navigation(b, nav, random_interior(b, rng));
        CHECK(phi >= 0.0);
        CHECK(phi < 1.0);
    }
}

TEST_CASE("default workspace radius is twice the tank diagonal")
{
    CHECK(default_workspace_radius(4.5, 3.0) == doctest::Approx(2.0 * std::sqrt(4.5 * 4.5 + 9.0)));
}

TEST_CASE("analytic gradients match central differences")
{
    const ImplicitBoundary b = racetrack_fit();
    const ShapeNavParams nav{default_workspace_radius(4.5, 3.0)};
    std::mt19937_64 rng(21);
    double worst_gamma = 0.0, worst_phi = 0.0;
    for (int i = 0; i < 100; ++i) {
        const Vec2 q = random_interior(b, rng);
        const Vec2 ga = b.gradient(q);
        const Vec2 gf = central_gradient([&](Vec2 x) { return b.gamma(x); }, q);
        worst_gamma = std::max(worst_gamma, norm(ga - gf) / norm(ga));
        const Vec2 pa = shape_navigation_gradient(b, nav, q);
        const Vec2 pf = central_gradient([&](Vec2 x) { return shape_navigation(b, nav, x); }, q);
        worst_phi = std::max(worst_phi, norm(pa - pf) / norm(pa));
    }
    MESSAGE("worst relative error: gamma " << worst_gamma << ", phi " << worst_phi);
    CHECK(worst_gamma < 1e-5);
    CHECK(worst_phi < 1e-5);
}

TEST_CASE("potential field on the boundary is tangential")
{
    const ImplicitBoundary b = racetrack_fit();
    const ShapeNavParams nav{default_workspace_radius(4.5, 3.0)};
    for (Vec2 p : racetrack_points()) {
        CHECK(norm(shape_navigation_gradient(b, nav, p)) < 1e-12);
        const Vec2 f = potential_field_velocity(b, {0.7, 1.0}, nav, p);
        CHECK(std::abs(dot(f, b.gradient(p))) < 1e-10 * norm(b.gradient(p)));
    }
}

TEST_CASE("potential field components")
{
    const ImplicitBoundary b = racetrack_fit();
    const ShapeNavParams nav{default_workspace_radius(4.5, 3.0)};
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const Vec2 q = random_interior(b, rng);
        const Vec2 grad_phi = shape_navigation_gradient(b, nav, q);
        const Vec2 grad_gamma = b.gradient(q);

        // K_theta = 0: pure descent of phi
        const Vec2 descent = potential_field_velocity(b, {0.4, 0.0}, nav, q);
        CHECK(std::abs(cross(descent, grad_phi)) <= 1e-14 * norm(descent) * norm(grad_phi) + 1e-300);
        CHECK(dot(descent, grad_phi) <= 0.0);

        // K_r = 0: the curl term is orthogonal to grad gamma
        const Vec2 curl = potential_field_velocity(b, {0.0, 1.0}, nav, q);
        CHECK(std::abs(dot(curl, grad_gamma)) < 1e-12 * norm(grad_gamma) * norm(grad_gamma));
        // -K_theta (d gamma / dx2, -d gamma / dx1)
        CHECK(curl.x1 == doctest::Approx(-grad_gamma.x2));
        CHECK(curl.x2 == doctest::Approx(grad_gamma.x1));

        const PotentialBasis basis = potential_field_basis(b, nav, q);
        const Vec2 f = potential_field_velocity(b, {0.3, 1.2}, nav, q);
        CHECK(norm(f - (0.3 * basis.radial + 1.2 * basis.angular)) < 1e-15);
    }

    const ImplicitBoundary c = unit_circle_fit();
    const Vec2 f = potential_field_velocity(c, {0.0, 1.0}, {10.0}, {0.5, 0.0});
    CHECK(std::abs(dot(f, c.gradient({0.5, 0.0}))) < 1e-14);
}

TEST_CASE("circle map")
{
    const ImplicitBoundary b = unit_circle_fit();
    const CircleMapParams p{{0.0, 0.0}, 1.5, 10.0};
    const Polar on = circle_map(p, b, {0.0, 1.0});
    CHECK(on.r == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(on.theta == doctest::Approx(pi / 2));

    const double d = 0.4;
    const Polar m = circle_map(p, b, {d, 0.0});
    CHECK(m.r == doctest::Approx(1.5 * std::sqrt(1.0 + b.gamma({d, 0.0}))).epsilon(1e-15));
    CHECK(m.theta == 0.0);
    CHECK(circle_map(p, b, {0.0, -0.5}).theta == doctest::Approx(1.5 * pi));

    // a point where gamma = -1 but which is not the map center
    const CircleMapParams shifted{{0.2, 0.0}, 1.5, 10.0};
    CHECK(circle_map(shifted, b, {0.0, 0.0}).r < 1e-4);
    CHECK_THROWS_AS(circle_map(p, b, {0.0, 0.0}), DegeneratePointError);

    const std::vector<Vec2> on_pts = circle_points(8);
    const std::vector<InteriorConstraint> deep = {{{0.0, 0.0}, -1.0}, {{0.3, 0.0}, -2.0}};
    const ImplicitBoundary well = fit_implicit_boundary(on_pts, deep);
    CHECK_THROWS_AS(circle_map(p, well, {0.3, 0.0}), DomainError);
}

TEST_CASE("inverse circle map")
{
    const ImplicitBoundary b = unit_circle_fit();
    const CircleMapParams p{{0.0, 0.0}, 1.5, 10.0};

    for (double th : {0.0, 0.3, 2.0, 4.5}) {
        const Vec2 q = inverse_circle_map(p, b, 1.5, th);
        CHECK(std::abs(b.gamma(q)) < 1e-9);
        CHECK(wrap_angle(std::atan2(q.x2, q.x1)) == doctest::Approx(th).epsilon(1e-12));
    }

    // independent bisection on the ray x = (0, s)
    auto h = [&](double s) { return 1.5 * std::sqrt(std::max(0.0, 1.0 + b.gamma({0.0, s}))) - 0.75; };
    double lo = 0.0, hi = 1.0;
    REQUIRE(h(lo) < 0.0);
    REQUIRE(h(hi) > 0.0);
    while (hi - lo > 1e-10) (h(0.5 * (lo + hi)) < 0.0 ? lo : hi) = 0.5 * (lo + hi);
    const Vec2 q = inverse_circle_map(p, b, 0.75, pi / 2);
    CHECK(std::abs(q.x1) < 1e-12);
    CHECK(q.x2 == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-9));

    CHECK(norm(inverse_circle_map(p, b, 0.0, 1.0)) < 1e-12);
    CHECK_THROWS_AS(inverse_circle_map(p, b, 1.6, 0.0), DomainError);
    CHECK_THROWS_AS(inverse_circle_map({{0.0, 0.0}, 1.5, 0.3}, b, 1.5, 0.0), DomainError);
}

TEST_CASE("circle map round trip")
{
    const ImplicitBoundary b = racetrack_fit();
    const CircleMapParams p{{0.0, 0.0}, 1.5, default_workspace_radius(4.5, 3.0)};
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ur(0.01, 1.5), ut(0.0, two_pi);
    for (int i = 0; i < 100; ++i) {
        const double r = ur(rng), th = ut(rng);
        const Polar back = circle_map(p, b, inverse_circle_map(p, b, r, th));
        CHECK(std::abs(back.r - r) < 1e-6);
        CHECK(std::abs(std::remainder(back.theta - th, two_pi)) < 1e-6);

        const Vec2 q = random_interior(b, rng);
        const Polar m = circle_map(p, b, q);
        CHECK(norm(inverse_circle_map(p, b, m.r, m.theta) - q) < 1e-6);
    }
}

TEST_CASE("ray monotonicity diagnostic")
{
    const CircleMapParams p{{0.0, 0.0}, 1.5, 10.0};
    CHECK(ray_monotonicity_violations(p, unit_circle_fit()).empty());
    CHECK(ray_monotonicity_violations({{0.0, 0.0}, 1.5, 10.8}, racetrack_fit()).empty());

    // gamma climbs to -0.2 at 0.5, then dips to -0.9 at 0.75 along the +x1 ray
    const std::vector<InteriorConstraint> bumpy = {{{0.0, 0.0}, -1.0}, {{0.5, 0.0}, -0.2}, {{0.75, 0.0}, -0.9}};
    const auto v = ray_monotonicity_violations(p, fit_implicit_boundary(circle_points(16), bumpy));
    REQUIRE_FALSE(v.empty());
    for (const auto& x : v) CHECK(x.r_after < x.r_before);
}

TEST_CASE("potential field flow")
{
    auto b = std::make_shared<const ImplicitBoundary>(racetrack_fit());
    const ShapeNavParams nav{10.8};
    const CircleMapParams map{{0.0, 0.0}, 1.5, 10.8};
    CHECK_THROWS_AS(PotentialFieldFlow(b, {0.1, 0.0}, nav, map), DomainError);
    CHECK_THROWS_AS(PotentialFieldFlow(b, {0.1, 1.0}, {2.0}, map), DomainError);

    const PotentialFieldFlow f(b, {0.05, 0.167}, nav, map);
    const Vec2 q{1.0, 0.5};
    CHECK(f.velocity(q) == potential_field_velocity(*b, {0.05, 0.167}, nav, q));
    const Polar pq = f.to_polar(q);
    CHECK(norm(f.from_polar(pq) - q) < 1e-8);
    CHECK(f.contains(q));
    CHECK_FALSE(f.contains({3.0, 0.0}));
    CHECK(angular_velocity(f, q) > 0.0);
}
