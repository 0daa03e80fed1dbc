#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "gyre/flow.hpp"
#include "gyre/vec2.hpp"

namespace gyre {

/// Prescribed value of the implicit function at an interior point (negative inside).
struct InteriorConstraint {
    Vec2 pos;
    double value = -1.0;
};

/// Thin-plate-spline implicit function gamma(q) = sum_i w_i k(|q - c_i|) + a0 + a1 q1 + a2 q2,
/// with k(r) = r^2 log r. Zero on the fitted boundary, negative inside.
class ImplicitBoundary {
public:
    double gamma(Vec2 q) const;
    Vec2 gradient(Vec2 q) const;

    std::span<const Vec2> centers() const { return centers_; }
    std::span<const double> weights() const { return weights_; }
    /// (a0, a1, a2) of the affine part.
    std::span<const double, 3> affine() const { return affine_; }

    /// Axis-aligned bounds of the on-boundary constraint points.
    Vec2 bounds_min() const { return lo_; }
    Vec2 bounds_max() const { return hi_; }

private:
    friend ImplicitBoundary fit_implicit_boundary(std::span<const Vec2>,
                                                  std::span<const InteriorConstraint>);
    ImplicitBoundary() = default;

    std::vector<Vec2> centers_;
    std::vector<double> weights_;
    std::array<double, 3> affine_{};
    Vec2 lo_, hi_;
};

/// Interpolates gamma = 0 at `on_points` and the prescribed negative values at the interior
/// constraints. Throws DomainError on too few/invalid constraints and SingularSystemError on
/// duplicate or otherwise degenerate constraint sets.
ImplicitBoundary fit_implicit_boundary(std::span<const Vec2> on_points,
                                       std::span<const InteriorConstraint> interior);

/// `n` points equally spaced in arc length along a stadium of the given overall length (x) and
/// width (y), centered at the origin, counterclockwise from (length/2, 0).
std::vector<Vec2> racetrack_points(double length = 4.5, double width = 3.0, int n = 64);

struct BoundaryConstraints {
    std::vector<Vec2> on_points;
    std::vector<InteriorConstraint> interior;
};

/// Reads "x y gamma_value" rows; gamma_value 0 marks a boundary point, negative values interior
/// constraints. Blank lines and '#' comments are skipped.
BoundaryConstraints load_boundary_constraints(const std::filesystem::path& path);

struct ShapeNavParams {
    double R0 = 10.8;  ///< circular workspace radius [m]
};

/// Twice the diagonal of a length x width tank.
double default_workspace_radius(double length, double width);

/// phi(q) = gamma^2 / (gamma^2 + (R0 - |q|)). Throws DomainError if the denominator is not positive.
double shape_navigation(const ImplicitBoundary& b, const ShapeNavParams& p, Vec2 q);
Vec2 shape_navigation_gradient(const ImplicitBoundary& b, const ShapeNavParams& p, Vec2 q);

struct PotentialFieldParams {
    double K_r = 0.05;
    double K_theta = 0.167;
};

/// The two unit-gain fields whose combination K_r * radial + K_theta * angular is the potential
/// flow: radial = -grad(phi), angular = -curl(0, 0, gamma) reduced to the plane.
struct PotentialBasis {
    Vec2 radial;
    Vec2 angular;
};

PotentialBasis potential_field_basis(const ImplicitBoundary& b, const ShapeNavParams& nav, Vec2 q);

Vec2 potential_field_velocity(const ImplicitBoundary& b, const PotentialFieldParams& p,
                              const ShapeNavParams& nav, Vec2 q);

struct CircleMapParams {
    Vec2 g;                  ///< gyre center
    double r_max = 1.5;      ///< mapped radius of the boundary [m]
    double ray_length = 10;  ///< search limit for the inverse map [m]
};

/// r = r_max sqrt(1 + gamma(q)), theta = angle of q - g in [0, 2pi).
Polar circle_map(const CircleMapParams& p, const ImplicitBoundary& b, Vec2 q);

/// First point along the ray from g at angle theta whose mapped radius equals r.
/// Bisection to 1e-10 m once the crossing is bracketed.
Vec2 inverse_circle_map(const CircleMapParams& p, const ImplicitBoundary& b, double r, double theta);

struct RayViolation {
    double theta;
    double distance;  ///< distance from g where the mapped radius decreased
    double r_before;
    double r_after;
};

/// Samples r along rays from g out to the boundary and lists every place it decreases.
std::vector<RayViolation> ray_monotonicity_violations(const CircleMapParams& p,
                                                      const ImplicitBoundary& b,
                                                      int theta_samples = 72,
                                                      int ray_samples = 200);

/// The potential flow inside a fitted enclosure, with the circle map as its polar chart.
class PotentialFieldFlow final : public FlowField {
public:
    PotentialFieldFlow(std::shared_ptr<const ImplicitBoundary> boundary, PotentialFieldParams gains,
                       ShapeNavParams nav, CircleMapParams map);

    Vec2 velocity(Vec2 x) const override;
    GyreCenter center() const override { return {map_.g, map_.g}; }
    Polar to_polar(Vec2 x) const override;
    Vec2 from_polar(Polar p) const override;
    /// Inside the enclosure (gamma <= 0).
    bool contains(Vec2 x) const override;

    const ImplicitBoundary& boundary() const { return *boundary_; }
    const PotentialFieldParams& gains() const { return gains_; }
    const ShapeNavParams& nav() const { return nav_; }
    const CircleMapParams& map() const { return map_; }

private:
    std::shared_ptr<const ImplicitBoundary> boundary_;
    PotentialFieldParams gains_;
    ShapeNavParams nav_;
    CircleMapParams map_;
};

} // namespace gyre
