#include "gyre/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "gyre/errors.hpp"

namespace gyre {

namespace {

double tps_kernel(double r) { return r > 0.0 ? r * r * std::log(r) : 0.0; }

// d/dq k(|q - c|) = (2 log r + 1) (q - c)
double tps_kernel_slope(double r) { return r > 0.0 ? 2.0 * std::log(r) + 1.0 : 0.0; }

} // namespace

double ImplicitBoundary::gamma(Vec2 q) const
{
    double v = affine_[0] + affine_[1] * q.x1 + affine_[2] * q.x2;
    for (std::size_t i = 0; i < centers_.size(); ++i) v += weights_[i] * tps_kernel(norm(q - centers_[i]));
    return v;
}

Vec2 ImplicitBoundary::gradient(Vec2 q) const
{
    Vec2 g{affine_[1], affine_[2]};
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        const Vec2 d = q - centers_[i];
        g += (weights_[i] * tps_kernel_slope(norm(d))) * d;
    }
    return g;
}

ImplicitBoundary fit_implicit_boundary(std::span<const Vec2> on_points,
                                       std::span<const InteriorConstraint> interior)
{
    if (on_points.size() < 3) throw DomainError("implicit boundary needs at least 3 boundary points");
    if (interior.empty()) throw DomainError("implicit boundary needs at least one interior constraint");

    ImplicitBoundary b;
    std::vector<double> values;
    for (Vec2 p : on_points) {
        b.centers_.push_back(p);
        values.push_back(0.0);
    }
    for (const auto& c : interior) {
        if (!(c.value < 0.0)) throw DomainError("interior constraint values must be negative");
        b.centers_.push_back(c.pos);
        values.push_back(c.value);
    }
    for (Vec2 p : b.centers_)
        if (!is_finite(p)) throw DomainError("constraint point is not finite");

    const auto n = static_cast<Eigen::Index>(b.centers_.size());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (b.centers_[i] == b.centers_[j])
                throw SingularSystemError("duplicate constraint point in implicit boundary fit");

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 3, n + 3);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec2 ci = b.centers_[i];
        for (Eigen::Index j = 0; j < n; ++j) A(i, j) = tps_kernel(norm(ci - b.centers_[j]));
        A(i, n) = A(n, i) = 1.0;
        A(i, n + 1) = A(n + 1, i) = ci.x1;
        A(i, n + 2) = A(n + 2, i) = ci.x2;
        rhs(i) = values[i];
    }

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) throw SingularSystemError("implicit boundary constraints are degenerate");
    const Eigen::VectorXd sol = lu.solve(rhs);
    const double residual = (A * sol - rhs).lpNorm<Eigen::Infinity>();
    if (!sol.allFinite() || residual > 1e-9 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>()))
        throw SingularSystemError("implicit boundary system is ill-conditioned");

    b.weights_.assign(sol.data(), sol.data() + n);
    b.affine_ = {sol(n), sol(n + 1), sol(n + 2)};

    b.lo_ = b.hi_ = on_points.front();
    for (Vec2 p : on_points) {
        b.lo_ = {std::min(b.lo_.x1, p.x1), std::min(b.lo_.x2, p.x2)};
        b.hi_ = {std::max(b.hi_.x1, p.x1), std::max(b.hi_.x2, p.x2)};
    }
    return b;
}

std::vector<Vec2> racetrack_points(double length, double width, int n)
{
    if (!(width > 0.0) || length < width || n < 3)
        throw DomainError("racetrack requires length >= width > 0 and n >= 3");
    constexpr double pi = std::numbers::pi;
    const double R = width / 2.0;
    const double a = (length - width) / 2.0;  // half the straight length
    const double arc = pi * R;
    const double perimeter = 4.0 * a + 2.0 * arc;

    std::vector<Vec2> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        double s = perimeter * k / n;
        // upper half of the right cap, top straight, left cap, bottom straight, lower half of right cap
        if (s < arc / 2.0) {
            pts.push_back({a + R * std::cos(s / R), R * std::sin(s / R)});
            continue;
        }
        s -= arc / 2.0;
        if (s < 2.0 * a) {
            pts.push_back({a - s, R});
            continue;
        }
        s -= 2.0 * a;
        if (s < arc) {
            const double th = pi / 2.0 + s / R;
            pts.push_back({-a + R * std::cos(th), R * std::sin(th)});
            continue;
        }
        s -= arc;
        if (s < 2.0 * a) {
            pts.push_back({-a + s, -R});
            continue;
        }
        s -= 2.0 * a;
        const double th = -pi / 2.0 + s / R;
        pts.push_back({a + R * std::cos(th), R * std::sin(th)});
    }
    return pts;
}

BoundaryConstraints load_boundary_constraints(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open boundary constraint file " + path.string());
    BoundaryConstraints out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double x, y, g;
        if (!(ss >> x)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ParseError(path.string() + ": expected 'x y gamma_value'", lineno);
        }
        std::string rest;
        if (!(ss >> y >> g) || (ss >> rest))
            throw ParseError(path.string() + ": expected 'x y gamma_value'", lineno);
        if (g == 0.0)
            out.on_points.push_back({x, y});
        else if (g < 0.0)
            out.interior.push_back({{x, y}, g});
        else
            throw ParseError(path.string() + ": gamma_value must be 0 or negative", lineno);
    }
    if (out.on_points.empty() && out.interior.empty())
        throw ParseError(path.string() + ": no constraints found");
    return out;
}

double default_workspace_radius(double length, double width)
{
    return 2.0 * std::hypot(length, width);
}

double shape_navigation(const ImplicitBoundary& b, const ShapeNavParams& p, Vec2 q)
{
    const double g = b.gamma(q);
    const double den = g * g + (p.R0 - norm(q));
    if (!(den > 0.0)) throw DomainError("shape navigation denominator is not positive");
    return g * g / den;
}

Vec2 shape_navigation_gradient(const ImplicitBoundary& b, const ShapeNavParams& p, Vec2 q)
{
    const double g = b.gamma(q);
    const Vec2 dg = b.gradient(q);
    const double rho = norm(q);
    const double den = g * g + (p.R0 - rho);
    if (!(den > 0.0)) throw DomainError("shape navigation denominator is not positive");
    // |q| is not differentiable at the origin; its zero subgradient is used there
    const Vec2 drho = rho > 0.0 ? q / rho : Vec2{};
    const Vec2 dden = 2.0 * g * dg - drho;
    return (2.0 * g * den * dg - g * g * dden) / (den * den);
}

PotentialBasis potential_field_basis(const ImplicitBoundary& b, const ShapeNavParams& nav, Vec2 q)
{
    const Vec2 dg = b.gradient(q);
    return {-shape_navigation_gradient(b, nav, q), {-dg.x2, dg.x1}};
}

Vec2 potential_field_velocity(const ImplicitBoundary& b, const PotentialFieldParams& p,
                              const ShapeNavParams& nav, Vec2 q)
{
    const PotentialBasis basis = potential_field_basis(b, nav, q);
    return p.K_r * basis.radial + p.K_theta * basis.angular;
}

Polar circle_map(const CircleMapParams& p, const ImplicitBoundary& b, Vec2 q)
{
    const Vec2 d = q - p.g;
    if (!(norm(d) > 0.0)) throw DegeneratePointError("circle map undefined at the gyre center");
    const double s = 1.0 + b.gamma(q);
    // rounding at an interior constraint of exactly -1 may land a hair below zero
    if (s < -1e-12) throw DomainError("circle map requires 1 + gamma >= 0");
    return {p.r_max * std::sqrt(std::max(s, 0.0)), wrap_angle(std::atan2(d.x2, d.x1))};
}

Vec2 inverse_circle_map(const CircleMapParams& p, const ImplicitBoundary& b, double r, double theta)
{
    if (r < 0.0 || r > p.r_max) throw DomainError("inverse circle map requires 0 <= r <= r_max");
    const double target = (r / p.r_max) * (r / p.r_max) - 1.0;
    const Vec2 dir = unit_from_angle(theta);
    auto excess = [&](double s) { return b.gamma(p.g + s * dir) - target; };

    const double h0 = excess(0.0);
    if (h0 >= 0.0) {
        if (h0 <= 1e-9) return p.g;
        throw DomainError("mapped radius " + std::to_string(r) + " lies below the value at the center");
    }

    constexpr double march = 0.01;
    double lo = 0.0, hi = 0.0;
    bool bracketed = false;
    while (hi < p.ray_length) {
        lo = hi;
        hi = std::min(hi + march, p.ray_length);
        if (excess(hi) >= 0.0) {
            bracketed = true;
            break;
        }
    }
    if (!bracketed)
        throw DomainError("mapped radius " + std::to_string(r) + " not reached within ray length");
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return p.g + (0.5 * (lo + hi)) * dir;
}

std::vector<RayViolation> ray_monotonicity_violations(const CircleMapParams& p, const ImplicitBoundary& b,
                                                      int theta_samples, int ray_samples)
{
    std::vector<RayViolation> out;
    for (int j = 0; j < theta_samples; ++j) {
        const double theta = two_pi * j / theta_samples;
        const Vec2 edge = inverse_circle_map(p, b, p.r_max, theta);
        const double reach = norm(edge - p.g);
        const Vec2 dir = unit_from_angle(theta);
        double prev = -1.0;
        for (int k = 1; k <= ray_samples; ++k) {
            const double s = reach * k / ray_samples;
            const double g = b.gamma(p.g + s * dir);
            const double r = p.r_max * std::sqrt(std::max(0.0, 1.0 + g));
            if (prev >= 0.0 && r < prev) out.push_back({theta, s, prev, r});
            prev = r;
        }
    }
    return out;
}

PotentialFieldFlow::PotentialFieldFlow(std::shared_ptr<const ImplicitBoundary> boundary,
                                       PotentialFieldParams gains, ShapeNavParams nav, CircleMapParams map)
    : boundary_(std::move(boundary)), gains_(gains), nav_(nav), map_(map)
{
    if (!boundary_) throw DomainError("potential flow requires a boundary");
    if (gains_.K_theta == 0.0) throw DomainError("K_theta must be nonzero for the flow to circulate");
    if (!(nav_.R0 > 0.0)) throw DomainError("R0 must be positive");
    const Vec2 lo = boundary_->bounds_min(), hi = boundary_->bounds_max();
    for (Vec2 corner : {lo, hi, Vec2{lo.x1, hi.x2}, Vec2{hi.x1, lo.x2}})
        if (norm(corner) >= nav_.R0) throw DomainError("R0 must exceed the boundary's extent");
    if (!(map_.r_max > 0.0)) throw DomainError("r_max must be positive");
}

Vec2 PotentialFieldFlow::velocity(Vec2 x) const
{
    return potential_field_velocity(*boundary_, gains_, nav_, x);
}

Polar PotentialFieldFlow::to_polar(Vec2 x) const { return circle_map(map_, *boundary_, x); }

Vec2 PotentialFieldFlow::from_polar(Polar p) const
{
    return inverse_circle_map(map_, *boundary_, p.r, p.theta);
}

bool PotentialFieldFlow::contains(Vec2 x) const { return boundary_->gamma(x) <= 0.0; }

} // namespace gyre
