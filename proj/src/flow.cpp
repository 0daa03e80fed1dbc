#include "gyre/flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gyre/errors.hpp"

namespace gyre {

double OmegaProfile::operator()(double r) const
{
    if (!in_domain(r))
        throw DomainError("radius " + std::to_string(r) + " outside angular velocity profile domain");
    return omega(r);
}

bool OmegaProfile::in_domain(double r) const
{
    const bool above_min = open_at_min ? r > r_min : r >= r_min;
    return above_min && r <= r_max;
}

OmegaProfile OmegaProfile::inverse(double c, double r0)
{
    if (!(c > 0.0) || r0 < 0.0) throw DomainError("inverse profile requires c > 0 and r0 >= 0");
    OmegaProfile p;
    p.omega = [c, r0](double r) { return c / (r + r0); };
    p.r_min = 0.0;
    p.open_at_min = (r0 == 0.0);
    return p;
}

OmegaProfile OmegaProfile::constant(double c)
{
    if (!(c > 0.0)) throw DomainError("constant profile requires c > 0");
    OmegaProfile p;
    p.omega = [c](double) { return c; };
    return p;
}

Vec2 double_gyre_velocity(const DoubleGyreParams& p, Vec2 x)
{
    constexpr double pi = std::numbers::pi;
    const double a = pi * x.x1 / p.s;
    const double b = pi * x.x2 / p.s;
    return {-pi * p.A * std::sin(a) * std::cos(b) - p.mu * x.x1,
            pi * p.A * std::cos(a) * std::sin(b) - p.mu * x.x2};
}

Vec2 vortex_velocity(const VortexParams& p, Vec2 x)
{
    if (x == Vec2{}) return {};
    const double omega = p.omega_profile(norm(x));
    return {-omega * x.x2 - p.mu * x.x1, omega * x.x1 - p.mu * x.x2};
}

Polar FlowField::to_polar(Vec2 x) const
{
    const Vec2 d = x - center().x_z;
    return {norm(d), wrap_angle(std::atan2(d.x2, d.x1))};
}

Vec2 FlowField::from_polar(Polar p) const
{
    return center().x_z + p.r * unit_from_angle(p.theta);
}

DoubleGyreFlow::DoubleGyreFlow(DoubleGyreParams p, std::optional<Vec2> center)
    : params_(p), center_(center.value_or(Vec2{p.s / 2.0, p.s / 2.0}))
{
    if (!(p.A > 0.0) || !(p.s > 0.0) || p.mu < 0.0)
        throw DomainError("double gyre requires A > 0, s > 0, mu >= 0");
}

VortexFlow::VortexFlow(VortexParams p) : params_(std::move(p))
{
    if (!params_.omega_profile.omega) throw DomainError("vortex requires an angular velocity profile");
}

bool VortexFlow::contains(Vec2 x) const
{
    return x == Vec2{} || params_.omega_profile.in_domain(norm(x));
}

double angular_velocity(const FlowField& f, Vec2 x)
{
    const Vec2 d = x - f.center().x_z;
    const double rho = norm(d);
    if (!(rho > 0.0)) throw DegeneratePointError("angular velocity undefined at the gyre center");
    return dot(f.velocity(x), perp(d)) / (rho * rho);
}

double angular_velocity(const FlowField& f, Polar p)
{
    return angular_velocity(f, f.from_polar(p));
}

RadiusInterval monotone_band(const FlowField& f, int theta_samples, int r_samples,
                             RadiusInterval r_search)
{
    if (theta_samples < 8 || r_samples < 8)
        throw DomainError("monotone_band needs at least 8 samples in each direction");
    if (!(r_search.lower > 0.0) || r_search.empty())
        throw DomainError("monotone_band search interval must be positive and non-empty");

    const auto nr = static_cast<std::size_t>(r_samples);
    const auto nt = static_cast<std::size_t>(theta_samples);
    std::vector<double> radii(nr);
    for (std::size_t k = 0; k < nr; ++k)
        radii[k] = r_search.lower + (r_search.upper - r_search.lower) * static_cast<double>(k) /
                                        static_cast<double>(nr - 1);

    // omega[k * nt + j]; NaN marks samples where the field or chart is undefined
    std::vector<double> omega(nr * nt, std::numeric_limits<double>::quiet_NaN());
    double signed_sum = 0.0;
    for (std::size_t k = 0; k < nr; ++k) {
        for (std::size_t j = 0; j < nt; ++j) {
            const double theta = two_pi * static_cast<double>(j) / static_cast<double>(nt);
            try {
                const Vec2 x = f.from_polar({radii[k], theta});
                if (!f.contains(x)) continue;
                const double w = angular_velocity(f, x);
                omega[k * nt + j] = w;
                signed_sum += w;
            } catch (const DomainError&) {
            }
        }
    }
    const double sense = signed_sum < 0.0 ? -1.0 : 1.0;

    // Decreases smaller than this relative amount are sampling noise, not monotonicity.
    constexpr double rel_tol = 1e-9;
    auto segment_ok = [&](std::size_t k) {
        for (std::size_t j = 0; j < nt; ++j) {
            const double a = sense * omega[k * nt + j];
            const double b = sense * omega[(k + 1) * nt + j];
            if (!(a > 0.0) || !(b > 0.0)) return false;
            if (!(b < a - rel_tol * a)) return false;
        }
        return true;
    };

    std::size_t best_start = 0, best_len = 0, run_start = 0, run_len = 0;
    for (std::size_t k = 0; k + 1 < nr; ++k) {
        if (segment_ok(k)) {
            if (run_len == 0) run_start = k;
            ++run_len;
            if (run_len > best_len) {
                best_len = run_len;
                best_start = run_start;
            }
        } else {
            run_len = 0;
        }
    }
    if (best_len == 0) return {};
    return {radii[best_start], radii[best_start + best_len]};
}

double orbit_period(const FlowField& f, double r, int theta_steps)
{
    if (theta_steps < 1) throw DomainError("orbit_period needs at least one panel");
    const double h = two_pi / theta_steps;
    double sum = 0.0;
    double sense = 0.0;
    for (int i = 0; i < theta_steps; ++i) {
        const double theta = (i + 0.5) * h;
        const double w = angular_velocity(f, Polar{r, theta});
        if (sense == 0.0) sense = w < 0.0 ? -1.0 : 1.0;
        if (!(sense * w > 0.0))
            throw DomainError("angular velocity vanishes or reverses on orbit r=" + std::to_string(r));
        sum += 1.0 / (sense * w);
    }
    return sum * h;
}

double radius_for_period(const FlowField& f, double period, RadiusInterval band, int theta_steps)
{
    if (band.empty()) throw DomainError("radius_for_period needs a non-empty band");
    double lo = band.lower, hi = band.upper;
    const double t_lo = orbit_period(f, lo, theta_steps);
    const double t_hi = orbit_period(f, hi, theta_steps);
    if (!(period >= t_lo && period <= t_hi))
        throw DomainError("period " + std::to_string(period) + " s outside band periods [" +
                          std::to_string(t_lo) + ", " + std::to_string(t_hi) + "]");
    for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (orbit_period(f, mid, theta_steps) < period)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace gyre
