#include "gyre/control.hpp"

#include <cmath>

#include "gyre/errors.hpp"

namespace gyre {

AnnulusRegion make_region(double r_lower, double r_upper, GyreCenter center, double min_width)
{
    if (!(r_lower >= 0.0) || !std::isfinite(r_upper))
        throw ConfigError("region radii must be finite and non-negative");
    if (!(r_upper - r_lower >= min_width))
        throw ConfigError("region width " + std::to_string(r_upper - r_lower) + " m is below the minimum " +
                          std::to_string(min_width) + " m");
    return {r_lower, r_upper, center};
}

void validate(const BangBangConfig& cfg)
{
    if (!(cfg.u_max > 0.0)) throw ConfigError("u_max must be positive");
    if (!(cfg.region.r_upper > cfg.region.r_lower)) throw ConfigError("region is empty");
    if (cfg.mode == BangBangMode::hysteresis) {
        if (!cfg.speed_range) throw ConfigError("hysteresis mode needs a speed range");
        if (!(cfg.speed_range->lo >= 0.0 && cfg.speed_range->lo < cfg.speed_range->hi))
            throw ConfigError("speed range needs 0 <= v_lo < v_hi");
    }
}

ControlCommand bang_bang(const BangBangConfig& cfg, double r, double theta)
{
    if (r <= cfg.region.r_lower) return {cfg.u_max, outward_heading(theta)};
    if (r >= cfg.region.r_upper) return {cfg.u_max, inward_heading(theta)};
    return {0.0, wrap_angle(theta)};
}

LatchedCommand bang_bang_hysteresis(const BangBangConfig& cfg, double r, double theta, bool prev_active,
                                    std::mt19937_64& rng)
{
    const auto& reg = cfg.region;
    const bool inward = cfg.latch == LatchDirection::inward;
    bool active;
    if (inward)
        active = prev_active ? r > reg.r_lower : r >= reg.r_upper;
    else
        active = prev_active ? r < reg.r_upper : r <= reg.r_lower;

    if (!active) return {{0.0, wrap_angle(theta)}, false};
    const SpeedRange range = cfg.speed_range.value_or(SpeedRange{cfg.u_max, cfg.u_max});
    std::uniform_real_distribution<double> speed(range.lo, range.hi);
    return {{speed(rng), inward ? inward_heading(theta) : outward_heading(theta)}, true};
}

WaypointDecision waypoint_controller(Vec2 q, const std::vector<Vec2>& waypoints, std::size_t target,
                                     double capture_radius, double u_max)
{
    if (waypoints.size() < 2) throw ConfigError("waypoint controller needs at least 2 waypoints");
    target %= waypoints.size();
    if (norm(waypoints[target] - q) <= capture_radius) target = (target + 1) % waypoints.size();
    const Vec2 d = waypoints[target] - q;
    return {{u_max, wrap_angle(std::atan2(d.x2, d.x1))}, target};
}

std::vector<Vec2> waypoints_on_orbit(const FlowField& f, double r, double spacing)
{
    if (!(spacing > 0.0)) throw ConfigError("waypoint spacing must be positive");
    const double sense = angular_velocity(f, Polar{r, 0.0}) < 0.0 ? -1.0 : 1.0;
    constexpr int dense = 1440;
    std::vector<Vec2> curve;
    curve.reserve(dense + 1);
    for (int i = 0; i <= dense; ++i) curve.push_back(f.from_polar({r, wrap_angle(sense * two_pi * i / dense)}));

    std::vector<Vec2> out{curve.front()};
    double since_last = 0.0;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        double seg = norm(curve[i] - curve[i - 1]);
        while (since_last + seg >= spacing) {
            const double frac = (spacing - since_last) / seg;
            const Vec2 p = curve[i - 1] + frac * (curve[i] - curve[i - 1]);
            seg -= spacing - since_last;
            curve[i - 1] = p;
            since_last = 0.0;
            out.push_back(p);
        }
        since_last += seg;
    }
    // the walk ends where it started; drop a trailing point that nearly duplicates the first
    if (out.size() > 2 && norm(out.back() - out.front()) < 0.5 * spacing) out.pop_back();
    return out;
}

PendulumParams make_pendulum_params(double K, double omega, double mean_thrust)
{
    if (!(omega > 0.0)) throw ConfigError("pendulum frequency must be positive");
    if (mean_thrust < 0.0) throw ConfigError("mean thrust must be non-negative");
    return {K, omega, omega * omega, two_pi / omega, mean_thrust};
}

double pendulum_torque(const PendulumParams& p, double t, double theta, double theta_r)
{
    return -p.K * std::sin(p.omega * t) - p.beta * std::sin(theta_r - theta);
}

Vec2 averaged_thruster(const PendulumParams& p, const ControlCommand& cmd)
{
    if (!cmd.active()) return {};
    return p.mean_thrust * unit_from_angle(cmd.theta_r);
}

double linear_drag(double thrust, double top_speed)
{
    if (!(top_speed > 0.0)) throw ConfigError("top speed must be positive");
    return thrust / top_speed;
}

BangBangController::BangBangController(BangBangConfig cfg) : cfg_(cfg)
{
    cfg_.mode = BangBangMode::three_state;
    validate(cfg_);
}

ControlCommand BangBangController::command(const ControlInput& in)
{
    return bang_bang(cfg_, in.polar.r, in.polar.theta);
}

HysteresisController::HysteresisController(BangBangConfig cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed)
{
    cfg_.mode = BangBangMode::hysteresis;
    validate(cfg_);
}

ControlCommand HysteresisController::command(const ControlInput& in)
{
    const LatchedCommand out = bang_bang_hysteresis(cfg_, in.polar.r, in.polar.theta, active_, rng_);
    active_ = out.active;
    return out.command;
}

WaypointController::WaypointController(std::vector<Vec2> waypoints, double capture_radius, double u_max)
    : waypoints_(std::move(waypoints)), capture_radius_(capture_radius), u_max_(u_max)
{
    if (waypoints_.size() < 2) throw ConfigError("waypoint controller needs at least 2 waypoints");
    if (!(capture_radius_ > 0.0) || !(u_max_ > 0.0))
        throw ConfigError("capture radius and u_max must be positive");
}

ControlCommand WaypointController::command(const ControlInput& in)
{
    const WaypointDecision d = waypoint_controller(in.pos, waypoints_, target_, capture_radius_, u_max_);
    if (d.target != target_) ++visits_;
    target_ = d.target;
    return d.command;
}

} // namespace gyre
