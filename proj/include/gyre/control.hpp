#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gyre/flow.hpp"
#include "gyre/vec2.hpp"

namespace gyre {

inline constexpr double default_min_band_width = 0.05;  // [m]

/// Patrol band (r_lower, r_upper) in chart coordinates.
struct AnnulusRegion {
    double r_lower = 0.0;
    double r_upper = 0.0;
    GyreCenter center;
};

/// Throws ConfigError unless r_upper - r_lower >= min_width and r_lower >= 0.
AnnulusRegion make_region(double r_lower, double r_upper, GyreCenter center = {},
                          double min_width = default_min_band_width);

/// Thrust magnitude and absolute heading. u is a speed [m/s] for the kinematic robot and
/// only switches the averaged thruster on or off for the inertial one.
struct ControlCommand {
    double u = 0.0;
    double theta_r = 0.0;

    bool active() const { return u > 0.0; }
};

enum class BangBangMode { three_state, hysteresis };

/// Which way the hysteresis controller pushes. Inward: engage at r_upper, release at r_lower
/// (for flows that spiral outward). Outward is the mirror image.
enum class LatchDirection { inward, outward };

struct SpeedRange {
    double lo = 0.01;
    double hi = 0.04;
};

struct BangBangConfig {
    AnnulusRegion region;
    double u_max = 0.04;
    BangBangMode mode = BangBangMode::three_state;
    std::optional<SpeedRange> speed_range;
    LatchDirection latch = LatchDirection::inward;
};

void validate(const BangBangConfig& cfg);

/// Heading pointing away from the center along the center-to-robot ray at angle theta.
inline double outward_heading(double theta) { return wrap_angle(theta); }
inline double inward_heading(double theta) { return wrap_angle(theta + std::numbers::pi); }

/// Three-state radial law: full outward thrust at or below r_lower, coast strictly inside the
/// band, full inward thrust at or above r_upper.
ControlCommand bang_bang(const BangBangConfig& cfg, double r, double theta);

struct LatchedCommand {
    ControlCommand command;
    bool active = false;
};

/// Latched single-direction law. While active the speed is drawn uniformly from speed_range on
/// every call; no thrust is applied in the opposite direction.
LatchedCommand bang_bang_hysteresis(const BangBangConfig& cfg, double r, double theta, bool prev_active,
                                    std::mt19937_64& rng);

struct WaypointDecision {
    ControlCommand command;
    std::size_t target = 0;
};

/// Direct pursuit of waypoints[target] at full thrust, moving on to the next waypoint (cyclically)
/// once within capture_radius. Never idles.
WaypointDecision waypoint_controller(Vec2 q, const std::vector<Vec2>& waypoints, std::size_t target,
                                     double capture_radius, double u_max);

/// Points spaced `spacing` apart (by arc length) along the chart circle r of `f`, ordered in
/// the rotation sense of the flow.
std::vector<Vec2> waypoints_on_orbit(const FlowField& f, double r, double spacing);

/// Forced-pendulum torque waveform of an oscillating-flipper swimmer.
struct PendulumParams {
    double K = 15.0;                ///< amplitude gain [N m]
    double omega = two_pi;          ///< oscillation frequency [rad/s]
    double beta = two_pi * two_pi;  ///< heading gain, omega^2 for resonance
    double tau = 1.0;               ///< averaging window 2 pi / omega [s]
    double mean_thrust = 0.021;     ///< thrust over one window [N]
};

PendulumParams make_pendulum_params(double K = 15.0, double omega = two_pi, double mean_thrust = 0.021);

/// u = -K sin(omega t) - beta sin(theta_r - theta)
double pendulum_torque(const PendulumParams& p, double t, double theta, double theta_r);

/// Window-averaged thrust: mean_thrust along theta_r while the command is active.
Vec2 averaged_thruster(const PendulumParams& p, const ControlCommand& cmd);

inline constexpr double default_top_speed = 0.093;  // [m/s] in still water

/// Linear drag coefficient b [N s/m] such that `thrust` balances drag at `top_speed`.
double linear_drag(double thrust, double top_speed);

/// What a controller sees each time it is queried.
struct ControlInput {
    double t = 0.0;
    Vec2 pos;
    Polar polar;  ///< chart coordinates of pos about the gyre center
};

/// Stateful feedback law. Each simulation owns its controller instance.
class Controller {
public:
    virtual ~Controller() = default;
    virtual ControlCommand command(const ControlInput& in) = 0;
    virtual std::string name() const = 0;
};

class IdleController final : public Controller {
public:
    ControlCommand command(const ControlInput& in) override { return {0.0, in.polar.theta}; }
    std::string name() const override { return "none"; }
};

class BangBangController final : public Controller {
public:
    explicit BangBangController(BangBangConfig cfg);
    ControlCommand command(const ControlInput& in) override;
    std::string name() const override { return "bang_bang"; }

private:
    BangBangConfig cfg_;
};

class HysteresisController final : public Controller {
public:
    HysteresisController(BangBangConfig cfg, std::uint64_t seed);
    ControlCommand command(const ControlInput& in) override;
    std::string name() const override { return "hysteresis"; }
    bool active() const { return active_; }

private:
    BangBangConfig cfg_;
    std::mt19937_64 rng_;
    bool active_ = false;
};

class WaypointController final : public Controller {
public:
    WaypointController(std::vector<Vec2> waypoints, double capture_radius, double u_max);
    ControlCommand command(const ControlInput& in) override;
    std::string name() const override { return "waypoint"; }
    std::size_t target() const { return target_; }
    std::size_t visits() const { return visits_; }

private:
    std::vector<Vec2> waypoints_;
    double capture_radius_;
    double u_max_;
    std::size_t target_ = 0;
    std::size_t visits_ = 0;
};

} // namespace gyre
