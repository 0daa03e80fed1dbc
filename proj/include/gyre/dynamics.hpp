#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gyre/control.hpp"
#include "gyre/flow.hpp"
#include "gyre/vec2.hpp"

namespace gyre {

struct RobotState {
    double t = 0.0;
    Vec2 pos;
    Vec2 vel;  ///< ground velocity [m/s]
};

enum class RobotModel {
    kinematic,  ///< velocity = flow + commanded speed along the heading
    inertial,   ///< velocity relaxes toward flow under averaged thrust and linear drag
};

struct InertialParams {
    PendulumParams thruster = make_pendulum_params();
    double drag = linear_drag(0.021, default_top_speed);  ///< b [N s/m]
    double tau_m = 2.0;                                   ///< velocity relaxation time m / b [s]

    double mass() const { return drag * tau_m; }
};

struct IntegrateOptions {
    double dt = 0.01;
    double t_end = 0.0;
    RobotModel model = RobotModel::kinematic;
    InertialParams inertial;
    /// Controller update period. Zero means every step (kinematic) or one thruster window (inertial).
    double control_period = 0.0;
    /// Abort once the robot is farther than this from the gyre center.
    std::optional<double> workspace_radius;
};

/// Time-ordered states with the command applied over the step that starts at each state.
/// states, controls and polar always have the same length.
struct Trajectory {
    std::vector<RobotState> states;
    std::vector<ControlCommand> controls;
    std::vector<Polar> polar;  ///< chart coordinates of each state
    GyreCenter center;
    std::map<std::string, std::string> meta;
    /// Set when integration stopped early (robot left the workspace or the chart).
    std::optional<std::string> abort_reason;

    std::size_t size() const { return states.size(); }
    double duration() const { return states.empty() ? 0.0 : states.back().t - states.front().t; }
};

/// Fixed-step RK4 from x0 over [0, t_end]; the last step is shortened to land on t_end.
/// The command is held constant within each step.
Trajectory integrate(const FlowField& f, Controller& c, Vec2 x0, const IntegrateOptions& opts);

struct CycleRecord {
    double T = 0.0;       ///< period [s]
    double t_start = 0.0;
    double t_end = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    double effort_fraction = 0.0;
    std::size_t start_index = 0;
    std::size_t end_index = 0;
};

/// One record per full 2 pi of net rotation about the gyre center, in either sense.
/// Crossing times are interpolated linearly in the unwrapped angle; a partial final cycle is dropped.
std::vector<CycleRecord> detect_cycles(const Trajectory& traj);

/// Fraction of the window [t_start, t_end] during which the applied command was active.
/// The whole trajectory is used when no window is given. Throws DomainError on a zero-length window.
double control_effort(const Trajectory& traj, std::optional<CycleRecord> window = std::nullopt);
double control_effort(const Trajectory& traj, double t_start, double t_end);

} // namespace gyre
