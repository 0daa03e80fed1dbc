#include "gyre/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "gyre/errors.hpp"

namespace gyre {

namespace {

struct PhaseState {
    Vec2 pos;
    Vec2 vel;
};

PhaseState operator+(PhaseState a, PhaseState b) { return {a.pos + b.pos, a.vel + b.vel}; }
PhaseState operator*(double s, PhaseState a) { return {s * a.pos, s * a.vel}; }

template <typename State, typename Rhs>
State rk4_step(const State& y, double h, Rhs&& rhs)
{
    const State k1 = rhs(y);
    const State k2 = rhs(y + (0.5 * h) * k1);
    const State k3 = rhs(y + (0.5 * h) * k2);
    const State k4 = rhs(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::string describe(Vec2 x)
{
    std::ostringstream ss;
    ss << "(" << x.x1 << ", " << x.x2 << ")";
    return ss.str();
}

} // namespace

Trajectory integrate(const FlowField& f, Controller& c, Vec2 x0, const IntegrateOptions& opts)
{
    if (!(opts.dt > 0.0)) throw DomainError("integration step must be positive");
    if (!(opts.t_end > opts.dt)) throw DomainError("integration end time must exceed the step");

    const bool inertial = opts.model == RobotModel::inertial;
    const double mass = opts.inertial.mass();
    if (inertial && !(mass > 0.0)) throw DomainError("inertial model needs positive drag and tau_m");
    const double control_period =
        opts.control_period > 0.0 ? opts.control_period : (inertial ? opts.inertial.thruster.tau : opts.dt);

    const auto steps = static_cast<std::size_t>(std::ceil(opts.t_end / opts.dt - 1e-9));
    const Vec2 center = f.center().x_z;

    Trajectory traj;
    traj.center = f.center();
    traj.states.reserve(steps + 1);
    traj.controls.reserve(steps + 1);
    traj.polar.reserve(steps + 1);

    PhaseState y{x0, f.velocity(x0)};
    double t = 0.0;
    double next_update = 0.0;
    ControlCommand cmd;

    for (std::size_t i = 0;; ++i) {
        if (!f.contains(y.pos) ||
            (opts.workspace_radius && norm(y.pos - center) > *opts.workspace_radius)) {
            traj.abort_reason = "left the workspace at t=" + std::to_string(t) + " s, position " +
                                describe(y.pos);
            break;
        }
        Polar polar;
        try {
            polar = f.to_polar(y.pos);
        } catch (const DomainError& e) {
            traj.abort_reason = "chart undefined at t=" + std::to_string(t) + " s, position " +
                                describe(y.pos) + ": " + e.what();
            break;
        }
        if (t >= next_update - 1e-9 * opts.dt) {
            cmd = c.command({t, y.pos, polar});
            next_update += control_period;
        }
        const Vec2 push = cmd.active() ? cmd.u * unit_from_angle(cmd.theta_r) : Vec2{};
        const Vec2 thrust = averaged_thruster(opts.inertial.thruster, cmd);
        if (!inertial) y.vel = f.velocity(y.pos) + push;

        traj.states.push_back({t, y.pos, y.vel});
        traj.controls.push_back(cmd);
        traj.polar.push_back(polar);
        if (i == steps) break;

        const double h = std::min(opts.dt, opts.t_end - t);
        if (inertial) {
            y = rk4_step(y, h, [&](const PhaseState& s) {
                return PhaseState{s.vel, (thrust - opts.inertial.drag * (s.vel - f.velocity(s.pos))) / mass};
            });
        } else {
            y.pos = rk4_step(y.pos, h, [&](Vec2 p) { return f.velocity(p) + push; });
        }
        t = (i + 1 == steps) ? opts.t_end : t + h;
    }
    return traj;
}

std::vector<CycleRecord> detect_cycles(const Trajectory& traj)
{
    std::vector<CycleRecord> out;
    const std::size_t n = traj.size();
    if (n < 2) return out;

    constexpr double pi = std::numbers::pi;
    constexpr double angle_tolerance = 1e-6;  // [rad]
    double net_prev = 0.0;
    double net = 0.0;
    int k = 1;
    double cycle_t0 = traj.states.front().t;
    std::size_t cycle_i0 = 0;

    for (std::size_t i = 1; i < n; ++i) {
        double d = traj.polar[i].theta - traj.polar[i - 1].theta;
        d = std::remainder(d, two_pi);  // shortest signed step, in [-pi, pi]
        if (d == -pi) d = pi;
        net_prev = net;
        net += d;
        // RK4 lags the true phase by O(dt^5) per step, so a revolution that ends exactly on the
        // last sample can fall short of 2 pi k by a hair
        while (std::abs(net) >= two_pi * k - angle_tolerance) {
            const double level = std::copysign(two_pi * k, net);
            const double frac = std::clamp((level - net_prev) / (net - net_prev), 0.0, 1.0);
            const double ta = traj.states[i - 1].t;
            const double tc = ta + frac * (traj.states[i].t - ta);

            CycleRecord rec;
            rec.t_start = cycle_t0;
            rec.t_end = tc;
            rec.T = tc - cycle_t0;
            rec.start_index = cycle_i0;
            rec.end_index = i;
            rec.r_min = rec.r_max = traj.polar[cycle_i0].r;
            for (std::size_t j = cycle_i0; j < i; ++j) {
                rec.r_min = std::min(rec.r_min, traj.polar[j].r);
                rec.r_max = std::max(rec.r_max, traj.polar[j].r);
            }
            rec.effort_fraction = rec.T > 0.0 ? control_effort(traj, tc - rec.T, tc) : 0.0;
            out.push_back(rec);

            cycle_t0 = tc;
            cycle_i0 = i;
            ++k;
        }
    }
    return out;
}

double control_effort(const Trajectory& traj, double t_start, double t_end)
{
    if (!(t_end > t_start)) throw DomainError("control effort window has zero duration");
    const auto& s = traj.states;
    if (s.size() < 2) throw DomainError("control effort needs at least one step");

    auto it = std::upper_bound(s.begin(), s.end(), t_start,
                               [](double t, const RobotState& st) { return t < st.t; });
    std::size_t i = it == s.begin() ? 0 : static_cast<std::size_t>(it - s.begin()) - 1;
    double active = 0.0;
    for (; i + 1 < s.size() && s[i].t < t_end; ++i) {
        if (!traj.controls[i].active()) continue;
        const double lo = std::max(s[i].t, t_start);
        const double hi = std::min(s[i + 1].t, t_end);
        if (hi > lo) active += hi - lo;
    }
    return std::clamp(active / (t_end - t_start), 0.0, 1.0);
}

double control_effort(const Trajectory& traj, std::optional<CycleRecord> window)
{
    if (window) return control_effort(traj, window->t_start, window->t_end);
    if (traj.states.empty()) throw DomainError("control effort window has zero duration");
    return control_effort(traj, traj.states.front().t, traj.states.back().t);
}

} // namespace gyre
