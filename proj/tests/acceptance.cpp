// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "gyre/config.hpp"
#include "gyre/experiment.hpp"
#include "gyre/fitting.hpp"
#include "gyre/flow.hpp"
#include "gyre/geometry.hpp"

using namespace gyre;
using std::numbers::pi;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

ExperimentConfig config_from(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

const char* vortex_ini = R"(
[flow]
model = vortex
omega_profile = inverse
omega_c = 1.0
mu = 0.02
[region]
r_lower = 1.0
r_upper = 2.0
[controller]
type = hysteresis
latch = outward
v_lo = 0.05
v_hi = 0.10
[integration]
dt = 0.01
t_end = 5000
[band]
r_min = 0.5
r_max = 3.0
[checks]
period_bounds = true
slack = 0.01
[run]
seed = 1
seeds = 20
)";

// Gains picked so the (0.8, 1.0) band orbits take roughly 43 s and 57 s.
const char* racetrack_ini = R"(
[flow]
model = racetrack
K_r = 0.05
K_theta = 0.167
[region]
r_lower = 0.8
r_upper = 1.0
[controller]
type = hysteresis
latch = inward
v_lo = 0.01
v_hi = 0.04
[integration]
dt = 0.01
t_end = 5000
[run]
seed = 1
)";

const char* compare_ini = R"(
[flow]
model = racetrack
K_r = 0.05
K_theta = 0.167
[region]
r_lower = 0.8
r_upper = 1.0
[integration]
dt = 0.01
t_end = 5000
[compare]
controllers = flow, waypoint
[controller:flow]
type = hysteresis
latch = inward
v_lo = 0.01
v_hi = 0.04
[controller:waypoint]
type = waypoint
u_max = 0.04
capture_radius = 0.15
waypoint_spacing = 0.5
[run]
seed = 7
)";

Verdict theorem_suite()
{
    const auto t0 = std::chrono::steady_clock::now();
    const TheoremOutcome out = verify_theorem(config_from(vortex_ini));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const bool bounds = std::abs(out.T_lower - 2.0 * pi) < 1e-9 && std::abs(out.T_upper - 4.0 * pi) < 1e-9;
    bool all_seeds = out.seeds.size() == 20;
    for (const auto& s : out.seeds) all_seeds = all_seeds && s.passed && s.cycles > 0;
    const bool inside = out.total_cycles > 0 && out.min_period > 2.0 * pi - 0.01 && out.max_period < 4.0 * pi + 0.01;
    return {bounds && all_seeds && inside && out.passed && secs < 30.0,
            fmt::format("bounds ({:.9f}, {:.9f}) s, {} cycles over {} seeds in [{:.4f}, {:.4f}] s, {:.1f} s",
                        out.T_lower, out.T_upper, out.total_cycles, out.seeds.size(), out.min_period,
                        out.max_period, secs)};
}

Verdict racetrack_replication()
{
    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentConfig cfg = config_from(racetrack_ini);
    const Scenario sc = prepare_scenario(cfg, true);
    const double lo = orbit_period(*sc.flow.field, sc.region.r_lower);
    const double hi = orbit_period(*sc.flow.field, sc.region.r_upper);
    const bool near_reported = std::abs(lo / 42.67 - 1.0) <= 0.25 && std::abs(hi / 56.92 - 1.0) <= 0.25;
    const bool in_band = sc.band && sc.band->contains(sc.region.r_lower, sc.region.r_upper);

    SimulationOutcome sim = run_simulation(cfg, sc, cfg.controller, cfg.run.seed);
    check_period_bounds(sim.report, lo, hi, 0.0);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    double tmin = 0.0, tmax = 0.0;
    if (!sim.report.cycles.empty()) {
        const auto [a, b] = std::minmax_element(sim.report.cycles.begin(), sim.report.cycles.end(),
                                                [](const auto& x, const auto& y) { return x.T < y.T; });
        tmin = a->T;
        tmax = b->T;
    }
    return {near_reported && in_band && sim.report.ok() && secs < 60.0,
            fmt::format("bounds ({:.3f}, {:.3f}) s vs reported (42.67, 56.92) s, {} cycles in [{:.3f}, {:.3f}] s, "
                        "{:.1f} s",
                        lo, hi, sim.report.cycles.size(), tmin, tmax, secs)};
}

Verdict effort_comparison()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = compare_controllers(config_from(compare_ini));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const CompareRow& flow = rows.at(0);
    const CompareRow& wp = rows.at(1);
    const bool ok = flow.cycles > 0 && wp.cycles > 0 && !flow.abort_reason && !wp.abort_reason &&
                    flow.effort_overall < 0.5 && flow.effort.mean < 0.5 && wp.effort_overall == 1.0 &&
                    wp.effort.mean == 1.0 && secs < 60.0;
    return {ok, fmt::format("flow {:.4f} (per cycle {:.4f}), waypoint {:.4f} (per cycle {:.4f}), ratio {:.2f}, {:.1f} s",
                            flow.effort_overall, flow.effort.mean, wp.effort_overall, wp.effort.mean,
                            flow.effort_overall / wp.effort_overall, secs)};
}

Verdict period_monotonicity()
{
    const DoubleGyreFlow gyre({0.1, 1.0, 0.0});
    const VortexFlow vortex({OmegaProfile::inverse(1.0), 0.02});
    struct Case {
        const char* name;
        const FlowField* f;
        RadiusInterval search;
    };
    const Case cases[] = {{"double gyre", &gyre, {0.02, 0.45}}, {"vortex", &vortex, {0.5, 3.0}}};

    std::mt19937_64 rng(4);
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        const RadiusInterval band = monotone_band(*c.f, 64, 64, c.search);
        if (band.empty()) {
            ok = false;
            detail += fmt::format("{}: empty band; ", c.name);
            continue;
        }
        std::uniform_real_distribution<double> ur(band.lower, band.upper);
        double min_gap = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 10; ++k) {
            double a = ur(rng), b = ur(rng);
            if (a > b) std::swap(a, b);
            if (a == b) continue;
            const double gap = orbit_period(*c.f, b) - orbit_period(*c.f, a);
            min_gap = std::min(min_gap, gap);
            ok = ok && gap > -1e-9;
        }
        detail += fmt::format("{} band ({:.4f}, {:.4f}) m, min T(r_j) - T(r_i) {:.3e} s; ", c.name, band.lower,
                              band.upper, min_gap);
    }
    detail.resize(detail.size() - 2);
    return {ok, detail};
}

const ImplicitBoundary& tank()
{
    static const ImplicitBoundary b = [] {
        const auto on = racetrack_points();
        const InteriorConstraint c{{0.0, 0.0}, -1.0};
        return fit_implicit_boundary(on, std::span(&c, 1));
    }();
    return b;
}

Vec2 central_gradient(const std::function<double(Vec2)>& fn, Vec2 q, double h = 1e-6)
{
    return {(fn(q + Vec2{h, 0.0}) - fn(q - Vec2{h, 0.0})) / (2 * h),
            (fn(q + Vec2{0.0, h}) - fn(q - Vec2{0.0, h})) / (2 * h)};
}

Verdict gradient_checks()
{
    const ImplicitBoundary& b = tank();
    const ShapeNavParams nav{default_workspace_radius(4.5, 3.0)};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ux(b.bounds_min().x1, b.bounds_max().x1);
    std::uniform_real_distribution<double> uy(b.bounds_min().x2, b.bounds_max().x2);
    double worst_gamma = 0.0, worst_phi = 0.0;
    for (int n = 0; n < 100;) {
        const Vec2 q{ux(rng), uy(rng)};
        if (!(b.gamma(q) < 0.0)) continue;
        ++n;
        const Vec2 ga = b.gradient(q);
        const Vec2 gf = central_gradient([&](Vec2 x) { return b.gamma(x); }, q);
        worst_gamma = std::max(worst_gamma, norm(ga - gf) / norm(ga));
        const Vec2 pa = shape_navigation_gradient(b, nav, q);
        const Vec2 pf = central_gradient([&](Vec2 x) { return shape_navigation(b, nav, x); }, q);
        worst_phi = std::max(worst_phi, norm(pa - pf) / norm(pa));
    }
    return {worst_gamma < 1e-5 && worst_phi < 1e-5,
            fmt::format("worst relative error: grad gamma {:.2e}, grad phi {:.2e}", worst_gamma, worst_phi)};
}

Verdict gain_recovery()
{
    const ImplicitBoundary& b = tank();
    const ShapeNavParams nav{default_workspace_radius(4.5, 3.0)};
    const PotentialFieldParams truth{0.3, 1.2};
    auto rel = [](double x, double ref) { return std::abs(x - ref) / std::abs(ref); };

    const GainFit clean = fit_gains(synth_samples(b, nav, truth, 50, 1), b, nav);
    const double clean_err = std::max(rel(clean.K_r, truth.K_r), rel(clean.K_theta, truth.K_theta));

    const GainFit noisy = fit_gains(synth_samples(b, nav, truth, 50, 1, 0.05), b, nav);
    const double err_r = rel(noisy.K_r, truth.K_r), err_t = rel(noisy.K_theta, truth.K_theta);

    return {clean_err < 1e-8 && err_r < 0.10 && err_t < 0.10,
            fmt::format("noiseless rel error {:.1e}; 5% noise, 50 samples, seed 1: K_r {:.4f} ({:.1f}%), "
                        "K_theta {:.4f} ({:.1f}%)",
                        clean_err, noisy.K_r, 100 * err_r, noisy.K_theta, 100 * err_t)};
}

double one_revolution_error(double dt)
{
    const VortexFlow rigid({OmegaProfile::constant(1.0), 0.0});
    IdleController idle;
    IntegrateOptions o;
    o.dt = dt;
    o.t_end = 2.0 * pi;
    const Trajectory tr = integrate(rigid, idle, {1.0, 0.0}, o);
    return norm(tr.states.back().pos - Vec2{1.0, 0.0});
}

Verdict integrator_order()
{
    const double coarse = one_revolution_error(2.0 * pi / 64), fine = one_revolution_error(2.0 * pi / 128);
    return {coarse / fine >= 12.0,
            fmt::format("error {:.3e} -> {:.3e} m, ratio {:.2f}", coarse, fine, coarse / fine)};
}

Verdict round_trip()
{
    const ImplicitBoundary& b = tank();
    const CircleMapParams p{{0.0, 0.0}, 1.5, default_workspace_radius(4.5, 3.0)};
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ur(0.0, 1.5), ut(0.0, 2.0 * pi);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double r = ur(rng), th = ut(rng);
        const Polar back = circle_map(p, b, inverse_circle_map(p, b, r, th));
        const double dr = std::abs(back.r - r);
        const double arc = r * std::abs(std::remainder(back.theta - th, 2.0 * pi));
        worst = std::max({worst, dr, arc});
    }
    return {worst < 1e-6, fmt::format("worst deviation {:.2e} m", worst)};
}

} // namespace

int main()
{
    struct Criterion {
        const char* name;
        Verdict (*run)();
    };
    const Criterion criteria[] = {
        {"1 period bounds in a 1/r vortex", theorem_suite},
        {"2 racetrack patrol replication", racetrack_replication},
        {"3 control effort vs waypoints", effort_comparison},
        {"4 period monotonicity", period_monotonicity},
        {"5 gradient checks", gradient_checks},
        {"6 gain fit recovery", gain_recovery},
        {"7 integrator order", integrator_order},
        {"8 circle map round trip", round_trip},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, fmt::format("threw: {}", e.what())};
        }
        failed += v.pass ? 0 : 1;
        fmt::print("{} {}: {}\n", v.pass ? "PASS" : "FAIL", c.name, v.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", std::size(criteria) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
