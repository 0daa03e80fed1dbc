#include "gyre/experiment.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "gyre/errors.hpp"

namespace gyre {

namespace fs = std::filesystem;

namespace {

// Excursions beyond the band smaller than this are one-step overshoot, not a region exit.
constexpr double exit_tolerance = 0.01;  // [m]

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

std::string num(double v) { return fmt::format("{:.10g}", v); }

void write_text(const fs::path& path, const std::string& text) { open_out(path) << text; }

void require_region_in_band(const RadiusInterval& band, const AnnulusRegion& region)
{
    if (band.empty()) throw ConfigError("flow has no monotone band over the configured search interval");
    if (!band.contains(region.r_lower, region.r_upper))
        throw ConfigError(fmt::format("region ({}, {}) m leaves the monotone band ({}, {}) m; "
                                      "period bounds do not apply there",
                                      num(region.r_lower), num(region.r_upper), num(band.lower), num(band.upper)));
}

Vec2 default_start(const ExperimentConfig& cfg, const Scenario& sc)
{
    const double r = cfg.integration.start_r.value_or(0.5 * (sc.region.r_lower + sc.region.r_upper));
    return sc.flow.field->from_polar({r, cfg.integration.start_theta});
}

} // namespace

MeanStd mean_std(const std::vector<double>& values)
{
    if (values.empty()) return {};
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - mean) * (v - mean);
    return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

bool RunReport::ok() const
{
    return !abort_reason && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

RunReport summarize(const Trajectory& traj, const AnnulusRegion& region, std::string controller)
{
    RunReport rep;
    rep.controller = std::move(controller);
    rep.region = region;
    rep.cycles = detect_cycles(traj);
    rep.duration = traj.duration();
    rep.abort_reason = traj.abort_reason;

    std::vector<double> periods, efforts;
    for (const auto& c : rep.cycles) {
        periods.push_back(c.T);
        efforts.push_back(c.effort_fraction);
    }
    rep.period = mean_std(periods);
    rep.effort = mean_std(efforts);
    if (traj.size() >= 2 && rep.duration > 0.0) rep.effort_overall = control_effort(traj);

    std::size_t exits = 0;
    std::optional<double> first_exit;
    bool first_outward = false;
    bool inside = false;
    double max_over = 0.0, max_under = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const double r = traj.polar[i].r;
        max_over = std::max(max_over, r - region.r_upper);
        max_under = std::max(max_under, region.r_lower - r);
        const bool in = r >= region.r_lower - exit_tolerance && r <= region.r_upper + exit_tolerance;
        if (inside && !in) {
            ++exits;
            if (!first_exit) {
                first_exit = traj.states[i].t;
                first_outward = r > region.r_upper;
            }
        }
        inside = in;
    }
    if (!traj.polar.empty()) {
        const double r0 = traj.polar.front().r;
        if (r0 < region.r_lower - exit_tolerance || r0 > region.r_upper + exit_tolerance)
            rep.notes.push_back("started outside the region");
    }
    if (exits > 0)
        rep.notes.push_back(fmt::format("region exit: left the band {} time(s), first at t={} s ({})", exits,
                                        num(*first_exit), first_outward ? "outward" : "inward"));
    rep.notes.push_back(fmt::format("largest excursion beyond r_upper {} m, below r_lower {} m", num(max_over),
                                    num(max_under)));
    if (rep.abort_reason) rep.notes.push_back("aborted: " + *rep.abort_reason);
    return rep;
}

void check_period_bounds(RunReport& report, double lo, double hi, double slack)
{
    report.period_bounds = {lo, hi};
    CheckResult check{"period_bounds", true, {}};
    std::size_t bad = 0;
    double tmin = std::numeric_limits<double>::infinity(), tmax = -tmin;
    for (const auto& c : report.cycles) {
        tmin = std::min(tmin, c.T);
        tmax = std::max(tmax, c.T);
        if (!(c.T > lo - slack && c.T < hi + slack)) ++bad;
    }
    if (report.cycles.empty()) {
        check.passed = false;
        check.detail = "no complete cycles";
    } else {
        check.passed = bad == 0;
        check.detail = fmt::format("{} of {} cycles outside ({}, {}) s; observed [{}, {}] s", bad,
                                   report.cycles.size(), num(lo - slack), num(hi + slack), num(tmin), num(tmax));
    }
    report.checks.push_back(check);
}

Scenario prepare_scenario(const ExperimentConfig& cfg, bool need_band)
{
    Scenario sc;
    sc.flow = build_flow(cfg.flow);
    const bool by_period = cfg.region.T_lower || cfg.region.T_upper;
    if (need_band || by_period || cfg.checks.period_bounds)
        sc.band = monotone_band(*sc.flow.field, cfg.band.theta_samples, cfg.band.r_samples,
                                {cfg.band.r_min, cfg.band.r_max});
    sc.region = resolve_region(cfg.region, *sc.flow.field, sc.band);
    return sc;
}

SimulationOutcome run_simulation(const ExperimentConfig& cfg, const Scenario& sc, const ControllerSpec& controller,
                                 std::uint64_t seed, std::optional<Vec2> start)
{
    const FlowField& f = *sc.flow.field;
    auto ctrl = build_controller(controller, sc.region, f, seed);
    const Vec2 x0 = start.value_or(default_start(cfg, sc));

    SimulationOutcome out;
    out.trajectory = integrate(f, *ctrl, x0, integrate_options(cfg.integration));
    out.trajectory.meta = {{"controller", controller.name},
                           {"flow", cfg.flow.model},
                           {"seed", std::to_string(seed)},
                           {"dt", num(cfg.integration.dt)},
                           {"t_end", num(cfg.integration.t_end)}};
    out.report = summarize(out.trajectory, sc.region, controller.name);
    out.report.notes.insert(out.report.notes.begin(), sc.flow.notes.begin(), sc.flow.notes.end());
    if (cfg.checks.period_bounds) {
        require_region_in_band(sc.band.value_or(RadiusInterval{}), sc.region);
        check_period_bounds(out.report, orbit_period(f, sc.region.r_lower), orbit_period(f, sc.region.r_upper),
                            cfg.checks.slack);
    }
    return out;
}

TheoremOutcome verify_theorem(const ExperimentConfig& cfg)
{
    const Scenario sc = prepare_scenario(cfg, true);
    require_region_in_band(*sc.band, sc.region);
    const FlowField& f = *sc.flow.field;

    TheoremOutcome res;
    res.band = *sc.band;
    res.region = sc.region;
    res.T_lower = orbit_period(f, sc.region.r_lower);
    res.T_upper = orbit_period(f, sc.region.r_upper);
    res.slack = cfg.checks.slack;
    res.seeds.resize(static_cast<std::size_t>(cfg.run.seeds));

    ExperimentConfig run_cfg = cfg;
    run_cfg.checks.period_bounds = false;  // checked below against the shared bounds

    auto run_one = [&](std::size_t i) {
        const std::uint64_t seed = cfg.run.seed + i;
        std::optional<Vec2> start;
        if (cfg.run.randomize_start) {
            std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
            std::uniform_real_distribution<double> ur(sc.region.r_lower, sc.region.r_upper), ut(0.0, two_pi);
            const double r = ur(rng);
            start = f.from_polar({r, ut(rng)});
        }
        SimulationOutcome sim = run_simulation(run_cfg, sc, cfg.controller, seed, start);
        check_period_bounds(sim.report, res.T_lower, res.T_upper, res.slack);

        SeedResult& sr = res.seeds[i];
        sr.seed = seed;
        sr.cycles = sim.report.cycles.size();
        sr.abort_reason = sim.report.abort_reason;
        sr.passed = sim.report.ok();
        if (!sim.report.cycles.empty()) {
            const auto [mn, mx] = std::minmax_element(sim.report.cycles.begin(), sim.report.cycles.end(),
                                                      [](const CycleRecord& a, const CycleRecord& b) { return a.T < b.T; });
            sr.min_period = mn->T;
            sr.max_period = mx->T;
        }
    };

    // one trajectory per worker in memory at a time
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, res.seeds.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next++) < res.seeds.size();) {
                try {
                    run_one(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    res.passed = true;
    res.min_period = std::numeric_limits<double>::infinity();
    res.max_period = -res.min_period;
    for (const auto& s : res.seeds) {
        res.passed = res.passed && s.passed;
        res.total_cycles += s.cycles;
        if (s.cycles) {
            res.min_period = std::min(res.min_period, s.min_period);
            res.max_period = std::max(res.max_period, s.max_period);
        }
    }
    return res;
}

std::vector<CompareRow> compare_controllers(const ExperimentConfig& cfg)
{
    if (cfg.compare.size() < 2) throw ConfigError("[compare] needs at least two controllers");
    const Scenario sc = prepare_scenario(cfg, false);
    std::vector<CompareRow> rows;
    for (const auto& spec : cfg.compare) {
        ExperimentConfig run_cfg = cfg;
        run_cfg.checks.period_bounds = false;
        const SimulationOutcome sim = run_simulation(run_cfg, sc, spec, cfg.run.seed);
        rows.push_back({spec.name, spec.type, sim.report.cycles.size(), sim.report.period, sim.report.effort,
                        sim.report.effort_overall, sim.report.abort_reason});
    }
    return rows;
}

void write_trajectory_csv(const fs::path& path, const Trajectory& traj, int decimation)
{
    auto out = open_out(path);
    out << "t,x1,x2,r,theta,u,theta_r,active\n";
    const auto step = static_cast<std::size_t>(std::max(1, decimation));
    for (std::size_t i = 0; i < traj.size(); i += step) {
        const auto& s = traj.states[i];
        const auto& c = traj.controls[i];
        out << fmt::format("{},{},{},{},{},{},{},{}\n", num(s.t), num(s.pos.x1), num(s.pos.x2), num(traj.polar[i].r),
                           num(traj.polar[i].theta), num(c.u), num(c.theta_r), c.active() ? 1 : 0);
    }
}

void write_cycles_csv(const fs::path& path, const std::vector<CycleRecord>& cycles)
{
    auto out = open_out(path);
    out << "cycle,t_start,t_end,period,r_min,r_max,effort,start_index,end_index\n";
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        const auto& c = cycles[i];
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", i + 1, num(c.t_start), num(c.t_end), num(c.T),
                           num(c.r_min), num(c.r_max), num(c.effort_fraction), c.start_index, c.end_index);
    }
}

void write_report_csv(const fs::path& path, const RunReport& r)
{
    auto out = open_out(path);
    out << "key,value\n";
    out << "controller," << r.controller << '\n';
    out << "r_lower," << num(r.region.r_lower) << '\n';
    out << "r_upper," << num(r.region.r_upper) << '\n';
    if (r.period_bounds) {
        out << "T_lower," << num(r.period_bounds->first) << '\n';
        out << "T_upper," << num(r.period_bounds->second) << '\n';
    }
    out << "duration," << num(r.duration) << '\n';
    out << "cycles," << r.cycles.size() << '\n';
    out << "period_mean," << num(r.period.mean) << '\n';
    out << "period_std," << num(r.period.std) << '\n';
    out << "effort_mean," << num(r.effort.mean) << '\n';
    out << "effort_std," << num(r.effort.std) << '\n';
    out << "effort_overall," << num(r.effort_overall) << '\n';
    for (const auto& c : r.checks) out << "check_" << c.name << ',' << (c.passed ? "PASS" : "FAIL") << '\n';
    out << "aborted," << (r.abort_reason ? 1 : 0) << '\n';
    out << "status," << (r.ok() ? "PASS" : "FAIL") << '\n';
}

std::string format_report(const RunReport& r)
{
    std::string s;
    s += fmt::format("controller: {}\n", r.controller);
    s += fmt::format("region: r in ({}, {}) m\n", num(r.region.r_lower), num(r.region.r_upper));
    if (r.period_bounds)
        s += fmt::format("boundary-orbit periods: ({}, {}) s\n", num(r.period_bounds->first),
                         num(r.period_bounds->second));
    s += fmt::format("duration: {} s\n", num(r.duration));
    s += fmt::format("cycles: {}\n", r.cycles.size());
    if (!r.cycles.empty()) {
        s += fmt::format("period: {:.3f} +- {:.3f} s\n", r.period.mean, r.period.std);
        s += fmt::format("effort per cycle: {:.3f} +- {:.3f}\n", r.effort.mean, r.effort.std);
    }
    s += fmt::format("effort overall: {:.4f}\n", r.effort_overall);
    for (const auto& c : r.checks) s += fmt::format("check {}: {} ({})\n", c.name, c.passed ? "PASS" : "FAIL", c.detail);
    for (const auto& n : r.notes) s += "note: " + n + "\n";
    s += fmt::format("status: {}\n", r.ok() ? "PASS" : "FAIL");
    return s;
}

int cmd_simulate(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& log)
{
    const Scenario sc = prepare_scenario(cfg, cfg.checks.period_bounds);
    if (cfg.checks.period_bounds) require_region_in_band(*sc.band, sc.region);
    const SimulationOutcome sim = run_simulation(cfg, sc, cfg.controller, cfg.run.seed);

    fs::create_directories(out_dir);
    write_trajectory_csv(out_dir / "trajectory.csv", sim.trajectory, cfg.run.decimation);
    write_cycles_csv(out_dir / "cycles.csv", sim.report.cycles);
    write_report_csv(out_dir / "report.csv", sim.report);
    const std::string text = format_report(sim.report);
    write_text(out_dir / "report.txt", text);
    log << text;
    return sim.report.ok() ? 0 : 1;
}

int cmd_verify_theorem(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& log)
{
    const TheoremOutcome res = verify_theorem(cfg);
    fs::create_directories(out_dir);
    {
        auto out = open_out(out_dir / "theorem.csv");
        out << "seed,cycles,min_period,max_period,T_lower,T_upper,passed\n";
        for (const auto& s : res.seeds)
            out << fmt::format("{},{},{},{},{},{},{}\n", s.seed, s.cycles, num(s.min_period), num(s.max_period),
                               num(res.T_lower), num(res.T_upper), s.passed ? 1 : 0);
    }
    std::string text;
    text += fmt::format("monotone band: ({}, {}) m\n", num(res.band.lower), num(res.band.upper));
    text += fmt::format("region: ({}, {}) m\n", num(res.region.r_lower), num(res.region.r_upper));
    text += fmt::format("boundary-orbit periods: T_lower={} s T_upper={} s (slack {} s)\n", num(res.T_lower),
                        num(res.T_upper), num(res.slack));
    text += fmt::format("runs: {}, complete cycles: {}\n", res.seeds.size(), res.total_cycles);
    if (res.total_cycles)
        text += fmt::format("observed periods: [{}, {}] s\n", num(res.min_period), num(res.max_period));
    for (const auto& s : res.seeds)
        if (!s.passed)
            text += fmt::format("seed {} FAILED ({} cycles, [{}, {}] s){}\n", s.seed, s.cycles, num(s.min_period),
                                num(s.max_period), s.abort_reason ? "; " + *s.abort_reason : "");
    text += fmt::format("status: {}\n", res.passed ? "PASS" : "FAIL");
    write_text(out_dir / "theorem.txt", text);
    log << text;
    return res.passed ? 0 : 1;
}

int cmd_compare(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& log)
{
    const auto rows = compare_controllers(cfg);
    fs::create_directories(out_dir);
    std::string text = fmt::format("{:<14} {:<11} {:>7} {:>20} {:>18} {:>9}\n", "controller", "type", "cycles",
                                   "period [s]", "effort/cycle", "overall");
    bool ok = true;
    {
        auto out = open_out(out_dir / "compare.csv");
        out << "controller,type,cycles,period_mean,period_std,effort_mean,effort_std,effort_overall,aborted\n";
        for (const auto& r : rows) {
            out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.name, r.type, r.cycles, num(r.period.mean),
                               num(r.period.std), num(r.effort.mean), num(r.effort.std), num(r.effort_overall),
                               r.abort_reason ? 1 : 0);
            text += fmt::format("{:<14} {:<11} {:>7} {:>11.3f} +- {:<6.3f} {:>8.3f} +- {:<5.3f} {:>9.4f}{}\n", r.name,
                                r.type, r.cycles, r.period.mean, r.period.std, r.effort.mean, r.effort.std,
                                r.effort_overall, r.abort_reason ? "  (aborted)" : "");
            ok = ok && !r.abort_reason;
        }
    }
    write_text(out_dir / "compare.txt", text);
    log << text;
    return ok ? 0 : 1;
}

int cmd_fit(const ExperimentConfig& cfg, const fs::path& samples, const fs::path& out_dir, std::ostream& log)
{
    const auto boundary = build_boundary(cfg.flow);
    const ShapeNavParams nav{cfg.flow.R0.value_or(default_workspace_radius(cfg.flow.tank_length, cfg.flow.tank_width))};
    const SampleSet set = load_samples(samples, *boundary);
    for (const auto& w : set.warnings) log << "warning: " << w << '\n';
    const GainFit fit = fit_gains(set.samples, *boundary, nav);

    fs::create_directories(out_dir);
    auto out = open_out(out_dir / "fit.csv");
    out << "K_r,K_theta,residual_rms,sample_count\n";
    out << fmt::format("{:.17g},{:.17g},{:.17g},{}\n", fit.K_r, fit.K_theta, fit.residual_rms, fit.sample_count);
    log << fmt::format("K_r = {:.10g}\nK_theta = {:.10g}\nresidual rms = {:.6g} m/s\nsamples = {} ({} rejected)\n",
                       fit.K_r, fit.K_theta, fit.residual_rms, fit.sample_count, set.warnings.size());
    return 0;
}

int cmd_boundary(const ExperimentConfig& cfg, const fs::path& out_dir, std::ostream& log)
{
    const auto b = build_boundary(cfg.flow);
    fs::create_directories(out_dir);
    const Vec2 lo = b->bounds_min() - Vec2{cfg.grid.margin, cfg.grid.margin};
    const Vec2 hi = b->bounds_max() + Vec2{cfg.grid.margin, cfg.grid.margin};
    if (cfg.grid.nx < 2 || cfg.grid.ny < 2) throw ConfigError("[boundary] grid needs nx, ny >= 2");
    {
        auto out = open_out(out_dir / "gamma.csv");
        out << "x1,x2,gamma\n";
        for (int j = 0; j < cfg.grid.ny; ++j)
            for (int i = 0; i < cfg.grid.nx; ++i) {
                const Vec2 q{lo.x1 + (hi.x1 - lo.x1) * i / (cfg.grid.nx - 1),
                             lo.x2 + (hi.x2 - lo.x2) * j / (cfg.grid.ny - 1)};
                out << fmt::format("{},{},{}\n", num(q.x1), num(q.x2), num(b->gamma(q)));
            }
    }
    const CircleMapParams map{cfg.flow.center.value_or(Vec2{}), cfg.flow.r_max,
                              cfg.flow.R0.value_or(default_workspace_radius(cfg.flow.tank_length, cfg.flow.tank_width))};
    const auto violations = ray_monotonicity_violations(map, *b);
    log << fmt::format("boundary fitted through {} constraint points\n", b->centers().size());
    log << fmt::format("gamma at the gyre center: {}\n", num(b->gamma(map.g)));
    if (violations.empty()) {
        log << "circle map is nondecreasing along all sampled rays\n";
    } else {
        log << fmt::format("warning: circle map decreases at {} sampled ray points\n", violations.size());
        auto out = open_out(out_dir / "ray_violations.csv");
        out << "theta,distance,r_before,r_after\n";
        for (const auto& v : violations)
            out << fmt::format("{},{},{},{}\n", num(v.theta), num(v.distance), num(v.r_before), num(v.r_after));
    }
    return 0;
}

} // namespace gyre
