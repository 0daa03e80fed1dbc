#include "gyre/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gyre/errors.hpp"
#include "gyre/fitting.hpp"

namespace gyre {

namespace {

using boost::property_tree::ptree;

// Reads typed values out of one section and remembers which keys were consumed.
class Section {
public:
    Section(std::string name, const ptree* tree) : name_(std::move(name)), tree_(tree) {}

    template <typename T>
    void get(const std::string& key, T& out)
    {
        if (auto v = raw(key)) out = convert<T>(key, *v);
    }

    template <typename T>
    void get(const std::string& key, std::optional<T>& out)
    {
        if (auto v = raw(key)) out = convert<T>(key, *v);
    }

    std::optional<std::string> raw(const std::string& key)
    {
        used_.insert(key);
        if (!tree_) return std::nullopt;
        const auto child = tree_->get_child_optional(ptree::path_type(key, '\0'));
        if (!child) return std::nullopt;
        const std::string v = child->data();
        if (v.empty()) return std::nullopt;
        return v;
    }

    void reject_unknown() const
    {
        if (!tree_) return;
        for (const auto& [key, value] : *tree_)
            if (!used_.contains(key)) throw ConfigError("unknown key '" + key + "' in section [" + name_ + "]");
    }

private:
    template <typename T>
    T convert(const std::string& key, const std::string& text) const
    {
        std::istringstream ss(text);
        T value{};
        if constexpr (std::is_same_v<T, bool>) {
            if (text == "true" || text == "yes" || text == "1") return true;
            if (text == "false" || text == "no" || text == "0") return false;
            throw ConfigError("[" + name_ + "] " + key + ": expected true/false, got '" + text + "'");
        } else if constexpr (std::is_same_v<T, std::string>) {
            return text;
        } else {
            std::string rest;
            if (!(ss >> value) || (ss >> rest))
                throw ConfigError("[" + name_ + "] " + key + ": cannot parse '" + text + "'");
            return value;
        }
    }

    std::string name_;
    const ptree* tree_;
    std::set<std::string> used_;
};

std::string strip_comments(std::istream& in)
{
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
        out << line << '\n';
    }
    return out.str();
}

LatchDirection parse_latch(const std::string& s)
{
    if (s == "inward") return LatchDirection::inward;
    if (s == "outward") return LatchDirection::outward;
    throw ConfigError("latch must be 'inward' or 'outward', got '" + s + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

ControllerSpec read_controller(Section& sec, ControllerSpec c)
{
    sec.get("type", c.type);
    sec.get("u_max", c.u_max);
    sec.get("v_lo", c.v_lo);
    sec.get("v_hi", c.v_hi);
    if (auto latch = sec.raw("latch")) c.latch = parse_latch(*latch);
    sec.get("capture_radius", c.capture_radius);
    sec.get("waypoint_spacing", c.waypoint_spacing);
    sec.get("waypoint_radius", c.waypoint_radius);
    static const std::set<std::string> types{"none", "bang_bang", "hysteresis", "waypoint"};
    if (!types.contains(c.type)) throw ConfigError("unknown controller type '" + c.type + "'");
    return c;
}

} // namespace

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir)
{
    ptree root;
    try {
        std::istringstream text(strip_comments(in));
        boost::property_tree::ini_parser::read_ini(text, root);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }

    std::map<std::string, const ptree*> sections;
    for (const auto& [name, tree] : root) {
        if (tree.empty() && !tree.data().empty())
            throw ConfigError("key '" + name + "' appears outside any section");
        sections[name] = &tree;
    }
    auto section = [&](const std::string& name) {
        const auto it = sections.find(name);
        return Section(name, it == sections.end() ? nullptr : it->second);
    };

    ExperimentConfig cfg;
    std::set<std::string> known{"flow", "region", "controller", "integration", "band", "checks", "run",
                                "boundary", "compare"};

    {
        Section s = section("flow");
        auto& f = cfg.flow;
        s.get("model", f.model);
        s.get("omega_profile", f.omega_profile);
        s.get("omega_c", f.omega_c);
        s.get("omega_r0", f.omega_r0);
        s.get("mu", f.mu);
        s.get("A", f.A);
        s.get("s", f.s);
        std::optional<double> cx, cy;
        s.get("center_x", cx);
        s.get("center_y", cy);
        if (cx.has_value() != cy.has_value()) throw ConfigError("[flow] center_x and center_y go together");
        if (cx) f.center = Vec2{*cx, *cy};
        s.get("tank_length", f.tank_length);
        s.get("tank_width", f.tank_width);
        s.get("boundary_points", f.boundary_points);
        s.get("interior_value", f.interior_value);
        if (auto p = s.raw("boundary_file")) f.boundary_file = resolve(base_dir, *p);
        s.get("R0", f.R0);
        s.get("r_max", f.r_max);
        s.get("K_r", f.K_r);
        s.get("K_theta", f.K_theta);
        if (auto p = s.raw("samples_file")) f.samples_file = resolve(base_dir, *p);
        s.reject_unknown();
        static const std::set<std::string> models{"vortex", "double_gyre", "racetrack", "still"};
        if (!models.contains(f.model)) throw ConfigError("unknown flow model '" + f.model + "'");
    }
    {
        Section s = section("region");
        s.get("r_lower", cfg.region.r_lower);
        s.get("r_upper", cfg.region.r_upper);
        s.get("T_lower", cfg.region.T_lower);
        s.get("T_upper", cfg.region.T_upper);
        s.get("epsilon", cfg.region.epsilon);
        s.reject_unknown();
    }
    {
        Section s = section("controller");
        cfg.controller = read_controller(s, ControllerSpec{});
        cfg.controller.name = cfg.controller.type;
        s.reject_unknown();
    }
    {
        Section s = section("integration");
        auto& it = cfg.integration;
        s.get("dt", it.dt);
        s.get("t_end", it.t_end);
        if (auto m = s.raw("model")) {
            if (*m == "kinematic")
                it.model = RobotModel::kinematic;
            else if (*m == "inertial")
                it.model = RobotModel::inertial;
            else
                throw ConfigError("[integration] model must be kinematic or inertial");
        }
        s.get("tau_m", it.tau_m);
        s.get("mean_thrust", it.mean_thrust);
        s.get("top_speed", it.top_speed);
        s.get("start_r", it.start_r);
        s.get("start_theta", it.start_theta);
        s.get("workspace_radius", it.workspace_radius);
        s.reject_unknown();
        if (!(it.dt > 0.0)) throw ConfigError("[integration] dt must be positive");
        if (!(it.t_end > it.dt)) throw ConfigError("[integration] t_end must exceed dt");
    }
    {
        Section s = section("band");
        s.get("r_min", cfg.band.r_min);
        s.get("r_max", cfg.band.r_max);
        s.get("theta_samples", cfg.band.theta_samples);
        s.get("r_samples", cfg.band.r_samples);
        s.reject_unknown();
    }
    {
        Section s = section("checks");
        s.get("period_bounds", cfg.checks.period_bounds);
        s.get("slack", cfg.checks.slack);
        s.reject_unknown();
    }
    {
        Section s = section("run");
        s.get("seed", cfg.run.seed);
        s.get("seeds", cfg.run.seeds);
        s.get("decimation", cfg.run.decimation);
        s.get("randomize_start", cfg.run.randomize_start);
        s.reject_unknown();
        if (cfg.run.seeds < 1) throw ConfigError("[run] seeds must be at least 1");
        if (cfg.run.decimation < 1) throw ConfigError("[run] decimation must be at least 1");
    }
    {
        Section s = section("boundary");
        s.get("nx", cfg.grid.nx);
        s.get("ny", cfg.grid.ny);
        s.get("margin", cfg.grid.margin);
        s.reject_unknown();
    }
    {
        Section s = section("compare");
        std::string list;
        s.get("controllers", list);
        s.reject_unknown();
        std::istringstream ss(list);
        for (std::string name; std::getline(ss, name, ',');) {
            name.erase(0, name.find_first_not_of(" \t"));
            name.erase(name.find_last_not_of(" \t") + 1);
            if (name.empty()) continue;
            const std::string sec_name = "controller:" + name;
            if (!sections.contains(sec_name)) throw ConfigError("compare lists '" + name + "' but [" + sec_name + "] is missing");
            Section cs = section(sec_name);
            ControllerSpec spec = read_controller(cs, cfg.controller);
            spec.name = name;
            cs.reject_unknown();
            cfg.compare.push_back(spec);
            known.insert(sec_name);
        }
    }
    for (const auto& [name, tree] : sections)
        if (!known.contains(name)) throw ConfigError("unknown section [" + name + "]");
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, path.parent_path());
}

std::shared_ptr<const ImplicitBoundary> build_boundary(const FlowSpec& spec)
{
    const Vec2 g = spec.center.value_or(Vec2{});
    if (!spec.boundary_file.empty()) {
        const BoundaryConstraints c = load_boundary_constraints(spec.boundary_file);
        return std::make_shared<const ImplicitBoundary>(fit_implicit_boundary(c.on_points, c.interior));
    }
    std::vector<Vec2> pts = racetrack_points(spec.tank_length, spec.tank_width, spec.boundary_points);
    for (Vec2& p : pts) p += g;
    const InteriorConstraint center{g, spec.interior_value};
    return std::make_shared<const ImplicitBoundary>(fit_implicit_boundary(pts, std::span(&center, 1)));
}

BuiltFlow build_flow(const FlowSpec& spec)
{
    BuiltFlow out;
    if (spec.model == "vortex") {
        VortexParams p;
        if (spec.omega_profile == "inverse")
            p.omega_profile = OmegaProfile::inverse(spec.omega_c, spec.omega_r0);
        else if (spec.omega_profile == "constant")
            p.omega_profile = OmegaProfile::constant(spec.omega_c);
        else
            throw ConfigError("unknown omega_profile '" + spec.omega_profile + "'");
        p.mu = spec.mu;
        if (spec.center && !(*spec.center == Vec2{})) throw ConfigError("the vortex model is centered at the origin");
        out.field = std::make_shared<const VortexFlow>(p);
    } else if (spec.model == "double_gyre") {
        out.field = std::make_shared<const DoubleGyreFlow>(DoubleGyreParams{spec.A, spec.s, spec.mu}, spec.center);
    } else if (spec.model == "still") {
        out.field = std::make_shared<const StillWater>(spec.center.value_or(Vec2{}));
    } else if (spec.model == "racetrack") {
        out.boundary = build_boundary(spec);
        ShapeNavParams nav{spec.R0.value_or(default_workspace_radius(spec.tank_length, spec.tank_width))};
        PotentialFieldParams gains{spec.K_r, spec.K_theta};
        if (!spec.samples_file.empty()) {
            const SampleSet set = load_samples(spec.samples_file, *out.boundary);
            out.notes.insert(out.notes.end(), set.warnings.begin(), set.warnings.end());
            const GainFit fit = fit_gains(set.samples, *out.boundary, nav);
            gains = {fit.K_r, fit.K_theta};
            out.notes.push_back("gains fitted from " + std::to_string(fit.sample_count) +
                                " samples, residual rms " + std::to_string(fit.residual_rms) + " m/s");
        }
        CircleMapParams map{spec.center.value_or(Vec2{}), spec.r_max, nav.R0};
        out.field = std::make_shared<const PotentialFieldFlow>(out.boundary, gains, nav, map);
    } else {
        throw ConfigError("unknown flow model '" + spec.model + "'");
    }
    return out;
}

AnnulusRegion resolve_region(const RegionSpec& spec, const FlowField& f, std::optional<RadiusInterval> band)
{
    const bool by_radius = spec.r_lower || spec.r_upper;
    const bool by_period = spec.T_lower || spec.T_upper;
    if (by_radius == by_period)
        throw ConfigError("[region] needs either r_lower/r_upper or T_lower/T_upper");
    if (by_radius) {
        if (!spec.r_lower || !spec.r_upper) throw ConfigError("[region] needs both r_lower and r_upper");
        return make_region(*spec.r_lower, *spec.r_upper, f.center(), spec.epsilon);
    }
    if (!spec.T_lower || !spec.T_upper) throw ConfigError("[region] needs both T_lower and T_upper");
    if (!band || band->empty()) throw ConfigError("period-specified region needs a non-empty monotone band");
    if (!(*spec.T_upper > *spec.T_lower)) throw ConfigError("[region] T_upper must exceed T_lower");
    try {
        const double lo = radius_for_period(f, *spec.T_lower, *band);
        const double hi = radius_for_period(f, *spec.T_upper, *band);
        return make_region(lo, hi, f.center(), spec.epsilon);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("[region] ") + e.what());
    }
}

std::unique_ptr<Controller> build_controller(const ControllerSpec& spec, const AnnulusRegion& region,
                                             const FlowField& f, std::uint64_t seed)
{
    if (spec.type == "none") return std::make_unique<IdleController>();
    BangBangConfig cfg;
    cfg.region = region;
    cfg.u_max = spec.u_max;
    cfg.latch = spec.latch;
    if (spec.type == "bang_bang") return std::make_unique<BangBangController>(cfg);
    if (spec.type == "hysteresis") {
        cfg.mode = BangBangMode::hysteresis;
        cfg.speed_range = SpeedRange{spec.v_lo, spec.v_hi};
        return std::make_unique<HysteresisController>(cfg, seed);
    }
    if (spec.type == "waypoint") {
        const double r = spec.waypoint_radius.value_or(0.5 * (region.r_lower + region.r_upper));
        return std::make_unique<WaypointController>(waypoints_on_orbit(f, r, spec.waypoint_spacing),
                                                    spec.capture_radius, spec.u_max);
    }
    throw ConfigError("unknown controller type '" + spec.type + "'");
}

IntegrateOptions integrate_options(const IntegrationSpec& spec)
{
    IntegrateOptions o;
    o.dt = spec.dt;
    o.t_end = spec.t_end;
    o.model = spec.model;
    o.inertial.thruster = make_pendulum_params(15.0, two_pi, spec.mean_thrust);
    o.inertial.drag = linear_drag(spec.mean_thrust, spec.top_speed);
    o.inertial.tau_m = spec.tau_m;
    o.workspace_radius = spec.workspace_radius;
    return o;
}

} // namespace gyre
