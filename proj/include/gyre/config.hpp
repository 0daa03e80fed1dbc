#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gyre/control.hpp"
#include "gyre/dynamics.hpp"
#include "gyre/flow.hpp"
#include "gyre/geometry.hpp"

namespace gyre {

struct FlowSpec {
    std::string model = "vortex";  ///< vortex | double_gyre | racetrack | still

    // vortex
    std::string omega_profile = "inverse";  ///< inverse: c/(r + r0) | constant: c
    double omega_c = 1.0;
    double omega_r0 = 0.0;
    double mu = 0.0;  ///< also the double-gyre dissipation

    // double gyre
    double A = 0.1;
    double s = 1.0;

    std::optional<Vec2> center;  ///< gyre center; model default when unset

    // racetrack
    double tank_length = 4.5;
    double tank_width = 3.0;
    int boundary_points = 64;
    double interior_value = -1.0;  ///< gamma prescribed at the gyre center
    std::filesystem::path boundary_file;
    std::optional<double> R0;  ///< defaults to twice the tank diagonal
    double r_max = 1.5;
    double K_r = 0.05;
    double K_theta = 0.167;
    std::filesystem::path samples_file;  ///< when set, gains are fitted from it
};

struct RegionSpec {
    std::optional<double> r_lower, r_upper;
    std::optional<double> T_lower, T_upper;  ///< target periods, inverted through orbit_period
    double epsilon = default_min_band_width;
};

struct ControllerSpec {
    std::string name;
    std::string type = "hysteresis";  ///< none | bang_bang | hysteresis | waypoint
    double u_max = 0.04;
    double v_lo = 0.01;
    double v_hi = 0.04;
    LatchDirection latch = LatchDirection::inward;
    double capture_radius = 0.15;
    double waypoint_spacing = 0.5;
    std::optional<double> waypoint_radius;  ///< chart radius of the waypoint loop, mid-band by default
};

struct IntegrationSpec {
    double dt = 0.01;
    double t_end = 5000.0;
    RobotModel model = RobotModel::kinematic;
    double tau_m = 2.0;
    double mean_thrust = 0.021;
    double top_speed = default_top_speed;
    std::optional<double> start_r;  ///< mid-band by default
    double start_theta = 0.0;
    std::optional<double> workspace_radius;
};

struct BandSearchSpec {
    double r_min = 0.05;
    double r_max = 1.45;
    int theta_samples = 64;
    int r_samples = 64;
};

struct CheckSpec {
    bool period_bounds = false;
    double slack = 0.0;  ///< [s] allowed beyond the boundary-orbit periods
};

struct RunSpec {
    std::uint64_t seed = 1;
    int seeds = 20;  ///< simulations per verify-theorem run
    int decimation = 10;
    bool randomize_start = true;  ///< verify-theorem: random start inside the band per seed
};

struct GridSpec {
    int nx = 91;
    int ny = 61;
    double margin = 0.25;  ///< [m] beyond the boundary bounds
};

struct ExperimentConfig {
    FlowSpec flow;
    RegionSpec region;
    ControllerSpec controller;
    std::vector<ControllerSpec> compare;  ///< controllers listed for `compare`
    IntegrationSpec integration;
    BandSearchSpec band;
    CheckSpec checks;
    RunSpec run;
    GridSpec grid;
};

/// Parses the sectioned key = value format. Relative file paths resolve against `base_dir`.
/// Unknown sections or keys are rejected with ConfigError.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fitted boundary for the racetrack model (from the constraint file or the stadium generator).
std::shared_ptr<const ImplicitBoundary> build_boundary(const FlowSpec& spec);

struct BuiltFlow {
    std::shared_ptr<const FlowField> field;
    std::shared_ptr<const ImplicitBoundary> boundary;  ///< racetrack only
    std::vector<std::string> notes;
};

BuiltFlow build_flow(const FlowSpec& spec);

/// Resolves the patrol band from radii or target periods. `band` is the monotone band, required
/// when the region is given by periods.
AnnulusRegion resolve_region(const RegionSpec& spec, const FlowField& f,
                             std::optional<RadiusInterval> band = std::nullopt);

std::unique_ptr<Controller> build_controller(const ControllerSpec& spec, const AnnulusRegion& region,
                                             const FlowField& f, std::uint64_t seed);

IntegrateOptions integrate_options(const IntegrationSpec& spec);

} // namespace gyre
