#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gyre/config.hpp"
#include "gyre/dynamics.hpp"
#include "gyre/fitting.hpp"

namespace gyre {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  ///< population standard deviation
};

MeanStd mean_std(const std::vector<double>& values);

/// Per-cycle table plus aggregates and requested checks for one run.
struct RunReport {
    std::string controller;
    AnnulusRegion region;
    std::optional<std::pair<double, double>> period_bounds;  ///< boundary-orbit periods
    std::vector<CycleRecord> cycles;
    MeanStd period;
    MeanStd effort;
    double effort_overall = 0.0;  ///< active fraction of the whole run
    double duration = 0.0;
    std::vector<CheckResult> checks;
    std::vector<std::string> notes;
    std::optional<std::string> abort_reason;

    bool ok() const;
};

/// Fills cycles, aggregates and region-exit notes from a finished trajectory.
RunReport summarize(const Trajectory& traj, const AnnulusRegion& region, std::string controller);

/// Appends a period-bounds check over every complete cycle: T in (lo - slack, hi + slack).
void check_period_bounds(RunReport& report, double lo, double hi, double slack);

struct SimulationOutcome {
    Trajectory trajectory;
    RunReport report;
};

/// Everything shared by the subcommands once the config is loaded: flow, band, region.
struct Scenario {
    BuiltFlow flow;
    std::optional<RadiusInterval> band;  ///< computed when a check or period region needs it
    AnnulusRegion region;
};

Scenario prepare_scenario(const ExperimentConfig& cfg, bool need_band);

/// Runs one simulation of `controller` from `start` (mid-band / configured start when unset).
SimulationOutcome run_simulation(const ExperimentConfig& cfg, const Scenario& sc, const ControllerSpec& controller,
                                 std::uint64_t seed, std::optional<Vec2> start = std::nullopt);

struct SeedResult {
    std::uint64_t seed = 0;
    std::size_t cycles = 0;
    double min_period = 0.0;
    double max_period = 0.0;
    bool passed = false;
    std::optional<std::string> abort_reason;
};

struct TheoremOutcome {
    RadiusInterval band;
    AnnulusRegion region;
    double T_lower = 0.0;  ///< orbit period at r_lower
    double T_upper = 0.0;  ///< orbit period at r_upper
    double slack = 0.0;
    std::vector<SeedResult> seeds;
    std::size_t total_cycles = 0;
    double min_period = 0.0;
    double max_period = 0.0;
    bool passed = false;
};

/// Checks that the region sits inside the monotone band, then runs cfg.run.seeds seeded simulations
/// concurrently and tests every complete cycle against the boundary-orbit periods.
TheoremOutcome verify_theorem(const ExperimentConfig& cfg);

struct CompareRow {
    std::string name;
    std::string type;
    std::size_t cycles = 0;
    MeanStd period;
    MeanStd effort;
    double effort_overall = 0.0;
    std::optional<std::string> abort_reason;
};

/// Runs every listed controller in the same flow, region, start and seed.
std::vector<CompareRow> compare_controllers(const ExperimentConfig& cfg);

// CSV writers. Number formatting is fixed so identical runs give identical bytes.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj, int decimation = 1);
void write_cycles_csv(const std::filesystem::path& path, const std::vector<CycleRecord>& cycles);
void write_report_csv(const std::filesystem::path& path, const RunReport& report);
std::string format_report(const RunReport& report);

// Subcommands. Each writes its files under `out_dir`, prints a summary to `log` and returns the
// process exit code: 0 iff every requested check passed and nothing failed.
int cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_verify_theorem(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_compare(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_fit(const ExperimentConfig& cfg, const std::filesystem::path& samples, const std::filesystem::path& out_dir,
            std::ostream& log);
int cmd_boundary(const ExperimentConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log);

} // namespace gyre
