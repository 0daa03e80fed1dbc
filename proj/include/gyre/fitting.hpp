#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gyre/geometry.hpp"
#include "gyre/vec2.hpp"

namespace gyre {

struct VelocitySample {
    Vec2 pos;  ///< [m]
    Vec2 vel;  ///< [m/s]
};

struct GainFit {
    double K_r = 0.0;
    double K_theta = 0.0;
    double residual_rms = 0.0;  ///< [m/s], per velocity component
    std::size_t sample_count = 0;
};

struct SampleSet {
    std::vector<VelocitySample> samples;
    std::vector<std::string> warnings;  ///< one per rejected row
};

/// Reads an `x1,x2,v1,v2` CSV. Rows outside the boundary (gamma > 0) are dropped with a warning.
/// Throws ParseError naming the line for malformed rows, and for files with no samples.
SampleSet load_samples(const std::filesystem::path& path, const ImplicitBoundary& boundary);

void write_samples(const std::filesystem::path& path, const std::vector<VelocitySample>& samples);

/// Linear least squares for (K_r, K_theta) against the potential-flow basis fields.
/// Throws RankDeficiencyError when the two basis fields are degenerate over the sample set.
GainFit fit_gains(const std::vector<VelocitySample>& samples, const ImplicitBoundary& boundary,
                  const ShapeNavParams& nav);

/// `n` points drawn uniformly inside the boundary with potential-flow velocities. With noise > 0,
/// each component is perturbed by N(0, (noise * |v|)^2). Deterministic for a given seed.
std::vector<VelocitySample> synth_samples(const ImplicitBoundary& boundary, const ShapeNavParams& nav,
                                          const PotentialFieldParams& gains, std::size_t n,
                                          std::uint64_t seed, double noise = 0.0);

} // namespace gyre
