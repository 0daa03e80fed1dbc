#include "gyre/fitting.hpp"

#include <Eigen/Dense>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "gyre/errors.hpp"

namespace gyre {

namespace {

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_field(const std::string& text, const std::string& file, std::size_t line)
{
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ParseError(file + ": non-numeric field '" + t + "'", line);
    }
    if (used != t.size() || !std::isfinite(v)) throw ParseError(file + ": non-numeric field '" + t + "'", line);
    return v;
}

} // namespace

SampleSet load_samples(const std::filesystem::path& path, const ImplicitBoundary& boundary)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sample file " + path.string());
    const std::string file = path.string();

    SampleSet out;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        if (!header_seen) {
            header_seen = true;
            std::string h = line;
            std::erase_if(h, [](char ch) { return ch == ' ' || ch == '\t' || ch == '\r'; });
            if (h != "x1,x2,v1,v2") throw ParseError(file + ": expected header 'x1,x2,v1,v2'", lineno);
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        if (fields.size() != 4)
            throw ParseError(file + ": expected 4 fields, got " + std::to_string(fields.size()), lineno);
        VelocitySample s{{parse_field(fields[0], file, lineno), parse_field(fields[1], file, lineno)},
                         {parse_field(fields[2], file, lineno), parse_field(fields[3], file, lineno)}};
        if (boundary.gamma(s.pos) > 0.0) {
            out.warnings.push_back(fmt::format("{}:{}: sample at ({}, {}) lies outside the boundary, skipped",
                                               file, lineno, s.pos.x1, s.pos.x2));
            continue;
        }
        out.samples.push_back(s);
    }
    if (out.samples.empty()) throw ParseError(file + ": no usable samples");
    return out;
}

void write_samples(const std::filesystem::path& path, const std::vector<VelocitySample>& samples)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "x1,x2,v1,v2\n";
    for (const auto& s : samples)
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", s.pos.x1, s.pos.x2, s.vel.x1, s.vel.x2);
}

GainFit fit_gains(const std::vector<VelocitySample>& samples, const ImplicitBoundary& boundary,
                  const ShapeNavParams& nav)
{
    if (samples.size() < 2) throw RankDeficiencyError("gain fit needs at least 2 samples");
    const bool one_location = std::all_of(samples.begin(), samples.end(),
                                          [&](const VelocitySample& s) { return s.pos == samples.front().pos; });
    if (one_location) throw RankDeficiencyError("gain fit needs samples at 2 or more distinct locations");
    const auto n = static_cast<Eigen::Index>(samples.size());
    Eigen::MatrixXd A(2 * n, 2);
    Eigen::VectorXd b(2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& s = samples[static_cast<std::size_t>(i)];
        const PotentialBasis basis = potential_field_basis(boundary, nav, s.pos);
        A.row(2 * i) << basis.radial.x1, basis.angular.x1;
        A.row(2 * i + 1) << basis.radial.x2, basis.angular.x2;
        b(2 * i) = s.vel.x1;
        b(2 * i + 1) = s.vel.x2;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < 2) throw RankDeficiencyError("basis fields are degenerate over the sample locations");
    const Eigen::Vector2d k = qr.solve(b);

    GainFit fit;
    fit.K_r = k(0);
    fit.K_theta = k(1);
    fit.residual_rms = std::sqrt((A * k - b).squaredNorm() / static_cast<double>(2 * n));
    fit.sample_count = samples.size();
    return fit;
}

std::vector<VelocitySample> synth_samples(const ImplicitBoundary& boundary, const ShapeNavParams& nav,
                                          const PotentialFieldParams& gains, std::size_t n,
                                          std::uint64_t seed, double noise)
{
    if (n < 1) throw DomainError("synth_samples needs n >= 1");
    std::mt19937_64 rng(seed);
    const Vec2 lo = boundary.bounds_min(), hi = boundary.bounds_max();
    std::uniform_real_distribution<double> ux(lo.x1, hi.x1), uy(lo.x2, hi.x2);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<VelocitySample> out;
    out.reserve(n);
    while (out.size() < n) {
        const Vec2 q{ux(rng), uy(rng)};
        if (boundary.gamma(q) > 0.0) continue;
        Vec2 v = potential_field_velocity(boundary, gains, nav, q);
        if (noise > 0.0) {
            const double sigma = noise * norm(v);
            v += sigma * Vec2{gauss(rng), gauss(rng)};
        }
        out.push_back({q, v});
    }
    return out;
}

} // namespace gyre
