#pragma once

#include <functional>
#include <limits>
#include <optional>

#include "gyre/vec2.hpp"

namespace gyre {

/// Parameters of the simplified wind-driven double gyre.
struct DoubleGyreParams {
    double A = 0.1;   ///< flow strength [m/s scale]
    double s = 1.0;   ///< cell half-width [m]
    double mu = 0.0;  ///< dissipation rate [1/s]
};

/// Angular velocity profile Omega(r) of an axisymmetric vortex. Valid on [r_min, r_max].
struct OmegaProfile {
    std::function<double(double)> omega;
    double r_min = 0.0;
    double r_max = std::numeric_limits<double>::infinity();
    bool open_at_min = false;  ///< r_min itself excluded (singular profiles)

    double operator()(double r) const;
    bool in_domain(double r) const;

    /// c / (r + r0). With r0 = 0 the profile is singular at the origin.
    static OmegaProfile inverse(double c, double r0 = 0.0);
    /// Rigid rotation at rate c.
    static OmegaProfile constant(double c);
};

struct VortexParams {
    OmegaProfile omega_profile = OmegaProfile::inverse(1.0, 0.0);
    double mu = 0.0;  ///< radial rate [1/s]; positive contracts toward the center
};

/// x_o: center of the closed (non-dissipative) orbits. x_z: center of the dissipative field,
/// about which the controller measures angle.
struct GyreCenter {
    Vec2 x_o;
    Vec2 x_z;
};

Vec2 double_gyre_velocity(const DoubleGyreParams& p, Vec2 x);

/// Throws DomainError if |x| lies outside the profile domain. The origin maps to zero velocity.
Vec2 vortex_velocity(const VortexParams& p, Vec2 x);

/// A steady planar velocity field together with the polar chart used to measure
/// progress around its gyre.
///
/// The default chart is ordinary polar coordinates about center().x_z. Fitted fields
/// override it with a circularizing map.
class FlowField {
public:
    virtual ~FlowField() = default;

    virtual Vec2 velocity(Vec2 x) const = 0;
    virtual GyreCenter center() const = 0;

    virtual Polar to_polar(Vec2 x) const;
    virtual Vec2 from_polar(Polar p) const;

    /// False when x has left the region the model describes.
    virtual bool contains(Vec2 /*x*/) const { return true; }
};

class DoubleGyreFlow final : public FlowField {
public:
    /// Center defaults to the middle of the first cell, (s/2, s/2).
    explicit DoubleGyreFlow(DoubleGyreParams p, std::optional<Vec2> center = std::nullopt);

    Vec2 velocity(Vec2 x) const override { return double_gyre_velocity(params_, x); }
    GyreCenter center() const override { return {center_, center_}; }
    const DoubleGyreParams& params() const { return params_; }

private:
    DoubleGyreParams params_;
    Vec2 center_;
};

class VortexFlow final : public FlowField {
public:
    explicit VortexFlow(VortexParams p);

    Vec2 velocity(Vec2 x) const override { return vortex_velocity(params_, x); }
    GyreCenter center() const override { return {}; }
    bool contains(Vec2 x) const override;
    const VortexParams& params() const { return params_; }

private:
    VortexParams params_;
};

/// Zero velocity everywhere. Polar chart about the given point.
class StillWater final : public FlowField {
public:
    explicit StillWater(Vec2 center = {}) : center_(center) {}

    Vec2 velocity(Vec2) const override { return {}; }
    GyreCenter center() const override { return {center_, center_}; }

private:
    Vec2 center_;
};

/// Rate of change of the angle about x_z: (v . t) / |x - x_z| with t the
/// counterclockwise unit tangent. Positive for counterclockwise motion.
double angular_velocity(const FlowField& f, Vec2 x);

/// Angular velocity at the chart point (r, theta).
double angular_velocity(const FlowField& f, Polar p);

struct RadiusInterval {
    double lower = 0.0;
    double upper = 0.0;

    bool empty() const { return !(upper > lower); }
    bool contains(double lo, double hi) const { return !empty() && lo >= lower && hi <= upper; }
};

/// Largest sub-interval of `r_search` on which the sampled angular speed decreases
/// strictly with r along every sampled ray. Rotation sense is taken from the samples;
/// a sign change disqualifies the affected segment. Empty when no segment qualifies.
RadiusInterval monotone_band(const FlowField& f, int theta_samples, int r_samples,
                             RadiusInterval r_search);

inline constexpr int default_period_panels = 512;

/// Time to traverse the chart circle r once, integrating dTheta / Omega with the composite
/// midpoint rule. Clockwise flows yield positive periods. Throws DomainError if Omega
/// vanishes or changes sign along the orbit.
double orbit_period(const FlowField& f, double r, int theta_steps = default_period_panels);

/// Radius in `band` whose orbit period equals `period`, by bisection. Requires the
/// period to be increasing on the band; throws DomainError if the target is out of range.
double radius_for_period(const FlowField& f, double period, RadiusInterval band,
                         int theta_steps = default_period_panels);

} // namespace gyre
