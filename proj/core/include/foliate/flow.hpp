#pragma once

#include <optional>
#include <span>
#include <vector>

#include "foliate/hypersurface.hpp"
#include "foliate/spacetime.hpp"

namespace foliate {

struct TraceOptions {
    double rkTol = 1e-8;          // per-step error relative to the step displacement
    double stagnationTol = 1e-8;  // relative to field.current_scale()
    double minStepFactor = 1e-12; // hMin = minStepFactor * sMax
    double maxStepFactor = 1.0 / 16.0;
    bool throwOnUnderflow = true;
};

enum class Termination { RangeEnd, Stagnation, StepUnderflow };

struct CurveSample {
    double s = 0.0;
    SpacetimePoint point; // x unwrapped
    TwoVector tangent;    // j^mu at point
};

/// Integral curve of dx^mu/ds = j^mu, stored at the accepted steps of the
/// integrator; between samples the curve is the cubic Hermite interpolant.
struct IntegralCurve {
    std::vector<CurveSample> samples;
    Termination termination = Termination::RangeEnd;

    double s_max() const { return samples.back().s; }
    SpacetimePoint at(double s) const;
    TwoVector velocity_at(double s) const;
    // Inserts factor-1 dense-output points inside every step.
    IntegralCurve refined(int factor) const;
    std::vector<SpacetimePoint> polyline() const;
};

// Dormand-Prince 5(4) with error control on the step displacement.
// Stops early with Termination::Stagnation when |j0|+|j1| drops below
// stagnationTol * current_scale(). Throws StepUnderflow when the step falls
// below hMin unless options.throwOnUnderflow is false.
IntegralCurve trace_curve(const CurrentField& field, SpacetimePoint start, double sMax,
                          const TraceOptions& options = {});

struct Congruence {
    std::vector<IntegralCurve> curves;
    std::vector<double> seedParams;
};

// Seeds at lambda_i = i / count on the surface, traced over [0, sMax].
Congruence seed_congruence(const CurrentField& field, const Hypersurface& surface,
                           std::size_t count, double sMax, const TraceOptions& options = {},
                           unsigned threads = 1);

struct CrossingInfo {
    int count = 0;   // transversal crossings + touches + endpoint contacts
    int touches = 0; // contacts where the path stays on one side
};

// Exact crossing count between a polyline (x unwrapped) and a leaf on the
// cylinder. Coordinates are snapped to a 1e-12 grid and all orientation
// tests are exact. Throws DegenerateIntersection on a shared segment.
CrossingInfo crossings(std::span<const SpacetimePoint> path, const Hypersurface& surface);
CrossingInfo crossings(const IntegralCurve& curve, const Hypersurface& surface);
int crossing_count(const IntegralCurve& curve, const Hypersurface& surface);

struct CurveLeafHit {
    double s = 0.0;
    SpacetimePoint point;
    double lambda = 0.0; // leaf parameter in [0, 1)
};

// First point (smallest s > 0) where the dense-output curve meets the leaf.
std::optional<CurveLeafHit> first_intersection(const IntegralCurve& curve,
                                               const Hypersurface& surface);

} // namespace foliate
