#include "foliate/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "foliate/errors.hpp"
#include "foliate/parallel.hpp"

namespace foliate {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct State {
    double t, x;
};

State add(State y, double h, TwoVector k) { return {y.t + h * k.v0, y.x + h * k.v1}; }

TwoVector eval(const CurrentField& f, State y) { return f.current({y.t, y.x}); }

TwoVector comb(std::initializer_list<std::pair<double, TwoVector>> terms)
{
    TwoVector out{};
    for (const auto& [w, k] : terms) out = out + w * k;
    return out;
}

// Cubic Hermite on [s0, s1].
SpacetimePoint hermite(const CurveSample& a, const CurveSample& b, double s)
{
    const double h = b.s - a.s;
    const double u = (s - a.s) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1, h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2, h11 = u3 - u2;
    return {h00 * a.point.t + h10 * h * a.tangent.v0 + h01 * b.point.t + h11 * h * b.tangent.v0,
            h00 * a.point.x + h10 * h * a.tangent.v1 + h01 * b.point.x + h11 * h * b.tangent.v1};
}

TwoVector hermite_derivative(const CurveSample& a, const CurveSample& b, double s)
{
    const double h = b.s - a.s;
    const double u = (s - a.s) / h;
    const double u2 = u * u;
    const double d00 = (6 * u2 - 6 * u) / h, d10 = 3 * u2 - 4 * u + 1;
    const double d01 = (-6 * u2 + 6 * u) / h, d11 = 3 * u2 - 2 * u;
    return {d00 * a.point.t + d10 * a.tangent.v0 + d01 * b.point.t + d11 * b.tangent.v0,
            d00 * a.point.x + d10 * a.tangent.v1 + d01 * b.point.x + d11 * b.tangent.v1};
}

std::size_t step_index(const std::vector<CurveSample>& samples, double s)
{
    auto it = std::upper_bound(samples.begin(), samples.end(), s,
                               [](double v, const CurveSample& c) { return v < c.s; });
    std::size_t i = static_cast<std::size_t>(std::distance(samples.begin(), it));
    if (i == 0) return 0;
    return std::min(i - 1, samples.size() - 2);
}

} // namespace

//---------------------------------------------------------------------------//

SpacetimePoint IntegralCurve::at(double s) const
{
    if (samples.size() == 1) return samples.front().point;
    const std::size_t i = step_index(samples, s);
    return hermite(samples[i], samples[i + 1], s);
}

TwoVector IntegralCurve::velocity_at(double s) const
{
    if (samples.size() == 1) return samples.front().tangent;
    const std::size_t i = step_index(samples, s);
    return hermite_derivative(samples[i], samples[i + 1], s);
}

IntegralCurve IntegralCurve::refined(int factor) const
{
    if (factor <= 1 || samples.size() < 2) return *this;
    IntegralCurve out;
    out.termination = termination;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const auto& a = samples[i];
        const auto& b = samples[i + 1];
        out.samples.push_back(a);
        for (int m = 1; m < factor; ++m) {
            const double s = a.s + (b.s - a.s) * m / factor;
            out.samples.push_back({s, hermite(a, b, s), hermite_derivative(a, b, s)});
        }
    }
    out.samples.push_back(samples.back());
    return out;
}

std::vector<SpacetimePoint> IntegralCurve::polyline() const
{
    std::vector<SpacetimePoint> pts;
    pts.reserve(samples.size());
    for (const auto& c : samples) pts.push_back(c.point);
    return pts;
}

//---------------------------------------------------------------------------//

IntegralCurve trace_curve(const CurrentField& field, SpacetimePoint start, double sMax,
                          const TraceOptions& options)
{
    if (!(sMax > 0.0)) throw StepUnderflow("trace_curve: sMax must be > 0");
    const double stagTol = options.stagnationTol * field.current_scale();
    const double hMin = options.minStepFactor * sMax;
    const double hMax = options.maxStepFactor * sMax;

    IntegralCurve curve;
    State y{start.t, start.x};
    TwoVector k1 = eval(field, y);
    curve.samples.push_back({0.0, start, k1});
    if (k1.l1() < stagTol) {
        curve.termination = Termination::Stagnation;
        return curve;
    }

    double s = 0.0;
    double h = hMax / 4.0;
    while (s < sMax) {
        bool last = false;
        if (s + h >= sMax) {
            h = sMax - s;
            last = true;
        }
        const TwoVector k2 = eval(field, add(y, h, a21 * k1));
        const TwoVector k3 = eval(field, add(y, h, comb({{a31, k1}, {a32, k2}})));
        const TwoVector k4 = eval(field, add(y, h, comb({{a41, k1}, {a42, k2}, {a43, k3}})));
        const TwoVector k5 =
            eval(field, add(y, h, comb({{a51, k1}, {a52, k2}, {a53, k3}, {a54, k4}})));
        const TwoVector k6 = eval(
            field, add(y, h, comb({{a61, k1}, {a62, k2}, {a63, k3}, {a64, k4}, {a65, k5}})));
        const TwoVector incr = comb({{b1, k1}, {b3, k3}, {b4, k4}, {b5, k5}, {b6, k6}});
        const State yNew = add(y, h, incr);
        const TwoVector k7 = eval(field, yNew);
        const TwoVector err =
            h * comb({{e1, k1}, {e3, k3}, {e4, k4}, {e5, k5}, {e6, k6}, {e7, k7}});

        const double disp = std::max(std::abs(h * incr.v0), std::abs(h * incr.v1));
        const double floor = 1e-14 * (1.0 + std::max(std::abs(y.t), std::abs(y.x)));
        const double scale = options.rkTol * disp + floor;
        const double errNorm = std::max(std::abs(err.v0), std::abs(err.v1)) / scale;

        if (errNorm <= 1.0) {
            s = last ? sMax : s + h;
            y = yNew;
            k1 = k7;
            curve.samples.push_back({s, {y.t, y.x}, k1});
            if (k1.l1() < stagTol) {
                curve.termination = Termination::Stagnation;
                return curve;
            }
            const double grow = errNorm > 0.0 ? 0.9 * std::pow(errNorm, -0.2) : 5.0;
            h = std::min(hMax, h * std::clamp(grow, 0.2, 5.0));
        } else {
            h *= std::clamp(0.9 * std::pow(errNorm, -0.25), 0.1, 0.9);
            if (h < hMin) {
                if (options.throwOnUnderflow)
                    throw StepUnderflow("trace_curve: step fell below hMin at s = " +
                                        std::to_string(s));
                curve.termination = Termination::StepUnderflow;
                return curve;
            }
        }
    }
    curve.termination = Termination::RangeEnd;
    return curve;
}

Congruence seed_congruence(const CurrentField& field, const Hypersurface& surface,
                           std::size_t count, double sMax, const TraceOptions& options,
                           unsigned threads)
{
    if (count < 2) throw InvalidSurface("seed_congruence: count must be >= 2");
    Congruence out;
    out.curves.resize(count);
    out.seedParams.resize(count);
    TraceOptions opts = options;
    opts.throwOnUnderflow = false;
    for (std::size_t i = 0; i < count; ++i)
        out.seedParams[i] = static_cast<double>(i) / static_cast<double>(count);
    parallel_for(count, threads, [&](std::size_t i) {
        out.curves[i] = trace_curve(field, surface.point(out.seedParams[i]), sMax, opts);
    });
    return out;
}

} // namespace foliate
