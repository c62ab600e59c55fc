#include "foliate/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "foliate/errors.hpp"
#include "foliate/parallel.hpp"

namespace foliate {

SurfaceElement surface_element(const Hypersurface& surface, std::size_t segment)
{
    const LeafNode a = surface.node(segment), b = surface.node(segment + 1);
    const double dt = b.t - a.t, dx = b.x - a.x;
    if (dt == 0.0 && dx == 0.0)
        throw DegenerateSegment("surface_element: segment " + std::to_string(segment) +
                                " has zero displacement");
    SurfaceElement e;
    e.covariant = {dx, -dt};
    e.dLambda = b.lambda - a.lambda;
    e.segClass = classify({dt, dx}, 0.0);
    return e;
}

std::size_t timelike_segment_count(const Hypersurface& surface)
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < surface.segment_count(); ++i)
        if (is_timelike(surface_element(surface, i).segClass)) ++n;
    return n;
}

BetaExample beta_example(double beta)
{
    const double b2 = beta * beta;
    BetaExample out;
    const double factor = std::numbers::sqrt2 / (1.0 + b2);
    out.nTildePerUnitXPrime1 = {factor, factor * std::abs(beta)};
    const double gap = 1.0 - b2;
    out.normSign = (gap > 0.0) - (gap < 0.0);
    out.gDet = std::sqrt(2.0 * std::abs(gap)) / (1.0 + b2);
    return out;
}

namespace {

// n~_mu j^mu integrated against du over segment i, u in [0, 1].
struct SegmentIntegrand {
    const CurrentField& field;
    LeafNode a, b;

    double operator()(double u) const
    {
        const SpacetimePoint p{a.t + u * (b.t - a.t), a.x + u * (b.x - a.x)};
        const TwoVector j = field.current(p);
        return (b.x - a.x) * j.v0 - (b.t - a.t) * j.v1;
    }
};

double integrate_range(const CurrentField& field, const Hypersurface& surface, double lambdaA,
                       double lambdaB, bool absolute, const QuadratureOptions& quad,
                       const DensityObserver& observer)
{
    double total = 0.0;
    for (std::size_t i = 0; i < surface.segment_count(); ++i) {
        const LeafNode a = surface.node(i), b = surface.node(i + 1);
        const double lo = std::max(lambdaA, a.lambda), hi = std::min(lambdaB, b.lambda);
        if (!(hi > lo)) continue;
        const double dl = b.lambda - a.lambda;
        const double ua = (lo - a.lambda) / dl, ub = (hi - a.lambda) / dl;
        SegmentIntegrand seg{field, a, b};
        auto f = [&](double u) {
            const double v = seg(u);
            if (observer) observer(a.lambda + u * dl, v / dl);
            return absolute ? std::abs(v) : v;
        };
        total += integrate(f, ua, ub, quad);
    }
    return total;
}

} // namespace

double signed_density(const CurrentField& field, const Hypersurface& surface, double lambda)
{
    const double l = lambda - std::floor(lambda);
    const std::size_t i = surface.segment_index(l);
    const LeafNode a = surface.node(i), b = surface.node(i + 1);
    const double u = (l - a.lambda) / (b.lambda - a.lambda);
    return SegmentIntegrand{field, a, b}(u) / (b.lambda - a.lambda);
}

double probability_density(const CurrentField& field, const Hypersurface& surface,
                           double lambda)
{
    return std::abs(signed_density(field, surface, lambda));
}

double flux(const CurrentField& field, const Hypersurface& surface,
            const QuadratureOptions& quad, const DensityObserver& observer)
{
    for (std::size_t i = 0; i < surface.segment_count(); ++i) surface_element(surface, i);
    return integrate_range(field, surface, 0.0, 1.0, false, quad, observer);
}

double probability(const CurrentField& field, const Hypersurface& surface, double lambdaA,
                   double lambdaB, const QuadratureOptions& quad,
                   const DensityObserver& observer)
{
    if (!(lambdaA >= 0.0 && lambdaB <= 1.0 && lambdaA <= lambdaB))
        throw InvalidSurface("probability: need 0 <= lambdaA <= lambdaB <= 1");
    return integrate_range(field, surface, lambdaA, lambdaB, true, quad, observer);
}

//---------------------------------------------------------------------------//

AdvectedLeaf advect_leaf(const CurrentField& field, const Hypersurface& surface, double deltaS,
                         const TraceOptions& trace, unsigned threads)
{
    if (deltaS < 0.0) throw InvalidSurface("advect_leaf: deltaS must be >= 0");
    if (deltaS == 0.0) return {surface, {}};

    const auto& nodes = surface.nodes();
    std::vector<LeafNode> moved(nodes.size());
    std::vector<char> stagnant(nodes.size(), 0);
    parallel_for(nodes.size(), threads, [&](std::size_t i) {
        const LeafNode& n = nodes[i];
        const IntegralCurve c = trace_curve(field, {n.t, n.x}, deltaS, trace);
        if (c.termination == Termination::Stagnation && c.samples.size() == 1) {
            moved[i] = n;
            stagnant[i] = 1;
            return;
        }
        const SpacetimePoint end = c.samples.back().point;
        moved[i] = {n.lambda, end.t, end.x};
        stagnant[i] = c.termination == Termination::Stagnation;
    });
    AdvectedLeaf out{Hypersurface(std::move(moved), surface.box_length()), {}};
    for (std::size_t i = 0; i < stagnant.size(); ++i)
        if (stagnant[i]) out.stagnantNodes.push_back(i);
    return out;
}

AdmissibilityReport assess_admissibility(const Congruence& congruence,
                                         std::span<const Hypersurface> leaves,
                                         unsigned threads)
{
    AdmissibilityReport r;
    r.leafCount = leaves.size();
    r.curveCount = congruence.curves.size();
    r.counts.assign(r.curveCount, std::vector<int>(r.leafCount, 0));
    r.touches.assign(r.curveCount, std::vector<int>(r.leafCount, 0));
    parallel_for(r.curveCount, threads, [&](std::size_t c) {
        for (std::size_t l = 0; l < r.leafCount; ++l) {
            try {
                const CrossingInfo info = crossings(congruence.curves[c], leaves[l]);
                r.counts[c][l] = info.count;
                r.touches[c][l] = info.touches;
            } catch (const DegenerateIntersection&) {
                r.counts[c][l] = -1;
            }
        }
    });
    r.admissible = true;
    for (std::size_t c = 0; c < r.curveCount; ++c) {
        const Termination term = congruence.curves[c].termination;
        if (term == Termination::Stagnation) {
            r.stagnant.push_back(c);
            continue;
        }
        if (term == Termination::StepUnderflow) {
            r.failed.push_back(c);
            continue;
        }
        for (int n : r.counts[c]) r.admissible = r.admissible && n == 1;
    }
    return r;
}

Foliation build_foliation(const CurrentField& field, const Hypersurface& seed,
                          std::size_t nLeaves, double deltaS, std::size_t congruenceSize,
                          const FoliationOptions& options)
{
    if (nLeaves < 2) throw InvalidSurface("build_foliation: nLeaves must be >= 2");
    if (!(deltaS > 0.0)) throw InvalidSurface("build_foliation: deltaS must be > 0");
    Foliation f;
    f.deltaS = deltaS;
    f.leaves.push_back(seed);
    f.stagnantNodes.emplace_back();
    for (std::size_t k = 1; k < nLeaves; ++k) {
        AdvectedLeaf next = advect_leaf(field, f.leaves.back(), deltaS, options.trace,
                                        options.threads);
        f.leaves.push_back(std::move(next.leaf));
        f.stagnantNodes.push_back(std::move(next.stagnantNodes));
    }
    f.congruence = seed_congruence(field, seed, congruenceSize,
                                   static_cast<double>(nLeaves) * deltaS, options.trace,
                                   options.threads);
    f.report = assess_admissibility(f.congruence, f.leaves, options.threads);
    return f;
}

//---------------------------------------------------------------------------//

namespace {

// lambda of p when p lies on the leaf (up to 1e-9 L), else nothing.
std::optional<double> locate_on_leaf(const Hypersurface& leaf, SpacetimePoint p)
{
    const double L = leaf.box_length();
    for (std::size_t i = 0; i < leaf.segment_count(); ++i) {
        const LeafNode a = leaf.node(i), b = leaf.node(i + 1);
        const double shift = L * std::round((p.x - a.x) / L);
        const double dt = b.t - a.t, dx = b.x - a.x;
        const double w = std::clamp(((p.t - a.t) * dt + (p.x - shift - a.x) * dx) / (dt * dt + dx * dx),
                                    0.0, 1.0);
        const double gap = std::hypot(a.t + w * dt - p.t, a.x + w * dx + shift - p.x);
        if (gap <= 1e-9 * L) {
            const double lambda = a.lambda + w * (b.lambda - a.lambda);
            return lambda >= 1.0 ? lambda - 1.0 : lambda;
        }
    }
    return std::nullopt;
}

} // namespace

TubeResult tube_conservation(const CurrentField& field, const Hypersurface& leafA,
                             double lambdaA0, double lambdaA1, const Hypersurface& leafB,
                             double sMax, const TraceOptions& trace,
                             const QuadratureOptions& quad)
{
    if (!(0.0 <= lambdaA0 && lambdaA0 <= lambdaA1 && lambdaA1 <= 1.0))
        throw InvalidSurface("tube_conservation: need 0 <= lambdaA0 <= lambdaA1 <= 1");

    // Boundary curves near a zero of j crawl; the range is doubled until
    // they arrive. A curve that stagnates on leafB itself maps in place.
    constexpr int kMaxDoublings = 10;
    const auto map_point = [&](double lambda) {
        TraceOptions opts = trace;
        opts.throwOnUnderflow = true;
        const SpacetimePoint start = leafA.point(lambda);
        double range = sMax;
        for (int attempt = 0;; ++attempt) {
            const IntegralCurve c = trace_curve(field, start, range, opts);
            if (const auto hit = first_intersection(c, leafB)) return hit->lambda;
            if (c.termination == Termination::Stagnation) {
                if (const auto on = locate_on_leaf(leafB, c.samples.back().point)) return *on;
                break;
            }
            if (attempt == kMaxDoublings) break;
            range *= 2.0;
        }
        throw NoIntersection("tube_conservation: boundary curve from lambda = " +
                             std::to_string(lambda) + " does not reach leafB");
    };

    TubeResult r;
    r.lambdaB0 = map_point(lambdaA0);
    r.lambdaB1 = lambdaA1 == lambdaA0 ? r.lambdaB0 : map_point(lambdaA1);
    if (lambdaA1 == lambdaA0) return r;

    r.pa = probability(field, leafA, lambdaA0, lambdaA1, quad);
    if (r.lambdaB0 <= r.lambdaB1)
        r.pb = probability(field, leafB, r.lambdaB0, r.lambdaB1, quad);
    else
        r.pb = probability(field, leafB, r.lambdaB0, 1.0, quad) +
               probability(field, leafB, 0.0, r.lambdaB1, quad);
    return r;
}

} // namespace foliate
