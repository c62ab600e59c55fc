#include <doctest.h>

#include <cmath>
#include <numbers>

#include "foliate/errors.hpp"
#include "foliate/flow.hpp"
#include "support.hpp"

using namespace foliate;
using namespace testing_support;
using std::numbers::pi;

namespace {

double distance(SpacetimePoint a, SpacetimePoint b) { return std::hypot(a.t - b.t, a.x - b.x); }

std::vector<SpacetimePoint> s_curve(double shift = 0.0)
{
    std::vector<SpacetimePoint> pts;
    for (int i = 0; i <= 300; ++i) {
        const double s = -1.5 + 3.0 * i / 300;
        pts.push_back({s * s * s - s + shift, s + pi});
    }
    return pts;
}

int sign_changes(const std::vector<SpacetimePoint>& pts)
{
    int n = 0;
    double prev = pts.front().t;
    for (const auto& p : pts) {
        if (p.t == 0.0) {
            ++n;
            prev = 0.0;
            continue;
        }
        if (prev != 0.0 && (p.t > 0) != (prev > 0)) ++n;
        prev = p.t;
    }
    return n;
}

} // namespace

TEST_CASE("constant field traces a straight line")
{
    const auto packet = normalize(plane_wave());
    const double L = kTwoPi;
    const TwoVector j = packet.current({0, 0});
    const auto curve = trace_curve(packet, {0, 0}, L * L);
    CHECK(curve.termination == Termination::RangeEnd);
    const auto end = curve.samples.back().point;
    CHECK(curve.s_max() == doctest::Approx(L * L).epsilon(1e-15));
    CHECK(std::abs(end.t - L * L * j.v0) < 1e-9);
    CHECK(std::abs(end.x - L * L * j.v1) < 1e-9);
    for (std::size_t i = 1; i < curve.samples.size(); ++i)
        CHECK(curve.samples[i].s > curve.samples[i - 1].s);
}

TEST_CASE("starting on a zero of the current stagnates")
{
    const auto curve = trace_curve(standing_wave(), {0, pi / 2}, 10.0);
    CHECK(curve.termination == Termination::Stagnation);
    CHECK(curve.samples.size() == 1);
}

TEST_CASE("reversed tracing returns to the start")
{
    const auto packet = skewed();
    const SpacetimePoint start{0.2, 1.3};
    const auto fwd = trace_curve(packet, start, 1.5);
    REQUIRE(fwd.termination == Termination::RangeEnd);
    const ReversedField back(packet);
    const auto rev = trace_curve(back, fwd.samples.back().point, 1.5);
    CHECK(distance(rev.samples.back().point, start) < 1e-6);
}

TEST_CASE("error shrinks with the tolerance")
{
    for (const auto& packet : {standing_wave(), plane_wave({0.3, 0.1})}) {
        const SpacetimePoint start{0.0, 0.3};
        TraceOptions ref;
        ref.rkTol = 1e-12;
        const auto exact = trace_curve(packet, start, 2.0, ref).samples.back().point;
        double prev = 1.0;
        for (double tol : {1e-4, 1e-6, 1e-8}) {
            TraceOptions o;
            o.rkTol = tol;
            const double err = distance(trace_curve(packet, start, 2.0, o).samples.back().point, exact);
            CHECK(err <= std::max(prev, 1e-13));
            CHECK(err < 100 * tol);
            prev = err;
        }
    }
}

TEST_CASE("dense output is tangent to the current")
{
    const auto packet = skewed();
    const auto curve = trace_curve(packet, {0.0, 0.5}, 3.0);
    for (const auto& smp : curve.samples) {
        const TwoVector v = curve.velocity_at(smp.s);
        const TwoVector j = packet.current(smp.point);
        const double cross = v.v0 * j.v1 - v.v1 * j.v0;
        const double angle = std::atan2(std::abs(cross), v.v0 * j.v0 + v.v1 * j.v1);
        CHECK(angle < 1e-6);
    }
}

TEST_CASE("seed congruence")
{
    const auto packet = normalize(plane_wave());
    const auto slice = Hypersurface::time_slice(0.0, 16, kTwoPi);
    const auto cong = seed_congruence(packet, slice, 8, 10.0);
    REQUIRE(cong.curves.size() == 8);
    const TwoVector j = packet.current({0, 0});
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(cong.seedParams[i] == doctest::Approx(i / 8.0));
        const auto p0 = cong.curves[i].samples.front().point;
        const auto q = slice.point(cong.seedParams[i]);
        CHECK(p0.t == q.t);
        CHECK(p0.x == q.x);
        const auto end = cong.curves[i].samples.back().point;
        CHECK(std::abs(end.t - p0.t - 10.0 * j.v0) < 1e-9);
        CHECK(std::abs(end.x - p0.x - 10.0 * j.v1) < 1e-9);
    }
}

TEST_CASE("skewed congruence has a curve running backwards in t")
{
    const auto slice = Hypersurface::time_slice(0.0, 64, kTwoPi);
    const auto cong = seed_congruence(skewed(), slice, 32, 2.0);
    bool backwards = false;
    for (const auto& c : cong.curves)
        for (std::size_t i = 1; i < c.samples.size(); ++i)
            backwards = backwards || c.samples[i].point.t < c.samples[i - 1].point.t;
    CHECK(backwards);
}

TEST_CASE("curves of a congruence stay apart")
{
    const auto packet = skewed();
    const auto slice = Hypersurface::time_slice(0.0, 32, kTwoPi);
    const auto cong = seed_congruence(packet, slice, 16, 2.0);
    for (std::size_t a = 0; a < cong.curves.size(); ++a) {
        const auto& ca = cong.curves[a];
        const auto& cb = cong.curves[(a + 1) % cong.curves.size()];
        double closest = 1e300;
        for (int i = 0; i <= 200; ++i) {
            const double s = 2.0 * i / 200;
            const auto p = ca.at(s), q = cb.at(s);
            const double dx = std::remainder(p.x - q.x, kTwoPi);
            closest = std::min(closest, std::hypot(p.t - q.t, dx));
        }
        CHECK(closest > 1e-6);
    }
}

TEST_CASE("crossing counts")
{
    const auto leaf = Hypersurface::time_slice(0.0, 16, kTwoPi);
    const std::vector<SpacetimePoint> straight{{-1, 0.5}, {1, 1.5}};
    CHECK(crossings(straight, leaf).count == 1);

    const auto s = s_curve();
    CHECK(sign_changes(s) == 3);
    CHECK(crossings(s, leaf).count == 3);

    const auto shifted = s_curve(0.1234);
    CHECK(crossings(shifted, leaf).count == sign_changes(shifted));

    const std::vector<SpacetimePoint> below{{-2, 0.0}, {-1, 20.0}};
    CHECK(crossings(below, leaf).count == 0);

    const std::vector<SpacetimePoint> wrapped{{-1, 3 * kTwoPi + 0.2}, {1, 3 * kTwoPi + 0.4}};
    CHECK(crossings(wrapped, leaf).count == 1);

    const std::vector<SpacetimePoint> touching{{-1, 1.0}, {0, 1.5}, {-1, 2.0}};
    const auto info = crossings(touching, leaf);
    CHECK(info.count == 1);
    CHECK(info.touches == 1);

    const std::vector<SpacetimePoint> along{{0, 0.5}, {0, 1.0}};
    CHECK_THROWS_AS(crossings(along, leaf), DegenerateIntersection);
}

TEST_CASE("crossing count is invariant under refinement")
{
    const auto packet = skewed();
    const auto leaf = Hypersurface::time_slice(0.4, 64, kTwoPi);
    const auto cong = seed_congruence(packet, Hypersurface::time_slice(0.0, 64, kTwoPi), 32, 2.0);
    for (const auto& c : cong.curves)
        CHECK(crossing_count(c, leaf) == crossing_count(c.refined(2), leaf));
}

TEST_CASE("first intersection with a leaf")
{
    const auto packet = normalize(plane_wave());
    const TwoVector j = packet.current({0, 0});
    const auto curve = trace_curve(packet, {0, 0.1}, 100.0);
    const auto leaf = Hypersurface::time_slice(2.0, 16, kTwoPi);
    const auto hit = first_intersection(curve, leaf);
    REQUIRE(hit);
    CHECK(hit->s == doctest::Approx(2.0 / j.v0).epsilon(1e-9));
    CHECK(hit->point.t == doctest::Approx(2.0).epsilon(1e-9));
    const double x = std::fmod(0.1 + hit->s * j.v1, kTwoPi);
    CHECK(hit->lambda == doctest::Approx(x / kTwoPi).epsilon(1e-9));
    CHECK_FALSE(first_intersection(curve, Hypersurface::time_slice(-1.0, 16, kTwoPi)));
}
