// Flow-adapted seed leaf: a level set of the flow-averaged time, extracted
// with marching squares on a grid periodic in x.

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <unordered_map>

#include "foliate/errors.hpp"
#include "foliate/foliation.hpp"
#include "foliate/parallel.hpp"

namespace foliate {

namespace {

// Integral of t(s) over the curve, exact for the cubic Hermite dense output;
// a stagnated curve keeps its last t for the rest of the window.
double time_integral(const IntegralCurve& c, double length)
{
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < c.samples.size(); ++i) {
        const auto& a = c.samples[i];
        const auto& b = c.samples[i + 1];
        const double h = b.s - a.s;
        sum += 0.5 * h * (a.point.t + b.point.t) + h * h * (a.tangent.v0 - b.tangent.v0) / 12.0;
    }
    sum += c.samples.back().point.t * (length - c.samples.back().s);
    return sum;
}

struct EdgePoint {
    double t = 0.0;
    double x = 0.0; // in [0, L]
};

} // namespace

double flow_averaged_time(const CurrentField& field, SpacetimePoint p, double window,
                          const TraceOptions& trace)
{
    const double half = 0.5 * window;
    const IntegralCurve fwd = trace_curve(field, p, half, trace);
    const ReversedField reversed(field);
    const IntegralCurve bwd = trace_curve(reversed, p, half, trace);
    return (time_integral(fwd, half) + time_integral(bwd, half)) / window;
}

Hypersurface adapted_seed(const CurrentField& field, double t0, std::size_t nodes,
                          const AdaptedSeedOptions& options)
{
    if (nodes < 4) throw InvalidSurface("adapted_seed: need at least 4 nodes");
    const double L = field.box_length();
    const std::size_t nX = options.gridX > 0 ? options.gridX : 2 * nodes;
    const double dx = L / static_cast<double>(nX);
    const double dt = dx;

    double window = options.window;
    if (!(window > 0.0)) {
        // Affine parameter over which the mean density advances t by L.
        double mean = 0.0;
        constexpr int kProbe = 64;
        for (int i = 0; i < kProbe; ++i) mean += field.current({t0, L * i / kProbe}).v0;
        mean /= kProbe;
        if (!(mean > 0.0))
            throw ZeroNorm("adapted_seed: mean density on the t0 slice is not positive");
        window = L / mean;
    }

    const auto f = [&](double t, double x) {
        return flow_averaged_time(field, {t, x}, window, options.trace);
    };
    const auto row = [&](double t) {
        std::vector<double> v(nX);
        parallel_for(nX, options.threads, [&](std::size_t j) { v[j] = f(t, dx * j); });
        return v;
    };

    // Rows are indexed relative to t0; grow the band until the level set is
    // bracketed by a row entirely below and a row entirely above it.
    std::deque<std::vector<double>> rows;
    rows.push_back(row(t0));
    double level = 0.0;
    for (double v : rows.front()) level += v;
    level /= static_cast<double>(nX);
    long lowest = 0;
    constexpr long kMaxRows = 4096;
    while (*std::max_element(rows.front().begin(), rows.front().end()) >= level) {
        --lowest;
        rows.push_front(row(t0 + dt * lowest));
        if (static_cast<long>(rows.size()) > kMaxRows)
            throw ZeroNorm("adapted_seed: level set not bracketed below");
    }
    while (*std::min_element(rows.back().begin(), rows.back().end()) < level) {
        rows.push_back(row(t0 + dt * (lowest + static_cast<long>(rows.size()))));
        if (static_cast<long>(rows.size()) > kMaxRows)
            throw ZeroNorm("adapted_seed: level set not bracketed above");
    }
    const std::size_t nT = rows.size();
    const auto tRow = [&](std::size_t i) { return t0 + dt * (lowest + static_cast<long>(i)); };
    const auto val = [&](std::size_t i, std::size_t j) { return rows[i][j % nX] - level; };
    const auto inside = [&](std::size_t i, std::size_t j) { return val(i, j) >= 0.0; };

    // Edge ids: horizontal edge (i, j) -> 2*(i*nX + j), vertical -> +1.
    const auto hId = [&](std::size_t i, std::size_t j) { return 2 * (i * nX + j % nX); };
    const auto vId = [&](std::size_t i, std::size_t j) { return 2 * (i * nX + j % nX) + 1; };
    const auto edgePoint = [&](std::size_t id) {
        const std::size_t cell = id / 2, i = cell / nX, j = cell % nX;
        const double va = val(i, j);
        if (id % 2 == 0) {
            const double vb = val(i, j + 1);
            return EdgePoint{tRow(i), dx * (j + va / (va - vb))};
        }
        const double vb = val(i + 1, j);
        return EdgePoint{tRow(i) + dt * va / (va - vb), dx * j};
    };

    std::unordered_map<std::size_t, std::vector<std::size_t>> adj;
    const auto link = [&](std::size_t a, std::size_t b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    for (std::size_t i = 0; i + 1 < nT; ++i) {
        for (std::size_t j = 0; j < nX; ++j) {
            const std::size_t bottom = hId(i, j), top = hId(i + 1, j);
            const std::size_t left = vId(i, j), right = vId(i, j + 1);
            const int code = inside(i, j) | inside(i, j + 1) << 1 | inside(i + 1, j + 1) << 2 |
                             inside(i + 1, j) << 3;
            const double center =
                0.25 * (val(i, j) + val(i, j + 1) + val(i + 1, j) + val(i + 1, j + 1));
            switch (code) {
            case 1: case 14: link(left, bottom); break;
            case 2: case 13: link(bottom, right); break;
            case 3: case 12: link(left, right); break;
            case 4: case 11: link(right, top); break;
            case 6: case 9: link(bottom, top); break;
            case 7: case 8: link(left, top); break;
            case 5:
                if (center >= 0.0) { link(bottom, right); link(top, left); }
                else { link(left, bottom); link(right, top); }
                break;
            case 10:
                if (center >= 0.0) { link(left, bottom); link(right, top); }
                else { link(bottom, right); link(top, left); }
                break;
            default: break;
            }
        }
    }

    // Walk components from column-0 vertical edges; keep the one that winds.
    std::vector<SpacetimePoint> loop;
    for (std::size_t i = 0; i + 1 < nT && loop.empty(); ++i) {
        const std::size_t start = vId(i, 0);
        auto it = adj.find(start);
        if (it == adj.end() || it->second.size() != 2) continue;
        std::vector<SpacetimePoint> pts;
        EdgePoint p0 = edgePoint(start);
        double x = p0.x, winding = 0.0;
        pts.push_back({p0.t, x});
        std::size_t prev = start, cur = it->second[0];
        bool closed = false;
        for (std::size_t guard = 0; guard < adj.size() + 2; ++guard) {
            const EdgePoint q = edgePoint(cur);
            double step = q.x - std::fmod(x, L);
            step -= L * std::round(step / L);
            x += step;
            winding += step;
            if (cur == start) {
                closed = true;
                break;
            }
            pts.push_back({q.t, x});
            const auto& nb = adj[cur];
            if (nb.size() != 2) break;
            const std::size_t next = nb[0] == prev ? nb[1] : nb[0];
            prev = cur;
            cur = next;
        }
        if (!closed || std::abs(std::abs(winding) - L) > 0.5 * L) continue;
        if (winding < 0.0) {
            // Travel the other way round so that x increases over one lap.
            std::reverse(pts.begin() + 1, pts.end());
            for (std::size_t k = 1; k < pts.size(); ++k) pts[k].x += L;
        }
        loop = std::move(pts);
    }
    if (loop.empty()) throw ZeroNorm("adapted_seed: no winding level-set component found");

    // Nodes equidistribute arc length plus turning angle, which packs them
    // into the fold tips where a polyline is furthest from the level set.
    std::vector<SpacetimePoint> closedLoop = loop;
    closedLoop.push_back({loop.front().t, loop.front().x + L});
    const std::size_t m = closedLoop.size();
    std::vector<double> arc(m, 0.0), turn(m, 0.0);
    for (std::size_t k = 1; k < m; ++k)
        arc[k] = arc[k - 1] + std::hypot(closedLoop[k].t - closedLoop[k - 1].t,
                                         closedLoop[k].x - closedLoop[k - 1].x);
    const auto heading = [&](std::size_t k) {
        const auto& a = closedLoop[k % (m - 1)];
        const auto& b = closedLoop[k % (m - 1) + 1];
        return std::atan2(b.t - a.t, b.x - a.x);
    };
    for (std::size_t k = 1; k < m; ++k) {
        const double d = std::remainder(heading(k) - heading(k - 1), 2.0 * std::numbers::pi);
        turn[k] = turn[k - 1] + std::abs(d);
    }
    const double weight = turn.back() > 0.0 ? arc.back() / turn.back() : 0.0;
    std::vector<double> monitor(m);
    for (std::size_t k = 0; k < m; ++k) monitor[k] = arc[k] + weight * turn[k];
    const double total = monitor.back();
    std::vector<LeafNode> out(nodes);
    std::size_t seg = 0;
    for (std::size_t n = 0; n < nodes; ++n) {
        const double target = total * static_cast<double>(n) / static_cast<double>(nodes);
        while (seg + 2 < m && monitor[seg + 1] <= target) ++seg;
        const double span = monitor[seg + 1] - monitor[seg];
        const double u = span > 0.0 ? (target - monitor[seg]) / span : 0.0;
        out[n] = {static_cast<double>(n) / static_cast<double>(nodes),
                  closedLoop[seg].t + u * (closedLoop[seg + 1].t - closedLoop[seg].t),
                  closedLoop[seg].x + u * (closedLoop[seg + 1].x - closedLoop[seg].x)};
    }

    // Newton steps along the gradient pull each node onto the level set.
    const double h = 1e-4 * L;
    parallel_for(nodes, options.threads, [&](std::size_t n) {
        LeafNode& node = out[n];
        for (int it = 0; it < 3; ++it) {
            const double r = f(node.t, node.x) - level;
            const double gt = (f(node.t + h, node.x) - f(node.t - h, node.x)) / (2 * h);
            const double gx = (f(node.t, node.x + h) - f(node.t, node.x - h)) / (2 * h);
            const double g2 = gt * gt + gx * gx;
            if (!(g2 > 0.0)) break;
            node.t -= r * gt / g2;
            node.x -= r * gx / g2;
            if (std::abs(r) < 1e-13 * (1.0 + std::abs(level))) break;
        }
    });
    return Hypersurface(std::move(out), L);
}

} // namespace foliate
