// Exact polyline/leaf intersection counting on the cylinder.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include "foliate/errors.hpp"
#include "foliate/flow.hpp"

namespace foliate {

namespace {

constexpr double kSnap = 1e-12;

using I64 = long long;
__extension__ typedef __int128 I128;

// Plane coordinates: X = x, Y = t.
struct IP {
    I64 x = 0;
    I64 t = 0;
    bool operator==(const IP&) const = default;
    auto operator<=>(const IP&) const = default;
};

I64 snap(double v) { return std::llround(v / kSnap); }
IP snap(SpacetimePoint p) { return {snap(p.x), snap(p.t)}; }

IP operator-(IP a, IP b) { return {a.x - b.x, a.t - b.t}; }

I128 cross(IP u, IP v)
{
    return static_cast<I128>(u.x) * v.t - static_cast<I128>(u.t) * v.x;
}

I128 dot(IP u, IP v) { return static_cast<I128>(u.x) * v.x + static_cast<I128>(u.t) * v.t; }

int orient(IP a, IP b, IP c)
{
    const I128 v = cross(b - a, c - a);
    return (v > 0) - (v < 0);
}

// c collinear with [a, b]: is it inside the closed segment?
bool on_segment(IP a, IP b, IP c)
{
    return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
           std::min(a.t, b.t) <= c.t && c.t <= std::max(a.t, b.t);
}

// Is d strictly inside the counter-clockwise sweep from a to b?
bool inside_ccw(IP a, IP b, IP d)
{
    const I128 ab = cross(a, b), ad = cross(a, d), db = cross(d, b);
    if (ab > 0) return ad > 0 && db > 0;
    if (ab < 0) return ad > 0 || db > 0;
    if (dot(a, b) < 0) return ad > 0;
    return true; // spike: a and b coincide in direction
}

bool same_direction(IP u, IP v) { return cross(u, v) == 0 && dot(u, v) > 0; }

// Leaf vertices indexed over the integers (periodic copies shifted by L).
struct LeafChain {
    std::vector<IP> base;
    I64 shift = 0;

    IP vertex(I64 g) const
    {
        const I64 n = static_cast<I64>(base.size());
        I64 m = g >= 0 ? g / n : -((-g + n - 1) / n);
        const I64 j = g - m * n;
        IP v = base[static_cast<std::size_t>(j)];
        v.x += m * shift;
        return v;
    }
};

struct Contact {
    // Path side: vertex index, or segment index when the contact is interior.
    std::optional<std::size_t> pathVertex;
    std::size_t pathSegment = 0;
    std::optional<I64> leafVertex;
    I64 leafSegment = 0;
};

} // namespace

CrossingInfo crossings(std::span<const SpacetimePoint> pathIn, const Hypersurface& surface)
{
    CrossingInfo info;
    std::vector<IP> path;
    path.reserve(pathIn.size());
    for (const auto& p : pathIn) {
        const IP q = snap(p);
        if (path.empty() || !(path.back() == q)) path.push_back(q);
    }
    if (path.empty()) return info;
    LeafChain leaf;
    leaf.shift = snap(surface.box_length());
    for (const auto& n : surface.nodes()) leaf.base.push_back(snap(SpacetimePoint{n.t, n.x}));
    const I64 nLeaf = static_cast<I64>(leaf.base.size());

    I64 qmin = leaf.base.front().x, qmax = qmin;
    for (const auto& v : leaf.base) {
        qmin = std::min(qmin, v.x);
        qmax = std::max(qmax, v.x);
    }
    qmax = std::max(qmax, leaf.base.front().x + leaf.shift);
    I64 pmin = path.front().x, pmax = pmin;
    for (const auto& p : path) {
        pmin = std::min(pmin, p.x);
        pmax = std::max(pmax, p.x);
    }
    const auto floor_div = [](I64 a, I64 b) {
        return a >= 0 ? a / b : -((-a + b - 1) / b);
    };
    const I64 mLo = -floor_div(-(pmin - qmax), leaf.shift); // ceil
    const I64 mHi = floor_div(pmax - qmin, leaf.shift);

    if (path.size() == 1) {
        // A lone point counts once if it lies on the leaf.
        for (I64 m = mLo; m <= mHi; ++m)
            for (I64 j = 0; j < nLeaf; ++j) {
                const IP c = leaf.vertex(m * nLeaf + j), d = leaf.vertex(m * nLeaf + j + 1);
                if (orient(c, d, path[0]) == 0 && on_segment(c, d, path[0])) return {1, 0};
            }
        return info;
    }

    std::map<IP, Contact> contacts;
    {
        for (I64 m = mLo; m <= mHi; ++m) {
            for (I64 j = 0; j < nLeaf; ++j) {
                const I64 g = m * nLeaf + j;
                const IP c = leaf.vertex(g), d = leaf.vertex(g + 1);
                const I64 cxLo = std::min(c.x, d.x), cxHi = std::max(c.x, d.x);
                const I64 ctLo = std::min(c.t, d.t), ctHi = std::max(c.t, d.t);
                for (std::size_t a = 0; a + 1 < path.size(); ++a) {
                    const IP p = path[a], q = path[a + 1];
                    if (std::max(p.x, q.x) < cxLo || std::min(p.x, q.x) > cxHi ||
                        std::max(p.t, q.t) < ctLo || std::min(p.t, q.t) > ctHi)
                        continue;
                    const int o1 = orient(c, d, p), o2 = orient(c, d, q);
                    const int o3 = orient(p, q, c), o4 = orient(p, q, d);
                    if (o1 * o2 > 0 || o3 * o4 > 0) continue;
                    if (o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) {
                        ++info.count;
                        continue;
                    }
                    if (o1 == 0 && o2 == 0) {
                        // Collinear: overlap of positive length is degenerate.
                        const IP dir = d - c;
                        const I128 sp = dot(p - c, dir), sq = dot(q - c, dir), sd = dot(dir, dir);
                        const I128 lo = std::max<I128>(std::min(sp, sq), 0);
                        const I128 hi = std::min<I128>(std::max(sp, sq), sd);
                        if (hi > lo)
                            throw DegenerateIntersection(
                                "crossing_count: curve and surface share a segment");
                        if (hi < lo) continue;
                    }
                    // Contact through an endpoint of one of the segments.
                    const auto add = [&](IP at, std::optional<std::size_t> pv, std::size_t ps,
                                         std::optional<I64> lv, I64 ls) {
                        auto [it, inserted] = contacts.try_emplace(at, Contact{pv, ps, lv, ls});
                        if (!inserted) {
                            if (pv) it->second.pathVertex = pv;
                            if (lv) it->second.leafVertex = lv;
                        }
                    };
                    if (o1 == 0 && on_segment(c, d, p))
                        add(p, a, a, p == c ? std::optional<I64>(g)
                                            : (p == d ? std::optional<I64>(g + 1) : std::nullopt),
                            g);
                    if (o2 == 0 && on_segment(c, d, q))
                        add(q, a + 1, a, q == c ? std::optional<I64>(g)
                                                : (q == d ? std::optional<I64>(g + 1) : std::nullopt),
                            g);
                    if (o3 == 0 && on_segment(p, q, c))
                        add(c, c == p ? std::optional<std::size_t>(a)
                                      : (c == q ? std::optional<std::size_t>(a + 1) : std::nullopt),
                            a, g, g);
                    if (o4 == 0 && on_segment(p, q, d))
                        add(d, d == p ? std::optional<std::size_t>(a)
                                      : (d == q ? std::optional<std::size_t>(a + 1) : std::nullopt),
                            a, g + 1, g);
                }
            }
        }
    }

    for (const auto& [at, contact] : contacts) {
        IP leafPrev, leafNext;
        if (contact.leafVertex) {
            leafPrev = leaf.vertex(*contact.leafVertex - 1);
            leafNext = leaf.vertex(*contact.leafVertex + 1);
        } else {
            leafPrev = leaf.vertex(contact.leafSegment);
            leafNext = leaf.vertex(contact.leafSegment + 1);
        }
        std::optional<IP> pathPrev, pathNext;
        if (contact.pathVertex) {
            const std::size_t v = *contact.pathVertex;
            if (v > 0) pathPrev = path[v - 1];
            if (v + 1 < path.size()) pathNext = path[v + 1];
        } else {
            pathPrev = path[contact.pathSegment];
            pathNext = path[contact.pathSegment + 1];
        }
        ++info.count;
        if (!pathPrev || !pathNext) continue; // path endpoint on the leaf

        const IP rIn = leafPrev - at, rOut = leafNext - at;
        const IP dIn = *pathPrev - at, dOut = *pathNext - at;
        for (const IP& dir : {dIn, dOut})
            if (same_direction(dir, rIn) || same_direction(dir, rOut))
                throw DegenerateIntersection("crossing_count: curve and surface share a segment");
        if (inside_ccw(rOut, rIn, dIn) == inside_ccw(rOut, rIn, dOut)) ++info.touches;
    }
    return info;
}

CrossingInfo crossings(const IntegralCurve& curve, const Hypersurface& surface)
{
    const auto pts = curve.polyline();
    return crossings(std::span<const SpacetimePoint>(pts), surface);
}

int crossing_count(const IntegralCurve& curve, const Hypersurface& surface)
{
    return crossings(curve, surface).count;
}

//---------------------------------------------------------------------------//

std::optional<CurveLeafHit> first_intersection(const IntegralCurve& curve,
                                               const Hypersurface& surface)
{
    if (curve.samples.size() < 2) return std::nullopt;
    constexpr int kSub = 8;
    const double L = surface.box_length();
    const std::size_t n = surface.segment_count();

    double leafXMin = surface.node(0).x, leafXMax = leafXMin;
    for (std::size_t i = 0; i <= n; ++i) {
        leafXMin = std::min(leafXMin, surface.node(i).x);
        leafXMax = std::max(leafXMax, surface.node(i).x);
    }

    const auto side = [](SpacetimePoint c, SpacetimePoint d, SpacetimePoint p) {
        return (d.x - c.x) * (p.t - c.t) - (d.t - c.t) * (p.x - c.x);
    };

    for (std::size_t k = 0; k + 1 < curve.samples.size(); ++k) {
        const double s0 = curve.samples[k].s, s1 = curve.samples[k + 1].s;
        for (int sub = 0; sub < kSub; ++sub) {
            const double sa = s0 + (s1 - s0) * sub / kSub;
            const double sb = sub + 1 == kSub ? s1 : s0 + (s1 - s0) * (sub + 1) / kSub;
            const SpacetimePoint pa = curve.at(sa), pb = curve.at(sb);
            const double xLo = std::min(pa.x, pb.x), xHi = std::max(pa.x, pb.x);
            const long mLo = static_cast<long>(std::floor((xLo - leafXMax) / L));
            const long mHi = static_cast<long>(std::ceil((xHi - leafXMin) / L));

            std::optional<CurveLeafHit> best;
            for (long m = mLo; m <= mHi; ++m) {
                for (std::size_t i = 0; i < n; ++i) {
                    LeafNode na = surface.node(i), nb = surface.node(i + 1);
                    const SpacetimePoint c{na.t, na.x + m * L}, d{nb.t, nb.x + m * L};
                    const double fa = side(c, d, pa), fb = side(c, d, pb);
                    if (fa * fb > 0.0) continue;
                    const double ga = side(pa, pb, c), gb = side(pa, pb, d);
                    if (ga * gb > 0.0) continue;
                    // Refine the root of side(c, d, curve(s)) on [sa, sb].
                    double lo = sa, hi = sb, flo = fa;
                    if (fa == 0.0) {
                        hi = sa;
                    } else if (fb == 0.0) {
                        lo = sb;
                    } else {
                        for (int it = 0; it < 100 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
                            const double mid = 0.5 * (lo + hi);
                            const double fm = side(c, d, curve.at(mid));
                            if ((fm > 0.0) == (flo > 0.0)) {
                                lo = mid;
                                flo = fm;
                            } else {
                                hi = mid;
                            }
                        }
                    }
                    const double sHit = 0.5 * (lo + hi);
                    if (sHit <= 0.0) continue;
                    const SpacetimePoint hp = curve.at(sHit);
                    const double dx = d.x - c.x, dt = d.t - c.t;
                    double w = ((hp.x - c.x) * dx + (hp.t - c.t) * dt) / (dx * dx + dt * dt);
                    w = std::clamp(w, 0.0, 1.0);
                    double lambda = na.lambda + w * (nb.lambda - na.lambda);
                    if (lambda >= 1.0) lambda -= 1.0;
                    if (!best || sHit < best->s) best = CurveLeafHit{sHit, hp, lambda};
                }
            }
            if (best) return best;
        }
    }
    return std::nullopt;
}

} // namespace foliate
