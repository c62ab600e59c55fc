#include "foliate/manybody.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <tuple>

#include "foliate/errors.hpp"
#include "foliate/foliation.hpp"

namespace foliate {

namespace {

Complex plane_wave(double omega, double k, SpacetimePoint p)
{
    const double phase = -(omega * p.t - k * p.x);
    return {std::cos(phase), std::sin(phase)};
}

double factorial(std::size_t n)
{
    double f = 1.0;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

struct SlotFactor {
    int harmonic;
    double t, x;
    Complex wave;
};

// prod_a wave_a multiplied in an order that depends only on the multiset of
// (harmonic, point) pairs, so permuting slots gives identical bits.
Complex canonical_product(std::vector<SlotFactor>& f)
{
    std::sort(f.begin(), f.end(), [](const SlotFactor& a, const SlotFactor& b) {
        return std::tie(a.harmonic, a.t, a.x) < std::tie(b.harmonic, b.t, b.x);
    });
    Complex p{1.0, 0.0};
    for (const auto& s : f) p *= s.wave;
    return p;
}

// Sum in sorted order: the result depends only on the multiset of values.
double sorted_sum(std::vector<double>& v)
{
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum;
}

} // namespace

double RankNCurrent::at(std::span<const int> indices) const
{
    std::size_t flat = 0;
    for (int mu : indices) flat = 2 * flat + static_cast<std::size_t>(mu);
    return components[flat];
}

//---------------------------------------------------------------------------//

ManyBodyPacket::ManyBodyPacket(std::size_t n, double mass, double boxLength,
                               std::vector<ManyBodyTerm> terms)
    : n_(n), mass_(mass), boxLength_(boxLength), terms_(std::move(terms))
{
    if (n_ == 1) {
        std::vector<Mode> modes;
        for (const auto& t : terms_) modes.push_back({t.harmonics[0], t.coeff});
        single_.emplace(mass_, boxLength_, std::move(modes));
    }
}

ManyBodyPacket ManyBodyPacket::symmetrize(std::size_t n, double mass, double boxLength,
                                          const std::vector<ManyBodyTerm>& rawTerms)
{
    if (n < 1) throw ArityMismatch("manybody: n must be >= 1");
    if (!std::isfinite(boxLength) || boxLength <= 0.0)
        throw InvalidPacket("boxLength must be finite and > 0");
    if (!std::isfinite(mass) || mass < 0.0) throw InvalidPacket("mass must be finite and >= 0");
    if (rawTerms.empty()) throw InvalidPacket("manybody.terms: at least one term is required");

    const double weight = 1.0 / factorial(n);
    std::map<std::vector<int>, Complex> merged;
    for (std::size_t r = 0; r < rawTerms.size(); ++r) {
        const auto& term = rawTerms[r];
        if (term.harmonics.size() != n)
            throw ArityMismatch("manybody.terms[" + std::to_string(r) + "]: expected " +
                                std::to_string(n) + " harmonics, got " +
                                std::to_string(term.harmonics.size()));
        if (!std::isfinite(term.coeff.real()) || !std::isfinite(term.coeff.imag()))
            throw InvalidPacket("manybody.terms[" + std::to_string(r) + "]: non-finite coefficient");
        for (int h : term.harmonics)
            if (mass == 0.0 && h == 0)
                throw InvalidPacket("manybody.terms[" + std::to_string(r) +
                                    "]: harmonic 0 is not allowed for a massless packet");
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            std::vector<int> key(n);
            for (std::size_t a = 0; a < n; ++a) key[a] = term.harmonics[perm[a]];
            merged[key] += term.coeff * weight;
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    std::vector<ManyBodyTerm> terms;
    for (auto& [key, c] : merged)
        if (c != Complex{}) terms.push_back({c, key});
    if (terms.empty()) throw ZeroNorm("manybody: symmetrized state vanishes");
    return ManyBodyPacket(n, mass, boxLength, std::move(terms));
}

Complex ManyBodyPacket::psi(std::span<const SpacetimePoint> points) const
{
    if (points.size() != n_) throw ArityMismatch("psi: expected one point per particle");
    if (single_) return single_->psi(points[0]);
    std::vector<double> re, im;
    re.reserve(terms_.size());
    im.reserve(terms_.size());
    std::vector<SlotFactor> f(n_);
    for (const auto& term : terms_) {
        for (std::size_t a = 0; a < n_; ++a) {
            const int h = term.harmonics[a];
            f[a] = {h, points[a].t, points[a].x,
                    plane_wave(frequency(h, mass_, boxLength_), wavenumber(h, boxLength_),
                               points[a])};
        }
        const Complex v = term.coeff * canonical_product(f);
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    return {sorted_sum(re), sorted_sum(im)};
}

RankNCurrent ManyBodyPacket::current(std::span<const SpacetimePoint> points) const
{
    if (points.size() != n_) throw ArityMismatch("current_n: expected one point per particle");
    RankNCurrent out{n_, std::vector<double>(std::size_t{1} << n_, 0.0)};
    if (single_) {
        const TwoVector j = single_->current(points[0]);
        out.components = {j.v0, j.v1};
        return out;
    }

    const std::size_t nt = terms_.size();
    std::vector<Complex> amp(nt);
    std::vector<std::vector<TwoVector>> mom(nt, std::vector<TwoVector>(n_));
    std::vector<SlotFactor> f(n_);
    for (std::size_t T = 0; T < nt; ++T) {
        for (std::size_t a = 0; a < n_; ++a) {
            const int h = terms_[T].harmonics[a];
            const double w = frequency(h, mass_, boxLength_), k = wavenumber(h, boxLength_);
            mom[T][a] = {w, k};
            f[a] = {h, points[a].t, points[a].x, plane_wave(w, k, points[a])};
        }
        amp[T] = terms_[T].coeff * canonical_product(f);
    }

    // Pair contributions are summed in sorted order so that the result is
    // independent of the slot labelling.
    std::vector<double> contrib(nt * nt);
    std::vector<double> factors(n_);
    for (std::size_t flat = 0; flat < out.components.size(); ++flat) {
        for (std::size_t S = 0; S < nt; ++S) {
            for (std::size_t T = 0; T < nt; ++T) {
                for (std::size_t a = 0; a < n_; ++a) {
                    const int mu = static_cast<int>((flat >> (n_ - 1 - a)) & 1U);
                    const TwoVector p = mom[S][a] + mom[T][a];
                    factors[a] = mu == 0 ? p.v0 : p.v1;
                }
                std::sort(factors.begin(), factors.end());
                double prod = 1.0;
                for (double v : factors) prod *= v;
                contrib[S * nt + T] = (std::conj(amp[S]) * amp[T]).real() * prod;
            }
        }
        out.components[flat] = sorted_sum(contrib);
    }
    return out;
}

double ManyBodyPacket::total_probability() const
{
    if (single_) return single_->total_flux();
    double sum = 0.0;
    for (const auto& term : terms_) {
        double weight = std::norm(term.coeff);
        for (int h : term.harmonics) weight *= 2.0 * boxLength_ * frequency(h, mass_, boxLength_);
        sum += weight;
    }
    return sum;
}

double ManyBodyPacket::current_scale() const
{
    double amp = 0.0, pmax = 0.0;
    for (const auto& term : terms_) {
        amp += std::abs(term.coeff);
        for (int h : term.harmonics)
            pmax = std::max(pmax, frequency(h, mass_, boxLength_) +
                                      std::abs(wavenumber(h, boxLength_)));
    }
    return amp * amp * std::pow(2.0 * pmax, static_cast<double>(n_));
}

ManyBodyPacket normalize(const ManyBodyPacket& packet)
{
    if (const auto& single = packet.single_particle()) {
        const ScalarWavePacket normalized = normalize(*single);
        std::vector<ManyBodyTerm> terms;
        for (const auto& m : normalized.modes()) terms.push_back({m.coeff, {m.harmonic}});
        return ManyBodyPacket::symmetrize(1, packet.mass(), packet.box_length(), terms);
    }
    const double total = packet.total_probability();
    if (!(total > 0.0)) throw ZeroNorm("manybody: total probability is zero");
    const double factor = 1.0 / std::sqrt(total);
    std::vector<ManyBodyTerm> terms = packet.terms();
    for (auto& t : terms) t.coeff *= factor;
    return ManyBodyPacket::symmetrize(packet.particle_count(), packet.mass(), packet.box_length(),
                                      terms);
}

//---------------------------------------------------------------------------//

TwoVector marginal_current(const ManyBodyPacket& packet, std::size_t slot, SpacetimePoint point,
                           std::span<const double> otherSliceTimes, std::size_t quadPoints)
{
    const std::size_t n = packet.particle_count();
    if (n < 2) throw ArityMismatch("marginal_current: needs n >= 2");
    if (slot >= n) throw ArityMismatch("marginal_current: slot out of range");
    if (otherSliceTimes.size() != n - 1)
        throw ArityMismatch("marginal_current: expected n-1 slice times");

    if (quadPoints == 0) {
        int lo = 0, hi = 0;
        bool first = true;
        for (const auto& t : packet.terms())
            for (int h : t.harmonics) {
                lo = first ? h : std::min(lo, h);
                hi = first ? h : std::max(hi, h);
                first = false;
            }
        quadPoints = 2 * static_cast<std::size_t>(hi - lo) + 8;
    }

    const double L = packet.box_length();
    const double dx = L / static_cast<double>(quadPoints);
    std::size_t cells = 1;
    for (std::size_t b = 0; b + 1 < n; ++b) cells *= quadPoints;

    std::vector<SpacetimePoint> points(n);
    points[slot] = point;
    TwoVector sum{};
    for (std::size_t cell = 0; cell < cells; ++cell) {
        std::size_t rest = cell;
        std::size_t other = 0;
        for (std::size_t a = 0; a < n; ++a) {
            if (a == slot) continue;
            const std::size_t q = rest % quadPoints;
            rest /= quadPoints;
            points[a] = {otherSliceTimes[other++], dx * static_cast<double>(q)};
        }
        const RankNCurrent j = packet.current(points);
        // Slot index = mu, all other indices 0.
        const std::size_t bit = std::size_t{1} << (n - 1 - slot);
        sum.v0 += j.components[0];
        sum.v1 += j.components[bit];
    }
    const double weight = std::pow(dx, static_cast<double>(n - 1));
    return weight * sum;
}

MarginalField::MarginalField(ManyBodyPacket packet, std::size_t slot,
                             std::vector<double> otherSliceTimes)
    : packet_(std::move(packet)), slot_(slot), sliceTimes_(std::move(otherSliceTimes))
{
    if (packet_.particle_count() < 2) throw ArityMismatch("MarginalField: needs n >= 2");
    if (sliceTimes_.size() != packet_.particle_count() - 1)
        throw ArityMismatch("MarginalField: expected n-1 slice times");
}

TwoVector MarginalField::current(SpacetimePoint p) const
{
    return marginal_current(packet_, slot_, p, sliceTimes_);
}

double MarginalField::current_scale() const
{
    return packet_.current_scale() *
           std::pow(packet_.box_length(), static_cast<double>(packet_.particle_count() - 1));
}

//---------------------------------------------------------------------------//

namespace {

// Per-unit-lambda covariant element and point of a leaf at lambda.
std::pair<TwoVector, SpacetimePoint> leaf_frame(const Hypersurface& leaf, double lambda)
{
    const double l = lambda - std::floor(lambda);
    const std::size_t i = leaf.segment_index(l);
    return {surface_element(leaf, i).per_lambda(), leaf.point(l)};
}

double contract(const RankNCurrent& j, std::span<const TwoVector> elements)
{
    double sum = 0.0;
    for (std::size_t flat = 0; flat < j.components.size(); ++flat) {
        double w = 1.0;
        for (std::size_t a = 0; a < j.n; ++a) {
            const int mu = static_cast<int>((flat >> (j.n - 1 - a)) & 1U);
            w *= mu == 0 ? elements[a].v0 : elements[a].v1;
        }
        sum += w * j.components[flat];
    }
    return sum;
}

} // namespace

double probability_density_n(const ManyBodyPacket& packet, std::span<const Hypersurface> leaves,
                             std::span<const double> lambdas)
{
    const std::size_t n = packet.particle_count();
    if (leaves.size() != n || lambdas.size() != n)
        throw ArityMismatch("probability_density_n: one leaf and one lambda per particle");
    if (const auto& single = packet.single_particle())
        return probability_density(*single, leaves[0], lambdas[0]);
    std::vector<TwoVector> elements(n);
    std::vector<SpacetimePoint> points(n);
    for (std::size_t a = 0; a < n; ++a)
        std::tie(elements[a], points[a]) = leaf_frame(leaves[a], lambdas[a]);
    return std::abs(contract(packet.current(points), elements));
}

double probability_n(const ManyBodyPacket& packet, std::span<const Hypersurface> leaves,
                     std::span<const std::pair<double, double>> ranges,
                     const QuadratureOptions& quad)
{
    const std::size_t n = packet.particle_count();
    if (leaves.size() != n || ranges.size() != n)
        throw ArityMismatch("probability_n: one leaf and one range per particle");
    for (const auto& [lo, hi] : ranges)
        if (!(0.0 <= lo && lo <= hi && hi <= 1.0))
            throw InvalidSurface("probability_n: need 0 <= lo <= hi <= 1");
    for (const auto& [lo, hi] : ranges)
        if (lo == hi) return 0.0;
    if (const auto& single = packet.single_particle())
        return probability(*single, leaves[0], ranges[0].first, ranges[0].second, quad);

    std::vector<double> lambdas(n);
    // Integrate slot a segment by segment so the integrand is smooth.
    std::function<double(std::size_t)> level = [&](std::size_t a) -> double {
        if (a == n) return probability_density_n(packet, leaves, lambdas);
        const Hypersurface& leaf = leaves[a];
        double total = 0.0;
        for (std::size_t i = 0; i < leaf.segment_count(); ++i) {
            const double lo = std::max(ranges[a].first, leaf.node(i).lambda);
            const double hi = std::min(ranges[a].second, leaf.node(i + 1).lambda);
            if (!(hi > lo)) continue;
            total += integrate(
                [&](double l) {
                    lambdas[a] = l;
                    return level(a + 1);
                },
                lo, hi, quad);
        }
        return total;
    };
    return level(0);
}

} // namespace foliate
