#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "foliate/hypersurface.hpp"
#include "foliate/quadrature.hpp"
#include "foliate/spacetime.hpp"
#include "foliate/wavefield.hpp"

namespace foliate {

// coeff * prod_a exp(-i(w_a t_a - k_a x_a)) with slot a in harmonics[a].
struct ManyBodyTerm {
    Complex coeff{0.0, 0.0};
    std::vector<int> harmonics;
};

// Dense rank-n contravariant tensor; slot 0 is the most significant index bit.
struct RankNCurrent {
    std::size_t n = 0;
    std::vector<double> components;

    double at(std::span<const int> indices) const;
    double at(std::initializer_list<int> indices) const
    {
        return at(std::span<const int>(indices.begin(), indices.size()));
    }
};

/// Bosonic n-particle packet kept in symmetric canonical form: one term per
/// ordered harmonic tuple, sorted lexicographically, with equal coefficients
/// on every permutation of a tuple.
class ManyBodyPacket {
  public:
    // Applies the averaging projector (1/n!) sum_sigma. Idempotent.
    static ManyBodyPacket symmetrize(std::size_t n, double mass, double boxLength,
                                     const std::vector<ManyBodyTerm>& rawTerms);

    std::size_t particle_count() const { return n_; }
    double mass() const { return mass_; }
    double box_length() const { return boxLength_; }
    const std::vector<ManyBodyTerm>& terms() const { return terms_; }

    Complex psi(std::span<const SpacetimePoint> points) const;
    // j^{mu_1...mu_n} = i^n psi* <-d_1-> ... <-d_n-> psi, indices raised.
    RankNCurrent current(std::span<const SpacetimePoint> points) const;
    // Integral of j^{0...0} over t = const slices in every slot.
    double total_probability() const;
    double current_scale() const;

    // The n = 1 packet as a wavefield packet (same canonical modes).
    const std::optional<ScalarWavePacket>& single_particle() const { return single_; }

  private:
    ManyBodyPacket(std::size_t n, double mass, double boxLength, std::vector<ManyBodyTerm> terms);

    std::size_t n_;
    double mass_;
    double boxLength_;
    std::vector<ManyBodyTerm> terms_;
    std::optional<ScalarWavePacket> single_;
};

ManyBodyPacket normalize(const ManyBodyPacket& packet);

// Marginal one-particle current of `slot` at `point`: every other slot b is
// integrated over its t = otherSliceTimes[b'] slice with element (dx, 0),
// using the periodic trapezoid rule with `quadPoints` nodes per slot
// (0 picks a count that is exact for the packet's harmonic span).
TwoVector marginal_current(const ManyBodyPacket& packet, std::size_t slot, SpacetimePoint point,
                           std::span<const double> otherSliceTimes, std::size_t quadPoints = 0);

class MarginalField final : public CurrentField {
  public:
    MarginalField(ManyBodyPacket packet, std::size_t slot, std::vector<double> otherSliceTimes);

    TwoVector current(SpacetimePoint p) const override;
    double box_length() const override { return packet_.box_length(); }
    double current_scale() const override;

  private:
    ManyBodyPacket packet_;
    std::size_t slot_;
    std::vector<double> sliceTimes_;
};

// |n~_{mu_1}(lambda_1) ... n~_{mu_n}(lambda_n) j^{mu_1...mu_n}| per unit
// lambda_1 ... lambda_n, one leaf per slot.
double probability_density_n(const ManyBodyPacket& packet, std::span<const Hypersurface> leaves,
                             std::span<const double> lambdas);

// Nested adaptive quadrature of probability_density_n over the ranges.
double probability_n(const ManyBodyPacket& packet, std::span<const Hypersurface> leaves,
                     std::span<const std::pair<double, double>> ranges,
                     const QuadratureOptions& quad = {});

} // namespace foliate
