#pragma once

#include <array>
#include <string>
#include <vector>

#include "foliate/spacetime.hpp"

namespace foliate {

// One box harmonic: k = 2*pi*harmonic/L, omega = +sqrt(k^2 + m^2).
struct Mode {
    int harmonic = 0;
    Complex coeff{0.0, 0.0};
};

double wavenumber(int harmonic, double boxLength);
double frequency(int harmonic, double mass, double boxLength);

// Covariant gradient (d_0 psi, d_1 psi).
struct Gradient {
    Complex d0;
    Complex d1;
};

/// Positive-frequency Klein-Gordon packet on a periodic box:
///   psi(t, x) = sum_j c_j exp(-i(w_j t - k_j x)).
///
/// Duplicate harmonics are merged and modes are kept sorted by harmonic, so
/// two packets with the same content evaluate bit-identically.
class ScalarWavePacket final : public CurrentField {
  public:
    ScalarWavePacket(double mass, double boxLength, std::vector<Mode> modes);

    double mass() const { return mass_; }
    double box_length() const override { return boxLength_; }
    const std::vector<Mode>& modes() const { return modes_; }
    double k(std::size_t j) const { return k_[j]; }
    double omega(std::size_t j) const { return omega_[j]; }

    Complex psi(SpacetimePoint p) const;
    Gradient gradient(SpacetimePoint p) const;
    // Contravariant j^mu = i psi* <-d^mu-> psi.
    TwoVector current(SpacetimePoint p) const override;
    // d_mu j^mu from the closed-form double mode sum.
    double divergence(SpacetimePoint p) const;

    // L * sum_j 2 w_j |c_j|^2: the flux through any closed leaf.
    double total_flux() const;
    double amplitude_scale() const;
    double current_scale() const override;
    // (sum_j |c_j| (w_j^2 + k_j^2))^2, the reference magnitude for divergence.
    double divergence_scale() const;

  private:
    double mass_;
    double boxLength_;
    std::vector<Mode> modes_;
    std::vector<double> k_;
    std::vector<double> omega_;
};

ScalarWavePacket normalize(const ScalarWavePacket& packet);

using Polarization = std::array<Complex, 4>;

struct VectorMode {
    int harmonic = 0;
    Complex coeff{0.0, 0.0};
    Polarization polarization{};
};

// eps* . eps with signature (+,-,-,-).
double minkowski_norm(const Polarization& eps);

/// Massless vector packet psi^alpha = sum_j c_j eps_j^alpha exp(-i(w_j t - k_j x))
/// with current j_mu = -i psi*_alpha <-d_mu-> psi^alpha.
class VectorWavePacket final : public CurrentField {
  public:
    VectorWavePacket(double boxLength, std::vector<VectorMode> modes);

    double box_length() const override { return boxLength_; }
    const std::vector<VectorMode>& modes() const { return modes_; }
    // Non-fatal construction diagnostics (non-negative eps*.eps).
    const std::vector<std::string>& warnings() const { return warnings_; }

    std::array<Complex, 4> psi(SpacetimePoint p) const;
    TwoVector current(SpacetimePoint p) const override;
    double total_flux() const;
    double current_scale() const override;

  private:
    double boxLength_;
    std::vector<VectorMode> modes_;
    std::vector<double> k_;
    std::vector<double> omega_;
    std::vector<std::string> warnings_;
};

VectorWavePacket normalize(const VectorWavePacket& packet);

struct GridSpec {
    double t0 = 0.0;
    double t1 = 1.0;
    double x0 = 0.0;
    double x1 = 1.0;
    int nT = 2;
    int nX = 2;
};

struct CellSample {
    SpacetimePoint point;
    TwoVector current;
    CausalClass cls = CausalClass::Zero;
};

// Row-major (t outer, x inner) samples. t is sampled inclusively on
// [t0, t1]; x is sampled on the half-open periodic range [x0, x1).
// zeroTol is relative to field.current_scale().
std::vector<CellSample> classification_map(const CurrentField& field, const GridSpec& grid,
                                           double zeroTolRel = kDefaultZeroTol,
                                           double classTol = kDefaultClassTol,
                                           unsigned threads = 1);

} // namespace foliate
