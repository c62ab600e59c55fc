#include "foliate/wavefield.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <numbers>

#include "foliate/errors.hpp"
#include "foliate/parallel.hpp"

namespace foliate {

namespace {

// exp(-i(w t - k x))
Complex plane_wave(double omega, double k, SpacetimePoint p)
{
    const double phase = -(omega * p.t - k * p.x);
    return {std::cos(phase), std::sin(phase)};
}

void check_box(double mass, double boxLength)
{
    if (!std::isfinite(boxLength) || boxLength <= 0.0)
        throw InvalidPacket("boxLength must be finite and > 0");
    if (!std::isfinite(mass) || mass < 0.0)
        throw InvalidPacket("mass must be finite and >= 0");
}

[[maybe_unused]] bool negligible_imag(Complex z, double scale)
{
    return std::abs(z.imag()) <= 1e-12 * std::max(scale, 1e-300);
}

} // namespace

double wavenumber(int harmonic, double boxLength)
{
    return 2.0 * std::numbers::pi * harmonic / boxLength;
}

double frequency(int harmonic, double mass, double boxLength)
{
    const double k = wavenumber(harmonic, boxLength);
    return std::sqrt(k * k + mass * mass);
}

//---------------------------------------------------------------------------//
// ScalarWavePacket
//---------------------------------------------------------------------------//

ScalarWavePacket::ScalarWavePacket(double mass, double boxLength, std::vector<Mode> modes)
    : mass_(mass), boxLength_(boxLength)
{
    check_box(mass, boxLength);
    if (modes.empty()) throw InvalidPacket("modes: at least one mode is required");

    std::map<int, Complex> merged;
    for (const auto& m : modes) {
        if (!std::isfinite(m.coeff.real()) || !std::isfinite(m.coeff.imag()))
            throw InvalidPacket("modes: non-finite coefficient for harmonic " +
                                std::to_string(m.harmonic));
        if (mass == 0.0 && m.harmonic == 0)
            throw InvalidPacket("modes: harmonic 0 is not allowed for a massless packet");
        merged[m.harmonic] += m.coeff;
    }
    bool anyNonzero = false;
    for (const auto& [h, c] : merged) {
        modes_.push_back({h, c});
        k_.push_back(wavenumber(h, boxLength));
        omega_.push_back(frequency(h, mass, boxLength));
        anyNonzero = anyNonzero || c != Complex{};
    }
    if (!anyNonzero) throw ZeroNorm("modes: every coefficient is zero");
}

Complex ScalarWavePacket::psi(SpacetimePoint p) const
{
    Complex sum{};
    for (std::size_t j = 0; j < modes_.size(); ++j)
        sum += modes_[j].coeff * plane_wave(omega_[j], k_[j], p);
    return sum;
}

Gradient ScalarWavePacket::gradient(SpacetimePoint p) const
{
    Gradient g{};
    for (std::size_t j = 0; j < modes_.size(); ++j) {
        const Complex term = modes_[j].coeff * plane_wave(omega_[j], k_[j], p);
        g.d0 += Complex{0.0, -omega_[j]} * term;
        g.d1 += Complex{0.0, k_[j]} * term;
    }
    return g;
}

TwoVector ScalarWavePacket::current(SpacetimePoint p) const
{
    Complex psiValue{};
    Gradient g{};
    for (std::size_t j = 0; j < modes_.size(); ++j) {
        const Complex term = modes_[j].coeff * plane_wave(omega_[j], k_[j], p);
        psiValue += term;
        g.d0 += Complex{0.0, -omega_[j]} * term;
        g.d1 += Complex{0.0, k_[j]} * term;
    }
    const Complex i{0.0, 1.0};
    const Complex j0 = i * (std::conj(psiValue) * g.d0 - psiValue * std::conj(g.d0));
    const Complex j1 = i * (std::conj(psiValue) * g.d1 - psiValue * std::conj(g.d1));
    assert(negligible_imag(j0, current_scale()) && negligible_imag(j1, current_scale()));
    // j_mu -> j^mu
    return {j0.real(), -j1.real()};
}

double ScalarWavePacket::divergence(SpacetimePoint p) const
{
    // i sum_{jl} c_j* c_l [(p_j - p_l).(p_j + p_l)] exp(i(theta_j - theta_l))
    const std::size_t n = modes_.size();
    std::vector<Complex> waves(n);
    for (std::size_t j = 0; j < n; ++j)
        waves[j] = modes_[j].coeff * plane_wave(omega_[j], k_[j], p);
    Complex sum{};
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t l = 0; l < n; ++l) {
            const double shell = (omega_[j] * omega_[j] - omega_[l] * omega_[l]) -
                                 (k_[j] * k_[j] - k_[l] * k_[l]);
            sum += std::conj(waves[j]) * waves[l] * shell;
        }
    }
    return (Complex{0.0, 1.0} * sum).real();
}

double ScalarWavePacket::total_flux() const
{
    double sum = 0.0;
    for (std::size_t j = 0; j < modes_.size(); ++j)
        sum += 2.0 * omega_[j] * std::norm(modes_[j].coeff);
    return boxLength_ * sum;
}

double ScalarWavePacket::amplitude_scale() const
{
    double sum = 0.0;
    for (const auto& m : modes_) sum += std::abs(m.coeff);
    return sum;
}

double ScalarWavePacket::current_scale() const
{
    double weighted = 0.0;
    for (std::size_t j = 0; j < modes_.size(); ++j)
        weighted += std::abs(modes_[j].coeff) * (omega_[j] + std::abs(k_[j]));
    return 2.0 * amplitude_scale() * weighted;
}

double ScalarWavePacket::divergence_scale() const
{
    double sum = 0.0;
    for (std::size_t j = 0; j < modes_.size(); ++j)
        sum += std::abs(modes_[j].coeff) * (omega_[j] * omega_[j] + k_[j] * k_[j]);
    return sum * sum;
}

ScalarWavePacket normalize(const ScalarWavePacket& packet)
{
    const double flux = packet.total_flux();
    const double amp = packet.amplitude_scale();
    if (!(flux > 1e-12 * amp * amp)) throw ZeroNorm("packet flux is zero");
    const double factor = 1.0 / std::sqrt(flux);
    std::vector<Mode> modes = packet.modes();
    for (auto& m : modes) m.coeff *= factor;
    return ScalarWavePacket(packet.mass(), packet.box_length(), std::move(modes));
}

//---------------------------------------------------------------------------//
// VectorWavePacket
//---------------------------------------------------------------------------//

namespace {
constexpr std::array<double, 4> kEta{1.0, -1.0, -1.0, -1.0};

double euclidean_norm(const Polarization& eps)
{
    double s = 0.0;
    for (const auto& e : eps) s += std::norm(e);
    return std::sqrt(s);
}
} // namespace

double minkowski_norm(const Polarization& eps)
{
    double s = 0.0;
    for (std::size_t a = 0; a < 4; ++a) s += kEta[a] * std::norm(eps[a]);
    return s;
}

VectorWavePacket::VectorWavePacket(double boxLength, std::vector<VectorMode> modes)
    : boxLength_(boxLength)
{
    check_box(0.0, boxLength);
    if (modes.empty()) throw InvalidPacket("modes: at least one mode is required");

    // Merge duplicates into a single amplitude vector c*eps.
    std::map<int, Polarization> merged;
    for (const auto& m : modes) {
        if (m.harmonic == 0)
            throw InvalidPacket("modes: harmonic 0 is not allowed for a massless packet");
        auto& slot = merged[m.harmonic];
        for (std::size_t a = 0; a < 4; ++a) slot[a] += m.coeff * m.polarization[a];
    }
    bool anyNonzero = false;
    for (const auto& [h, amp] : merged) {
        // Factor the merged amplitude back as coeff * unit polarization.
        const double norm = euclidean_norm(amp);
        VectorMode vm{h, Complex{norm, 0.0}, amp};
        if (norm > 0.0)
            for (auto& e : vm.polarization) e /= norm;
        anyNonzero = anyNonzero || norm > 0.0;
        const double eta = minkowski_norm(vm.polarization);
        if (norm > 0.0 && eta >= 0.0)
            warnings_.push_back("harmonic " + std::to_string(h) +
                                ": polarization has eps*.eps >= 0; density may be non-positive");
        modes_.push_back(vm);
        k_.push_back(wavenumber(h, boxLength));
        omega_.push_back(frequency(h, 0.0, boxLength));
    }
    if (!anyNonzero) throw ZeroNorm("modes: every amplitude is zero");
}

std::array<Complex, 4> VectorWavePacket::psi(SpacetimePoint p) const
{
    std::array<Complex, 4> out{};
    for (std::size_t j = 0; j < modes_.size(); ++j) {
        const Complex w = modes_[j].coeff * plane_wave(omega_[j], k_[j], p);
        for (std::size_t a = 0; a < 4; ++a) out[a] += w * modes_[j].polarization[a];
    }
    return out;
}

TwoVector VectorWavePacket::current(SpacetimePoint p) const
{
    std::array<Complex, 4> value{}, d0{}, d1{};
    for (std::size_t j = 0; j < modes_.size(); ++j) {
        const Complex w = modes_[j].coeff * plane_wave(omega_[j], k_[j], p);
        for (std::size_t a = 0; a < 4; ++a) {
            const Complex term = w * modes_[j].polarization[a];
            value[a] += term;
            d0[a] += Complex{0.0, -omega_[j]} * term;
            d1[a] += Complex{0.0, k_[j]} * term;
        }
    }
    Complex a0{}, a1{};
    for (std::size_t a = 0; a < 4; ++a) {
        a0 += kEta[a] * std::conj(value[a]) * d0[a];
        a1 += kEta[a] * std::conj(value[a]) * d1[a];
    }
    const Complex minusI{0.0, -1.0};
    const Complex j0 = minusI * (a0 - std::conj(a0));
    const Complex j1 = minusI * (a1 - std::conj(a1));
    assert(negligible_imag(j0, current_scale()) && negligible_imag(j1, current_scale()));
    return {j0.real(), -j1.real()};
}

double VectorWavePacket::total_flux() const
{
    double sum = 0.0;
    for (std::size_t j = 0; j < modes_.size(); ++j)
        sum += -2.0 * omega_[j] * std::norm(modes_[j].coeff) *
               minkowski_norm(modes_[j].polarization);
    return boxLength_ * sum;
}

double VectorWavePacket::current_scale() const
{
    double amp = 0.0, weighted = 0.0;
    for (std::size_t j = 0; j < modes_.size(); ++j) {
        const double a = std::abs(modes_[j].coeff) * euclidean_norm(modes_[j].polarization);
        amp += a;
        weighted += a * (omega_[j] + std::abs(k_[j]));
    }
    return 2.0 * amp * weighted;
}

VectorWavePacket normalize(const VectorWavePacket& packet)
{
    const double flux = packet.total_flux();
    if (!(flux > 1e-12 * packet.current_scale() * packet.box_length()))
        throw ZeroNorm("vector packet flux is zero or negative");
    const double factor = 1.0 / std::sqrt(flux);
    std::vector<VectorMode> modes = packet.modes();
    for (auto& m : modes) m.coeff *= factor;
    return VectorWavePacket(packet.box_length(), std::move(modes));
}

//---------------------------------------------------------------------------//

std::vector<CellSample> classification_map(const CurrentField& field, const GridSpec& grid,
                                           double zeroTolRel, double classTol,
                                           unsigned threads)
{
    const bool finite = std::isfinite(grid.t0) && std::isfinite(grid.t1) &&
                        std::isfinite(grid.x0) && std::isfinite(grid.x1);
    if (!finite || grid.nT < 2 || grid.nX < 2 || !(grid.t1 > grid.t0) || !(grid.x1 > grid.x0))
        throw BadGrid("grid: ranges must be non-empty and nT, nX >= 2");

    const double zeroTol = zeroTolRel * field.current_scale();
    const auto nT = static_cast<std::size_t>(grid.nT);
    const auto nX = static_cast<std::size_t>(grid.nX);
    std::vector<CellSample> cells(nT * nX);
    parallel_for(nT, threads, [&](std::size_t it) {
        const double t = grid.t0 + (grid.t1 - grid.t0) * static_cast<double>(it) /
                                       static_cast<double>(nT - 1);
        for (std::size_t ix = 0; ix < nX; ++ix) {
            const double x = grid.x0 + (grid.x1 - grid.x0) * static_cast<double>(ix) /
                                           static_cast<double>(nX);
            CellSample& cell = cells[it * nX + ix];
            cell.point = {t, x};
            cell.current = field.current(cell.point);
            cell.cls = classify(cell.current, zeroTol, classTol);
        }
    });
    return cells;
}

} // namespace foliate
