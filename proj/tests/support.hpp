#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "foliate/wavefield.hpp"

namespace testing_support {

using namespace foliate;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline ScalarWavePacket plane_wave(Complex c = 1.0) { return {1.0, kTwoPi, {{1, c}}}; }

inline ScalarWavePacket standing_wave(double c = 1.0)
{
    return {1.0, kTwoPi, {{1, c}, {-1, c}}};
}

inline ScalarWavePacket skewed() { return {1.0, kTwoPi, {{0, 1.0}, {10, 0.2}}}; }

inline ScalarWavePacket random_packet(std::mt19937_64& rng, int maxModes = 8)
{
    std::uniform_int_distribution<int> count(1, maxModes);
    std::uniform_int_distribution<int> harmonic(-6, 6);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> mass(0.2, 2.0);
    std::uniform_real_distribution<double> box(2.0, 10.0);
    const int n = count(rng);
    std::vector<Mode> modes;
    for (int i = 0; i < n; ++i) modes.push_back({harmonic(rng), {amp(rng), amp(rng)}});
    return {mass(rng), box(rng), modes};
}

inline SpacetimePoint random_point(std::mt19937_64& rng, double L)
{
    std::uniform_real_distribution<double> t(-5.0, 5.0);
    std::uniform_real_distribution<double> x(0.0, L);
    return {t(rng), x(rng)};
}

inline double rel_err(double a, double b, double scale)
{
    return std::abs(a - b) / std::max(scale, 1e-300);
}

} // namespace testing_support
