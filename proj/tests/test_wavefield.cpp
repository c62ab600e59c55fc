#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "foliate/errors.hpp"
#include "foliate/wavefield.hpp"
#include "support.hpp"

using namespace foliate;
using namespace testing_support;
using std::numbers::pi;
using std::numbers::sqrt2;

TEST_CASE("psi of a single mode")
{
    const auto p = plane_wave();
    CHECK(p.psi({0, 0}) == Complex{1.0, 0.0});
    const Complex v = p.psi({0, pi});
    CHECK(v.real() == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(v.imag()) < 1e-15);
}

TEST_CASE("psi of the standing wave is 2 cos x")
{
    const auto p = standing_wave();
    for (double x : {0.0, pi / 3, 1.1, 4.0}) {
        const Complex v = p.psi({0, x});
        CHECK(std::abs(v - Complex{2.0 * std::cos(x), 0.0}) < 1e-14);
    }
    CHECK(std::abs(p.psi({0, pi / 3}) - 1.0) < 1e-14);
}

TEST_CASE("gradient closed form and finite differences")
{
    const auto p = plane_wave();
    const Gradient g = p.gradient({0, 0});
    CHECK(std::abs(g.d0 - Complex{0, -sqrt2}) < 1e-15);
    CHECK(std::abs(g.d1 - Complex{0, 1.0}) < 1e-15);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto packet = random_packet(rng);
        const double L = packet.box_length();
        const auto q = random_point(rng, L);
        const Gradient a = packet.gradient(q);
        const Gradient b = packet.gradient({q.t, q.x + L});
        CHECK(std::abs(a.d0 - b.d0) < 1e-11 * packet.amplitude_scale() * 10);
        const double h = 1e-5 * std::max(1.0, L);
        const Complex fd0 = (packet.psi({q.t + h, q.x}) - packet.psi({q.t - h, q.x})) / (2 * h);
        const Complex fd1 = (packet.psi({q.t, q.x + h}) - packet.psi({q.t, q.x - h})) / (2 * h);
        double scale = 0;
        for (std::size_t j = 0; j < packet.modes().size(); ++j)
            scale += std::abs(packet.modes()[j].coeff) * packet.omega(j);
        CHECK(std::abs(fd0 - a.d0) < 1e-6 * scale);
        CHECK(std::abs(fd1 - a.d1) < 1e-6 * scale);
    }
}

TEST_CASE("single mode current is 2|c|^2 (omega, k) and future timelike")
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> harmonic(-9, 9);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 40; ++trial) {
        const Complex c{u(rng), u(rng)};
        const int h = harmonic(rng);
        const ScalarWavePacket p(0.7, 3.0, {{h, c}});
        const double w = frequency(h, 0.7, 3.0), k = wavenumber(h, 3.0);
        const TwoVector j = p.current(random_point(rng, 3.0));
        const double scale = 2 * std::norm(c) * w;
        CHECK(rel_err(j.v0, 2 * std::norm(c) * w, scale) < 1e-12);
        CHECK(rel_err(j.v1, 2 * std::norm(c) * k, scale) < 1e-12);
        CHECK(classify(j) == CausalClass::TimelikeFuture);
    }
}

TEST_CASE("standing wave current")
{
    const auto p = standing_wave();
    for (double x : {0.0, 0.4, 1.3, 2.9, 5.0}) {
        const TwoVector j = p.current({0.8, x});
        CHECK(std::abs(j.v1) < 1e-13);
        CHECK(j.v0 == doctest::Approx(8 * sqrt2 * std::cos(x) * std::cos(x)).epsilon(1e-12));
    }
    const TwoVector z = p.current({0, pi / 2});
    CHECK(classify(z, 1e-12 * p.current_scale()) == CausalClass::Zero);
}

TEST_CASE("current is periodic in x")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto packet = random_packet(rng);
        const auto q = random_point(rng, packet.box_length());
        const TwoVector a = packet.current(q);
        const TwoVector b = packet.current({q.t, q.x + packet.box_length()});
        CHECK(std::abs(a.v0 - b.v0) < 1e-11 * packet.current_scale());
        CHECK(std::abs(a.v1 - b.v1) < 1e-11 * packet.current_scale());
    }
}

TEST_CASE("divergence vanishes on random packets")
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto packet = random_packet(rng, 5);
        double worst = 0;
        for (int i = 0; i < 100; ++i)
            worst = std::max(worst, std::abs(packet.divergence(random_point(rng, packet.box_length()))));
        CHECK(worst < 1e-10 * packet.divergence_scale());
    }
    CHECK(plane_wave({0.3, 0.9}).divergence({1.2, 0.4}) == 0.0);
}

TEST_CASE("divergence agrees with finite differences of the current")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const auto packet = random_packet(rng);
        const auto q = random_point(rng, packet.box_length());
        const double h = 1e-5;
        const double fd = (packet.current({q.t + h, q.x}).v0 - packet.current({q.t - h, q.x}).v0 +
                           packet.current({q.t, q.x + h}).v1 - packet.current({q.t, q.x - h}).v1) /
                          (2 * h);
        CHECK(std::abs(fd) < 1e-6 * packet.divergence_scale());
    }
}

TEST_CASE("normalize")
{
    const auto n = normalize(plane_wave());
    CHECK(std::norm(n.modes()[0].coeff) == doctest::Approx(1.0 / (4 * sqrt2 * pi)).epsilon(1e-14));
    CHECK(n.current({0.3, 1.0}).v0 == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-13));
    CHECK(n.total_flux() == doctest::Approx(1.0).epsilon(1e-14));

    const auto twice = normalize(n);
    CHECK(std::abs(twice.modes()[0].coeff - n.modes()[0].coeff) < 1e-12);

    CHECK(plane_wave().total_flux() == doctest::Approx(4 * sqrt2 * pi).epsilon(1e-14));
    CHECK_THROWS_AS(ScalarWavePacket(1.0, 1.0, {{1, 0.0}, {2, 0.0}}), ZeroNorm);
}

TEST_CASE("normalization closed form matches a Riemann sum over a slice")
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const auto packet = normalize(random_packet(rng));
        const double L = packet.box_length();
        const int panels = 10000;
        double sum = 0;
        for (int i = 0; i < panels; ++i) sum += packet.current({0.7, L * i / panels}).v0;
        CHECK(std::abs(sum * L / panels - 1.0) < 1e-8);
    }
}

TEST_CASE("packet validation")
{
    CHECK_THROWS_AS(ScalarWavePacket(1.0, kTwoPi, {}), InvalidPacket);
    CHECK_THROWS_AS(ScalarWavePacket(0.0, kTwoPi, {{0, 1.0}}), InvalidPacket);
    CHECK_THROWS_AS(ScalarWavePacket(1.0, -1.0, {{1, 1.0}}), InvalidPacket);
    const ScalarWavePacket merged(1.0, kTwoPi, {{2, 0.5}, {-1, 1.0}, {2, 0.25}});
    REQUIRE(merged.modes().size() == 2);
    CHECK(merged.modes()[0].harmonic == -1);
    CHECK(merged.modes()[1].coeff == Complex{0.75, 0.0});
}

TEST_CASE("classify")
{
    CHECK(classify({1, 0}) == CausalClass::TimelikeFuture);
    CHECK(classify({1, 1}) == CausalClass::Null);
    CHECK(classify({0.3, 1.0}) == CausalClass::Spacelike);
    CHECK(classify({-1, 0.2}) == CausalClass::TimelikePast);
    CHECK(classify({0, 0}) == CausalClass::Zero);
    CHECK(to_string(CausalClass::TimelikePast) == "TimelikePast");
}

TEST_CASE("classification maps")
{
    GridSpec g{0, 1, 0, kTwoPi, 5, 16};
    for (const auto& cell : classification_map(plane_wave(), g))
        CHECK(cell.cls == CausalClass::TimelikeFuture);

    g.nX = 8;
    const auto cells = classification_map(standing_wave(), g);
    for (const auto& cell : cells) {
        const int col = static_cast<int>(std::lround(cell.point.x / (kTwoPi / 8)));
        const bool node = col == 2 || col == 6;
        CHECK((cell.cls == CausalClass::Zero) == node);
    }

    CHECK_THROWS_AS(classification_map(plane_wave(), {0, 1, 0, 1, 1, 4}), BadGrid);
    CHECK_THROWS_AS(classification_map(plane_wave(), {1, 1, 0, 1, 4, 4}), BadGrid);
}

TEST_CASE("skewed packet: spacelike cells, never past-timelike")
{
    // Two-mode currents move on a segment between a future-timelike endpoint
    // and a non-past endpoint, so the past cone is out of reach.
    const auto packet = skewed();
    const auto cells = classification_map(packet, {0, kTwoPi, 0, kTwoPi, 101, 256});
    int spacelike = 0, past = 0, future = 0;
    for (const auto& c : cells) {
        spacelike += c.cls == CausalClass::Spacelike;
        past += c.cls == CausalClass::TimelikePast;
        future += c.cls == CausalClass::TimelikeFuture;
    }
    CHECK(spacelike > 0);
    CHECK(future > 0);
    CHECK(past == 0);
}

TEST_CASE("three-mode packets do reach the past cone")
{
    const ScalarWavePacket packet(1.0, kTwoPi, {{4, 0.1}, {-10, 1.0}, {-12, 1.0}});
    const auto cells = classification_map(packet, {0, kTwoPi, 0, kTwoPi, 64, 64});
    int past = 0;
    for (const auto& c : cells) past += c.cls == CausalClass::TimelikePast;
    CHECK(past > 0);
}

TEST_CASE("classification map is independent of thread count")
{
    const auto packet = skewed();
    const GridSpec g{0, 3, 0, kTwoPi, 33, 47};
    const auto a = classification_map(packet, g, 1e-12, 1e-9, 1);
    const auto b = classification_map(packet, g, 1e-12, 1e-9, 8);
    REQUIRE(a.size() == b.size());
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i)
        same = same && a[i].current.v0 == b[i].current.v0 && a[i].current.v1 == b[i].current.v1 &&
               a[i].cls == b[i].cls;
    CHECK(same);
}

TEST_CASE("transverse photon mode matches the scalar mode")
{
    const Complex c{0.4, -0.3};
    const VectorWavePacket photon(kTwoPi, {{2, c, {0, 0, 1, 0}}});
    const ScalarWavePacket scalar(0.0, kTwoPi, {{2, c}});
    for (double x : {0.0, 1.0, 3.3}) {
        const TwoVector a = photon.current({0.5, x});
        const TwoVector b = scalar.current({0.5, x});
        CHECK(std::abs(a.v0 - b.v0) < 1e-12 * scalar.current_scale());
        CHECK(std::abs(a.v1 - b.v1) < 1e-12 * scalar.current_scale());
    }
    CHECK(photon.warnings().empty());
    CHECK(normalize(photon).total_flux() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("photon polarization warnings")
{
    CHECK(minkowski_norm({1, 0, 0, 0}) == 1.0);
    CHECK(minkowski_norm({0, 0, 1, 0}) == -1.0);
    const VectorWavePacket timelike(kTwoPi, {{1, 1.0, {1, 0, 0, 0}}});
    CHECK(timelike.warnings().size() == 1);
    CHECK_THROWS_AS(VectorWavePacket(kTwoPi, {{0, 1.0, {0, 0, 1, 0}}}), InvalidPacket);
}
