#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace foliate {

struct QuadratureOptions {
    double tol = 1e-9;
    int maxDepth = 14; // at most 2^14 subintervals per call
};

namespace detail {

inline constexpr std::array<double, 5> kGaussNodes{
    -0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kGaussWeights{
    0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
    0.2369268850561891};

struct Estimate {
    double value = 0.0;
    double magnitude = 0.0; // integral of |f|
};

template <class F>
Estimate gauss5(F& f, double a, double b)
{
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    Estimate e;
    for (std::size_t i = 0; i < kGaussNodes.size(); ++i) {
        const double v = f(mid + half * kGaussNodes[i]);
        e.value += kGaussWeights[i] * v;
        e.magnitude += kGaussWeights[i] * std::abs(v);
    }
    e.value *= half;
    e.magnitude *= std::abs(half);
    return e;
}

template <class F>
double adaptive(F& f, double a, double b, Estimate whole, const QuadratureOptions& opt, int depth)
{
    const double mid = 0.5 * (a + b);
    const Estimate left = gauss5(f, a, mid), right = gauss5(f, mid, b);
    const double refined = left.value + right.value;
    const double scale = std::max(left.magnitude + right.magnitude, 1e-300);
    if (std::abs(refined - whole.value) <= opt.tol * scale || depth >= opt.maxDepth)
        return refined;
    return adaptive(f, a, mid, left, opt, depth + 1) + adaptive(f, mid, b, right, opt, depth + 1);
}

} // namespace detail

// Adaptive composite 5-point Gauss-Legendre on [a, b]: bisect until the
// refined estimate changes by less than tol relative to the integral of |f|.
template <class F>
double integrate(F&& f, double a, double b, const QuadratureOptions& opt = {})
{
    if (a == b) return 0.0;
    auto& fn = f;
    const detail::Estimate whole = detail::gauss5(fn, a, b);
    return detail::adaptive(fn, a, b, whole, opt, 1);
}

} // namespace foliate
