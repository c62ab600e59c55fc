#pragma once

#include <complex>
#include <string_view>

namespace foliate {

using Complex = std::complex<double>;

// 1+1 Minkowski spacetime, signature (+,-). x is unwrapped unless a caller
// reduces it modulo the box length.
struct SpacetimePoint {
    double t = 0.0;
    double x = 0.0;
};

// Contravariant components (v0, v1).
struct TwoVector {
    double v0 = 0.0;
    double v1 = 0.0;

    double square() const { return v0 * v0 - v1 * v1; }
    TwoVector lowered() const { return {v0, -v1}; }
    // v^mu w_mu with both arguments contravariant.
    double dot(TwoVector w) const { return v0 * w.v0 - v1 * w.v1; }
    double l1() const;
};

inline TwoVector operator+(TwoVector a, TwoVector b) { return {a.v0 + b.v0, a.v1 + b.v1}; }
inline TwoVector operator-(TwoVector a, TwoVector b) { return {a.v0 - b.v0, a.v1 - b.v1}; }
inline TwoVector operator*(double s, TwoVector a) { return {s * a.v0, s * a.v1}; }
inline TwoVector operator-(TwoVector a) { return {-a.v0, -a.v1}; }

enum class CausalClass { TimelikeFuture, TimelikePast, Null, Spacelike, Zero };

inline constexpr double kDefaultZeroTol = 1e-12;
inline constexpr double kDefaultClassTol = 1e-9;

// Zero if |v0|+|v1| < zeroTol (absolute); Null if |v.v| < classTol*(v0^2+v1^2);
// otherwise timelike (oriented by the sign of v0) or spacelike.
CausalClass classify(TwoVector v, double zeroTol = kDefaultZeroTol,
                     double classTol = kDefaultClassTol);

std::string_view to_string(CausalClass c);
bool is_timelike(CausalClass c);

// A divergence-free vector field on the periodic cylinder [0, L) x R.
class CurrentField {
  public:
    virtual ~CurrentField() = default;

    virtual TwoVector current(SpacetimePoint p) const = 0;
    virtual double box_length() const = 0;
    // Upper bound on |j0| + |j1|; sets absolute tolerances.
    virtual double current_scale() const = 0;
};

// j -> -j, used for backward tracing.
class ReversedField final : public CurrentField {
  public:
    explicit ReversedField(const CurrentField& field) : field_(field) {}

    TwoVector current(SpacetimePoint p) const override { return -field_.current(p); }
    double box_length() const override { return field_.box_length(); }
    double current_scale() const override { return field_.current_scale(); }

  private:
    const CurrentField& field_;
};

} // namespace foliate
