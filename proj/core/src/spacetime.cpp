#include "foliate/spacetime.hpp"

#include <cmath>

namespace foliate {

double TwoVector::l1() const { return std::abs(v0) + std::abs(v1); }

CausalClass classify(TwoVector v, double zeroTol, double classTol)
{
    if (v.l1() < zeroTol) return CausalClass::Zero;
    const double sq = v.square();
    if (std::abs(sq) < classTol * (v.v0 * v.v0 + v.v1 * v.v1)) return CausalClass::Null;
    if (sq > 0.0) return v.v0 > 0.0 ? CausalClass::TimelikeFuture : CausalClass::TimelikePast;
    return CausalClass::Spacelike;
}

std::string_view to_string(CausalClass c)
{
    switch (c) {
    case CausalClass::TimelikeFuture: return "TimelikeFuture";
    case CausalClass::TimelikePast: return "TimelikePast";
    case CausalClass::Null: return "Null";
    case CausalClass::Spacelike: return "Spacelike";
    case CausalClass::Zero: return "Zero";
    }
    return "?";
}

bool is_timelike(CausalClass c)
{
    return c == CausalClass::TimelikeFuture || c == CausalClass::TimelikePast;
}

} // namespace foliate
