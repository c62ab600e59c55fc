#pragma once

#include <functional>
#include <span>
#include <vector>

#include "foliate/flow.hpp"
#include "foliate/hypersurface.hpp"
#include "foliate/quadrature.hpp"
#include "foliate/spacetime.hpp"

namespace foliate {

/// Covariant surface element of one leaf segment. For a segment with
/// displacement (dt, dx) the element is n~_mu = (dx, -dt): the Minkowski
/// dual of the tangent. It never separates the unit normal from the induced
/// metric factor, so it stays finite on null segments.
struct SurfaceElement {
    TwoVector covariant;     // integrated over the segment
    double dLambda = 0.0;
    CausalClass segClass = CausalClass::Zero; // class of the segment tangent

    TwoVector contravariant() const { return {covariant.v0, -covariant.v1}; }
    TwoVector per_lambda() const { return (1.0 / dLambda) * covariant; }
};

SurfaceElement surface_element(const Hypersurface& surface, std::size_t segment);
std::size_t timelike_segment_count(const Hypersurface& surface);

// Closed forms for the straight leaf x'^0 = (t - beta x)/sqrt(2) = const,
// per unit of the in-leaf coordinate x'^1 = (x + beta t)/sqrt(2).
struct BetaExample {
    TwoVector nTildePerUnitXPrime1; // magnitudes sqrt(2)/(1+beta^2) * (1, |beta|)
    int normSign = 0;               // sign(1 - beta^2)
    double gDet = 0.0;              // |g^(3)|^(1/2) = sqrt(2|1-beta^2|)/(1+beta^2)
};

BetaExample beta_example(double beta);

// Signed n~_mu j^mu per unit lambda at lambda.
double signed_density(const CurrentField& field, const Hypersurface& surface, double lambda);
// |n~_mu j^mu| per unit lambda.
double probability_density(const CurrentField& field, const Hypersurface& surface,
                           double lambda);

// Called with every quadrature node: (lambda, signed density).
using DensityObserver = std::function<void(double, double)>;

// Signed flux through the closed leaf.
double flux(const CurrentField& field, const Hypersurface& surface,
            const QuadratureOptions& quad = {}, const DensityObserver& observer = {});

// Integral of |n~.j| over [lambdaA, lambdaB] with 0 <= lambdaA <= lambdaB <= 1.
double probability(const CurrentField& field, const Hypersurface& surface, double lambdaA,
                   double lambdaB, const QuadratureOptions& quad = {},
                   const DensityObserver& observer = {});

struct AdvectedLeaf {
    Hypersurface leaf;
    std::vector<std::size_t> stagnantNodes; // left in place
};

AdvectedLeaf advect_leaf(const CurrentField& field, const Hypersurface& surface, double deltaS,
                         const TraceOptions& trace = {}, unsigned threads = 1);

struct AdmissibilityReport {
    std::size_t leafCount = 0;
    std::size_t curveCount = 0;
    std::vector<std::vector<int>> counts;  // [curve][leaf]; -1 marks a degenerate contact
    std::vector<std::vector<int>> touches; // [curve][leaf]
    std::vector<std::size_t> stagnant;     // excluded from the verdict
    std::vector<std::size_t> failed;       // step underflow; excluded as well
    bool admissible = false;
};

// Counts crossings for every (curve, leaf) pair. Admissible iff every
// curve that neither stagnated nor failed crosses every leaf exactly once.
AdmissibilityReport assess_admissibility(const Congruence& congruence,
                                         std::span<const Hypersurface> leaves,
                                         unsigned threads = 1);

struct Foliation {
    std::vector<Hypersurface> leaves;
    std::vector<std::vector<std::size_t>> stagnantNodes; // per leaf
    Congruence congruence;
    AdmissibilityReport report;
    double deltaS = 0.0;
};

struct FoliationOptions {
    TraceOptions trace;
    unsigned threads = 1;
};

// Leaf k is the seed advected k times by deltaS; the congruence is seeded
// on the seed and traced over nLeaves * deltaS.
Foliation build_foliation(const CurrentField& field, const Hypersurface& seed,
                          std::size_t nLeaves, double deltaS, std::size_t congruenceSize,
                          const FoliationOptions& options = {});

struct TubeResult {
    double pa = 0.0;
    double pb = 0.0;
    double lambdaB0 = 0.0;
    double lambdaB1 = 0.0;
};

// Follows the boundary curves of [lambdaA0, lambdaA1] on leafA to leafB and
// compares the probabilities of the two cross-sections of the flux tube.
TubeResult tube_conservation(const CurrentField& field, const Hypersurface& leafA,
                             double lambdaA0, double lambdaA1, const Hypersurface& leafB,
                             double sMax, const TraceOptions& trace = {},
                             const QuadratureOptions& quad = {});

struct AdaptedSeedOptions {
    double window = 0.0;   // averaging window in s; 0 picks L / <j^0>
    std::size_t gridX = 0; // marching-squares columns; 0 picks 2 * nodes
    TraceOptions trace;
    unsigned threads = 1;
};

// Closed level set, through the neighbourhood of (t0, x = 0), of the
// flow-averaged time f(p) = (1/T) int_{-T/2}^{T/2} t(phi_u(p)) du. f grows
// along every curve that makes net progress in t over T, so each curve
// meets the level set once.
Hypersurface adapted_seed(const CurrentField& field, double t0, std::size_t nodes,
                          const AdaptedSeedOptions& options = {});
double flow_averaged_time(const CurrentField& field, SpacetimePoint p, double window,
                          const TraceOptions& trace = {});

} // namespace foliate
