#pragma once

#include <cstddef>
#include <vector>

#include "foliate/spacetime.hpp"

namespace foliate {

struct LeafNode {
    double lambda = 0.0;
    double t = 0.0;
    double x = 0.0; // unwrapped
};

/// Closed periodic polyline on the cylinder, parametrized by lambda in [0, 1).
/// Node 0 sits at lambda = 0; the closing node is node 0 shifted to
/// lambda = 1 and x + L. Leaves need not be graphs over x.
class Hypersurface {
  public:
    Hypersurface(std::vector<LeafNode> nodes, double boxLength);

    // t = const, nodes uniform in lambda and x.
    static Hypersurface time_slice(double t, std::size_t nodeCount, double boxLength,
                                   double x0 = 0.0);

    const std::vector<LeafNode>& nodes() const { return nodes_; }
    double box_length() const { return boxLength_; }
    std::size_t segment_count() const { return nodes_.size(); }

    // i in [0, segment_count()]; i == segment_count() is the closing node.
    LeafNode node(std::size_t i) const;
    // Segment containing lambda (taken modulo 1).
    std::size_t segment_index(double lambda) const;
    // Linear interpolation along the polyline; x unwrapped relative to node 0.
    SpacetimePoint point(double lambda) const;
    // Same geometry, new lambda values (one per node, lambda[0] == 0).
    Hypersurface reparametrized(std::vector<double> lambdas) const;

  private:
    std::vector<LeafNode> nodes_;
    double boxLength_;
};

} // namespace foliate
