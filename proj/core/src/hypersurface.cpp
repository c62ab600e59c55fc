#include "foliate/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "foliate/errors.hpp"

namespace foliate {

Hypersurface::Hypersurface(std::vector<LeafNode> nodes, double boxLength)
    : nodes_(std::move(nodes)), boxLength_(boxLength)
{
    if (!std::isfinite(boxLength) || boxLength <= 0.0)
        throw InvalidSurface("surface: box length must be finite and > 0");
    if (nodes_.size() < 2) throw InvalidSurface("surface: at least two nodes are required");
    if (nodes_.front().lambda != 0.0) throw InvalidSurface("surface: lambda[0] must be 0");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (!std::isfinite(n.lambda) || !std::isfinite(n.t) || !std::isfinite(n.x))
            throw InvalidSurface("surface: node " + std::to_string(i) + " is not finite");
        if (n.lambda >= 1.0)
            throw InvalidSurface("surface: node " + std::to_string(i) + " has lambda >= 1");
        if (i > 0 && !(n.lambda > nodes_[i - 1].lambda))
            throw InvalidSurface("surface: lambda must increase strictly (node " +
                                 std::to_string(i) + ")");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const LeafNode a = node(i), b = node(i + 1);
        if (a.t == b.t && a.x == b.x)
            throw InvalidSurface("surface: nodes " + std::to_string(i) + " and " +
                                 std::to_string(i + 1) + " coincide");
    }
}

Hypersurface Hypersurface::time_slice(double t, std::size_t nodeCount, double boxLength,
                                      double x0)
{
    std::vector<LeafNode> nodes(nodeCount);
    for (std::size_t i = 0; i < nodeCount; ++i) {
        const double lambda = static_cast<double>(i) / static_cast<double>(nodeCount);
        nodes[i] = {lambda, t, x0 + lambda * boxLength};
    }
    return Hypersurface(std::move(nodes), boxLength);
}

LeafNode Hypersurface::node(std::size_t i) const
{
    if (i == nodes_.size()) {
        const LeafNode& first = nodes_.front();
        return {1.0, first.t, first.x + boxLength_};
    }
    return nodes_[i];
}

std::size_t Hypersurface::segment_index(double lambda) const
{
    double l = lambda - std::floor(lambda);
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), l,
                               [](double v, const LeafNode& n) { return v < n.lambda; });
    return static_cast<std::size_t>(std::distance(nodes_.begin(), it)) - 1;
}

SpacetimePoint Hypersurface::point(double lambda) const
{
    const double wraps = std::floor(lambda);
    const double l = lambda - wraps;
    const std::size_t i = segment_index(l);
    const LeafNode a = node(i), b = node(i + 1);
    const double u = (l - a.lambda) / (b.lambda - a.lambda);
    return {a.t + u * (b.t - a.t), a.x + u * (b.x - a.x) + wraps * boxLength_};
}

Hypersurface Hypersurface::reparametrized(std::vector<double> lambdas) const
{
    if (lambdas.size() != nodes_.size())
        throw InvalidSurface("surface: reparametrization needs one lambda per node");
    std::vector<LeafNode> nodes = nodes_;
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].lambda = lambdas[i];
    return Hypersurface(std::move(nodes), boxLength_);
}

} // namespace foliate
