#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "foliate/errors.hpp"
#include "foliate/flow.hpp"
#include "foliate/manybody.hpp"
#include "foliate/quadrature.hpp"
#include "foliate/wavefield.hpp"

namespace lab {

using Json = nlohmann::ordered_json;

// Malformed or inconsistent configuration; the message starts with the field path.
class ConfigError : public foliate::Error {
  public:
    explicit ConfigError(const std::string& what) : Error(foliate::ErrorKind::Config, what) {}
};

struct ModeSpec {
    int harmonic = 0;
    double re = 0.0;
    double im = 0.0;
    std::optional<foliate::Polarization> polarization; // vector fields only
};

struct GridConfig {
    double t0 = 0.0;
    double t1 = 1.0;
    int nT = 2;
    int nX = 2;
};

struct FoliationConfig {
    std::string seed = "t-const"; // "t-const" | "adapted" | "nodes"
    double seedTime = 0.0;
    std::vector<foliate::SpacetimePoint> seedNodes;
    std::string leafMode = "advect"; // "advect" | "t-const"
    double leafSpacing = 0.5;        // t step between t-const leaves
    std::size_t nLeaves = 8;
    double deltaS = 1.0;
    std::size_t congruenceSize = 32;
    std::size_t nodesPerLeaf = 64;
    double window = 0.0; // adapted seed averaging window, 0 = automatic
};

struct TubeConfig {
    std::size_t leafA = 0;
    std::size_t leafB = 1;
    std::optional<std::pair<double, double>> rangeA;
    std::size_t randomRanges = 0; // extra ranges drawn from --seed
    double sMax = 0.0;            // 0 = automatic
};

struct ManyBodyConfig {
    std::size_t n = 2;
    std::vector<foliate::ManyBodyTerm> terms;
    std::vector<double> sliceTimes; // one per slot, default 0
    std::size_t gridPoints = 32;
    std::size_t nodesPerLeaf = 32;
    double leafDeltaS = 0.0; // advect each slot's slice along its marginal current
};

struct Tolerances {
    double zeroTol = foliate::kDefaultZeroTol;
    double classTol = foliate::kDefaultClassTol;
    double rkTol = 1e-8;
    double stagnationTol = 1e-8;
    double quadTol = 1e-9;
    int quadMaxDepth = 14;
    double tubeTol = 1e-6;
};

struct ScenarioConfig {
    std::string name = "custom";
    std::string field = "scalar"; // "scalar" | "vector"
    double mass = 1.0;
    double boxLength = 1.0;
    std::vector<ModeSpec> modes;
    std::optional<GridConfig> grid;
    std::optional<FoliationConfig> foliation;
    std::optional<TubeConfig> tube;
    std::optional<ManyBodyConfig> manybody;
    Tolerances tolerances;
    std::string outputDir = "lab-out";
};

// Parses and validates; every packet in the config is constructed once so
// that construction errors surface here, prefixed with their field path.
ScenarioConfig parse_config(const Json& j);
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& pathOrBuiltin);

// Normalized form: every field present, defaults filled in.
Json to_json(const ScenarioConfig& cfg);

const std::vector<std::string>& builtin_names();
std::optional<ScenarioConfig> builtin(const std::string& name);

foliate::ScalarWavePacket scalar_packet(const ScenarioConfig& cfg);
foliate::VectorWavePacket vector_packet(const ScenarioConfig& cfg);
foliate::ManyBodyPacket manybody_packet(const ScenarioConfig& cfg);
foliate::TraceOptions trace_options(const ScenarioConfig& cfg);
foliate::QuadratureOptions quad_options(const ScenarioConfig& cfg);

} // namespace lab
