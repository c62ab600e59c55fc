#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "config.hpp"
#include "foliate/foliation.hpp"

namespace lab {

struct RunOptions {
    std::filesystem::path outDir; // empty: cfg.outputDir
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

// Each command writes its artifacts plus manifest.json and returns the
// output directory. Library errors propagate unchanged.
std::filesystem::path cmd_classify(const ScenarioConfig& cfg, const RunOptions& opt);
std::filesystem::path cmd_trace(const ScenarioConfig& cfg, const RunOptions& opt);
std::filesystem::path cmd_foliate(const ScenarioConfig& cfg, const RunOptions& opt);
std::filesystem::path cmd_conserve(const ScenarioConfig& cfg, const RunOptions& opt);
std::filesystem::path cmd_manybody(const ScenarioConfig& cfg, const RunOptions& opt);
std::filesystem::path cmd_scenarios(const RunOptions& opt);

// Normalized one-particle field of the scenario (scalar or vector).
std::unique_ptr<foliate::CurrentField> normalized_field(const ScenarioConfig& cfg);

foliate::Hypersurface seed_leaf(const ScenarioConfig& cfg, const foliate::CurrentField& field,
                                unsigned threads);
// Leaves, congruence and admissibility report per the foliation block.
foliate::Foliation make_foliation(const ScenarioConfig& cfg, const foliate::CurrentField& field,
                                  unsigned threads);

} // namespace lab
