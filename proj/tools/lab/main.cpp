#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

namespace {

int exit_code(foliate::ErrorKind kind)
{
    switch (kind) {
    case foliate::ErrorKind::Config: return 2;
    case foliate::ErrorKind::Numerical: return 3;
    case foliate::ErrorKind::Geometric: return 4;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Probability-current foliation laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", lab::kToolVersion);

    std::string config;
    std::string out;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    const auto add_common = [&](CLI::App* sub, bool needsConfig) {
        if (needsConfig)
            sub->add_option("--config", config, "Scenario JSON file or built-in name")->required();
        sub->add_option("--out", out, "Output directory (default: config outputDir)");
        sub->add_option("--seed", seed, "Seed for randomized sub-ranges")->default_val(1);
        sub->add_option("--threads", threads, "Worker threads")->default_val(1)->check(CLI::Range(1u, 1024u));
    };
    struct Cmd {
        const char* name;
        const char* help;
        std::filesystem::path (*run)(const lab::ScenarioConfig&, const lab::RunOptions&);
    };
    const Cmd cmds[] = {
        {"classify", "Causal classification map of the current", lab::cmd_classify},
        {"trace", "Integral curves seeded on the seed leaf", lab::cmd_trace},
        {"foliate", "Foliation, admissibility report and per-leaf flux", lab::cmd_foliate},
        {"conserve", "Flux-tube conservation between two leaves", lab::cmd_conserve},
        {"manybody", "Joint density, marginals and normalization of an n-particle state", lab::cmd_manybody},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : cmds) {
        subs.push_back(app.add_subcommand(c.name, c.help));
        add_common(subs.back(), true);
    }
    CLI::App* scenarios = app.add_subcommand("scenarios", "Write the built-in scenario configs");
    add_common(scenarios, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const lab::RunOptions opt{out, seed, threads};
    try {
        if (scenarios->parsed()) {
            std::cout << lab::cmd_scenarios(opt).string() << "\n";
            return 0;
        }
        const lab::ScenarioConfig cfg = lab::load_config(config);
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) {
                std::cout << cmds[i].run(cfg, opt).string() << "\n";
                return 0;
            }
    } catch (const foliate::Error& e) {
        std::cerr << "lab: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "lab: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
