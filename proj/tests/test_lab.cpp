#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "commands.hpp"
#include "config.hpp"
#include "output.hpp"

namespace fs = std::filesystem;
using lab::Json;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / "lab-tests" / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

lab::ScenarioConfig scenario(const std::string& name) { return *lab::builtin(name); }

lab::RunOptions in(const fs::path& dir, unsigned threads = 1) { return {dir, 1, threads}; }

// Runs the lab binary; returns its exit status and fills `output` with stdout+stderr.
int run_lab(const std::string& args, std::string& output)
{
    const fs::path log = fs::temp_directory_path() / "lab-tests" / "lab.log";
    fs::create_directories(log.parent_path());
    const std::string cmd = std::string("\"") + LAB_EXE + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    output = slurp(log);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream s(slurp(p));
    for (std::string line; std::getline(s, line);) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST_CASE("classify")
{
    const auto plane = lab::cmd_classify(scenario("plane-wave"), in(scratch("classify-plane")));
    const Json a = read_json(plane / "summary.json");
    CHECK(a["fractions"]["TimelikeFuture"].get<double>() == 1.0);
    const auto rows = read_csv(plane / "classification.csv");
    REQUIRE(rows.size() == 33 * 64 + 1);
    CHECK(rows[0] == std::vector<std::string>{"t", "x", "j0", "j1", "class"});

    // Two modes trace a segment of currents from the future cone; the past
    // cone is never reached, so the skewed map shows future and spacelike only.
    const auto skewed = lab::cmd_classify(scenario("skewed"), in(scratch("classify-skewed")));
    const Json b = read_json(skewed / "summary.json");
    CHECK(b["counts"]["TimelikeFuture"].get<long long>() > 0);
    CHECK(b["counts"]["Spacelike"].get<long long>() > 0);
    CHECK(b["counts"]["TimelikePast"].get<long long>() == 0);
}

TEST_CASE("config validation")
{
    auto cfg = lab::to_json(scenario("plane-wave"));
    cfg["modes"] = Json::array();
    try {
        lab::parse_config(cfg);
        FAIL("empty modes accepted");
    } catch (const lab::ConfigError& e) {
        CHECK(std::string(e.what()).find("modes") != std::string::npos);
    }

    cfg = lab::to_json(scenario("plane-wave"));
    cfg["foliation"]["nLeafs"] = 3;
    CHECK_THROWS_WITH_AS(lab::parse_config(cfg), doctest::Contains("foliation.nLeafs"),
                         lab::ConfigError);

    cfg = lab::to_json(scenario("product-pair"));
    cfg["manybody"]["terms"][0]["harmonics"] = Json::array({1});
    CHECK_THROWS_WITH_AS(lab::parse_config(cfg), doctest::Contains("manybody.terms"),
                         lab::ConfigError);

    CHECK_THROWS_WITH_AS(lab::parse_config_text("{\n  \"name\": \"x\",\n  \"mass\": ,\n}"),
                         doctest::Contains("line 3"), lab::ConfigError);
}

TEST_CASE("exit codes")
{
    const fs::path dir = scratch("exit-codes");
    fs::create_directories(dir);
    std::string out;

    auto cfg = lab::to_json(scenario("plane-wave"));
    cfg["modes"] = Json::array();
    std::ofstream(dir / "empty.json") << cfg.dump(2);
    CHECK(run_lab("classify --config \"" + (dir / "empty.json").string() + "\" --out \"" +
                      (dir / "o").string() + "\"",
                  out) == 2);
    CHECK(out.find("modes") != std::string::npos);

    CHECK(run_lab("classify --config no-such-scenario", out) == 2);
    CHECK(run_lab("classify", out) == 2);
    CHECK(run_lab("classify --config plane-wave --threads 0", out) == 2);

    // Leaf B lies further downstream than any curve can reach.
    cfg = lab::to_json(scenario("plane-wave"));
    cfg["foliation"]["deltaS"] = 100.0;
    cfg["tube"]["sMax"] = 1e-6;
    std::ofstream(dir / "far.json") << cfg.dump(2);
    CHECK(run_lab("conserve --config \"" + (dir / "far.json").string() + "\" --out \"" +
                      (dir / "o").string() + "\"",
                  out) == 4);

    CHECK(run_lab("classify --config plane-wave --out \"" + (dir / "ok").string() + "\"", out) == 0);
}

TEST_CASE("foliate")
{
    const auto plane = lab::cmd_foliate(scenario("plane-wave"), in(scratch("foliate-plane")));
    const Json a = read_json(plane / "admissibility.json");
    CHECK(a["admissible"].get<bool>());
    REQUIRE(a["fluxes"].size() == 8);
    for (const auto& f : a["fluxes"]) CHECK(std::abs(f.get<double>() - 1.0) <= 1e-6);
    CHECK(read_csv(plane / "leaves.csv")[0] ==
          std::vector<std::string>{"leaf_id", "lambda", "t", "x", "ntilde0", "ntilde1", "j0", "j1",
                                   "ptilde", "seg_class"});

    const auto skewed = lab::cmd_foliate(scenario("skewed"), in(scratch("foliate-skewed"), 4));
    const Json b = read_json(skewed / "admissibility.json");
    CHECK(b["admissible"].get<bool>());
    std::size_t folded = 0;
    for (const auto& n : b["timelikeSegments"]) folded += n.get<std::size_t>() > 0;
    CHECK(folded >= 1);
    for (const auto& f : b["fluxes"]) CHECK(std::abs(f.get<double>() - 1.0) <= 1e-6);

    auto forced = scenario("skewed");
    forced.foliation->seed = "t-const";
    forced.foliation->leafMode = "t-const";
    forced.foliation->nodesPerLeaf = 64;
    const auto flat = lab::cmd_foliate(forced, in(scratch("foliate-forced"), 4));
    const Json c = read_json(flat / "admissibility.json");
    CHECK_FALSE(c["admissible"].get<bool>());
    bool multiple = false;
    for (const auto& row : c["counts"])
        for (const auto& n : row) multiple = multiple || n.get<int>() > 1;
    CHECK(multiple);
}

TEST_CASE("conserve")
{
    auto plane = scenario("plane-wave");
    const Json a = read_json(lab::cmd_conserve(plane, in(scratch("conserve-plane"))) / "tube.json");
    CHECK(a["maxAbsDiff"].get<double>() < 1e-9);
    CHECK(a["tubes"].size() == 11);

    const Json b =
        read_json(lab::cmd_conserve(scenario("standing-wave"), in(scratch("conserve-standing"))) /
                  "tube.json");
    CHECK(b["maxAbsDiff"].get<double>() < 1e-6);

    plane.tube->rangeA = {{0.3, 0.3}};
    plane.tube->randomRanges = 0;
    const Json c = read_json(lab::cmd_conserve(plane, in(scratch("conserve-empty"))) / "tube.json");
    CHECK(c["Pa"].get<double>() == 0.0);
    CHECK(c["Pb"].get<double>() == 0.0);
}

TEST_CASE("manybody")
{
    const Json a = read_json(
        lab::cmd_manybody(scenario("product-pair"), in(scratch("mb-product"))) / "manybody_summary.json");
    CHECK(std::abs(a["totalProbability"].get<double>() - 1.0) <= 1e-6);
    CHECK(a["productState"].get<bool>());
    CHECK(a["factorizationResidual"].get<double>() < 1e-10);

    const Json b = read_json(lab::cmd_manybody(scenario("entangled-pair"), in(scratch("mb-entangled"))) /
                             "manybody_summary.json");
    CHECK(std::abs(b["totalProbability"].get<double>() - 1.0) <= 1e-6);
    CHECK_FALSE(b["productState"].get<bool>());
    CHECK(b["sliceIndependenceResidual"].get<double>() < 1e-8);
}

TEST_CASE("manybody with one particle matches the wavefield pipeline bitwise")
{
    auto cfg = scenario("standing-wave");
    cfg.manybody = lab::ManyBodyConfig{};
    cfg.manybody->n = 1;
    cfg.manybody->terms = {{1.0, {1}}, {1.0, {-1}}};
    cfg.manybody->sliceTimes = {0.25};
    cfg.manybody->gridPoints = 16;
    cfg = lab::parse_config(lab::to_json(cfg));
    const fs::path dir = lab::cmd_manybody(cfg, in(scratch("mb-single")));

    const auto field = foliate::normalize(lab::scalar_packet(cfg));
    const auto rows = read_csv(dir / "marginals.csv");
    REQUIRE(rows.size() == 17);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const foliate::SpacetimePoint p{std::stod(rows[i][1]), std::stod(rows[i][2])};
        const auto j = field.current(p);
        CHECK(rows[i][3] == lab::fmt(j.v0));
        CHECK(rows[i][4] == lab::fmt(j.v1));
    }
    const auto slice = foliate::Hypersurface::time_slice(0.25, cfg.manybody->nodesPerLeaf, cfg.boxLength);
    const double p = foliate::probability(field, slice, 0.0, 1.0, lab::quad_options(cfg));
    CHECK(read_json(dir / "manybody_summary.json")["totalProbability"].get<double>() == p);
}

TEST_CASE("manifest lists every file with its digest")
{
    const fs::path dir = lab::cmd_foliate(scenario("standing-wave"), in(scratch("manifest")));
    const Json m = read_json(dir / "manifest.json");
    CHECK(m["command"] == "foliate");
    CHECK(m["version"] == lab::kToolVersion);
    std::size_t listed = 0;
    for (const auto& f : m["files"]) {
        const std::string bytes = slurp(dir / f["path"].get<std::string>());
        CHECK(f["bytes"].get<std::size_t>() == bytes.size());
        CHECK(f["sha256"].get<std::string>() == lab::sha256_hex(bytes));
        ++listed;
    }
    std::size_t onDisk = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++onDisk;
    CHECK(listed + 1 == onDisk);
    CHECK(lab::sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

    // The echoed config re-validates to the same normalized form.
    CHECK(lab::to_json(lab::parse_config(m["config"])) == m["config"]);
}

TEST_CASE("config round trip")
{
    for (const auto& name : lab::builtin_names()) {
        const Json j = lab::to_json(scenario(name));
        CHECK(lab::to_json(lab::parse_config(j)) == j);
        CHECK(lab::to_json(lab::parse_config_text(j.dump())) == j);
    }
}

TEST_CASE("outputs do not depend on the thread count")
{
    for (const char* name : {"standing-wave", "entangled-pair"}) {
        const auto cfg = scenario(name);
        for (auto cmd : {lab::cmd_classify, lab::cmd_foliate, lab::cmd_manybody}) {
            if ((cmd == lab::cmd_manybody) != (cfg.manybody.has_value())) continue;
            const fs::path a = cmd(cfg, in(scratch("det-1"), 1));
            const fs::path b = cmd(cfg, in(scratch("det-6"), 6));
            for (const auto& e : fs::directory_iterator(a))
                CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
        }
    }
}
