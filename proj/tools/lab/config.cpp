#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace lab {

namespace {

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i)
{
    return path + "[" + std::to_string(i) + "]";
}

// Typed access to one JSON object; remembers which keys were consumed so
// that typos are reported instead of silently ignored.
class Reader {
  public:
    Reader(const Json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            throw ConfigError((path_.empty() ? std::string("config") : path_) + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const Json* optional(const std::string& key)
    {
        seen_.insert(key);
        return has(key) ? &j_.at(key) : nullptr;
    }

    const Json& raw(const std::string& key)
    {
        seen_.insert(key);
        if (!has(key)) throw ConfigError(join(path_, key) + ": required field is missing");
        return j_.at(key);
    }

    double number(const std::string& key)
    {
        const Json& v = raw(key);
        if (!v.is_number()) throw ConfigError(join(path_, key) + ": expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(join(path_, key) + ": must be finite");
        return d;
    }
    double number(const std::string& key, double fallback)
    {
        seen_.insert(key);
        return has(key) ? number(key) : fallback;
    }

    long long integer(const std::string& key)
    {
        const Json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(join(path_, key) + ": expected an integer");
        return v.get<long long>();
    }
    long long integer(const std::string& key, long long fallback)
    {
        seen_.insert(key);
        return has(key) ? integer(key) : fallback;
    }

    std::size_t count(const std::string& key, std::size_t fallback, std::size_t minimum)
    {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const long long v = integer(key);
        if (v < static_cast<long long>(minimum))
            throw ConfigError(join(path_, key) + ": must be >= " + std::to_string(minimum));
        return static_cast<std::size_t>(v);
    }

    std::string string(const std::string& key, const std::string& fallback)
    {
        seen_.insert(key);
        if (!has(key)) return fallback;
        const Json& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(join(path_, key) + ": expected a string");
        return v.get<std::string>();
    }

    const Json& array(const std::string& key)
    {
        const Json& v = raw(key);
        if (!v.is_array()) throw ConfigError(join(path_, key) + ": expected an array");
        return v;
    }

    void finish() const
    {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw ConfigError(join(path_, key) + ": unknown field");
    }

    const std::string& path() const { return path_; }

  private:
    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

foliate::Complex complex_value(const Json& v, const std::string& path)
{
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(path + ": expected a number or [re, im]");
}

Json complex_json(foliate::Complex c) { return Json::array({c.real(), c.imag()}); }

ModeSpec parse_mode(const Json& j, const std::string& path, bool vectorField)
{
    Reader r(j, path);
    ModeSpec m;
    const long long h = r.integer("harmonic");
    if (h < -1000000 || h > 1000000) throw ConfigError(path + ".harmonic: out of range");
    m.harmonic = static_cast<int>(h);
    m.re = r.number("re", 0.0);
    m.im = r.number("im", 0.0);
    if (vectorField) {
        const Json& pol = r.array("polarization");
        if (pol.size() != 4) throw ConfigError(path + ".polarization: expected 4 components");
        foliate::Polarization eps{};
        for (std::size_t a = 0; a < 4; ++a)
            eps[a] = complex_value(pol[a], index(path + ".polarization", a));
        m.polarization = eps;
    }
    r.finish();
    return m;
}

GridConfig parse_grid(const Json& j)
{
    Reader r(j, "grid");
    GridConfig g;
    g.t0 = r.number("t0", 0.0);
    g.t1 = r.number("t1");
    g.nT = static_cast<int>(r.count("nT", 2, 2));
    g.nX = static_cast<int>(r.count("nX", 2, 2));
    if (!(g.t1 > g.t0)) throw ConfigError("grid.t1: must be greater than grid.t0");
    r.finish();
    return g;
}

FoliationConfig parse_foliation(const Json& j)
{
    Reader r(j, "foliation");
    FoliationConfig f;
    if (r.has("seed") && r.raw("seed").is_array()) {
        const Json& nodes = r.array("seed");
        f.seed = "nodes";
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            Reader n(nodes[i], index("foliation.seed", i));
            f.seedNodes.push_back({n.number("t"), n.number("x")});
            n.finish();
        }
        if (f.seedNodes.size() < 2) throw ConfigError("foliation.seed: need at least 2 nodes");
    } else {
        f.seed = r.string("seed", "t-const");
        if (f.seed != "t-const" && f.seed != "adapted")
            throw ConfigError("foliation.seed: expected \"t-const\", \"adapted\" or a node list");
    }
    f.seedTime = r.number("seedTime", 0.0);
    f.leafMode = r.string("leafMode", "advect");
    if (f.leafMode != "advect" && f.leafMode != "t-const")
        throw ConfigError("foliation.leafMode: expected \"advect\" or \"t-const\"");
    f.leafSpacing = r.number("leafSpacing", 0.5);
    f.nLeaves = r.count("nLeaves", 8, 2);
    f.deltaS = r.number("deltaS", 1.0);
    if (!(f.deltaS > 0.0)) throw ConfigError("foliation.deltaS: must be > 0");
    f.congruenceSize = r.count("congruenceSize", 32, 2);
    f.nodesPerLeaf = r.count("nodesPerLeaf", 64, 4);
    f.window = r.number("window", 0.0);
    if (f.window < 0.0) throw ConfigError("foliation.window: must be >= 0");
    r.finish();
    return f;
}

TubeConfig parse_tube(const Json& j, const std::optional<FoliationConfig>& fol)
{
    Reader r(j, "tube");
    TubeConfig t;
    if (!fol) throw ConfigError("tube: requires a foliation block");
    t.leafA = r.count("leafA", 0, 0);
    t.leafB = r.count("leafB", fol->nLeaves - 1, 0);
    if (t.leafA >= fol->nLeaves) throw ConfigError("tube.leafA: beyond foliation.nLeaves");
    if (t.leafB >= fol->nLeaves) throw ConfigError("tube.leafB: beyond foliation.nLeaves");
    if (r.has("rangeA")) {
        const Json& a = r.array("rangeA");
        if (a.size() != 2 || !a[0].is_number() || !a[1].is_number())
            throw ConfigError("tube.rangeA: expected [lambda0, lambda1]");
        const double l0 = a[0].get<double>(), l1 = a[1].get<double>();
        if (!(0.0 <= l0 && l0 <= l1 && l1 <= 1.0))
            throw ConfigError("tube.rangeA: need 0 <= lambda0 <= lambda1 <= 1");
        t.rangeA = std::make_pair(l0, l1);
    }
    t.randomRanges = r.count("randomRanges", 0, 0);
    t.sMax = r.number("sMax", 0.0);
    if (t.sMax < 0.0) throw ConfigError("tube.sMax: must be >= 0");
    if (!t.rangeA && t.randomRanges == 0)
        throw ConfigError("tube.rangeA: required when tube.randomRanges is 0");
    r.finish();
    return t;
}

ManyBodyConfig parse_manybody(const Json& j)
{
    Reader r(j, "manybody");
    ManyBodyConfig m;
    m.n = r.count("n", 2, 1);
    if (m.n > 4) throw ConfigError("manybody.n: at most 4 particles are supported");
    const Json& terms = r.array("terms");
    if (terms.empty()) throw ConfigError("manybody.terms: at least one term is required");
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string path = index("manybody.terms", i);
        Reader t(terms[i], path);
        foliate::ManyBodyTerm term;
        term.coeff = complex_value(t.raw("coeff"), path + ".coeff");
        const Json& hs = t.array("harmonics");
        for (std::size_t a = 0; a < hs.size(); ++a) {
            if (!hs[a].is_number_integer())
                throw ConfigError(index(path + ".harmonics", a) + ": expected an integer");
            term.harmonics.push_back(hs[a].get<int>());
        }
        if (term.harmonics.size() != m.n)
            throw ConfigError(path + ".harmonics: expected " + std::to_string(m.n) + " entries");
        t.finish();
        m.terms.push_back(term);
    }
    if (r.has("sliceTimes")) {
        const Json& s = r.array("sliceTimes");
        if (s.size() != m.n)
            throw ConfigError("manybody.sliceTimes: expected " + std::to_string(m.n) + " entries");
        for (std::size_t a = 0; a < s.size(); ++a) {
            if (!s[a].is_number()) throw ConfigError(index("manybody.sliceTimes", a) + ": expected a number");
            m.sliceTimes.push_back(s[a].get<double>());
        }
    } else {
        r.optional("sliceTimes");
    }
    m.gridPoints = r.count("gridPoints", 32, 2);
    m.nodesPerLeaf = r.count("nodesPerLeaf", 32, 4);
    m.leafDeltaS = r.number("leafDeltaS", 0.0);
    if (m.leafDeltaS < 0.0) throw ConfigError("manybody.leafDeltaS: must be >= 0");
    r.finish();
    return m;
}

Tolerances parse_tolerances(const Json& j)
{
    Reader r(j, "tolerances");
    Tolerances t;
    const auto positive = [&](const std::string& key, double fallback) {
        const double v = r.number(key, fallback);
        if (!(v > 0.0)) throw ConfigError("tolerances." + key + ": must be > 0");
        return v;
    };
    t.zeroTol = positive("zeroTol", t.zeroTol);
    t.classTol = positive("classTol", t.classTol);
    t.rkTol = positive("rkTol", t.rkTol);
    t.stagnationTol = positive("stagnationTol", t.stagnationTol);
    t.quadTol = positive("quadTol", t.quadTol);
    t.quadMaxDepth = static_cast<int>(r.count("quadMaxDepth", 14, 1));
    if (t.quadMaxDepth > 30) throw ConfigError("tolerances.quadMaxDepth: must be <= 30");
    t.tubeTol = positive("tubeTol", t.tubeTol);
    r.finish();
    return t;
}

// Constructs every packet once; wavefield/manybody messages already lead
// with the offending field name.
void validate_packets(const ScenarioConfig& cfg)
{
    const auto wrap = [](const std::string& prefix, auto&& fn) {
        try {
            fn();
        } catch (const foliate::Error& e) {
            const std::string what = e.what();
            if (e.kind() == foliate::ErrorKind::Config || dynamic_cast<const foliate::ZeroNorm*>(&e))
                throw ConfigError(what.rfind(prefix, 0) == 0 ? what : prefix + ": " + what);
            throw;
        }
    };
    wrap("modes", [&] {
        if (cfg.field == "vector") {
            (void)vector_packet(cfg);
        } else {
            (void)scalar_packet(cfg);
        }
    });
    if (cfg.manybody) wrap("manybody", [&] { (void)manybody_packet(cfg); });
}

} // namespace

ScenarioConfig parse_config(const Json& j)
{
    Reader r(j, "");
    ScenarioConfig cfg;
    cfg.name = r.string("name", "custom");
    cfg.field = r.string("field", "scalar");
    if (cfg.field != "scalar" && cfg.field != "vector")
        throw ConfigError("field: expected \"scalar\" or \"vector\"");
    cfg.mass = r.number("mass", cfg.field == "vector" ? 0.0 : 1.0);
    if (cfg.field == "vector" && cfg.mass != 0.0) throw ConfigError("mass: vector fields are massless");
    if (cfg.mass < 0.0) throw ConfigError("mass: must be >= 0");
    cfg.boxLength = r.number("boxLength");
    if (!(cfg.boxLength > 0.0)) throw ConfigError("boxLength: must be > 0");

    const Json& modes = r.array("modes");
    if (modes.empty()) throw ConfigError("modes: at least one mode is required");
    for (std::size_t i = 0; i < modes.size(); ++i)
        cfg.modes.push_back(parse_mode(modes[i], index("modes", i), cfg.field == "vector"));

    if (const Json* g = r.optional("grid")) cfg.grid = parse_grid(*g);
    if (const Json* f = r.optional("foliation")) cfg.foliation = parse_foliation(*f);
    if (const Json* t = r.optional("tube")) cfg.tube = parse_tube(*t, cfg.foliation);
    if (const Json* m = r.optional("manybody")) cfg.manybody = parse_manybody(*m);
    if (const Json* t = r.optional("tolerances")) cfg.tolerances = parse_tolerances(*t);
    cfg.outputDir = r.string("outputDir", "lab-out");
    r.finish();

    if (cfg.manybody && cfg.manybody->sliceTimes.empty())
        cfg.manybody->sliceTimes.assign(cfg.manybody->n, 0.0);
    validate_packets(cfg);
    return cfg;
}

ScenarioConfig parse_config_text(const std::string& text)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError("config: JSON syntax error at line " + std::to_string(line) + ", column " +
                          std::to_string(column) + ": " + e.what());
    }
    return parse_config(j);
}

ScenarioConfig load_config(const std::string& pathOrBuiltin)
{
    std::ifstream in(pathOrBuiltin, std::ios::binary);
    if (in) {
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_config_text(ss.str());
    }
    std::string name = pathOrBuiltin;
    const auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    if (name.size() > 5 && name.compare(name.size() - 5, 5, ".json") == 0)
        name = name.substr(0, name.size() - 5);
    if (auto cfg = builtin(name)) return *cfg;
    throw ConfigError("config: cannot read '" + pathOrBuiltin +
                      "' and it is not a built-in scenario name");
}

Json to_json(const ScenarioConfig& cfg)
{
    Json j;
    j["name"] = cfg.name;
    j["field"] = cfg.field;
    j["mass"] = cfg.mass;
    j["boxLength"] = cfg.boxLength;
    Json modes = Json::array();
    for (const auto& m : cfg.modes) {
        Json jm{{"harmonic", m.harmonic}, {"re", m.re}, {"im", m.im}};
        if (m.polarization) {
            Json pol = Json::array();
            for (const auto& c : *m.polarization) pol.push_back(complex_json(c));
            jm["polarization"] = pol;
        }
        modes.push_back(jm);
    }
    j["modes"] = modes;
    if (cfg.grid)
        j["grid"] = {{"t0", cfg.grid->t0}, {"t1", cfg.grid->t1}, {"nT", cfg.grid->nT}, {"nX", cfg.grid->nX}};
    if (cfg.foliation) {
        const auto& f = *cfg.foliation;
        Json jf;
        if (f.seed == "nodes") {
            Json nodes = Json::array();
            for (const auto& p : f.seedNodes) nodes.push_back({{"t", p.t}, {"x", p.x}});
            jf["seed"] = nodes;
        } else {
            jf["seed"] = f.seed;
        }
        jf["seedTime"] = f.seedTime;
        jf["leafMode"] = f.leafMode;
        jf["leafSpacing"] = f.leafSpacing;
        jf["nLeaves"] = f.nLeaves;
        jf["deltaS"] = f.deltaS;
        jf["congruenceSize"] = f.congruenceSize;
        jf["nodesPerLeaf"] = f.nodesPerLeaf;
        jf["window"] = f.window;
        j["foliation"] = jf;
    }
    if (cfg.tube) {
        const auto& t = *cfg.tube;
        Json jt{{"leafA", t.leafA}, {"leafB", t.leafB}};
        if (t.rangeA) jt["rangeA"] = {t.rangeA->first, t.rangeA->second};
        jt["randomRanges"] = t.randomRanges;
        jt["sMax"] = t.sMax;
        j["tube"] = jt;
    }
    if (cfg.manybody) {
        const auto& m = *cfg.manybody;
        Json terms = Json::array();
        for (const auto& t : m.terms) terms.push_back({{"coeff", complex_json(t.coeff)}, {"harmonics", t.harmonics}});
        j["manybody"] = {{"n", m.n},
                         {"terms", terms},
                         {"sliceTimes", m.sliceTimes},
                         {"gridPoints", m.gridPoints},
                         {"nodesPerLeaf", m.nodesPerLeaf},
                         {"leafDeltaS", m.leafDeltaS}};
    }
    const auto& t = cfg.tolerances;
    j["tolerances"] = {{"zeroTol", t.zeroTol},     {"classTol", t.classTol},
                       {"rkTol", t.rkTol},         {"stagnationTol", t.stagnationTol},
                       {"quadTol", t.quadTol},     {"quadMaxDepth", t.quadMaxDepth},
                       {"tubeTol", t.tubeTol}};
    j["outputDir"] = cfg.outputDir;
    return j;
}

//---------------------------------------------------------------------------//

const std::vector<std::string>& builtin_names()
{
    static const std::vector<std::string> names{"plane-wave", "standing-wave", "skewed",
                                                "product-pair", "entangled-pair"};
    return names;
}

std::optional<ScenarioConfig> builtin(const std::string& name)
{
    constexpr double L = 2.0 * std::numbers::pi;
    ScenarioConfig c;
    c.name = name;
    c.mass = 1.0;
    c.boxLength = L;
    c.outputDir = name;
    c.grid = GridConfig{0.0, L, 33, 64};
    FoliationConfig f;
    f.nLeaves = 8;
    f.congruenceSize = 32;
    f.nodesPerLeaf = 64;
    if (name == "plane-wave") {
        c.modes = {{1, 1.0, 0.0, {}}};
        f.deltaS = 4.0;
        c.foliation = f;
        c.tube = TubeConfig{0, 7, std::make_pair(0.1, 0.35), 10, 0.0};
    } else if (name == "standing-wave") {
        c.modes = {{1, 1.0, 0.0, {}}, {-1, 1.0, 0.0, {}}};
        f.deltaS = 2.0;
        c.foliation = f;
        c.tube = TubeConfig{0, 7, std::make_pair(0.05, 0.2), 10, 0.0};
    } else if (name == "skewed") {
        c.modes = {{0, 1.0, 0.0, {}}, {10, 0.2, 0.0, {}}};
        c.grid = GridConfig{0.0, L, 101, 256};
        f.seed = "adapted";
        f.deltaS = 2.0;
        f.nodesPerLeaf = 128;
        c.foliation = f;
        c.tube = TubeConfig{0, 7, std::make_pair(0.2, 0.45), 10, 0.0};
    } else if (name == "product-pair") {
        c.modes = {{1, 1.0, 0.0, {}}};
        c.manybody = ManyBodyConfig{2, {{1.0, {1, 1}}}, {0.0, 0.0}, 32, 32, 0.0};
    } else if (name == "entangled-pair") {
        c.modes = {{1, 1.0, 0.0, {}}, {-1, 1.0, 0.0, {}}};
        c.manybody = ManyBodyConfig{2, {{1.0, {1, -1}}}, {0.0, 0.0}, 32, 32, 0.0};
    } else {
        return std::nullopt;
    }
    return c;
}

//---------------------------------------------------------------------------//

foliate::ScalarWavePacket scalar_packet(const ScenarioConfig& cfg)
{
    std::vector<foliate::Mode> modes;
    for (const auto& m : cfg.modes) modes.push_back({m.harmonic, {m.re, m.im}});
    return {cfg.mass, cfg.boxLength, modes};
}

foliate::VectorWavePacket vector_packet(const ScenarioConfig& cfg)
{
    std::vector<foliate::VectorMode> modes;
    for (const auto& m : cfg.modes)
        modes.push_back({m.harmonic, {m.re, m.im}, m.polarization.value_or(foliate::Polarization{})});
    return {cfg.boxLength, modes};
}

foliate::ManyBodyPacket manybody_packet(const ScenarioConfig& cfg)
{
    if (!cfg.manybody) throw ConfigError("manybody: block is missing");
    return foliate::ManyBodyPacket::symmetrize(cfg.manybody->n, cfg.mass, cfg.boxLength,
                                               cfg.manybody->terms);
}

foliate::TraceOptions trace_options(const ScenarioConfig& cfg)
{
    foliate::TraceOptions o;
    o.rkTol = cfg.tolerances.rkTol;
    o.stagnationTol = cfg.tolerances.stagnationTol;
    return o;
}

foliate::QuadratureOptions quad_options(const ScenarioConfig& cfg)
{
    return {cfg.tolerances.quadTol, cfg.tolerances.quadMaxDepth};
}

} // namespace lab
