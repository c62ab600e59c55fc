#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include "foliate/errors.hpp"
#include "foliate/manybody.hpp"
#include "foliate/parallel.hpp"
#include "output.hpp"

namespace lab {

using namespace foliate;

namespace {

constexpr double kSliceShift = 0.37;

std::filesystem::path out_dir(const ScenarioConfig& cfg, const RunOptions& opt)
{
    return opt.outDir.empty() ? std::filesystem::path(cfg.outputDir) : opt.outDir;
}

const FoliationConfig& foliation_block(const ScenarioConfig& cfg)
{
    if (!cfg.foliation) throw ConfigError("foliation: block is required for this command");
    return *cfg.foliation;
}

double zero_tol(const ScenarioConfig& cfg, const CurrentField& field)
{
    return cfg.tolerances.zeroTol * field.current_scale();
}

std::string class_name(TwoVector v, const ScenarioConfig& cfg, const CurrentField& field)
{
    return std::string(to_string(classify(v, zero_tol(cfg, field), cfg.tolerances.classTol)));
}

double mod_box(double x, double L)
{
    const double r = std::fmod(x, L);
    return r < 0.0 ? r + L : r;
}

std::string curves_csv(const Congruence& cong, const ScenarioConfig& cfg, const CurrentField& field)
{
    Csv csv{"curve_id", "s", "t", "x_unwrapped", "x_mod_L", "j0", "j1", "class"};
    const double L = field.box_length();
    for (std::size_t c = 0; c < cong.curves.size(); ++c)
        for (const auto& smp : cong.curves[c].samples) {
            csv << c << smp.s << smp.point.t << smp.point.x << mod_box(smp.point.x, L)
                << smp.tangent.v0 << smp.tangent.v1 << class_name(smp.tangent, cfg, field);
            csv.end_row();
        }
    return csv.str();
}

const char* termination_name(Termination t)
{
    switch (t) {
    case Termination::RangeEnd: return "RangeEnd";
    case Termination::Stagnation: return "Stagnation";
    case Termination::StepUnderflow: return "StepUnderflow";
    }
    return "?";
}

// Does [l0, l1] (wrapping when l0 > l1) touch a timelike segment of the leaf?
bool range_has_timelike(const Hypersurface& leaf, double l0, double l1)
{
    for (std::size_t i = 0; i < leaf.segment_count(); ++i) {
        if (!is_timelike(surface_element(leaf, i).segClass)) continue;
        const double a = leaf.node(i).lambda, b = leaf.node(i + 1).lambda;
        const bool overlap = l0 <= l1 ? (a < l1 && b > l0) : (a < l1 || b > l0);
        if (overlap) return true;
    }
    return false;
}

} // namespace

std::unique_ptr<CurrentField> normalized_field(const ScenarioConfig& cfg)
{
    if (cfg.field == "vector") return std::make_unique<VectorWavePacket>(normalize(vector_packet(cfg)));
    return std::make_unique<ScalarWavePacket>(normalize(scalar_packet(cfg)));
}

Hypersurface seed_leaf(const ScenarioConfig& cfg, const CurrentField& field, unsigned threads)
{
    const auto& f = foliation_block(cfg);
    const double L = cfg.boxLength;
    if (f.seed == "adapted") {
        AdaptedSeedOptions o;
        o.window = f.window;
        o.trace = trace_options(cfg);
        o.threads = threads;
        return adapted_seed(field, f.seedTime, f.nodesPerLeaf, o);
    }
    if (f.seed == "nodes") {
        std::vector<LeafNode> nodes;
        for (std::size_t i = 0; i < f.seedNodes.size(); ++i)
            nodes.push_back({static_cast<double>(i) / static_cast<double>(f.seedNodes.size()),
                             f.seedNodes[i].t, f.seedNodes[i].x});
        try {
            return Hypersurface(nodes, L);
        } catch (const InvalidSurface& e) {
            throw ConfigError(std::string("foliation.seed: ") + e.what());
        }
    }
    return Hypersurface::time_slice(f.seedTime, f.nodesPerLeaf, L);
}

Foliation make_foliation(const ScenarioConfig& cfg, const CurrentField& field, unsigned threads)
{
    const auto& f = foliation_block(cfg);
    const Hypersurface seed = seed_leaf(cfg, field, threads);
    FoliationOptions opts;
    opts.trace = trace_options(cfg);
    opts.threads = threads;
    if (f.leafMode == "advect")
        return build_foliation(field, seed, f.nLeaves, f.deltaS, f.congruenceSize, opts);

    Foliation fol;
    fol.deltaS = f.deltaS;
    for (std::size_t k = 0; k < f.nLeaves; ++k) {
        fol.leaves.push_back(Hypersurface::time_slice(f.seedTime + f.leafSpacing * static_cast<double>(k),
                                                      f.nodesPerLeaf, cfg.boxLength));
        fol.stagnantNodes.emplace_back();
    }
    TraceOptions trace = opts.trace;
    trace.throwOnUnderflow = false;
    fol.congruence = seed_congruence(field, fol.leaves.front(), f.congruenceSize,
                                     f.deltaS * static_cast<double>(f.nLeaves), trace, threads);
    fol.report = assess_admissibility(fol.congruence, fol.leaves, threads);
    return fol;
}

//---------------------------------------------------------------------------//

std::filesystem::path cmd_classify(const ScenarioConfig& cfg, const RunOptions& opt)
{
    if (!cfg.grid) throw ConfigError("grid: block is required for classify");
    std::unique_ptr<CurrentField> field;
    if (cfg.field == "vector") {
        field = std::make_unique<VectorWavePacket>(vector_packet(cfg));
    } else {
        field = std::make_unique<ScalarWavePacket>(scalar_packet(cfg));
    }
    const GridSpec grid{cfg.grid->t0, cfg.grid->t1, 0.0, cfg.boxLength, cfg.grid->nT, cfg.grid->nX};
    const auto cells = classification_map(*field, grid, cfg.tolerances.zeroTol,
                                          cfg.tolerances.classTol, opt.threads);

    Csv csv{"t", "x", "j0", "j1", "class"};
    const std::vector<CausalClass> order{CausalClass::TimelikeFuture, CausalClass::TimelikePast,
                                         CausalClass::Null, CausalClass::Spacelike,
                                         CausalClass::Zero};
    std::vector<long long> counts(order.size(), 0);
    for (const auto& c : cells) {
        csv << c.point.t << c.point.x << c.current.v0 << c.current.v1 << to_string(c.cls);
        csv.end_row();
        ++counts[static_cast<std::size_t>(std::find(order.begin(), order.end(), c.cls) - order.begin())];
    }
    Json countJson, fracJson;
    for (std::size_t i = 0; i < order.size(); ++i) {
        countJson[std::string(to_string(order[i]))] = counts[i];
        fracJson[std::string(to_string(order[i]))] =
            static_cast<double>(counts[i]) / static_cast<double>(cells.size());
    }
    Json summary;
    summary["scenario"] = cfg.name;
    summary["cells"] = cells.size();
    summary["counts"] = countJson;
    summary["fractions"] = fracJson;

    OutputSet out(out_dir(cfg, opt));
    out.write("classification.csv", csv.str());
    out.write_json("summary.json", summary);
    out.write_manifest("classify", cfg, opt.seed);
    return out.dir();
}

std::filesystem::path cmd_trace(const ScenarioConfig& cfg, const RunOptions& opt)
{
    const auto& f = foliation_block(cfg);
    const auto field = normalized_field(cfg);
    const Hypersurface seed = seed_leaf(cfg, *field, opt.threads);
    TraceOptions trace = trace_options(cfg);
    trace.throwOnUnderflow = false;
    const Congruence cong = seed_congruence(*field, seed, f.congruenceSize,
                                            f.deltaS * static_cast<double>(f.nLeaves), trace,
                                            opt.threads);
    Json terms = Json::array();
    for (const auto& c : cong.curves) terms.push_back(termination_name(c.termination));
    Json summary{{"scenario", cfg.name}, {"curves", cong.curves.size()}, {"seedParams", cong.seedParams},
                 {"termination", terms}};

    OutputSet out(out_dir(cfg, opt));
    out.write("curves.csv", curves_csv(cong, cfg, *field));
    out.write_json("trace_summary.json", summary);
    out.write_manifest("trace", cfg, opt.seed);
    return out.dir();
}

std::filesystem::path cmd_foliate(const ScenarioConfig& cfg, const RunOptions& opt)
{
    const auto field = normalized_field(cfg);
    const Foliation fol = make_foliation(cfg, *field, opt.threads);
    const QuadratureOptions quad = quad_options(cfg);

    Csv leaves{"leaf_id", "lambda", "t", "x", "ntilde0", "ntilde1", "j0", "j1", "ptilde", "seg_class"};
    Json fluxes = Json::array(), timelike = Json::array(), minSigned = Json::array(),
         minDensity = Json::array(), stagnantNodes = Json::array();
    for (std::size_t k = 0; k < fol.leaves.size(); ++k) {
        const Hypersurface& leaf = fol.leaves[k];
        for (std::size_t i = 0; i < leaf.segment_count(); ++i) {
            const LeafNode n = leaf.node(i);
            const SurfaceElement e = surface_element(leaf, i);
            const TwoVector nt = e.per_lambda();
            const TwoVector j = field->current({n.t, n.x});
            leaves << k << n.lambda << n.t << n.x << nt.v0 << nt.v1 << j.v0 << j.v1
                   << std::abs(nt.v0 * j.v0 + nt.v1 * j.v1) << to_string(e.segClass);
            leaves.end_row();
        }
        double lowSigned = 0.0, lowDensity = 0.0;
        bool first = true;
        const double phi = flux(*field, leaf, quad, [&](double, double s) {
            lowSigned = first ? s : std::min(lowSigned, s);
            lowDensity = first ? std::abs(s) : std::min(lowDensity, std::abs(s));
            first = false;
        });
        fluxes.push_back(phi);
        timelike.push_back(timelike_segment_count(leaf));
        minSigned.push_back(lowSigned);
        minDensity.push_back(lowDensity);
        stagnantNodes.push_back(fol.stagnantNodes[k]);
    }

    const auto& r = fol.report;
    Json report;
    report["leaves"] = r.leafCount;
    report["curves"] = r.curveCount;
    report["counts"] = r.counts;
    report["touches"] = r.touches;
    report["stagnant"] = r.stagnant;
    report["failed"] = r.failed;
    report["admissible"] = r.admissible;
    report["fluxes"] = fluxes;
    report["timelikeSegments"] = timelike;
    report["minSignedDensity"] = minSigned;
    report["minDensity"] = minDensity;
    report["stagnantNodes"] = stagnantNodes;
    report["seed"] = foliation_block(cfg).seed;
    report["leafMode"] = foliation_block(cfg).leafMode;
    report["deltaS"] = foliation_block(cfg).deltaS;

    OutputSet out(out_dir(cfg, opt));
    out.write("leaves.csv", leaves.str());
    out.write("curves.csv", curves_csv(fol.congruence, cfg, *field));
    out.write_json("admissibility.json", report);
    out.write_manifest("foliate", cfg, opt.seed);
    return out.dir();
}

std::filesystem::path cmd_conserve(const ScenarioConfig& cfg, const RunOptions& opt)
{
    if (!cfg.tube) throw ConfigError("tube: block is required for conserve");
    const auto& t = *cfg.tube;
    const auto& f = foliation_block(cfg);
    const auto field = normalized_field(cfg);
    const Foliation fol = make_foliation(cfg, *field, opt.threads);
    const Hypersurface& a = fol.leaves[t.leafA];
    const Hypersurface& b = fol.leaves[t.leafB];
    const double gap = std::abs(static_cast<double>(t.leafB) - static_cast<double>(t.leafA));
    const double sMax = t.sMax > 0.0 ? t.sMax : 2.0 * (gap + 1.0) * f.deltaS;

    std::vector<std::pair<double, double>> ranges;
    if (t.rangeA) ranges.push_back(*t.rangeA);
    std::mt19937_64 rng(opt.seed);
    for (std::size_t i = 0; i < t.randomRanges; ++i) {
        double l0 = std::generate_canonical<double, 53>(rng);
        double l1 = std::generate_canonical<double, 53>(rng);
        if (l0 > l1) std::swap(l0, l1);
        ranges.emplace_back(l0, l1);
    }

    Json tubes = Json::array();
    double worst = 0.0;
    for (const auto& [l0, l1] : ranges) {
        const TubeResult r = tube_conservation(*field, a, l0, l1, b, sMax, trace_options(cfg),
                                               quad_options(cfg));
        const double diff = std::abs(r.pa - r.pb);
        worst = std::max(worst, diff);
        tubes.push_back({{"rangeA", {l0, l1}},
                         {"rangeB", {r.lambdaB0, r.lambdaB1}},
                         {"Pa", r.pa},
                         {"Pb", r.pb},
                         {"absDiff", diff},
                         {"timelikeDownstream", l0 != l1 && range_has_timelike(b, r.lambdaB0, r.lambdaB1)}});
    }
    Json j;
    j["scenario"] = cfg.name;
    j["leafA"] = t.leafA;
    j["leafB"] = t.leafB;
    j["sMax"] = sMax;
    j["admissible"] = fol.report.admissible;
    if (!tubes.empty()) {
        j["rangeA"] = tubes[0]["rangeA"];
        j["rangeB"] = tubes[0]["rangeB"];
        j["Pa"] = tubes[0]["Pa"];
        j["Pb"] = tubes[0]["Pb"];
        j["absDiff"] = tubes[0]["absDiff"];
    }
    j["maxAbsDiff"] = worst;
    j["tolerance"] = cfg.tolerances.tubeTol;
    j["withinTolerance"] = worst <= cfg.tolerances.tubeTol;
    j["tubes"] = tubes;

    OutputSet out(out_dir(cfg, opt));
    out.write_json("tube.json", j);
    out.write_manifest("conserve", cfg, opt.seed);
    return out.dir();
}

//---------------------------------------------------------------------------//

namespace {

// phi with C_{ab} = phi_a phi_b when the two-particle coefficient matrix has rank one.
std::optional<ScalarWavePacket> product_factor(const ManyBodyPacket& p)
{
    if (p.particle_count() != 2) return std::nullopt;
    std::map<std::pair<int, int>, Complex> c;
    std::vector<int> hs;
    for (const auto& t : p.terms()) {
        c[{t.harmonics[0], t.harmonics[1]}] = t.coeff;
        hs.push_back(t.harmonics[0]);
    }
    std::sort(hs.begin(), hs.end());
    hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
    const auto at = [&](int a, int b) {
        auto it = c.find({a, b});
        return it == c.end() ? Complex{} : it->second;
    };
    int pivot = hs.front();
    double scale = 0.0;
    for (int h : hs)
        if (std::abs(at(h, h)) > std::abs(at(pivot, pivot))) pivot = h;
    for (const auto& [key, v] : c) scale = std::max(scale, std::abs(v));
    if (std::abs(at(pivot, pivot)) <= 1e-12 * scale) return std::nullopt;
    const Complex root = std::sqrt(at(pivot, pivot));
    std::vector<Mode> modes;
    for (int h : hs) modes.push_back({h, at(h, pivot) / root});
    for (const auto& ma : modes)
        for (const auto& mb : modes)
            if (std::abs(at(ma.harmonic, mb.harmonic) - ma.coeff * mb.coeff) > 1e-12 * scale)
                return std::nullopt;
    return ScalarWavePacket(p.mass(), p.box_length(), modes);
}

std::vector<double> shifted(std::vector<double> v, double by)
{
    for (double& x : v) x += by;
    return v;
}

std::vector<double> others(const std::vector<double>& times, std::size_t slot)
{
    std::vector<double> out;
    for (std::size_t b = 0; b < times.size(); ++b)
        if (b != slot) out.push_back(times[b]);
    return out;
}

} // namespace

std::filesystem::path cmd_manybody(const ScenarioConfig& cfg, const RunOptions& opt)
{
    if (!cfg.manybody) throw ConfigError("manybody: block is required for this command");
    const auto& m = *cfg.manybody;
    const ManyBodyPacket packet = normalize(manybody_packet(cfg));
    const std::size_t n = packet.particle_count();
    const double L = cfg.boxLength;
    const std::size_t G = m.gridPoints;
    const QuadratureOptions quad = quad_options(cfg);

    std::vector<Hypersurface> leaves;
    for (std::size_t a = 0; a < n; ++a) {
        Hypersurface slice = Hypersurface::time_slice(m.sliceTimes[a], m.nodesPerLeaf, L);
        if (m.leafDeltaS > 0.0) {
            if (n == 1) {
                slice = advect_leaf(*packet.single_particle(), slice, m.leafDeltaS, trace_options(cfg),
                                    opt.threads).leaf;
            } else {
                const MarginalField field(packet, a, others(m.sliceTimes, a));
                slice = advect_leaf(field, slice, m.leafDeltaS, trace_options(cfg), opt.threads).leaf;
            }
        }
        leaves.push_back(std::move(slice));
    }

    // Joint density on the lambda grid.
    std::size_t rows = 1;
    for (std::size_t a = 0; a < n; ++a) rows *= G;
    std::vector<double> density(rows);
    parallel_for(rows, opt.threads, [&](std::size_t r) {
        std::vector<double> ls(n);
        std::size_t rest = r;
        for (std::size_t a = n; a-- > 0;) {
            ls[a] = static_cast<double>(rest % G) / static_cast<double>(G);
            rest /= G;
        }
        density[r] = probability_density_n(packet, leaves, ls);
    });
    std::vector<std::string> header;
    for (std::size_t a = 0; a < n; ++a) header.push_back("lambda" + std::to_string(a + 1));
    std::string joint;
    for (std::size_t a = 0; a < n; ++a) joint += header[a] + ",";
    joint += "ptilde\n";
    for (std::size_t r = 0; r < rows; ++r) {
        std::size_t rest = r;
        std::vector<double> ls(n);
        for (std::size_t a = n; a-- > 0;) {
            ls[a] = static_cast<double>(rest % G) / static_cast<double>(G);
            rest /= G;
        }
        for (double l : ls) joint += fmt(l) + ",";
        joint += fmt(density[r]) + "\n";
    }

    // Marginal currents on each slot's own slice.
    Csv marg{"slot", "t", "x", "j0", "j1"};
    double sliceResidual = 0.0;
    Json marginalFlux = Json::array();
    for (std::size_t a = 0; a < n; ++a) {
        double total = 0.0;
        for (std::size_t i = 0; i < G; ++i) {
            const SpacetimePoint p{m.sliceTimes[a], L * static_cast<double>(i) / static_cast<double>(G)};
            TwoVector j;
            if (n == 1) {
                const auto jn = packet.current(std::span<const SpacetimePoint>(&p, 1));
                j = {jn.components[0], jn.components[1]};
            } else {
                const auto times = others(m.sliceTimes, a);
                j = marginal_current(packet, a, p, times);
                const TwoVector k = marginal_current(packet, a, p, shifted(times, kSliceShift));
                sliceResidual = std::max({sliceResidual, std::abs(j.v0 - k.v0), std::abs(j.v1 - k.v1)});
            }
            total += j.v0;
            marg << a << p.t << p.x << j.v0 << j.v1;
            marg.end_row();
        }
        marginalFlux.push_back(total * L / static_cast<double>(G));
    }

    std::vector<std::pair<double, double>> full(n, {0.0, 1.0});
    const double total = probability_n(packet, leaves, full, quad);

    Json summary;
    summary["scenario"] = cfg.name;
    summary["n"] = n;
    summary["terms"] = packet.terms().size();
    summary["totalProbability"] = total;
    summary["closedFormTotal"] = packet.total_probability();
    summary["marginalFlux"] = marginalFlux;
    if (n >= 2) {
        summary["sliceIndependenceResidual"] = sliceResidual;
    } else {
        summary["sliceIndependenceResidual"] = nullptr;
    }
    const auto factor = product_factor(packet);
    summary["productState"] = factor.has_value();
    if (factor) {
        double worst = 0.0;
        for (std::size_t i = 0; i < G; ++i)
            for (std::size_t k = 0; k < G; ++k) {
                const std::array<SpacetimePoint, 2> xs{
                    SpacetimePoint{m.sliceTimes[0], L * static_cast<double>(i) / static_cast<double>(G)},
                    SpacetimePoint{m.sliceTimes[1] + 0.5, L * static_cast<double>(k) / static_cast<double>(G)}};
                const auto jn = packet.current(xs);
                const TwoVector u = factor->current(xs[0]), v = factor->current(xs[1]);
                const double scale = std::max(u.l1() * v.l1(), 1e-300);
                const double outer[4] = {u.v0 * v.v0, u.v0 * v.v1, u.v1 * v.v0, u.v1 * v.v1};
                for (int c = 0; c < 4; ++c)
                    worst = std::max(worst, std::abs(jn.components[c] - outer[c]) / scale);
            }
        summary["factorizationResidual"] = worst;
    } else {
        summary["factorizationResidual"] = nullptr;
    }

    OutputSet out(out_dir(cfg, opt));
    out.write("joint_density.csv", joint);
    out.write("marginals.csv", marg.str());
    out.write_json("manybody_summary.json", summary);
    out.write_manifest("manybody", cfg, opt.seed);
    return out.dir();
}

std::filesystem::path cmd_scenarios(const RunOptions& opt)
{
    const std::filesystem::path dir = opt.outDir.empty() ? "scenarios" : opt.outDir;
    std::filesystem::create_directories(dir);
    for (const auto& name : builtin_names()) {
        std::ofstream out(dir / (name + ".json"), std::ios::binary | std::ios::trunc);
        out << to_json(*builtin(name)).dump(2) << "\n";
        if (!out) throw std::runtime_error("cannot write " + (dir / (name + ".json")).string());
    }
    return dir;
}

} // namespace lab
