// slimdft command-line front end.
//
// Exit codes: 0 success, 1 usage error, 2 invalid input model,
// 3 measure not computable (budget, undefined measure, remaining
// non-determinism, not modular), 4 I/O error.

#include "slimdft/slimdft.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace slimdft;
using Json = nlohmann::ordered_json;

namespace {

enum Exit { Ok = 0, Usage = 1, Invalid = 2, NotComputable = 3, Io = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double round9(double v) {
    if (!std::isfinite(v)) {
        return v;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::stod(buf);
}

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeOutput(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) {
        throw IoError("cannot write '" + path + "'");
    }
}

struct Toggle {
    bool on = false;
    bool off = false;
};

struct Common {
    std::string dft;
    std::string ma;
    std::string measure = "probfail";
    bool conditional = false;
    std::string event;
    std::vector<std::string> sets;
    Toggle symred, dc, por, modular;
    std::size_t budget = 5'000'000;
    bool timing = false;
};

void addToggles(CLI::App* app, Common& c) {
    app->add_flag("--symred", c.symred.on, "Force symmetry reduction on");
    app->add_flag("--no-symred", c.symred.off, "Disable symmetry reduction");
    app->add_flag("--dc", c.dc.on, "Force don't-care propagation on");
    app->add_flag("--no-dc", c.dc.off, "Disable don't-care propagation");
    app->add_flag("--por", c.por.on, "Force partial-order reduction on");
    app->add_flag("--no-por", c.por.off, "Disable partial-order reduction");
    app->add_flag("--modularisation", c.modular.on, "Analyse independent modules separately");
    app->add_flag("--no-modularisation", c.modular.off, "Analyse the whole state space (default)");
    app->add_option("--budget", c.budget, "State budget")->check(CLI::PositiveNumber);
}

Optimisations resolveOptimisations(const MeasureSpec& spec, const Common& c) {
    Optimisations o = defaultOptimisations(spec);
    auto apply = [](bool& field, const Toggle& t, const char* name) {
        if (t.on && t.off) {
            throw UsageError(std::string("--") + name + " and --no-" + name + " are exclusive");
        }
        if (t.on) {
            field = true;
        }
        if (t.off) {
            field = false;
        }
    };
    apply(o.symmetryReduction, c.symred, "symred");
    apply(o.dontCarePropagation, c.dc, "dc");
    apply(o.partialOrderReduction, c.por, "por");
    apply(o.modularisation, c.modular, "modularisation");
    return o;
}

/// Parameter assignment from `--set x=v` flags.
std::map<std::string, Rational> parseSets(const std::vector<std::string>& sets, const ParameterList& params) {
    std::map<std::string, Rational> out;
    for (const auto& s : sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw UsageError("--set expects NAME=VALUE, got '" + s + "'");
        }
        std::string name = s.substr(0, eq);
        if (std::find(params.begin(), params.end(), name) == params.end()) {
            throw UsageError("--set: unknown parameter '" + name + "'");
        }
        auto v = parseRational(s.substr(eq + 1));
        if (!v) {
            throw UsageError("--set: malformed value in '" + s + "'");
        }
        out[name] = *v;
    }
    return out;
}

MarkovAutomaton substitute(const MarkovAutomaton& ma, const std::map<std::string, Rational>& values) {
    MarkovAutomaton out = ma;
    for (auto& w : out.weights) {
        for (std::size_t i = 0; i < ma.parameters.size(); ++i) {
            auto it = values.find(ma.parameters[i]);
            if (it != values.end()) {
                w = w.substitute(i, it->second);
            }
        }
    }
    return out;
}

Json optimisationsJson(const Optimisations& o) {
    return {{"symred", o.symmetryReduction},
            {"dc", o.dontCarePropagation},
            {"por", o.partialOrderReduction},
            {"modularisation", o.modularisation}};
}

Json boundsJson(const Bounds& b) {
    if (b.lower == b.upper) {
        return round9(b.lower);
    }
    return Json{{"min", round9(b.lower)}, {"max", round9(b.upper)}};
}

MeasureSpec measureArg(const std::string& text) {
    try {
        return parseMeasure(text);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

int runAnalyze(const Common& c) {
    auto start = std::chrono::steady_clock::now();
    MeasureSpec spec = measureArg(c.measure);
    spec.conditional = c.conditional;
    spec.event = c.event;
    Json out;
    out["measure"] = spec.toString();
    out["conditional"] = spec.conditional;
    out["event"] = spec.event.empty() ? Json("top") : Json(spec.event);

    if (!c.ma.empty()) {
        Json input = Json::parse(readFile(c.ma), nullptr, false);
        if (input.is_discarded()) {
            throw Error("malformed JSON in '" + c.ma + "'");
        }
        MarkovAutomaton ma = automatonFromJson(input);
        auto values = parseSets(c.sets, ma.parameters);
        if (values.size() != ma.parameters.size()) {
            MarkovAutomaton sub = substitute(ma, values);
            out["function"] = parametricMeasure(sub, spec).toString(sub.parameters);
        } else {
            std::vector<Rational> point;
            for (const auto& p : ma.parameters) {
                point.push_back(values.at(p));
            }
            auto w = instantiateWeights(ma, point);
            checkAdmissible(ma, w);
            std::size_t chain = 0;
            out["value"] = boundsJson(measureOnAutomaton(ma, w, spec, &chain));
            out["deterministic"] = ma.deterministic();
            out["chain_states"] = chain;
        }
        out["states"] = ma.states.size();
        out["transitions"] = ma.transitionCount();
    } else {
        DftModel m = buildModel(validate(parseDft(readFile(c.dft))));
        Optimisations opts = resolveOptimisations(spec, c);
        auto values = parseSets(c.sets, m.parameters());
        bool parametric = values.size() != m.parameters().size();
        auto violations = checkCompatibility(spec, opts, parametric);
        if (!violations.empty()) {
            std::string msg;
            for (const auto& v : violations) {
                msg += (msg.empty() ? "" : "; ") + v.message;
            }
            throw UsageError(msg);
        }
        out["optimisations"] = optimisationsJson(opts);
        if (parametric) {
            if (opts.modularisation) {
                throw UsageError("modularisation needs concrete parameter values");
            }
            MarkovAutomaton ma = generate(m, generationOptionsFor(m, spec, opts, c.budget));
            MarkovAutomaton sub = substitute(ma, values);
            out["function"] = parametricMeasure(sub, spec).toString(sub.parameters);
            out["states"] = ma.states.size();
            out["transitions"] = ma.transitionCount();
        } else {
            AnalysisRequest req;
            req.measure = spec;
            req.optimisations = opts;
            req.budget = c.budget;
            for (const auto& p : m.parameters()) {
                req.point.push_back(values.at(p));
            }
            AnalysisOutcome r = analyze(m, req);
            out["value"] = boundsJson(r.value);
            out["deterministic"] = r.deterministic;
            out["states"] = r.states;
            out["transitions"] = r.transitions;
            out["chain_states"] = r.chainStates;
            if (r.modular) {
                out["modules"] = r.modules;
            }
            if (r.lightSymmetry) {
                out["light_symmetry"] = true;
            }
        }
        Optimisations none{false, false, false, false};
        try {
            MarkovAutomaton raw = generate(m, generationOptionsFor(m, spec, none, c.budget));
            out["states_unoptimised"] = raw.states.size();
            out["transitions_unoptimised"] = raw.transitionCount();
            out["states_unfolded"] = unfoldedStates(raw);
        } catch (const BudgetExceeded&) {
            out["states_unoptimised"] = nullptr;
            out["transitions_unoptimised"] = nullptr;
            out["states_unfolded"] = nullptr;
        }
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.timing) {
        out["wall_time_s"] = round9(seconds);
    }
    emit(out);
    std::cerr << "wall time " << seconds << " s\n";
    return Ok;
}

struct RegionArgs {
    double threshold = 0.0;
    std::string direction = "above";
    std::string box;
    double coverage = 0.9;
    unsigned depth = 16;
    bool function = false;
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

Box parseBox(const std::string& text, const ParameterList& params) {
    Box box(params.size());
    std::vector<char> seen(params.size(), 0);
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto a = item.find(':');
        auto b = item.find(':', a == std::string::npos ? a : a + 1);
        if (a == std::string::npos || b == std::string::npos) {
            throw UsageError("--box expects NAME:LO:HI, got '" + item + "'");
        }
        std::string name = item.substr(0, a);
        auto it = std::find(params.begin(), params.end(), name);
        if (it == params.end()) {
            throw UsageError("--box: unknown parameter '" + name + "'");
        }
        double lo = 0, hi = 0;
        try {
            lo = std::stod(item.substr(a + 1, b - a - 1));
            hi = std::stod(item.substr(b + 1));
        } catch (const std::exception&) {
            throw UsageError("--box: malformed bounds in '" + item + "'");
        }
        if (!(lo <= hi)) {
            throw UsageError("--box: empty interval for '" + name + "'");
        }
        auto i = static_cast<std::size_t>(it - params.begin());
        box[i] = {lo, hi};
        seen[i] = 1;
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!seen[i]) {
            throw UsageError("--box: no interval for parameter '" + params[i] + "'");
        }
    }
    return box;
}

/// Rates must be positive, dependency probabilities lie in [0,1].
Box admissibleBox(const DftModel& m, Box box) {
    std::vector<char> probability(m.parameters().size(), 0);
    for (NodeId d : m.dependencies()) {
        for (std::size_t v : m.probability(d).variables()) {
            probability[v] = 1;
        }
    }
    for (std::size_t i = 0; i < box.size(); ++i) {
        if (probability[i]) {
            box[i].lo = std::max(box[i].lo, 0.0);
            box[i].hi = std::min(box[i].hi, 1.0);
        } else if (box[i].lo <= 0.0) {
            box[i].lo = std::nextafter(0.0, 1.0);
        }
        if (!(box[i].lo <= box[i].hi)) {
            throw UsageError("--box: no admissible values for parameter '" + m.parameters()[i] + "'");
        }
    }
    return box;
}

int runRegions(const Common& c, const RegionArgs& r) {
    auto start = std::chrono::steady_clock::now();
    MeasureSpec spec = measureArg(c.measure);
    spec.conditional = c.conditional;
    spec.event = c.event;
    DftModel m = buildModel(validate(parseDft(readFile(c.dft))));
    if (m.parameters().empty()) {
        throw UsageError("regions needs a parametric DFT");
    }
    Optimisations opts = resolveOptimisations(spec, c);
    auto violations = checkCompatibility(spec, opts, true);
    if (!violations.empty()) {
        std::string msg;
        for (const auto& v : violations) {
            msg += (msg.empty() ? "" : "; ") + v.message;
        }
        throw UsageError(msg);
    }
    if (!c.sets.empty()) {
        throw UsageError("regions does not take --set");
    }
    if (r.direction != "above" && r.direction != "below") {
        throw UsageError("--direction must be 'above' or 'below'");
    }
    Box box = admissibleBox(m, parseBox(r.box, m.parameters()));
    MarkovAutomaton ma = generate(m, generationOptionsFor(m, spec, opts, c.budget));
    RationalFunction f = parametricMeasure(ma, spec);

    PartitionOptions po;
    po.threshold = r.threshold;
    po.direction = r.direction == "above" ? Direction::Above : Direction::Below;
    po.coverage = r.coverage;
    po.depthCap = r.depth;
    po.threads = r.threads;
    PartitionResult res = partition(f, box, po);
    SamplingReport check = validateRegions(
        res.verdicts, [&](std::span<const double> p) { return concreteMeasureAt(ma, spec, p); }, r.threshold,
        r.samples, r.seed);

    std::ostringstream csv;
    for (const auto& p : m.parameters()) {
        csv << p << "_lo," << p << "_hi,";
    }
    csv << "class\n";
    for (const auto& v : res.verdicts) {
        for (const auto& i : v.box) {
            csv << round9(i.lo) << "," << round9(i.hi) << ",";
        }
        csv << regionClassName(v.cls) << "\n";
    }
    std::cout << csv.str();

    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json summary;
    summary["function"] = f.toString(m.parameters());
    summary["classified_fraction"] = round9(res.classifiedFraction);
    summary["satisfying_fraction"] = round9(res.satisfyingFraction);
    summary["partial"] = res.partial;
    summary["boxes"] = res.verdicts.size();
    summary["samples"] = check.samples;
    summary["violations"] = check.violations;
    summary["wall_time_s"] = round9(seconds);
    std::cerr << summary.dump(2) << "\n";
    if (r.function) {
        std::cerr << f.toString(m.parameters()) << "\n";
    }
    return check.violations == 0 ? Ok : NotComputable;
}

struct ExportArgs {
    std::string dotDft;
    std::string dotMa;
    std::string jsonMa;
};

int runExport(const Common& c, const ExportArgs& e) {
    MeasureSpec spec = measureArg(c.measure);
    spec.event = c.event;
    DftModel m = buildModel(validate(parseDft(readFile(c.dft))));
    if (e.dotDft.empty() && e.dotMa.empty() && e.jsonMa.empty()) {
        throw UsageError("export needs --dot-dft, --export-dot or --export-json");
    }
    if (!e.dotDft.empty()) {
        writeOutput(e.dotDft, dftToDot(m));
    }
    if (!e.dotMa.empty() || !e.jsonMa.empty()) {
        Optimisations opts = resolveOptimisations(spec, c);
        opts.modularisation = false;
        GenerationOptions g = generationOptionsFor(m, spec, opts, c.budget);
        g.keepStates = true;
        MarkovAutomaton ma = generate(m, g);
        if (!e.dotMa.empty()) {
            writeOutput(e.dotMa, automatonToDot(ma));
        }
        if (!e.jsonMa.empty()) {
            writeOutput(e.jsonMa, automatonToJson(ma).dump(1) + "\n");
        }
    }
    return Ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic fault tree analysis via Markov automata"};
    app.require_subcommand(1);
    Common common;

    auto* analyze = app.add_subcommand("analyze", "Compute a measure");
    auto* input = analyze->add_option_group("input");
    input->add_option("--dft", common.dft, "Galileo DFT file");
    input->add_option("--ma", common.ma, "Markov automaton JSON file");
    input->require_option(1);
    analyze->add_option("--measure", common.measure,
                        "probfail | mttf | vttf | faults | fv=BE | crit=BE | reliability=T");
    analyze->add_flag("--conditional", common.conditional, "Condition on eventual failure");
    analyze->add_option("--event", common.event, "Failure event formula");
    analyze->add_option("--set", common.sets, "Parameter value NAME=VALUE");
    analyze->add_flag("--timing", common.timing, "Include wall time in the JSON output");
    addToggles(analyze, common);

    RegionArgs ra;
    auto* regions = app.add_subcommand("regions", "Partition a parameter box against a threshold");
    regions->add_option("--dft", common.dft, "Galileo pDFT file")->required();
    regions->add_option("--measure", common.measure, "Measure (default mttf)");
    regions->add_flag("--conditional", common.conditional, "Condition on eventual failure");
    regions->add_option("--event", common.event, "Failure event formula");
    regions->add_option("--set", common.sets, "Not supported for regions");
    regions->add_option("--threshold", ra.threshold, "Threshold")->required();
    regions->add_option("--direction", ra.direction, "above | below");
    regions->add_option("--box", ra.box, "NAME:LO:HI,...")->required();
    regions->add_option("--coverage", ra.coverage, "Volume fraction to classify")->check(CLI::Range(0.0, 1.0));
    regions->add_option("--depth", ra.depth, "Maximal bisection depth");
    regions->add_flag("--function", ra.function, "Print the rational function");
    regions->add_option("--samples", ra.samples, "Validation samples per classified box");
    regions->add_option("--seed", ra.seed, "Sampling seed");
    regions->add_option("--threads", ra.threads, "Worker threads (0: all cores)");
    addToggles(regions, common);

    ExportArgs ea;
    auto* exportCmd = app.add_subcommand("export", "Write DOT/JSON artifacts");
    exportCmd->add_option("--dft", common.dft, "Galileo DFT file")->required();
    exportCmd->add_option("--dot-dft", ea.dotDft, "DFT graph (DOT), '-' for stdout");
    exportCmd->add_option("--export-dot", ea.dotMa, "Automaton graph (DOT), '-' for stdout");
    exportCmd->add_option("--export-json", ea.jsonMa, "Automaton (JSON), '-' for stdout");
    exportCmd->add_option("--measure", common.measure, "Measure whose labels the automaton carries");
    exportCmd->add_option("--event", common.event, "Failure event formula");
    addToggles(exportCmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? Ok : Usage;
    }

    try {
        if (*analyze) {
            return runAnalyze(common);
        }
        if (*regions) {
            if (regions->count("--measure") == 0) {
                common.measure = "mttf";
            }
            return runRegions(common, ra);
        }
        return runExport(common, ea);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return Usage;
    } catch (const IncompatibleMeasure& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return Usage;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return Io;
    } catch (const ParseError& e) {
        std::cerr << "galileo_io: " << e.what() << "\n";
        return Invalid;
    } catch (const ValidationError& e) {
        std::cerr << "galileo_io: " << e.what() << "\n";
        return Invalid;
    } catch (const BudgetExceeded& e) {
        std::cerr << "state_space: " << e.what() << "\n";
        return NotComputable;
    } catch (const UndefinedMeasure& e) {
        std::cerr << "markov_analysis: " << e.what() << "\n";
        return NotComputable;
    } catch (const NondeterminismRemains& e) {
        std::cerr << "markov_analysis: " << e.what() << "\n";
        return NotComputable;
    } catch (const NotModular& e) {
        std::cerr << "markov_analysis: " << e.what() << "\n";
        return NotComputable;
    } catch (const DegenerateDenominator& e) {
        std::cerr << "param_synth: " << e.what() << "\n";
        return NotComputable;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return Invalid;
    }
}
