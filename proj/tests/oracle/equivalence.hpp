#pragma once

// Comparisons against the history oracle and between optimisation settings.
// Each check returns a list of human-readable mismatches; empty means agreement.

#include "history_oracle.hpp"
#include "slimdft/slimdft.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using namespace slimdft;

namespace detail {

using EdgeKey = std::tuple<std::string, std::size_t, double, std::string>;

// the oracle takes 1 - p in floating point
inline double rounded(double w) { return std::round(w * 1e12) / 1e12; }

inline std::vector<EdgeKey> graphEdges(const Graph& g, std::size_t s, const std::vector<std::size_t>& toMa) {
    std::vector<EdgeKey> out;
    for (const auto& e : g.edges[s]) {
        out.emplace_back(e.immediate ? e.action : "", toMa[e.target], rounded(e.weight), e.cause);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<EdgeKey> automatonEdges(const MarkovAutomaton& ma, StateId s) {
    std::vector<EdgeKey> out;
    auto causeName = [&](CauseId c) { return c == kNoCause ? std::string() : ma.causes[c]; };
    const std::span<const double> none;
    for (const auto& d : ma.states[s].delays) {
        out.emplace_back("", d.target, rounded(ma.weights[d.weight].evaluate(none)), causeName(d.cause));
    }
    for (const auto& c : ma.states[s].choices) {
        for (const auto& b : c.branches) {
            out.emplace_back(c.action, b.target, rounded(ma.weights[b.weight].evaluate(none)), causeName(b.cause));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<std::uint8_t> key(const FtState& s) {
    std::vector<std::uint8_t> k;
    for (auto st : s.status) {
        k.push_back(static_cast<std::uint8_t>(st));
    }
    for (auto c : s.usedChild) {
        k.push_back(static_cast<std::uint8_t>(c + 1));
    }
    k.insert(k.end(), s.active.begin(), s.active.end());
    return k;
}

inline bool close(double a, double b, double tol = 1e-9) {
    if (std::isinf(a) || std::isinf(b)) {
        return a == b;
    }
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

template <class... T>
std::string str(const T&... parts) {
    std::ostringstream os;
    os.precision(17);
    (os << ... << parts);
    return os.str();
}

} // namespace detail

/// Value of a measure, or the kind of error it raised.
struct Result {
    Bounds value{};
    std::string error;
    bool deterministic = true;
};

inline Result run(const DftModel& m, const std::string& spec, bool conditional, Optimisations o) {
    AnalysisRequest req;
    req.measure = parseMeasure(spec);
    req.measure.conditional = conditional;
    req.optimisations = o;
    Result r;
    try {
        auto out = analyze(m, req);
        r.value = out.value;
        r.deterministic = out.deterministic;
    } catch (const UndefinedMeasure&) {
        r.error = "undefined";
    } catch (const NondeterminismRemains&) {
        r.error = "nondeterministic";
    } catch (const NotModular&) {
        r.error = "not-modular";
    }
    return r;
}

struct Query {
    std::string spec;
    bool conditional;
};

inline std::vector<Query> queries(const DftModel& m) {
    std::vector<Query> q = {{"probfail", false}, {"probfail", true}, {"mttf", false},   {"mttf", true},
                            {"vttf", false},     {"vttf", true},     {"faults", false}, {"faults", true},
                            {"reliability=0.7", false}};
    for (NodeId be : m.basicEvents()) {
        q.push_back({"fv=" + m.node(be).name, false});
        q.push_back({"crit=" + m.node(be).name, false});
    }
    return q;
}

/// Unoptimised generation against the history enumeration, state for state.
inline std::vector<std::string> bijectionMismatches(const DftModel& m) {
    using namespace detail;
    std::vector<std::string> bad;
    Graph g = HistoryOracle(m).explore();
    if (!g.consistent) {
        bad.push_back("oracle: one state reached with different successors");
    }
    GenerationOptions o;
    o.symmetryReduction = o.dontCarePropagation = o.partialOrderReduction = false;
    MarkovAutomaton ma = generate(m, o);
    if (ma.states.size() != g.states.size()) {
        bad.push_back(str(ma.states.size(), " states vs ", g.states.size(), " in the oracle"));
        return bad;
    }
    std::map<std::vector<std::uint8_t>, StateId> index;
    for (StateId s = 0; s < ma.ftStates.size(); ++s) {
        index[key(ma.ftStates[s])] = s;
    }
    std::vector<std::size_t> toMa(g.states.size());
    for (std::size_t i = 0; i < g.states.size(); ++i) {
        auto it = index.find(key(g.states[i]));
        if (it == index.end()) {
            bad.push_back(str("oracle state ", i, " missing from the automaton"));
            return bad;
        }
        toMa[i] = it->second;
    }
    if (toMa[0] != ma.initial) {
        bad.push_back("initial states differ");
    }
    for (std::size_t i = 0; i < g.states.size(); ++i) {
        StateId s = toMa[i];
        const std::string& d = ma.descriptions[s];
        if (ma.states[s].failed != bool(g.failed[i]) || ma.states[s].failsafe != bool(g.failsafe[i])) {
            bad.push_back("labels differ at " + d);
        }
        if (automatonEdges(ma, s) != graphEdges(g, i, toMa)) {
            bad.push_back("transitions differ at " + d);
        }
    }
    return bad;
}

/// Every measure with and without default optimisations against dense
/// solutions of the enumerated graph.
inline std::vector<std::string> measureMismatches(const DftModel& m) {
    using namespace detail;
    std::vector<std::string> bad;
    Graph g = HistoryOracle(m).explore();
    DenseMeasures p0(g, 0), p1(g, 1);
    const double pf0 = p0.probFail(), pf1 = p1.probFail();
    const bool certain = pf0 > 1 - 1e-12 && pf1 > 1 - 1e-12;
    const bool possible = pf0 > 1e-12 && pf1 > 1e-12;
    for (const auto& q : queries(m)) {
        MeasureSpec spec = parseMeasure(q.spec);
        spec.conditional = q.conditional;
        for (bool optimised : {false, true}) {
            std::string what = q.spec + (q.conditional ? " cond" : "") + (optimised ? " opt" : " plain");
            Optimisations o = optimised ? defaultOptimisations(spec) : Optimisations{false, false, false, false};
            Result r = run(m, q.spec, q.conditional, o);
            if (!r.deterministic || r.error == "nondeterministic") {
                // only unconditional first moments are answered here; the
                // oracle's two policies must lie within the bounds
                if (r.error.empty()) {
                    double a = spec.kind == MeasureKind::ProbFail ? pf0 : p0.mttf();
                    double b = spec.kind == MeasureKind::ProbFail ? pf1 : p1.mttf();
                    if (r.value.lower > std::min(a, b) + 1e-9 || r.value.upper < std::max(a, b) - 1e-9) {
                        bad.push_back(str(what, ": bounds [", r.value.lower, ", ", r.value.upper, "] miss ", a, "/", b));
                    }
                }
                continue;
            }
            if (std::abs(pf0 - pf1) > 1e-12) {
                bad.push_back(what + ": deterministic result but policy-dependent oracle");
                continue;
            }
            std::function<double()> expect;
            bool defined = true;
            switch (spec.kind) {
                case MeasureKind::ProbFail:
                    expect = [&] { return q.conditional ? 1.0 : pf0; };
                    defined = !q.conditional || possible;
                    break;
                case MeasureKind::Mttf:
                    expect = [&] { return q.conditional ? p0.mttfConditional() : p0.mttf(); };
                    defined = q.conditional ? possible : certain;
                    break;
                case MeasureKind::Vttf:
                    expect = [&] { return q.conditional ? p0.vttfConditional() : p0.vttf(); };
                    defined = q.conditional ? possible : certain;
                    break;
                case MeasureKind::ExpectedFaults:
                    expect = [&] { return q.conditional ? p0.faultsConditional() : p0.faults(); };
                    defined = q.conditional ? possible : certain;
                    break;
                case MeasureKind::FussellVesely:
                    expect = [&] { return p0.fussellVesely(m.find(spec.basicEvent)); };
                    defined = possible;
                    break;
                case MeasureKind::Criticality:
                    expect = [&] { return p0.criticality(spec.basicEvent); };
                    defined = possible;
                    break;
                case MeasureKind::Reliability: expect = [&] { return p0.reliability(spec.time); }; break;
            }
            if (!defined) {
                if (r.error != "undefined") {
                    bad.push_back(what + ": expected an undefined measure, got " +
                                  (r.error.empty() ? str(r.value.lower) : r.error));
                }
                continue;
            }
            if (!r.error.empty()) {
                bad.push_back(what + ": " + r.error);
                continue;
            }
            double want = expect();
            if (!close(r.value.lower, want) || r.value.lower != r.value.upper) {
                bad.push_back(str(what, ": ", r.value.lower, " vs oracle ", want));
            }
        }
    }
    return bad;
}

/// Every allowed optimisation combination against the plain run.
inline std::vector<std::string> optimisationMismatches(const DftModel& m, std::size_t* compared = nullptr) {
    using namespace detail;
    std::vector<std::string> bad;
    const Optimisations none{false, false, false, false};
    for (const auto& q : queries(m)) {
        MeasureSpec s = parseMeasure(q.spec);
        s.conditional = q.conditional;
        if (!checkCompatibility(s, none).empty()) {
            continue;
        }
        Result plain = run(m, q.spec, q.conditional, none);
        if (plain.error == "nondeterministic") {
            // partial order reduction may legitimately make these answerable
            continue;
        }
        for (int mask = 1; mask < 16; ++mask) {
            Optimisations o{bool(mask & 1), bool(mask & 2), bool(mask & 4), bool(mask & 8)};
            if (!checkCompatibility(s, o).empty()) {
                continue;
            }
            std::string what = q.spec + (q.conditional ? " cond" : "") + " mask " + std::to_string(mask);
            Result r = run(m, q.spec, q.conditional, o);
            if (r.error == "not-modular") {
                continue;
            }
            if (r.error != plain.error) {
                bad.push_back(what + ": '" + r.error + "' vs plain '" + plain.error + "'");
                continue;
            }
            if (r.error.empty()) {
                if (!close(r.value.lower, plain.value.lower) || !close(r.value.upper, plain.value.upper)) {
                    bad.push_back(str(what, ": ", r.value.lower, " vs ", plain.value.lower));
                }
                if (compared) {
                    ++*compared;
                }
            }
        }
    }
    return bad;
}

inline std::string join(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
        out += l + "\n";
    }
    return out;
}

} // namespace oracle
