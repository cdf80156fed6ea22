#pragma once

#include "slimdft/galileo.hpp"
#include "slimdft/markov_automaton.hpp"
#include "slimdft/model.hpp"

#include <nlohmann/json.hpp>

#include <sstream>
#include <string>

namespace slimdft {

namespace export_detail {

inline std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + "\"";
}

} // namespace export_detail

/// DFT as a directed graph; nodes labelled `name:kind`, spare modules as
/// clusters.
inline std::string dftToDot(const DftModel& m) {
    using export_detail::quote;
    std::ostringstream os;
    os << "digraph dft {\n";
    auto nodeLine = [&](NodeId v) {
        const DftNode& n = m.node(v);
        std::string kind = kindName(n.kind);
        if (n.kind == NodeKind::Voting) {
            kind = std::to_string(n.threshold) + "of" + std::to_string(n.children.size());
        }
        os << "  n" << v << " [label=" << quote(n.name + ":" + kind) << (v == m.top() ? ", peripheries=2" : "")
           << "];\n";
    };
    std::vector<char> placed(m.size(), 0);
    for (NodeId rep : m.representatives()) {
        os << " subgraph cluster_" << rep << " {\n  style=dotted;\n";
        for (NodeId v : m.spareModule(rep)) {
            os << " ";
            nodeLine(v);
            placed[v] = 1;
        }
        os << " }\n";
    }
    for (NodeId v = 0; v < m.size(); ++v) {
        if (!placed[v]) {
            nodeLine(v);
        }
    }
    for (NodeId v = 0; v < m.size(); ++v) {
        const DftNode& n = m.node(v);
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            os << "  n" << v << " -> n" << n.children[i];
            if (n.kind == NodeKind::Dependency || n.kind == NodeKind::Sequence || isOrderSensitive(n.kind)) {
                os << " [label=\"" << i << "\"" << (n.isGate() ? "" : ", style=dashed") << "]";
            }
            os << ";\n";
        }
    }
    os << "}\n";
    return os.str();
}

inline std::string automatonToDot(const MarkovAutomaton& ma) {
    using export_detail::quote;
    std::ostringstream os;
    os << "digraph ma {\n";
    for (StateId s = 0; s < ma.states.size(); ++s) {
        const MaState& st = ma.states[s];
        std::string label = s < ma.descriptions.size() ? ma.descriptions[s] : "s" + std::to_string(s);
        if (st.failed) {
            label += " failed";
        } else if (st.failsafe) {
            label += " failsafe";
        }
        os << "  s" << s << " [label=" << quote(label);
        if (st.immediate()) {
            os << ", shape=box";
        }
        if (s == ma.initial) {
            os << ", penwidth=2";
        }
        os << "];\n";
    }
    for (StateId s = 0; s < ma.states.size(); ++s) {
        const MaState& st = ma.states[s];
        for (const auto& d : st.delays) {
            os << "  s" << s << " -> s" << d.target << " [label=" << quote("rate=" + ma.weights[d.weight].toString(ma.parameters))
               << "];\n";
        }
        for (const auto& c : st.choices) {
            for (const auto& b : c.branches) {
                os << "  s" << s << " -> s" << b.target << " [style=dashed, label="
                   << quote(c.action + " p=" + ma.weights[b.weight].toString(ma.parameters)) << "];\n";
            }
        }
    }
    os << "}\n";
    return os.str();
}

inline nlohmann::ordered_json automatonToJson(const MarkovAutomaton& ma) {
    nlohmann::ordered_json j;
    j["parameters"] = ma.parameters;
    j["causes"] = ma.causes;
    j["relevant"] = ma.relevantNames;
    j["initial"] = ma.initial;
    nlohmann::ordered_json meta;
    meta["states"] = ma.stats.states;
    meta["transitions"] = ma.stats.transitions;
    meta["symmetry_groups"] = ma.stats.symmetryGroups;
    meta["symred"] = ma.stats.symmetryReduction;
    meta["dc"] = ma.stats.dontCarePropagation;
    meta["por"] = ma.stats.partialOrderReduction;
    j["metadata"] = meta;
    auto causeName = [&](CauseId c) -> nlohmann::ordered_json {
        if (c == kNoCause) {
            return nullptr;
        }
        return ma.causes[c];
    };
    auto states = nlohmann::ordered_json::array();
    for (StateId s = 0; s < ma.states.size(); ++s) {
        const MaState& st = ma.states[s];
        nlohmann::ordered_json js;
        js["id"] = s;
        if (s < ma.descriptions.size()) {
            js["status"] = ma.descriptions[s];
        }
        js["failed"] = st.failed;
        js["failsafe"] = st.failsafe;
        js["labels"] = st.relevant;
        auto delays = nlohmann::ordered_json::array();
        for (const auto& d : st.delays) {
            delays.push_back(
                {{"target", d.target}, {"rate", ma.weights[d.weight].toString(ma.parameters)}, {"cause", causeName(d.cause)}});
        }
        js["delays"] = delays;
        auto choices = nlohmann::ordered_json::array();
        for (const auto& c : st.choices) {
            auto branches = nlohmann::ordered_json::array();
            for (const auto& b : c.branches) {
                branches.push_back({{"target", b.target},
                                    {"probability", ma.weights[b.weight].toString(ma.parameters)},
                                    {"cause", causeName(b.cause)}});
            }
            choices.push_back({{"action", c.action}, {"branches", branches}});
        }
        js["choices"] = choices;
        states.push_back(js);
    }
    j["states"] = states;
    return j;
}

inline MarkovAutomaton automatonFromJson(const nlohmann::json& j) {
    MarkovAutomaton ma;
    try {
        ma.parameters = j.at("parameters").get<ParameterList>();
        for (const auto& c : j.at("causes")) {
            ma.causeId(c.get<std::string>());
        }
        ma.relevantNames = j.value("relevant", std::vector<std::string>{});
        ma.initial = j.at("initial").get<StateId>();
        if (j.contains("metadata")) {
            const auto& meta = j["metadata"];
            ma.stats.symmetryGroups = meta.value("symmetry_groups", std::size_t{0});
            ma.stats.symmetryReduction = meta.value("symred", false);
            ma.stats.dontCarePropagation = meta.value("dc", false);
            ma.stats.partialOrderReduction = meta.value("por", false);
        }
        auto cause = [&](const nlohmann::json& c) -> CauseId {
            return c.is_null() ? kNoCause : ma.causeId(c.get<std::string>());
        };
        const auto& states = j.at("states");
        ma.states.resize(states.size());
        for (std::size_t s = 0; s < states.size(); ++s) {
            const auto& js = states[s];
            MaState& st = ma.states[s];
            st.failed = js.at("failed").get<bool>();
            st.failsafe = js.value("failsafe", false);
            st.relevant = js.value("labels", std::vector<std::uint8_t>{});
            if (js.contains("status")) {
                ma.descriptions.resize(states.size());
                ma.descriptions[s] = js["status"].get<std::string>();
            }
            for (const auto& d : js.at("delays")) {
                st.delays.push_back({d.at("target").get<StateId>(),
                                     ma.weightId(parsePolynomial(d.at("rate").get<std::string>(), ma.parameters)),
                                     cause(d.value("cause", nlohmann::json()))});
            }
            for (const auto& c : js.at("choices")) {
                MaChoice mc;
                mc.action = c.at("action").get<std::string>();
                for (const auto& b : c.at("branches")) {
                    mc.branches.push_back(
                        {b.at("target").get<StateId>(),
                         ma.weightId(parsePolynomial(b.at("probability").get<std::string>(), ma.parameters)),
                         cause(b.value("cause", nlohmann::json()))});
                }
                st.choices.push_back(std::move(mc));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed automaton JSON: ") + e.what());
    }
    for (const auto& st : ma.states) {
        auto check = [&](StateId t) {
            if (t >= ma.states.size()) {
                throw Error("automaton JSON: transition to unknown state " + std::to_string(t));
            }
        };
        for (const auto& d : st.delays) {
            check(d.target);
        }
        for (const auto& c : st.choices) {
            for (const auto& b : c.branches) {
                check(b.target);
            }
        }
        if (!st.delays.empty() && !st.choices.empty()) {
            throw Error("automaton JSON: a state mixes delay and immediate transitions");
        }
    }
    if (ma.initial >= ma.states.size()) {
        throw Error("automaton JSON: initial state out of range");
    }
    ma.stats.states = ma.states.size();
    ma.stats.transitions = ma.transitionCount();
    return ma;
}

} // namespace slimdft
