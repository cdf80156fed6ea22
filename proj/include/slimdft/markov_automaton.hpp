#pragma once

#include "slimdft/polynomial.hpp"
#include "slimdft/state.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace slimdft {

using StateId = std::uint32_t;
using WeightId = std::uint32_t;
using CauseId = std::uint32_t;
inline constexpr CauseId kNoCause = std::numeric_limits<CauseId>::max();

/// Rate-labelled transition of a Markovian state. `cause` names the basic
/// event whose failure it models.
struct MaDelay {
    StateId target = 0;
    WeightId weight = 0;
    CauseId cause = kNoCause;
};

/// One outcome of an immediate action. `cause` is the forwarded dependent
/// event, or kNoCause when nothing failed.
struct MaBranch {
    StateId target = 0;
    WeightId weight = 0;
    CauseId cause = kNoCause;
};

struct MaChoice {
    std::string action;
    std::vector<MaBranch> branches;
};

struct MaState {
    std::vector<MaDelay> delays;
    std::vector<MaChoice> choices;
    bool failed = false;
    bool failsafe = false;
    /// Failed flags of the measure-relevant nodes, aligned with
    /// MarkovAutomaton::relevantNames.
    std::vector<std::uint8_t> relevant;

    bool immediate() const { return !choices.empty(); }
    bool absorbing() const { return delays.empty() && choices.empty(); }
};

struct GenerationStats {
    std::size_t states = 0;
    std::size_t transitions = 0;
    /// Successor states computed, duplicates included.
    std::size_t explored = 0;
    std::size_t symmetryGroups = 0;
    bool symmetryReduction = false;
    bool dontCarePropagation = false;
    bool partialOrderReduction = false;
};

/// Markov automaton with polynomial weights. Rates and branch probabilities
/// are stored once in `weights` and referenced by id.
struct MarkovAutomaton {
    ParameterList parameters;
    std::vector<Polynomial> weights;
    std::vector<MaState> states;
    StateId initial = 0;
    std::vector<std::string> causes;
    std::vector<std::string> relevantNames;
    /// Optional per-state text (node statuses), used by exports.
    std::vector<std::string> descriptions;
    /// Optional expanded FTAut states, aligned with `states`.
    std::vector<FtState> ftStates;
    GenerationStats stats;

    WeightId weightId(const Polynomial& p) {
        auto key = p.toString();
        auto it = weightIndex_.find(key);
        if (it != weightIndex_.end()) {
            return it->second;
        }
        auto id = static_cast<WeightId>(weights.size());
        weights.push_back(p);
        weightIndex_.emplace(std::move(key), id);
        return id;
    }

    CauseId causeId(const std::string& name) {
        for (std::size_t i = 0; i < causes.size(); ++i) {
            if (causes[i] == name) {
                return static_cast<CauseId>(i);
            }
        }
        causes.push_back(name);
        return static_cast<CauseId>(causes.size() - 1);
    }

    CauseId findCause(const std::string& name) const {
        for (std::size_t i = 0; i < causes.size(); ++i) {
            if (causes[i] == name) {
                return static_cast<CauseId>(i);
            }
        }
        return kNoCause;
    }

    int relevantIndex(const std::string& name) const {
        for (std::size_t i = 0; i < relevantNames.size(); ++i) {
            if (relevantNames[i] == name) {
                return static_cast<int>(i);
            }
        }
        return -1;
    }

    std::size_t transitionCount() const {
        std::size_t n = 0;
        for (const auto& s : states) {
            n += s.delays.size();
            for (const auto& c : s.choices) {
                n += c.branches.size();
            }
        }
        return n;
    }

    bool deterministic() const {
        for (const auto& s : states) {
            if (s.choices.size() > 1) {
                return false;
            }
        }
        return true;
    }

private:
    std::map<std::string, WeightId> weightIndex_;
};

/// States a tree-shaped exploration without duplicate detection would
/// visit: the number of transition paths from the initial state, counting
/// the empty one. Saturates; a cyclic automaton gives the maximum.
inline std::uint64_t unfoldedStates(const MarkovAutomaton& ma) {
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    const std::size_t n = ma.states.size();
    auto forEachTarget = [&](StateId s, auto&& f) {
        for (const auto& d : ma.states[s].delays) {
            f(d.target);
        }
        for (const auto& c : ma.states[s].choices) {
            for (const auto& b : c.branches) {
                f(b.target);
            }
        }
    };
    std::vector<std::size_t> indegree(n, 0);
    for (StateId s = 0; s < n; ++s) {
        forEachTarget(s, [&](StateId t) { ++indegree[t]; });
    }
    std::vector<std::uint64_t> paths(n, 0);
    std::vector<StateId> ready;
    for (StateId s = 0; s < n; ++s) {
        if (indegree[s] == 0) {
            ready.push_back(s);
        }
    }
    if (n) {
        paths[ma.initial] = 1;
    }
    std::uint64_t total = 0;
    std::size_t done = 0;
    while (!ready.empty()) {
        StateId s = ready.back();
        ready.pop_back();
        ++done;
        total = total > kMax - paths[s] ? kMax : total + paths[s];
        forEachTarget(s, [&](StateId t) {
            paths[t] = paths[t] > kMax - paths[s] ? kMax : paths[t] + paths[s];
            if (--indegree[t] == 0) {
                ready.push_back(t);
            }
        });
    }
    return done == n ? total : kMax;
}

} // namespace slimdft
