#pragma once

#include "slimdft/error.hpp"
#include "slimdft/event.hpp"
#include "slimdft/markov_automaton.hpp"
#include "slimdft/model.hpp"
#include "slimdft/state.hpp"
#include "slimdft/symmetry.hpp"

#include <algorithm>
#include <optional>
#include <unordered_map>
#include <vector>

namespace slimdft {

struct GenerationOptions {
    bool symmetryReduction = true;
    bool dontCarePropagation = true;
    bool partialOrderReduction = true;
    std::size_t stateBudget = 5'000'000;
    /// Nodes whose status the measure reads: never don't-care, never inside
    /// a symmetric part, and labelled with a failed flag in every state.
    std::vector<NodeId> relevantNodes;
    /// Failure event; defaults to "top failed".
    std::optional<EventFormula> event;
    /// Keep expanded states and their text form in the automaton.
    bool keepStates = true;
};

struct Successor {
    FtState target;
    Polynomial weight;
    NodeId cause = kNoNode;
};

struct Choice {
    NodeId dependency = kNoNode;
    std::vector<Successor> branches;
};

/// Outgoing behaviour of one state: either delay transitions (Markovian) or
/// one choice per expanded triggered dependency (immediate).
struct Expansion {
    bool immediate = false;
    std::vector<Successor> delays;
    std::vector<Choice> choices;
};

/// Fault-tree-automaton semantics of one model.
class FtSemantics {
public:
    FtSemantics(const DftModel& m, bool dontCare, bool partialOrder, const std::vector<NodeId>& relevant = {})
        : m_(m), dc_(dontCare), por_(partialOrder), relevant_(m.size(), 0), sharedSpareChild_(m.size(), 0) {
        for (NodeId r : relevant) {
            relevant_[r] = 1;
        }
        std::vector<int> spareParents(m.size(), 0);
        for (NodeId s : m.spares()) {
            for (NodeId c : m.node(s).children) {
                ++spareParents[c];
            }
        }
        for (NodeId v = 0; v < m.size(); ++v) {
            sharedSpareChild_[v] = spareParents[v] > 1;
        }
        computeIndependence();
    }

    const DftModel& model() const { return m_; }

    FtState initialState() const {
        FtState s;
        auto n = m_.size();
        s.status.assign(n, Status::Operational);
        s.usedChild.assign(n, -1);
        s.active.assign(n, 0);
        for (NodeId sp : m_.spares()) {
            s.usedChild[sp] = 0;
        }
        for (NodeId r : m_.initiallyActive()) {
            s.active[r] = 1;
        }
        return s;
    }

    bool isActive(const FtState& s, NodeId v) const {
        NodeId rep = m_.moduleRepresentative(v);
        return rep == kNoNode || s.active[rep];
    }

    /// Failure of `be` followed by propagation. nullopt when a sequence
    /// enforcer forbids the failure.
    std::optional<FtState> applyBeFailure(const FtState& source, NodeId be) const {
        FtState s = source;
        s.status[be] = Status::Failed;
        propagateFailures(s);
        if (violatesSequence(s)) {
            return std::nullopt;
        }
        markFailSafe(s);
        settle(s);
        return s;
    }

    /// The no-forward outcome of a triggered dependency.
    FtState skipDependency(const FtState& source, NodeId pdep) const {
        FtState s = source;
        s.status[pdep] = Status::FailSafe;
        settle(s);
        return s;
    }

    bool isTriggered(const FtState& s, NodeId pdep) const {
        const auto& ch = m_.node(pdep).children;
        return s.status[pdep] == Status::Operational && s.status[ch[0]] == Status::Failed &&
               s.status[ch[1]] == Status::Operational;
    }

    std::vector<NodeId> triggered(const FtState& s) const {
        std::vector<NodeId> out;
        for (NodeId d : m_.dependencies()) {
            if (isTriggered(s, d)) {
                out.push_back(d);
            }
        }
        return out;
    }

    /// Static commutation check used by partial-order reduction.
    bool independent(NodeId d1, NodeId d2) const {
        return independent_[depIndex(d1)][depIndex(d2)];
    }

    Polynomial rateOf(const FtState& s, NodeId be) const {
        return isActive(s, be) ? m_.activeRate(be) : m_.passiveRate(be);
    }

    Expansion expand(const FtState& s) const {
        Expansion e;
        auto trig = triggered(s);
        if (!trig.empty()) {
            e.immediate = true;
            if (por_ && trig.size() > 1) {
                bool commutes = true;
                for (std::size_t i = 1; i < trig.size(); ++i) {
                    commutes = commutes && independent(trig[0], trig[i]);
                }
                if (commutes) {
                    trig.resize(1);
                }
            }
            for (NodeId d : trig) {
                e.choices.push_back(resolve(s, d));
            }
            return e;
        }
        for (NodeId be : m_.basicEvents()) {
            if (s.status[be] != Status::Operational) {
                continue;
            }
            Polynomial rate = rateOf(s, be);
            if (rate.isZero()) {
                continue;
            }
            if (auto t = applyBeFailure(s, be)) {
                e.delays.push_back({std::move(*t), std::move(rate), be});
            }
        }
        return e;
    }

    Choice resolve(const FtState& s, NodeId d) const {
        Choice c;
        c.dependency = d;
        NodeId dependent = m_.node(d).children[1];
        const Polynomial& p = m_.probability(d);
        auto forwarded = applyBeFailure(s, dependent);
        if (!forwarded) {
            c.branches.push_back({skipDependency(s, d), Polynomial(1), kNoNode});
            return c;
        }
        Polynomial q = Polynomial(1) - p;
        if (!p.isZero()) {
            c.branches.push_back({std::move(*forwarded), p, dependent});
        }
        if (!q.isZero()) {
            c.branches.push_back({skipDependency(s, d), q, kNoNode});
        }
        return c;
    }

private:
    const DftModel& m_;
    bool dc_;
    bool por_;
    std::vector<char> relevant_;
    std::vector<char> sharedSpareChild_;
    std::vector<std::vector<char>> independent_;

    std::size_t depIndex(NodeId d) const {
        const auto& deps = m_.dependencies();
        return static_cast<std::size_t>(std::lower_bound(deps.begin(), deps.end(), d) - deps.begin());
    }

    void computeIndependence() {
        const auto& deps = m_.dependencies();
        auto n = m_.size();
        // Ancestor closure over gate parents, including the node itself.
        auto ancestors = [&](NodeId v) {
            std::vector<char> seen(n, 0);
            std::vector<NodeId> work{v};
            seen[v] = 1;
            std::vector<NodeId> out;
            while (!work.empty()) {
                NodeId x = work.back();
                work.pop_back();
                out.push_back(x);
                for (NodeId p : m_.node(x).parents) {
                    if (!seen[p]) {
                        seen[p] = 1;
                        work.push_back(p);
                    }
                }
            }
            return out;
        };
        std::vector<char> harmless(deps.size(), 0);
        for (std::size_t i = 0; i < deps.size(); ++i) {
            NodeId d = deps[i];
            if (!m_.probability(d).isOne()) {
                continue;
            }
            bool ok = true;
            for (NodeId a : ancestors(m_.node(d).children[1])) {
                const DftNode& an = m_.node(a);
                if (an.kind == NodeKind::PriorityAnd || an.kind == NodeKind::PriorityOr ||
                    an.kind == NodeKind::Spare || !an.restrictions.empty() || !an.triggers.empty() ||
                    m_.isRepresentative(a)) {
                    ok = false;
                }
            }
            harmless[i] = ok;
        }
        independent_.assign(deps.size(), std::vector<char>(deps.size(), 0));
        for (std::size_t i = 0; i < deps.size(); ++i) {
            for (std::size_t j = 0; j < deps.size(); ++j) {
                independent_[i][j] = i != j && harmless[i] && harmless[j] &&
                                     m_.node(deps[i]).children[1] != m_.node(deps[j]).children[1];
            }
        }
    }

    static std::size_t countStatus(const FtState& s, const std::vector<NodeId>& children, Status st) {
        std::size_t k = 0;
        for (NodeId c : children) {
            k += s.status[c] == st;
        }
        return k;
    }

    bool claimable(const FtState& s, NodeId spare, NodeId child) const {
        if (s.status[child] != Status::Operational) {
            return false;
        }
        for (NodeId other : m_.node(child).parents) {
            if (other == spare || m_.node(other).kind != NodeKind::Spare) {
                continue;
            }
            if (s.status[other] == Status::Operational && s.usedChild[other] >= 0 &&
                m_.node(other).children[static_cast<std::size_t>(s.usedChild[other])] == child) {
                return false;
            }
        }
        return true;
    }

    void activate(FtState& s, NodeId rep) const {
        if (s.active[rep]) {
            return;
        }
        s.active[rep] = 1;
        for (NodeId inner : m_.sparesInModule(rep)) {
            if (s.status[inner] == Status::Operational && s.usedChild[inner] >= 0) {
                activate(s, m_.node(inner).children[static_cast<std::size_t>(s.usedChild[inner])]);
            }
        }
    }

    void propagateFailures(FtState& s) const {
        for (NodeId v : m_.bottomUpOrder()) {
            const DftNode& n = m_.node(v);
            if (!n.isGate() || s.status[v] != Status::Operational) {
                continue;
            }
            const auto& ch = n.children;
            bool fails = false;
            switch (n.kind) {
                case NodeKind::And:
                case NodeKind::Or:
                case NodeKind::Voting: fails = countStatus(s, ch, Status::Failed) >= n.threshold; break;
                case NodeKind::PriorityAnd: fails = countStatus(s, ch, Status::Failed) == ch.size(); break;
                case NodeKind::PriorityOr:
                    fails = s.status[ch[0]] == Status::Failed && countStatus(s, ch, Status::Failed) == 1;
                    break;
                case NodeKind::Spare: {
                    auto used = static_cast<std::size_t>(s.usedChild[v]);
                    if (s.status[ch[used]] != Status::Failed) {
                        break;
                    }
                    fails = true;
                    for (std::size_t i = 0; i < ch.size(); ++i) {
                        if (claimable(s, v, ch[i])) {
                            s.usedChild[v] = static_cast<std::int16_t>(i);
                            if (isActive(s, v)) {
                                activate(s, ch[i]);
                            }
                            fails = false;
                            break;
                        }
                    }
                    break;
                }
                default: break;
            }
            if (fails) {
                s.status[v] = Status::Failed;
                s.usedChild[v] = -1;
            }
        }
    }

    bool violatesSequence(const FtState& s) const {
        for (NodeId q : m_.sequences()) {
            if (s.status[q] == Status::DontCare) {
                continue;
            }
            bool earlierUnfailed = false;
            for (NodeId c : m_.node(q).children) {
                Status st = s.status[c];
                if (st == Status::Failed && earlierUnfailed) {
                    return true;
                }
                earlierUnfailed = earlierUnfailed || st == Status::Operational || st == Status::FailSafe;
            }
        }
        return false;
    }

    void markFailSafe(FtState& s) const {
        for (NodeId v : m_.bottomUpOrder()) {
            const DftNode& n = m_.node(v);
            if (!n.isGate() || s.status[v] != Status::Operational) {
                continue;
            }
            const auto& ch = n.children;
            bool safe = false;
            switch (n.kind) {
                case NodeKind::Or:
                case NodeKind::Voting: safe = ch.size() - countStatus(s, ch, Status::FailSafe) < n.threshold; break;
                case NodeKind::And: safe = countStatus(s, ch, Status::FailSafe) > 0; break;
                case NodeKind::PriorityAnd: {
                    safe = countStatus(s, ch, Status::FailSafe) > 0;
                    bool seenOperational = false;
                    for (NodeId c : ch) {
                        safe = safe || (seenOperational && s.status[c] == Status::Failed);
                        seenOperational = seenOperational || s.status[c] == Status::Operational;
                    }
                    break;
                }
                case NodeKind::PriorityOr: {
                    Status first = s.status[ch[0]];
                    std::size_t laterFailed = countStatus(s, ch, Status::Failed) - (first == Status::Failed);
                    safe = first == Status::FailSafe || laterFailed > 0;
                    break;
                }
                default: break;
            }
            if (safe) {
                s.status[v] = Status::FailSafe;
                s.usedChild[v] = -1;
            }
        }
    }

    bool eligibleForDontCare(const FtState& s, NodeId v) const {
        const DftNode& n = m_.node(v);
        if (v == m_.top() || s.status[v] == Status::DontCare || relevant_[v] || n.parents.empty()) {
            return false;
        }
        if (n.kind == NodeKind::Dependency || n.kind == NodeKind::Sequence) {
            return false;
        }
        for (NodeId p : n.parents) {
            if (s.status[p] == Status::Operational) {
                return false;
            }
        }
        for (NodeId d : n.triggers) {
            if (s.status[d] == Status::Operational) {
                return false;
            }
        }
        if (n.kind == NodeKind::Spare && s.status[v] == Status::Operational && s.usedChild[v] >= 0) {
            NodeId used = n.children[static_cast<std::size_t>(s.usedChild[v])];
            if (sharedSpareChild_[used]) {
                return false;
            }
        }
        return true;
    }

    void makeDontCare(FtState& s, NodeId v) const {
        s.status[v] = Status::DontCare;
        s.usedChild[v] = -1;
    }

    /// Dependency bookkeeping and don't-care propagation to a fixpoint.
    void settle(FtState& s) const {
        for (bool changed = true; changed;) {
            changed = false;
            for (NodeId d : m_.dependencies()) {
                if (s.status[d] == Status::Operational &&
                    s.status[m_.node(d).children[1]] != Status::Operational) {
                    s.status[d] = Status::FailSafe;
                    changed = true;
                }
            }
            if (!dc_) {
                continue;
            }
            const auto& order = m_.bottomUpOrder();
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                NodeId v = *it;
                if (m_.node(v).restrictions.empty() && eligibleForDontCare(s, v)) {
                    makeDontCare(s, v);
                    changed = true;
                }
            }
            for (NodeId q : m_.sequences()) {
                if (s.status[q] == Status::DontCare) {
                    continue;
                }
                bool all = true;
                for (NodeId c : m_.node(q).children) {
                    bool otherScopes = true;
                    for (NodeId q2 : m_.node(c).restrictions) {
                        otherScopes = otherScopes && (q2 == q || s.status[q2] == Status::DontCare);
                    }
                    all = all && otherScopes && (s.status[c] == Status::DontCare || eligibleForDontCare(s, c));
                }
                if (all) {
                    for (NodeId c : m_.node(q).children) {
                        makeDontCare(s, c);
                    }
                    s.status[q] = Status::DontCare;
                    changed = true;
                }
            }
        }
    }
};

inline FtState initialState(const DftModel& m) { return FtSemantics(m, true, true).initialState(); }

/// Explicit-state exploration of the fault-tree automaton and its
/// translation into a Markov automaton.
class StateSpaceGenerator {
public:
    StateSpaceGenerator(const DftModel& m, GenerationOptions opts = {})
        : m_(m), opts_(std::move(opts)), sem_(m, opts_.dontCarePropagation, opts_.partialOrderReduction, relevant()),
          layout_(m) {
        if (!opts_.event) {
            opts_.event = EventFormula::topFailed(m);
        }
        if (opts_.symmetryReduction) {
            groups_ = detectSymmetries(m, relevant());
        }
    }

    const FtSemantics& semantics() const { return sem_; }
    const std::vector<SymmetryGroup>& symmetryGroups() const { return groups_; }

    FtState canonical(FtState s) const { return groups_.empty() ? s : canonicalize(std::move(s), groups_); }

    bool isFailed(const FtState& s) const { return opts_.event->evaluate(s); }

    bool isFailSafe(const FtState& s) const {
        return opts_.event->isTopFailed() && s.status[m_.top()] == Status::FailSafe;
    }

    MarkovAutomaton generate() {
        MarkovAutomaton ma;
        ma.parameters = m_.parameters();
        auto rel = relevant();
        for (NodeId r : rel) {
            ma.relevantNames.push_back(m_.node(r).name);
        }
        for (NodeId be : m_.basicEvents()) {
            ma.causeId(m_.node(be).name);
        }
        std::vector<CauseId> causeOf(m_.size(), kNoCause);
        for (NodeId be : m_.basicEvents()) {
            causeOf[be] = ma.findCause(m_.node(be).name);
        }

        std::unordered_map<PackedState, StateId, PackedStateHash> index;
        std::vector<PackedState> packed;
        std::vector<StateId> stack;
        auto lookup = [&](FtState s) {
            s = canonical(std::move(s));
            PackedState p = layout_.pack(s);
            auto it = index.find(p);
            if (it != index.end()) {
                return it->second;
            }
            if (packed.size() >= opts_.stateBudget) {
                throw BudgetExceeded(packed.size(), opts_.stateBudget);
            }
            auto id = static_cast<StateId>(packed.size());
            index.emplace(p, id);
            packed.push_back(std::move(p));
            ma.states.emplace_back();
            stack.push_back(id);
            return id;
        };

        ma.initial = lookup(sem_.initialState());
        std::size_t explored = 0;
        while (!stack.empty()) {
            StateId id = stack.back();
            stack.pop_back();
            FtState s = layout_.unpack(packed[id]);
            MaState out;
            out.failed = isFailed(s);
            out.failsafe = !out.failed && isFailSafe(s);
            for (NodeId r : rel) {
                out.relevant.push_back(s.status[r] == Status::Failed);
            }
            if (!out.failed && !out.failsafe) {
                Expansion e = sem_.expand(s);
                explored += e.delays.size();
                for (auto& d : e.delays) {
                    WeightId w = ma.weightId(d.weight);
                    StateId t = lookup(std::move(d.target));
                    out.delays.push_back({t, w, causeOf[d.cause]});
                }
                for (auto& c : e.choices) {
                    MaChoice mc;
                    mc.action = m_.node(c.dependency).name;
                    explored += c.branches.size();
                    for (auto& b : c.branches) {
                        WeightId w = ma.weightId(b.weight);
                        StateId t = lookup(std::move(b.target));
                        mc.branches.push_back({t, w, b.cause == kNoNode ? kNoCause : causeOf[b.cause]});
                    }
                    out.choices.push_back(std::move(mc));
                }
            }
            ma.states[id] = std::move(out);
        }

        if (opts_.keepStates) {
            std::vector<NodeId> order(m_.size());
            for (NodeId i = 0; i < m_.size(); ++i) {
                order[i] = i;
            }
            for (const auto& p : packed) {
                FtState s = layout_.unpack(p);
                ma.descriptions.push_back(describe(m_, s, order));
                ma.ftStates.push_back(std::move(s));
            }
        }
        ma.stats.states = ma.states.size();
        ma.stats.transitions = ma.transitionCount();
        ma.stats.explored = explored;
        ma.stats.symmetryGroups = groups_.size();
        ma.stats.symmetryReduction = opts_.symmetryReduction;
        ma.stats.dontCarePropagation = opts_.dontCarePropagation;
        ma.stats.partialOrderReduction = opts_.partialOrderReduction;
        return ma;
    }

private:
    const DftModel& m_;
    GenerationOptions opts_;
    FtSemantics sem_;
    StateLayout layout_;
    std::vector<SymmetryGroup> groups_;

    std::vector<NodeId> relevant() const {
        std::vector<NodeId> r = opts_.relevantNodes;
        if (opts_.event && !opts_.event->isTopFailed()) {
            r.insert(r.end(), opts_.event->atoms().begin(), opts_.event->atoms().end());
        }
        std::sort(r.begin(), r.end());
        r.erase(std::unique(r.begin(), r.end()), r.end());
        return r;
    }
};

inline MarkovAutomaton generate(const DftModel& m, GenerationOptions opts = {}) {
    return StateSpaceGenerator(m, std::move(opts)).generate();
}

} // namespace slimdft
