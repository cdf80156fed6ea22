#pragma once

#include "slimdft/galileo.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace slimdft {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct DftNode {
    NodeId id = kNoNode;
    std::string name;
    NodeKind kind = NodeKind::BasicEvent;
    unsigned threshold = 0;
    std::vector<NodeId> children;
    /// Failure-propagating parents (gates only).
    std::vector<NodeId> parents;
    /// Sequence enforcers listing this node.
    std::vector<NodeId> restrictions;
    /// Dependencies triggered by this node.
    std::vector<NodeId> triggers;
    /// Dependencies having this node as dependent event.
    std::vector<NodeId> dependencies;

    bool isBasicEvent() const { return kind == NodeKind::BasicEvent; }
    bool isGate() const { return slimdft::isGate(kind); }
};

/// Analysis-ready DFT: dense ids in declaration order, adjacency, spare
/// modules and activation. Immutable once built.
class DftModel {
public:
    const std::vector<DftNode>& nodes() const { return nodes_; }
    const DftNode& node(NodeId id) const { return nodes_[id]; }
    std::size_t size() const { return nodes_.size(); }
    NodeId top() const { return top_; }
    const ParameterList& parameters() const { return parameters_; }
    const DftDescription& description() const { return description_; }

    NodeId find(std::string_view name) const {
        auto it = byName_.find(std::string(name));
        return it == byName_.end() ? kNoNode : it->second;
    }

    const Polynomial& activeRate(NodeId be) const { return activeRate_[be]; }
    const Polynomial& dormancy(NodeId be) const { return dormancy_[be]; }
    const Polynomial& passiveRate(NodeId be) const { return passiveRate_[be]; }
    const Polynomial& probability(NodeId pdep) const { return probability_[pdep]; }

    const std::vector<NodeId>& basicEvents() const { return basicEvents_; }
    const std::vector<NodeId>& dependencies() const { return dependencies_; }
    const std::vector<NodeId>& sequences() const { return sequences_; }
    const std::vector<NodeId>& spares() const { return spares_; }

    /// Children before parents; covers every node.
    const std::vector<NodeId>& bottomUpOrder() const { return bottomUp_; }

    /// Spare module representatives in ascending id order.
    const std::vector<NodeId>& representatives() const { return representatives_; }
    const std::vector<NodeId>& spareModule(NodeId representative) const { return spareModules_.at(representative); }
    const std::map<NodeId, std::vector<NodeId>>& spareModules() const { return spareModules_; }

    /// Representative of the spare module containing `id`, kNoNode when the
    /// node is always active.
    NodeId moduleRepresentative(NodeId id) const { return moduleRep_[id]; }

    /// Spares located inside the module of `representative`.
    const std::vector<NodeId>& sparesInModule(NodeId representative) const { return sparesInModule_.at(representative); }

    const std::vector<NodeId>& initiallyActive() const { return initiallyActive_; }

    bool isRepresentative(NodeId id) const { return spareModules_.count(id) != 0; }

    /// Index of the representative in representatives(), or -1.
    int representativeIndex(NodeId id) const { return repIndex_[id]; }

private:
    DftDescription description_;
    std::vector<DftNode> nodes_;
    std::map<std::string, NodeId> byName_;
    NodeId top_ = kNoNode;
    ParameterList parameters_;
    std::vector<Polynomial> activeRate_;
    std::vector<Polynomial> dormancy_;
    std::vector<Polynomial> passiveRate_;
    std::vector<Polynomial> probability_;
    std::vector<NodeId> basicEvents_;
    std::vector<NodeId> dependencies_;
    std::vector<NodeId> sequences_;
    std::vector<NodeId> spares_;
    std::vector<NodeId> bottomUp_;
    std::vector<NodeId> representatives_;
    std::map<NodeId, std::vector<NodeId>> spareModules_;
    std::map<NodeId, std::vector<NodeId>> sparesInModule_;
    std::vector<NodeId> moduleRep_;
    std::vector<int> repIndex_;
    std::vector<NodeId> initiallyActive_;

    friend DftModel buildModel(const ValidatedDft& v);
};

inline DftModel buildModel(const ValidatedDft& v) {
    const DftDescription& d = v.description();
    DftModel m;
    m.description_ = d;
    m.parameters_ = d.parameters;
    const auto n = static_cast<NodeId>(d.nodes.size());
    m.nodes_.resize(n);
    m.activeRate_.resize(n);
    m.dormancy_.resize(n);
    m.passiveRate_.resize(n);
    m.probability_.resize(n);
    for (NodeId i = 0; i < n; ++i) {
        m.byName_[d.nodes[i].name] = i;
    }
    for (NodeId i = 0; i < n; ++i) {
        const auto& decl = d.nodes[i];
        auto& node = m.nodes_[i];
        node.id = i;
        node.name = decl.name;
        node.kind = decl.kind;
        node.threshold = decl.kind == NodeKind::Voting ? decl.threshold
                         : decl.kind == NodeKind::And  ? static_cast<unsigned>(decl.children.size())
                                                       : 1;
        for (const auto& c : decl.children) {
            node.children.push_back(m.byName_.at(c));
        }
        switch (decl.kind) {
            case NodeKind::BasicEvent:
                m.basicEvents_.push_back(i);
                m.activeRate_[i] = decl.rate;
                m.dormancy_[i] = decl.dormancy;
                m.passiveRate_[i] = decl.rate * decl.dormancy;
                break;
            case NodeKind::Dependency:
                m.dependencies_.push_back(i);
                m.probability_[i] = decl.probability;
                break;
            case NodeKind::Sequence: m.sequences_.push_back(i); break;
            case NodeKind::Spare: m.spares_.push_back(i); break;
            default: break;
        }
    }
    m.top_ = m.byName_.at(d.topName);
    for (NodeId i = 0; i < n; ++i) {
        const auto& node = m.nodes_[i];
        for (std::size_t k = 0; k < node.children.size(); ++k) {
            NodeId c = node.children[k];
            auto& child = m.nodes_[c];
            if (node.isGate()) {
                if (std::find(child.parents.begin(), child.parents.end(), i) == child.parents.end()) {
                    child.parents.push_back(i);
                }
            } else if (node.kind == NodeKind::Sequence) {
                child.restrictions.push_back(i);
            } else if (node.kind == NodeKind::Dependency) {
                (k == 0 ? child.triggers : child.dependencies).push_back(i);
            }
        }
    }

    // Post-order DFS over all edges yields children before parents.
    std::vector<char> seen(n, 0);
    std::vector<std::pair<NodeId, std::size_t>> stack;
    for (NodeId root = 0; root < n; ++root) {
        if (seen[root]) {
            continue;
        }
        seen[root] = 1;
        stack.push_back({root, 0});
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < m.nodes_[v].children.size()) {
                NodeId c = m.nodes_[v].children[next++];
                if (!seen[c]) {
                    seen[c] = 1;
                    stack.push_back({c, 0});
                }
            } else {
                m.bottomUp_.push_back(v);
                stack.pop_back();
            }
        }
    }

    // Spare modules.
    m.moduleRep_.assign(n, kNoNode);
    m.repIndex_.assign(n, -1);
    for (NodeId s : m.spares_) {
        for (NodeId c : m.nodes_[s].children) {
            if (!m.spareModules_.count(c)) {
                m.spareModules_[c] = {};
            }
        }
    }
    for (auto& [rep, members] : m.spareModules_) {
        m.repIndex_[rep] = static_cast<int>(m.representatives_.size());
        m.representatives_.push_back(rep);
        std::vector<NodeId> work{rep};
        std::vector<char> in(n, 0);
        in[rep] = 1;
        while (!work.empty()) {
            NodeId x = work.back();
            work.pop_back();
            members.push_back(x);
            m.moduleRep_[x] = rep;
            const auto& xn = m.nodes_[x];
            if (xn.kind == NodeKind::Spare || !xn.isGate()) {
                continue;
            }
            for (NodeId c : xn.children) {
                if (!in[c]) {
                    in[c] = 1;
                    work.push_back(c);
                }
            }
        }
        std::sort(members.begin(), members.end());
        auto& inner = m.sparesInModule_[rep];
        for (NodeId x : members) {
            if (m.nodes_[x].kind == NodeKind::Spare) {
                inner.push_back(x);
            }
        }
    }

    // Activation: spares outside every module are active, and the module of
    // the primary of an active spare is active.
    std::vector<char> active(n, 0);
    std::vector<NodeId> work;
    for (NodeId s : m.spares_) {
        if (m.moduleRep_[s] == kNoNode) {
            work.push_back(s);
        }
    }
    while (!work.empty()) {
        NodeId s = work.back();
        work.pop_back();
        NodeId primary = m.nodes_[s].children[0];
        if (active[primary]) {
            continue;
        }
        active[primary] = 1;
        for (NodeId inner : m.sparesInModule_.at(primary)) {
            work.push_back(inner);
        }
    }
    for (NodeId rep : m.representatives_) {
        if (active[rep]) {
            m.initiallyActive_.push_back(rep);
        }
    }
    return m;
}

inline DftModel buildModel(std::string_view galileoText) { return buildModel(validate(parseDft(galileoText))); }

} // namespace slimdft
