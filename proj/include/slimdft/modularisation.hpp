#pragma once

#include "slimdft/error.hpp"
#include "slimdft/model.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace slimdft {

/// Decomposition of a DFT: inner nodes are static gates combining
/// independent modules, leaves are module roots analysed on their own.
struct ModuleTree {
    NodeId node = kNoNode;
    bool leaf = true;
    std::vector<ModuleTree> children;

    std::size_t leafCount() const {
        if (leaf) {
            return 1;
        }
        std::size_t n = 0;
        for (const auto& c : children) {
            n += c.leafCount();
        }
        return n;
    }
};

/// Subtree membership and independence of every node.
class ModuleIndex {
public:
    explicit ModuleIndex(const DftModel& m) : m_(m), members_(m.size()), independent_(m.size(), 0) {
        for (NodeId v = 0; v < m.size(); ++v) {
            const DftNode& n = m.node(v);
            if (n.kind == NodeKind::Dependency || n.kind == NodeKind::Sequence) {
                continue;
            }
            independent_[v] = check(v);
        }
    }

    bool isModule(NodeId v) const { return independent_[v]; }

    /// Nodes of the module rooted at `v`, including attached dependencies
    /// and sequence enforcers, ascending.
    const std::vector<NodeId>& members(NodeId v) const { return members_[v]; }

private:
    const DftModel& m_;
    std::vector<std::vector<NodeId>> members_;
    std::vector<char> independent_;

    bool check(NodeId v) {
        std::vector<char> in(m_.size(), 0);
        std::vector<NodeId> work{v};
        std::vector<NodeId> out;
        in[v] = 1;
        while (!work.empty()) {
            NodeId x = work.back();
            work.pop_back();
            out.push_back(x);
            if (!m_.node(x).isGate()) {
                continue;
            }
            for (NodeId c : m_.node(x).children) {
                if (!in[c]) {
                    in[c] = 1;
                    work.push_back(c);
                }
            }
        }
        bool ok = v == m_.top() || m_.moduleRepresentative(v) == kNoNode;
        for (NodeId x : out) {
            if (x != v) {
                for (NodeId p : m_.node(x).parents) {
                    ok = ok && in[p];
                }
            }
        }
        // Dependencies and sequence enforcers must lie entirely inside or
        // entirely outside.
        std::vector<NodeId> attached;
        for (NodeId r : m_.dependencies()) {
            attached.push_back(r);
        }
        for (NodeId r : m_.sequences()) {
            attached.push_back(r);
        }
        for (NodeId r : attached) {
            std::size_t inside = 0;
            const auto& ch = m_.node(r).children;
            for (NodeId c : ch) {
                inside += in[c];
            }
            if (inside == ch.size()) {
                out.push_back(r);
            } else if (inside != 0) {
                ok = false;
            }
        }
        std::sort(out.begin(), out.end());
        members_[v] = std::move(out);
        return ok;
    }
};

/// Maximal decomposition below static gates whose children are all
/// independent modules.
inline ModuleTree detectIndependentModules(const DftModel& m) {
    ModuleIndex index(m);
    std::function<ModuleTree(NodeId)> build = [&](NodeId v) {
        ModuleTree t;
        t.node = v;
        const DftNode& n = m.node(v);
        bool split = isStaticGate(n.kind);
        for (NodeId c : n.children) {
            split = split && index.isModule(c) && std::count(n.children.begin(), n.children.end(), c) == 1;
        }
        if (split) {
            t.leaf = false;
            for (NodeId c : n.children) {
                t.children.push_back(build(c));
            }
        }
        return t;
    };
    return build(m.top());
}

/// Description of the module rooted at `root` as a stand-alone DFT.
inline DftDescription moduleDescription(const DftModel& m, NodeId root) {
    ModuleIndex index(m);
    const auto& members = index.members(root);
    DftDescription d;
    d.topName = m.node(root).name;
    d.parameters = m.parameters();
    for (const auto& decl : m.description().nodes) {
        NodeId id = m.find(decl.name);
        if (std::binary_search(members.begin(), members.end(), id)) {
            d.nodes.push_back(decl);
        }
    }
    return d;
}

/// Combines per-leaf failure probabilities through the static skeleton.
inline double combineModules(const DftModel& m, const ModuleTree& t, const std::function<double(NodeId)>& leafValue) {
    if (t.leaf) {
        return leafValue(t.node);
    }
    std::vector<double> p;
    for (const auto& c : t.children) {
        p.push_back(combineModules(m, c, leafValue));
    }
    const DftNode& n = m.node(t.node);
    switch (n.kind) {
        case NodeKind::Or: {
            double survive = 1.0;
            for (double x : p) {
                survive *= 1.0 - x;
            }
            return 1.0 - survive;
        }
        case NodeKind::And: {
            double all = 1.0;
            for (double x : p) {
                all *= x;
            }
            return all;
        }
        case NodeKind::Voting: {
            // dist[j] = probability that exactly j children failed.
            std::vector<double> dist{1.0};
            for (double x : p) {
                std::vector<double> next(dist.size() + 1, 0.0);
                for (std::size_t j = 0; j < dist.size(); ++j) {
                    next[j] += dist[j] * (1.0 - x);
                    next[j + 1] += dist[j] * x;
                }
                dist = std::move(next);
            }
            double r = 0.0;
            for (std::size_t j = n.threshold; j < dist.size(); ++j) {
                r += dist[j];
            }
            return r;
        }
        default: throw NotModular("gate '" + n.name + "' cannot combine module results");
    }
}

} // namespace slimdft
