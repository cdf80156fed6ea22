#pragma once

#include "slimdft/model.hpp"
#include "slimdft/state.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace slimdft {

/// Interchangeable isolated subtrees below one static gate. Every part
/// lists its nodes in canonical preorder, so position i of one part
/// corresponds to position i of every other part.
struct SymmetryGroup {
    NodeId parent = kNoNode;
    std::vector<std::vector<NodeId>> parts;
};

namespace symmetry_detail {

class Canonicaliser {
public:
    explicit Canonicaliser(const DftModel& m) : m_(m), forms_(m.size()) {}

    const std::string& form(NodeId v) {
        if (!forms_[v].empty()) {
            return forms_[v];
        }
        const DftNode& n = m_.node(v);
        std::string f;
        if (n.isBasicEvent()) {
            f = "BE(" + m_.activeRate(v).toString() + ";" + m_.dormancy(v).toString() + ")";
        } else {
            f = std::string(kindName(n.kind)) + std::to_string(n.threshold) + "[";
            std::vector<std::string> kids;
            for (NodeId c : n.children) {
                kids.push_back(form(c));
            }
            if (isStaticGate(n.kind)) {
                std::sort(kids.begin(), kids.end());
            }
            for (const auto& k : kids) {
                f += k;
                f += ',';
            }
            f += "]";
        }
        forms_[v] = std::move(f);
        return forms_[v];
    }

    /// Children in canonical order: static gates sort by form (stable by id),
    /// order-sensitive gates keep their declared order.
    std::vector<NodeId> orderedChildren(NodeId v) {
        const DftNode& n = m_.node(v);
        std::vector<NodeId> kids = n.children;
        if (isStaticGate(n.kind)) {
            std::stable_sort(kids.begin(), kids.end(), [&](NodeId a, NodeId b) { return form(a) < form(b); });
        }
        return kids;
    }

    void preorder(NodeId v, std::vector<NodeId>& out) {
        out.push_back(v);
        if (m_.node(v).isGate()) {
            for (NodeId c : orderedChildren(v)) {
                preorder(c, out);
            }
        }
    }

private:
    const DftModel& m_;
    std::vector<std::string> forms_;
};

} // namespace symmetry_detail

/// Groups of symmetric parts below AND/OR/VOT gates. Parts containing an
/// excluded node, a dependency or sequence member, or any node reachable
/// from outside the part are rejected.
inline std::vector<SymmetryGroup> detectSymmetries(const DftModel& m, const std::vector<NodeId>& excluded = {}) {
    symmetry_detail::Canonicaliser canon(m);
    std::vector<char> isExcluded(m.size(), 0);
    for (NodeId e : excluded) {
        isExcluded[e] = 1;
    }
    std::vector<char> initiallyActive(m.size(), 0);
    for (NodeId r : m.initiallyActive()) {
        initiallyActive[r] = 1;
    }

    auto isolatedPart = [&](NodeId g, NodeId root, std::vector<NodeId>& part) {
        part.clear();
        canon.preorder(root, part);
        std::vector<NodeId> sorted = part;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            return false;
        }
        auto inside = [&](NodeId x) { return std::binary_search(sorted.begin(), sorted.end(), x); };
        for (NodeId v : part) {
            const DftNode& n = m.node(v);
            if (isExcluded[v] || !n.restrictions.empty() || !n.triggers.empty() || !n.dependencies.empty()) {
                return false;
            }
            if (v == root) {
                if (n.parents.size() != 1 || n.parents[0] != g) {
                    return false;
                }
            } else {
                for (NodeId p : n.parents) {
                    if (!inside(p)) {
                        return false;
                    }
                }
            }
        }
        return true;
    };

    std::vector<SymmetryGroup> groups;
    for (NodeId g : m.bottomUpOrder()) {
        const DftNode& gn = m.node(g);
        if (!isStaticGate(gn.kind)) {
            continue;
        }
        std::map<std::string, std::vector<NodeId>> byForm;
        for (NodeId c : gn.children) {
            if (std::count(gn.children.begin(), gn.children.end(), c) == 1) {
                byForm[canon.form(c)].push_back(c);
            }
        }
        for (auto& [form, roots] : byForm) {
            if (roots.size() < 2) {
                continue;
            }
            SymmetryGroup group;
            group.parent = g;
            std::vector<NodeId> part;
            std::vector<std::uint8_t> firstActivity;
            for (NodeId r : roots) {
                if (!isolatedPart(g, r, part)) {
                    continue;
                }
                std::vector<std::uint8_t> activity;
                for (NodeId v : part) {
                    activity.push_back(m.isRepresentative(v) ? initiallyActive[v] : 0);
                }
                if (group.parts.empty()) {
                    firstActivity = activity;
                } else if (activity != firstActivity) {
                    continue;
                }
                group.parts.push_back(part);
            }
            if (group.parts.size() >= 2) {
                groups.push_back(std::move(group));
            }
        }
    }
    return groups;
}

/// Representative of the symmetry class of `s`: within each group, part
/// slices are sorted lexicographically. Groups are visited innermost first.
inline FtState canonicalize(FtState s, const std::vector<SymmetryGroup>& groups) {
    using Slot = std::tuple<std::uint8_t, std::int16_t, std::uint8_t>;
    for (const auto& g : groups) {
        std::vector<std::vector<Slot>> slices;
        slices.reserve(g.parts.size());
        for (const auto& part : g.parts) {
            std::vector<Slot> slice;
            slice.reserve(part.size());
            for (NodeId v : part) {
                slice.emplace_back(static_cast<std::uint8_t>(s.status[v]), s.usedChild[v], s.active[v]);
            }
            slices.push_back(std::move(slice));
        }
        if (std::is_sorted(slices.begin(), slices.end())) {
            continue;
        }
        std::sort(slices.begin(), slices.end());
        for (std::size_t p = 0; p < g.parts.size(); ++p) {
            const auto& part = g.parts[p];
            for (std::size_t i = 0; i < part.size(); ++i) {
                auto [st, used, act] = slices[p][i];
                s.status[part[i]] = static_cast<Status>(st);
                s.usedChild[part[i]] = used;
                s.active[part[i]] = act;
            }
        }
    }
    return s;
}

} // namespace slimdft
