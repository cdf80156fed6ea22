#pragma once

#include "slimdft/model.hpp"

#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace slimdft {

enum class Status : std::uint8_t { Operational = 0, Failed = 1, FailSafe = 2, DontCare = 3 };

inline const char* statusName(Status s) {
    switch (s) {
        case Status::Operational: return "OP";
        case Status::Failed: return "F";
        case Status::FailSafe: return "FS";
        case Status::DontCare: return "X";
    }
    return "?";
}

/// Expanded fault-tree-automaton state.
///
/// `usedChild[s]` is the child index of the currently used child of spare
/// `s` (-1 once the spare is no longer operational). `active[r]` is the
/// activity of the module represented by `r`; entries of other nodes are 0.
struct FtState {
    std::vector<Status> status;
    std::vector<std::int16_t> usedChild;
    std::vector<std::uint8_t> active;

    bool operator==(const FtState&) const = default;

    Status operator[](NodeId id) const { return status[id]; }

    bool isOperational(NodeId id) const { return status[id] == Status::Operational; }
    bool isFailed(NodeId id) const { return status[id] == Status::Failed; }
};

/// Bit-vector encoding: 2 bits of status per node, ceil(log2(#children))
/// bits per spare for the used child, 1 bit per module representative.
struct PackedState {
    std::vector<std::uint64_t> words;

    bool operator==(const PackedState&) const = default;
};

struct PackedStateHash {
    std::size_t operator()(const PackedState& p) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (auto w : p.words) {
            h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }
};

class StateLayout {
public:
    explicit StateLayout(const DftModel& model) : nodeCount_(model.size()) {
        std::size_t offset = 2 * nodeCount_;
        for (NodeId s : model.spares()) {
            auto children = model.node(s).children.size();
            unsigned bits = children <= 1 ? 0 : static_cast<unsigned>(std::bit_width(children - 1));
            spareFields_.push_back({s, offset, bits});
            offset += bits;
        }
        for (NodeId r : model.representatives()) {
            repFields_.push_back({r, offset});
            offset += 1;
        }
        bits_ = offset;
    }

    std::size_t bitCount() const { return bits_; }

    PackedState pack(const FtState& s) const {
        PackedState p;
        p.words.assign((bits_ + 63) / 64, 0);
        for (std::size_t i = 0; i < nodeCount_; ++i) {
            put(p, 2 * i, 2, static_cast<std::uint64_t>(s.status[i]));
        }
        for (const auto& f : spareFields_) {
            auto v = s.usedChild[f.spare];
            put(p, f.offset, f.bits, v < 0 ? 0 : static_cast<std::uint64_t>(v));
        }
        for (const auto& f : repFields_) {
            put(p, f.offset, 1, s.active[f.rep] ? 1 : 0);
        }
        return p;
    }

    FtState unpack(const PackedState& p) const {
        FtState s;
        s.status.resize(nodeCount_);
        s.usedChild.assign(nodeCount_, -1);
        s.active.assign(nodeCount_, 0);
        for (std::size_t i = 0; i < nodeCount_; ++i) {
            s.status[i] = static_cast<Status>(get(p, 2 * i, 2));
        }
        for (const auto& f : spareFields_) {
            if (s.status[f.spare] == Status::Operational) {
                s.usedChild[f.spare] = static_cast<std::int16_t>(get(p, f.offset, f.bits));
            }
        }
        for (const auto& f : repFields_) {
            s.active[f.rep] = static_cast<std::uint8_t>(get(p, f.offset, 1));
        }
        return s;
    }

private:
    struct SpareField {
        NodeId spare;
        std::size_t offset;
        unsigned bits;
    };
    struct RepField {
        NodeId rep;
        std::size_t offset;
    };

    std::size_t nodeCount_;
    std::vector<SpareField> spareFields_;
    std::vector<RepField> repFields_;
    std::size_t bits_ = 0;

    static void put(PackedState& p, std::size_t offset, unsigned bits, std::uint64_t value) {
        for (unsigned b = 0; b < bits; ++b) {
            if (value >> b & 1u) {
                p.words[(offset + b) / 64] |= std::uint64_t{1} << ((offset + b) % 64);
            }
        }
    }

    static std::uint64_t get(const PackedState& p, std::size_t offset, unsigned bits) {
        std::uint64_t v = 0;
        for (unsigned b = 0; b < bits; ++b) {
            if (p.words[(offset + b) / 64] >> ((offset + b) % 64) & 1u) {
                v |= std::uint64_t{1} << b;
            }
        }
        return v;
    }
};

/// Human-readable rendering, e.g. "(F, X, OP, WS, X, F) / (A, A, A)".
inline std::string describe(const DftModel& model, const FtState& s, const std::vector<NodeId>& order) {
    std::string out = "(";
    for (std::size_t i = 0; i < order.size(); ++i) {
        NodeId id = order[i];
        if (i) {
            out += ", ";
        }
        const auto& node = model.node(id);
        if (node.kind == NodeKind::Spare && s.usedChild[id] >= 0) {
            out += model.node(node.children[static_cast<std::size_t>(s.usedChild[id])]).name;
        } else {
            out += statusName(s.status[id]);
        }
    }
    out += ")";
    if (!model.representatives().empty()) {
        out += " / (";
        bool first = true;
        for (NodeId r : model.representatives()) {
            out += first ? "" : ", ";
            out += s.active[r] ? "A" : "P";
            first = false;
        }
        out += ")";
    }
    return out;
}

} // namespace slimdft
