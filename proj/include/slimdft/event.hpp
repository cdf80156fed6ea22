#pragma once

#include "slimdft/error.hpp"
#include "slimdft/model.hpp"
#include "slimdft/state.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace slimdft {

/// Boolean formula over node-failed atoms.
///
/// Syntax: `expr := term ('|' term)*`, `term := factor ('&' factor)*`,
/// `factor := '!' factor | '(' expr ')' | NAME`. A NAME is a quoted string or
/// a bare identifier and denotes "node has failed".
class EventFormula {
public:
    static EventFormula topFailed(const DftModel& m) {
        EventFormula f;
        f.nodes_.push_back({Op::Atom, m.top(), -1, -1});
        f.atoms_.push_back(m.top());
        f.root_ = 0;
        f.isTop_ = true;
        return f;
    }

    static EventFormula parse(std::string_view text, const DftModel& m) {
        EventFormula f;
        Parser p{text, m, f};
        f.root_ = p.expr();
        p.skipSpace();
        if (p.pos != text.size()) {
            throw Error("event formula: unexpected '" + std::string(1, text[p.pos]) + "' at offset " +
                        std::to_string(p.pos));
        }
        std::sort(f.atoms_.begin(), f.atoms_.end());
        f.atoms_.erase(std::unique(f.atoms_.begin(), f.atoms_.end()), f.atoms_.end());
        f.isTop_ = f.nodes_.size() == 1 && f.nodes_[0].atom == m.top();
        return f;
    }

    bool evaluate(const FtState& s) const { return eval(root_, s); }

    /// Nodes referenced by the formula, ascending.
    const std::vector<NodeId>& atoms() const { return atoms_; }

    /// True when the formula is the plain "top failed" event.
    bool isTopFailed() const { return isTop_; }

    std::string toString(const DftModel& m) const { return render(root_, m); }

private:
    enum class Op { Atom, Not, And, Or };
    struct Node {
        Op op;
        NodeId atom;
        int lhs;
        int rhs;
    };

    std::vector<Node> nodes_;
    std::vector<NodeId> atoms_;
    int root_ = -1;
    bool isTop_ = false;

    bool eval(int i, const FtState& s) const {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        switch (n.op) {
            case Op::Atom: return s.status[n.atom] == Status::Failed;
            case Op::Not: return !eval(n.lhs, s);
            case Op::And: return eval(n.lhs, s) && eval(n.rhs, s);
            case Op::Or: return eval(n.lhs, s) || eval(n.rhs, s);
        }
        return false;
    }

    std::string render(int i, const DftModel& m) const {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        switch (n.op) {
            case Op::Atom: return "\"" + m.node(n.atom).name + "\"";
            case Op::Not: return "!" + render(n.lhs, m);
            case Op::And: return "(" + render(n.lhs, m) + " & " + render(n.rhs, m) + ")";
            case Op::Or: return "(" + render(n.lhs, m) + " | " + render(n.rhs, m) + ")";
        }
        return {};
    }

    struct Parser {
        std::string_view text;
        const DftModel& m;
        EventFormula& f;
        std::size_t pos = 0;

        void skipSpace() {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
                ++pos;
            }
        }

        int add(Node n) {
            f.nodes_.push_back(n);
            return static_cast<int>(f.nodes_.size() - 1);
        }

        int expr() {
            int lhs = term();
            for (skipSpace(); pos < text.size() && text[pos] == '|'; skipSpace()) {
                ++pos;
                lhs = add({Op::Or, kNoNode, lhs, term()});
            }
            return lhs;
        }

        int term() {
            int lhs = factor();
            for (skipSpace(); pos < text.size() && text[pos] == '&'; skipSpace()) {
                ++pos;
                lhs = add({Op::And, kNoNode, lhs, factor()});
            }
            return lhs;
        }

        int factor() {
            skipSpace();
            if (pos >= text.size()) {
                throw Error("event formula: unexpected end of input");
            }
            if (text[pos] == '!') {
                ++pos;
                return add({Op::Not, kNoNode, factor(), -1});
            }
            if (text[pos] == '(') {
                ++pos;
                int inner = expr();
                skipSpace();
                if (pos >= text.size() || text[pos] != ')') {
                    throw Error("event formula: missing ')'");
                }
                ++pos;
                return inner;
            }
            std::string name;
            if (text[pos] == '"') {
                auto end = text.find('"', pos + 1);
                if (end == std::string_view::npos) {
                    throw Error("event formula: unterminated name");
                }
                name = std::string(text.substr(pos + 1, end - pos - 1));
                pos = end + 1;
            } else {
                while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                             text[pos] == '_' || text[pos] == '\'' || text[pos] == '.')) {
                    name += text[pos++];
                }
                if (name.empty()) {
                    throw Error("event formula: unexpected '" + std::string(1, text[pos]) + "'");
                }
            }
            NodeId id = m.find(name);
            if (id == kNoNode) {
                throw Error("event formula: unknown node '" + name + "'");
            }
            f.atoms_.push_back(id);
            return add({Op::Atom, id, -1, -1});
        }
    };
};

} // namespace slimdft
