#pragma once

#include "slimdft/error.hpp"
#include "slimdft/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace slimdft {

enum class NodeKind { BasicEvent, And, Or, Voting, PriorityAnd, PriorityOr, Spare, Sequence, Dependency };

inline bool isGate(NodeKind k) {
    return k != NodeKind::BasicEvent && k != NodeKind::Sequence && k != NodeKind::Dependency;
}

inline bool isStaticGate(NodeKind k) { return k == NodeKind::And || k == NodeKind::Or || k == NodeKind::Voting; }

inline bool isOrderSensitive(NodeKind k) {
    return k == NodeKind::PriorityAnd || k == NodeKind::PriorityOr || k == NodeKind::Spare ||
           k == NodeKind::Sequence || k == NodeKind::Dependency;
}

inline const char* kindName(NodeKind k) {
    switch (k) {
        case NodeKind::BasicEvent: return "be";
        case NodeKind::And: return "and";
        case NodeKind::Or: return "or";
        case NodeKind::Voting: return "vot";
        case NodeKind::PriorityAnd: return "pand";
        case NodeKind::PriorityOr: return "por";
        case NodeKind::Spare: return "spare";
        case NodeKind::Sequence: return "seq";
        case NodeKind::Dependency: return "pdep";
    }
    return "?";
}

struct SourceLocation {
    std::size_t line = 0;
    std::size_t column = 0;
};

/// One declaration of the Galileo file.
///
/// For spares the first child is the primary; for dependencies the first
/// child is the trigger and the rest are dependent events.
struct NodeDecl {
    std::string name;
    NodeKind kind = NodeKind::BasicEvent;
    unsigned threshold = 0;      // k of a voting gate
    unsigned declaredArity = 0;  // n of a voting gate
    std::vector<std::string> children;
    Polynomial rate;             // active failure rate of a basic event
    Polynomial dormancy{1};      // passive rate = dormancy * rate
    Polynomial probability{1};   // forwarding probability of a dependency
    SourceLocation location;
};

struct DftDescription {
    std::string topName;
    std::vector<NodeDecl> nodes;
    ParameterList parameters;

    const NodeDecl* find(std::string_view name) const {
        for (const auto& n : nodes) {
            if (n.name == name) {
                return &n;
            }
        }
        return nullptr;
    }

    bool operator==(const DftDescription& o) const {
        if (topName != o.topName || parameters != o.parameters || nodes.size() != o.nodes.size()) {
            return false;
        }
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& a = nodes[i];
            const auto& b = o.nodes[i];
            if (a.name != b.name || a.kind != b.kind || a.threshold != b.threshold ||
                a.declaredArity != b.declaredArity || a.children != b.children || !(a.rate == b.rate) ||
                !(a.dormancy == b.dormancy) || !(a.probability == b.probability)) {
                return false;
            }
        }
        return true;
    }
};

class ParseError : public Error {
public:
    enum class Kind { Syntax, DuplicateName, UnknownReference, MalformedNumber };

    ParseError(Kind kind, SourceLocation loc, const std::string& message)
        : Error("line " + std::to_string(loc.line) + ", column " + std::to_string(loc.column) + ": " + message),
          kind_(kind),
          location_(loc) {}

    Kind kind() const { return kind_; }
    SourceLocation location() const { return location_; }

private:
    Kind kind_;
    SourceLocation location_;
};

namespace galileo_detail {

enum class TokenType { Name, Identifier, Number, Symbol, End };

struct Token {
    TokenType type;
    std::string text;
    SourceLocation loc;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> tokenize() {
        std::vector<Token> tokens;
        while (true) {
            skipSpaceAndComments();
            SourceLocation loc{line_, column_};
            if (pos_ >= text_.size()) {
                tokens.push_back({TokenType::End, "", loc});
                return tokens;
            }
            char c = text_[pos_];
            if (c == '"') {
                advance();
                std::string name;
                while (pos_ < text_.size() && text_[pos_] != '"' && text_[pos_] != '\n') {
                    name.push_back(text_[pos_]);
                    advance();
                }
                if (pos_ >= text_.size() || text_[pos_] != '"') {
                    throw ParseError(ParseError::Kind::Syntax, loc, "unterminated quoted name");
                }
                advance();
                tokens.push_back({TokenType::Name, name, loc});
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                std::string num;
                while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                               text_[pos_] == '.' || text_[pos_] == '_' ||
                                               ((text_[pos_] == '-' || text_[pos_] == '+') && !num.empty() &&
                                                (num.back() == 'e' || num.back() == 'E') && isNumericPrefix(num)))) {
                    num.push_back(text_[pos_]);
                    advance();
                }
                tokens.push_back({TokenType::Number, num, loc});
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::string id;
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                    id.push_back(text_[pos_]);
                    advance();
                }
                tokens.push_back({TokenType::Identifier, id, loc});
            } else if (std::string_view("=;+-*/()^").find(c) != std::string_view::npos) {
                advance();
                tokens.push_back({TokenType::Symbol, std::string(1, c), loc});
            } else {
                throw ParseError(ParseError::Kind::Syntax, loc, std::string("unexpected character '") + c + "'");
            }
        }
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;

    static bool isNumericPrefix(const std::string& s) {
        return std::all_of(s.begin(), s.end() - 1,
                           [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)) || ch == '.'; });
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skipSpaceAndComments() {
        while (pos_ < text_.size()) {
            if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                advance();
            } else if (text_.substr(pos_, 2) == "//") {
                while (pos_ < text_.size() && text_[pos_] != '\n') {
                    advance();
                }
            } else {
                return;
            }
        }
    }
};

/// Recursive-descent parser for polynomial expressions over declared
/// parameters: `+ - *`, parentheses, decimal or `a/b` coefficients.
class ExpressionParser {
public:
    ExpressionParser(const std::vector<Token>& tokens, std::size_t& pos, const ParameterList& params)
        : tokens_(tokens), pos_(pos), params_(params) {}

    Polynomial parse() { return sum(); }

private:
    const std::vector<Token>& tokens_;
    std::size_t& pos_;
    const ParameterList& params_;

    const Token& peek() const { return tokens_[pos_]; }
    bool isSymbol(const char* s) const { return peek().type == TokenType::Symbol && peek().text == s; }

    Polynomial sum() {
        Polynomial acc = product();
        while (isSymbol("+") || isSymbol("-")) {
            bool minus = peek().text == "-";
            ++pos_;
            Polynomial rhs = product();
            acc = minus ? acc - rhs : acc + rhs;
        }
        return acc;
    }

    Polynomial product() {
        Polynomial acc = unary();
        while (isSymbol("*") || isSymbol("/")) {
            bool divide = peek().text == "/";
            ++pos_;
            if (divide) {
                const Token& t = peek();
                if (t.type != TokenType::Number) {
                    throw ParseError(ParseError::Kind::Syntax, t.loc, "division is only allowed by a numeric literal");
                }
                Rational d = number();
                if (d == 0) {
                    throw ParseError(ParseError::Kind::MalformedNumber, t.loc, "division by zero");
                }
                acc = acc.scaled(1 / d);
            } else {
                acc = acc * unary();
            }
        }
        return acc;
    }

    Polynomial unary() {
        if (isSymbol("-")) {
            ++pos_;
            return -unary();
        }
        if (isSymbol("+")) {
            ++pos_;
            return unary();
        }
        return power();
    }

    Polynomial power() {
        Polynomial base = primary();
        if (!isSymbol("^")) {
            return base;
        }
        ++pos_;
        const Token& t = peek();
        auto e = t.type == TokenType::Number ? parseRational(t.text) : std::nullopt;
        if (!e || e->get_den() != 1 || *e < 0 || *e > 1000) {
            throw ParseError(ParseError::Kind::Syntax, t.loc, "exponent must be a small non-negative integer");
        }
        ++pos_;
        return base.pow(static_cast<unsigned>(e->get_num().get_ui()));
    }

    Rational number() {
        const Token& t = peek();
        auto value = parseRational(t.text);
        if (!value) {
            throw ParseError(ParseError::Kind::MalformedNumber, t.loc, "malformed number '" + t.text + "'");
        }
        ++pos_;
        return *value;
    }

    Polynomial primary() {
        const Token& t = peek();
        if (t.type == TokenType::Number) {
            return Polynomial(number());
        }
        if (t.type == TokenType::Identifier) {
            auto it = std::find(params_.begin(), params_.end(), t.text);
            if (it == params_.end()) {
                throw ParseError(ParseError::Kind::UnknownReference, t.loc, "unknown parameter '" + t.text + "'");
            }
            ++pos_;
            return Polynomial::variable(static_cast<std::size_t>(it - params_.begin()));
        }
        if (isSymbol("(")) {
            ++pos_;
            Polynomial inner = sum();
            if (!isSymbol(")")) {
                throw ParseError(ParseError::Kind::Syntax, peek().loc, "expected ')'");
            }
            ++pos_;
            return inner;
        }
        throw ParseError(ParseError::Kind::Syntax, t.loc,
                         t.type == TokenType::End ? "unexpected end of input in expression"
                                                  : "unexpected '" + t.text + "' in expression");
    }
};

inline std::optional<std::pair<unsigned, unsigned>> parseVotingKind(const std::string& id) {
    auto of = id.find("of");
    if (of == std::string::npos || of == 0 || of + 2 >= id.size()) {
        return std::nullopt;
    }
    auto allDigits = [](std::string_view s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    };
    std::string k = id.substr(0, of);
    std::string n = id.substr(of + 2);
    if (!allDigits(k) || !allDigits(n) || k.size() > 6 || n.size() > 6) {
        return std::nullopt;
    }
    return std::make_pair(static_cast<unsigned>(std::stoul(k)), static_cast<unsigned>(std::stoul(n)));
}

} // namespace galileo_detail

/// Parses a polynomial expression over `params`, e.g. "2*x + 1/3".
inline Polynomial parsePolynomial(std::string_view text, const ParameterList& params) {
    auto tokens = galileo_detail::Lexer(text).tokenize();
    std::size_t pos = 0;
    Polynomial p = galileo_detail::ExpressionParser(tokens, pos, params).parse();
    if (tokens[pos].type != galileo_detail::TokenType::End) {
        throw ParseError(ParseError::Kind::Syntax, tokens[pos].loc, "trailing input '" + tokens[pos].text + "'");
    }
    return p;
}

/// Parses the Galileo dialect.
///
///     file := decl* ; decl := param IDENT ; | toplevel NAME ; | gate | be
///     gate := NAME KIND NAME+ ;   KIND in and, or, <k>of<n>, pand, por,
///                                 spare, seq, fdep, pdep prob=EXPR
///     be   := NAME lambda=EXPR [dorm=EXPR] ;
inline DftDescription parseDft(std::string_view text) {
    using namespace galileo_detail;
    auto tokens = Lexer(text).tokenize();
    DftDescription d;
    std::size_t pos = 0;
    std::map<std::string, SourceLocation> declared;
    std::optional<SourceLocation> topLoc;

    auto expectSymbol = [&](const char* s) {
        if (tokens[pos].type != TokenType::Symbol || tokens[pos].text != s) {
            throw ParseError(ParseError::Kind::Syntax, tokens[pos].loc,
                             std::string("expected '") + s + "' but found '" + tokens[pos].text + "'");
        }
        ++pos;
    };
    auto parseExpr = [&]() {
        return ExpressionParser(tokens, pos, d.parameters).parse();
    };

    while (tokens[pos].type != TokenType::End) {
        const Token& head = tokens[pos];
        if (head.type == TokenType::Identifier && head.text == "param") {
            ++pos;
            if (tokens[pos].type != TokenType::Identifier) {
                throw ParseError(ParseError::Kind::Syntax, tokens[pos].loc, "expected parameter name");
            }
            if (std::find(d.parameters.begin(), d.parameters.end(), tokens[pos].text) != d.parameters.end()) {
                throw ParseError(ParseError::Kind::DuplicateName, tokens[pos].loc,
                                 "duplicate parameter '" + tokens[pos].text + "'");
            }
            d.parameters.push_back(tokens[pos].text);
            ++pos;
            expectSymbol(";");
            continue;
        }
        if (head.type == TokenType::Identifier && head.text == "toplevel") {
            ++pos;
            if (tokens[pos].type != TokenType::Name) {
                throw ParseError(ParseError::Kind::Syntax, tokens[pos].loc, "expected quoted top-level name");
            }
            if (topLoc) {
                throw ParseError(ParseError::Kind::DuplicateName, tokens[pos].loc, "toplevel declared twice");
            }
            d.topName = tokens[pos].text;
            topLoc = tokens[pos].loc;
            ++pos;
            expectSymbol(";");
            continue;
        }
        if (head.type != TokenType::Name) {
            throw ParseError(ParseError::Kind::Syntax, head.loc, "expected declaration, found '" + head.text + "'");
        }
        NodeDecl node;
        node.name = head.text;
        node.location = head.loc;
        if (declared.count(node.name)) {
            throw ParseError(ParseError::Kind::DuplicateName, head.loc, "duplicate name '" + node.name + "'");
        }
        ++pos;
        const Token& kindTok = tokens[pos];
        if (kindTok.type == TokenType::Identifier && kindTok.text == "lambda") {
            ++pos;
            expectSymbol("=");
            node.kind = NodeKind::BasicEvent;
            node.rate = parseExpr();
            if (tokens[pos].type == TokenType::Identifier && tokens[pos].text == "dorm") {
                ++pos;
                expectSymbol("=");
                node.dormancy = parseExpr();
            }
            expectSymbol(";");
        } else {
            bool isGateKeyword = true;
            if (kindTok.type == TokenType::Identifier) {
                const std::string& k = kindTok.text;
                if (k == "and") {
                    node.kind = NodeKind::And;
                } else if (k == "or") {
                    node.kind = NodeKind::Or;
                } else if (k == "pand") {
                    node.kind = NodeKind::PriorityAnd;
                } else if (k == "por") {
                    node.kind = NodeKind::PriorityOr;
                } else if (k == "spare" || k == "wsp" || k == "csp" || k == "hsp") {
                    node.kind = NodeKind::Spare;
                } else if (k == "seq") {
                    node.kind = NodeKind::Sequence;
                } else if (k == "fdep") {
                    node.kind = NodeKind::Dependency;
                    node.probability = Polynomial(1);
                } else if (k == "pdep") {
                    node.kind = NodeKind::Dependency;
                } else {
                    isGateKeyword = false;
                }
            } else if (kindTok.type == TokenType::Number) {
                // "2of3" lexes as a number token starting with a digit.
                if (auto vot = parseVotingKind(kindTok.text)) {
                    node.kind = NodeKind::Voting;
                    node.threshold = vot->first;
                    node.declaredArity = vot->second;
                } else {
                    isGateKeyword = false;
                }
            } else {
                isGateKeyword = false;
            }
            if (!isGateKeyword) {
                throw ParseError(ParseError::Kind::Syntax, kindTok.loc, "unknown node kind '" + kindTok.text + "'");
            }
            ++pos;
            if (node.kind == NodeKind::Dependency && kindTok.text == "pdep") {
                if (tokens[pos].type != TokenType::Identifier || tokens[pos].text != "prob") {
                    throw ParseError(ParseError::Kind::Syntax, tokens[pos].loc, "expected 'prob=' after pdep");
                }
                ++pos;
                expectSymbol("=");
                node.probability = parseExpr();
            }
            while (tokens[pos].type == TokenType::Name) {
                node.children.push_back(tokens[pos].text);
                ++pos;
            }
            if (node.children.empty()) {
                throw ParseError(ParseError::Kind::Syntax, tokens[pos].loc, "gate '" + node.name + "' has no children");
            }
            expectSymbol(";");
        }
        declared.emplace(node.name, node.location);
        d.nodes.push_back(std::move(node));
    }

    if (!topLoc) {
        throw ParseError(ParseError::Kind::Syntax, tokens[pos].loc, "missing toplevel declaration");
    }
    if (!declared.count(d.topName)) {
        throw ParseError(ParseError::Kind::UnknownReference, *topLoc,
                         "unknown reference '" + d.topName + "' in toplevel");
    }
    for (const auto& n : d.nodes) {
        for (const auto& c : n.children) {
            if (!declared.count(c)) {
                throw ParseError(ParseError::Kind::UnknownReference, n.location,
                                 "unknown reference '" + c + "' in '" + n.name + "'");
            }
        }
    }
    return d;
}

/// Canonical printer; parse(print(d)) == d.
inline std::string printDft(const DftDescription& d) {
    std::ostringstream os;
    for (const auto& p : d.parameters) {
        os << "param " << p << ";\n";
    }
    os << "toplevel \"" << d.topName << "\";\n";
    for (const auto& n : d.nodes) {
        os << '"' << n.name << "\" ";
        switch (n.kind) {
            case NodeKind::BasicEvent:
                os << "lambda=" << n.rate.toString(d.parameters);
                if (!n.dormancy.isOne()) {
                    os << " dorm=" << n.dormancy.toString(d.parameters);
                }
                os << ";\n";
                continue;
            case NodeKind::Voting: os << n.threshold << "of" << n.declaredArity; break;
            case NodeKind::Dependency:
                if (n.probability.isOne()) {
                    os << "fdep";
                } else {
                    os << "pdep prob=" << n.probability.toString(d.parameters);
                }
                break;
            default: os << kindName(n.kind); break;
        }
        for (const auto& c : n.children) {
            os << " \"" << c << '"';
        }
        os << ";\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Validation

enum class Restriction {
    VotingArity,            // (a)
    TopKind,                // (b)
    RestrictionHasParent,   // (c)
    DependentNotBasic,      // (d)
    SpareModulesOverlap,    // (e)
    PrimaryShared,          // (f)
    Cycle,
    ValueRange,
};

inline const char* restrictionCode(Restriction r) {
    switch (r) {
        case Restriction::VotingArity: return "a";
        case Restriction::TopKind: return "b";
        case Restriction::RestrictionHasParent: return "c";
        case Restriction::DependentNotBasic: return "d";
        case Restriction::SpareModulesOverlap: return "e";
        case Restriction::PrimaryShared: return "f";
        case Restriction::Cycle: return "cycle";
        case Restriction::ValueRange: return "range";
    }
    return "?";
}

struct ValidationIssue {
    Restriction restriction;
    std::vector<std::string> nodes;
    std::string message;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<ValidationIssue> issues)
        : Error(summarise(issues)), issues_(std::move(issues)) {}

    const std::vector<ValidationIssue>& issues() const { return issues_; }

private:
    std::vector<ValidationIssue> issues_;

    static std::string summarise(const std::vector<ValidationIssue>& issues) {
        std::string s = "invalid DFT:";
        for (const auto& i : issues) {
            s += " [" + std::string(restrictionCode(i.restriction)) + "] " + i.message + ";";
        }
        return s;
    }
};

/// A description that passed validation, with multi-dependent dependencies
/// split into chains of single-dependent ones.
class ValidatedDft {
public:
    const DftDescription& description() const { return description_; }

private:
    explicit ValidatedDft(DftDescription d) : description_(std::move(d)) {}
    DftDescription description_;

    friend ValidatedDft validate(const DftDescription& d);
};

namespace galileo_detail {

/// Nodes of the spare module represented by `rep`: everything reachable via
/// gate children without descending below a spare.
inline std::set<std::size_t> spareModule(const std::vector<std::vector<std::size_t>>& children,
                                         const std::vector<NodeKind>& kinds, std::size_t rep) {
    std::set<std::size_t> module{rep};
    std::vector<std::size_t> stack{rep};
    while (!stack.empty()) {
        auto n = stack.back();
        stack.pop_back();
        if (kinds[n] == NodeKind::Spare || !isGate(kinds[n])) {
            continue;
        }
        for (auto c : children[n]) {
            if (module.insert(c).second) {
                stack.push_back(c);
            }
        }
    }
    return module;
}

} // namespace galileo_detail

/// Returns every violated restriction; empty when the description is valid.
inline std::vector<ValidationIssue> checkRestrictions(const DftDescription& d) {
    std::vector<ValidationIssue> issues;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < d.nodes.size(); ++i) {
        index[d.nodes[i].name] = i;
    }
    const std::size_t n = d.nodes.size();
    std::vector<std::vector<std::size_t>> children(n);
    std::vector<NodeKind> kinds(n);
    for (std::size_t i = 0; i < n; ++i) {
        kinds[i] = d.nodes[i].kind;
        for (const auto& c : d.nodes[i].children) {
            children[i].push_back(index.at(c));
        }
    }

    // Cycles over all edges.
    {
        std::vector<int> color(n, 0);
        std::vector<std::size_t> path;
        std::set<std::vector<std::string>> reported;
        std::function<void(std::size_t)> dfs = [&](std::size_t v) {
            color[v] = 1;
            path.push_back(v);
            for (auto c : children[v]) {
                if (color[c] == 1) {
                    std::vector<std::string> cycle;
                    auto start = std::find(path.begin(), path.end(), c);
                    for (auto it = start; it != path.end(); ++it) {
                        cycle.push_back(d.nodes[*it].name);
                    }
                    cycle.push_back(d.nodes[c].name);
                    if (reported.insert(cycle).second) {
                        std::string msg = "cycle";
                        for (std::size_t k = 0; k < cycle.size(); ++k) {
                            msg += (k == 0 ? " " : " -> ") + cycle[k];
                        }
                        issues.push_back({Restriction::Cycle, cycle, msg});
                    }
                } else if (color[c] == 0) {
                    dfs(c);
                }
            }
            path.pop_back();
            color[v] = 2;
        };
        for (std::size_t v = 0; v < n; ++v) {
            if (color[v] == 0) {
                dfs(v);
            }
        }
        if (!issues.empty()) {
            return issues;
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        const auto& node = d.nodes[i];
        // (a)
        if (node.kind == NodeKind::Voting) {
            if (node.threshold == 0 || node.children.size() < node.threshold ||
                node.children.size() != node.declaredArity) {
                issues.push_back({Restriction::VotingArity, {node.name},
                                  "voting gate '" + node.name + "' is " + std::to_string(node.threshold) + "of" +
                                      std::to_string(node.declaredArity) + " but has " +
                                      std::to_string(node.children.size()) + " children"});
            }
        }
        if (node.kind == NodeKind::Dependency && node.children.size() < 2) {
            issues.push_back({Restriction::DependentNotBasic, {node.name},
                              "dependency '" + node.name + "' needs a trigger and at least one dependent event"});
        }
        // (d)
        if (node.kind == NodeKind::Dependency) {
            for (std::size_t c = 1; c < children[i].size(); ++c) {
                auto dep = children[i][c];
                if (kinds[dep] != NodeKind::BasicEvent) {
                    issues.push_back({Restriction::DependentNotBasic, {node.name, d.nodes[dep].name},
                                      "dependent event '" + d.nodes[dep].name + "' of '" + node.name +
                                          "' is not a basic event"});
                }
            }
        }
        // Value ranges of constant annotations.
        if (node.kind == NodeKind::BasicEvent) {
            if (node.rate.isConstant() && node.rate.constant() < 0) {
                issues.push_back({Restriction::ValueRange, {node.name}, "negative failure rate of '" + node.name + "'"});
            }
            if (node.dormancy.isConstant() && (node.dormancy.constant() < 0 || node.dormancy.constant() > 1)) {
                issues.push_back({Restriction::ValueRange, {node.name},
                                  "dormancy factor of '" + node.name + "' outside [0,1]"});
            }
        }
        if (node.kind == NodeKind::Dependency && node.probability.isConstant() &&
            (node.probability.constant() < 0 || node.probability.constant() > 1)) {
            issues.push_back({Restriction::ValueRange, {node.name},
                              "probability of '" + node.name + "' outside [0,1]"});
        }
    }

    // (b)
    if (auto top = index.find(d.topName); top != index.end()) {
        auto k = kinds[top->second];
        if (k == NodeKind::Sequence || k == NodeKind::Dependency) {
            issues.push_back({Restriction::TopKind, {d.topName}, "top event '" + d.topName + "' is a restriction or dependency"});
        }
    }

    // (c)
    for (std::size_t i = 0; i < n; ++i) {
        if (kinds[i] != NodeKind::Sequence && kinds[i] != NodeKind::Dependency) {
            continue;
        }
        std::vector<std::string> involved{d.nodes[i].name};
        for (std::size_t p = 0; p < n; ++p) {
            if (std::find(children[p].begin(), children[p].end(), i) != children[p].end()) {
                involved.push_back(d.nodes[p].name);
            }
        }
        if (involved.size() > 1) {
            std::string msg = "'" + d.nodes[i].name + "' has parents:";
            for (std::size_t k = 1; k < involved.size(); ++k) {
                msg += " " + involved[k];
            }
            issues.push_back({Restriction::RestrictionHasParent, involved, msg});
        }
    }

    // (e) and (f)
    std::vector<std::size_t> representatives;
    for (std::size_t i = 0; i < n; ++i) {
        if (kinds[i] == NodeKind::Spare) {
            for (auto c : children[i]) {
                if (std::find(representatives.begin(), representatives.end(), c) == representatives.end()) {
                    representatives.push_back(c);
                }
            }
        }
    }
    std::sort(representatives.begin(), representatives.end());
    std::vector<std::set<std::size_t>> modules;
    for (auto r : representatives) {
        modules.push_back(galileo_detail::spareModule(children, kinds, r));
    }
    for (std::size_t a = 0; a < modules.size(); ++a) {
        for (std::size_t b = a + 1; b < modules.size(); ++b) {
            std::vector<std::string> shared;
            for (auto v : modules[a]) {
                if (modules[b].count(v)) {
                    shared.push_back(d.nodes[v].name);
                }
            }
            if (!shared.empty()) {
                std::vector<std::string> involved{d.nodes[representatives[a]].name, d.nodes[representatives[b]].name};
                std::string msg = "spare modules of '" + involved[0] + "' and '" + involved[1] + "' overlap in";
                for (const auto& s : shared) {
                    msg += " " + s;
                    involved.push_back(s);
                }
                issues.push_back({Restriction::SpareModulesOverlap, involved, msg});
            }
        }
    }
    // Spare modules must not be reachable from the top without passing a spare.
    if (auto top = index.find(d.topName); top != index.end()) {
        std::set<std::size_t> region = galileo_detail::spareModule(children, kinds, top->second);
        if (kinds[top->second] == NodeKind::Spare) {
            region = {top->second};
        }
        for (std::size_t m = 0; m < modules.size(); ++m) {
            std::vector<std::string> shared;
            for (auto v : modules[m]) {
                if (region.count(v)) {
                    shared.push_back(d.nodes[v].name);
                }
            }
            if (!shared.empty()) {
                std::vector<std::string> involved{d.nodes[representatives[m]].name};
                std::string msg = "spare module of '" + involved[0] + "' overlaps the always-active part in";
                for (const auto& s : shared) {
                    msg += " " + s;
                    involved.push_back(s);
                }
                issues.push_back({Restriction::SpareModulesOverlap, involved, msg});
            }
        }
    }
    // One issue per shared primary module.
    for (auto primary : representatives) {
        std::vector<std::string> owners, users;
        for (std::size_t s = 0; s < n; ++s) {
            if (kinds[s] != NodeKind::Spare) {
                continue;
            }
            const auto& ch = children[s];
            if (ch[0] == primary) {
                owners.push_back(d.nodes[s].name);
            } else if (std::find(ch.begin(), ch.end(), primary) != ch.end()) {
                users.push_back(d.nodes[s].name);
            }
        }
        if (owners.empty() || owners.size() + users.size() < 2) {
            continue;
        }
        std::vector<std::string> involved{d.nodes[primary].name};
        std::string msg = "primary '" + involved[0] + "' is shared by";
        for (const auto& o : owners) {
            involved.push_back(o);
            msg += " " + o;
        }
        for (const auto& u : users) {
            involved.push_back(u);
            msg += " " + u;
        }
        issues.push_back({Restriction::PrimaryShared, involved, msg});
    }
    return issues;
}

/// Checks acyclicity and restrictions (a)-(f) and splits dependencies with
/// several dependent events into single-dependent ones named `<name>#<i>`.
inline ValidatedDft validate(const DftDescription& d) {
    auto issues = checkRestrictions(d);
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    DftDescription out;
    out.topName = d.topName;
    out.parameters = d.parameters;
    for (const auto& node : d.nodes) {
        if (node.kind != NodeKind::Dependency || node.children.size() == 2) {
            out.nodes.push_back(node);
            continue;
        }
        for (std::size_t i = 1; i < node.children.size(); ++i) {
            NodeDecl part = node;
            part.name = node.name + "#" + std::to_string(i);
            part.children = {node.children[0], node.children[i]};
            out.nodes.push_back(std::move(part));
        }
    }
    return ValidatedDft(std::move(out));
}

} // namespace slimdft
