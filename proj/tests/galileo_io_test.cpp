#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace slimdft;

namespace {

ValidationError validationError(const std::string& text) {
    try {
        validate(parseDft(text));
    } catch (const ValidationError& e) {
        return e;
    }
    throw std::runtime_error("expected a validation error");
}

ParseError parseError(const std::string& text) {
    try {
        parseDft(text);
    } catch (const ParseError& e) {
        return e;
    }
    throw std::runtime_error("expected a parse error");
}

const char* kBike = R"(toplevel "SF"; "SF" or "FW" "BW"; "FW" spare "W1" "WS"; "BW" spare "W2" "WS";
"W1" lambda=1; "W2" lambda=1; "WS" lambda=1 dorm=0.5;)";

} // namespace

TEST(Parse, SimpleAnd) {
    auto d = parseDft(R"(toplevel "T"; "T" and "A" "B"; "A" lambda=1.0; "B" lambda=2.0;)");
    EXPECT_EQ(d.topName, "T");
    ASSERT_EQ(d.nodes.size(), 3u);
    EXPECT_EQ(d.nodes[0].kind, NodeKind::And);
    EXPECT_EQ(d.nodes[0].children, (std::vector<std::string>{"A", "B"}));
    EXPECT_EQ(d.nodes[2].rate, Polynomial(2));
}

TEST(Parse, ParametricRates) {
    auto d = parseDft(R"(param x; toplevel "T"; "T" or "A" "B"; "A" lambda=x; "B" lambda=2*x+1;)");
    ASSERT_EQ(d.parameters, (ParameterList{"x"}));
    Polynomial x = Polynomial::variable(0);
    EXPECT_EQ(d.find("A")->rate, x);
    EXPECT_EQ(d.find("B")->rate, x.scaled(2) + Polynomial(1));
}

TEST(Parse, UnknownReferenceNamesNode) {
    auto e = parseError(R"(toplevel "T"; "T" and "A" "Z"; "A" lambda=1;)");
    EXPECT_EQ(e.kind(), ParseError::Kind::UnknownReference);
    EXPECT_NE(std::string(e.what()).find("Z"), std::string::npos);
}

TEST(Parse, DuplicateName) {
    auto e = parseError(R"(toplevel "A"; "A" lambda=1; "A" lambda=2;)");
    EXPECT_EQ(e.kind(), ParseError::Kind::DuplicateName);
}

TEST(Parse, MalformedNumber) {
    auto e = parseError(R"(toplevel "A"; "A" lambda=1.2.3;)");
    EXPECT_EQ(e.kind(), ParseError::Kind::MalformedNumber);
}

TEST(Parse, SyntaxErrorCarriesLineAndColumn) {
    auto e = parseError("toplevel \"A\";\n\"A\" lambda=1\n\"B\" lambda=1;");
    EXPECT_EQ(e.kind(), ParseError::Kind::Syntax);
    EXPECT_EQ(e.location().line, 3u);
    EXPECT_EQ(e.location().column, 1u);
}

TEST(Parse, CommentsAndRationals) {
    auto d = parseDft("// header\ntoplevel \"A\"; // top\n\"A\" lambda=1/3 dorm=(1/2);\n");
    EXPECT_EQ(d.nodes[0].rate, Polynomial(Rational(1, 3)));
    EXPECT_EQ(d.nodes[0].dormancy, Polynomial(Rational(1, 2)));
}

TEST(Parse, FdepIsPdepWithProbabilityOne) {
    auto d = parseDft(R"(toplevel "T"; "T" and "A" "B"; "D" fdep "A" "B"; "A" lambda=1; "B" lambda=1;)");
    EXPECT_EQ(d.find("D")->kind, NodeKind::Dependency);
    EXPECT_EQ(d.find("D")->probability, Polynomial(1));
}

TEST(Parse, IntegerPowers) {
    auto d = parseDft(R"(param x; toplevel "A"; "A" lambda=2*x^3 - (x+1)^2;)");
    Polynomial x = Polynomial::variable(0);
    EXPECT_EQ(d.nodes[0].rate, x.pow(3).scaled(2) - (x + Polynomial(1)).pow(2));
    EXPECT_EQ(parseError(R"(param x; toplevel "A"; "A" lambda=x^x;)").kind(), ParseError::Kind::Syntax);
    EXPECT_EQ(parseError(R"(param x; toplevel "A"; "A" lambda=x^1.5;)").kind(), ParseError::Kind::Syntax);
}

TEST(Parse, DefaultDormancyIsHot) {
    auto d = parseDft(R"(toplevel "A"; "A" lambda=2;)");
    EXPECT_EQ(d.nodes[0].dormancy, Polynomial(1));
}

TEST(Validate, VotingArity) {
    auto e = validationError(R"(toplevel "T"; "T" 2of3 "A" "B"; "A" lambda=1; "B" lambda=1;)");
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].restriction, Restriction::VotingArity);
}

TEST(Validate, RestrictionWithParent) {
    auto e = validationError(
        R"(toplevel "T"; "T" and "D" "A"; "D" fdep "A" "B"; "A" lambda=1; "B" lambda=1;)");
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].restriction, Restriction::RestrictionHasParent);
    EXPECT_NE(std::find(e.issues()[0].nodes.begin(), e.issues()[0].nodes.end(), "D"), e.issues()[0].nodes.end());
}

TEST(Validate, TopMustBeGateOrEvent) {
    auto e = validationError(R"(toplevel "D"; "D" fdep "A" "B"; "A" lambda=1; "B" lambda=1;)");
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].restriction, Restriction::TopKind);
}

TEST(Validate, DependentMustBeBasic) {
    auto e = validationError(
        R"(toplevel "T"; "T" or "G" "A"; "G" and "B" "C"; "D" fdep "A" "G"; "A" lambda=1; "B" lambda=1; "C" lambda=1;)");
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].restriction, Restriction::DependentNotBasic);
}

TEST(Validate, OverlappingSpareModules) {
    auto e = validationError(R"(toplevel "T"; "T" and "S1" "S2"; "S1" spare "G" "X"; "S2" spare "H" "Y";
        "G" and "A" "B"; "H" and "B" "C"; "A" lambda=1; "B" lambda=1; "C" lambda=1; "X" lambda=1; "Y" lambda=1;)");
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].restriction, Restriction::SpareModulesOverlap);
}

TEST(Validate, SharedPrimary) {
    auto e = validationError(R"(toplevel "T"; "T" and "S1" "S2"; "S1" spare "P" "X"; "S2" spare "P" "Y";
        "P" lambda=1; "X" lambda=1; "Y" lambda=1;)");
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].restriction, Restriction::PrimaryShared);
}

TEST(Validate, CycleReportsPath) {
    auto e = validationError(R"(toplevel "T"; "T" and "G" "A"; "G" or "T" "A"; "A" lambda=1;)");
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].restriction, Restriction::Cycle);
    EXPECT_GE(e.issues()[0].nodes.size(), 2u);
}

TEST(Validate, OneErrorPerViolation) {
    auto e = validationError(R"(toplevel "T"; "T" and "V" "W" "D"; "V" 3of3 "A" "B"; "W" 2of2 "A";
        "D" fdep "A" "B"; "A" lambda=1; "B" lambda=1;)");
    std::map<Restriction, int> count;
    for (const auto& i : e.issues()) {
        ++count[i.restriction];
    }
    EXPECT_EQ(count[Restriction::VotingArity], 2);
    EXPECT_EQ(count[Restriction::RestrictionHasParent], 1);
    EXPECT_EQ(e.issues().size(), 3u);
}

TEST(Validate, BikeIsValid) { EXPECT_NO_THROW(validate(parseDft(kBike))); }

TEST(Validate, MultiDependentSplitKeepsOrder) {
    auto v = validate(parseDft(
        R"(toplevel "T"; "T" and "A" "B" "C"; "D" pdep prob=0.5 "X" "C" "A" "B"; "A" lambda=1; "B" lambda=1; "C" lambda=1; "X" lambda=1;)"));
    std::vector<std::string> dependents;
    for (const auto& n : v.description().nodes) {
        if (n.kind == NodeKind::Dependency) {
            ASSERT_EQ(n.children.size(), 2u);
            EXPECT_EQ(n.children[0], "X");
            EXPECT_EQ(n.probability, Polynomial(Rational(1, 2)));
            dependents.push_back(n.children[1]);
        }
    }
    EXPECT_EQ(dependents, (std::vector<std::string>{"C", "A", "B"}));
}

TEST(Validate, AllSampleModelsValidate) {
    for (const auto& e : std::filesystem::directory_iterator(SLIMDFT_MODELS_DIR)) {
        SCOPED_TRACE(e.path().string());
        EXPECT_NO_THROW(validate(parseDft(testing_support::readText(e.path()))));
    }
}

TEST(RoundTrip, ParsePrintParseIsStable) {
    std::vector<std::string> texts;
    for (const auto& c : testing_support::corpus()) {
        texts.push_back(c.text);
    }
    texts.push_back(testing_support::readText(testing_support::modelPath("bike_param.dft")));
    texts.push_back(R"(param p; param q; toplevel "T"; "T" 2of3 "A" "B" "C"; "D" pdep prob=1/2*p "A" "B";
        "A" lambda=p*q+3/7; "B" lambda=(p+1)*(q-1)+2; "C" lambda=1e-3 dorm=0;)");
    texts.push_back(R"(param x; toplevel "A"; "A" lambda=x^2 + 3*(x+1)^3;)");
    for (const auto& text : texts) {
        auto d1 = parseDft(text);
        auto printed = printDft(d1);
        auto d2 = parseDft(printed);
        EXPECT_TRUE(d1 == d2) << printed;
        EXPECT_EQ(printDft(d2), printed);
    }
}
