#include "oracle/equivalence.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace slimdft;
using testing_support::corpus;

namespace {

struct Small {
    std::string name;
    DftModel model;
};

// models the oracle can enumerate in reasonable time
std::vector<Small> smallModels() {
    std::vector<Small> out;
    for (const auto& c : corpus()) {
        DftModel m = buildModel(c.text);
        if (m.parameters().empty() && m.basicEvents().size() <= 6) {
            out.push_back({c.name, std::move(m)});
        }
    }
    return out;
}

GenerationOptions plain() {
    GenerationOptions o;
    o.symmetryReduction = o.dontCarePropagation = o.partialOrderReduction = false;
    return o;
}

} // namespace

TEST(HistoryOracle, StatesAndTransitionsMatchUnoptimisedGenerator) {
    auto models = smallModels();
    ASSERT_GE(models.size(), 15u);
    for (const auto& [name, m] : models) {
        auto bad = oracle::bijectionMismatches(m);
        EXPECT_TRUE(bad.empty()) << name << "\n" << oracle::join(bad);
    }
}

TEST(HistoryOracle, MeasuresMatchDenseSolution) {
    for (const auto& [name, m] : smallModels()) {
        auto bad = oracle::measureMismatches(m);
        EXPECT_TRUE(bad.empty()) << name << "\n" << oracle::join(bad);
    }
}

TEST(HistoryOracle, NoticesAChangedRate) {
    DftModel pand = testing_support::loadModel("pand.dft");
    DftModel other = buildModel(R"(toplevel "T"; "T" pand "A" "B"; "A" lambda=1; "B" lambda=3;)");
    oracle::Graph g = oracle::HistoryOracle(other).explore();
    EXPECT_GT(std::abs(oracle::DenseMeasures(g, 0).probFail() - testing_support::value(pand, "probfail")), 0.05);
}

TEST(Optimisations, EveryAllowedCombinationAgreesWithPlainGeneration) {
    std::size_t compared = 0;
    for (const auto& c : corpus()) {
        DftModel m = buildModel(c.text);
        if (!m.parameters().empty()) {
            continue;
        }
        auto bad = oracle::optimisationMismatches(m, &compared);
        EXPECT_TRUE(bad.empty()) << c.name << "\n" << oracle::join(bad);
    }
    EXPECT_GT(compared, 1000u);
}

TEST(Optimisations, ReducedSpacesAreNeverLarger) {
    for (const auto& c : corpus()) {
        DftModel m = buildModel(c.text);
        GenerationOptions base = plain();
        base.keepStates = false;
        auto full = generate(m, base).states.size();
        for (int mask = 1; mask < 8; ++mask) {
            GenerationOptions o = base;
            o.symmetryReduction = mask & 1;
            o.dontCarePropagation = mask & 2;
            o.partialOrderReduction = mask & 4;
            EXPECT_LE(generate(m, o).states.size(), full) << c.name << " mask " << mask;
        }
    }
}

TEST(Unfolding, CountsHistories) {
    // every ordering prefix of three events: 1 + 3 + 6 + 6
    auto and3 = generate(buildModel(R"(toplevel "T"; "T" and "A" "B" "C"; "A" lambda=1; "B" lambda=2; "C" lambda=3;)"),
                         plain());
    EXPECT_EQ(and3.states.size(), 8u);
    EXPECT_EQ(unfoldedStates(and3), 16u);
    for (const auto& [name, m] : smallModels()) {
        EXPECT_EQ(unfoldedStates(generate(m, plain())), oracle::HistoryOracle(m).explore().histories) << name;
    }
}
