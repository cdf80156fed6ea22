#include "test_support.hpp"

#include <gtest/gtest.h>

#include <set>
#include <thread>

using namespace slimdft;
using testing_support::loadModel;

namespace {

std::vector<NodeId> ids(const DftModel& m, const std::vector<std::string>& names) {
    std::vector<NodeId> out;
    for (const auto& n : names) {
        out.push_back(m.find(n));
    }
    return out;
}

GenerationOptions only(bool sym, bool dc, bool por) {
    GenerationOptions o;
    o.symmetryReduction = sym;
    o.dontCarePropagation = dc;
    o.partialOrderReduction = por;
    return o;
}

bool degradationAllowed(Status from, Status to) {
    if (from == to) {
        return true;
    }
    switch (from) {
        case Status::Operational: return true;
        case Status::Failed:
        case Status::FailSafe: return to == Status::DontCare;
        case Status::DontCare: return false;
    }
    return false;
}

} // namespace

TEST(InitialState, PandAllOperational) {
    DftModel m = loadModel("pand.dft");
    EXPECT_EQ(describe(m, initialState(m), ids(m, {"A", "B", "T"})), "(OP, OP, OP)");
}

TEST(InitialState, SingleEvent) {
    DftModel m = buildModel(R"(toplevel "A"; "A" lambda=1;)");
    EXPECT_EQ(describe(m, initialState(m), {0}), "(OP)");
}

TEST(InitialState, Bike) {
    DftModel m = loadModel("bike.dft");
    auto order = ids(m, {"W1", "W2", "WS", "FW", "BW", "SF"});
    EXPECT_EQ(describe(m, initialState(m), order), "(OP, OP, OP, W1, W2, OP) / (A, A, P)");
}

TEST(BeFailure, BikeTrace) {
    DftModel m = loadModel("bike.dft");
    FtSemantics sem(m, true, true);
    auto order = ids(m, {"W1", "W2", "WS", "FW", "BW", "SF"});
    auto s1 = sem.applyBeFailure(sem.initialState(), m.find("W1"));
    ASSERT_TRUE(s1);
    EXPECT_EQ(describe(m, *s1, order), "(F, OP, OP, WS, W2, OP) / (A, A, A)");
    auto s2 = sem.applyBeFailure(*s1, m.find("W2"));
    ASSERT_TRUE(s2);
    EXPECT_EQ(describe(m, *s2, order), "(F, X, OP, WS, X, F) / (A, A, A)");
}

TEST(BeFailure, PandStates) {
    DftModel m = loadModel("pand.dft");
    FtSemantics sem(m, true, true);
    auto order = ids(m, {"A", "B", "T"});
    auto s0 = sem.initialState();
    EXPECT_EQ(describe(m, *sem.applyBeFailure(s0, m.find("B")), order), "(X, X, FS)");
    auto a = *sem.applyBeFailure(s0, m.find("A"));
    EXPECT_EQ(describe(m, a, order), "(F, OP, OP)");
    EXPECT_EQ(describe(m, *sem.applyBeFailure(a, m.find("B")), order), "(X, X, F)");
}

TEST(BeFailure, PdepSeqBehaviour) {
    DftModel m = loadModel("pdep_seq.dft");
    FtSemantics sem(m, true, true);
    auto s0 = sem.initialState();

    auto a = sem.applyBeFailure(s0, m.find("A"));
    ASSERT_TRUE(a);
    Expansion e = sem.expand(*a);
    ASSERT_TRUE(e.immediate);
    ASSERT_EQ(e.choices.size(), 1u);
    ASSERT_EQ(e.choices[0].branches.size(), 2u);
    const auto& fwd = e.choices[0].branches[0];
    const auto& skip = e.choices[0].branches[1];
    EXPECT_EQ(fwd.weight, Polynomial(Rational(4, 5)));
    EXPECT_EQ(skip.weight, Polynomial(Rational(1, 5)));
    EXPECT_EQ(fwd.target.status[m.find("C")], Status::Failed);
    EXPECT_EQ(skip.target.status[m.find("C")], Status::Operational);

    EXPECT_FALSE(sem.applyBeFailure(s0, m.find("F")).has_value());

    auto d = sem.applyBeFailure(s0, m.find("D"));
    ASSERT_TRUE(d);
    for (NodeId v = 0; v < m.size(); ++v) {
        const auto& name = m.node(v).name;
        if (name == "G") {
            // dependent C is X, so the dependency is settled
            EXPECT_EQ(d->status[v], Status::FailSafe);
        } else if (name == "J") {
            EXPECT_EQ(d->status[v], Status::FailSafe);
        } else {
            EXPECT_EQ(d->status[v], Status::DontCare) << name;
        }
    }
}

TEST(Successors, PandRates) {
    DftModel m = loadModel("pand.dft");
    FtSemantics sem(m, true, true);
    Expansion e = sem.expand(sem.initialState());
    ASSERT_FALSE(e.immediate);
    std::map<std::string, Polynomial> rates;
    for (const auto& d : e.delays) {
        rates[m.node(d.cause).name] = d.weight;
    }
    EXPECT_EQ(rates.at("A"), Polynomial(1));
    EXPECT_EQ(rates.at("B"), Polynomial(2));
}

TEST(Successors, ColdPassiveEventCannotFail) {
    DftModel m = loadModel("nested_spares.dft");
    FtSemantics sem(m, true, true);
    Expansion e = sem.expand(sem.initialState());
    for (const auto& d : e.delays) {
        EXPECT_NE(m.node(d.cause).name, "D");
    }
    EXPECT_TRUE(sem.rateOf(sem.initialState(), m.find("D")).isZero());
}

TEST(Generate, PandGoldenAutomaton) {
    DftModel m = loadModel("pand.dft");
    MarkovAutomaton ma = generate(m);
    EXPECT_EQ(ma.states.size(), 4u);
    EXPECT_EQ(ma.transitionCount(), 3u);
    auto order = ids(m, {"A", "B", "T"});
    std::multiset<std::string> labels;
    for (const auto& s : ma.ftStates) {
        labels.insert(describe(m, s, order));
    }
    EXPECT_EQ(labels, (std::multiset<std::string>{"(OP, OP, OP)", "(F, OP, OP)", "(X, X, FS)", "(X, X, F)"}));
}

TEST(Generate, BudgetExceeded) {
    DftModel m = loadModel("bike.dft");
    GenerationOptions o;
    o.stateBudget = 3;
    EXPECT_THROW(generate(m, o), BudgetExceeded);
}

TEST(Generate, SymmetryReducesStates) {
    DftModel m = loadModel("symmetric_pands.dft");
    auto on = generate(m, only(true, false, false));
    auto off = generate(m, only(false, false, false));
    EXPECT_LT(on.states.size(), off.states.size());
    MeasureSpec pf = parseMeasure("probfail");
    EXPECT_NEAR(measureOnAutomaton(on, instantiateWeights(on, {}), pf).lower,
                measureOnAutomaton(off, instantiateWeights(off, {}), pf).lower, 1e-12);
}

TEST(Generate, PartialOrderReducesStates) {
    DftModel m = loadModel("fdep_trigger_only.dft");
    auto on = generate(m, only(false, false, true));
    auto off = generate(m, only(false, false, false));
    EXPECT_LT(on.states.size(), off.states.size());
    EXPECT_TRUE(on.deterministic());
    EXPECT_FALSE(off.deterministic());
    for (const char* spec : {"probfail", "mttf"}) {
        MeasureSpec s = parseMeasure(spec);
        auto a = measureOnAutomaton(on, instantiateWeights(on, {}), s);
        auto b = measureOnAutomaton(off, instantiateWeights(off, {}), s);
        EXPECT_NEAR(a.lower, b.lower, 1e-12) << spec;
        EXPECT_NEAR(a.upper, b.upper, 1e-12) << spec;
    }
}

TEST(Generate, PartialOrderDropsInterleavings) {
    // dependents also fail on their own here, so only transitions shrink
    DftModel m = loadModel("fdep_pair.dft");
    auto on = generate(m, only(false, false, true));
    auto off = generate(m, only(false, false, false));
    EXPECT_LE(on.states.size(), off.states.size());
    EXPECT_LT(on.transitionCount(), off.transitionCount());
    EXPECT_TRUE(on.deterministic());
}

TEST(Generate, PartialOrderOrdersCommutingDependencies) {
    DftModel m = loadModel("fdep_pair.dft");
    FtSemantics sem(m, false, true);
    auto x = *sem.applyBeFailure(sem.initialState(), m.find("X"));
    ASSERT_EQ(sem.triggered(x).size(), 2u);
    EXPECT_TRUE(sem.independent(m.find("D1"), m.find("D2")));
    Expansion e = sem.expand(x);
    ASSERT_EQ(e.choices.size(), 1u);
    EXPECT_EQ(m.node(e.choices[0].dependency).name, "D1");
    // Both orders end in the same state.
    auto ab = *sem.applyBeFailure(*sem.applyBeFailure(x, m.find("A")), m.find("B"));
    auto ba = *sem.applyBeFailure(*sem.applyBeFailure(x, m.find("B")), m.find("A"));
    EXPECT_EQ(ab, ba);
}

TEST(Canonicalize, SymmetricPartsMerge) {
    DftModel m = loadModel("symmetric_pands.dft");
    auto groups = detectSymmetries(m);
    FtSemantics sem(m, false, false);
    auto s0 = sem.initialState();
    auto left = *sem.applyBeFailure(s0, m.find("B"));
    auto right = *sem.applyBeFailure(s0, m.find("B2"));
    EXPECT_NE(left, right);
    EXPECT_EQ(canonicalize(left, groups), canonicalize(right, groups));
    EXPECT_EQ(canonicalize(s0, groups), s0);
    auto c = canonicalize(right, groups);
    EXPECT_EQ(canonicalize(c, groups), c);
}

TEST(Invariants, CorpusStateSpaces) {
    for (const auto& entry : testing_support::corpus()) {
        DftModel m = buildModel(entry.text);
        for (int mode = 0; mode < 2; ++mode) {
            GenerationOptions o = only(false, mode == 1, mode == 1);
            StateSpaceGenerator gen(m, o);
            MarkovAutomaton ma = gen.generate();
            ASSERT_EQ(ma.ftStates.size(), ma.states.size());
            for (StateId s = 0; s < ma.states.size(); ++s) {
                const MaState& st = ma.states[s];
                const FtState& fs = ma.ftStates[s];
                EXPECT_FALSE(!st.delays.empty() && !st.choices.empty()) << entry.name;
                if (st.immediate()) {
                    EXPECT_FALSE(gen.semantics().triggered(fs).empty()) << entry.name;
                }
                for (NodeId sp : m.spares()) {
                    bool op = fs.status[sp] == Status::Operational;
                    EXPECT_EQ(op, fs.usedChild[sp] >= 0) << entry.name;
                    if (!op) {
                        continue;
                    }
                    NodeId used = m.node(sp).children[static_cast<std::size_t>(fs.usedChild[sp])];
                    EXPECT_EQ(fs.status[used], Status::Operational) << entry.name;
                    for (NodeId other : m.spares()) {
                        if (other != sp && fs.status[other] == Status::Operational) {
                            EXPECT_NE(m.node(other).children[static_cast<std::size_t>(fs.usedChild[other])], used)
                                << entry.name;
                        }
                    }
                }
                auto edge = [&](StateId t, const Polynomial& w) {
                    const FtState& to = ma.ftStates[t];
                    for (NodeId v = 0; v < m.size(); ++v) {
                        EXPECT_TRUE(degradationAllowed(fs.status[v], to.status[v]))
                            << entry.name << " node " << m.node(v).name;
                        EXPECT_FALSE(fs.active[v] && !to.active[v]) << entry.name;
                    }
                    EXPECT_FALSE(w.isZero());
                };
                for (const auto& d : st.delays) {
                    edge(d.target, ma.weights[d.weight]);
                }
                for (const auto& c : st.choices) {
                    Polynomial sum;
                    for (const auto& b : c.branches) {
                        edge(b.target, ma.weights[b.weight]);
                        sum = sum + ma.weights[b.weight];
                    }
                    EXPECT_EQ(sum, Polynomial(1)) << entry.name;
                }
            }
        }
    }
}

TEST(Invariants, ParametricDistributionsSumToOne) {
    DftModel m = buildModel(R"(param p; toplevel "T"; "T" and "A" "B"; "D" pdep prob=p "A" "B"; "A" lambda=1; "B" lambda=1;)");
    MarkovAutomaton ma = generate(m);
    bool sawChoice = false;
    for (const auto& st : ma.states) {
        for (const auto& c : st.choices) {
            sawChoice = true;
            Polynomial sum;
            for (const auto& b : c.branches) {
                sum = sum + ma.weights[b.weight];
            }
            EXPECT_EQ(sum, Polynomial(1));
        }
    }
    EXPECT_TRUE(sawChoice);
}

TEST(Generate, IndependentGenerationsInParallel) {
    DftModel m = loadModel("spare_modules.dft");
    MarkovAutomaton reference = generate(m);
    std::vector<MarkovAutomaton> results(4);
    std::vector<std::thread> pool;
    for (auto& r : results) {
        pool.emplace_back([&m, &r] { r = generate(m); });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& r : results) {
        EXPECT_EQ(r.descriptions, reference.descriptions);
        EXPECT_EQ(r.transitionCount(), reference.transitionCount());
    }
}

TEST(Generate, DeterministicNumbering) {
    DftModel m = loadModel("pdep_seq.dft");
    auto a = generate(m);
    auto b = generate(m);
    EXPECT_EQ(a.descriptions, b.descriptions);
    EXPECT_EQ(automatonToJson(a).dump(), automatonToJson(b).dump());
}

TEST(Export, AutomatonDotAndJsonRoundTrip) {
    DftModel m = loadModel("pand.dft");
    MarkovAutomaton ma = generate(m);
    std::string dot = automatonToDot(ma);
    std::size_t nodes = 0;
    for (StateId s = 0; s < ma.states.size(); ++s) {
        nodes += dot.find("  s" + std::to_string(s) + " [label=") != std::string::npos;
    }
    EXPECT_EQ(nodes, 4u);
    EXPECT_NE(dot.find("rate=1"), std::string::npos);
    EXPECT_NE(dot.find("rate=2"), std::string::npos);

    DftModel pd = loadModel("pdep_seq.dft");
    MarkovAutomaton orig = generate(pd);
    EXPECT_NE(automatonToDot(orig).find("p=4/5"), std::string::npos);
    MarkovAutomaton back = automatonFromJson(nlohmann::json::parse(automatonToJson(orig).dump()));
    EXPECT_EQ(automatonToJson(back).dump(), automatonToJson(orig).dump());
    MeasureSpec spec = parseMeasure("mttf");
    spec.conditional = true;
    EXPECT_EQ(measureOnAutomaton(orig, instantiateWeights(orig, {}), spec).lower,
              measureOnAutomaton(back, instantiateWeights(back, {}), spec).lower);
}

TEST(Export, MetadataRecordsStateCounts) {
    DftModel m = loadModel("symmetric_pands.dft");
    auto on = automatonToJson(generate(m));
    auto off = automatonToJson(generate(m, only(false, true, true)));
    EXPECT_LT(on["metadata"]["states"].get<std::size_t>(), off["metadata"]["states"].get<std::size_t>());
    EXPECT_TRUE(on["metadata"]["symred"].get<bool>());
    EXPECT_FALSE(off["metadata"]["symred"].get<bool>());
}

TEST(Export, RejectsBrokenJson) {
    auto j = automatonToJson(generate(loadModel("pand.dft")));
    j["states"][0]["delays"][0]["target"] = 99;
    EXPECT_THROW(automatonFromJson(nlohmann::json::parse(j.dump())), Error);
    auto k = automatonToJson(generate(loadModel("pand.dft")));
    k["states"][0]["delays"][0]["rate"] = "1 +";
    EXPECT_THROW(automatonFromJson(nlohmann::json::parse(k.dump())), Error);
}

TEST(Events, CustomFailureEvent) {
    DftModel m = loadModel("and.dft");
    GenerationOptions o;
    o.event = EventFormula::parse("A | B", m);
    MarkovAutomaton ma = generate(m, o);
    MeasureSpec s = parseMeasure("mttf");
    EXPECT_NEAR(measureOnAutomaton(ma, instantiateWeights(ma, {}), s).lower, 0.5, 1e-12);
    EXPECT_THROW(EventFormula::parse("A & (B", m), Error);
    EXPECT_THROW(EventFormula::parse("Q", m), Error);
    EXPECT_EQ(EventFormula::parse("!\"A\" & B", m).toString(m), EventFormula::parse("!A & B", m).toString(m));
}
