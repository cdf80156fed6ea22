#pragma once

#include "slimdft/analysis.hpp"
#include "slimdft/ctmc.hpp"
#include "slimdft/event.hpp"
#include "slimdft/generator.hpp"
#include "slimdft/measure.hpp"
#include "slimdft/modularisation.hpp"

#include <span>
#include <string>
#include <vector>

namespace slimdft {

inline NodeId requireBasicEvent(const DftModel& m, const std::string& name) {
    NodeId id = m.find(name);
    if (id == kNoNode || !m.node(id).isBasicEvent()) {
        throw Error("'" + name + "' is not a basic event");
    }
    return id;
}

/// Generation options realising `opts` for `spec` on `m`.
inline GenerationOptions generationOptionsFor(const DftModel& m, const MeasureSpec& spec, const Optimisations& opts,
                                              std::size_t budget = 5'000'000) {
    GenerationOptions g;
    g.symmetryReduction = opts.symmetryReduction;
    g.dontCarePropagation = opts.dontCarePropagation;
    g.partialOrderReduction = opts.partialOrderReduction;
    g.stateBudget = budget;
    g.keepStates = false;
    if (spec.kind == MeasureKind::FussellVesely || spec.kind == MeasureKind::Criticality) {
        g.relevantNodes.push_back(requireBasicEvent(m, spec.basicEvent));
    }
    if (!spec.event.empty()) {
        g.event = EventFormula::parse(spec.event, m);
    }
    return g;
}

/// Value of a non-timed measure on a chain.
template <class V>
V measureOnChain(CtmcAnalysis<V>& a, const MeasureSpec& spec) {
    const auto& c = a.chain();
    switch (spec.kind) {
        case MeasureKind::ProbFail: return a.probFail(spec.conditional);
        case MeasureKind::Mttf: return a.mttf(spec.conditional);
        case MeasureKind::Vttf: return a.vttf(spec.conditional);
        case MeasureKind::ExpectedFaults: return a.expectedFaults(spec.conditional);
        case MeasureKind::FussellVesely: {
            int idx = -1;
            for (std::size_t i = 0; i < c.relevantNames.size(); ++i) {
                if (c.relevantNames[i] == spec.basicEvent) {
                    idx = static_cast<int>(i);
                }
            }
            if (idx < 0) {
                throw Error("the automaton carries no label for '" + spec.basicEvent + "'");
            }
            return a.fussellVesely(idx);
        }
        case MeasureKind::Criticality: {
            CauseId cause = kNoCause;
            for (std::size_t i = 0; i < c.causes.size(); ++i) {
                if (c.causes[i] == spec.basicEvent) {
                    cause = static_cast<CauseId>(i);
                }
            }
            if (cause == kNoCause) {
                throw Error("unknown basic event '" + spec.basicEvent + "'");
            }
            return a.criticality(cause);
        }
        case MeasureKind::Reliability: break;
    }
    throw Error("reliability is not a closed-form measure");
}

/// Concrete value (or scheduler bounds) of a measure on an automaton.
inline Bounds measureOnAutomaton(const MarkovAutomaton& ma, const std::vector<double>& w, const MeasureSpec& spec,
                                 std::size_t* chainStates = nullptr) {
    if (!ma.deterministic()) {
        if (spec.conditional || (spec.kind != MeasureKind::ProbFail && spec.kind != MeasureKind::Mttf)) {
            throw NondeterminismRemains(0);
        }
        MaAnalysis a(ma, w);
        return spec.kind == MeasureKind::ProbFail ? a.probFail() : a.mttf();
    }
    Ctmc<double> c = eliminateImmediate(ma, w);
    if (chainStates) {
        *chainStates = c.size();
    }
    if (spec.kind == MeasureKind::Reliability) {
        double r = reliability(c, spec.time);
        return {r, r};
    }
    CtmcAnalysis<double> a(c);
    double v = measureOnChain(a, spec);
    return {v, v};
}

/// Closed form of a measure on a parametric automaton.
inline RationalFunction parametricMeasure(const MarkovAutomaton& ma, const MeasureSpec& spec) {
    if (compatibility(spec.kind).parametric == Support::No) {
        throw IncompatibleMeasure(std::string(measureName(spec.kind)) + " does not support parametric");
    }
    Ctmc<RationalFunction> c = eliminateImmediate(ma, symbolicWeights(ma));
    CtmcAnalysis<RationalFunction> a(c);
    return measureOnChain(a, spec);
}

struct AnalysisRequest {
    MeasureSpec measure;
    Optimisations optimisations;
    std::size_t budget = 5'000'000;
    /// Values of all model parameters, in declaration order.
    std::vector<Rational> point;
};

struct AnalysisOutcome {
    Bounds value;
    bool deterministic = true;
    std::size_t states = 0;
    std::size_t transitions = 0;
    std::size_t chainStates = 0;
    std::size_t modules = 1;
    bool modular = false;
    bool lightSymmetry = false;
};

inline AnalysisOutcome analyze(const DftModel& m, const AnalysisRequest& req);

namespace engine_detail {

inline AnalysisOutcome analyzeModular(const DftModel& m, const AnalysisRequest& req) {
    const auto& spec = req.measure;
    if (!spec.event.empty()) {
        throw IncompatibleMeasure("modularisation needs the default failure event");
    }
    const DftNode& top = m.node(m.top());
    if (top.isGate() && !isStaticGate(top.kind)) {
        throw NotModular("top gate '" + top.name + "' is dynamic");
    }
    ModuleTree tree = detectIndependentModules(m);
    AnalysisOutcome out;
    out.modular = true;
    out.modules = tree.leafCount();
    AnalysisRequest sub = req;
    sub.optimisations.modularisation = false;
    if (tree.leaf) {
        // nothing to split; triggers outside the gate tree stay attached
        AnalysisOutcome whole = analyze(m, sub);
        whole.modular = true;
        return whole;
    }
    double p = combineModules(m, tree, [&](NodeId root) {
        DftModel part = buildModel(validate(moduleDescription(m, root)));
        AnalysisOutcome r = analyze(part, sub);
        out.states += r.states;
        out.transitions += r.transitions;
        out.chainStates += r.chainStates;
        if (!r.deterministic) {
            throw NondeterminismRemains(0);
        }
        return r.value.lower;
    });
    out.value = {p, p};
    return out;
}

} // namespace engine_detail

/// Full concrete pipeline: generation, immediate elimination, analysis.
inline AnalysisOutcome analyze(const DftModel& m, const AnalysisRequest& req) {
    const auto& spec = req.measure;
    requireCompatible(spec, req.optimisations);
    if (req.optimisations.modularisation) {
        return engine_detail::analyzeModular(m, req);
    }
    MarkovAutomaton ma = generate(m, generationOptionsFor(m, spec, req.optimisations, req.budget));
    std::vector<double> w = instantiateWeights(ma, req.point);
    checkAdmissible(ma, w);
    AnalysisOutcome out;
    out.states = ma.states.size();
    out.transitions = ma.transitionCount();
    out.deterministic = ma.deterministic();
    out.lightSymmetry = req.optimisations.symmetryReduction && compatibility(spec.kind).symmetry == Support::Light;
    out.value = measureOnAutomaton(ma, w, spec, &out.chainStates);
    return out;
}

} // namespace slimdft
