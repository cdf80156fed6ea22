#pragma once

#include "slimdft/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace slimdft {

enum class MeasureKind { Reliability, ProbFail, Mttf, Vttf, ExpectedFaults, FussellVesely, Criticality };

inline const char* measureName(MeasureKind k) {
    switch (k) {
        case MeasureKind::Reliability: return "reliability";
        case MeasureKind::ProbFail: return "probfail";
        case MeasureKind::Mttf: return "mttf";
        case MeasureKind::Vttf: return "vttf";
        case MeasureKind::ExpectedFaults: return "faults";
        case MeasureKind::FussellVesely: return "fv";
        case MeasureKind::Criticality: return "crit";
    }
    return "?";
}

struct MeasureSpec {
    MeasureKind kind = MeasureKind::ProbFail;
    /// Mission time for Reliability.
    double time = 0.0;
    /// Basic event for the importance factors.
    std::string basicEvent;
    bool conditional = false;
    /// Failure event formula; empty means "top failed".
    std::string event;

    std::string toString() const {
        std::string s = measureName(kind);
        if (kind == MeasureKind::Reliability) {
            s += "=" + std::to_string(time);
        } else if (kind == MeasureKind::FussellVesely || kind == MeasureKind::Criticality) {
            s += "=" + basicEvent;
        }
        return s;
    }
};

/// Parses `probfail`, `mttf`, `vttf`, `faults`, `fv=NAME`, `crit=NAME`,
/// `reliability=T`.
inline MeasureSpec parseMeasure(std::string_view text) {
    MeasureSpec m;
    auto eq = text.find('=');
    std::string head(text.substr(0, eq));
    std::string arg = eq == std::string_view::npos ? std::string() : std::string(text.substr(eq + 1));
    auto needArg = [&](bool want) {
        if (want == arg.empty()) {
            throw Error("measure '" + head + (want ? "' needs an argument" : "' takes no argument"));
        }
    };
    if (head == "probfail") {
        needArg(false);
        m.kind = MeasureKind::ProbFail;
    } else if (head == "mttf") {
        needArg(false);
        m.kind = MeasureKind::Mttf;
    } else if (head == "vttf") {
        needArg(false);
        m.kind = MeasureKind::Vttf;
    } else if (head == "faults") {
        needArg(false);
        m.kind = MeasureKind::ExpectedFaults;
    } else if (head == "fv") {
        needArg(true);
        m.kind = MeasureKind::FussellVesely;
        m.basicEvent = arg;
    } else if (head == "crit") {
        needArg(true);
        m.kind = MeasureKind::Criticality;
        m.basicEvent = arg;
    } else if (head == "reliability") {
        needArg(true);
        m.kind = MeasureKind::Reliability;
        std::size_t used = 0;
        try {
            m.time = std::stod(arg, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != arg.size() || !(m.time >= 0.0)) {
            throw Error("reliability needs a non-negative time, got '" + arg + "'");
        }
    } else {
        throw Error("unknown measure '" + head + "'");
    }
    return m;
}

struct Optimisations {
    bool symmetryReduction = true;
    bool dontCarePropagation = true;
    bool partialOrderReduction = true;
    bool modularisation = false;
};

enum class Support { No, Yes, Light };

/// One row of the measure/optimisation compatibility matrix.
struct CompatibilityRow {
    Support conditional;
    Support parametric;
    Support modularisation;
    Support dontCare;
    Support symmetry;
};

inline CompatibilityRow compatibility(MeasureKind k) {
    using S = Support;
    switch (k) {
        case MeasureKind::Reliability: return {S::No, S::No, S::Yes, S::Yes, S::Yes};
        case MeasureKind::ProbFail: return {S::Yes, S::Yes, S::Yes, S::Yes, S::Yes};
        case MeasureKind::Mttf:
        case MeasureKind::Vttf: return {S::Yes, S::Yes, S::No, S::Yes, S::Yes};
        case MeasureKind::ExpectedFaults: return {S::Yes, S::Yes, S::No, S::No, S::Yes};
        case MeasureKind::FussellVesely: return {S::Yes, S::Yes, S::No, S::No, S::Light};
        case MeasureKind::Criticality: return {S::Yes, S::Yes, S::No, S::Yes, S::Light};
    }
    return {};
}

struct Violation {
    MeasureKind measure;
    std::string optimisation;
    std::string message;
};

/// Every (measure, feature) pair of the request that the matrix forbids.
inline std::vector<Violation> checkCompatibility(const MeasureSpec& spec, const Optimisations& opts,
                                                 bool parametric = false) {
    std::vector<Violation> out;
    auto row = compatibility(spec.kind);
    auto check = [&](bool requested, Support s, const char* what) {
        if (requested && s == Support::No) {
            out.push_back({spec.kind, what,
                           std::string(measureName(spec.kind)) + " does not support " + what});
        }
    };
    check(spec.conditional, row.conditional, "conditional");
    check(parametric, row.parametric, "parametric");
    check(opts.modularisation, row.modularisation, "modularisation");
    check(opts.dontCarePropagation, row.dontCare, "dc");
    check(opts.symmetryReduction, row.symmetry, "symred");
    return out;
}

/// Optimisations enabled by default for a measure: everything it supports
/// except modularisation, which must be asked for.
inline Optimisations defaultOptimisations(const MeasureSpec& spec) {
    auto row = compatibility(spec.kind);
    Optimisations o;
    o.dontCarePropagation = row.dontCare != Support::No;
    o.symmetryReduction = row.symmetry != Support::No;
    o.partialOrderReduction = true;
    o.modularisation = false;
    return o;
}

inline void requireCompatible(const MeasureSpec& spec, const Optimisations& opts, bool parametric = false) {
    auto v = checkCompatibility(spec, opts, parametric);
    if (!v.empty()) {
        std::string msg;
        for (const auto& x : v) {
            msg += (msg.empty() ? "" : "; ") + x.message;
        }
        throw IncompatibleMeasure(msg);
    }
}

} // namespace slimdft
