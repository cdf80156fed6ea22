#pragma once

#include "slimdft/engine.hpp"
#include "slimdft/interval.hpp"
#include "slimdft/rational_function.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <span>
#include <thread>
#include <vector>

namespace slimdft {

inline RationalFunction sensitivity(const RationalFunction& f, std::size_t param) { return f.derivative(param); }

inline Interval intervalEval(const RationalFunction& f, const Box& box) { return enclose(f, box); }

enum class RegionClass { AllAbove, AllBelow, Unknown };

inline const char* regionClassName(RegionClass c) {
    switch (c) {
        case RegionClass::AllAbove: return "above";
        case RegionClass::AllBelow: return "below";
        case RegionClass::Unknown: return "unknown";
    }
    return "?";
}

enum class Direction { Above, Below };

struct RegionVerdict {
    Box box;
    RegionClass cls = RegionClass::Unknown;
};

struct PartitionOptions {
    double threshold = 0.0;
    Direction direction = Direction::Above;
    double coverage = 0.9;
    unsigned depthCap = 16;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct PartitionResult {
    std::vector<RegionVerdict> verdicts;
    /// Volume fraction of boxes classified above or below.
    double classifiedFraction = 0.0;
    /// Volume fraction of boxes meeting the requested direction.
    double satisfyingFraction = 0.0;
    bool partial = false;
};

inline double volume(const Box& b) {
    double v = 1.0;
    for (const auto& i : b) {
        v *= i.width();
    }
    return v;
}

/// Bounds of f on a box, tightened along dimensions where the partial
/// derivative has constant sign.
class BoxClassifier {
public:
    explicit BoxClassifier(RationalFunction f) : f_(std::move(f)) {
        auto vars = f_.numerator().variables();
        auto dvars = f_.denominator().variables();
        vars.insert(dvars.begin(), dvars.end());
        for (std::size_t v : vars) {
            gradient_.emplace_back(v, f_.derivative(v));
        }
    }

    std::optional<Interval> bounds(const Box& box) const {
        Interval whole;
        try {
            whole = enclose(f_, box);
        } catch (const DenominatorMayVanish&) {
            return std::nullopt;
        }
        Box low = box, high = box;
        for (const auto& [v, d] : gradient_) {
            if (v >= box.size()) {
                continue;
            }
            Interval slope;
            try {
                slope = enclose(d, box);
            } catch (const DenominatorMayVanish&) {
                continue;
            }
            if (slope.lo >= 0.0) {
                low[v] = Interval(box[v].lo);
                high[v] = Interval(box[v].hi);
            } else if (slope.hi <= 0.0) {
                low[v] = Interval(box[v].hi);
                high[v] = Interval(box[v].lo);
            }
        }
        try {
            whole.lo = std::max(whole.lo, enclose(f_, low).lo);
            whole.hi = std::min(whole.hi, enclose(f_, high).hi);
        } catch (const DenominatorMayVanish&) {
        }
        return whole;
    }

    RegionClass classify(const Box& box, double threshold) const {
        auto b = bounds(box);
        if (!b) {
            return RegionClass::Unknown;
        }
        if (b->lo > threshold) {
            return RegionClass::AllAbove;
        }
        if (b->hi < threshold) {
            return RegionClass::AllBelow;
        }
        return RegionClass::Unknown;
    }

private:
    RationalFunction f_;
    std::vector<std::pair<std::size_t, RationalFunction>> gradient_;
};

/// Breadth-first bisection of the widest dimension until the classified
/// volume reaches the coverage goal or the depth cap is hit.
inline PartitionResult partition(const RationalFunction& f, const Box& box, const PartitionOptions& opts) {
    BoxClassifier classifier(f);
    const double total = volume(box);
    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    PartitionResult result;
    std::vector<Box> level{box};
    double classified = 0.0;
    for (unsigned depth = 0; !level.empty(); ++depth) {
        std::vector<RegionClass> cls(level.size(), RegionClass::Unknown);
        auto work = [&](std::size_t begin, std::size_t step) {
            for (std::size_t i = begin; i < level.size(); i += step) {
                cls[i] = classifier.classify(level[i], opts.threshold);
            }
        };
        if (threads > 1 && level.size() > 1) {
            std::vector<std::thread> pool;
            std::size_t n = std::min<std::size_t>(threads, level.size());
            for (std::size_t t = 0; t < n; ++t) {
                pool.emplace_back(work, t, n);
            }
            for (auto& th : pool) {
                th.join();
            }
        } else {
            work(0, 1);
        }
        std::vector<Box> next;
        for (std::size_t i = 0; i < level.size(); ++i) {
            if (cls[i] != RegionClass::Unknown) {
                classified += volume(level[i]);
                result.verdicts.push_back({level[i], cls[i]});
            }
        }
        bool done = total <= 0.0 || classified / total >= opts.coverage || depth >= opts.depthCap;
        for (std::size_t i = 0; i < level.size(); ++i) {
            if (cls[i] != RegionClass::Unknown) {
                continue;
            }
            if (done) {
                result.verdicts.push_back({level[i], RegionClass::Unknown});
                continue;
            }
            const Box& b = level[i];
            std::size_t widest = 0;
            for (std::size_t d = 1; d < b.size(); ++d) {
                if (b[d].width() > b[widest].width()) {
                    widest = d;
                }
            }
            double mid = b[widest].mid();
            Box left = b, right = b;
            left[widest].hi = mid;
            right[widest].lo = mid;
            next.push_back(std::move(left));
            next.push_back(std::move(right));
        }
        if (done) {
            break;
        }
        level = std::move(next);
    }
    result.classifiedFraction = total > 0.0 ? classified / total : 0.0;
    double satisfying = 0.0;
    for (const auto& v : result.verdicts) {
        if ((v.cls == RegionClass::AllAbove && opts.direction == Direction::Above) ||
            (v.cls == RegionClass::AllBelow && opts.direction == Direction::Below)) {
            satisfying += volume(v.box);
        }
    }
    result.satisfyingFraction = total > 0.0 ? satisfying / total : 0.0;
    result.partial = result.classifiedFraction < opts.coverage;
    return result;
}

struct SamplingReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
};

/// Checks classified boxes against an independent evaluator at uniformly
/// drawn points.
inline SamplingReport validateRegions(const std::vector<RegionVerdict>& verdicts,
                                      const std::function<double(std::span<const double>)>& evaluate,
                                      double threshold, std::size_t perBox, std::uint64_t seed) {
    SamplingReport r;
    std::mt19937_64 rng(seed);
    std::vector<double> point;
    for (const auto& v : verdicts) {
        if (v.cls == RegionClass::Unknown) {
            continue;
        }
        for (std::size_t k = 0; k < perBox; ++k) {
            point.clear();
            for (const auto& i : v.box) {
                point.push_back(std::uniform_real_distribution<double>(i.lo, i.hi)(rng));
            }
            double value = evaluate(point);
            bool ok = v.cls == RegionClass::AllAbove ? value > threshold : value < threshold;
            ++r.samples;
            r.violations += !ok;
        }
    }
    return r;
}

/// Measure value of the concrete pipeline at a floating-point parameter
/// point, reusing one parametric automaton.
inline double concreteMeasureAt(const MarkovAutomaton& ma, const MeasureSpec& spec, std::span<const double> point) {
    std::vector<double> w;
    w.reserve(ma.weights.size());
    for (const auto& p : ma.weights) {
        w.push_back(p.evaluate(point));
    }
    return measureOnAutomaton(ma, w, spec).lower;
}

} // namespace slimdft
