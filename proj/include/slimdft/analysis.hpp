#pragma once

#include "slimdft/ctmc.hpp"
#include "slimdft/error.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace slimdft {

/// Measures on a chain whose values are doubles or rational functions.
///
/// All quantities come from systems A x = c over the transient states
/// (see RateSystem), with right-hand sides written in rate form.
template <class V>
class CtmcAnalysis {
public:
    explicit CtmcAnalysis(const Ctmc<V>& c) : c_(c), position_(c.size(), -1) {
        for (std::size_t s = 0; s < c.size(); ++s) {
            if (!c.absorbing(s)) {
                position_[s] = static_cast<long>(transient_.size());
                transient_.push_back(s);
            }
        }
    }

    const Ctmc<V>& chain() const { return c_; }

    /// True when every absorbing state reachable from the initial state is
    /// failed, so the failure probability is exactly one.
    bool failsAlmostSurely() const {
        for (std::size_t s : reachable()) {
            if (c_.absorbing(s) && !c_.failed[s]) {
                return false;
            }
        }
        return true;
    }

    bool failureReachable() const {
        for (std::size_t s : reachable()) {
            if (c_.failed[s]) {
                return true;
            }
        }
        return false;
    }

    V probFail(bool conditional = false) {
        if (conditional) {
            requireFailureReachable();
            return V(1);
        }
        if (failsAlmostSurely()) {
            return V(1);
        }
        return h()[c_.initial];
    }

    V mttf(bool conditional = false) {
        if (!conditional) {
            requireAlmostSure("mttf");
            return m1()[c_.initial];
        }
        requireFailureReachable();
        return g()[c_.initial] / h()[c_.initial];
    }

    V vttf(bool conditional = false) {
        if (!conditional) {
            requireAlmostSure("vttf");
            V m = m1()[c_.initial];
            return second(m1())[c_.initial] - m * m;
        }
        requireFailureReachable();
        V hs = h()[c_.initial];
        V mean = g()[c_.initial] / hs;
        return second(g())[c_.initial] / hs - mean * mean;
    }

    V expectedFaults(bool conditional = false) {
        if (!conditional) {
            requireAlmostSure("faults");
            return solveWith([&](std::size_t, const CtmcEdge<V>& e) { return V(static_cast<long>(e.faults)); },
                             true);
        }
        requireFailureReachable();
        const auto& hv = h();
        V value = solveWith([&](std::size_t, const CtmcEdge<V>& e) {
            return V(static_cast<long>(e.faults)) * hv[e.target];
        }, true);
        return value / hv[c_.initial];
    }

    /// Probability that relevant node `index` has failed when the chain is
    /// absorbed in a failed state, given that it is.
    V fussellVesely(int index) {
        requireFailureReachable();
        auto i = static_cast<std::size_t>(index);
        V joint = solveWith([&](std::size_t, const CtmcEdge<V>& e) {
            return c_.failed[e.target] && c_.relevant[e.target][i] ? V(1) : V(0);
        }, false);
        if (c_.absorbing(c_.initial)) {
            joint = c_.relevant[c_.initial][i] ? V(1) : V(0);
        }
        return joint / h()[c_.initial];
    }

    /// Probability that the transition entering a failed state is the
    /// failure of `cause`, given that a failed state is reached.
    V criticality(CauseId cause) {
        requireFailureReachable();
        V joint = solveWith([&](std::size_t, const CtmcEdge<V>& e) {
            return c_.failed[e.target] && e.cause == cause ? V(1) : V(0);
        }, false);
        return joint / h()[c_.initial];
    }

    /// Failure probability of every state.
    const std::vector<V>& h() {
        if (!h_) {
            h_ = expand(system().solve(rhs([&](std::size_t, const CtmcEdge<V>& e) {
                return c_.failed[e.target] ? V(1) : V(0);
            }, false)), [&](std::size_t s) { return c_.failed[s] ? V(1) : V(0); });
        }
        return *h_;
    }

private:
    const Ctmc<V>& c_;
    std::vector<std::size_t> transient_;
    std::vector<long> position_;
    std::optional<RateSystem<V>> system_;
    std::optional<std::vector<V>> h_;
    std::optional<std::vector<V>> m1_;
    std::optional<std::vector<V>> g_;

    RateSystem<V>& system() {
        if (!system_) {
            system_.emplace(c_, transient_, position_);
        }
        return *system_;
    }

    std::vector<std::size_t> reachable() const {
        std::vector<char> seen(c_.size(), 0);
        std::vector<std::size_t> work{c_.initial}, out;
        seen[c_.initial] = 1;
        while (!work.empty()) {
            auto s = work.back();
            work.pop_back();
            out.push_back(s);
            if (c_.absorbing(s)) {
                continue;
            }
            for (const auto& e : c_.edges[s]) {
                if (!seen[e.target]) {
                    seen[e.target] = 1;
                    work.push_back(e.target);
                }
            }
        }
        return out;
    }

    void requireAlmostSure(const char* what) const {
        if (!failsAlmostSurely()) {
            throw UndefinedMeasure(std::string(what) +
                                   " is undefined: the failure probability is below one (use --conditional)");
        }
    }

    void requireFailureReachable() const {
        if (!failureReachable()) {
            throw UndefinedMeasure("no failed state is reachable");
        }
    }

    /// Rate-form right-hand side: per transient state, the sum over edges of
    /// rate * f(edge). With `allTargets` false only edges leaving the
    /// transient set contribute (their targets are absorbing).
    template <class F>
    std::vector<V> rhs(F f, bool allTargets) const {
        std::vector<V> b(transient_.size());
        for (std::size_t i = 0; i < transient_.size(); ++i) {
            V acc{};
            for (const auto& e : c_.edges[transient_[i]]) {
                if (!allTargets && position_[e.target] >= 0) {
                    continue;
                }
                V v = f(transient_[i], e);
                if (!isZeroValue(v)) {
                    acc = acc + e.rate * v;
                }
            }
            b[i] = acc;
        }
        return b;
    }

    template <class F>
    V solveWith(F f, bool allTargets) {
        if (c_.absorbing(c_.initial)) {
            return V(0);
        }
        auto x = system().solve(rhs(f, allTargets));
        return x[static_cast<std::size_t>(position_[c_.initial])];
    }

    template <class F>
    std::vector<V> expand(const std::vector<V>& x, F absorbingValue) const {
        std::vector<V> full(c_.size());
        for (std::size_t s = 0; s < c_.size(); ++s) {
            full[s] = position_[s] >= 0 ? x[static_cast<std::size_t>(position_[s])] : absorbingValue(s);
        }
        return full;
    }

    std::vector<V> perTransient(const std::vector<V>& values) const {
        std::vector<V> b(transient_.size());
        for (std::size_t i = 0; i < transient_.size(); ++i) {
            b[i] = values[transient_[i]];
        }
        return b;
    }

    /// Expected time to absorption in a failed state (all states).
    const std::vector<V>& m1() {
        if (!m1_) {
            m1_ = expand(system().solve(std::vector<V>(transient_.size(), V(1))), [](std::size_t) { return V(0); });
        }
        return *m1_;
    }

    /// E[T * 1{fail}] for every state.
    const std::vector<V>& g() {
        if (!g_) {
            g_ = expand(system().solve(perTransient(h())), [](std::size_t) { return V(0); });
        }
        return *g_;
    }

    /// Second moment companion of a first-moment vector: A m2 = 2 * first.
    std::vector<V> second(const std::vector<V>& first) {
        auto b = perTransient(first);
        for (auto& v : b) {
            v = v * V(2);
        }
        return expand(system().solve(b), [](std::size_t) { return V(0); });
    }
};

/// Probability of being in a failed state at time t, by uniformization.
inline double reliability(const Ctmc<double>& c, double t, double tailBound = 1e-10) {
    if (t < 0) {
        throw Error("reliability needs t >= 0");
    }
    std::size_t n = c.size();
    double maxExit = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        if (!c.absorbing(s)) {
            maxExit = std::max(maxExit, c.exitRate(s));
        }
    }
    if (maxExit == 0.0 || t == 0.0) {
        return c.failed[c.initial] ? 1.0 : 0.0;
    }
    double q = 1.02 * maxExit;
    double lambda = q * t;

    // Poisson weights around the mode, normalised afterwards.
    auto mode = static_cast<std::size_t>(std::floor(lambda));
    std::vector<double> up{1.0};
    const double cutoff = 1e-300;
    for (std::size_t k = mode;; ++k) {
        double next = up.back() * lambda / static_cast<double>(k + 1);
        if (next < cutoff || (next < tailBound * 1e-6 && k > mode + 10)) {
            break;
        }
        up.push_back(next);
    }
    std::vector<double> down;
    double cur = 1.0;
    for (std::size_t k = mode; k > 0; --k) {
        cur = cur * static_cast<double>(k) / lambda;
        if (cur < cutoff || (cur < tailBound * 1e-6 && mode - k > 10)) {
            break;
        }
        down.push_back(cur);
    }
    std::size_t left = mode - down.size();
    std::size_t right = mode + up.size() - 1;
    std::vector<double> weight(right - left + 1);
    for (std::size_t i = 0; i < down.size(); ++i) {
        weight[mode - 1 - i - left] = down[i];
    }
    for (std::size_t i = 0; i < up.size(); ++i) {
        weight[mode + i - left] = up[i];
    }
    double total = 0.0;
    for (double w : weight) {
        total += w;
    }
    for (double& w : weight) {
        w /= total;
    }

    std::vector<double> pi(n, 0.0), next(n);
    pi[c.initial] = 1.0;
    double result = 0.0;
    for (std::size_t k = 0; k <= right; ++k) {
        if (k >= left) {
            double failedMass = 0.0;
            for (std::size_t s = 0; s < n; ++s) {
                if (c.failed[s]) {
                    failedMass += pi[s];
                }
            }
            result += weight[k - left] * failedMass;
        }
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            if (pi[s] == 0.0) {
                continue;
            }
            if (c.absorbing(s)) {
                next[s] += pi[s];
                continue;
            }
            double stay = 1.0;
            for (const auto& e : c.edges[s]) {
                double p = e.rate / q;
                next[e.target] += pi[s] * p;
                stay -= p;
            }
            next[s] += pi[s] * stay;
        }
        pi.swap(next);
    }
    return std::clamp(result, 0.0, 1.0);
}

struct Bounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Optimal values over all schedulers of a Markov automaton with concrete
/// weights. Acyclic automata are solved exactly by one backward sweep;
/// cyclic ones by value iteration to a relative change of 1e-12.
class MaAnalysis {
public:
    MaAnalysis(const MarkovAutomaton& ma, std::vector<double> weights) : ma_(ma), w_(std::move(weights)) {
        topo_ = topologicalOrder();
    }

    bool acyclic() const { return !topo_.empty() || ma_.states.empty(); }

    Bounds probFail() {
        return {solve(false, false), solve(false, true)};
    }

    Bounds mttf() {
        if (probFail().lower < 1.0 - 1e-12) {
            throw UndefinedMeasure("mttf is undefined: some scheduler avoids failure with positive probability");
        }
        return {solve(true, false), solve(true, true)};
    }

private:
    const MarkovAutomaton& ma_;
    std::vector<double> w_;
    std::vector<StateId> topo_;

    std::vector<StateId> topologicalOrder() const {
        std::size_t n = ma_.states.size();
        std::vector<int> indeg(n, 0);
        auto succ = [&](StateId s, auto f) {
            for (const auto& d : ma_.states[s].delays) {
                f(d.target);
            }
            for (const auto& c : ma_.states[s].choices) {
                for (const auto& b : c.branches) {
                    f(b.target);
                }
            }
        };
        for (StateId s = 0; s < n; ++s) {
            succ(s, [&](StateId t) { ++indeg[t]; });
        }
        std::vector<StateId> order, work;
        for (StateId s = 0; s < n; ++s) {
            if (indeg[s] == 0) {
                work.push_back(s);
            }
        }
        while (!work.empty()) {
            StateId s = work.back();
            work.pop_back();
            order.push_back(s);
            succ(s, [&](StateId t) {
                if (--indeg[t] == 0) {
                    work.push_back(t);
                }
            });
        }
        if (order.size() != n) {
            order.clear();
        }
        return order;
    }

    double update(StateId s, const std::vector<double>& x, bool time, bool maximise) const {
        const MaState& st = ma_.states[s];
        if (st.failed) {
            return time ? 0.0 : 1.0;
        }
        if (st.absorbing() || st.failsafe) {
            return 0.0;
        }
        if (st.immediate()) {
            double best = maximise ? -1.0 : std::numeric_limits<double>::infinity();
            for (const auto& c : st.choices) {
                double v = 0.0;
                for (const auto& b : c.branches) {
                    v += w_[b.weight] * x[b.target];
                }
                best = maximise ? std::max(best, v) : std::min(best, v);
            }
            return best;
        }
        double exit = 0.0, v = 0.0;
        for (const auto& d : st.delays) {
            exit += w_[d.weight];
            v += w_[d.weight] * x[d.target];
        }
        if (exit == 0.0) {
            return 0.0;
        }
        return v / exit + (time ? 1.0 / exit : 0.0);
    }

    double solve(bool time, bool maximise) const {
        std::size_t n = ma_.states.size();
        std::vector<double> x(n, 0.0);
        if (!topo_.empty()) {
            for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
                x[*it] = update(*it, x, time, maximise);
            }
            return x[ma_.initial];
        }
        for (std::size_t iter = 0; iter < 10'000'000; ++iter) {
            double change = 0.0;
            for (StateId s = 0; s < n; ++s) {
                double v = update(s, x, time, maximise);
                double d = std::abs(v - x[s]);
                if (d > 0) {
                    change = std::max(change, d / std::max(std::abs(v), 1e-300));
                }
                x[s] = v;
            }
            if (change < 1e-12) {
                break;
            }
        }
        return x[ma_.initial];
    }
};

} // namespace slimdft
