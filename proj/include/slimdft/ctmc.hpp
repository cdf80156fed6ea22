#pragma once

#include "slimdft/error.hpp"
#include "slimdft/markov_automaton.hpp"
#include "slimdft/rational_function.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <tuple>
#include <vector>

namespace slimdft {

inline bool isZeroValue(double v) { return v == 0.0; }
inline bool isZeroValue(const RationalFunction& v) { return v.isZero(); }

template <class V>
struct CtmcEdge {
    std::size_t target = 0;
    V rate{};
    CauseId cause = kNoCause;
    /// Basic-event failures taken along this edge.
    unsigned faults = 0;
};

/// CTMC with labelled absorbing classes. Failed and fail-safe states are
/// absorbing; a state without edges is absorbing as well.
template <class V>
struct Ctmc {
    std::vector<std::vector<CtmcEdge<V>>> edges;
    std::vector<char> failed;
    std::vector<char> failsafe;
    std::vector<std::vector<std::uint8_t>> relevant;
    std::size_t initial = 0;
    std::vector<std::string> causes;
    std::vector<std::string> relevantNames;
    /// Automaton state of every chain state.
    std::vector<StateId> origin;

    std::size_t size() const { return edges.size(); }

    bool absorbing(std::size_t s) const { return failed[s] || failsafe[s] || edges[s].empty(); }

    V exitRate(std::size_t s) const {
        V e{};
        for (const auto& x : edges[s]) {
            e = e + x.rate;
        }
        return e;
    }

    std::size_t transitionCount() const {
        std::size_t n = 0;
        for (const auto& e : edges) {
            n += e.size();
        }
        return n;
    }
};

/// Weights evaluated at a concrete parameter point.
inline std::vector<double> instantiateWeights(const MarkovAutomaton& ma, std::span<const Rational> point) {
    if (point.size() != ma.parameters.size()) {
        throw Error("expected " + std::to_string(ma.parameters.size()) + " parameter values, got " +
                    std::to_string(point.size()));
    }
    std::vector<double> w;
    w.reserve(ma.weights.size());
    for (const auto& p : ma.weights) {
        w.push_back(toDouble(p.evaluate(point)));
    }
    return w;
}

inline std::vector<RationalFunction> symbolicWeights(const MarkovAutomaton& ma) {
    std::vector<RationalFunction> w;
    w.reserve(ma.weights.size());
    for (const auto& p : ma.weights) {
        w.emplace_back(p);
    }
    return w;
}

/// Rejects negative rates and branch probabilities outside [0,1].
inline void checkAdmissible(const MarkovAutomaton& ma, const std::vector<double>& w) {
    for (StateId s = 0; s < ma.states.size(); ++s) {
        for (const auto& d : ma.states[s].delays) {
            if (!(w[d.weight] >= 0.0)) {
                throw Error("negative rate " + std::to_string(w[d.weight]) + " at state " + std::to_string(s));
            }
        }
        for (const auto& c : ma.states[s].choices) {
            for (const auto& b : c.branches) {
                if (!(w[b.weight] >= 0.0 && w[b.weight] <= 1.0)) {
                    throw Error("probability " + std::to_string(w[b.weight]) + " outside [0,1] at state " +
                                std::to_string(s));
                }
            }
        }
    }
}

/// Folds immediate states with a single enabled action into the delay
/// transitions leading to them. Throws NondeterminismRemains when some
/// state offers two or more actions.
template <class V>
Ctmc<V> eliminateImmediate(const MarkovAutomaton& ma, const std::vector<V>& w) {
    for (StateId s = 0; s < ma.states.size(); ++s) {
        if (ma.states[s].choices.size() > 1) {
            throw NondeterminismRemains(s);
        }
    }
    if (ma.states[ma.initial].immediate()) {
        throw Error("initial state of the automaton is immediate");
    }
    Ctmc<V> c;
    c.causes = ma.causes;
    c.relevantNames = ma.relevantNames;
    std::vector<std::size_t> index(ma.states.size(), SIZE_MAX);
    for (StateId s = 0; s < ma.states.size(); ++s) {
        if (!ma.states[s].immediate()) {
            index[s] = c.origin.size();
            c.origin.push_back(s);
        }
    }
    struct Reach {
        std::size_t target;
        V prob;
        CauseId cause;
        unsigned faults;
    };
    std::vector<std::vector<Reach>> memo(ma.states.size());
    std::vector<char> state(ma.states.size(), 0);  // 0 new, 1 visiting, 2 done
    auto resolve = [&](auto&& self, StateId s) -> const std::vector<Reach>& {
        if (state[s] == 2) {
            return memo[s];
        }
        if (state[s] == 1) {
            throw Error("cycle of immediate states through state " + std::to_string(s));
        }
        state[s] = 1;
        std::vector<Reach> out;
        for (const auto& b : ma.states[s].choices[0].branches) {
            unsigned f = b.cause != kNoCause;
            if (!ma.states[b.target].immediate()) {
                out.push_back({index[b.target], w[b.weight], b.cause, f});
                continue;
            }
            for (const auto& r : self(self, b.target)) {
                out.push_back({r.target, w[b.weight] * r.prob, r.cause != kNoCause ? r.cause : b.cause,
                               f + r.faults});
            }
        }
        memo[s] = std::move(out);
        state[s] = 2;
        return memo[s];
    };

    c.edges.resize(c.origin.size());
    for (std::size_t i = 0; i < c.origin.size(); ++i) {
        const MaState& ms = ma.states[c.origin[i]];
        c.failed.push_back(ms.failed);
        c.failsafe.push_back(ms.failsafe);
        c.relevant.push_back(ms.relevant);
        std::map<std::tuple<std::size_t, CauseId, unsigned>, std::size_t> slot;
        auto add = [&](std::size_t target, const V& rate, CauseId cause, unsigned faults) {
            if (isZeroValue(rate)) {
                return;
            }
            auto key = std::make_tuple(target, cause, faults);
            auto it = slot.find(key);
            if (it == slot.end()) {
                slot.emplace(key, c.edges[i].size());
                c.edges[i].push_back({target, rate, cause, faults});
            } else {
                c.edges[i][it->second].rate = c.edges[i][it->second].rate + rate;
            }
        };
        for (const auto& d : ms.delays) {
            unsigned f = d.cause != kNoCause;
            if (!ma.states[d.target].immediate()) {
                add(index[d.target], w[d.weight], d.cause, f);
                continue;
            }
            for (const auto& r : resolve(resolve, d.target)) {
                add(r.target, w[d.weight] * r.prob, r.cause != kNoCause ? r.cause : d.cause, f + r.faults);
            }
        }
    }
    c.initial = index[ma.initial];
    return c;
}

/// Factorised system A x = b with A_ss = E_s - R(s,s), A_su = -R(s,u) over
/// the transient states of a chain.
template <class V>
class RateSystem;

template <>
class RateSystem<double> {
public:
    RateSystem(const Ctmc<double>& c, const std::vector<std::size_t>& transient, const std::vector<long>& position)
        : n_(transient.size()) {
        std::vector<Eigen::Triplet<double>> triplets;
        for (std::size_t i = 0; i < n_; ++i) {
            std::size_t s = transient[i];
            double diag = 0.0;
            for (const auto& e : c.edges[s]) {
                diag += e.rate;
                if (position[e.target] >= 0) {
                    triplets.emplace_back(static_cast<int>(i), static_cast<int>(position[e.target]), -e.rate);
                }
            }
            triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), diag);
        }
        matrix_.resize(static_cast<int>(n_), static_cast<int>(n_));
        matrix_.setFromTriplets(triplets.begin(), triplets.end());
        matrix_.makeCompressed();
        if (n_ > 0) {
            lu_.compute(matrix_);
            if (lu_.info() != Eigen::Success) {
                throw Error("singular linear system: some transient state never reaches an absorbing state");
            }
        }
    }

    std::vector<double> solve(const std::vector<double>& rhs) const {
        if (n_ == 0) {
            return {};
        }
        Eigen::VectorXd b(static_cast<int>(n_));
        for (std::size_t i = 0; i < n_; ++i) {
            b[static_cast<int>(i)] = rhs[i];
        }
        Eigen::VectorXd x = const_cast<Eigen::SparseLU<Eigen::SparseMatrix<double>>&>(lu_).solve(b);
        return std::vector<double>(x.data(), x.data() + n_);
    }

private:
    std::size_t n_;
    Eigen::SparseMatrix<double> matrix_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

/// Exact elimination: pivots are chosen greedily by the fewest off-diagonal
/// entries in their row, then the lowest sum of denominator degrees, ties by
/// index. On acyclic chains this is back-substitution without fill-in. The recorded row
/// operations are replayed for every right-hand side.
template <>
class RateSystem<RationalFunction> {
public:
    RateSystem(const Ctmc<RationalFunction>& c, const std::vector<std::size_t>& transient,
               const std::vector<long>& position)
        : n_(transient.size()), rows_(n_), columns_(n_) {
        for (std::size_t i = 0; i < n_; ++i) {
            std::size_t s = transient[i];
            RationalFunction diag;
            for (const auto& e : c.edges[s]) {
                diag += e.rate;
                if (position[e.target] >= 0) {
                    addTo(i, static_cast<std::size_t>(position[e.target]), -e.rate);
                }
            }
            addTo(i, i, diag);
        }
        eliminate();
    }

    std::vector<RationalFunction> solve(std::vector<RationalFunction> y) const {
        for (const auto& op : operations_) {
            if (!y[op.pivot].isZero()) {
                y[op.row] -= op.factor * y[op.pivot];
            }
        }
        std::vector<RationalFunction> x(n_);
        for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
            std::size_t k = *it;
            RationalFunction acc = y[k];
            for (const auto& [j, v] : rows_[k]) {
                if (j != k && !x[j].isZero()) {
                    acc -= v * x[j];
                }
            }
            x[k] = acc / rows_[k].at(k);
        }
        return x;
    }

private:
    struct Operation {
        std::size_t row;
        std::size_t pivot;
        RationalFunction factor;
    };

    std::size_t n_;
    std::vector<std::map<std::size_t, RationalFunction>> rows_;
    std::vector<std::set<std::size_t>> columns_;
    std::vector<std::size_t> order_;
    std::vector<Operation> operations_;

    void addTo(std::size_t i, std::size_t j, const RationalFunction& v) {
        auto it = rows_[i].find(j);
        if (it == rows_[i].end()) {
            if (!v.isZero()) {
                rows_[i].emplace(j, v);
                columns_[j].insert(i);
            }
            return;
        }
        it->second += v;
        if (it->second.isZero()) {
            rows_[i].erase(it);
            columns_[j].erase(i);
        }
    }

    static std::pair<std::size_t, std::uint64_t> cost(const std::map<std::size_t, RationalFunction>& row) {
        std::uint64_t c = 0;
        for (const auto& [j, v] : row) {
            c += v.denominatorDegree();
        }
        return {row.size(), c};
    }

    void eliminate() {
        std::vector<char> done(n_, 0);
        for (std::size_t step = 0; step < n_; ++step) {
            std::size_t best = n_;
            std::pair<std::size_t, std::uint64_t> bestCost{};
            for (std::size_t k = 0; k < n_; ++k) {
                if (done[k]) {
                    continue;
                }
                auto ck = cost(rows_[k]);
                if (best == n_ || ck < bestCost) {
                    best = k;
                    bestCost = ck;
                }
            }
            std::size_t k = best;
            auto pivotIt = rows_[k].find(k);
            if (pivotIt == rows_[k].end()) {
                throw DegenerateDenominator("state elimination met a zero pivot");
            }
            RationalFunction pivot = pivotIt->second;
            std::vector<std::size_t> users;
            for (std::size_t i : columns_[k]) {
                if (!done[i] && i != k) {
                    users.push_back(i);
                }
            }
            for (std::size_t i : users) {
                RationalFunction f = rows_[i].at(k) / pivot;
                for (const auto& [j, v] : rows_[k]) {
                    if (j != k) {
                        addTo(i, j, -(f * v));
                    }
                }
                rows_[i].erase(k);
                columns_[k].erase(i);
                operations_.push_back({i, k, std::move(f)});
            }
            done[k] = 1;
            order_.push_back(k);
        }
    }
};

} // namespace slimdft
