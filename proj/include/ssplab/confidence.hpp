// Confidence sets over transition kernels (and optionally costs).
//
// A ConfidenceModel accumulates visit counts N(s,a) and N(s,a,y) and exposes
// the empirical kernel together with plausible-set radii in one of three
// modes:
//   l1_theoretical — beta = sqrt(8 S log(2 A N+ / delta) / N+)
//   l1_experimental — beta = sqrt(S L / N+), L = log(S A N+ / delta)
//   bernstein       — per-element beta = sqrt(p(1-p) L / N+) + L / N+
// with N+ = max{1, N}. Unvisited rows use the uniform empirical distribution
// (the N = 0 radius makes the whole simplex plausible anyway, so the choice
// only keeps the operator total).
#pragma once

#include "ssplab/common.hpp"

#include <cmath>
#include <string>

namespace ssplab {

enum class ConfidenceMode { l1_theoretical, l1_experimental, bernstein };

inline const char* to_string(ConfidenceMode mode) {
    switch (mode) {
    case ConfidenceMode::l1_theoretical: return "l1-theoretical";
    case ConfidenceMode::l1_experimental: return "l1-experimental";
    case ConfidenceMode::bernstein: return "bernstein";
    }
    return "?";
}

inline ConfidenceMode confidence_mode_from_string(const std::string& name) {
    if (name == "l1-theoretical") return ConfidenceMode::l1_theoretical;
    if (name == "l1-experimental") return ConfidenceMode::l1_experimental;
    if (name == "bernstein") return ConfidenceMode::bernstein;
    throw DataError("unknown confidence mode '" + name + "'");
}

// Radius formulas as pure functions of the scalar inputs. `s_count` is the
// state count the owning model plugs into the formulas and `n_plus` is
// max{1, N(s,a)}.

inline prec_t radius_l1_theoretical(int s_count, int n_actions, long long n_plus, prec_t delta) {
    return std::sqrt(8.0 * s_count *
                     std::log(2.0 * n_actions * static_cast<prec_t>(n_plus) / delta) /
                     static_cast<prec_t>(n_plus));
}

inline prec_t radius_l1_experimental(int s_count, int n_actions, long long n_plus, prec_t delta) {
    const prec_t big_l =
        std::log(static_cast<prec_t>(s_count) * n_actions * static_cast<prec_t>(n_plus) / delta);
    return std::sqrt(s_count * big_l / static_cast<prec_t>(n_plus));
}

inline prec_t radius_bernstein_element(prec_t p_hat, int s_count, int n_actions, long long n_plus,
                                       prec_t delta) {
    const prec_t big_l =
        std::log(static_cast<prec_t>(s_count) * n_actions * static_cast<prec_t>(n_plus) / delta);
    const prec_t variance = p_hat * (1 - p_hat);
    return std::sqrt(variance * big_l / static_cast<prec_t>(n_plus)) +
           big_l / static_cast<prec_t>(n_plus);
}

/// Transition counts and plausible-set radii for a tabular model.
///
/// `n_rows` states have counted rows of `n_outcomes` possible next states.
/// For an SSP instance that is (S, S+1): the last outcome column is the goal.
/// An average-reward model without implicit goal uses n_outcomes = n_rows.
/// `radius_s` is the state count plugged into the radius formulas (the owning
/// model's non-goal count for SSP learners; the full state count otherwise).
class ConfidenceModel {
public:
    ConfidenceModel(int n_rows, int n_actions, int n_outcomes, int radius_s, prec_t delta,
                    ConfidenceMode mode)
        : n_rows_(n_rows), n_actions_(n_actions), n_outcomes_(n_outcomes), radius_s_(radius_s),
          delta_(delta), mode_(mode),
          n_sa_(static_cast<std::size_t>(n_rows) * n_actions, 0),
          n_say_(static_cast<std::size_t>(n_rows) * n_actions * n_outcomes, 0) {
        if (n_rows < 1 || n_actions < 1 || n_outcomes < 1 || radius_s < 1)
            throw DataError("ConfidenceModel: dimensions must be positive");
        if (!(delta > 0 && delta < 1))
            throw DataError("ConfidenceModel: delta must lie in (0,1)");
    }

    int n_rows() const { return n_rows_; }
    int n_actions() const { return n_actions_; }
    int n_outcomes() const { return n_outcomes_; }
    prec_t delta() const { return delta_; }
    ConfidenceMode mode() const { return mode_; }

    /// Record one observed transition (s, a) -> y.
    void record(int s, int a, int y) {
        ++n_sa_[sa_index(s, a)];
        ++n_say_[say_index(s, a, y)];
    }

    long long count(int s, int a) const { return n_sa_[sa_index(s, a)]; }
    long long count(int s, int a, int y) const { return n_say_[say_index(s, a, y)]; }
    long long n_plus(int s, int a) const { return std::max<long long>(1, count(s, a)); }
    long long total_count() const {
        long long total = 0;
        for (long long c : n_sa_) total += c;
        return total;
    }

    /// Empirical row p_hat(.|s,a) written into out[0..n_outcomes): counts
    /// divided by N, or uniform when the pair is unvisited.
    void p_hat_row(int s, int a, prec_t* out) const {
        const long long n = count(s, a);
        if (n == 0) {
            const prec_t u = 1.0 / n_outcomes_;
            for (int y = 0; y < n_outcomes_; ++y) out[y] = u;
            return;
        }
        const long long* say = n_say_.data() + say_index(s, a, 0);
        for (int y = 0; y < n_outcomes_; ++y)
            out[y] = static_cast<prec_t>(say[y]) / static_cast<prec_t>(n);
    }

    /// L1-ball radius for (s,a) in the model's mode.
    prec_t radius_l1(int s, int a) const {
        switch (mode_) {
        case ConfidenceMode::l1_theoretical:
            return radius_l1_theoretical(radius_s_, n_actions_, n_plus(s, a), delta_);
        case ConfidenceMode::l1_experimental:
            return radius_l1_experimental(radius_s_, n_actions_, n_plus(s, a), delta_);
        case ConfidenceMode::bernstein:
            throw DataError("radius_l1: model is in per-element Bernstein mode");
        }
        throw DataError("radius_l1: bad mode");
    }

    /// Per-element Bernstein radius for outcome y of (s,a).
    prec_t radius_bernstein(int s, int a, int y) const {
        if (mode_ != ConfidenceMode::bernstein)
            throw DataError("radius_bernstein: model is in an L1 mode");
        const long long n = count(s, a);
        const prec_t p_hat =
            n == 0 ? 1.0 / n_outcomes_
                   : static_cast<prec_t>(count(s, a, y)) / static_cast<prec_t>(n);
        return radius_bernstein_element(p_hat, radius_s_, n_actions_, n_plus(s, a), delta_);
    }

    /// True iff the given true row lies inside the confidence region of
    /// (s,a) — used by diagnostics to verify optimism post hoc.
    bool contains(int s, int a, const prec_t* true_row) const {
        numvec p_hat(n_outcomes_);
        p_hat_row(s, a, p_hat.data());
        if (mode_ == ConfidenceMode::bernstein) {
            for (int y = 0; y < n_outcomes_; ++y)
                if (std::abs(true_row[y] - p_hat[y]) > radius_bernstein(s, a, y) + 1e-12)
                    return false;
            return true;
        }
        prec_t dist = 0;
        for (int y = 0; y < n_outcomes_; ++y) dist += std::abs(true_row[y] - p_hat[y]);
        return dist <= radius_l1(s, a) + 1e-12;
    }

private:
    std::size_t sa_index(int s, int a) const {
        assert(s >= 0 && s < n_rows_ && a >= 0 && a < n_actions_);
        return static_cast<std::size_t>(s) * n_actions_ + a;
    }
    std::size_t say_index(int s, int a, int y) const {
        assert(y >= 0 && y < n_outcomes_);
        return sa_index(s, a) * n_outcomes_ + y;
    }

    int n_rows_, n_actions_, n_outcomes_, radius_s_;
    prec_t delta_;
    ConfidenceMode mode_;
    cntvec n_sa_;
    cntvec n_say_;
};

// ------------------------------------------------------ stochastic costs ----

/// Closed interval of plausible costs.
struct CostInterval {
    prec_t lo;
    prec_t hi;
};

/// Empirical cost statistics for the unknown-cost extension. Planning uses
/// the interval's lower end (optimism in the costs). The plausible interval
/// is [c_hat - beta', c_hat + beta'] clipped to the declared [c_min, c_max],
/// with beta' = 2 sqrt(log(6 S A N+ / delta) / N+).
class CostModel {
public:
    CostModel(int n_states, int n_actions, prec_t c_min, prec_t c_max, prec_t delta)
        : n_states_(n_states), n_actions_(n_actions), c_min_(c_min), c_max_(c_max), delta_(delta),
          sums_(static_cast<std::size_t>(n_states) * n_actions, 0.0),
          counts_(static_cast<std::size_t>(n_states) * n_actions, 0) {
        if (!(c_min >= 0 && c_min <= c_max)) throw DataError("CostModel: bad cost range");
        if (!(delta > 0 && delta < 1)) throw DataError("CostModel: delta must lie in (0,1)");
    }

    /// Record one observed cost and return the updated plausible interval.
    CostInterval record(int s, int a, prec_t observed) {
        if (observed < c_min_ - 1e-12 || observed > c_max_ + 1e-12)
            throw DataError("CostModel: observed cost outside the declared range");
        const std::size_t i = index(s, a);
        sums_[i] += observed;
        ++counts_[i];
        return interval(s, a);
    }

    long long count(int s, int a) const { return counts_[index(s, a)]; }

    prec_t radius(int s, int a) const {
        const long long n_plus = std::max<long long>(1, count(s, a));
        return 2.0 * std::sqrt(std::log(6.0 * n_states_ * n_actions_ *
                                        static_cast<prec_t>(n_plus) / delta_) /
                               static_cast<prec_t>(n_plus));
    }

    CostInterval interval(int s, int a) const {
        const long long n = count(s, a);
        if (n == 0) return {c_min_, c_max_};
        const prec_t c_hat = sums_[index(s, a)] / static_cast<prec_t>(n);
        const prec_t beta = radius(s, a);
        return {std::max(c_min_, c_hat - beta), std::min(c_max_, c_hat + beta)};
    }

    /// Lower interval end: the cost the optimistic planner should use.
    prec_t optimistic_cost(int s, int a) const { return interval(s, a).lo; }

private:
    std::size_t index(int s, int a) const {
        assert(s >= 0 && s < n_states_ && a >= 0 && a < n_actions_);
        return static_cast<std::size_t>(s) * n_actions_ + a;
    }

    int n_states_, n_actions_;
    prec_t c_min_, c_max_, delta_;
    numvec sums_;
    cntvec counts_;
};

} // namespace ssplab
