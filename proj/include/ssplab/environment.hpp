// Sample-only environment interface for learners.
//
// Learners never see the kernel: they may read the static problem facts
// (state/action counts, start state, declared cost range, and — costs being
// known in the standard setting — the cost table), call reset(), and call
// step(). Transition draws consume the ENV_TRANSITIONS stream in step order;
// stochastic-cost mode consumes one extra COST_NOISE draw per step.
#pragma once

#include "ssplab/instance.hpp"
#include "ssplab/rng.hpp"

namespace ssplab {

struct StepResult {
    int next_state;    ///< next non-goal state index, or n_states for the goal
    prec_t cost;       ///< observed cost of the executed (s,a)
    bool reached_goal; ///< next_state == goal
};

class Environment {
public:
    /// `stochastic_costs` replaces the deterministic cost observation c(s,a)
    /// by a draw from Uniform[c - w, c + w], w = min(c - c_min, c_max - c):
    /// symmetric (hence unbiased for c(s,a)) with support inside the declared
    /// range; degenerates to the deterministic observation at the bounds.
    Environment(SspInstance inst, std::uint64_t seed, bool stochastic_costs = false)
        : inst_(std::move(inst)), transitions_(Rng(seed).child(stream::ENV_TRANSITIONS)),
          cost_noise_(Rng(seed).child(stream::COST_NOISE)),
          stochastic_costs_(stochastic_costs), state_(inst_.start) {}

    // --- static problem facts visible to learners --------------------------
    int n_states() const { return inst_.n_states; }
    int n_actions() const { return inst_.n_actions; }
    int start() const { return inst_.start; }
    int goal() const { return inst_.n_states; }
    prec_t c_min() const { return inst_.c_min; }
    prec_t c_max() const { return inst_.c_max; }
    /// Known cost table (standard setting). Stochastic-cost learners must
    /// ignore this and learn from observations instead.
    const numvec& known_costs() const { return inst_.costs; }
    bool stochastic_costs() const { return stochastic_costs_; }

    // --- interaction --------------------------------------------------------
    int current_state() const { return state_; }
    bool at_goal() const { return state_ == inst_.n_states; }

    /// Begin an episode at s0.
    int reset() {
        state_ = inst_.start;
        return state_;
    }

    /// Execute `action` from the current (non-goal) state.
    StepResult step(int action) {
        if (at_goal()) throw DataError("Environment::step: cannot step from the goal");
        if (action < 0 || action >= inst_.n_actions)
            throw DataError("Environment::step: invalid action");
        const int s = state_;
        const int y = transitions_.categorical(inst_.row(s, action), inst_.n_states + 1);
        prec_t cost = inst_.c(s, action);
        if (stochastic_costs_) {
            const prec_t w = std::min(cost - inst_.c_min, inst_.c_max - cost);
            // Draw consumed even when w == 0 to keep the stream layout fixed.
            const prec_t u = cost_noise_.uniform();
            cost += w * (2.0 * u - 1.0);
        }
        state_ = y;
        return StepResult{y, cost, y == inst_.n_states};
    }

    /// The wrapped instance; for harness/oracle use only, not for learners.
    const SspInstance& instance() const { return inst_; }

private:
    SspInstance inst_;
    Rng transitions_;
    Rng cost_noise_;
    bool stochastic_costs_;
    int state_;
};

} // namespace ssplab
