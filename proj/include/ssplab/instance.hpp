// SSP MDP data model: instances, policies, validation report types.
//
// An SSP instance stores only the non-goal states. The absorbing, cost-free
// goal is implicit: kernel rows have length n_states+1 and the last column is
// the probability of transitioning to the goal. This makes the "goal is
// absorbing and cost-free" structure unviolable by construction.
#pragma once

#include "ssplab/common.hpp"

#include <utility>

namespace ssplab {

/// Deterministic stationary policy: one action index per non-goal state.
using StationaryPolicy = indvec;

/// Value vector over non-goal states (goal value implicitly 0). Holds
/// cumulative expected costs, or expected hitting times when costs are 1.
using ValueVector = numvec;

/// A finite SSP MDP \<S', A, c, p, s0\> with implicit absorbing goal.
///
/// Layout (row-major, flat):
///   costs[s*n_actions + a]                      cost c(s,a)
///   kernel[(s*n_actions + a)*(n_states+1) + y]  probability p(y|s,a),
///                                               y == n_states means goal.
struct SspInstance {
    int n_states = 0;  ///< number of non-goal states S
    int n_actions = 0; ///< number of actions A
    int start = 0;     ///< initial state s0
    prec_t c_min = 0;  ///< declared lower cost bound
    prec_t c_max = 0;  ///< declared upper cost bound
    numvec costs;      ///< S*A entries
    numvec kernel;     ///< S*A*(S+1) entries

    SspInstance() = default;

    /// Construction checks shapes and declared ranges; probabilistic
    /// invariants (row sums, cost range membership) are validate_instance's
    /// job and are reported rather than thrown.
    SspInstance(int n_states_, int n_actions_, int start_, prec_t c_min_, prec_t c_max_,
                numvec costs_, numvec kernel_)
        : n_states(n_states_), n_actions(n_actions_), start(start_), c_min(c_min_),
          c_max(c_max_), costs(std::move(costs_)), kernel(std::move(kernel_)) {
        if (n_states < 1 || n_actions < 1)
            throw DataError("SspInstance: need at least one state and one action");
        if (start < 0 || start >= n_states)
            throw DataError("SspInstance: start state " + std::to_string(start) +
                            " out of range [0," + std::to_string(n_states) + ")");
        if (!(c_min >= 0) || !(c_min <= c_max))
            throw DataError("SspInstance: cost bounds must satisfy 0 <= c_min <= c_max");
        const std::size_t nc = static_cast<std::size_t>(n_states) * n_actions;
        if (costs.size() != nc)
            throw DataError("SspInstance: costs has " + std::to_string(costs.size()) +
                            " entries, expected " + std::to_string(nc));
        if (kernel.size() != nc * (n_states + 1))
            throw DataError("SspInstance: kernel has " + std::to_string(kernel.size()) +
                            " entries, expected " + std::to_string(nc * (n_states + 1)));
    }

    /// Column index of the implicit goal in kernel rows.
    int goal() const { return n_states; }

    prec_t c(int s, int a) const { return costs[static_cast<std::size_t>(s) * n_actions + a]; }

    /// Pointer to the probability row p(.|s,a) of length n_states+1.
    const prec_t* row(int s, int a) const {
        return kernel.data() + (static_cast<std::size_t>(s) * n_actions + a) * (n_states + 1);
    }

    prec_t p(int s, int a, int y) const { return row(s, a)[y]; }
};

/// True iff pol assigns a valid action to every non-goal state of inst.
inline bool is_valid_policy(const SspInstance& inst, const StationaryPolicy& pol) {
    if (static_cast<int>(pol.size()) != inst.n_states) return false;
    for (int a : pol)
        if (a < 0 || a >= inst.n_actions) return false;
    return true;
}

struct RowSumViolation {
    int state;
    int action;
    prec_t sum; ///< actual row sum
};

struct NegativeProbViolation {
    int state;
    int action;
    prec_t min_entry; ///< most negative entry of the row
};

struct CostRangeViolation {
    int state;
    int action;
    prec_t cost; ///< offending cost value
};

/// Report produced by validate_instance. ssp_communicating is true iff
/// ssp_diameter is finite.
struct ValidationReport {
    std::vector<RowSumViolation> row_sum_violations;
    std::vector<NegativeProbViolation> negative_prob_violations;
    std::vector<CostRangeViolation> cost_range_violations;
    bool ssp_communicating = false;
    prec_t ssp_diameter = INFTY; ///< D = max_s min_pi E[tau_pi(s)]

    /// No structural invariant violations (communication is reported, not
    /// judged: a valid instance may still have infinite diameter).
    bool ok() const {
        return row_sum_violations.empty() && negative_prob_violations.empty() &&
               cost_range_violations.empty();
    }
};

} // namespace ssplab
