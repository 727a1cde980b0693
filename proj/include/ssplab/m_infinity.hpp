// The M-infinity reduction for uniform-cost SSPs: the goal becomes an
// ordinary state with reward 1 whose every action teleports back to the
// start state, so minimizing the expected hitting time of the goal is the
// same problem as maximizing the long-run average reward (the gain), via
// the identity rho = 1 / (1 + E[tau(s0)]).
//
// The reduction keeps the SSP kernel bit-for-bit: a non-goal row of
// MInfinity::kernel is the same (S+1)-entry row the SspInstance stores, with
// the former implicit-goal column now addressing the explicit goal state.
#pragma once

#include "ssplab/chain.hpp"
#include "ssplab/instance.hpp"
#include "ssplab/solvers.hpp"

#include <algorithm>
#include <vector>

namespace ssplab {

/// Reward-based infinite-horizon MDP M_inf = <S', A, r_inf, p_inf, s0>.
/// States 0..n_states-2 are the SSP's non-goal states; the last index is the
/// goal, an ordinary state here. reward(s) = 1 exactly on the goal; every
/// goal action is a point mass on `start`.
struct MInfinity {
    int n_states = 0;  ///< S' = S + 1: every SSP state plus the goal
    int n_actions = 0;
    int start = 0;     ///< s0, the teleport target
    int goal = 0;      ///< index of the goal state (always n_states - 1)
    numvec kernel;     ///< flat S' x A x S': p_inf(y | s, a)

    prec_t reward(int s) const { return s == goal ? 1.0 : 0.0; }

    const prec_t* row(int s, int a) const {
        return kernel.data() + (static_cast<std::size_t>(s) * n_actions + a) * n_states;
    }
};

/// Builds M_inf from an SSP instance. Non-goal kernel rows are copied
/// verbatim (each SSP row already carries the goal column last); the goal
/// rows are point masses on the start state for every action.
inline MInfinity build_m_infinity(const SspInstance& inst) {
    MInfinity m;
    m.n_states = inst.n_states + 1;
    m.n_actions = inst.n_actions;
    m.start = inst.start;
    m.goal = inst.n_states;
    m.kernel.assign(static_cast<std::size_t>(m.n_states) * m.n_actions * m.n_states, 0.0);
    for (int s = 0; s < inst.n_states; ++s)
        for (int a = 0; a < inst.n_actions; ++a) {
            const prec_t* src = inst.row(s, a);
            prec_t* dst =
                m.kernel.data() + (static_cast<std::size_t>(s) * m.n_actions + a) * m.n_states;
            std::copy(src, src + m.n_states, dst);
        }
    for (int a = 0; a < m.n_actions; ++a)
        m.kernel[(static_cast<std::size_t>(m.goal) * m.n_actions + a) * m.n_states + m.start] =
            1.0;
    return m;
}

namespace detail {

/// Non-goal states reachable from `start` under `pol` before absorption,
/// following the support of the policy's rows.
inline std::vector<char> reachable_from_start(const MInfinity& m, const StationaryPolicy& pol) {
    const int S = m.n_states - 1;
    std::vector<char> seen(S, 0);
    std::vector<int> stack{m.start};
    seen[m.start] = 1;
    while (!stack.empty()) {
        const int s = stack.back();
        stack.pop_back();
        const prec_t* row = m.row(s, pol[s]);
        for (int y = 0; y < S; ++y)
            if (row[y] > 0 && !seen[y]) {
                seen[y] = 1;
                stack.push_back(y);
            }
    }
    return seen;
}

/// Non-goal states from which the goal is reachable under `pol` (fixpoint of
/// backward closure over the support graph).
inline std::vector<char> can_reach_goal(const MInfinity& m, const StationaryPolicy& pol) {
    const int S = m.n_states - 1;
    std::vector<char> can(S, 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < S; ++s) {
            if (can[s]) continue;
            const prec_t* row = m.row(s, pol[s]);
            bool hit = row[m.goal] > 0;
            for (int y = 0; y < S && !hit; ++y) hit = row[y] > 0 && can[y];
            if (hit) {
                can[s] = 1;
                changed = true;
            }
        }
    }
    return can;
}

} // namespace detail

/// Gain rho_pol(s0) of a stationary deterministic policy in M_inf:
/// 1 / (1 + E[tau_pol(s0)]) when absorption at the goal is almost sure from
/// the start, and 0 otherwise (if any state reachable from s0 under pol
/// cannot reach the goal, the chain eventually traps there and goal visits
/// stop, so the Cesaro average reward is 0 -- equivalently E[tau] = inf and
/// the identity still reads 0). The policy may have S or S+1 entries; a
/// goal-state action is irrelevant to the gain and is ignored.
inline prec_t stationary_gain(const MInfinity& m, const StationaryPolicy& pol) {
    const int S = m.n_states - 1;
    if (static_cast<int>(pol.size()) != S && static_cast<int>(pol.size()) != m.n_states)
        throw DataError("stationary_gain: policy must cover the non-goal states");
    for (int s = 0; s < S; ++s)
        if (pol[s] < 0 || pol[s] >= m.n_actions)
            throw DataError("stationary_gain: action out of range");

    const std::vector<char> reach = detail::reachable_from_start(m, pol);
    const std::vector<char> absorb = detail::can_reach_goal(m, pol);
    for (int s = 0; s < S; ++s)
        if (reach[s] && !absorb[s]) return 0.0;

    // Restrict the chain to the reachable set; absorption is almost sure
    // there, so the fundamental-matrix solve is well posed.
    std::vector<int> states;
    indvec local(S, -1);
    for (int s = 0; s < S; ++s)
        if (reach[s]) {
            local[s] = static_cast<int>(states.size());
            states.push_back(s);
        }
    const int n = static_cast<int>(states.size());
    numvec q(static_cast<std::size_t>(n) * n, 0.0), r(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const prec_t* row = m.row(states[i], pol[states[i]]);
        for (int y = 0; y < S; ++y)
            if (row[y] > 0) q[static_cast<std::size_t>(i) * n + local[y]] = row[y];
        r[i] = row[m.goal];
    }
    const ValueVector tau = expected_hitting_times(AbsorbingChain(n, std::move(q), std::move(r)));
    return 1.0 / (1.0 + tau[local[m.start]]);
}

/// Diameter D_inf = max_{s != s'} min_pi E[tau_pi(s -> s')] of M_inf, the
/// quantity UCRL2's general-MDP bound scales with. A diagnostic only: the
/// computation solves one unit-cost SSP per target state and is gated to
/// n_states <= 20. Returns INFTY when some ordered pair is unreachable.
inline prec_t diameter_m_infinity(const MInfinity& m) {
    if (m.n_states > 20)
        throw DataError("diameter_m_infinity: diagnostic is gated to at most 20 states");
    const int Sp = m.n_states;
    const int A = m.n_actions;
    prec_t best = 0;
    for (int target = 0; target < Sp; ++target) {
        // Graph reachability first: if some state cannot reach the target
        // under any policy, that pair's hitting time is infinite.
        std::vector<char> can(Sp, 0);
        can[target] = 1;
        bool changed = true;
        while (changed) {
            changed = false;
            for (int s = 0; s < Sp; ++s) {
                if (can[s]) continue;
                bool hit = false;
                for (int a = 0; a < A && !hit; ++a) {
                    const prec_t* row = m.row(s, a);
                    for (int y = 0; y < Sp && !hit; ++y) hit = row[y] > 0 && can[y];
                }
                if (hit) {
                    can[s] = 1;
                    changed = true;
                }
            }
        }
        for (int s = 0; s < Sp; ++s)
            if (!can[s]) return INFTY;

        // Unit-cost SSP over the remaining states with `target` as the goal.
        const int n = Sp - 1;
        indvec local(Sp, -1);
        for (int s = 0, i = 0; s < Sp; ++s)
            if (s != target) local[s] = i++;
        numvec costs(static_cast<std::size_t>(n) * A, 1.0);
        numvec kernel(static_cast<std::size_t>(n) * A * (n + 1), 0.0);
        for (int s = 0; s < Sp; ++s) {
            if (s == target) continue;
            for (int a = 0; a < A; ++a) {
                const prec_t* row = m.row(s, a);
                prec_t* dst = kernel.data() +
                              (static_cast<std::size_t>(local[s]) * A + a) * (n + 1);
                for (int y = 0; y < Sp; ++y)
                    dst[y == target ? n : local[y]] += row[y];
            }
        }
        const ViResult vi = exact_value_iteration(
            SspInstance(n, A, 0, 1.0, 1.0, std::move(costs), std::move(kernel)));
        best = std::max(best, max_of(vi.v));
    }
    return best;
}

} // namespace ssplab
