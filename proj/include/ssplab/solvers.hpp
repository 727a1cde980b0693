// Exact planning oracles on a known SSP instance: optimal value iteration,
// truncated (finite-penalty) value iteration, policy evaluation, and instance
// validation including the SSP-diameter.
#pragma once

#include "ssplab/chain.hpp"
#include "ssplab/instance.hpp"

namespace ssplab {

/// Default sup-norm residual tolerance of all exact solvers.
constexpr prec_t VI_TOL = 1e-10;
/// Default iteration cap of all exact solvers.
constexpr long VI_MAX_ITER = 1'000'000;
/// Values above this threshold declare divergence (goal unreachable).
constexpr prec_t VI_DIVERGENCE_THRESHOLD = 1e9;

/// Result of a value-iteration solve. `v` satisfies ||L v - v||_inf <= tol
/// (the final residual is reported); `policy` is greedy for `v` under the
/// same operator, ties broken by lowest action index.
struct ViResult {
    ValueVector v;
    StationaryPolicy policy;
    long iterations = 0;
    prec_t residual = 0;
    bool degenerate_cap = false; ///< truncated solve with J = 0
};

namespace detail {

/// Shared VI loop. Iterates v <- min(cap, min_a [costs(s,a) + offset + p.v])
/// from v = 0 (or `v0` when given) until the sup-norm residual drops to tol.
/// Throws DivergenceError when values blow past VI_DIVERGENCE_THRESHOLD or
/// the iteration cap is hit before the tolerance, unless `infinity_ok` is
/// set, in which case the partial result is returned with residual as
/// achieved.
inline ViResult vi_loop(const SspInstance& inst, const numvec& costs, prec_t cost_offset,
                        prec_t cap, prec_t tol, long max_iter, bool infinity_ok = false,
                        const ValueVector* v0 = nullptr) {
    const int S = inst.n_states;
    const int A = inst.n_actions;
    if (v0 && static_cast<int>(v0->size()) != S)
        throw DataError("vi_loop: initial vector has wrong length");
    ValueVector v = v0 ? *v0 : ValueVector(S, 0.0);
    ValueVector v_next(S, 0.0);
    prec_t resid = INFTY;
    long it = 0;
    for (; it < max_iter; ++it) {
        for (int s = 0; s < S; ++s) {
            prec_t best = INFTY;
            for (int a = 0; a < A; ++a) {
                const prec_t* row = inst.row(s, a);
                prec_t acc = 0;
                for (int y = 0; y < S; ++y) acc += row[y] * v[y];
                const prec_t val = costs[static_cast<std::size_t>(s) * A + a] + cost_offset + acc;
                if (val < best) best = val;
            }
            v_next[s] = std::min(cap, best);
        }
        resid = sup_dist(v_next, v);
        if (resid <= tol) {
            // Return the pre-image iterate: ||L v - v||_inf = resid <= tol.
            break;
        }
        if (max_of(v_next) > VI_DIVERGENCE_THRESHOLD) {
            if (infinity_ok) { v.swap(v_next); break; }
            throw DivergenceError("value iteration diverged: goal appears unreachable",
                                  sup_dist_argmax(v_next, v));
        }
        v.swap(v_next);
    }
    if (resid > tol && max_of(v) <= VI_DIVERGENCE_THRESHOLD) {
        if (!infinity_ok)
            throw DivergenceError("value iteration failed to reach tolerance " +
                                      std::to_string(tol) + " within " + std::to_string(max_iter) +
                                      " iterations",
                                  sup_dist_argmax(v_next, v));
    }

    // Greedy extraction with respect to the returned v; lowest action index
    // wins ties (strict improvement required to switch).
    ViResult out;
    out.policy.assign(S, 0);
    for (int s = 0; s < S; ++s) {
        prec_t best = INFTY;
        int best_a = 0;
        for (int a = 0; a < A; ++a) {
            const prec_t* row = inst.row(s, a);
            prec_t acc = 0;
            for (int y = 0; y < S; ++y) acc += row[y] * v[y];
            const prec_t val = costs[static_cast<std::size_t>(s) * A + a] + cost_offset + acc;
            if (val < best) { best = val; best_a = a; }
        }
        out.policy[s] = best_a;
    }
    out.v = std::move(v);
    out.iterations = it;
    out.residual = resid;
    return out;
}

} // namespace detail

/// Optimal value iteration: fixed point of L V(s) = min_a {c(s,a) + p.V}.
/// `cost_offset` adds a uniform perturbation to every cost (used for
/// cost-offset experiments); the default 0 is the plain operator. When
/// c_min = 0 the iteration from below can stall at a sub-optimal fixed
/// point of L inside zero-cost loops; use best_proper_value_iteration for
/// the optimal-proper-policy value in that regime.
inline ViResult exact_value_iteration(const SspInstance& inst, prec_t tol = VI_TOL,
                                      long max_iter = VI_MAX_ITER, prec_t cost_offset = 0.0) {
    return detail::vi_loop(inst, inst.costs, cost_offset, INFTY, tol, max_iter);
}

/// Truncated (finite-penalty) value iteration: fixed point of
/// L_J V(s) = min{J, min_a [c(s,a) + p.V]}. All returned values are <= J.
/// J = 0 yields the all-zero vector and sets degenerate_cap.
inline ViResult truncated_value_iteration(const SspInstance& inst, prec_t J, prec_t tol = VI_TOL,
                                          long max_iter = VI_MAX_ITER) {
    if (J < 0) throw DataError("truncated_value_iteration: penalty cap J must be >= 0");
    ViResult out = detail::vi_loop(inst, inst.costs, 0.0, J, tol, max_iter);
    out.degenerate_cap = (J == 0);
    return out;
}

/// Exact value of a fixed policy: V^pi = (I - Q_pi)^{-1} c_pi via a dense
/// solve. Throws ImproperPolicyError when pi is not proper.
inline ValueVector evaluate_policy(const SspInstance& inst, const StationaryPolicy& pol) {
    const AbsorbingChain chain = chain_of(inst, pol);
    auto lu = detail::fundamental_lu(chain);
    Eigen::VectorXd c(inst.n_states);
    for (int s = 0; s < inst.n_states; ++s) c(s) = inst.c(s, pol[s]);
    Eigen::VectorXd x = lu.solve(c);
    return ValueVector(x.data(), x.data() + inst.n_states);
}

/// Value of the best PROPER policy, exact even when zero costs admit free
/// loops. With nonnegative costs the optimal proper value is the largest
/// fixed point of the Bellman operator L, and monotone iteration from above
/// reaches it: starting from v0 = V^pi of a proper policy pi (here the
/// min-hitting-time policy), L v0 <= v0 by policy improvement, so the
/// iterates decrease; each iterate dominates the optimal proper value
/// because L is monotone and fixes it; and the limit is a fixed point of L,
/// hence no larger than the optimal proper value (iterate any proper policy
/// from a fixed point). When c_min > 0 every improper policy has infinite
/// cost and plain VI already computes the same value, so it is returned
/// directly. Throws DataError when no proper policy exists.
inline ViResult best_proper_value_iteration(const SspInstance& inst, prec_t tol = VI_TOL,
                                            long max_iter = VI_MAX_ITER) {
    if (inst.c_min > 0) return exact_value_iteration(inst, tol, max_iter);
    const numvec unit_costs(static_cast<std::size_t>(inst.n_states) * inst.n_actions, 1.0);
    ViResult hit;
    try {
        hit = detail::vi_loop(inst, unit_costs, 0.0, INFTY, tol, max_iter);
    } catch (const DivergenceError&) {
        throw DataError("best_proper_value_iteration: no proper policy reaches the goal");
    }
    const ValueVector upper = evaluate_policy(inst, hit.policy);
    return detail::vi_loop(inst, inst.costs, 0.0, INFTY, tol, max_iter,
                           /*infinity_ok=*/false, &upper);
}

/// Validates probabilistic invariants and computes the SSP-diameter
/// D = max_s min_pi E[tau_pi(s)] by uniform-cost value iteration. D is
/// declared infinite when the min-hitting-time values exceed 1e9 or the VI
/// fails to contract within the iteration budget.
inline ValidationReport validate_instance(const SspInstance& inst, prec_t tol = VI_TOL,
                                          long max_iter = VI_MAX_ITER) {
    ValidationReport rep;
    for (int s = 0; s < inst.n_states; ++s) {
        for (int a = 0; a < inst.n_actions; ++a) {
            const prec_t* row = inst.row(s, a);
            prec_t sum = 0, min_entry = 0;
            for (int y = 0; y <= inst.n_states; ++y) {
                sum += row[y];
                min_entry = std::min(min_entry, row[y]);
            }
            if (std::abs(sum - 1.0) > ROW_SUM_TOL) rep.row_sum_violations.push_back({s, a, sum});
            if (min_entry < 0) rep.negative_prob_violations.push_back({s, a, min_entry});
            const prec_t c = inst.c(s, a);
            if (c < inst.c_min || c > inst.c_max) rep.cost_range_violations.push_back({s, a, c});
        }
    }

    // Min expected hitting time via unit-cost VI; divergence marks D = inf.
    const numvec unit_costs(static_cast<std::size_t>(inst.n_states) * inst.n_actions, 1.0);
    ViResult hit = detail::vi_loop(inst, unit_costs, 0.0, INFTY, tol, max_iter,
                                   /*infinity_ok=*/true);
    if (hit.residual <= tol && max_of(hit.v) <= VI_DIVERGENCE_THRESHOLD) {
        rep.ssp_diameter = max_of(hit.v);
        rep.ssp_communicating = true;
    } else {
        rep.ssp_diameter = INFTY;
        rep.ssp_communicating = false;
    }
    return rep;
}

} // namespace ssplab
