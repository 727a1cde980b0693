// Exact inner optimizations over plausible transition rows.
//
// Both routines return the exact extreme point of a linear objective <p, v>
// over the plausible set intersected with the simplex:
//   L1 ball    — classic sort-and-shift: move up to beta/2 of probability
//                mass onto the most favorable outcome, draining the least
//                favorable outcomes first.
//   Bernstein  — per-element box [max(0, p-b), min(1, p+b)]: start every
//                outcome at its lower bound and spend the remaining mass
//                greedily in preference order.
#pragma once

#include "ssplab/common.hpp"

#include <algorithm>
#include <numeric>

namespace ssplab {

/// Sorts outcome indices so that order[0] is the most preferred destination
/// for probability mass. Minimization prefers ascending value; ties break to
/// the lowest index (the stable preference the planner documents).
inline void preference_order_min(const prec_t* v, int n, indvec& order) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (v[a] != v[b]) return v[a] < v[b];
        return a < b;
    });
}

/// Preference order for maximization: descending value, ties to the lowest
/// index. order.back() (drained first) is then the lowest-value outcome.
inline void preference_order_max(const prec_t* v, int n, indvec& order) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (v[a] != v[b]) return v[a] > v[b];
        return a < b;
    });
}

/// Exact extreme point of the L1 ball {p : ||p - p_hat||_1 <= beta} cap the
/// simplex: shifts mass toward order[0], taking it from the back of `order`
/// forward. Writes the optimizer into out[0..n).
inline void shift_mass_l1(const prec_t* p_hat, int n, prec_t beta, const indvec& order,
                          prec_t* out) {
    std::copy(p_hat, p_hat + n, out);
    const int best = order[0];
    const prec_t add = std::min(beta / 2, 1.0 - out[best]);
    if (add <= 0) return;
    out[best] += add;
    prec_t remaining = add;
    for (int i = n - 1; i > 0 && remaining > 0; --i) {
        const int y = order[i];
        const prec_t take = std::min(out[y], remaining);
        out[y] -= take;
        remaining -= take;
    }
}

/// Exact minimizer of <p, v> over the L1 ball around p_hat (cap simplex).
/// `order` must be preference_order_min(v). Returns the objective.
inline prec_t inner_min_l1(const prec_t* p_hat, int n, prec_t beta, const prec_t* v,
                           const indvec& order, prec_t* out) {
    shift_mass_l1(p_hat, n, beta, order, out);
    prec_t obj = 0;
    for (int y = 0; y < n; ++y) obj += out[y] * v[y];
    return obj;
}

/// Exact maximizer of <p, v> over the L1 ball around p_hat (cap simplex).
/// `order` must be preference_order_max(v). Returns the objective.
inline prec_t inner_max_l1(const prec_t* p_hat, int n, prec_t beta, const prec_t* v,
                           const indvec& order, prec_t* out) {
    shift_mass_l1(p_hat, n, beta, order, out);
    prec_t obj = 0;
    for (int y = 0; y < n; ++y) obj += out[y] * v[y];
    return obj;
}

/// Exact minimizer of <p, v> over the per-element box
/// [max(0, p_hat - radii), min(1, p_hat + radii)] cap the simplex, by greedy
/// fill from the lower bounds in preference order. `order` must be
/// preference_order_min(v). Throws DataError when the box cannot reach total
/// mass 1 (sum of upper bounds < 1). Returns the objective.
inline prec_t inner_min_box(const prec_t* p_hat, const prec_t* radii, int n, const prec_t* v,
                            const indvec& order, prec_t* out) {
    prec_t lower_total = 0;
    for (int y = 0; y < n; ++y) {
        out[y] = std::max(0.0, p_hat[y] - radii[y]);
        lower_total += out[y];
    }
    prec_t slack = 1.0 - lower_total;
    for (int i = 0; i < n && slack > 0; ++i) {
        const int y = order[i];
        const prec_t cap = std::min(1.0, p_hat[y] + radii[y]);
        const prec_t give = std::min(cap - out[y], slack);
        out[y] += give;
        slack -= give;
    }
    if (slack > 1e-9)
        throw DataError("inner_min_box: infeasible box (upper bounds sum below 1)");
    prec_t obj = 0;
    for (int y = 0; y < n; ++y) obj += out[y] * v[y];
    return obj;
}

} // namespace ssplab
