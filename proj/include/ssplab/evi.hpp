// EVI_SSP: extended value iteration over a confidence model, plus the pivot
// horizon of the resulting optimistic chain.
//
// The extended optimal Bellman operator is
//   L~ v(s) = min_a [ c(s,a) + min_{p in B(s,a)} <p, v> ]
// optionally capped at J (truncated mode) or with every cost shifted by eta
// (perturbed mode). Iteration starts from v0 = 0 and stops at the first m
// with ||v_{m+1} - v_m||_inf <= epsilon; the PRE-IMAGE v_m is returned, which
// guarantees L~ v~ <= v~ + epsilon componentwise.
#pragma once

#include "ssplab/chain.hpp"
#include "ssplab/confidence.hpp"
#include "ssplab/inner_min.hpp"
#include "ssplab/instance.hpp"

#include <algorithm>
#include <cmath>

namespace ssplab {

/// Variant of the extended operator applied by evi_ssp.
struct OperatorMode {
    enum class Kind { plain, truncated, perturbed };
    Kind kind = Kind::plain;
    prec_t param = 0; ///< J for truncated, eta for perturbed

    static OperatorMode plain() { return {Kind::plain, 0}; }
    static OperatorMode truncated(prec_t J) {
        if (!(J > 0)) throw DataError("OperatorMode::truncated: J must be positive");
        return {Kind::truncated, J};
    }
    static OperatorMode perturbed(prec_t eta) {
        if (!(eta > 0)) throw DataError("OperatorMode::perturbed: eta must be positive");
        return {Kind::perturbed, eta};
    }
};

constexpr long EVI_SWEEP_CAP = 10'000'000;
constexpr long PIVOT_H_MAX = 1'000'000;

/// Output of one optimistic planning call.
struct PlanResult {
    ValueVector v_tilde;     ///< pre-image iterate: L~ v~ <= v~ + epsilon
    StationaryPolicy policy; ///< greedy for v_tilde under the extended operator
    numvec p_opt;            ///< optimistic row per state, flat S x (S+1)
    AbsorbingChain q_tilde;  ///< chain of (policy, p_opt)
    long pivot_h = 2;        ///< attempt horizon from the pivot rule
    bool pivot_capped = false;
    long iterations = 0;     ///< operator sweeps performed
    prec_t stop_gap = 0;     ///< max_s (L~ v~(s) - v~(s)), the Lemma-4 residual
};

/// Pivot horizon H = min{ n > 1 : ||Q~^{n-1}||_inf <= gamma }, by repeated
/// vector products v <- Q~ v from v = 1 (||Q^n||_inf is non-increasing in n
/// for substochastic Q, so the first hit is the minimum). Returns {H, capped}.
/// gamma = 1 is allowed (the attempt-index schedule 1/sqrt(G) produces it on
/// the first failure) and yields H = 2 since ||Q|| <= 1 always.
inline std::pair<long, bool> pivot_horizon(const AbsorbingChain& q_tilde, prec_t gamma,
                                           long h_max = PIVOT_H_MAX) {
    if (!(gamma > 0 && gamma <= 1)) throw DataError("pivot_horizon: gamma must lie in (0,1]");
    numvec v(q_tilde.n, 1.0), scratch;
    for (long i = 1; i + 1 <= h_max; ++i) {
        q_tilde.apply_q(v, scratch);
        if (max_of(v) <= gamma) return {i + 1, false};
    }
    return {h_max, true};
}

namespace detail {

/// Cached per-(s,a) view of the confidence model, fixed for one planning
/// call: empirical rows and radii do not change while planning.
struct FrozenBeliefs {
    int S, A, O;
    ConfidenceMode mode;
    numvec p_hat;    // S*A*O
    numvec l1_beta;  // S*A      (L1 modes)
    numvec box_beta; // S*A*O    (Bernstein mode)

    explicit FrozenBeliefs(const ConfidenceModel& model)
        : S(model.n_rows()), A(model.n_actions()), O(model.n_outcomes()), mode(model.mode()),
          p_hat(static_cast<std::size_t>(S) * A * O) {
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                model.p_hat_row(s, a, p_hat.data() + (static_cast<std::size_t>(s) * A + a) * O);
        if (mode == ConfidenceMode::bernstein) {
            box_beta.resize(p_hat.size());
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a)
                    for (int y = 0; y < O; ++y)
                        box_beta[(static_cast<std::size_t>(s) * A + a) * O + y] =
                            model.radius_bernstein(s, a, y);
        } else {
            l1_beta.resize(static_cast<std::size_t>(S) * A);
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a)
                    l1_beta[static_cast<std::size_t>(s) * A + a] = model.radius_l1(s, a);
        }
    }

    const prec_t* row(int s, int a) const {
        return p_hat.data() + (static_cast<std::size_t>(s) * A + a) * O;
    }

    /// Exact inner minimum of <p, v_ext> over the plausible set of (s,a);
    /// optimizer written into out[0..O).
    prec_t inner_min(int s, int a, const prec_t* v_ext, const indvec& order, prec_t* out) const {
        if (mode == ConfidenceMode::bernstein)
            return inner_min_box(row(s, a), box_beta.data() + (static_cast<std::size_t>(s) * A + a) * O,
                                 O, v_ext, order, out);
        return inner_min_l1(row(s, a), O, l1_beta[static_cast<std::size_t>(s) * A + a], v_ext,
                            order, out);
    }
};

} // namespace detail

/// Extended value iteration. `costs` holds the per-(s,a) planning costs (the
/// observed cost table, all ones for a hitting-time plan, or optimistic cost
/// lower bounds); `gamma` in (0,1) sets the pivot-horizon target for the
/// returned optimistic chain. Throws DivergenceError (naming the slowest
/// state) if the stopping rule is not met within `sweep_cap` sweeps — with
/// zero plausible costs and plain mode that signals a non-proper optimistic
/// model rather than a numeric issue.
inline PlanResult evi_ssp(const ConfidenceModel& model, const numvec& costs, prec_t epsilon,
                          OperatorMode op, prec_t gamma, long h_max = PIVOT_H_MAX,
                          long sweep_cap = EVI_SWEEP_CAP) {
    const int S = model.n_rows();
    const int A = model.n_actions();
    const int O = model.n_outcomes();
    if (O != S + 1)
        throw DataError("evi_ssp: model must have S+1 outcome columns (implicit goal)");
    if (!(epsilon > 0)) throw DataError("evi_ssp: epsilon must be positive");
    if (costs.size() != static_cast<std::size_t>(S) * A)
        throw DataError("evi_ssp: costs size mismatch");

    const detail::FrozenBeliefs beliefs(model);
    const prec_t offset = op.kind == OperatorMode::Kind::perturbed ? op.param : 0.0;
    const prec_t cap = op.kind == OperatorMode::Kind::truncated ? op.param : INFTY;

    // v_ext carries the goal value 0 at index S throughout.
    numvec v_ext(S + 1, 0.0), v_next(S + 1, 0.0);
    numvec scratch(O);
    indvec order;

    // One operator sweep: v_next = L~ v_ext. With `extract`, also store the
    // greedy policy and minimizing rows.
    StationaryPolicy policy(S, 0);
    numvec p_opt(static_cast<std::size_t>(S) * O, 0.0);
    auto sweep = [&](bool extract) {
        preference_order_min(v_ext.data(), S + 1, order);
        for (int s = 0; s < S; ++s) {
            prec_t best = INFTY;
            int best_a = 0;
            for (int a = 0; a < A; ++a) {
                const prec_t q = costs[static_cast<std::size_t>(s) * A + a] + offset +
                                 beliefs.inner_min(s, a, v_ext.data(), order, scratch.data());
                if (q < best) {
                    best = q;
                    best_a = a;
                    if (extract)
                        std::copy(scratch.begin(), scratch.end(),
                                  p_opt.begin() + static_cast<std::size_t>(s) * O);
                }
            }
            if (best > cap) {
                best = cap;
                // The cap is a virtual "give up" value, not an action; the
                // greedy action remains the best real one.
            }
            v_next[s] = best;
            if (extract) policy[s] = best_a;
        }
        v_next[S] = 0.0;
    };

    long m = 0;
    prec_t residual = INFTY;
    while (true) {
        sweep(false);
        residual = sup_dist(v_next, v_ext);
        if (residual <= epsilon) break; // output the pre-image v_ext
        v_ext.swap(v_next);
        if (++m >= sweep_cap) {
            const int worst = sup_dist_argmax(v_next, v_ext);
            throw DivergenceError("evi_ssp: stopping rule not met within sweep cap", worst);
        }
    }

    // Extraction sweep from the pre-image: records the greedy policy and its
    // optimistic rows, and re-measures the stop gap max_s (L~ v~ - v~).
    sweep(true);
    prec_t gap = 0;
    for (int s = 0; s < S; ++s) gap = std::max(gap, v_next[s] - v_ext[s]);

    numvec q(static_cast<std::size_t>(S) * S), r(S);
    for (int s = 0; s < S; ++s) {
        const prec_t* row = p_opt.data() + static_cast<std::size_t>(s) * O;
        for (int y = 0; y < S; ++y) q[static_cast<std::size_t>(s) * S + y] = row[y];
        r[s] = row[S];
    }

    PlanResult result;
    result.v_tilde.assign(v_ext.begin(), v_ext.begin() + S);
    result.policy = std::move(policy);
    result.p_opt = std::move(p_opt);
    result.q_tilde = AbsorbingChain(S, std::move(q), std::move(r));
    const auto [h, capped] = pivot_horizon(result.q_tilde, gamma, h_max);
    result.pivot_h = h;
    result.pivot_capped = capped;
    result.iterations = m + 2; // counted sweeps including the extraction pass
    result.stop_gap = gap;
    return result;
}

} // namespace ssplab
