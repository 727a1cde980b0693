// Infinite-horizon baselines run against the UC-SSP agent:
//
//   run_ucrl2           Standard UCRL2 executed on the M-infinity reduction
//                       of a uniform-cost SSP: doubling epochs, extended
//                       value iteration with span-seminorm stopping, known
//                       rewards (the indicator of the goal), and the same L1
//                       confidence sets the optimistic planner uses. The
//                       SSP-regret of the run equals T_K - (V*(s0) + 1) K,
//                       where T_K counts the teleport step the goal state
//                       takes at the end of each episode.
//
//   run_ucrl_ssp_style  A doubling-epoch SSP-planning baseline: plans with
//                       EVI_SSP under per-element Bernstein confidence sets
//                       (or, as a toggle, the two-step "pessimistic kernel
//                       then plain value iteration" construction), with an
//                       optional pivot-horizon stopping rule that ends an
//                       epoch after the planned horizon's worth of steps.
//                       Zero costs can be floored for planning only; the
//                       regret is always measured on the true costs paid.
//
// Both baselines fill the same RunRecord the agent produces; attempt logs
// stay empty and per-epoch telemetry goes to RunRecord::epochs.
#pragma once

#include "ssplab/agent.hpp"
#include "ssplab/m_infinity.hpp"

#include <algorithm>
#include <cmath>

namespace ssplab {

// -------------------------------------------------------------- configs ----

struct Ucrl2Config {
    prec_t delta = 0.1;
    ConfidenceMode mode = ConfidenceMode::l1_theoretical; ///< an L1 mode; Bernstein is rejected
    std::uint64_t seed = 0;
    long evi_sweep_cap = 1'000'000; ///< extended-VI safety cap per plan

    void validate() const {
        if (!(delta > 0 && delta < 1)) throw DataError("Ucrl2Config: delta must be in (0,1)");
        if (mode == ConfidenceMode::bernstein)
            throw DataError("Ucrl2Config: UCRL2 runs with the L1 confidence sets");
        if (evi_sweep_cap < 1) throw DataError("Ucrl2Config: sweep cap must be positive");
    }
};

struct UcrlSspConfig {
    prec_t delta = 0.1;
    std::uint64_t seed = 0;
    bool use_pivot_horizon = false; ///< additionally end an epoch after pivot_h steps
    prec_t cost_floor = 0;          ///< planning cost for zero-cost pairs (true costs
                                    ///< are untouched; positive costs never change)
    bool two_step_planning = false; ///< optimistic kernel + plain VI instead of EVI_SSP
    bool replan_on_goal = false;    ///< extra planning trigger at every episode start

    void validate() const {
        if (!(delta > 0 && delta < 1)) throw DataError("UcrlSspConfig: delta must be in (0,1)");
        if (cost_floor < 0) throw DataError("UcrlSspConfig: cost floor must be >= 0");
    }
};

// -------------------------------------------------- extended VI (average) ----

namespace detail {

/// Result of average-reward extended value iteration on M_inf.
struct AvgEviResult {
    numvec u;                ///< final iterate (translated toward 0 each sweep)
    StationaryPolicy policy; ///< greedy actions of the stopping sweep, ties low
    long sweeps = 0;
    prec_t span_gap = 0;     ///< span(u_{i+1} - u_i) at stopping
};

/// Optimistic average-reward value iteration with span-seminorm stopping:
///   u_{i+1}(s) = r(s) + max_a max_{p in L1 ball(s,a)} <p, u_i>,
/// stop when span(u_{i+1} - u_i) <= tol. Rewards are known (indicator of the
/// goal), so only the kernel is optimistic. The iterate is translated by its
/// minimum every sweep, which changes neither the span of the difference nor
/// the greedy actions but keeps the growing values bounded.
inline AvgEviResult extended_vi_average(const MInfinity& m, const ConfidenceModel& model,
                                        prec_t tol, long sweep_cap = 1'000'000) {
    const int Sp = m.n_states;
    const int A = m.n_actions;
    if (model.n_rows() != Sp || model.n_outcomes() != Sp)
        throw DataError("extended_vi_average: model shape does not match M_inf");
    if (!(tol > 0)) throw DataError("extended_vi_average: tolerance must be positive");

    // Counts are fixed during the call: freeze the empirical rows and radii.
    numvec rows(static_cast<std::size_t>(Sp) * A * Sp);
    numvec beta(static_cast<std::size_t>(Sp) * A);
    for (int s = 0; s < Sp; ++s)
        for (int a = 0; a < A; ++a) {
            const std::size_t sa = static_cast<std::size_t>(s) * A + a;
            model.p_hat_row(s, a, rows.data() + sa * Sp);
            beta[sa] = model.radius_l1(s, a);
        }

    numvec u(Sp, 0.0), u_next(Sp, 0.0), p_opt(Sp);
    indvec order;
    AvgEviResult out;
    out.policy.assign(Sp, 0);
    for (long it = 1; it <= sweep_cap; ++it) {
        preference_order_max(u.data(), Sp, order);
        for (int s = 0; s < Sp; ++s) {
            prec_t best = -INFTY;
            int best_a = 0;
            for (int a = 0; a < A; ++a) {
                const std::size_t sa = static_cast<std::size_t>(s) * A + a;
                const prec_t val =
                    inner_max_l1(rows.data() + sa * Sp, Sp, beta[sa], u.data(), order,
                                 p_opt.data());
                if (val > best) {
                    best = val;
                    best_a = a;
                }
            }
            u_next[s] = m.reward(s) + best;
            out.policy[s] = best_a;
        }
        prec_t dmin = INFTY, dmax = -INFTY;
        for (int s = 0; s < Sp; ++s) {
            const prec_t d = u_next[s] - u[s];
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
        }
        if (dmax - dmin <= tol) {
            out.u = u_next;
            out.sweeps = it;
            out.span_gap = dmax - dmin;
            return out;
        }
        prec_t lo = INFTY;
        for (prec_t x : u_next) lo = std::min(lo, x);
        for (int s = 0; s < Sp; ++s) u[s] = u_next[s] - lo;
    }
    throw DivergenceError("extended_vi_average: span stopping not reached within the sweep cap",
                          -1);
}

} // namespace detail

// ---------------------------------------------------------------- UCRL2 ----

/// Standard UCRL2 on the M-infinity reduction, run for `n_episodes` SSP
/// episodes. Requires uniform costs (the setting in which hitting-time
/// minimization and gain maximization coincide). Episode costs are the true
/// costs paid in the environment, so with unit costs the recorded regret
/// equals T_K - (V*(s0) + 1) K, T_K being the M_inf clock that includes one
/// teleport step per completed episode. The EVI tolerance is 1/sqrt(t) at
/// planning time t.
inline RunRecord run_ucrl2(const SspInstance& inst, const Ucrl2Config& cfg, long n_episodes) {
    cfg.validate();
    if (n_episodes < 0) throw DataError("run_ucrl2: n_episodes must be >= 0");
    for (prec_t c : inst.costs)
        if (std::abs(c - inst.costs[0]) > 1e-12)
            throw DataError("run_ucrl2: the reduction requires uniform costs");

    const ViResult opt = exact_value_iteration(inst);
    const MInfinity m = build_m_infinity(inst);
    const int Sp = m.n_states;
    const int A = m.n_actions;
    ConfidenceModel model(Sp, A, Sp, Sp, cfg.delta, cfg.mode);
    Environment env(inst, cfg.seed);

    RunRecord rec;
    rec.algorithm = "ucrl2";
    rec.seed = cfg.seed;
    rec.episodes_requested = n_episodes;

    long t = 1; // M_inf clock: environment steps plus one teleport per episode
    cntvec n_start(static_cast<std::size_t>(Sp) * A, 0);
    StationaryPolicy pol(Sp, 0);

    const auto snapshot = [&] {
        cntvec v(static_cast<std::size_t>(Sp) * A);
        for (int s = 0; s < Sp; ++s)
            for (int a = 0; a < A; ++a) v[static_cast<std::size_t>(s) * A + a] = model.count(s, a);
        return v;
    };
    const auto close_epoch = [&] {
        if (!rec.epochs.empty()) rec.epochs.back().counts_end = snapshot();
    };
    const auto plan = [&] {
        close_epoch();
        const prec_t tol = 1.0 / std::sqrt(static_cast<prec_t>(t));
        detail::AvgEviResult evi = detail::extended_vi_average(m, model, tol, cfg.evi_sweep_cap);
        pol = evi.policy;
        n_start = snapshot();
        EpochLog ep;
        ep.index = static_cast<long>(rec.epochs.size()) + 1;
        ep.t_start = t;
        ep.evi_tol = tol;
        ep.evi_gap = evi.span_gap;
        ep.evi_sweeps = evi.sweeps;
        ep.policy = pol;
        ep.counts_start = n_start;
        rec.epochs.push_back(std::move(ep));
    };
    // Doubling rule, checked on the pair about to be executed: the epoch
    // ends once its in-epoch visits reach max(1, epoch-start count).
    const auto fresh_action = [&](int s) {
        int a = pol[s];
        const std::size_t i = static_cast<std::size_t>(s) * A + a;
        if (model.count(s, a) - n_start[i] >= std::max<long long>(1, n_start[i])) {
            plan();
            a = pol[s];
        }
        return a;
    };

    plan();
    for (long k = 1; k <= n_episodes; ++k) {
        env.reset();
        EpisodeLog ep;
        ep.k = k;
        while (!env.at_goal()) {
            const int s = env.current_state();
            const int a = fresh_action(s);
            const StepResult r = env.step(a);
            model.record(s, a, r.next_state); // next_state == Sp - 1 on goal entry
            ++t;
            ep.cost += r.cost;
            ++ep.length;
        }
        // The goal is an ordinary M_inf state: its action teleports to s0
        // (recorded like any transition) and collects the known unit reward.
        const int a_goal = fresh_action(m.goal);
        model.record(m.goal, a_goal, m.start);
        ++t;
        ep.phase1_cost = ep.cost;
        ep.phase1_steps = ep.length;
        rec.episodes.push_back(ep);
    }
    close_epoch();
    compute_diagnostics(rec, opt.v[inst.start], inst.c_max);
    return rec;
}

// ------------------------------------------------------------- UCRL-SSP ----

/// Doubling-epoch SSP-planning baseline. Plans on the floored costs with
/// per-element Bernstein sets; EVI accuracy is c'_min / (2t) (c'_min the
/// smallest floored cost, falling back to 1 when everything is zero) and the
/// pivot parameter is 1/sqrt(m) in epoch m. With use_pivot_horizon the epoch
/// also ends after the plan's pivot-horizon step count. The comparator is
/// the best-proper-policy value (plain exact VI when c_min > 0), matching
/// the agent's convention.
inline RunRecord run_ucrl_ssp_style(const SspInstance& inst, const UcrlSspConfig& cfg,
                                    long n_episodes) {
    cfg.validate();
    if (n_episodes < 0) throw DataError("run_ucrl_ssp_style: n_episodes must be >= 0");

    const int S = inst.n_states;
    const int A = inst.n_actions;
    numvec costs_f = inst.costs;
    for (prec_t& c : costs_f)
        if (c == 0) c = cfg.cost_floor;
    prec_t floor_min = INFTY, floor_max = 0;
    for (prec_t c : costs_f) {
        floor_min = std::min(floor_min, c);
        floor_max = std::max(floor_max, c);
    }
    const prec_t eps_scale = floor_min > 0 ? floor_min : 1.0;
    const prec_t v_star = best_proper_value_iteration(inst).v[inst.start];

    ConfidenceModel model(S, A, S + 1, S, cfg.delta, ConfidenceMode::bernstein);
    Environment env(inst, cfg.seed);

    RunRecord rec;
    rec.algorithm = cfg.use_pivot_horizon ? "ucrl-ssp-pivot" : "ucrl-ssp";
    rec.seed = cfg.seed;
    rec.episodes_requested = n_episodes;

    long t = 1;
    long epoch_steps = 0;
    long epoch_cap = 0; // 0 = unbounded (doubling rule only)
    cntvec n_start(static_cast<std::size_t>(S) * A, 0);
    StationaryPolicy pol(S, 0);

    const auto snapshot = [&] {
        cntvec v(static_cast<std::size_t>(S) * A);
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) v[static_cast<std::size_t>(s) * A + a] = model.count(s, a);
        return v;
    };
    const auto close_epoch = [&] {
        if (!rec.epochs.empty()) rec.epochs.back().counts_end = snapshot();
    };
    const auto plan = [&] {
        close_epoch();
        const long m = static_cast<long>(rec.epochs.size()) + 1;
        const prec_t eps = eps_scale / (2.0 * static_cast<prec_t>(t));
        const prec_t gamma = 1.0 / std::sqrt(static_cast<prec_t>(m));
        EpochLog ep;
        ep.index = m;
        ep.t_start = t;
        ep.evi_tol = eps;
        long pivot_h = 0;
        if (!cfg.two_step_planning) {
            const PlanResult p = evi_ssp(model, costs_f, eps, OperatorMode::plain(), gamma,
                                         cfg.use_pivot_horizon ? PIVOT_H_MAX : 2);
            pol = p.policy;
            ep.evi_gap = p.stop_gap;
            ep.evi_sweeps = p.iterations;
            pivot_h = p.pivot_h;
        } else {
            // Two-step construction: per-element lower bounds off-goal, the
            // slack pushed onto the goal column, then plain value iteration.
            numvec kernel_t(static_cast<std::size_t>(S) * A * (S + 1), 0.0);
            numvec p_hat(S + 1);
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a) {
                    model.p_hat_row(s, a, p_hat.data());
                    prec_t* row = kernel_t.data() +
                                  (static_cast<std::size_t>(s) * A + a) * (S + 1);
                    prec_t mass = 0;
                    for (int y = 0; y < S; ++y) {
                        row[y] = std::max(0.0, p_hat[y] - model.radius_bernstein(s, a, y));
                        mass += row[y];
                    }
                    row[S] = 1.0 - mass;
                }
            const SspInstance tilde(S, A, inst.start, floor_min, floor_max, costs_f,
                                    std::move(kernel_t));
            const ViResult vr = exact_value_iteration(tilde, eps);
            pol = vr.policy;
            ep.evi_gap = vr.residual;
            ep.evi_sweeps = vr.iterations;
            if (cfg.use_pivot_horizon) pivot_h = pivot_horizon(chain_of(tilde, pol), gamma).first;
        }
        epoch_cap = cfg.use_pivot_horizon ? pivot_h : 0;
        epoch_steps = 0;
        n_start = snapshot();
        ep.pivot_h = epoch_cap;
        ep.policy = pol;
        ep.counts_start = n_start;
        rec.epochs.push_back(std::move(ep));
    };
    const auto fresh_action = [&](int s) {
        int a = pol[s];
        const std::size_t i = static_cast<std::size_t>(s) * A + a;
        const bool doubled = model.count(s, a) - n_start[i] >= std::max<long long>(1, n_start[i]);
        const bool pivoted = epoch_cap > 0 && epoch_steps >= epoch_cap;
        if (doubled || pivoted) {
            plan();
            a = pol[s];
        }
        return a;
    };

    plan();
    for (long k = 1; k <= n_episodes; ++k) {
        env.reset();
        if (cfg.replan_on_goal && k > 1) plan();
        EpisodeLog ep;
        ep.k = k;
        while (!env.at_goal()) {
            const int s = env.current_state();
            const int a = fresh_action(s);
            const StepResult r = env.step(a);
            model.record(s, a, r.next_state);
            ++t;
            ++epoch_steps;
            ep.cost += r.cost;
            ++ep.length;
        }
        ep.phase1_cost = ep.cost;
        ep.phase1_steps = ep.length;
        rec.episodes.push_back(ep);
    }
    close_epoch();
    compute_diagnostics(rec, v_star, inst.c_max);
    return rec;
}

} // namespace ssplab
