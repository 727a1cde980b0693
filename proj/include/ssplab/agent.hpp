// The UC-SSP learning loop: two-phase episodes, attempt schedules, counter
// discipline, and the finite-penalty / perturbed-cost variants.
//
// Control flow follows the published pseudocode exactly:
//
//   for each environmental episode k = 1..K (starting at s0):
//     attempt (k,0) ("phase 1"): plan via EVI_SSP on the environment costs
//       with accuracy eps = c_min / (2 t_{k,0}) and pivot parameter
//       gamma = 1/sqrt(k); execute the greedy policy for at most H_{k,0}
//       steps, stopping early at the goal.
//     while the goal has not been reached, attempts (k,j), j = 1, 2, ...
//       ("phase 2"): plan with unit costs, eps = 1 / (2 t_{k,j}) and
//       gamma = 1/sqrt(G_{k,j}), G_{k,j} = G_{k,0} + j counting phase-2
//       attempts across all episodes; execute for at most H_{k,j} steps.
//     Visit counters are frozen during an attempt (nu) and folded into the
//     planning counts (N) at every attempt boundary, including episode end.
//
// Variants:
//   finite_penalty(J): the action set is assumed to contain a resetting
//     action (config field reset_action) that transitions to the goal with
//     probability 1 at cost J from every state. Planning uses the truncated
//     operator L_J; phase 1 runs for at most ceil(6 (J/c_min) log(2 sqrt(k)))
//     steps; on failure the agent executes the reset action (cost J, episode
//     ends at the goal) — there is no phase 2. Regret is measured against
//     the truncated-VI oracle value V_J(s0).
//   perturbed: phase 1 plans on optimistic costs + eta_k, eta_k = k^{-1/3},
//     with accuracy eps = c_max / t_{k,0}; admits c_min = 0. Regret is
//     measured against the best proper policy (monotone value iteration
//     from a proper upper bound).
//
// Determinism: the agent draws no randomness of its own; all stochasticity
// lives in the Environment's named streams, so identical (instance, config,
// seed, K) yield bit-identical run records.
#pragma once

#include "ssplab/chain.hpp"
#include "ssplab/confidence.hpp"
#include "ssplab/environment.hpp"
#include "ssplab/evi.hpp"
#include "ssplab/solvers.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace ssplab {

// ------------------------------------------------------------- config ------

enum class Variant { standard, finite_penalty, perturbed };

inline std::string to_string(Variant v) {
    switch (v) {
    case Variant::standard: return "standard";
    case Variant::finite_penalty: return "finite_penalty";
    case Variant::perturbed: return "perturbed";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s) {
    if (s == "standard") return Variant::standard;
    if (s == "finite_penalty") return Variant::finite_penalty;
    if (s == "perturbed") return Variant::perturbed;
    throw DataError("unknown variant: " + s);
}

struct AgentConfig {
    prec_t delta = 0.1;
    ConfidenceMode mode = ConfidenceMode::l1_theoretical;
    Variant variant = Variant::standard;
    prec_t penalty_J = 0.0;      ///< finite-penalty cap J (> 0 for that variant)
    int reset_action = -1;       ///< finite-penalty: index of the resetting action
    long h_max = PIVOT_H_MAX;    ///< hard cap on any attempt horizon
    std::uint64_t seed = 0;
    bool use_pivot_horizon = true; ///< ablation: false caps attempts at h_max instead
    bool stochastic_costs = false; ///< learn costs from observations (unknown-cost setting)

    void validate() const {
        if (!(delta > 0 && delta < 1)) throw DataError("AgentConfig: delta must be in (0,1)");
        if (variant == Variant::finite_penalty) {
            if (!(penalty_J > 0)) throw DataError("AgentConfig: finite_penalty requires J > 0");
            if (reset_action < 0)
                throw DataError("AgentConfig: finite_penalty requires a reset_action index");
        }
        if (h_max < 2) throw DataError("AgentConfig: h_max must be >= 2");
    }
};

// --------------------------------------------------------------- logs ------

/// One planned-and-executed attempt (k, j); j = 0 is phase 1, j >= 1 phase 2.
struct AttemptLog {
    long episode = 0;      ///< k (1-based)
    int attempt = 0;       ///< j
    long t_start = 0;      ///< t_{k,j}: global time step at attempt start (t starts at 1)
    int start_state = 0;   ///< state the attempt began in
    long horizon = 0;      ///< executed step cap H_{k,j} (pivot horizon, or the
                           ///< finite-penalty phase-1 length)
    bool pivot_capped = false;
    long g_kj = 0;         ///< G_{k,j} snapshot (phase-2 attempt counter)
    prec_t epsilon = 0;    ///< EVI accuracy used
    prec_t gamma = 0;      ///< pivot tail parameter used
    prec_t eta = 0;        ///< cost perturbation used (perturbed variant, phase 1)
    long steps = 0;        ///< environment steps executed (<= horizon)
    prec_t cost = 0;       ///< cost paid during the attempt
    bool reached_goal = false;
    prec_t v_start = 0;       ///< optimistic value at start_state
    prec_t expected_tau = 0;  ///< E[tau] from start_state in the optimistic chain
                              ///< (INFTY when that chain never absorbs)
    StationaryPolicy policy;  ///< the optimistic greedy policy executed
};

/// One environmental episode.
struct EpisodeLog {
    long k = 0;
    prec_t cost = 0;        ///< total cost paid in the episode
    long length = 0;        ///< tau_k(s0): steps until the goal
    prec_t phase1_cost = 0; ///< cost paid during attempt (k,0) (truncated sum of Eq. 6)
    long phase1_steps = 0;
    long phase2_steps = 0;
    int attempts = 1;       ///< 1 + J_k
    bool phase1_failed = false;
    bool reset_executed = false; ///< finite-penalty variant: paid J to end the episode
};

/// One planning epoch of a doubling-epoch baseline (UCRL2 / UCRL-SSP-style).
/// The UC-SSP agent plans per attempt and leaves these empty.
struct EpochLog {
    long index = 0;      ///< epoch number m (1-based)
    long t_start = 0;    ///< global time step at which the epoch's plan was computed
    prec_t evi_tol = 0;  ///< stopping tolerance the epoch's planner ran with
    prec_t evi_gap = 0;  ///< achieved gap (span of the difference for UCRL2's
                         ///< average-reward EVI, sup-norm residual for EVI_SSP)
    long evi_sweeps = 0;
    long pivot_h = 0;    ///< step cap on the epoch when pivot stopping is on (0 = none)
    StationaryPolicy policy;
    cntvec counts_start; ///< N(s,a) when the epoch began (flat rows x actions)
    cntvec counts_end;   ///< N(s,a) when it ended
};

/// Diagnostics of a completed run (the regret decomposition quantities).
struct RunDiagnostics {
    prec_t v_star_s0 = 0;     ///< comparator value (exact / truncated / proper-perturbed VI)
    prec_t final_regret = 0;  ///< Delta(A, K)
    prec_t w_k = 0;           ///< truncated regret W_K (phase-1 cost minus K V*)
    long omega_k = 0;         ///< max_k H_{k,0}
    long f_k = 0;             ///< episodes whose phase 1 failed
    long g_k = 0;             ///< total phase-2 attempts
    long t_k = 0;             ///< total steps
    long t_k1 = 0;            ///< steps in phase 1 (plus resets, finite-penalty)
    long t_k2 = 0;            ///< steps in phase 2
    bool decomposition_ok = false; ///< realized Delta <= W_K + c_max * T_{K,2}
};

/// Full record of a learning run; shared by the baselines (attempt logs stay
/// empty there and the attempt-derived diagnostics read 0).
struct RunRecord {
    std::string algorithm = "ucssp";
    Variant variant = Variant::standard;
    std::uint64_t seed = 0;
    long episodes_requested = 0;
    std::vector<AttemptLog> attempts;
    std::vector<EpisodeLog> episodes;
    std::vector<EpochLog> epochs; ///< doubling-epoch baselines only
    std::vector<prec_t> regret;   ///< cumulative Delta(A, k) after each episode
    RunDiagnostics diag;
};

// -------------------------------------------------------- diagnostics ------

/// Fills the regret series and every decomposition quantity from the logged
/// attempts/episodes, and checks the regret decomposition
/// Delta <= W_K + c_max * T_{K,2} on the realized trace (`c_max` bounds
/// every per-step cost paid outside phase 1; finite-penalty reset steps
/// count alongside T_{K,2} here, since the reset cost J <= c_max).
inline RunRecord& compute_diagnostics(RunRecord& rec, prec_t oracle_v_star, prec_t c_max) {
    RunDiagnostics d;
    d.v_star_s0 = oracle_v_star;
    rec.regret.clear();
    rec.regret.reserve(rec.episodes.size());
    prec_t cum = 0;
    long resets = 0;
    for (const EpisodeLog& ep : rec.episodes) {
        cum += ep.cost - oracle_v_star;
        rec.regret.push_back(cum);
        d.w_k += ep.phase1_cost - oracle_v_star;
        d.t_k1 += ep.phase1_steps + (ep.reset_executed ? 1 : 0);
        d.t_k2 += ep.phase2_steps;
        d.t_k += ep.length;
        if (ep.phase1_failed) ++d.f_k;
        if (ep.reset_executed) ++resets;
    }
    d.final_regret = cum;
    for (const AttemptLog& at : rec.attempts) {
        if (at.attempt == 0) d.omega_k = std::max(d.omega_k, at.horizon);
        else ++d.g_k;
    }
    d.decomposition_ok =
        d.final_regret <= d.w_k + c_max * static_cast<prec_t>(d.t_k2 + resets) + 1e-9;
    rec.diag = d;
    return rec;
}

// ------------------------------------------------------------ learner ------

namespace detail {

/// Expected hitting time from `s` of the optimistic chain in `plan`, or
/// INFTY when that chain never absorbs (singular fundamental matrix).
inline prec_t optimistic_tau(const PlanResult& plan, int s) {
    try {
        return expected_hitting_times(plan.q_tilde)[s];
    } catch (const SspError&) {
        return INFTY;
    }
}

struct AttemptOutcome {
    long steps = 0;
    prec_t cost = 0;
    bool reached_goal = false;
};

/// Executes `plan.policy` in `env` for at most `horizon` steps, buffering
/// transition (and cost) observations; nothing is folded into the models
/// here — counters stay frozen for the whole attempt.
inline AttemptOutcome execute_attempt(Environment& env, const PlanResult& plan, long horizon,
                                      std::vector<std::array<int, 3>>& transition_buffer,
                                      std::vector<std::pair<int, prec_t>>* cost_buffer) {
    AttemptOutcome out;
    while (out.steps < horizon && !env.at_goal()) {
        const int s = env.current_state();
        const int a = plan.policy[s];
        const StepResult r = env.step(a);
        transition_buffer.push_back({s, a, r.next_state});
        if (cost_buffer)
            cost_buffer->emplace_back(s * env.n_actions() + a, r.cost);
        out.cost += r.cost;
        ++out.steps;
        out.reached_goal = r.reached_goal;
    }
    return out;
}

/// Folds the buffered attempt observations into the planning models
/// (nu -> N at an attempt boundary) and clears the buffers.
inline void fold_counters(ConfidenceModel& model, std::vector<std::array<int, 3>>& transitions,
                          CostModel* cost_model, std::vector<std::pair<int, prec_t>>* costs,
                          int n_actions) {
    for (const auto& t : transitions) model.record(t[0], t[1], t[2]);
    transitions.clear();
    if (cost_model && costs) {
        for (const auto& [sa, c] : *costs) cost_model->record(sa / n_actions, sa % n_actions, c);
        costs->clear();
    }
}

inline RunRecord run_core(const SspInstance& inst, const AgentConfig& cfg, long K) {
    cfg.validate();
    if (K < 0) throw DataError("run_ucssp: K must be >= 0");
    const int S = inst.n_states;
    const int A = inst.n_actions;

    // Preconditions and the regret comparator, per variant.
    prec_t v_star = 0;
    switch (cfg.variant) {
    case Variant::standard: {
        if (!(inst.c_min > 0))
            throw DataError("run_ucssp: the standard variant requires c_min > 0");
        const ValidationReport report = validate_instance(inst);
        if (!report.ssp_communicating)
            throw DataError("run_ucssp: the standard variant requires an SSP-communicating "
                            "instance (use the finite-penalty variant for dead ends)");
        v_star = exact_value_iteration(inst).v[inst.start];
        break;
    }
    case Variant::finite_penalty: {
        if (!(inst.c_min > 0))
            throw DataError("run_ucssp: the finite-penalty variant requires c_min > 0");
        if (cfg.reset_action >= A)
            throw DataError("run_ucssp: reset_action is not a valid action index");
        if (!cfg.stochastic_costs)
            for (int s = 0; s < S; ++s)
                if (std::abs(inst.c(s, cfg.reset_action) - cfg.penalty_J) > 1e-12)
                    throw DataError("run_ucssp: the reset action must cost J from every state");
        v_star = truncated_value_iteration(inst, cfg.penalty_J).v[inst.start];
        break;
    }
    case Variant::perturbed:
        if (!(inst.c_max > 0))
            throw DataError("run_ucssp: the perturbed variant requires c_max > 0");
        v_star = best_proper_value_iteration(inst).v[inst.start];
        break;
    }

    Environment env(inst, cfg.seed, cfg.stochastic_costs);
    ConfidenceModel model(S, A, S + 1, S, cfg.delta, cfg.mode);
    CostModel cost_model(S, A, inst.c_min, inst.c_max, cfg.delta);

    RunRecord rec;
    rec.algorithm = "ucssp";
    rec.variant = cfg.variant;
    rec.seed = cfg.seed;
    rec.episodes_requested = K;

    // Planning cost tables. Phase 2 always plans with unit costs; phase 1
    // uses the known table, or optimistic cost-interval lower ends when
    // costs are learned from observations.
    numvec plan_costs(static_cast<std::size_t>(S) * A);
    const numvec unit_costs(static_cast<std::size_t>(S) * A, 1.0);
    const auto refresh_phase1_costs = [&]() {
        if (!cfg.stochastic_costs) {
            plan_costs = inst.costs;
            return;
        }
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                plan_costs[static_cast<std::size_t>(s) * A + a] = cost_model.optimistic_cost(s, a);
    };

    std::vector<std::array<int, 3>> transition_buffer;
    std::vector<std::pair<int, prec_t>> cost_buffer;
    std::vector<std::pair<int, prec_t>>* cost_buffer_ptr =
        cfg.stochastic_costs ? &cost_buffer : nullptr;

    long t = 1;  // global time step, 1-based as in the pseudocode
    long G = 0;  // G_{k,0}: phase-2 attempts before episode k

    for (long k = 1; k <= K; ++k) {
        env.reset();
        EpisodeLog ep;
        ep.k = k;

        int j = 0;
        while (!env.at_goal()) {
            const long t_kj = t;
            const long g_kj = G + j; // G_{k,j} = G_{k,0} + j

            AttemptLog at;
            at.episode = k;
            at.attempt = j;
            at.t_start = t_kj;
            at.start_state = env.current_state();
            at.g_kj = g_kj;

            // --- plan -------------------------------------------------------
            OperatorMode op = OperatorMode::plain();
            const numvec* costs = &unit_costs;
            if (j == 0) {
                refresh_phase1_costs();
                costs = &plan_costs;
                at.gamma = 1.0 / std::sqrt(static_cast<prec_t>(k));
                switch (cfg.variant) {
                case Variant::standard:
                    at.epsilon = inst.c_min / (2.0 * static_cast<prec_t>(t_kj));
                    break;
                case Variant::finite_penalty:
                    at.epsilon = inst.c_min / (2.0 * static_cast<prec_t>(t_kj));
                    op = OperatorMode::truncated(cfg.penalty_J);
                    break;
                case Variant::perturbed:
                    at.epsilon = inst.c_max / static_cast<prec_t>(t_kj);
                    at.eta = std::pow(static_cast<prec_t>(k), -1.0 / 3.0);
                    op = OperatorMode::perturbed(at.eta);
                    break;
                }
            } else {
                at.epsilon = 1.0 / (2.0 * static_cast<prec_t>(t_kj));
                at.gamma = 1.0 / std::sqrt(static_cast<prec_t>(g_kj));
            }

            // The finite-penalty variant replaces the pivot horizon by the
            // fixed phase-1 length, so the pivot search is skipped (cap 2).
            const long pivot_cap =
                cfg.variant == Variant::finite_penalty && j == 0 ? 2 : cfg.h_max;
            const PlanResult plan = evi_ssp(model, *costs, at.epsilon, op, at.gamma, pivot_cap);

            long horizon;
            if (cfg.variant == Variant::finite_penalty) {
                // H_k^(J) = 6 (J / c_min) log(2 sqrt(k)), executed as a step count.
                const prec_t h =
                    6.0 * (cfg.penalty_J / inst.c_min) *
                    std::log(2.0 * std::sqrt(static_cast<prec_t>(k)));
                horizon = static_cast<long>(std::ceil(h));
                at.pivot_capped = false;
            } else if (cfg.use_pivot_horizon) {
                horizon = plan.pivot_h;
                at.pivot_capped = plan.pivot_capped;
            } else {
                horizon = cfg.h_max;
                at.pivot_capped = false;
            }
            at.horizon = horizon;
            at.v_start = plan.v_tilde[at.start_state];
            at.expected_tau = optimistic_tau(plan, at.start_state);
            at.policy = plan.policy;

            // --- execute (counters frozen) ----------------------------------
            const AttemptOutcome out =
                execute_attempt(env, plan, horizon, transition_buffer, cost_buffer_ptr);
            at.steps = out.steps;
            at.cost = out.cost;
            at.reached_goal = out.reached_goal;
            t += out.steps;

            ep.cost += out.cost;
            ep.length += out.steps;
            if (j == 0) {
                ep.phase1_cost = out.cost;
                ep.phase1_steps = out.steps;
            } else {
                ep.phase2_steps += out.steps;
            }

            rec.attempts.push_back(at);

            // --- fold nu -> N at the attempt boundary ------------------------
            fold_counters(model, transition_buffer, cfg.stochastic_costs ? &cost_model : nullptr,
                          cost_buffer_ptr, A);

            if (!env.at_goal()) {
                if (cfg.variant == Variant::finite_penalty) break; // reset instead of phase 2
                ++j;
            }
        }

        if (cfg.variant == Variant::finite_penalty && !env.at_goal()) {
            // Resetting ability: execute the reset action once; it moves to
            // the goal with probability 1 at cost J and ends the episode.
            const int s = env.current_state();
            const StepResult r = env.step(cfg.reset_action);
            transition_buffer.push_back({s, cfg.reset_action, r.next_state});
            if (cost_buffer_ptr) cost_buffer_ptr->emplace_back(s * A + cfg.reset_action, r.cost);
            fold_counters(model, transition_buffer, cfg.stochastic_costs ? &cost_model : nullptr,
                          cost_buffer_ptr, A);
            ep.cost += r.cost;
            ep.length += 1;
            ep.reset_executed = true;
            t += 1;
        }

        ep.attempts = j + 1;
        ep.phase1_failed = (j > 0) || ep.reset_executed;
        G += j; // G_{k+1,0} = G_{k,0} + J_k
        rec.episodes.push_back(ep);
    }

    compute_diagnostics(rec, v_star, inst.c_max);
    return rec;
}

} // namespace detail

/// UC-SSP, standard variant. Requires c_min > 0 and an SSP-communicating
/// instance; sample-only environment access; regret against exact VI.
inline RunRecord run_ucssp(const SspInstance& inst, AgentConfig cfg, long K) {
    cfg.variant = Variant::standard;
    return detail::run_core(inst, cfg, K);
}

/// UC-SSP with the truncated operator L_J and the resetting ability:
/// tolerates dead ends; no phase 2; regret against the truncated-VI oracle.
inline RunRecord run_ucssp_finite_penalty(const SspInstance& inst, AgentConfig cfg, long K) {
    cfg.variant = Variant::finite_penalty;
    return detail::run_core(inst, cfg, K);
}

/// UC-SSP with the perturbed phase-1 operator (costs + k^{-1/3}): admits
/// zero costs; regret against the best proper policy.
inline RunRecord run_ucssp_perturbed(const SspInstance& inst, AgentConfig cfg, long K) {
    cfg.variant = Variant::perturbed;
    return detail::run_core(inst, cfg, K);
}

} // namespace ssplab
