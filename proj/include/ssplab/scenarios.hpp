// Constructors for the concrete benchmark MDPs and the scenario registry.
#pragma once

#include "ssplab/instance.hpp"

#include <functional>
#include <map>
#include <nlohmann/json.hpp>

namespace ssplab {

// --------------------------------------------------------------- gridworld --

enum class GridScenario { uniform, sandpit, zero_region };

/// Rows x cols gridworld. Cells are addressed (row, col) with row 0 at top;
/// start is the top-left corner (0,0); the goal is the bottom-right corner.
/// Actions: 0 = Right, 1 = Down, 2 = Left, 3 = Up.
///
/// Transition rule: if the intended direction is blocked by a wall the agent
/// stays put with probability 1. Otherwise the intended direction succeeds
/// with probability 1 - p_f and each of the other three directions receives
/// p_f / 3, with blocked ones folding into staying. E.g. for p_f = 0.05:
///   p((0,1)|(0,0), Right) = 1 - p_f,  p((0,0)|(0,0), Right) = 2 p_f / 3,
///   p((1,0)|(0,0), Right) = p_f / 3,  p((0,0)|(0,0), Up)    = 1.
///
/// Costs per scenario (state-based, identical across actions):
///   uniform      — 1 everywhere.
///   sandpit      — beta everywhere except cell (1,1), which costs 1.
///   zero_region  — 0 on cells {(0,0),(0,1),(1,0),(1,1)}, beta elsewhere.
inline SspInstance make_gridworld(int rows, int cols, prec_t p_f, GridScenario scenario,
                                  prec_t beta = 0.0) {
    if (rows < 2 || cols < 2) throw DataError("make_gridworld: need at least a 2x2 grid");
    if (!(p_f >= 0 && p_f < 1)) throw DataError("make_gridworld: p_f must lie in [0,1)");
    if (scenario != GridScenario::uniform && !(beta > 0))
        throw DataError("make_gridworld: beta must be positive for this scenario");
    if (scenario == GridScenario::sandpit && beta > 1)
        throw DataError("make_gridworld: sandpit beta must be <= 1 (the pit cost)");

    const int n_cells = rows * cols;
    const int goal_cell = n_cells - 1; // bottom-right; also the last grid index,
                                       // so non-goal ids coincide with cell ids
    const int S = n_cells - 1;
    const int A = 4;
    const int dr[4] = {0, 1, 0, -1}; // Right, Down, Left, Up
    const int dc[4] = {1, 0, -1, 0};

    numvec kernel(static_cast<std::size_t>(S) * A * (S + 1), 0.0);
    numvec costs(static_cast<std::size_t>(S) * A, 0.0);

    auto col_of = [&](int cell) { return cell == goal_cell ? S : cell; };

    for (int cell = 0; cell < n_cells; ++cell) {
        if (cell == goal_cell) continue;
        const int r = cell / cols, c = cell % cols;
        for (int a = 0; a < A; ++a) {
            prec_t* row = kernel.data() + (static_cast<std::size_t>(cell) * A + a) * (S + 1);
            const int ir = r + dr[a], ic = c + dc[a];
            const bool intended_blocked = ir < 0 || ir >= rows || ic < 0 || ic >= cols;
            if (intended_blocked) {
                row[col_of(cell)] = 1.0; // wall in the intended direction: stay
            } else {
                row[col_of(ir * cols + ic)] += 1.0 - p_f;
                for (int d = 0; d < A; ++d) {
                    if (d == a) continue;
                    const int fr = r + dr[d], fc = c + dc[d];
                    const bool blocked = fr < 0 || fr >= rows || fc < 0 || fc >= cols;
                    const int target = blocked ? cell : fr * cols + fc;
                    row[col_of(target)] += p_f / 3.0;
                }
            }
        }
    }

    prec_t c_min = 1, c_max = 1;
    for (int cell = 0; cell < n_cells; ++cell) {
        if (cell == goal_cell) continue;
        const int r = cell / cols, c = cell % cols;
        prec_t cost = 1.0;
        switch (scenario) {
        case GridScenario::uniform: cost = 1.0; break;
        case GridScenario::sandpit: cost = (r == 1 && c == 1) ? 1.0 : beta; break;
        case GridScenario::zero_region: cost = (r <= 1 && c <= 1) ? 0.0 : beta; break;
        }
        for (int a = 0; a < A; ++a) costs[static_cast<std::size_t>(cell) * A + a] = cost;
    }
    switch (scenario) {
    case GridScenario::uniform: c_min = c_max = 1.0; break;
    case GridScenario::sandpit: c_min = beta, c_max = 1.0; break;
    case GridScenario::zero_region: c_min = 0.0, c_max = beta; break;
    }

    return SspInstance(S, A, /*start=*/0, c_min, c_max, std::move(costs), std::move(kernel));
}

// -------------------------------------------------------------------- toys --

/// Deterministic two-state SSP: s0 with a self-loop of cost c_min (action 0)
/// and a goal transition of cost c_max (action 1). Illustrates the dichotomy
/// between the SSP-optimal policy (take the expensive exit, V* = c_max) and
/// the average-cost-optimal one (loop forever at c_min per step) in the
/// regime c_max > 2 c_min > 0.
inline SspInstance make_two_state_toy(prec_t c_min, prec_t c_max) {
    if (!(c_max > 2 * c_min && c_min > 0))
        throw DataError("make_two_state_toy: requires c_max > 2*c_min > 0");
    numvec costs = {c_min, c_max};
    // rows over {s0, goal}
    numvec kernel = {1.0, 0.0,  // a0: self-loop
                     0.0, 1.0}; // a1: goal
    return SspInstance(1, 2, 0, c_min, c_max, std::move(costs), std::move(kernel));
}

/// Cost-offset example: s0 has a direct goal edge (action 0, cost 4*eta) and
/// a three-step path s0 -> s1 -> s2 -> goal of cost eta per edge (action 1 at
/// s0; both actions coincide elsewhere). Offsetting all costs by +eta flips
/// the optimal action at s0: the raw optimum is the path (3*eta < 4*eta), the
/// offset optimum the direct edge (5*eta < 6*eta).
inline SspInstance make_offset_example(prec_t eta) {
    if (!(eta > 0)) throw DataError("make_offset_example: eta must be positive");
    const int S = 3, A = 2;
    numvec costs = {4 * eta, eta,  // s0: direct / into path
                    eta,     eta,  // s1
                    eta,     eta}; // s2
    numvec kernel(static_cast<std::size_t>(S) * A * (S + 1), 0.0);
    auto set = [&](int s, int a, int y) {
        kernel[(static_cast<std::size_t>(s) * A + a) * (S + 1) + y] = 1.0;
    };
    set(0, 0, 3); // s0 -a0-> goal
    set(0, 1, 1); // s0 -a1-> s1
    set(1, 0, 2); // s1 -> s2 (both actions)
    set(1, 1, 2);
    set(2, 0, 3); // s2 -> goal (both actions)
    set(2, 1, 3);
    return SspInstance(S, A, 0, eta, 4 * eta, std::move(costs), std::move(kernel));
}

/// SSP-communicating toy with a transient state (reward-based demo): s0 has a
/// self-loop (action 0) and a goal edge (action 1); s1 moves to s0 under both
/// actions and has no inbound edges, so it is transient under every policy.
/// Uniform costs; D = 2 (reach the goal from s1 via s0).
inline SspInstance make_sspcom_toy() {
    const int S = 2, A = 2;
    numvec costs(static_cast<std::size_t>(S) * A, 1.0);
    numvec kernel(static_cast<std::size_t>(S) * A * (S + 1), 0.0);
    auto set = [&](int s, int a, int y) {
        kernel[(static_cast<std::size_t>(s) * A + a) * (S + 1) + y] = 1.0;
    };
    set(0, 0, 0); // s0 self-loop
    set(0, 1, 2); // s0 -> goal
    set(1, 0, 0); // s1 -> s0
    set(1, 1, 0);
    return SspInstance(S, A, 0, 1.0, 1.0, std::move(costs), std::move(kernel));
}

/// Dead-end-augmented two-state toy for the finite-penalty setting.
/// States: s0, dead. Actions at s0: 0 = self-loop (cost c_min), 1 = goal
/// (cost c_max), 2 = into the dead end (cost c_min), 3 = reset (cost J,
/// goal with probability 1). The dead end self-loops under actions 0-2 at
/// cost c_min; the reset action is its only exit. Not SSP-communicating
/// without the reset action; declared cost range is [c_min, max(c_max, J)].
inline SspInstance make_deadend_toy(prec_t c_min, prec_t c_max, prec_t J) {
    if (!(0 < c_min && c_min <= c_max && J > 0))
        throw DataError("make_deadend_toy: requires 0 < c_min <= c_max and J > 0");
    const int S = 2, A = 4;
    const int s0 = 0, dead = 1, goal = 2;
    numvec costs = {c_min, c_max, c_min, J,  // s0
                    c_min, c_min, c_min, J}; // dead
    numvec kernel(static_cast<std::size_t>(S) * A * (S + 1), 0.0);
    auto set = [&](int s, int a, int y) {
        kernel[(static_cast<std::size_t>(s) * A + a) * (S + 1) + y] = 1.0;
    };
    set(s0, 0, s0);
    set(s0, 1, goal);
    set(s0, 2, dead);
    set(s0, 3, goal);
    set(dead, 0, dead);
    set(dead, 1, dead);
    set(dead, 2, dead);
    set(dead, 3, goal);
    return SspInstance(S, A, 0, c_min, std::max(c_max, J), std::move(costs), std::move(kernel));
}

/// Deterministic n-chain with unit costs: state i moves to i+1 (the last
/// state exits to the goal) under every action. V* = (n, n-1, ..., 1).
inline SspInstance make_chain(int n, int n_actions = 1) {
    if (n < 1 || n_actions < 1) throw DataError("make_chain: need n >= 1 and n_actions >= 1");
    numvec costs(static_cast<std::size_t>(n) * n_actions, 1.0);
    numvec kernel(static_cast<std::size_t>(n) * n_actions * (n + 1), 0.0);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < n_actions; ++a)
            kernel[(static_cast<std::size_t>(s) * n_actions + a) * (n + 1) + (s + 1)] = 1.0;
    return SspInstance(n, n_actions, 0, 1.0, 1.0, std::move(costs), std::move(kernel));
}

// ---------------------------------------------------------------- registry --

/// Builds a named scenario from JSON parameters (missing keys use the
/// documented defaults). Known names:
///   gridworld-uniform  {rows=3, cols=4, p_f=0.05}
///   gridworld-sandpit  {rows=3, cols=4, p_f=0.05, beta=0.5}
///   gridworld-zero     {rows=3, cols=4, p_f=0.05, beta=0.4}
///   toy-fig1           {c_min=1, c_max=3}
///   toy-offset         {eta=1}
///   toy-sspcom         {}
///   toy-deadend        {c_min=1, c_max=3, J=4}
///   chain              {n=3, n_actions=1}
inline SspInstance make_scenario(const std::string& name, const nlohmann::json& params = {}) {
    auto num = [&](const char* key, prec_t dflt) -> prec_t {
        return params.contains(key) ? params.at(key).get<prec_t>() : dflt;
    };
    auto integer = [&](const char* key, int dflt) -> int {
        return params.contains(key) ? params.at(key).get<int>() : dflt;
    };
    if (name == "gridworld-uniform")
        return make_gridworld(integer("rows", 3), integer("cols", 4), num("p_f", 0.05),
                              GridScenario::uniform);
    if (name == "gridworld-sandpit")
        return make_gridworld(integer("rows", 3), integer("cols", 4), num("p_f", 0.05),
                              GridScenario::sandpit, num("beta", 0.5));
    if (name == "gridworld-zero")
        return make_gridworld(integer("rows", 3), integer("cols", 4), num("p_f", 0.05),
                              GridScenario::zero_region, num("beta", 0.4));
    if (name == "toy-fig1") return make_two_state_toy(num("c_min", 1), num("c_max", 3));
    if (name == "toy-offset") return make_offset_example(num("eta", 1));
    if (name == "toy-sspcom") return make_sspcom_toy();
    if (name == "toy-deadend")
        return make_deadend_toy(num("c_min", 1), num("c_max", 3), num("J", 4));
    if (name == "chain") return make_chain(integer("n", 3), integer("n_actions", 1));
    throw DataError("make_scenario: unknown scenario '" + name + "'");
}

/// Names accepted by make_scenario, for CLI help and validation.
inline std::vector<std::string> scenario_names() {
    return {"gridworld-uniform", "gridworld-sandpit", "gridworld-zero", "toy-fig1",
            "toy-offset",        "toy-sspcom",        "toy-deadend",    "chain"};
}

} // namespace ssplab
