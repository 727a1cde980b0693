// Instance model, validation report, and JSON round-trip.
#include "ssplab/instance.hpp"
#include "ssplab/json_io.hpp"
#include "ssplab/scenarios.hpp"
#include "ssplab/solvers.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace ssplab;

TEST_CASE("construction rejects malformed shapes and ranges") {
    numvec costs = {1.0, 3.0};
    numvec kernel = {1.0, 0.0, 0.0, 1.0};
    CHECK_NOTHROW(SspInstance(1, 2, 0, 1.0, 3.0, costs, kernel));
    CHECK_THROWS_AS(SspInstance(0, 2, 0, 1.0, 3.0, costs, kernel), DataError);
    CHECK_THROWS_AS(SspInstance(1, 2, 1, 1.0, 3.0, costs, kernel), DataError);  // start = goal
    CHECK_THROWS_AS(SspInstance(1, 2, -1, 1.0, 3.0, costs, kernel), DataError); // start < 0
    CHECK_THROWS_AS(SspInstance(1, 2, 0, -1.0, 3.0, costs, kernel), DataError); // c_min < 0
    CHECK_THROWS_AS(SspInstance(1, 2, 0, 4.0, 3.0, costs, kernel), DataError);  // c_min > c_max
    CHECK_THROWS_AS(SspInstance(1, 2, 0, 1.0, 3.0, numvec{1.0}, kernel), DataError);
    CHECK_THROWS_AS(SspInstance(1, 2, 0, 1.0, 3.0, costs, numvec{1.0, 0.0}), DataError);
}

TEST_CASE("accessors address the flat layout correctly") {
    // 2 states x 2 actions with distinguishable entries.
    numvec costs = {1.0, 2.0, 3.0, 4.0};
    numvec kernel = {
        0.1, 0.2, 0.7, // (s0,a0)
        0.0, 0.0, 1.0, // (s0,a1)
        0.5, 0.5, 0.0, // (s1,a0)
        0.9, 0.0, 0.1, // (s1,a1)
    };
    SspInstance inst(2, 2, 1, 1.0, 4.0, costs, kernel);
    CHECK(inst.goal() == 2);
    CHECK(inst.c(0, 1) == 2.0);
    CHECK(inst.c(1, 0) == 3.0);
    CHECK(inst.p(0, 0, 2) == 0.7);
    CHECK(inst.p(1, 1, 0) == 0.9);
    CHECK(inst.row(1, 0)[1] == 0.5);
}

TEST_CASE("two-state toy validates as communicating with D = 1") {
    const SspInstance toy = make_two_state_toy(1.0, 3.0);
    const ValidationReport rep = validate_instance(toy);
    CHECK(rep.ok());
    CHECK(rep.ssp_communicating);
    // Action a2 reaches the goal in one deterministic step from the only state.
    CHECK_THAT(rep.ssp_diameter, Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("row-sum violations are listed with their coordinates") {
    numvec costs = {1.0, 3.0};
    numvec kernel = {0.9, 0.0, // sums to 0.9
                     0.0, 1.0};
    SspInstance bad(1, 2, 0, 1.0, 3.0, costs, kernel);
    const ValidationReport rep = validate_instance(bad);
    REQUIRE(rep.row_sum_violations.size() == 1);
    CHECK(rep.row_sum_violations[0].state == 0);
    CHECK(rep.row_sum_violations[0].action == 0);
    CHECK_THAT(rep.row_sum_violations[0].sum, Catch::Matchers::WithinAbs(0.9, 1e-12));
    CHECK_FALSE(rep.ok());
}

TEST_CASE("negative probabilities and out-of-range costs are reported") {
    numvec costs = {1.0, 5.0}; // 5.0 above declared c_max = 3
    numvec kernel = {1.2, -0.2, // negative entry (sums to 1)
                     0.0, 1.0};
    SspInstance bad(1, 2, 0, 1.0, 3.0, costs, kernel);
    const ValidationReport rep = validate_instance(bad);
    REQUIRE(rep.negative_prob_violations.size() == 1);
    CHECK(rep.negative_prob_violations[0].min_entry == -0.2);
    REQUIRE(rep.cost_range_violations.size() == 1);
    CHECK(rep.cost_range_violations[0].action == 1);
    CHECK(rep.cost_range_violations[0].cost == 5.0);
}

TEST_CASE("removing the goal action makes the toy non-communicating") {
    // Only the self-loop remains: no policy reaches the goal.
    numvec costs = {1.0};
    numvec kernel = {1.0, 0.0};
    SspInstance stuck(1, 1, 0, 1.0, 1.0, costs, kernel);
    const ValidationReport rep = validate_instance(stuck);
    CHECK(rep.ok()); // structurally fine, just not communicating
    CHECK_FALSE(rep.ssp_communicating);
    CHECK(rep.ssp_diameter == INFTY);
}

TEST_CASE("communication flag is consistent with the diameter") {
    for (const auto& name : scenario_names()) {
        const SspInstance inst = make_scenario(name);
        const ValidationReport rep = validate_instance(inst);
        INFO("scenario " << name);
        CHECK(rep.ssp_communicating == (rep.ssp_diameter < INFTY));
    }
}

TEST_CASE("policy validity check") {
    const SspInstance toy = make_two_state_toy(1.0, 3.0);
    CHECK(is_valid_policy(toy, StationaryPolicy{0}));
    CHECK(is_valid_policy(toy, StationaryPolicy{1}));
    CHECK_FALSE(is_valid_policy(toy, StationaryPolicy{2}));
    CHECK_FALSE(is_valid_policy(toy, StationaryPolicy{}));
    CHECK_FALSE(is_valid_policy(toy, StationaryPolicy{0, 0}));
}

TEST_CASE("JSON round trip preserves every field exactly") {
    const SspInstance inst = make_gridworld(3, 4, 0.05, GridScenario::sandpit, 0.5);
    const nlohmann::json j = instance_to_json(inst);
    const SspInstance back = instance_from_json(j);
    CHECK(back.n_states == inst.n_states);
    CHECK(back.n_actions == inst.n_actions);
    CHECK(back.start == inst.start);
    CHECK(back.c_min == inst.c_min);
    CHECK(back.c_max == inst.c_max);
    CHECK(back.costs == inst.costs);   // exact double equality: round trip is lossless
    CHECK(back.kernel == inst.kernel);
}

TEST_CASE("JSON serialization uses the documented field names") {
    const nlohmann::json j = instance_to_json(make_two_state_toy(1.0, 3.0));
    for (const char* key : {"n_states", "n_actions", "start", "c_min", "c_max", "costs", "kernel"})
        CHECK(j.contains(key));
    CHECK(j.at("costs").size() == 1);        // one row per state
    CHECK(j.at("costs").at(0).size() == 2);  // one entry per action
    CHECK(j.at("kernel").at(0).size() == 2); // actions
    CHECK(j.at("kernel").at(0).at(0).size() == 2); // S + 1 outcome columns
}

TEST_CASE("malformed JSON raises a data error") {
    nlohmann::json j = instance_to_json(make_two_state_toy(1.0, 3.0));
    j.erase("kernel");
    CHECK_THROWS_AS(instance_from_json(j), DataError);
    CHECK_THROWS_AS(instance_from_json(nlohmann::json::parse("{\"n_states\": \"x\"}")), DataError);
}

TEST_CASE("every registry scenario passes validation") {
    for (const auto& name : scenario_names()) {
        const SspInstance inst = make_scenario(name);
        const ValidationReport rep = validate_instance(inst);
        INFO("scenario " << name);
        CHECK(rep.ok());
    }
    CHECK_THROWS_AS(make_scenario("nope"), DataError);
}
