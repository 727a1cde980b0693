// JSON (de)serialization of SSP instances.
//
// Document format:
//   {"n_states": S, "n_actions": A, "start": s0, "c_min": .., "c_max": ..,
//    "costs":  [[c(s,a) for a in 0..A) for s in 0..S),
//    "kernel": [[[p(y|s,a) for y in 0..S] for a] for s]}
// Kernel rows are length S+1; column index S is the implicit goal.
#pragma once

#include "ssplab/instance.hpp"

#include <nlohmann/json.hpp>

namespace ssplab {

using json = nlohmann::json;

inline json instance_to_json(const SspInstance& inst) {
    json costs = json::array();
    json kernel = json::array();
    for (int s = 0; s < inst.n_states; ++s) {
        json crow = json::array();
        json krows = json::array();
        for (int a = 0; a < inst.n_actions; ++a) {
            crow.push_back(inst.c(s, a));
            json prow = json::array();
            const prec_t* row = inst.row(s, a);
            for (int y = 0; y <= inst.n_states; ++y) prow.push_back(row[y]);
            krows.push_back(std::move(prow));
        }
        costs.push_back(std::move(crow));
        kernel.push_back(std::move(krows));
    }
    return json{{"n_states", inst.n_states}, {"n_actions", inst.n_actions},
                {"start", inst.start},       {"c_min", inst.c_min},
                {"c_max", inst.c_max},       {"costs", std::move(costs)},
                {"kernel", std::move(kernel)}};
}

inline SspInstance instance_from_json(const json& j) {
    try {
        const int S = j.at("n_states").get<int>();
        const int A = j.at("n_actions").get<int>();
        const int start = j.at("start").get<int>();
        const prec_t c_min = j.at("c_min").get<prec_t>();
        const prec_t c_max = j.at("c_max").get<prec_t>();
        const auto& jc = j.at("costs");
        const auto& jk = j.at("kernel");
        if (static_cast<int>(jc.size()) != S || static_cast<int>(jk.size()) != S)
            throw DataError("instance_from_json: costs/kernel must have n_states rows");
        numvec costs;
        numvec kernel;
        costs.reserve(static_cast<std::size_t>(S) * A);
        kernel.reserve(static_cast<std::size_t>(S) * A * (S + 1));
        for (int s = 0; s < S; ++s) {
            if (static_cast<int>(jc[s].size()) != A || static_cast<int>(jk[s].size()) != A)
                throw DataError("instance_from_json: per-state arrays must have n_actions entries");
            for (int a = 0; a < A; ++a) {
                costs.push_back(jc[s][a].get<prec_t>());
                const auto& prow = jk[s][a];
                if (static_cast<int>(prow.size()) != S + 1)
                    throw DataError(
                        "instance_from_json: kernel rows must have n_states+1 entries");
                for (int y = 0; y <= S; ++y) kernel.push_back(prow[y].get<prec_t>());
            }
        }
        return SspInstance(S, A, start, c_min, c_max, std::move(costs), std::move(kernel));
    } catch (const json::exception& e) {
        throw DataError(std::string("instance_from_json: malformed document: ") + e.what());
    }
}

} // namespace ssplab
