// Experiment harness: JSON experiment configs, seeded repetitions across a
// worker pool, CSV/JSON persistence with a hashed manifest, aggregation, and
// regret-trend verdicts.
//
// On-disk layout of a run directory (all files hashed into manifest.json):
//   <alg>_seed<seed>.csv           one row per episode
//   <alg>_seed<seed>_attempts.csv  one row per planning attempt (when any)
//   <alg>_seed<seed>_summary.json  final diagnostics
//   <alg>_aggregate.csv            pointwise statistics over the repetitions
//   regret.svg                     optional chart (emit_plots / report --plot)
//   manifest.json                  config echo, code version, oracle value,
//                                  file hashes, failed runs
#pragma once

#include "ssplab/agent.hpp"
#include "ssplab/baselines.hpp"
#include "ssplab/json_io.hpp"
#include "ssplab/scenarios.hpp"
#include "ssplab/svg.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <thread>

namespace ssplab {

inline constexpr const char* SSPLAB_VERSION = "1.0.0";
/// Environment variable that overrides the configured output root.
inline constexpr const char* OUT_ROOT_ENV = "SSPLAB_OUT_ROOT";

namespace fs = std::filesystem;

// ------------------------------------------------- formatting & hashing -----

/// Shortest round-trip decimal representation (deterministic across runs,
/// parses back to the identical double).
inline std::string fmt_num(prec_t x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// FNV-1a 64-bit content hash, reported as 16 hex digits.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hash_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

inline std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw DataError("cannot read file: " + p.string());
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

inline void write_file(const fs::path& p, std::string_view content) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write file: " + p.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw DataError("short write: " + p.string());
}

// ------------------------------------------------------------ aggregation ---

/// Pointwise statistics of cumulative regret across repetitions.
struct AggregateSeries {
    long n_runs = 0;
    numvec mean;            ///< per episode k = 1..K
    numvec min;
    numvec max;
    numvec stderr_mean;     ///< sample standard deviation / sqrt(n); 0 for n = 1
    numvec mean_normalized; ///< mean / V*(s0); zeros when V* is unknown or 0
    prec_t v_star = 0;      ///< the normalizer used
};

/// Pointwise mean/min/max/stderr over the runs' cumulative-regret series.
/// Values are sorted per episode before summation, so the result is exactly
/// invariant under permutations of the run order.
inline AggregateSeries aggregate(const std::vector<numvec>& runs, prec_t v_star = 0) {
    if (runs.empty()) throw DataError("aggregate: no runs");
    const std::size_t K = runs[0].size();
    for (const numvec& r : runs)
        if (r.size() != K) throw DataError("aggregate: runs disagree on episode count");
    if (K == 0) throw DataError("aggregate: empty series");

    AggregateSeries out;
    out.n_runs = static_cast<long>(runs.size());
    out.v_star = v_star;
    out.mean.resize(K);
    out.min.resize(K);
    out.max.resize(K);
    out.stderr_mean.resize(K);
    out.mean_normalized.assign(K, 0.0);

    const prec_t n = static_cast<prec_t>(runs.size());
    numvec col(runs.size());
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < runs.size(); ++i) col[i] = runs[i][k];
        std::sort(col.begin(), col.end());
        prec_t sum = 0;
        for (prec_t v : col) sum += v;
        const prec_t mean = sum / n;
        prec_t ss = 0;
        for (prec_t v : col) ss += (v - mean) * (v - mean);
        out.mean[k] = mean;
        out.min[k] = col.front();
        out.max[k] = col.back();
        out.stderr_mean[k] = runs.size() > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(n) : 0.0;
        if (v_star > 0) out.mean_normalized[k] = mean / v_star;
    }
    return out;
}

/// Early-vs-late per-episode regret-rate comparison.
struct SublinearityVerdict {
    prec_t early_rate = 0; ///< mean per-episode regret over the first window
    prec_t late_rate = 0;  ///< ... over the last window
    bool sublinear_consistent = false;
    std::string verdict;   ///< "sublinear-consistent" or "not-sublinear-consistent"
};

/// Compares the mean per-episode regret over the first `early_frac` of the
/// cumulative series against the last `late_frac`; consistent with sublinear
/// growth when the late rate is strictly smaller. Fractions must lie in
/// (0, 0.5] so the windows cannot overlap.
inline SublinearityVerdict sublinearity_check(const numvec& cum_regret, prec_t early_frac,
                                              prec_t late_frac) {
    if (!(early_frac > 0 && early_frac <= 0.5) || !(late_frac > 0 && late_frac <= 0.5))
        throw DataError("sublinearity_check: window fractions must lie in (0, 0.5]");
    const std::size_t K = cum_regret.size();
    if (K < 2) throw DataError("sublinearity_check: need at least 2 episodes");
    const std::size_t we = std::max<std::size_t>(1, static_cast<std::size_t>(early_frac * K));
    const std::size_t wl = std::max<std::size_t>(1, static_cast<std::size_t>(late_frac * K));

    SublinearityVerdict v;
    v.early_rate = cum_regret[we - 1] / static_cast<prec_t>(we);
    v.late_rate = (cum_regret[K - 1] - cum_regret[K - 1 - wl]) / static_cast<prec_t>(wl);
    v.sublinear_consistent = v.late_rate < v.early_rate;
    v.verdict = v.sublinear_consistent ? "sublinear-consistent" : "not-sublinear-consistent";
    return v;
}

// ------------------------------------------------------ experiment config ---

struct ExperimentConfig {
    std::string name;            ///< run-directory name under the output root
    std::string scenario;        ///< registry name (label only when instance_file is set)
    json scenario_params = json::object();
    std::string instance_file;   ///< optional explicit instance JSON path
    std::vector<std::string> algorithms; ///< ucssp | ucssp_J | ucssp_eta | ucrl2 |
                                         ///< ucrl_ssp | ucrl_ssp_pivot
    long episodes = 100;         ///< K
    int repetitions = 1;
    std::uint64_t base_seed = 0; ///< repetition i runs with seed base_seed + i
    prec_t delta = 0.1;
    ConfidenceMode mode = ConfidenceMode::l1_theoretical;

    // variant knobs
    prec_t penalty_J = 0;        ///< ucssp_J
    int reset_action = -1;       ///< ucssp_J
    bool agent_pivot_horizon = true; ///< ucssp*: false caps attempts at h_max instead
    prec_t cost_floor = 0;       ///< ucrl_ssp*
    bool two_step_planning = false; ///< ucrl_ssp*
    bool replan_on_goal = false;    ///< ucrl_ssp*

    // plumbing
    std::string out_dir = "runs"; ///< output root (overridden by $SSPLAB_OUT_ROOT)
    bool emit_plots = false;
    int workers = 0;             ///< worker threads; 0 = hardware concurrency

    void validate() const {
        if (name.empty()) throw DataError("ExperimentConfig: name must be non-empty");
        if (name.find('/') != std::string::npos || name.find('\\') != std::string::npos)
            throw DataError("ExperimentConfig: name must not contain path separators");
        if (scenario.empty() && instance_file.empty())
            throw DataError("ExperimentConfig: need a scenario name or an instance_file");
        if (algorithms.empty()) throw DataError("ExperimentConfig: no algorithms listed");
        if (repetitions < 1) throw DataError("ExperimentConfig: repetitions must be >= 1");
        if (episodes < 1) throw DataError("ExperimentConfig: episodes must be >= 1");
        if (!(delta > 0 && delta < 1)) throw DataError("ExperimentConfig: delta not in (0,1)");
        if (workers < 0) throw DataError("ExperimentConfig: workers must be >= 0");
    }
};

inline json experiment_to_json(const ExperimentConfig& cfg) {
    return json{{"name", cfg.name},
                {"scenario", cfg.scenario},
                {"params", cfg.scenario_params},
                {"instance_file", cfg.instance_file},
                {"algorithms", cfg.algorithms},
                {"K", cfg.episodes},
                {"repetitions", cfg.repetitions},
                {"base_seed", cfg.base_seed},
                {"delta", cfg.delta},
                {"mode", to_string(cfg.mode)},
                {"penalty_J", cfg.penalty_J},
                {"reset_action", cfg.reset_action},
                {"agent_pivot_horizon", cfg.agent_pivot_horizon},
                {"cost_floor", cfg.cost_floor},
                {"two_step_planning", cfg.two_step_planning},
                {"replan_on_goal", cfg.replan_on_goal},
                {"out_dir", cfg.out_dir},
                {"emit_plots", cfg.emit_plots},
                {"workers", cfg.workers}};
}

/// Parses an experiment config document. Missing keys take the defaults
/// above ("K" and "episodes" are synonyms; name defaults to the scenario);
/// unknown keys are rejected so typos cannot silently drop a setting.
inline ExperimentConfig experiment_from_json(const json& j) {
    static const std::set<std::string> known = {
        "name",          "scenario",     "params",       "instance_file",
        "algorithms",    "K",            "episodes",     "repetitions",
        "base_seed",     "delta",        "mode",         "penalty_J",
        "reset_action",  "agent_pivot_horizon",          "cost_floor",
        "two_step_planning",             "replan_on_goal",
        "out_dir",       "emit_plots",   "workers"};
    if (!j.is_object()) throw DataError("experiment config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw DataError("experiment config: unknown key '" + key + "'");

    ExperimentConfig cfg;
    try {
        if (j.contains("scenario")) cfg.scenario = j.at("scenario").get<std::string>();
        cfg.name = j.contains("name") ? j.at("name").get<std::string>() : cfg.scenario;
        if (j.contains("params")) cfg.scenario_params = j.at("params");
        if (j.contains("instance_file"))
            cfg.instance_file = j.at("instance_file").get<std::string>();
        if (j.contains("algorithms"))
            cfg.algorithms = j.at("algorithms").get<std::vector<std::string>>();
        if (j.contains("K")) cfg.episodes = j.at("K").get<long>();
        else if (j.contains("episodes")) cfg.episodes = j.at("episodes").get<long>();
        if (j.contains("repetitions")) cfg.repetitions = j.at("repetitions").get<int>();
        if (j.contains("base_seed")) cfg.base_seed = j.at("base_seed").get<std::uint64_t>();
        if (j.contains("delta")) cfg.delta = j.at("delta").get<prec_t>();
        if (j.contains("mode"))
            cfg.mode = confidence_mode_from_string(j.at("mode").get<std::string>());
        if (j.contains("penalty_J")) cfg.penalty_J = j.at("penalty_J").get<prec_t>();
        if (j.contains("reset_action")) cfg.reset_action = j.at("reset_action").get<int>();
        if (j.contains("agent_pivot_horizon"))
            cfg.agent_pivot_horizon = j.at("agent_pivot_horizon").get<bool>();
        if (j.contains("cost_floor")) cfg.cost_floor = j.at("cost_floor").get<prec_t>();
        if (j.contains("two_step_planning"))
            cfg.two_step_planning = j.at("two_step_planning").get<bool>();
        if (j.contains("replan_on_goal"))
            cfg.replan_on_goal = j.at("replan_on_goal").get<bool>();
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("emit_plots")) cfg.emit_plots = j.at("emit_plots").get<bool>();
        if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
    } catch (const json::exception& e) {
        throw DataError(std::string("experiment config: malformed value: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

// ------------------------------------------------------- run serialization --

/// Per-episode CSV: one row per episode with the phase breakdown, the
/// phase-1 horizon and optimistic start value (0 for the epoch-based
/// baselines, which have no per-episode plan), and cumulative regret.
inline std::string episodes_csv(const RunRecord& rec) {
    std::string out =
        "k,episode_cost,episode_len,phase1_steps,phase2_steps,n_phase2_attempts,"
        "H_k0,vtilde_s0,cum_regret\n";
    // Phase-1 attempt telemetry per episode, where the algorithm has it.
    std::vector<long> h_k0(rec.episodes.size(), 0);
    std::vector<prec_t> v0(rec.episodes.size(), 0.0);
    for (const AttemptLog& at : rec.attempts) {
        if (at.attempt != 0) continue;
        const std::size_t i = static_cast<std::size_t>(at.episode - 1);
        if (i < rec.episodes.size()) {
            h_k0[i] = at.horizon;
            v0[i] = at.v_start;
        }
    }
    for (std::size_t i = 0; i < rec.episodes.size(); ++i) {
        const EpisodeLog& ep = rec.episodes[i];
        out += std::to_string(ep.k) + ',' + fmt_num(ep.cost) + ',' + std::to_string(ep.length) +
               ',' + std::to_string(ep.phase1_steps) + ',' + std::to_string(ep.phase2_steps) +
               ',' + std::to_string(ep.attempts - 1) + ',' + std::to_string(h_k0[i]) + ',' +
               fmt_num(v0[i]) + ',' + fmt_num(i < rec.regret.size() ? rec.regret[i] : 0.0) +
               '\n';
    }
    return out;
}

/// Attempt-level CSV (UC-SSP only; the baselines plan per epoch instead).
inline std::string attempts_csv(const RunRecord& rec) {
    std::string out = "k,j,H,steps,reached_goal,start_state\n";
    for (const AttemptLog& at : rec.attempts)
        out += std::to_string(at.episode) + ',' + std::to_string(at.attempt) + ',' +
               std::to_string(at.horizon) + ',' + std::to_string(at.steps) + ',' +
               (at.reached_goal ? "1" : "0") + ',' + std::to_string(at.start_state) + '\n';
    return out;
}

/// Final-diagnostics summary document for one run.
inline json run_summary(const RunRecord& rec) {
    return json{{"algorithm", rec.algorithm},
                {"variant", to_string(rec.variant)},
                {"seed", rec.seed},
                {"final_regret", rec.diag.final_regret},
                {"W_K", rec.diag.w_k},
                {"Omega_K", rec.diag.omega_k},
                {"F_K", rec.diag.f_k},
                {"G_K", rec.diag.g_k},
                {"T_K2", rec.diag.t_k2},
                {"T_K", rec.diag.t_k},
                {"v_star_s0", rec.diag.v_star_s0},
                {"decomposition_ok", rec.diag.decomposition_ok}};
}

/// Aggregate CSV over the repetitions of one algorithm.
inline std::string aggregate_csv(const AggregateSeries& agg) {
    std::string out = "k,mean,min,max,stderr,mean_normalized\n";
    for (std::size_t k = 0; k < agg.mean.size(); ++k)
        out += std::to_string(k + 1) + ',' + fmt_num(agg.mean[k]) + ',' + fmt_num(agg.min[k]) +
               ',' + fmt_num(agg.max[k]) + ',' + fmt_num(agg.stderr_mean[k]) + ',' +
               fmt_num(agg.mean_normalized[k]) + '\n';
    return out;
}

// ------------------------------------------------------------ CSV reading ---

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<numvec> rows;

    int col(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return static_cast<int>(i);
        throw DataError("CSV has no column '" + name + "'");
    }
    numvec column(const std::string& name) const {
        const int c = col(name);
        numvec out;
        out.reserve(rows.size());
        for (const numvec& r : rows) out.push_back(r[static_cast<std::size_t>(c)]);
        return out;
    }
};

inline CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string_view line(text.data() + pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (header) {
            for (std::string_view c : cells) t.columns.emplace_back(c);
            header = false;
            continue;
        }
        if (cells.size() != t.columns.size())
            throw DataError("CSV row has wrong cell count");
        numvec row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto res =
                std::from_chars(cells[i].data(), cells[i].data() + cells[i].size(), row[i]);
            if (res.ec != std::errc{}) throw DataError("CSV cell is not a number");
        }
        t.rows.push_back(std::move(row));
    }
    if (t.columns.empty()) throw DataError("CSV has no header row");
    return t;
}

inline CsvTable read_csv(const fs::path& p) { return parse_csv(read_file(p)); }

// --------------------------------------------------------------- dispatch ---

/// Runs one (algorithm, seed) cell of an experiment.
inline RunRecord run_algorithm(const SspInstance& inst, const std::string& alg,
                               const ExperimentConfig& cfg, std::uint64_t seed) {
    if (alg == "ucssp" || alg == "ucssp_J" || alg == "ucssp_eta") {
        AgentConfig ac;
        ac.delta = cfg.delta;
        ac.mode = cfg.mode;
        ac.seed = seed;
        ac.use_pivot_horizon = cfg.agent_pivot_horizon;
        if (alg == "ucssp") return run_ucssp(inst, ac, cfg.episodes);
        if (alg == "ucssp_J") {
            ac.penalty_J = cfg.penalty_J;
            ac.reset_action = cfg.reset_action;
            return run_ucssp_finite_penalty(inst, ac, cfg.episodes);
        }
        return run_ucssp_perturbed(inst, ac, cfg.episodes);
    }
    if (alg == "ucrl2") {
        Ucrl2Config c;
        c.delta = cfg.delta;
        c.mode = cfg.mode;
        c.seed = seed;
        return run_ucrl2(inst, c, cfg.episodes);
    }
    if (alg == "ucrl_ssp" || alg == "ucrl_ssp_pivot") {
        UcrlSspConfig c;
        c.delta = cfg.delta;
        c.seed = seed;
        c.use_pivot_horizon = (alg == "ucrl_ssp_pivot");
        c.cost_floor = cfg.cost_floor;
        c.two_step_planning = cfg.two_step_planning;
        c.replan_on_goal = cfg.replan_on_goal;
        return run_ucrl_ssp_style(inst, c, cfg.episodes);
    }
    throw DataError("unknown algorithm '" + alg + "'");
}

namespace detail {

/// Rejects invalid (algorithm, instance) combinations before any run starts,
/// so configuration errors fail the whole experiment instead of landing in
/// the partial-failure manifest.
inline void check_combination(const SspInstance& inst, const std::string& alg,
                              const ExperimentConfig& cfg) {
    if (alg == "ucssp") {
        if (!(inst.c_min > 0))
            throw DataError("algorithm ucssp requires c_min > 0 (use ucssp_eta)");
        return;
    }
    if (alg == "ucssp_J") {
        if (!(cfg.penalty_J > 0) || cfg.reset_action < 0 || cfg.reset_action >= inst.n_actions)
            throw DataError("algorithm ucssp_J needs penalty_J > 0 and a valid reset_action");
        return;
    }
    if (alg == "ucssp_eta") {
        if (!(inst.c_max > 0)) throw DataError("algorithm ucssp_eta requires c_max > 0");
        return;
    }
    if (alg == "ucrl2") {
        for (prec_t c : inst.costs)
            if (std::abs(c - inst.costs[0]) > 1e-12)
                throw DataError("algorithm ucrl2 requires uniform costs");
        if (cfg.mode == ConfidenceMode::bernstein)
            throw DataError("algorithm ucrl2 does not support Bernstein confidence sets");
        return;
    }
    if (alg == "ucrl_ssp" || alg == "ucrl_ssp_pivot") return;
    throw DataError("unknown algorithm '" + alg + "'");
}

/// The oracle normalizer V*(s0): the best-proper-policy value (plain exact
/// VI when c_min > 0).
inline prec_t oracle_v_star(const SspInstance& inst) {
    return best_proper_value_iteration(inst).v[inst.start];
}

inline SspInstance build_instance(const ExperimentConfig& cfg) {
    if (!cfg.instance_file.empty())
        return instance_from_json(json::parse(read_file(cfg.instance_file)));
    return make_scenario(cfg.scenario, cfg.scenario_params);
}

inline fs::path resolve_run_dir(const ExperimentConfig& cfg) {
    const char* env_root = std::getenv(OUT_ROOT_ENV);
    const fs::path root = (env_root && *env_root) ? fs::path(env_root) : fs::path(cfg.out_dir);
    return root / cfg.name;
}

} // namespace detail

// ---------------------------------------------------------- run_experiment --

/// Executes repetitions x algorithms runs (repetition i uses seed
/// base_seed + i for every algorithm, pairing the comparisons), persists
/// per-run CSVs/summaries and per-algorithm aggregates, and writes a
/// manifest listing every output file with a content hash. Individual run
/// failures are recorded in the manifest's "failed" list; configuration
/// errors throw before anything runs. Returns the run directory.
inline fs::path run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const SspInstance inst = detail::build_instance(cfg);
    for (const std::string& alg : cfg.algorithms) detail::check_combination(inst, alg, cfg);

    const fs::path dir = detail::resolve_run_dir(cfg);
    fs::create_directories(dir);
    const prec_t v_star = detail::oracle_v_star(inst);

    // Fan the runs out over a bounded worker pool; each worker owns the
    // slots it claims, so there is no shared mutable state during runs.
    struct Job {
        std::string alg;
        std::uint64_t seed = 0;
    };
    std::vector<Job> jobs;
    for (const std::string& alg : cfg.algorithms)
        for (int rep = 0; rep < cfg.repetitions; ++rep)
            jobs.push_back({alg, cfg.base_seed + static_cast<std::uint64_t>(rep)});

    std::vector<RunRecord> results(jobs.size());
    std::vector<std::string> errors(jobs.size());
    const auto work = [&](std::size_t i) {
        try {
            results[i] = run_algorithm(inst, jobs[i].alg, cfg, jobs[i].seed);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_workers =
        std::min<std::size_t>(cfg.workers > 0 ? static_cast<unsigned>(cfg.workers) : hw,
                              jobs.size());
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w)
            pool.emplace_back([&]() {
                for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1))
                    work(i);
            });
        for (std::thread& th : pool) th.join();
    }

    // Single-owner reduce: persist in job order, then aggregate.
    std::map<std::string, std::string> file_hashes;
    const auto persist = [&](const fs::path& p, std::string_view content) {
        write_file(p, content);
        file_hashes[p.filename().string()] = hash_hex(content);
    };

    json failed = json::array();
    std::map<std::string, std::vector<numvec>> regret_by_alg;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const std::string run_name = jobs[i].alg + "_seed" + std::to_string(jobs[i].seed);
        if (!errors[i].empty()) {
            failed.push_back(json{{"algorithm", jobs[i].alg},
                                  {"seed", jobs[i].seed},
                                  {"error", errors[i]}});
            continue;
        }
        const RunRecord& rec = results[i];
        persist(dir / (run_name + ".csv"), episodes_csv(rec));
        if (!rec.attempts.empty())
            persist(dir / (run_name + "_attempts.csv"), attempts_csv(rec));
        persist(dir / (run_name + "_summary.json"), run_summary(rec).dump(2) + "\n");
        regret_by_alg[jobs[i].alg].push_back(rec.regret);
    }

    std::map<std::string, AggregateSeries> aggregates;
    for (const auto& [alg, series] : regret_by_alg) {
        aggregates[alg] = aggregate(series, v_star);
        persist(dir / (alg + "_aggregate.csv"), aggregate_csv(aggregates[alg]));
    }

    if (cfg.emit_plots && !aggregates.empty()) {
        std::vector<SvgSeries> series;
        for (const auto& [alg, agg] : aggregates) series.push_back({alg, agg.mean});
        persist(dir / "regret.svg",
                render_line_chart("Cumulative regret (mean over " +
                                      std::to_string(cfg.repetitions) + " runs)",
                                  "episode", "regret", series));
    }

    const json manifest = {{"config", experiment_to_json(cfg)},
                           {"version", SSPLAB_VERSION},
                           {"oracle", json{{"v_star_s0", v_star}}},
                           {"files", file_hashes},
                           {"failed", failed}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return dir;
}

// ----------------------------------------------------------- re-aggregation --

struct DirectoryAggregates {
    std::map<std::string, AggregateSeries> by_algorithm;
    prec_t v_star = 0;
    json manifest;
};

/// Recomputes per-algorithm aggregates from the per-run CSVs in a run
/// directory (the manifest supplies the algorithm list and the oracle
/// normalizer). With `write_csv`, rewrites the aggregate CSVs and their
/// manifest hashes.
inline DirectoryAggregates aggregate_directory(const fs::path& dir, bool write_csv) {
    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path))
        throw DataError("not a run directory (no manifest.json): " + dir.string());
    DirectoryAggregates out;
    out.manifest = json::parse(read_file(manifest_path));
    out.v_star = out.manifest.at("oracle").at("v_star_s0").get<prec_t>();

    const auto algorithms =
        out.manifest.at("config").at("algorithms").get<std::vector<std::string>>();
    for (const std::string& alg : algorithms) {
        const std::string prefix = alg + "_seed";
        std::vector<std::pair<std::uint64_t, numvec>> runs; // seed-sorted for determinism
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string fn = entry.path().filename().string();
            if (fn.size() <= prefix.size() + 4 || fn.rfind(prefix, 0) != 0) continue;
            if (fn.substr(fn.size() - 4) != ".csv") continue;
            const std::string stem = fn.substr(prefix.size(), fn.size() - prefix.size() - 4);
            if (stem.empty() || stem.find_first_not_of("0123456789") != std::string::npos)
                continue; // attempts/summary companions fail the all-digits test
            runs.emplace_back(std::stoull(stem), read_csv(entry.path()).column("cum_regret"));
        }
        if (runs.empty()) continue;
        std::sort(runs.begin(), runs.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<numvec> series;
        series.reserve(runs.size());
        for (auto& [_, s] : runs) series.push_back(std::move(s));
        out.by_algorithm[alg] = aggregate(series, out.v_star);
    }

    if (write_csv) {
        for (const auto& [alg, agg] : out.by_algorithm) {
            const std::string content = aggregate_csv(agg);
            write_file(dir / (alg + "_aggregate.csv"), content);
            out.manifest["files"][alg + "_aggregate.csv"] = hash_hex(content);
        }
        write_file(manifest_path, out.manifest.dump(2) + "\n");
    }
    return out;
}

// ----------------------------------------------------------------- report ---

/// Human-readable summary of a run directory: per algorithm, the final mean
/// regret with its standard error, the normalized variant, and the
/// early-vs-late regret-rate verdict.
inline std::string report_text(const fs::path& dir) {
    const DirectoryAggregates agg = aggregate_directory(dir, /*write_csv=*/false);
    std::string out;
    out += "run directory: " + dir.string() + "\n";
    out += "oracle V*(s0): " + fmt_num(agg.v_star) + "\n\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-16s %6s %14s %12s %14s  %s\n", "algorithm", "runs",
                  "final regret", "stderr", "normalized", "trend (10%/10% windows)");
    out += line;
    for (const auto& [alg, a] : agg.by_algorithm) {
        const SublinearityVerdict v = sublinearity_check(a.mean, 0.1, 0.1);
        std::snprintf(line, sizeof(line), "%-16s %6ld %14.4f %12.4f %14.4f  %s\n", alg.c_str(),
                      a.n_runs, a.mean.back(), a.stderr_mean.back(), a.mean_normalized.back(),
                      v.verdict.c_str());
        out += line;
    }
    return out;
}

/// Renders regret.svg from the (re)computed aggregates of a run directory.
inline fs::path write_plots(const fs::path& dir) {
    const DirectoryAggregates agg = aggregate_directory(dir, /*write_csv=*/false);
    if (agg.by_algorithm.empty()) throw DataError("write_plots: no runs in " + dir.string());
    std::vector<SvgSeries> series;
    for (const auto& [alg, a] : agg.by_algorithm) series.push_back({alg, a.mean});
    const fs::path p = dir / "regret.svg";
    write_file(p, render_line_chart("Cumulative regret (mean)", "episode", "regret", series));
    return p;
}

} // namespace ssplab
