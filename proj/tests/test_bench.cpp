// Bench harness: aggregation math, sublinearity verdicts, experiment
// persistence (CSVs, summaries, hashed manifest), re-aggregation, report
// text, SVG rendering, and byte-identical reproducibility.
#include <catch2/catch_amalgamated.hpp>

#include "ssplab/bench.hpp"

#include <cstdlib>
#include <filesystem>

using namespace ssplab;
using Catch::Matchers::WithinAbs;
namespace fsys = std::filesystem;

namespace {

/// Fresh scratch directory under the system temp root.
fsys::path scratch_dir(const std::string& name) {
    const fsys::path p = fsys::temp_directory_path() / ("ssplab_test_" + name);
    fsys::remove_all(p);
    fsys::create_directories(p);
    return p;
}

ExperimentConfig chain_config(const fsys::path& root, const std::string& name) {
    ExperimentConfig cfg;
    cfg.name = name;
    cfg.scenario = "chain";
    cfg.scenario_params = json{{"n", 3}};
    cfg.algorithms = {"ucssp"};
    cfg.episodes = 10;
    cfg.repetitions = 2;
    cfg.base_seed = 7;
    cfg.out_dir = root.string();
    return cfg;
}

long count_lines(const std::string& text) {
    long n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

} // namespace

// ------------------------------------------------------------ aggregation ---

TEST_CASE("aggregate: pointwise statistics") {
    // Two runs with per-episode regrets {1, 3}: mean 2, min 1, max 3.
    // Sample std is sqrt(2), so the stderr of the mean is exactly 1.
    const AggregateSeries a = aggregate({{1.0}, {3.0}});
    CHECK(a.n_runs == 2);
    CHECK(a.mean == numvec{2.0});
    CHECK(a.min == numvec{1.0});
    CHECK(a.max == numvec{3.0});
    CHECK_THAT(a.stderr_mean[0], WithinAbs(1.0, 1e-15));

    // A single run: mean = min = max, stderr = 0.
    const AggregateSeries one = aggregate({{4.0, 5.0}});
    CHECK(one.mean == numvec{4.0, 5.0});
    CHECK(one.min == one.mean);
    CHECK(one.max == one.mean);
    CHECK(one.stderr_mean == numvec{0.0, 0.0});

    // Pointwise min <= mean <= max on a larger random-ish set.
    std::vector<numvec> runs;
    for (int i = 0; i < 7; ++i) {
        numvec r;
        for (int k = 0; k < 9; ++k)
            r.push_back(std::sin(0.7 * i + 1.3 * k) * (i + 1) + k);
        runs.push_back(std::move(r));
    }
    const AggregateSeries big = aggregate(runs);
    for (std::size_t k = 0; k < big.mean.size(); ++k) {
        CHECK(big.min[k] <= big.mean[k] + 1e-12);
        CHECK(big.mean[k] <= big.max[k] + 1e-12);
        CHECK(big.stderr_mean[k] >= 0);
    }

    // Exact permutation invariance of the run order.
    std::vector<numvec> permuted = {runs[4], runs[0], runs[6], runs[2], runs[5], runs[1],
                                    runs[3]};
    const AggregateSeries perm = aggregate(permuted);
    CHECK(perm.mean == big.mean);
    CHECK(perm.stderr_mean == big.stderr_mean);
    CHECK(perm.min == big.min);
    CHECK(perm.max == big.max);

    CHECK_THROWS_AS(aggregate({}), DataError);
    CHECK_THROWS_AS(aggregate({{1.0, 2.0}, {1.0}}), DataError);
}

TEST_CASE("aggregate: normalized regret divides by the oracle value") {
    // Final regret 5.32 against V* = 2.66 normalizes to exactly 2.
    const AggregateSeries a = aggregate({{5.32}}, 2.66);
    CHECK_THAT(a.mean_normalized[0], WithinAbs(2.0, 1e-12));
    CHECK(a.v_star == 2.66);
    // Unknown (or zero) normalizer leaves the column at 0.
    const AggregateSeries b = aggregate({{5.32}});
    CHECK(b.mean_normalized == numvec{0.0});
}

TEST_CASE("sublinearity_check: boundary, positive, and precondition cases") {
    // Linear growth: per-episode rate is constant, so late == early and the
    // strict comparison fails.
    numvec linear, sqrt_like;
    for (int k = 1; k <= 200; ++k) {
        linear.push_back(static_cast<prec_t>(k));
        sqrt_like.push_back(std::sqrt(static_cast<prec_t>(k)));
    }
    const SublinearityVerdict lin = sublinearity_check(linear, 0.1, 0.1);
    CHECK_THAT(lin.early_rate, WithinAbs(1.0, 1e-12));
    CHECK_THAT(lin.late_rate, WithinAbs(1.0, 1e-12));
    CHECK(!lin.sublinear_consistent);
    CHECK(lin.verdict == "not-sublinear-consistent");

    const SublinearityVerdict sq = sublinearity_check(sqrt_like, 0.1, 0.1);
    CHECK(sq.sublinear_consistent);
    CHECK(sq.late_rate < sq.early_rate);
    CHECK(sq.verdict == "sublinear-consistent");

    CHECK_THROWS_AS(sublinearity_check(linear, 0.0, 0.1), DataError);
    CHECK_THROWS_AS(sublinearity_check(linear, 0.1, 0.6), DataError);
    CHECK_THROWS_AS(sublinearity_check(numvec{1.0}, 0.1, 0.1), DataError);
}

// ------------------------------------------------------------ persistence ---

TEST_CASE("run_experiment: structural outputs for 2 reps x K=10") {
    unsetenv(OUT_ROOT_ENV);
    const fsys::path root = scratch_dir("structural");
    const ExperimentConfig cfg = chain_config(root, "smoke");
    const fsys::path dir = run_experiment(cfg);
    REQUIRE(dir == root / "smoke");

    // Two per-run episode CSVs of exactly 10 data rows each.
    for (std::uint64_t seed : {7u, 8u}) {
        const fsys::path p = dir / ("ucssp_seed" + std::to_string(seed) + ".csv");
        REQUIRE(fsys::exists(p));
        const std::string text = read_file(p);
        CHECK(count_lines(text) == 11); // header + 10 episodes
        const CsvTable t = parse_csv(text);
        CHECK(t.columns ==
              std::vector<std::string>{"k", "episode_cost", "episode_len", "phase1_steps",
                                       "phase2_steps", "n_phase2_attempts", "H_k0", "vtilde_s0",
                                       "cum_regret"});
        CHECK(t.rows.size() == 10);
        // On the deterministic chain every episode costs exactly V* = 3.
        CHECK_THAT(t.column("episode_cost")[0], WithinAbs(3.0, 1e-12));
        CHECK_THAT(t.column("cum_regret").back(), WithinAbs(0.0, 1e-9));
        // UC-SSP writes attempt logs and a summary.
        REQUIRE(fsys::exists(dir / ("ucssp_seed" + std::to_string(seed) + "_attempts.csv")));
        const json summary = json::parse(
            read_file(dir / ("ucssp_seed" + std::to_string(seed) + "_summary.json")));
        for (const char* key : {"final_regret", "W_K", "Omega_K", "F_K", "G_K", "T_K2", "T_K"})
            REQUIRE(summary.contains(key));
        CHECK(summary.at("T_K").get<long>() == 30);
    }

    // One aggregate CSV with the documented schema.
    const CsvTable agg = read_csv(dir / "ucssp_aggregate.csv");
    CHECK(agg.columns == std::vector<std::string>{"k", "mean", "min", "max", "stderr",
                                                  "mean_normalized"});
    CHECK(agg.rows.size() == 10);
    // Chain V* = 3 and zero regret: normalized column is 0 / 3 = 0.
    CHECK_THAT(agg.column("mean").back(), WithinAbs(0.0, 1e-9));

    // Manifest lists every output file with its correct content hash.
    const json manifest = json::parse(read_file(dir / "manifest.json"));
    CHECK(manifest.at("version").get<std::string>() == SSPLAB_VERSION);
    CHECK_THAT(manifest.at("oracle").at("v_star_s0").get<prec_t>(), WithinAbs(3.0, 1e-9));
    CHECK(manifest.at("failed").empty());
    const auto& files = manifest.at("files");
    REQUIRE(files.size() == 7); // 2x (episodes, attempts, summary) + 1 aggregate
    for (const auto& [fn, hash] : files.items()) {
        REQUIRE(fsys::exists(dir / fn));
        CHECK(hash.get<std::string>() == hash_hex(read_file(dir / fn)));
    }
    // Every file in the directory except the manifest itself is listed.
    for (const auto& entry : fsys::directory_iterator(dir)) {
        const std::string fn = entry.path().filename().string();
        if (fn == "manifest.json") continue;
        CHECK(files.contains(fn));
    }
}

TEST_CASE("run_experiment: byte-identical reruns, also across worker counts") {
    unsetenv(OUT_ROOT_ENV);
    const fsys::path root = scratch_dir("repro");
    ExperimentConfig cfg;
    cfg.scenario = "gridworld-uniform";
    cfg.name = "a";
    cfg.algorithms = {"ucssp", "ucrl2"};
    cfg.episodes = 25;
    cfg.repetitions = 2;
    cfg.base_seed = 3;
    cfg.out_dir = root.string();
    const fsys::path da = run_experiment(cfg);

    cfg.name = "b";
    const fsys::path db = run_experiment(cfg);

    cfg.name = "c";
    cfg.workers = 2; // pool path must persist identical bytes
    const fsys::path dc = run_experiment(cfg);

    for (const char* fn :
         {"ucssp_seed3.csv", "ucssp_seed4.csv", "ucrl2_seed3.csv", "ucrl2_seed4.csv",
          "ucssp_seed3_attempts.csv", "ucssp_aggregate.csv", "ucrl2_aggregate.csv"}) {
        INFO(fn);
        const std::string a = read_file(da / fn);
        CHECK(a == read_file(db / fn));
        CHECK(a == read_file(dc / fn));
    }
}

TEST_CASE("run_experiment: environment variable overrides the output root") {
    const fsys::path root = scratch_dir("envroot");
    setenv(OUT_ROOT_ENV, root.string().c_str(), 1);
    ExperimentConfig cfg = chain_config("/nonexistent/ignored", "via-env");
    cfg.episodes = 2;
    cfg.repetitions = 1;
    const fsys::path dir = run_experiment(cfg);
    unsetenv(OUT_ROOT_ENV);
    CHECK(dir == root / "via-env");
    CHECK(fsys::exists(dir / "manifest.json"));
}

TEST_CASE("run_experiment: invalid combinations fail before anything runs") {
    unsetenv(OUT_ROOT_ENV);
    const fsys::path root = scratch_dir("invalid");
    ExperimentConfig cfg = chain_config(root, "bad");

    cfg.algorithms = {"ucrl2"};
    cfg.scenario = "gridworld-sandpit"; // non-uniform costs
    CHECK_THROWS_AS(run_experiment(cfg), DataError);

    cfg = chain_config(root, "bad");
    cfg.algorithms = {"no-such-algorithm"};
    CHECK_THROWS_AS(run_experiment(cfg), DataError);

    cfg = chain_config(root, "bad");
    cfg.scenario = "no-such-scenario";
    CHECK_THROWS_AS(run_experiment(cfg), DataError);

    cfg = chain_config(root, "bad");
    cfg.algorithms = {"ucssp_J"}; // missing penalty_J / reset_action
    CHECK_THROWS_AS(run_experiment(cfg), DataError);

    cfg = chain_config(root, "bad");
    cfg.scenario = "gridworld-zero"; // c_min = 0: standard variant refuses
    cfg.algorithms = {"ucssp"};
    CHECK_THROWS_AS(run_experiment(cfg), DataError);

    CHECK(!fsys::exists(root / "bad")); // nothing was written
}

TEST_CASE("experiment_from_json: defaults, synonyms, and typo rejection") {
    const ExperimentConfig cfg = experiment_from_json(json{
        {"scenario", "gridworld-sandpit"},
        {"params", {{"beta", 0.1}}},
        {"algorithms", {"ucssp", "ucrl_ssp_pivot"}},
        {"K", 50},
        {"repetitions", 3},
        {"base_seed", 11},
        {"delta", 0.2},
        {"mode", "l1-experimental"},
    });
    CHECK(cfg.name == "gridworld-sandpit"); // defaults to the scenario
    CHECK(cfg.episodes == 50);
    CHECK(cfg.repetitions == 3);
    CHECK(cfg.base_seed == 11);
    CHECK(cfg.delta == 0.2);
    CHECK(cfg.mode == ConfidenceMode::l1_experimental);
    CHECK(cfg.out_dir == "runs");
    CHECK(cfg.agent_pivot_horizon);

    // "episodes" is a synonym for "K".
    const ExperimentConfig alias = experiment_from_json(
        json{{"scenario", "chain"}, {"algorithms", {"ucssp"}}, {"episodes", 17}});
    CHECK(alias.episodes == 17);

    CHECK_THROWS_AS(experiment_from_json(json{{"scenario", "chain"},
                                              {"algorithms", {"ucssp"}},
                                              {"repetitons", 2}}), // typo
                    DataError);
    CHECK_THROWS_AS(experiment_from_json(json{{"algorithms", {"ucssp"}}}), DataError);
    CHECK_THROWS_AS(experiment_from_json(json{{"scenario", "chain"}}), DataError);
    CHECK_THROWS_AS(experiment_from_json(json::array()), DataError);

    // Round trip through the manifest echo.
    const ExperimentConfig echo = experiment_from_json(experiment_to_json(cfg));
    CHECK(echo.scenario == cfg.scenario);
    CHECK(echo.episodes == cfg.episodes);
    CHECK(echo.mode == cfg.mode);
    CHECK(echo.base_seed == cfg.base_seed);
}

TEST_CASE("run_experiment: explicit instance file replaces the registry") {
    unsetenv(OUT_ROOT_ENV);
    const fsys::path root = scratch_dir("instfile");
    const SspInstance chain = make_chain(3);
    const fsys::path inst_path = root / "chain.json";
    write_file(inst_path, instance_to_json(chain).dump() + "\n");

    ExperimentConfig by_file;
    by_file.name = "by-file";
    by_file.scenario = "chain"; // label; construction comes from the file
    by_file.instance_file = inst_path.string();
    by_file.algorithms = {"ucssp"};
    by_file.episodes = 6;
    by_file.base_seed = 1;
    by_file.out_dir = root.string();
    const fsys::path df = run_experiment(by_file);

    ExperimentConfig by_name = by_file;
    by_name.name = "by-name";
    by_name.instance_file.clear();
    by_name.scenario_params = json{{"n", 3}};
    const fsys::path dn = run_experiment(by_name);

    CHECK(read_file(df / "ucssp_seed1.csv") == read_file(dn / "ucssp_seed1.csv"));
}

// --------------------------------------------------------- re-aggregation ---

TEST_CASE("aggregate_directory: independent recomputation matches the originals") {
    unsetenv(OUT_ROOT_ENV);
    const fsys::path root = scratch_dir("reagg");
    ExperimentConfig cfg;
    cfg.name = "grid";
    cfg.scenario = "gridworld-uniform";
    cfg.algorithms = {"ucssp"};
    cfg.episodes = 40;
    cfg.repetitions = 3;
    cfg.base_seed = 21;
    cfg.out_dir = root.string();
    const fsys::path dir = run_experiment(cfg);
    const std::string original = read_file(dir / "ucssp_aggregate.csv");

    // Remove the aggregate; re-aggregation from the run CSVs recreates it
    // byte-identically.
    fsys::remove(dir / "ucssp_aggregate.csv");
    const DirectoryAggregates agg = aggregate_directory(dir, /*write_csv=*/true);
    CHECK(read_file(dir / "ucssp_aggregate.csv") == original);
    REQUIRE(agg.by_algorithm.count("ucssp"));
    CHECK(agg.by_algorithm.at("ucssp").n_runs == 3);

    // Second implementation: one-pass (Welford) statistics over the run
    // CSVs, checked against the library aggregation.
    std::vector<numvec> series;
    for (std::uint64_t seed : {21u, 22u, 23u})
        series.push_back(
            read_csv(dir / ("ucssp_seed" + std::to_string(seed) + ".csv")).column("cum_regret"));
    const AggregateSeries& lib = agg.by_algorithm.at("ucssp");
    for (std::size_t k = 0; k < lib.mean.size(); ++k) {
        double mean = 0, m2 = 0, lo = INFTY, hi = -INFTY;
        long n = 0;
        for (const numvec& run : series) {
            ++n;
            const double d = run[k] - mean;
            mean += d / static_cast<double>(n);
            m2 += d * (run[k] - mean);
            lo = std::min(lo, run[k]);
            hi = std::max(hi, run[k]);
        }
        const double se = std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
        CHECK_THAT(lib.mean[k], WithinAbs(mean, 1e-9));
        CHECK_THAT(lib.stderr_mean[k], WithinAbs(se, 1e-9));
        CHECK(lib.min[k] == lo);
        CHECK(lib.max[k] == hi);
    }

    CHECK_THROWS_AS(aggregate_directory(root / "nowhere", false), DataError);
}

// ------------------------------------------------------------------ report --

TEST_CASE("report_text and plots") {
    unsetenv(OUT_ROOT_ENV);
    const fsys::path root = scratch_dir("report");
    ExperimentConfig cfg = chain_config(root, "rep");
    cfg.episodes = 20;
    const fsys::path dir = run_experiment(cfg);

    const std::string text = report_text(dir);
    CHECK(text.find("ucssp") != std::string::npos);
    CHECK(text.find("V*(s0): 3") != std::string::npos);
    CHECK(text.find("sublinear") != std::string::npos); // one verdict or the other

    const fsys::path svg = write_plots(dir);
    const std::string content = read_file(svg);
    CHECK(content.rfind("<svg", 0) == 0);
    CHECK(content.find("<polyline") != std::string::npos);
    CHECK(content.find("ucssp") != std::string::npos);
    CHECK(content.find("</svg>") != std::string::npos);
}

TEST_CASE("render_line_chart: well-formed standalone chart") {
    numvec flat(300);
    for (std::size_t i = 0; i < flat.size(); ++i)
        flat[i] = std::sqrt(static_cast<prec_t>(i + 1));
    const std::string svg = render_line_chart("t", "x", "y", {{"series-a", flat}, {"b", {1.0}}});
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("series-a") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    // Identical inputs render identical bytes.
    CHECK(svg == render_line_chart("t", "x", "y", {{"series-a", flat}, {"b", {1.0}}}));
}

// -------------------------------------------------------------- utilities ---

TEST_CASE("fmt_num round-trips and fnv1a64 matches known vectors") {
    for (prec_t x : {0.0, 1.0, -1.5, 0.1, 2.6600000000000001, 1e-300, 1e300}) {
        const std::string s = fmt_num(x);
        CHECK(std::stod(s) == x);
    }
    // Published FNV-1a 64-bit test vectors.
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
    CHECK(hash_hex("") == "cbf29ce484222325");
}

TEST_CASE("episodes_csv round-trips through parse_csv") {
    AgentConfig ac;
    ac.seed = 9;
    const RunRecord rec = run_ucssp(make_gridworld(3, 4, 0.05, GridScenario::uniform), ac, 15);
    const CsvTable t = parse_csv(episodes_csv(rec));
    REQUIRE(t.rows.size() == 15);
    const numvec cum = t.column("cum_regret");
    for (std::size_t i = 0; i < cum.size(); ++i) CHECK(cum[i] == rec.regret[i]);
    const numvec h0 = t.column("H_k0");
    CHECK(h0[0] == static_cast<prec_t>(rec.attempts[0].horizon));

    CHECK_THROWS_AS(parse_csv(""), DataError);
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), DataError);
    CHECK_THROWS_AS(parse_csv("a,b\n1,x\n"), DataError);
}
