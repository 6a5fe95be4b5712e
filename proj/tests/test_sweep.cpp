#include "cooc/sweep.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace cooc {
namespace {

using nlohmann::json;

std::string tmp_path(const std::string& name) {
  return ::testing::TempDir() + name;
}

std::string write_config(const json& j, const std::string& name) {
  const std::string path = tmp_path(name);
  std::ofstream out(path);
  out << j.dump(2);
  return path;
}

json estimator_config() {
  return json{{"seed", 7},
              {"experiment", "estimator"},
              {"model",
               {{"family", "sbm"}, {"M", 20}, {"R", 2}, {"alpha", 3.0}, {"beta", 1.0}}},
              {"N_grid", {5000}},
              {"num_seeds", 1},
              {"methods", {"recover", "naive", "scaled"}},
              {"estimator", {{"R", 2}, {"w_min", 0.5}, {"k0_override", 1}}}};
}

TEST(SweepConfig, ParsesEveryField) {
  json j = estimator_config();
  j["scheme"] = "multinomial";
  j["num_seeds"] = 4;
  j["N_grid"] = {1000, 2000};
  j["cell_timeout_ms"] = 1500.0;
  j["estimator"]["eps"] = 0.2;
  j["estimator"]["bin_prune_coeff"] = 10.0;
  const SweepConfig cfg = load_sweep_config(write_config(j, "full.json"));
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.experiment, "estimator");
  EXPECT_EQ(cfg.model.family, "sbm");
  EXPECT_EQ(cfg.model.M, 20);
  EXPECT_DOUBLE_EQ(cfg.model.alpha, 3.0);
  EXPECT_EQ(cfg.N_grid, (std::vector<uint64_t>{1000, 2000}));
  EXPECT_EQ(cfg.num_seeds, 4);
  EXPECT_EQ(cfg.methods.size(), 3u);
  EXPECT_EQ(cfg.scheme, SampleScheme::kMultinomial);
  EXPECT_EQ(cfg.est.R, 2);
  EXPECT_DOUBLE_EQ(cfg.est.eps, 0.2);
  EXPECT_DOUBLE_EQ(cfg.est.w_min, 0.5);
  EXPECT_EQ(cfg.est.k0_override, 1);
  EXPECT_DOUBLE_EQ(cfg.est.bin_prune_coeff, 10.0);
  EXPECT_DOUBLE_EQ(cfg.cell_timeout_ms, 1500.0);
}

TEST(SweepConfig, HmmBlockAndDefaults) {
  json j{{"seed", 1},
         {"experiment", "hmm"},
         {"model", {{"family", "hmm"}, {"M", 10}, {"t", 0.25}}},
         {"N_grid", {10000}},
         {"methods", {"hmm_learn"}},
         {"hmm_params", {{"tol_sep", 1e-4}, {"w_min", 0.4}}}};
  const SweepConfig cfg = load_sweep_config(write_config(j, "hmm.json"));
  EXPECT_EQ(cfg.model.emissions, "disjoint_uniform");  // default layout
  EXPECT_EQ(cfg.num_seeds, 1);                         // default
  EXPECT_EQ(cfg.scheme, SampleScheme::kPoisson);       // default
  EXPECT_DOUBLE_EQ(cfg.hmm.tol_sep, 1e-4);
  EXPECT_DOUBLE_EQ(cfg.hmm.w_min, 0.4);
  EXPECT_EQ(cfg.hmm.k0_override, 1);
}

TEST(SweepConfig, RejectsInvalidConfigs) {
  EXPECT_THROW(load_sweep_config(tmp_path("missing_config.json")),
               std::runtime_error);

  const std::string garbled = tmp_path("garbled.json");
  std::ofstream(garbled) << "{not json";
  EXPECT_THROW(load_sweep_config(garbled), std::runtime_error);

  json j = estimator_config();
  j["N_grid"] = json::array();
  EXPECT_THROW(load_sweep_config(write_config(j, "empty_grid.json")),
               std::runtime_error);

  j = estimator_config();
  j["num_seeds"] = 0;
  EXPECT_THROW(load_sweep_config(write_config(j, "no_seeds.json")),
               std::runtime_error);

  j = estimator_config();
  j["methods"] = json::array();
  EXPECT_THROW(load_sweep_config(write_config(j, "no_methods.json")),
               std::runtime_error);

  j = estimator_config();
  j["scheme"] = "bootstrap";
  EXPECT_THROW(load_sweep_config(write_config(j, "bad_scheme.json")),
               std::runtime_error);

  j = estimator_config();
  j["experiment"] = "squib";
  EXPECT_THROW(load_sweep_config(write_config(j, "bad_exp.json")),
               std::runtime_error);

  j = estimator_config();
  j["methods"] = {"hmm_learn"};
  EXPECT_THROW(load_sweep_config(write_config(j, "wrong_method.json")),
               std::runtime_error);
}

TEST(RunSweep, OneRowPerMethodSortedAndHealthy) {
  const SweepConfig cfg =
      load_sweep_config(write_config(estimator_config(), "cell.json"));
  const SweepResult res = run_sweep(cfg);
  ASSERT_EQ(res.rows.size(), 3u);
  EXPECT_EQ(res.failures, 0u);
  EXPECT_EQ(res.rows[0].method, "naive");  // sorted by (N, seed, method)
  EXPECT_EQ(res.rows[1].method, "recover");
  EXPECT_EQ(res.rows[2].method, "scaled");
  for (const auto& r : res.rows) {
    EXPECT_EQ(r.status, "ok");
    EXPECT_GT(r.l1, 0.0);
    EXPECT_GT(r.spec, 0.0);
    EXPECT_GE(r.runtime_ms, 0.0);
    EXPECT_EQ(r.N, 5000u);
    EXPECT_EQ(r.seed, 7u);
  }
}

TEST(RunSweep, RowsSortedAcrossGridAndSeeds) {
  json j = estimator_config();
  j["N_grid"] = {10000, 5000};  // deliberately unsorted
  j["num_seeds"] = 2;
  j["methods"] = {"naive"};
  const SweepResult res =
      run_sweep(load_sweep_config(write_config(j, "grid.json")));
  ASSERT_EQ(res.rows.size(), 4u);
  EXPECT_EQ(res.rows[0].N, 5000u);
  EXPECT_EQ(res.rows[0].seed, 7u);
  EXPECT_EQ(res.rows[1].N, 5000u);
  EXPECT_EQ(res.rows[1].seed, 8u);
  EXPECT_EQ(res.rows[2].N, 10000u);
  EXPECT_EQ(res.rows[3].N, 10000u);
}

TEST(RunSweep, DeterministicUpToRuntime) {
  json j = estimator_config();
  j["num_seeds"] = 2;
  const std::string path = write_config(j, "det.json");
  const SweepResult a = run_sweep(load_sweep_config(path));
  const SweepResult b = run_sweep(load_sweep_config(path));
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].N, b.rows[i].N);
    EXPECT_EQ(a.rows[i].seed, b.rows[i].seed);
    EXPECT_EQ(a.rows[i].method, b.rows[i].method);
    EXPECT_EQ(a.rows[i].l1, b.rows[i].l1);  // bit-identical metrics
    EXPECT_EQ(a.rows[i].spec, b.rows[i].spec);
    EXPECT_EQ(a.rows[i].excluded_mass, b.rows[i].excluded_mass);
    EXPECT_EQ(a.rows[i].status, b.rows[i].status);
  }
}

TEST(RunSweep, CellFailuresAreIsolatedAndTagged) {
  // N = 1 breaks the binning precondition inside recover but leaves the
  // naive baseline untouched, so one method errors while the other runs.
  json j = estimator_config();
  j["N_grid"] = {1};
  j["methods"] = {"recover", "naive"};
  const SweepResult res =
      run_sweep(load_sweep_config(write_config(j, "isolated.json")));
  ASSERT_EQ(res.rows.size(), 2u);
  EXPECT_EQ(res.failures, 1u);
  EXPECT_EQ(res.rows[0].method, "naive");
  EXPECT_EQ(res.rows[0].status, "ok");
  EXPECT_EQ(res.rows[1].method, "recover");
  EXPECT_EQ(res.rows[1].status.rfind("error:", 0), 0u);
  EXPECT_EQ(res.rows[1].status.find(','), std::string::npos);
}

TEST(RunSweep, TimeoutGuardMarksSlowCells) {
  json j = estimator_config();
  j["cell_timeout_ms"] = 1e-9;  // everything exceeds this
  const SweepResult res =
      run_sweep(load_sweep_config(write_config(j, "timeout.json")));
  ASSERT_EQ(res.rows.size(), 3u);
  EXPECT_EQ(res.failures, 3u);
  for (const auto& r : res.rows) EXPECT_EQ(r.status, "timeout");
}

TEST(RunSweep, ChainExperimentReportsAccuracyAndDegeneracy) {
  json good{{"seed", 3},
            {"experiment", "hmm"},
            {"model",
             {{"family", "hmm"}, {"M", 10}, {"t", 0.25}, {"emissions", "disjoint_uniform"}}},
            {"N_grid", {100000}},
            {"methods", {"hmm_learn"}}};
  const SweepResult ok =
      run_sweep(load_sweep_config(write_config(good, "chain_ok.json")));
  ASSERT_EQ(ok.rows.size(), 1u);
  EXPECT_EQ(ok.rows[0].status, "ok");
  EXPECT_LE(ok.rows[0].spec, 0.05);  // |t_hat - t|
  EXPECT_LE(ok.rows[0].l1, 0.5);

  json flat = good;
  flat["model"]["emissions"] = "uniform";  // p = q: no signal
  flat["N_grid"] = {5000};
  flat["num_seeds"] = 2;
  const SweepResult degen =
      run_sweep(load_sweep_config(write_config(flat, "chain_flat.json")));
  ASSERT_EQ(degen.rows.size(), 2u);
  EXPECT_EQ(degen.failures, 0u);
  for (const auto& r : degen.rows) {
    EXPECT_EQ(r.status, "degenerate");
    EXPECT_DOUBLE_EQ(r.spec, 0.25);  // t_hat pinned at 1/2 against t = 1/4
  }
}

TEST(SweepCsv, SchemaAndNumberFormatting) {
  std::vector<SweepRow> rows(1);
  rows[0].N = 500;
  rows[0].seed = 2;
  rows[0].method = "recover";
  rows[0].l1 = 0.123456789012345;
  rows[0].spec = 0.5;
  rows[0].excluded_mass = 0.0;
  rows[0].runtime_ms = 12.25;
  rows[0].status = "ok";
  const std::string path = tmp_path("rows.csv");
  write_sweep_csv(rows, path);
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  EXPECT_EQ(header, "N,seed,method,l1,spec,excluded_mass,runtime_ms,status");
  EXPECT_EQ(line, "500,2,recover,0.123456789012,0.5,0,12.25,ok");
}

TEST(Quantile, LinearInterpolationBetweenRanks) {
  EXPECT_DOUBLE_EQ(quantile({3.0, 1.0, 2.0}, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(quantile({1.0, 2.0, 3.0, 4.0}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1.0, 2.0, 3.0, 4.0}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile({5.0, 1.0}, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile({5.0, 1.0}, 1.0), 5.0);
  EXPECT_THROW(quantile({}, 0.5), std::invalid_argument);
}

TEST(SweepSummary, GroupStatisticsMatchIndependentRecomputation) {
  json j = estimator_config();
  j["num_seeds"] = 5;
  j["methods"] = {"naive", "recover"};
  const SweepResult res =
      run_sweep(load_sweep_config(write_config(j, "summary.json")));
  const std::string path = tmp_path("summary_out.json");
  write_sweep_summary(res, path);

  std::ifstream in(path);
  json out;
  in >> out;
  EXPECT_EQ(out.at("cells").get<size_t>(), res.rows.size());
  EXPECT_EQ(out.at("failures").get<size_t>(), 0u);
  ASSERT_EQ(out.at("groups").size(), 2u);
  for (const auto& g : out.at("groups")) {
    const std::string method = g.at("method").get<std::string>();
    std::vector<double> l1;
    for (const auto& r : res.rows)
      if (r.method == method) l1.push_back(r.l1);
    ASSERT_EQ(g.at("usable").get<size_t>(), 5u);
    std::sort(l1.begin(), l1.end());
    EXPECT_DOUBLE_EQ(g.at("l1_median").get<double>(), l1[2]);
    EXPECT_DOUBLE_EQ(g.at("l1_q25").get<double>(), quantile(l1, 0.25));
  }
}

TEST(PlotData, UsesOnlyUsableRowsAndMatchesMedians) {
  std::vector<SweepRow> rows(4);
  for (auto& r : rows) {
    r.N = 100;
    r.seed = 0;
    r.method = "recover";
  }
  rows[0].l1 = 1.0;
  rows[0].status = "ok";
  rows[1].l1 = 3.0;
  rows[1].status = "degenerate";
  rows[2].l1 = 99.0;
  rows[2].status = "error:boom";
  rows[3].l1 = 99.0;
  rows[3].status = "timeout";
  const std::string path = tmp_path("plot.csv");
  emit_plot_data(rows, path);
  std::ifstream in(path);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  EXPECT_EQ(header, "N,method,median_l1,q25,q75");
  // Median over the usable rows {1, 3} only.
  EXPECT_EQ(line, "100,recover,2,1.5,2.5");
  std::string extra;
  EXPECT_FALSE(std::getline(in, extra));
}

}  // namespace
}  // namespace cooc
