// Command-line front end: model generation, sampling, estimation, the
// lower-bound calculators, and the sweep driver.  Exit codes: 0 success,
// 2 bad configuration or I/O, 3 sweep finished with failed cells.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cooc/estimator.hpp"
#include "cooc/hmm.hpp"
#include "cooc/io.hpp"
#include "cooc/lowerbound.hpp"
#include "cooc/models.hpp"
#include "cooc/sweep.hpp"

namespace {

int g_exit_code = 0;

std::ostream& full(std::ostream& os) {
  return os << std::setprecision(17);
}

cooc::HmmModel hmm_layout(int M, double t, const std::string& emissions) {
  cooc::HmmModel h;
  h.M = M;
  h.t = t;
  if (emissions == "disjoint_uniform") {
    if (M % 2 != 0)
      throw std::runtime_error("disjoint_uniform emissions need even M");
    h.p = Eigen::VectorXd::Zero(M);
    h.q = Eigen::VectorXd::Zero(M);
    for (int i = 0; i < M / 2; ++i) {
      h.p(i) = 2.0 / M;
      h.q(i + M / 2) = 2.0 / M;
    }
  } else if (emissions == "uniform") {
    h.p = Eigen::VectorXd::Constant(M, 1.0 / M);
    h.q = h.p;
  } else {
    throw std::runtime_error("unknown emission layout: " + emissions);
  }
  return h;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

void add_generate(CLI::App& app) {
  auto* cmd = app.add_subcommand("generate", "write a model file");
  auto family = std::make_shared<std::string>();
  auto M = std::make_shared<int>(0);
  auto R = std::make_shared<int>(2);
  auto alpha = std::make_shared<double>(3.0);
  auto beta = std::make_shared<double>(1.0);
  auto mixing = std::make_shared<std::vector<double>>();
  auto concentration = std::make_shared<double>(1.0);
  auto t = std::make_shared<double>(0.25);
  auto p = std::make_shared<std::vector<double>>();
  auto q = std::make_shared<std::vector<double>>();
  auto emissions = std::make_shared<std::string>("disjoint_uniform");
  auto seed = std::make_shared<uint64_t>(0);
  auto out = std::make_shared<std::string>();

  cmd->add_option("--family", *family, "sbm | topic | hmm")->required();
  cmd->add_option("--M", *M, "alphabet size")->required();
  cmd->add_option("--R", *R, "rank / number of components");
  cmd->add_option("--alpha", *alpha, "sbm in-community weight");
  cmd->add_option("--beta", *beta, "sbm cross-community weight");
  cmd->add_option("--mixing", *mixing, "topic mixing weights");
  cmd->add_option("--concentration", *concentration, "topic Dirichlet parameter");
  cmd->add_option("--t", *t, "chain switch probability");
  cmd->add_option("--p", *p, "chain emission distribution, state 1");
  cmd->add_option("--q", *q, "chain emission distribution, state 2");
  cmd->add_option("--emissions", *emissions,
                  "chain emission layout when --p/--q absent "
                  "(disjoint_uniform | uniform)");
  cmd->add_option("--seed", *seed, "generator seed (topic family)");
  cmd->add_option("--out", *out, "output model file")->required();

  cmd->callback([=]() {
    if (*family == "sbm") {
      cooc::io::write_model(cooc::generate_sbm_model(*M, *R, *alpha, *beta), *out);
    } else if (*family == "topic") {
      std::vector<double> mix = *mixing;
      if (mix.empty()) mix.assign(static_cast<size_t>(*R), 1.0 / *R);
      cooc::io::write_model(
          cooc::generate_topic_model(*M, *R, mix, *concentration, *seed), *out);
    } else if (*family == "hmm") {
      cooc::HmmModel h;
      if (!p->empty() || !q->empty()) {
        if (static_cast<int>(p->size()) != *M || static_cast<int>(q->size()) != *M)
          throw std::runtime_error("--p and --q must each list M probabilities");
        h.M = *M;
        h.t = *t;
        h.p = to_vector(*p);
        h.q = to_vector(*q);
      } else {
        h = hmm_layout(*M, *t, *emissions);
      }
      cooc::io::write_hmm_model(h, *out);
    } else {
      throw std::runtime_error("unknown family: " + *family);
    }
    std::cout << "wrote " << *out << "\n";
  });
}

void add_sample(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "sample", "draw counts (or a chain sequence) from a model file");
  auto model_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto N = std::make_shared<uint64_t>(0);
  auto length = std::make_shared<uint64_t>(0);
  auto scheme_name = std::make_shared<std::string>("poisson");
  auto seed = std::make_shared<uint64_t>(0);
  auto triple = std::make_shared<bool>(false);
  auto batch_id = std::make_shared<int>(0);

  cmd->add_option("--model", *model_path, "model file")->required();
  cmd->add_option("--out", *out, "output path (prefix with --triple)")->required();
  cmd->add_option("--N", *N, "nominal pair count per batch");
  cmd->add_option("--length", *length, "sequence length (chain models)");
  cmd->add_option("--scheme", *scheme_name, "poisson | multinomial");
  cmd->add_option("--seed", *seed, "sampling seed");
  cmd->add_flag("--triple", *triple, "write three batches <out>.b{1,2,3}");
  cmd->add_option("--batch-id", *batch_id, "batch tag for a single draw");

  cmd->callback([=]() {
    const std::string family = cooc::io::model_family(*model_path);
    if (family == "hmm") {
      if (*length == 0) throw std::runtime_error("chain sampling needs --length");
      const cooc::HmmModel h = cooc::io::read_hmm_model(*model_path);
      cooc::io::write_sequence(cooc::hmm_sample_sequence(h, *length, *seed), *out);
      std::cout << "wrote " << *out << " (" << *length << " symbols)\n";
      return;
    }
    if (*N == 0) throw std::runtime_error("count sampling needs --N");
    cooc::SampleScheme scheme;
    if (*scheme_name == "poisson")
      scheme = cooc::SampleScheme::kPoisson;
    else if (*scheme_name == "multinomial")
      scheme = cooc::SampleScheme::kMultinomial;
    else
      throw std::runtime_error("unknown scheme: " + *scheme_name);
    const cooc::Model m = cooc::io::read_model(*model_path);
    if (*triple) {
      const auto batches = cooc::sample_batches(m, *N, scheme, *seed);
      for (int b = 0; b < 3; ++b) {
        const std::string path = *out + ".b" + std::to_string(b + 1);
        cooc::io::write_counts(batches[static_cast<size_t>(b)], path);
        std::cout << "wrote " << path << "\n";
      }
    } else {
      cooc::io::write_counts(cooc::sample_counts(m, *N, scheme, *seed, *batch_id),
                             *out);
      std::cout << "wrote " << *out << "\n";
    }
  });
}

void report_metrics(const cooc::Estimate& est, const std::string& truth_path,
                    std::map<std::string, double>& metrics) {
  const cooc::Model truth = cooc::io::read_model(truth_path);
  const Eigen::MatrixXd B = truth.bigram();
  const Eigen::MatrixXd Bhat = est.dense();
  metrics["l1"] = cooc::l1_error(Bhat, B);
  metrics["spec"] = cooc::spectral_error(Bhat, B);
}

void add_estimate(CLI::App& app) {
  auto* cmd = app.add_subcommand("estimate",
                                 "run the regularized estimator on three batches");
  auto counts = std::make_shared<std::vector<std::string>>();
  auto out = std::make_shared<std::string>();
  auto report_path = std::make_shared<std::string>();
  auto truth = std::make_shared<std::string>();
  auto params = std::make_shared<cooc::EstimatorParams>();

  cmd->add_option("--counts", *counts, "the three count batches")
      ->required()
      ->expected(3);
  cmd->add_option("--R", params->R, "target rank");
  cmd->add_option("--eps", params->eps, "accuracy parameter inside k0");
  cmd->add_option("--wmin", params->w_min,
                  "mixing-weight lower bound (<=0: 1/R heuristic)");
  cmd->add_option("--c0", params->c0, "constant inside k0");
  cmd->add_option("--k0", params->k0_override, "fixed low-bin cutoff (>=0)");
  cmd->add_option("--prune-coeff", params->bin_prune_coeff,
                  "bin size-test coefficient");
  cmd->add_option("--out", *out, "estimate output file");
  cmd->add_option("--report", *report_path, "diagnostic report (JSON)");
  cmd->add_option("--truth", *truth, "model file to score against");

  cmd->callback([=]() {
    const cooc::Estimate est = cooc::recover(
        cooc::io::read_counts((*counts)[0]), cooc::io::read_counts((*counts)[1]),
        cooc::io::read_counts((*counts)[2]), *params);
    std::map<std::string, double> metrics;
    if (!truth->empty()) report_metrics(est, *truth, metrics);
    if (!out->empty()) cooc::io::write_estimate(est, *out);
    if (!report_path->empty()) cooc::io::write_report(est.report, metrics, *report_path);
    std::cout << "rank " << est.rank() << ", excluded " << est.report.excluded_count
              << " words (mass " << est.report.excluded_mass << "), "
              << est.report.runtime_ms << " ms";
    for (const auto& [k, v] : metrics) std::cout << ", " << k << " " << v;
    std::cout << "\n";
  });
}

void add_baseline(CLI::App& app) {
  auto* cmd = app.add_subcommand("baseline", "truncated-SVD reference estimators");
  auto method = std::make_shared<std::string>();
  auto counts = std::make_shared<std::string>();
  auto c1 = std::make_shared<std::string>();
  auto c2 = std::make_shared<std::string>();
  auto R = std::make_shared<int>(2);
  auto out = std::make_shared<std::string>();
  auto truth = std::make_shared<std::string>();
  auto metrics_path = std::make_shared<std::string>();

  cmd->add_option("--method", *method, "naive | scaled")->required();
  cmd->add_option("--counts", *counts, "count file (naive)");
  cmd->add_option("--c1", *c1, "marginal batch (scaled)");
  cmd->add_option("--c2", *c2, "target batch (scaled)");
  cmd->add_option("--R", *R, "target rank");
  cmd->add_option("--out", *out, "estimate output file");
  cmd->add_option("--truth", *truth, "model file to score against");
  cmd->add_option("--metrics", *metrics_path, "metrics output file (JSON)");

  cmd->callback([=]() {
    cooc::Estimate est;
    if (*method == "naive") {
      if (counts->empty()) throw std::runtime_error("naive needs --counts");
      est = cooc::baseline_naive(cooc::io::read_counts(*counts), *R);
    } else if (*method == "scaled") {
      if (c1->empty() || c2->empty())
        throw std::runtime_error("scaled needs --c1 and --c2");
      est = cooc::baseline_scaled(cooc::io::read_counts(*c1),
                                  cooc::io::read_counts(*c2), *R);
    } else {
      throw std::runtime_error("unknown method: " + *method);
    }
    std::map<std::string, double> metrics;
    if (!truth->empty()) report_metrics(est, *truth, metrics);
    if (!out->empty()) cooc::io::write_estimate(est, *out);
    if (!metrics_path->empty()) cooc::io::write_metrics(metrics, *metrics_path);
    std::cout << *method << " rank " << est.rank();
    for (const auto& [k, v] : metrics) std::cout << ", " << k << " " << v;
    std::cout << "\n";
  });
}

void add_hmm_learn(CLI::App& app) {
  auto* cmd = app.add_subcommand("hmm-learn",
                                 "estimate a two-state chain from one sequence");
  auto seq_path = std::make_shared<std::string>();
  auto M = std::make_shared<int>(0);
  auto out = std::make_shared<std::string>();
  auto truth = std::make_shared<std::string>();
  auto metrics_path = std::make_shared<std::string>();
  auto params = std::make_shared<cooc::HmmLearnParams>();

  cmd->add_option("--sequence,--seq", *seq_path, "sequence file")->required();
  cmd->add_option("--M", *M, "alphabet size")->required();
  cmd->add_option("--eps", params->eps, "accuracy parameter inside k0");
  cmd->add_option("--wmin", params->w_min, "state-weight lower bound");
  cmd->add_option("--c0", params->c0, "constant inside k0");
  cmd->add_option("--k0", params->k0_override, "fixed low-bin cutoff");
  cmd->add_option("--prune-coeff", params->bin_prune_coeff,
                  "bin size-test coefficient");
  cmd->add_option("--tol-sep", params->tol_sep, "moment-separation floor");
  cmd->add_option("--out", *out, "estimate output file (JSON)");
  cmd->add_option("--truth", *truth, "chain model file to score against");
  cmd->add_option("--metrics", *metrics_path, "metrics output file (JSON)");

  cmd->callback([=]() {
    const std::vector<int> seq = cooc::io::read_sequence(*seq_path);
    const cooc::HmmEstimate est = cooc::hmm_learn(seq, *M, *params);
    std::map<std::string, double> metrics;
    metrics["t_hat"] = est.t_hat;
    metrics["degenerate"] = est.degenerate ? 1.0 : 0.0;
    if (!truth->empty()) {
      const cooc::HmmModel h = cooc::io::read_hmm_model(*truth);
      metrics["t_abs_err"] = std::abs(est.t_hat - h.t);
      metrics["emission_l1"] =
          cooc::min_swap_emission_l1(est.p_hat, est.q_hat, h.p, h.q);
    }
    if (!out->empty()) cooc::io::write_hmm_estimate(est, *out);
    if (!metrics_path->empty()) cooc::io::write_metrics(metrics, *metrics_path);
    std::cout << "t_hat " << est.t_hat
              << (est.degenerate ? " (degenerate: " + est.failure + ")" : "");
    for (const auto& [k, v] : metrics)
      if (k != "t_hat" && k != "degenerate") std::cout << ", " << k << " " << v;
    std::cout << "\n";
  });
}

void add_lb(CLI::App& app) {
  auto* cmd = app.add_subcommand("lb", "lower-bound calculators");
  cmd->require_subcommand(1);

  {
    auto* sub = cmd->add_subcommand("bound", "total-variation upper bound");
    auto c = std::make_shared<double>(0.0);
    sub->add_option("--c", *c, "limit second moment parameter, in [0, 3/2)")
        ->required();
    sub->callback([=]() {
      full(std::cout) << "{\"c\": " << *c << ", \"tv_bound\": " << cooc::tv_bound(*c)
                      << "}\n";
    });
  }
  {
    auto* sub = cmd->add_subcommand(
        "oracle", "cross-moment triple-agreement table (CSV)");
    auto n = std::make_shared<int>(0);
    auto k = std::make_shared<int>(0);
    auto a = std::make_shared<int>(-1);
    auto skip_brute = std::make_shared<bool>(false);
    sub->add_option("--n", *n, "alphabet size (even)")->required();
    sub->add_option("--k", *k, "sequence length")->required();
    sub->add_option("--a", *a, "overlap count in 0..n/2 (default: all)");
    sub->add_flag("--skip-brute", *skip_brute,
                  "skip the exhaustive oracle (large n^k)");
    sub->callback([=]() {
      std::vector<int> overlaps;
      if (*a >= 0)
        overlaps.push_back(*a);
      else
        for (int i = 0; i <= *n / 2; ++i) overlaps.push_back(i);
      std::cout << "a,p,closed,recurrence,brute\n";
      for (int ov : overlaps) {
        const double p = 2.0 * ov / *n;
        full(std::cout) << ov << "," << p << ","
                        << cooc::r_closed_form(p, *k, *n).value << ","
                        << cooc::r_recurrence(p, *k, *n);
        if (*skip_brute)
          std::cout << ",";
        else
          full(std::cout) << "," << cooc::r_bruteforce(ov, *k, *n);
        std::cout << "\n";
      }
    });
  }
  {
    auto* sub = cmd->add_subcommand("variance", "exact E[Y_n^2]");
    auto n = std::make_shared<int>(0);
    auto k = std::make_shared<int>(-1);
    auto c = std::make_shared<double>(-1.0);
    sub->add_option("--n", *n, "alphabet size (even, <= 64)")->required();
    sub->add_option("--k", *k, "sequence length");
    sub->add_option("--c", *c, "length ratio; sets k = floor(c*n)");
    sub->callback([=]() {
      if (*k < 0 && *c < 0.0)
        throw std::runtime_error("variance needs --k or --c");
      const int kk = *k >= 0 ? *k : static_cast<int>(*c * *n);
      const double ey2 = cooc::variance_sum(*n, kk);
      const double cc = 2.0 * kk * kk / (static_cast<double>(*n) * *n);
      full(std::cout) << "{\"n\": " << *n << ", \"k\": " << kk << ", \"c\": " << cc
                      << ", \"ey2\": " << ey2;
      if (ey2 >= 1.0) full(std::cout) << ", \"tv\": " << 0.5 * std::sqrt(ey2 - 1.0);
      if (cc < 1.5)
        full(std::cout) << ", \"limit_bound\": "
                        << std::sqrt(2.0 / (2.0 - 4.0 * cc / 3.0));
      std::cout << "}\n";
    });
  }
  {
    auto* sub = cmd->add_subcommand("mc", "Monte-Carlo E[Y_n] under the null");
    auto n = std::make_shared<int>(0);
    auto k = std::make_shared<int>(0);
    auto trials = std::make_shared<uint64_t>(10000);
    auto seed = std::make_shared<uint64_t>(0);
    sub->add_option("--n", *n, "alphabet size (even, <= 16)")->required();
    sub->add_option("--k", *k, "sequence length")->required();
    sub->add_option("--trials", *trials, "number of draws");
    sub->add_option("--seed", *seed, "sampling seed");
    sub->callback([=]() {
      const cooc::YnStats st = cooc::sample_Yn(*n, *k, *trials, *seed);
      full(std::cout) << "{\"n\": " << *n << ", \"k\": " << *k << ", \"trials\": "
                      << st.trials << ", \"mean\": " << st.mean
                      << ", \"variance\": " << st.variance << ", \"ci\": ["
                      << st.ci_low << ", " << st.ci_high << "]}\n";
    });
  }
}

void add_bench(CLI::App& app) {
  auto* cmd = app.add_subcommand("bench", "run a configured sweep");
  auto config_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto summary = std::make_shared<std::string>();
  auto plot = std::make_shared<std::string>();

  cmd->add_option("--config", *config_path, "sweep config (JSON)")->required();
  cmd->add_option("--out", *out, "result CSV")->required();
  cmd->add_option("--summary", *summary, "summary JSON (default <out>.summary.json)");
  cmd->add_option("--plot", *plot, "plot-data CSV (default <out>.plot.csv)");

  cmd->callback([=]() {
    const cooc::SweepConfig cfg = cooc::load_sweep_config(*config_path);
    const cooc::SweepResult result = cooc::run_sweep(cfg);
    cooc::write_sweep_csv(result.rows, *out);
    cooc::write_sweep_summary(result,
                              summary->empty() ? *out + ".summary.json" : *summary);
    cooc::emit_plot_data(result.rows, plot->empty() ? *out + ".plot.csv" : *plot);
    std::cout << result.rows.size() << " rows, " << result.failures
              << " failed cells\n";
    if (result.failures > 0) g_exit_code = 3;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"low-rank co-occurrence estimation and distinguishing bounds"};
  app.require_subcommand(1);

  add_generate(app);
  add_sample(app);
  add_estimate(app);
  add_baseline(app);
  add_hmm_learn(app);
  add_lb(app);
  add_bench(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return g_exit_code;
}
