#include "cooc/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cooc {

namespace {

using nlohmann::json;

HmmModel hmm_from_spec(const SweepModelSpec& spec) {
  HmmModel h;
  h.M = spec.M;
  h.t = spec.t;
  if (spec.emissions == "disjoint_uniform") {
    if (spec.M % 2 != 0)
      throw std::invalid_argument("disjoint_uniform emissions need even M");
    h.p = Eigen::VectorXd::Zero(spec.M);
    h.q = Eigen::VectorXd::Zero(spec.M);
    for (int i = 0; i < spec.M / 2; ++i) {
      h.p(i) = 2.0 / spec.M;
      h.q(i + spec.M / 2) = 2.0 / spec.M;
    }
  } else if (spec.emissions == "uniform") {
    h.p = Eigen::VectorXd::Constant(spec.M, 1.0 / spec.M);
    h.q = h.p;
  } else {
    throw std::invalid_argument("unknown emission layout: " + spec.emissions);
  }
  return h;
}

Model model_from_spec(const SweepModelSpec& spec, uint64_t seed) {
  if (spec.family == "sbm")
    return generate_sbm_model(spec.M, spec.R, spec.alpha, spec.beta);
  if (spec.family == "topic") {
    std::vector<double> mixing = spec.mixing;
    if (mixing.empty())
      mixing.assign(static_cast<size_t>(spec.R), 1.0 / spec.R);
    return generate_topic_model(spec.M, spec.R, mixing, spec.concentration,
                                seed);
  }
  if (spec.family == "hmm") return hmm_bigram_model(hmm_from_spec(spec));
  throw std::invalid_argument("unknown model family: " + spec.family);
}

std::string error_tag(const std::exception& e) {
  std::string what = e.what();
  for (char& c : what)
    if (c == ',' || c == '\n') c = ';';
  return "error:" + what;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }

  SweepConfig cfg;
  cfg.seed = j.at("seed").get<uint64_t>();
  cfg.experiment = j.at("experiment").get<std::string>();

  const auto& jm = j.at("model");
  cfg.model.family = jm.at("family").get<std::string>();
  cfg.model.M = jm.at("M").get<int>();
  if (jm.contains("R")) cfg.model.R = jm.at("R").get<int>();
  if (jm.contains("alpha")) cfg.model.alpha = jm.at("alpha").get<double>();
  if (jm.contains("beta")) cfg.model.beta = jm.at("beta").get<double>();
  if (jm.contains("mixing"))
    cfg.model.mixing = jm.at("mixing").get<std::vector<double>>();
  if (jm.contains("concentration"))
    cfg.model.concentration = jm.at("concentration").get<double>();
  if (jm.contains("t")) cfg.model.t = jm.at("t").get<double>();
  if (jm.contains("emissions"))
    cfg.model.emissions = jm.at("emissions").get<std::string>();

  cfg.N_grid = j.at("N_grid").get<std::vector<uint64_t>>();
  if (cfg.N_grid.empty()) throw std::runtime_error("config: empty N_grid");
  cfg.num_seeds = j.value("num_seeds", 1);
  if (cfg.num_seeds < 1) throw std::runtime_error("config: num_seeds < 1");
  cfg.methods = j.at("methods").get<std::vector<std::string>>();
  if (cfg.methods.empty()) throw std::runtime_error("config: empty methods");

  if (j.contains("scheme")) {
    const std::string s = j.at("scheme").get<std::string>();
    if (s == "poisson")
      cfg.scheme = SampleScheme::kPoisson;
    else if (s == "multinomial")
      cfg.scheme = SampleScheme::kMultinomial;
    else
      throw std::runtime_error("config: unknown scheme " + s);
  }

  if (j.contains("estimator")) {
    const auto& je = j.at("estimator");
    cfg.est.R = je.value("R", cfg.model.R > 0 ? cfg.model.R : 1);
    cfg.est.eps = je.value("eps", 0.1);
    cfg.est.w_min = je.value("w_min", 0.0);
    cfg.est.c0 = je.value("c0", 1.0);
    cfg.est.k0_override = je.value("k0_override", -1);
    cfg.est.bin_prune_coeff = je.value("bin_prune_coeff", 20.0);
  } else {
    cfg.est.R = cfg.model.R > 0 ? cfg.model.R : 1;
  }

  if (j.contains("hmm_params")) {
    const auto& jh = j.at("hmm_params");
    cfg.hmm.eps = jh.value("eps", 0.1);
    cfg.hmm.w_min = jh.value("w_min", 0.5);
    cfg.hmm.c0 = jh.value("c0", 1.0);
    cfg.hmm.k0_override = jh.value("k0_override", 1);
    cfg.hmm.bin_prune_coeff = jh.value("bin_prune_coeff", 20.0);
    cfg.hmm.tol_sep = jh.value("tol_sep", 1e-6);
  }

  cfg.cell_timeout_ms = j.value("cell_timeout_ms", 0.0);

  if (cfg.experiment != "estimator" && cfg.experiment != "hmm")
    throw std::runtime_error("config: unknown experiment " + cfg.experiment);
  for (const auto& m : cfg.methods) {
    const bool ok = cfg.experiment == "estimator"
                        ? (m == "recover" || m == "naive" || m == "scaled")
                        : m == "hmm_learn";
    if (!ok) throw std::runtime_error("config: method " + m +
                                      " not valid for experiment " + cfg.experiment);
  }
  return cfg;
}

SweepResult run_sweep(const SweepConfig& config) {
  SweepResult result;

  Model model;
  HmmModel chain;
  Eigen::MatrixXd truth;
  if (config.experiment == "estimator") {
    model = model_from_spec(config.model, config.seed);
    truth = model.bigram();
  } else {
    chain = hmm_from_spec(config.model);
  }

  for (uint64_t N : config.N_grid) {
    for (int s = 0; s < config.num_seeds; ++s) {
      const uint64_t cell_seed = config.seed + static_cast<uint64_t>(s);

      if (config.experiment == "estimator") {
        std::array<CountMatrix, 3> batches;
        bool sampled = false;
        for (const std::string& method : config.methods) {
          SweepRow row;
          row.N = N;
          row.seed = cell_seed;
          row.method = method;
          const auto t0 = std::chrono::steady_clock::now();
          try {
            if (!sampled) {
              batches = sample_batches(model, N, config.scheme, cell_seed);
              sampled = true;
            }
            Estimate est;
            if (method == "recover") {
              est = recover(batches[0], batches[1], batches[2], config.est);
              row.excluded_mass = est.report.excluded_mass;
            } else if (method == "naive") {
              est = baseline_naive(batches[1], config.est.R);
            } else {
              est = baseline_scaled(batches[0], batches[1], config.est.R);
            }
            const Eigen::MatrixXd dense = est.dense();
            row.l1 = l1_error(dense, truth);
            row.spec = spectral_error(dense, truth);
            row.runtime_ms = seconds_since(t0);
            row.status = "ok";
            if (config.cell_timeout_ms > 0.0 &&
                row.runtime_ms > config.cell_timeout_ms) {
              row.status = "timeout";
              ++result.failures;
            }
          } catch (const std::exception& e) {
            row.runtime_ms = seconds_since(t0);
            row.status = error_tag(e);
            ++result.failures;
          }
          result.rows.push_back(std::move(row));
        }
      } else {
        SweepRow row;
        row.N = N;
        row.seed = cell_seed;
        row.method = "hmm_learn";
        const auto t0 = std::chrono::steady_clock::now();
        try {
          std::vector<int> seq = hmm_sample_sequence(chain, N, cell_seed);
          HmmEstimate est = hmm_learn(seq, config.model.M, config.hmm);
          row.l1 = min_swap_emission_l1(est.p_hat, est.q_hat, chain.p, chain.q);
          row.spec = std::fabs(est.t_hat - chain.t);
          row.excluded_mass = est.report.excluded_mass;
          row.runtime_ms = seconds_since(t0);
          row.status = est.degenerate ? "degenerate" : "ok";
          if (config.cell_timeout_ms > 0.0 &&
              row.runtime_ms > config.cell_timeout_ms) {
            row.status = "timeout";
            ++result.failures;
          }
        } catch (const std::exception& e) {
          row.runtime_ms = seconds_since(t0);
          row.status = error_tag(e);
          ++result.failures;
        }
        result.rows.push_back(std::move(row));
      }
    }
  }

  std::sort(result.rows.begin(), result.rows.end(),
            [](const SweepRow& a, const SweepRow& b) {
              if (a.N != b.N) return a.N < b.N;
              if (a.seed != b.seed) return a.seed < b.seed;
              return a.method < b.method;
            });
  return result;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "N,seed,method,l1,spec,excluded_mass,runtime_ms,status\n";
  for (const auto& r : rows) {
    out << r.N << "," << r.seed << "," << r.method << "," << format_double(r.l1)
        << "," << format_double(r.spec) << "," << format_double(r.excluded_mass)
        << "," << format_double(r.runtime_ms) << "," << r.status << "\n";
  }
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = static_cast<size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

namespace {

json group_summary(const std::vector<SweepRow>& rows) {
  std::map<std::pair<uint64_t, std::string>, std::vector<const SweepRow*>> groups;
  for (const auto& r : rows) groups[{r.N, r.method}].push_back(&r);
  json out = json::array();
  for (const auto& [key, members] : groups) {
    std::vector<double> l1, spec;
    for (const SweepRow* r : members) {
      if (r->status == "ok" || r->status == "degenerate") {
        l1.push_back(r->l1);
        spec.push_back(r->spec);
      }
    }
    json g;
    g["N"] = key.first;
    g["method"] = key.second;
    g["count"] = members.size();
    g["usable"] = l1.size();
    if (!l1.empty()) {
      g["l1_median"] = quantile(l1, 0.5);
      g["l1_q25"] = quantile(l1, 0.25);
      g["l1_q75"] = quantile(l1, 0.75);
      g["spec_median"] = quantile(spec, 0.5);
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace

void write_sweep_summary(const SweepResult& result, const std::string& path) {
  json j;
  j["cells"] = result.rows.size();
  j["failures"] = result.failures;
  j["groups"] = group_summary(result.rows);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

void emit_plot_data(const std::vector<SweepRow>& rows, const std::string& path) {
  std::map<std::pair<uint64_t, std::string>, std::vector<double>> groups;
  for (const auto& r : rows)
    if (r.status == "ok" || r.status == "degenerate")
      groups[{r.N, r.method}].push_back(r.l1);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "N,method,median_l1,q25,q75\n";
  for (const auto& [key, values] : groups) {
    out << key.first << "," << key.second << "," << format_double(quantile(values, 0.5))
        << "," << format_double(quantile(values, 0.25)) << ","
        << format_double(quantile(values, 0.75)) << "\n";
  }
}

}  // namespace cooc
