#include "cooc/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cooc::io {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

json matrix_columns(const Eigen::MatrixXd& A) {
  json cols = json::array();
  for (int c = 0; c < A.cols(); ++c) {
    json col = json::array();
    for (int r = 0; r < A.rows(); ++r) col.push_back(A(r, c));
    cols.push_back(std::move(col));
  }
  return cols;
}

Eigen::MatrixXd columns_matrix(const json& cols, int rows) {
  Eigen::MatrixXd A(rows, static_cast<int>(cols.size()));
  for (int c = 0; c < A.cols(); ++c) {
    const auto& col = cols.at(c);
    if (static_cast<int>(col.size()) != rows)
      throw std::runtime_error("matrix column length mismatch");
    for (int r = 0; r < rows; ++r) A(r, c) = col.at(r).get<double>();
  }
  return A;
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd json_vector(const json& a) {
  Eigen::VectorXd v(static_cast<int>(a.size()));
  for (int i = 0; i < v.size(); ++i) v(i) = a.at(i).get<double>();
  return v;
}

std::string scheme_name(SampleScheme s) {
  return s == SampleScheme::kPoisson ? "poisson" : "multinomial";
}

SampleScheme scheme_from_name(const std::string& s) {
  if (s == "poisson") return SampleScheme::kPoisson;
  if (s == "multinomial") return SampleScheme::kMultinomial;
  throw std::runtime_error("unknown sampling scheme: " + s);
}

}  // namespace

void write_model(const Model& m, const std::string& path) {
  json j;
  j["M"] = m.M;
  j["R"] = m.R;
  j["family"] = m.family;
  j["P"] = matrix_columns(m.P);
  json W = json::array();
  for (int r = 0; r < m.W.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.W.cols(); ++c) row.push_back(m.W(r, c));
    W.push_back(std::move(row));
  }
  j["W"] = W;
  j["params"] = m.params;
  save_json(j, path);
}

Model read_model(const std::string& path) {
  json j = load_json(path);
  Model m;
  m.M = j.at("M").get<int>();
  m.R = j.at("R").get<int>();
  m.family = j.at("family").get<std::string>();
  m.P = columns_matrix(j.at("P"), m.M);
  const auto& W = j.at("W");
  m.W = Eigen::MatrixXd(static_cast<int>(W.size()), m.R);
  for (int r = 0; r < m.W.rows(); ++r)
    for (int c = 0; c < m.W.cols(); ++c)
      m.W(r, c) = W.at(r).at(c).get<double>();
  if (j.contains("params"))
    m.params = j.at("params").get<std::map<std::string, double>>();
  return m;
}

void write_hmm_model(const HmmModel& h, const std::string& path) {
  json j;
  j["family"] = "hmm";
  j["M"] = h.M;
  j["t"] = h.t;
  j["p"] = vector_json(h.p);
  j["q"] = vector_json(h.q);
  save_json(j, path);
}

HmmModel read_hmm_model(const std::string& path) {
  json j = load_json(path);
  if (j.at("family").get<std::string>() != "hmm")
    throw std::runtime_error(path + " is not a chain model file");
  HmmModel h;
  h.M = j.at("M").get<int>();
  h.t = j.at("t").get<double>();
  h.p = json_vector(j.at("p"));
  h.q = json_vector(j.at("q"));
  return h;
}

std::string model_family(const std::string& path) {
  return load_json(path).at("family").get<std::string>();
}

void write_counts(const CountMatrix& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << c.M << " " << c.nominal_N << " " << scheme_name(c.scheme) << " "
      << c.batch_id << "\n";
  for (const auto& e : c.entries)
    out << e.i << " " << e.j << " " << e.c << "\n";
}

CountMatrix read_counts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  CountMatrix c;
  std::string scheme;
  if (!(in >> c.M >> c.nominal_N >> scheme >> c.batch_id))
    throw std::runtime_error(path + ": bad count header");
  c.scheme = scheme_from_name(scheme);
  CountMatrix::Entry e;
  long long last_i = -1, last_j = -1;
  while (in >> e.i >> e.j >> e.c) {
    if (e.i < 0 || e.i >= c.M || e.j < 0 || e.j >= c.M)
      throw std::runtime_error(path + ": index out of range");
    if (e.i < last_i || (e.i == last_i && e.j <= last_j))
      throw std::runtime_error(path + ": entries not ascending");
    last_i = e.i;
    last_j = e.j;
    c.entries.push_back(e);
  }
  return c;
}

void write_sequence(const std::vector<int>& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (int s : seq) out << s << "\n";
}

std::vector<int> read_sequence(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<int> seq;
  int s;
  while (in >> s) seq.push_back(s);
  return seq;
}

void write_estimate(const Estimate& est, const std::string& path) {
  json j;
  j["M"] = est.M;
  j["rank"] = est.rank();
  j["U"] = matrix_columns(est.U);
  j["S"] = vector_json(est.S);
  j["V"] = matrix_columns(est.V);
  j["d"] = vector_json(est.d);
  json excl = json::array();
  for (int i = 0; i < est.M; ++i)
    if (est.excluded.size() > static_cast<size_t>(i) && est.excluded[i])
      excl.push_back(i);
  j["excluded"] = excl;
  save_json(j, path);
}

Estimate read_estimate(const std::string& path) {
  json j = load_json(path);
  Estimate est;
  est.M = j.at("M").get<int>();
  est.U = columns_matrix(j.at("U"), est.M);
  est.S = json_vector(j.at("S"));
  est.V = columns_matrix(j.at("V"), est.M);
  est.d = json_vector(j.at("d"));
  est.excluded.assign(est.M, 0);
  for (const auto& i : j.at("excluded")) est.excluded[i.get<int>()] = 1;
  return est;
}

void write_report(const RecoverReport& report,
                  const std::map<std::string, double>& metrics,
                  const std::string& path) {
  json j;
  j["N"] = report.N;
  j["M"] = report.M;
  j["K"] = report.K;
  j["k0"] = report.k0;
  j["w_min_defaulted"] = report.w_min_defaulted;
  j["all_excluded"] = report.all_excluded;
  json bins = json::array();
  for (const auto& b : report.bins) {
    bins.push_back({{"k", b.k},
                    {"size", b.size},
                    {"rho_bar", b.rho_bar},
                    {"pruned", b.pruned},
                    {"zeroed_rule1", b.zeroed_rule1},
                    {"zeroed_rule2", b.zeroed_rule2}});
  }
  j["bins"] = bins;
  j["excluded_count"] = report.excluded_count;
  j["excluded_mass"] = report.excluded_mass;
  j["singular_values"] = report.singular_values;
  j["runtime_ms"] = report.runtime_ms;
  if (!metrics.empty()) j["metrics"] = metrics;
  save_json(j, path);
}

void write_hmm_estimate(const HmmEstimate& est, const std::string& path) {
  json j;
  j["M"] = est.M;
  j["degenerate"] = est.degenerate;
  if (!est.failure.empty()) j["failure"] = est.failure;
  if (!est.warning.empty()) j["warning"] = est.warning;
  j["t_hat"] = est.t_hat;
  j["lambda"] = est.lambda;
  j["delta_s_sq"] = est.delta_s_sq;
  j["p_hat"] = vector_json(est.p_hat);
  j["q_hat"] = vector_json(est.q_hat);
  j["delta_hat"] = vector_json(est.delta_hat);
  j["rho_hat"] = vector_json(est.rho_hat);
  json anchor = json::array();
  for (int i = 0; i < est.M; ++i)
    if (est.anchor_set.size() > static_cast<size_t>(i) && est.anchor_set[i])
      anchor.push_back(i);
  j["anchor_set"] = anchor;
  j["moments"] = {{"m", est.moments.m}, {"b2", est.moments.b2}, {"t3", est.moments.t3}};
  j["excluded_count"] = est.report.excluded_count;
  j["excluded_mass"] = est.report.excluded_mass;
  save_json(j, path);
}

void write_metrics(const std::map<std::string, double>& metrics,
                   const std::string& path) {
  json j = metrics;
  save_json(j, path);
}

}  // namespace cooc::io
