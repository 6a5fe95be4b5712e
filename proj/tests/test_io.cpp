#include "cooc/io.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

#include "cooc/estimator.hpp"
#include "cooc/hmm.hpp"
#include "cooc/models.hpp"

namespace cooc {
namespace {

std::string tmp_path(const std::string& name) {
  return ::testing::TempDir() + name;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  ASSERT_TRUE(out.is_open());
  out << body;
}

TEST(ModelIo, RoundTripPreservesEveryField) {
  const Model m = generate_topic_model(12, 3, {0.5, 0.3, 0.2}, 0.8, 99);
  const std::string path = tmp_path("model.json");
  io::write_model(m, path);
  const Model back = io::read_model(path);
  EXPECT_EQ(back.M, m.M);
  EXPECT_EQ(back.R, m.R);
  EXPECT_EQ(back.family, m.family);
  EXPECT_TRUE(back.P == m.P);  // JSON doubles round-trip exactly
  EXPECT_TRUE(back.W == m.W);
  EXPECT_EQ(back.params, m.params);
  EXPECT_EQ(io::model_family(path), "topic");
}

TEST(ModelIo, ChainModelRoundTripAndFamilyCheck) {
  HmmModel h;
  h.M = 4;
  h.t = 0.3;
  h.p = Eigen::VectorXd::Zero(4);
  h.q = Eigen::VectorXd::Zero(4);
  h.p << 0.5, 0.5, 0.0, 0.0;
  h.q << 0.0, 0.0, 0.25, 0.75;
  const std::string path = tmp_path("chain.json");
  io::write_hmm_model(h, path);
  const HmmModel back = io::read_hmm_model(path);
  EXPECT_EQ(back.M, 4);
  EXPECT_DOUBLE_EQ(back.t, 0.3);
  EXPECT_TRUE(back.p == h.p);
  EXPECT_TRUE(back.q == h.q);
  EXPECT_EQ(io::model_family(path), "hmm");

  const std::string wrong = tmp_path("not_chain.json");
  io::write_model(generate_sbm_model(8, 2, 2.0, 1.0), wrong);
  EXPECT_THROW(io::read_hmm_model(wrong), std::runtime_error);
}

TEST(CountsIo, RoundTripBothSchemes) {
  const Model m = generate_sbm_model(10, 2, 3.0, 1.0);
  for (auto scheme : {SampleScheme::kPoisson, SampleScheme::kMultinomial}) {
    CountMatrix c = sample_counts(m, 2000, scheme, 7, 2);
    const std::string path = tmp_path("counts.coo");
    io::write_counts(c, path);
    const CountMatrix back = io::read_counts(path);
    EXPECT_EQ(back.M, c.M);
    EXPECT_EQ(back.nominal_N, c.nominal_N);
    EXPECT_EQ(back.scheme, c.scheme);
    EXPECT_EQ(back.batch_id, c.batch_id);
    ASSERT_EQ(back.entries.size(), c.entries.size());
    for (size_t e = 0; e < c.entries.size(); ++e) {
      EXPECT_EQ(back.entries[e].i, c.entries[e].i);
      EXPECT_EQ(back.entries[e].j, c.entries[e].j);
      EXPECT_EQ(back.entries[e].c, c.entries[e].c);
    }
  }
}

TEST(CountsIo, RejectsMalformedFiles) {
  const std::string bad_header = tmp_path("bad_header.coo");
  write_text(bad_header, "10 not_a_number poisson 0\n");
  EXPECT_THROW(io::read_counts(bad_header), std::runtime_error);

  const std::string bad_scheme = tmp_path("bad_scheme.coo");
  write_text(bad_scheme, "10 100 gaussian 0\n0 0 5\n");
  EXPECT_THROW(io::read_counts(bad_scheme), std::runtime_error);

  const std::string out_of_range = tmp_path("oor.coo");
  write_text(out_of_range, "4 100 poisson 0\n0 9 5\n");
  EXPECT_THROW(io::read_counts(out_of_range), std::runtime_error);

  const std::string unsorted = tmp_path("unsorted.coo");
  write_text(unsorted, "4 100 poisson 0\n1 1 5\n0 0 3\n");
  EXPECT_THROW(io::read_counts(unsorted), std::runtime_error);

  const std::string duplicate = tmp_path("dup.coo");
  write_text(duplicate, "4 100 poisson 0\n1 1 5\n1 1 3\n");
  EXPECT_THROW(io::read_counts(duplicate), std::runtime_error);

  EXPECT_THROW(io::read_counts(tmp_path("missing.coo")), std::runtime_error);
}

TEST(SequenceIo, RoundTrip) {
  const std::vector<int> seq{3, 1, 4, 1, 5, 9, 2, 6};
  const std::string path = tmp_path("seq.txt");
  io::write_sequence(seq, path);
  EXPECT_EQ(io::read_sequence(path), seq);
}

TEST(EstimateIo, RoundTripReconstructsDenseMatrix) {
  const Model m = generate_sbm_model(20, 2, 3.0, 1.0);
  const auto b = sample_batches(m, 20000, SampleScheme::kPoisson, 3);
  EstimatorParams p;
  p.R = 2;
  p.w_min = 0.5;
  p.k0_override = 1;
  const Estimate est = recover(b[0], b[1], b[2], p);
  const std::string path = tmp_path("estimate.json");
  io::write_estimate(est, path);
  const Estimate back = io::read_estimate(path);
  EXPECT_EQ(back.M, est.M);
  EXPECT_TRUE(back.U == est.U);
  EXPECT_TRUE(back.S == est.S);
  EXPECT_TRUE(back.V == est.V);
  EXPECT_TRUE(back.d == est.d);
  EXPECT_EQ(back.excluded, est.excluded);
  EXPECT_TRUE(back.dense() == est.dense());
}

TEST(ReportIo, EmitsParsableJsonWithMetrics) {
  const Model m = generate_sbm_model(20, 2, 3.0, 1.0);
  const auto b = sample_batches(m, 20000, SampleScheme::kPoisson, 3);
  EstimatorParams p;
  p.R = 2;
  p.w_min = 0.5;
  p.k0_override = 1;
  const Estimate est = recover(b[0], b[1], b[2], p);
  const std::string path = tmp_path("report.json");
  io::write_report(est.report, {{"l1", 0.25}, {"spec", 0.01}}, path);

  std::ifstream in(path);
  ASSERT_TRUE(in.is_open());
  nlohmann::json j;
  in >> j;
  EXPECT_EQ(j.at("M").get<int>(), 20);
  EXPECT_EQ(j.at("N").get<uint64_t>(), 20000u);
  EXPECT_EQ(j.at("bins").size(), static_cast<size_t>(est.report.K));
  EXPECT_DOUBLE_EQ(j.at("metrics").at("l1").get<double>(), 0.25);
  EXPECT_TRUE(j.contains("singular_values"));
}

TEST(HmmEstimateIo, EmitsParsableJson) {
  HmmModel h;
  h.M = 10;
  h.t = 0.25;
  h.p = Eigen::VectorXd::Zero(10);
  h.q = Eigen::VectorXd::Zero(10);
  for (int i = 0; i < 5; ++i) h.p(i) = 0.2;
  for (int i = 5; i < 10; ++i) h.q(i) = 0.2;
  const std::vector<int> seq = hmm_sample_sequence(h, 100000, 5);
  const HmmEstimate est = hmm_learn(seq, h.M, HmmLearnParams{});
  const std::string path = tmp_path("hmm_est.json");
  io::write_hmm_estimate(est, path);

  std::ifstream in(path);
  ASSERT_TRUE(in.is_open());
  nlohmann::json j;
  in >> j;
  EXPECT_EQ(j.at("M").get<int>(), 10);
  EXPECT_DOUBLE_EQ(j.at("t_hat").get<double>(), est.t_hat);
  EXPECT_EQ(j.at("p_hat").size(), 10u);
  EXPECT_TRUE(j.at("moments").contains("b2"));
  size_t anchors = 0;
  for (char a : est.anchor_set) anchors += a != 0;
  EXPECT_EQ(j.at("anchor_set").size(), anchors);
}

TEST(MetricsIo, WritesFlatMap) {
  const std::string path = tmp_path("metrics.json");
  io::write_metrics({{"a", 1.5}, {"b", -2.0}}, path);
  std::ifstream in(path);
  nlohmann::json j;
  in >> j;
  EXPECT_DOUBLE_EQ(j.at("a").get<double>(), 1.5);
  EXPECT_DOUBLE_EQ(j.at("b").get<double>(), -2.0);
}

TEST(IoErrors, MissingAndUnwritablePaths) {
  EXPECT_THROW(io::read_model(tmp_path("nope.json")), std::runtime_error);
  EXPECT_THROW(io::read_sequence(tmp_path("nope.txt")), std::runtime_error);
  const Model m = generate_sbm_model(4, 2, 1.0, 1.0);
  EXPECT_THROW(io::write_model(m, "/nonexistent_dir/model.json"),
               std::runtime_error);
  EXPECT_THROW(io::write_counts(CountMatrix{}, "/nonexistent_dir/c.coo"),
               std::runtime_error);
}

}  // namespace
}  // namespace cooc
