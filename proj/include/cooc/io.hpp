#pragma once

#include <map>
#include <string>
#include <vector>

#include "cooc/estimator.hpp"
#include "cooc/hmm.hpp"
#include "cooc/models.hpp"

namespace cooc::io {

// Model files are JSON: {M, R, family, P (list of R columns), W (list of R
// rows), params}.  Chain models use {family:"hmm", M, t, p, q}.
void write_model(const Model& m, const std::string& path);
Model read_model(const std::string& path);
void write_hmm_model(const HmmModel& h, const std::string& path);
HmmModel read_hmm_model(const std::string& path);
// Peeks at the "family" field so callers can dispatch.
std::string model_family(const std::string& path);

// Count files are text COO: header `M nominal_N scheme batch_id`, then
// `i j count` per line, 0-based with strictly ascending (i, j).
void write_counts(const CountMatrix& c, const std::string& path);
CountMatrix read_counts(const std::string& path);

// Sequence files: one integer symbol per line.
void write_sequence(const std::vector<int>& seq, const std::string& path);
std::vector<int> read_sequence(const std::string& path);

// Estimate files: factors, scaling diagonal, and the excluded-word mask.
void write_estimate(const Estimate& est, const std::string& path);
Estimate read_estimate(const std::string& path);

// Diagnostic report plus any computed error metrics.
void write_report(const RecoverReport& report,
                  const std::map<std::string, double>& metrics,
                  const std::string& path);

void write_hmm_estimate(const HmmEstimate& est, const std::string& path);

void write_metrics(const std::map<std::string, double>& metrics,
                   const std::string& path);

}  // namespace cooc::io
