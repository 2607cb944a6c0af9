#pragma once

#include <span>
#include <string>
#include <vector>

#include "rgr/trainer.hpp"

namespace rgr {

enum class ProbeEstimator { OnPolicy, Mix, MixWithEA };

std::string estimator_name(ProbeEstimator est);

struct ProbeConfig {
  int trials = 1000;       // independent group resamples per question (>= 100)
  int bootstrap = 2000;    // bootstrap resamples for CIs
  uint64_t seed = 0;
  int workers = 1;
  // Group construction mirrors the trainer.
  TrainerConfig trainer;
};

struct VarianceSummary {
  ProbeEstimator estimator = ProbeEstimator::OnPolicy;
  int trials = 0;
  double trace = 0.0;          // unbiased estimate of tr Cov(g)
  double trace_ci_lo = 0.0;    // bootstrap 95% CI
  double trace_ci_hi = 0.0;
  double mean_grad_norm = 0.0;
};

struct ProbeComparison {
  ProbeEstimator a = ProbeEstimator::Mix;
  ProbeEstimator b = ProbeEstimator::OnPolicy;
  double trace_diff = 0.0;        // trace(a) - trace(b)
  double confidence_a_ge_b = 0.0; // bootstrap P(trace(a) >= trace(b))
};

struct ProbeReport {
  std::vector<VarianceSummary> summaries;
  std::vector<ProbeComparison> comparisons;
};

/// Gradient-variance probe: with params frozen, resamples `trials` independent
/// groups per question under one estimator and measures the spread of the
/// resulting batch gradient.
///
/// The trace of the gradient covariance is estimated without materializing
/// per-coordinate statistics: trials are consumed in independent pairs
/// (g, g'), and E ||g - g'||^2 / 2 equals the coordinate-wise variance summed
/// over all coordinates. The per-pair scalars feed a percentile bootstrap.
VarianceSummary gradient_variance_probe(const PolicyParams& params,
                                        std::span<const TaskInstance> questions, Judge& judge,
                                        const Vocab& vocab, ProbeEstimator estimator,
                                        const ProbeConfig& cfg);

/// Runs the probe for each requested estimator and adds pairwise bootstrap
/// comparisons (Mix vs OnPolicy, MixWithEA vs Mix when both present).
ProbeReport run_variance_probe(const PolicyParams& params, std::span<const TaskInstance> questions,
                               Judge& judge, const Vocab& vocab,
                               std::span<const ProbeEstimator> estimators, const ProbeConfig& cfg);

std::string probe_report_json(const ProbeReport& report);

}  // namespace rgr
