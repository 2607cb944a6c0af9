#pragma once

#include <span>
#include <string>
#include <vector>

#include "rgr/grpo.hpp"
#include "rgr/policy.hpp"
#include "rgr/tasks.hpp"

namespace rgr {

struct PassAtKReport {
  int samples_per_question = 0;  // n
  double temperature = 1.0;
  std::vector<int> ks;
  std::vector<double> estimates;  // aligned with ks, averaged over questions
  struct QuestionCount {
    std::string id;
    int correct = 0;
  };
  std::vector<QuestionCount> per_question;
};

/// Unbiased estimator 1 - C(n-c, k) / C(n, k) in stable product form.
double pass_at_k(int n, int c, int k);

/// Samples n rollouts per question at the given temperature, scores outcome
/// correctness, and aggregates the estimator for each k.
PassAtKReport evaluate_pass_at_k(const PolicyParams& params, std::span<const TaskInstance> tasks,
                                 int n, double tau, std::span<const int> ks, const Vocab& vocab,
                                 uint64_t seed, int max_len, int workers = 1);

/// Fraction of groups whose rewards are all equal (hence zero advantages and
/// no policy-gradient signal).
double zero_advantage_fraction(std::span<const Group> groups);

std::string pass_at_k_report_json(const PassAtKReport& report);
std::string pass_at_k_report_csv(const PassAtKReport& report);

}  // namespace rgr
