#include "rgr/probe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "json.hpp"

namespace rgr {

std::string estimator_name(ProbeEstimator est) {
  switch (est) {
    case ProbeEstimator::OnPolicy: return "on_policy";
    case ProbeEstimator::Mix: return "mix";
    case ProbeEstimator::MixWithEA: return "mix_with_ea";
  }
  return "?";
}

namespace {

GroupBranch branch_for(ProbeEstimator est) {
  switch (est) {
    case ProbeEstimator::OnPolicy: return GroupBranch::ForceOnPolicy;
    case ProbeEstimator::Mix: return GroupBranch::ForceRefine;
    case ProbeEstimator::MixWithEA: return GroupBranch::Auto;
  }
  return GroupBranch::Auto;
}

// One batch-gradient draw: mean over questions of the per-question gradient.
GradAccum sample_gradient(const PolicyParams& params, std::span<const TaskInstance> questions,
                          Judge& judge, const Vocab& vocab, ProbeEstimator est,
                          const ProbeConfig& cfg, int trial) {
  GradAccum grad(params.feature_slots, params.vocab_size);
  TrainerConfig tcfg = cfg.trainer;
  // Streams: (probe seed, estimator, trial) feeds the trainer's own
  // (seed, step, question, member) derivation, so estimators and trials draw
  // independent samples while staying reproducible.
  tcfg.seed = splitmix64(cfg.seed ^ (0x51beef00ULL + static_cast<uint64_t>(est)));
  tcfg.n_refine = est == ProbeEstimator::OnPolicy ? 0 : 1;
  for (size_t q = 0; q < questions.size(); ++q) {
    Group group = build_group(params, questions[q], tcfg, judge, vocab, trial,
                              static_cast<int>(q), branch_for(est));
    ObjectiveResult obj = group_objective(group, params, tcfg.train_temp, tcfg.surrogate,
                                          tcfg.advantage, vocab, nullptr);
    grad.merge(obj.grad);
  }
  grad.scale(1.0 / static_cast<double>(questions.size()));
  return grad;
}

struct PairStats {
  std::vector<double> pair_sq;   // ||g - g'||^2 / 2 per pair
  std::vector<double> norms;     // ||g|| per trial
};

PairStats collect_pairs(const PolicyParams& params, std::span<const TaskInstance> questions,
                        Judge& judge, const Vocab& vocab, ProbeEstimator est,
                        const ProbeConfig& cfg) {
  const int pairs = cfg.trials / 2;
  PairStats stats;
  stats.pair_sq.assign(static_cast<size_t>(pairs), 0.0);
  stats.norms.assign(static_cast<size_t>(pairs) * 2, 0.0);

  auto run_pair = [&](int j) {
    GradAccum a = sample_gradient(params, questions, judge, vocab, est, cfg, 2 * j);
    GradAccum b = sample_gradient(params, questions, judge, vocab, est, cfg, 2 * j + 1);
    stats.pair_sq[static_cast<size_t>(j)] = 0.5 * a.squared_distance(b);
    stats.norms[static_cast<size_t>(2 * j)] = a.l2_norm();
    stats.norms[static_cast<size_t>(2 * j + 1)] = b.l2_norm();
  };

  if (cfg.workers <= 1) {
    for (int j = 0; j < pairs; ++j) run_pair(j);
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        int j = next.fetch_add(1);
        if (j >= pairs) return;
        run_pair(j);
      }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < std::min(cfg.workers, pairs); ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return stats;
}

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

std::vector<double> bootstrap_means(std::span<const double> xs, int rounds, RngStream& rng) {
  std::vector<double> out(static_cast<size_t>(rounds));
  const int n = static_cast<int>(xs.size());
  for (int r = 0; r < rounds; ++r) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += xs[static_cast<size_t>(rng.uniform_int(n))];
    out[static_cast<size_t>(r)] = s / static_cast<double>(n);
  }
  return out;
}

}  // namespace

VarianceSummary gradient_variance_probe(const PolicyParams& params,
                                        std::span<const TaskInstance> questions, Judge& judge,
                                        const Vocab& vocab, ProbeEstimator estimator,
                                        const ProbeConfig& cfg) {
  if (cfg.trials < 100) throw ConfigError("variance probe needs at least 100 trials");
  if (questions.empty()) throw ConfigError("variance probe needs at least one question");

  PairStats stats = collect_pairs(params, questions, judge, vocab, estimator, cfg);

  VarianceSummary s;
  s.estimator = estimator;
  s.trials = static_cast<int>(stats.pair_sq.size()) * 2;
  s.trace = mean_of(stats.pair_sq);
  s.mean_grad_norm = mean_of(stats.norms);

  RngStream rng = RngStream::derive(cfg.seed, 0xb007ULL, static_cast<uint64_t>(estimator));
  std::vector<double> boots = bootstrap_means(stats.pair_sq, cfg.bootstrap, rng);
  std::sort(boots.begin(), boots.end());
  s.trace_ci_lo = boots[static_cast<size_t>(0.025 * (boots.size() - 1))];
  s.trace_ci_hi = boots[static_cast<size_t>(0.975 * (boots.size() - 1))];
  return s;
}

ProbeReport run_variance_probe(const PolicyParams& params, std::span<const TaskInstance> questions,
                               Judge& judge, const Vocab& vocab,
                               std::span<const ProbeEstimator> estimators,
                               const ProbeConfig& cfg) {
  ProbeReport report;
  std::vector<PairStats> all_stats;
  for (ProbeEstimator est : estimators) {
    PairStats stats = collect_pairs(params, questions, judge, vocab, est, cfg);
    VarianceSummary s;
    s.estimator = est;
    s.trials = static_cast<int>(stats.pair_sq.size()) * 2;
    s.trace = mean_of(stats.pair_sq);
    s.mean_grad_norm = mean_of(stats.norms);
    RngStream rng = RngStream::derive(cfg.seed, 0xb007ULL, static_cast<uint64_t>(est));
    std::vector<double> boots = bootstrap_means(stats.pair_sq, cfg.bootstrap, rng);
    std::sort(boots.begin(), boots.end());
    s.trace_ci_lo = boots[static_cast<size_t>(0.025 * (boots.size() - 1))];
    s.trace_ci_hi = boots[static_cast<size_t>(0.975 * (boots.size() - 1))];
    report.summaries.push_back(s);
    all_stats.push_back(std::move(stats));
  }

  auto index_of = [&](ProbeEstimator est) -> int {
    for (size_t i = 0; i < report.summaries.size(); ++i)
      if (report.summaries[i].estimator == est) return static_cast<int>(i);
    return -1;
  };
  auto compare = [&](ProbeEstimator a, ProbeEstimator b) {
    int ia = index_of(a), ib = index_of(b);
    if (ia < 0 || ib < 0) return;
    ProbeComparison c;
    c.a = a;
    c.b = b;
    c.trace_diff = report.summaries[static_cast<size_t>(ia)].trace -
                   report.summaries[static_cast<size_t>(ib)].trace;
    RngStream rng = RngStream::derive(cfg.seed, 0xc03aULL, static_cast<uint64_t>(a),
                                      static_cast<uint64_t>(b));
    std::vector<double> ba =
        bootstrap_means(all_stats[static_cast<size_t>(ia)].pair_sq, cfg.bootstrap, rng);
    std::vector<double> bb =
        bootstrap_means(all_stats[static_cast<size_t>(ib)].pair_sq, cfg.bootstrap, rng);
    long ge = 0;
    for (int r = 0; r < cfg.bootstrap; ++r)
      if (ba[static_cast<size_t>(r)] >= bb[static_cast<size_t>(r)]) ++ge;
    c.confidence_a_ge_b = static_cast<double>(ge) / static_cast<double>(cfg.bootstrap);
    report.comparisons.push_back(c);
  };
  compare(ProbeEstimator::Mix, ProbeEstimator::OnPolicy);
  compare(ProbeEstimator::MixWithEA, ProbeEstimator::Mix);
  return report;
}

std::string probe_report_json(const ProbeReport& report) {
  nlohmann::json j;
  j["summaries"] = nlohmann::json::array();
  for (const VarianceSummary& s : report.summaries) {
    j["summaries"].push_back({{"estimator", estimator_name(s.estimator)},
                              {"trials", s.trials},
                              {"trace", s.trace},
                              {"trace_ci95", {s.trace_ci_lo, s.trace_ci_hi}},
                              {"mean_grad_norm", s.mean_grad_norm}});
  }
  j["comparisons"] = nlohmann::json::array();
  for (const ProbeComparison& c : report.comparisons) {
    j["comparisons"].push_back({{"a", estimator_name(c.a)},
                                {"b", estimator_name(c.b)},
                                {"trace_diff", c.trace_diff},
                                {"confidence_a_ge_b", c.confidence_a_ge_b}});
  }
  return j.dump(2);
}

}  // namespace rgr
