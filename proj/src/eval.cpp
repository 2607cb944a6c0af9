#include "rgr/eval.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "json.hpp"

#include "rgr/judging.hpp"

namespace rgr {

namespace {
constexpr uint64_t kEvalTag = 11;
}

double pass_at_k(int n, int c, int k) {
  if (n < 1 || c < 0 || c > n) throw Error("pass_at_k needs 0 <= c <= n");
  if (k < 1 || k > n) throw Error("pass_at_k needs 1 <= k <= n");
  if (c == 0) return 0.0;
  if (n - c < k) return 1.0;  // every k-subset hits a correct sample
  double prod = 1.0;
  for (int i = 0; i < k; ++i) {
    prod *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
  }
  return 1.0 - prod;
}

PassAtKReport evaluate_pass_at_k(const PolicyParams& params, std::span<const TaskInstance> tasks,
                                 int n, double tau, std::span<const int> ks, const Vocab& vocab,
                                 uint64_t seed, int max_len, int workers) {
  if (tasks.empty()) throw Error("pass@k evaluation needs at least one task");
  for (int k : ks) {
    if (k < 1 || k > n) throw Error("every k must satisfy 1 <= k <= n");
  }
  PassAtKReport report;
  report.samples_per_question = n;
  report.temperature = tau;
  report.ks.assign(ks.begin(), ks.end());
  report.per_question.resize(tasks.size());

  auto run_question = [&](size_t q) {
    const TaskInstance& inst = tasks[q];
    PromptContext prompt = render_prompt(inst);
    int correct = 0;
    for (int s = 0; s < n; ++s) {
      RngStream rng = RngStream::derive(seed, kEvalTag, q, static_cast<uint64_t>(s));
      Rollout r = sample_sequence(params, prompt, max_len, tau, rng, vocab);
      correct += outcome_reward(inst, r.tokens, vocab);
    }
    report.per_question[q] = {inst.id, correct};
  };

  if (workers <= 1) {
    for (size_t q = 0; q < tasks.size(); ++q) run_question(q);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        size_t q = next.fetch_add(1);
        if (q >= tasks.size()) return;
        run_question(q);
      }
    };
    std::vector<std::thread> pool;
    for (int i = 0; i < std::min<int>(workers, static_cast<int>(tasks.size())); ++i)
      pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  report.estimates.assign(report.ks.size(), 0.0);
  for (size_t ki = 0; ki < report.ks.size(); ++ki) {
    double sum = 0.0;
    for (const auto& qc : report.per_question) sum += pass_at_k(n, qc.correct, report.ks[ki]);
    report.estimates[ki] = sum / static_cast<double>(report.per_question.size());
  }
  return report;
}

double zero_advantage_fraction(std::span<const Group> groups) {
  if (groups.empty()) throw Error("zero_advantage_fraction needs at least one group");
  long degenerate = 0;
  for (const Group& g : groups) {
    auto [lo, hi] = std::minmax_element(g.rewards.begin(), g.rewards.end());
    if (*lo == *hi) ++degenerate;
  }
  return static_cast<double>(degenerate) / static_cast<double>(groups.size());
}

std::string pass_at_k_report_json(const PassAtKReport& report) {
  nlohmann::json j;
  j["n"] = report.samples_per_question;
  j["temperature"] = report.temperature;
  j["ks"] = report.ks;
  nlohmann::json est = nlohmann::json::object();
  for (size_t i = 0; i < report.ks.size(); ++i)
    est[std::to_string(report.ks[i])] = report.estimates[i];
  j["estimates"] = est;
  nlohmann::json per_q = nlohmann::json::array();
  for (const auto& qc : report.per_question)
    per_q.push_back({{"id", qc.id}, {"correct", qc.correct}});
  j["per_question"] = per_q;
  return j.dump(2);
}

std::string pass_at_k_report_csv(const PassAtKReport& report) {
  std::string out = "k,pass_at_k\n";
  for (size_t i = 0; i < report.ks.size(); ++i) {
    out += std::to_string(report.ks[i]) + "," + std::to_string(report.estimates[i]) + "\n";
  }
  return out;
}

}  // namespace rgr
