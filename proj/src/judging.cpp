#include "rgr/judging.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

namespace rgr {

namespace {

// Tokens strictly before the LAST answer marker. A response that never
// states an answer has nothing "before the marker", so intermediate checks
// fail: shown work only counts on an actual answer attempt. This keeps the
// rubric signal dense (any covered value scores once a marker exists) while
// never paying for markerless token spray.
std::span<const TokenId> process_scan_region(std::span<const TokenId> response,
                                             const Vocab& vocab) {
  for (size_t i = response.size(); i-- > 0;) {
    if (response[i] == vocab.ans) return response.subspan(0, i);
  }
  return response.subspan(0, 0);
}

}  // namespace

int DeterministicJudge::judge_criterion(const TaskInstance& instance,
                                        std::span<const TokenId> response, int criterion_index) {
  if (criterion_index < 0 || criterion_index >= instance.rubric.size()) {
    throw JudgeError(JudgeError::Kind::MissingPayload, criterion_index,
                     "criterion index out of range for task " + instance.id);
  }
  if (static_cast<size_t>(criterion_index) >= instance.payloads.size()) {
    throw JudgeError(JudgeError::Kind::MissingPayload, criterion_index,
                     "criterion has no machine-checkable payload in task " + instance.id);
  }
  const CriterionPayload& p = instance.payloads[static_cast<size_t>(criterion_index)];
  switch (p.check) {
    case CriterionPayload::Check::FinalAnswerEquals: {
      std::optional<int> got = extract_final_answer(response, vocab_);
      return got && *got == p.value ? 1 : 0;
    }
    case CriterionPayload::Check::IntermediateAppearsBeforeAnswer: {
      auto region = process_scan_region(response, vocab_);
      TokenId want = vocab_.value(p.value);
      return std::find(region.begin(), region.end(), want) != region.end() ? 1 : 0;
    }
  }
  throw JudgeError(JudgeError::Kind::MissingPayload, criterion_index, "unknown payload check");
}

JudgmentVector judge_rollout(Judge& judge, const TaskInstance& instance,
                             std::span<const TokenId> response) {
  const int n = instance.rubric.size();
  JudgmentVector out;
  out.bits.assign(static_cast<size_t>(n), 0);

  const int workers = std::min(judge.max_parallelism(), n);
  if (workers <= 1) {
    for (int k = 0; k < n; ++k) {
      out.bits[static_cast<size_t>(k)] =
          static_cast<uint8_t>(judge.judge_criterion(instance, response, k));
    }
    return out;
  }

  std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      int k = next.fetch_add(1);
      if (k >= n) return;
      try {
        out.bits[static_cast<size_t>(k)] =
            static_cast<uint8_t>(judge.judge_criterion(instance, response, k));
      } catch (...) {
        errors[static_cast<size_t>(k)] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  // Fail closed on the lowest-index error for determinism.
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

int outcome_reward(const TaskInstance& instance, std::span<const TokenId> response,
                   const Vocab& vocab) {
  std::optional<int> got = extract_final_answer(response, vocab);
  return got && *got == instance.ground_truth ? 1 : 0;
}

}  // namespace rgr
