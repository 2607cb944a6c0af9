#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "rgr/judging.hpp"
#include "rgr/prompts.hpp"

namespace rgr {

struct JudgeBackendConfig {
  std::string endpoint;   // e.g. http://127.0.0.1:8011/v1/chat/completions
  std::string model_name;
  double timeout_sec = 30.0;
  int max_in_flight = 4;
  int max_retries = 2;
  std::optional<std::string> cache_path;
  double temperature = 0.0;  // judging decode temperature; assumed greedy
};

enum class JudgePromptMode { Rubric, Likert };

/// Transport for chat-completion POSTs, swappable so tests can replay
/// recorded traffic without a network.
class Transport {
 public:
  virtual ~Transport() = default;
  /// Sends the JSON request body; returns the raw response body. Throws
  /// JudgeError(Kind::Http / Kind::Timeout) on failure.
  virtual std::string post_chat(const std::string& request_body) = 0;
};

std::unique_ptr<Transport> make_http_transport(const JudgeBackendConfig& cfg);

/// Wraps another transport and appends {"request":..., "response":...} lines.
class RecordingTransport : public Transport {
 public:
  RecordingTransport(std::unique_ptr<Transport> inner, std::filesystem::path transcript_path);
  std::string post_chat(const std::string& request_body) override;

 private:
  std::unique_ptr<Transport> inner_;
  std::filesystem::path path_;
  std::mutex mu_;
};

/// Serves responses from a transcript by exact request match, order-free.
class ReplayTransport : public Transport {
 public:
  explicit ReplayTransport(const std::filesystem::path& transcript_path);
  std::string post_chat(const std::string& request_body) override;
  long served() const { return served_.load(); }

 private:
  std::unordered_map<std::string, std::string> by_request_;
  std::atomic<long> served_{0};
};

/// Assembled chat-completion request body: model, temperature, and the
/// system+user message pair.
std::string build_chat_request(const JudgeBackendConfig& cfg, const std::string& system_prompt,
                               const std::string& user_prompt);

/// Assistant text out of a chat-completion response body; bodies that are not
/// chat-completion JSON are treated as the reply text itself.
std::string extract_reply_text(const std::string& response_body);

/// First fenced block beginning ```json -> object -> integer "rating".
/// Rubric mode accepts {0, 1}; Likert mode accepts 1..10. Distinct JudgeError
/// kinds for missing block, malformed JSON, and out-of-range ratings.
int parse_rating_reply(const std::string& reply_text, JudgePromptMode mode);

/// Line-delimited verdict cache. The key covers question, response, criterion
/// AND model, so switching judges never replays stale verdicts. Values are
/// deterministic, so concurrent writers racing on one key are benign.
class JudgeCache {
 public:
  explicit JudgeCache(std::optional<std::string> path);

  std::optional<int> lookup(uint64_t key) const;
  void store(uint64_t key, uint64_t question_hash, uint64_t response_hash,
             uint64_t criterion_hash, const std::string& model, int rating);

  static uint64_t key(const std::string& question, const std::string& response,
                      const std::string& criterion, const std::string& model);

 private:
  std::optional<std::string> path_;
  mutable std::shared_mutex mu_;
  std::unordered_map<uint64_t, int> entries_;
};

/// LLM-as-judge client speaking the rubric-judge wire protocol: one criterion
/// per request, greedy judge decoding, retry-then-fail-closed, and a
/// transparent verdict cache.
class RemoteJudge : public Judge {
 public:
  RemoteJudge(JudgeBackendConfig cfg, std::unique_ptr<Transport> transport, const Vocab& vocab);

  int judge_criterion(const TaskInstance& instance, std::span<const TokenId> response,
                      int criterion_index) override;
  std::string name() const override { return "remote:" + cfg_.model_name; }
  int max_parallelism() const override { return cfg_.max_in_flight; }

  /// Network calls actually issued (cache hits excluded), for tests.
  long network_calls() const { return network_calls_.load(); }

  /// Verdict for one raw (question, response, criterion) triple.
  int judge_text(const std::string& question, const std::string& response,
                 const std::string& criterion, int criterion_index);

 private:
  JudgeBackendConfig cfg_;
  std::unique_ptr<Transport> transport_;
  const Vocab& vocab_;
  JudgeCache cache_;
  std::atomic<long> network_calls_{0};
};

}  // namespace rgr
