#include "rgr/remote_judge.hpp"

#include <fstream>

#include "json.hpp"

// cpp-httplib is header-only; keep it out of our headers.
#include "httplib.h"

#include "rgr/rng.hpp"

namespace rgr {

namespace {

class HttplibTransport : public Transport {
 public:
  explicit HttplibTransport(const JudgeBackendConfig& cfg) {
    // Split endpoint into base (scheme://host:port) and path.
    const std::string& ep = cfg.endpoint;
    size_t scheme = ep.find("://");
    if (scheme == std::string::npos) {
      throw ConfigError("judge endpoint must be a full URL: " + ep);
    }
    size_t path_start = ep.find('/', scheme + 3);
    base_ = path_start == std::string::npos ? ep : ep.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : ep.substr(path_start);
    timeout_sec_ = cfg.timeout_sec;
  }

  std::string post_chat(const std::string& request_body) override {
    httplib::Client client(base_);
    client.set_connection_timeout(std::chrono::duration<double>(timeout_sec_));
    client.set_read_timeout(std::chrono::duration<double>(timeout_sec_));
    httplib::Headers headers;
    // The endpoint credential is the one thing taken from the environment.
    if (const char* token = std::getenv("RGR_JUDGE_TOKEN")) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
    auto res = client.Post(path_, headers, request_body, "application/json");
    if (!res) {
      auto kind = res.error() == httplib::Error::ConnectionTimeout ||
                          res.error() == httplib::Error::Read
                      ? JudgeError::Kind::Timeout
                      : JudgeError::Kind::Http;
      throw JudgeError(kind, -1, "judge request failed: " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw JudgeError(JudgeError::Kind::Http, -1,
                       "judge returned HTTP " + std::to_string(res->status));
    }
    return res->body;
  }

 private:
  std::string base_;
  std::string path_;
  double timeout_sec_;
};

}  // namespace

std::unique_ptr<Transport> make_http_transport(const JudgeBackendConfig& cfg) {
  return std::make_unique<HttplibTransport>(cfg);
}

RecordingTransport::RecordingTransport(std::unique_ptr<Transport> inner,
                                       std::filesystem::path transcript_path)
    : inner_(std::move(inner)), path_(std::move(transcript_path)) {}

std::string RecordingTransport::post_chat(const std::string& request_body) {
  std::string response = inner_->post_chat(request_body);
  nlohmann::json line;
  line["request"] = request_body;
  line["response"] = response;
  std::lock_guard<std::mutex> lock(mu_);
  std::ofstream out(path_, std::ios::app);
  out << line.dump() << '\n';
  return response;
}

ReplayTransport::ReplayTransport(const std::filesystem::path& transcript_path) {
  std::ifstream in(transcript_path);
  if (!in) throw DataError("cannot open transcript: " + transcript_path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    by_request_[j.at("request").get<std::string>()] = j.at("response").get<std::string>();
  }
}

std::string ReplayTransport::post_chat(const std::string& request_body) {
  auto it = by_request_.find(request_body);
  if (it == by_request_.end()) {
    throw JudgeError(JudgeError::Kind::Http, -1, "no transcript entry matches the request");
  }
  served_.fetch_add(1);
  return it->second;
}

std::string build_chat_request(const JudgeBackendConfig& cfg, const std::string& system_prompt,
                               const std::string& user_prompt) {
  nlohmann::json body;
  body["model"] = cfg.model_name;
  body["temperature"] = cfg.temperature;
  body["messages"] = nlohmann::json::array({
      nlohmann::json{{"role", "system"}, {"content", system_prompt}},
      nlohmann::json{{"role", "user"}, {"content", user_prompt}},
  });
  return body.dump();
}

std::string extract_reply_text(const std::string& response_body) {
  nlohmann::json j = nlohmann::json::parse(response_body, nullptr, false);
  if (j.is_object() && j.contains("choices") && j["choices"].is_array() && !j["choices"].empty()) {
    const auto& choice = j["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content")) {
      return choice["message"]["content"].get<std::string>();
    }
  }
  return response_body;
}

int parse_rating_reply(const std::string& reply_text, JudgePromptMode mode) {
  const std::string fence = "```json";
  size_t start = reply_text.find(fence);
  if (start == std::string::npos) {
    throw JudgeError(JudgeError::Kind::NoJsonBlock, -1, "reply has no ```json fenced block");
  }
  start += fence.size();
  size_t stop = reply_text.find("```", start);
  if (stop == std::string::npos) {
    throw JudgeError(JudgeError::Kind::NoJsonBlock, -1, "fenced block is not closed");
  }
  nlohmann::json j =
      nlohmann::json::parse(reply_text.substr(start, stop - start), nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("rating") ||
      !j["rating"].is_number_integer()) {
    throw JudgeError(JudgeError::Kind::MalformedJson, -1,
                     "fenced block lacks an integer \"rating\"");
  }
  int rating = j["rating"].get<int>();
  if (mode == JudgePromptMode::Rubric) {
    if (rating != 0 && rating != 1) {
      throw JudgeError(JudgeError::Kind::RatingOutOfRange, -1,
                       "rubric rating must be 0 or 1, got " + std::to_string(rating));
    }
  } else {
    if (rating < 1 || rating > 10) {
      throw JudgeError(JudgeError::Kind::RatingOutOfRange, -1,
                       "likert rating must be 1..10, got " + std::to_string(rating));
    }
  }
  return rating;
}

JudgeCache::JudgeCache(std::optional<std::string> path) : path_(std::move(path)) {
  if (!path_) return;
  std::ifstream in(*path_);
  if (!in) return;  // cold cache
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    entries_[std::stoull(j.at("key_hash").get<std::string>(), nullptr, 16)] =
        j.at("rating").get<int>();
  }
}

uint64_t JudgeCache::key(const std::string& question, const std::string& response,
                         const std::string& criterion, const std::string& model) {
  // Length-prefixed so field boundaries cannot alias.
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    uint64_t len = s.size();
    h = fnv1a64(&len, sizeof(len), h);
    h = fnv1a64(s.data(), s.size(), h);
  };
  mix(question);
  mix(response);
  mix(criterion);
  mix(model);
  return h;
}

std::optional<int> JudgeCache::lookup(uint64_t key) const {
  std::shared_lock lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void JudgeCache::store(uint64_t key, uint64_t question_hash, uint64_t response_hash,
                       uint64_t criterion_hash, const std::string& model, int rating) {
  std::unique_lock lock(mu_);
  entries_[key] = rating;  // last writer wins; values are deterministic
  if (!path_) return;
  char hex[17];
  auto hex_of = [&hex](uint64_t v) {
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(v));
    return std::string(hex);
  };
  nlohmann::json j;
  j["key_hash"] = hex_of(key);
  j["question_hash"] = hex_of(question_hash);
  j["response_hash"] = hex_of(response_hash);
  j["criterion_hash"] = hex_of(criterion_hash);
  j["model"] = model;
  j["rating"] = rating;
  std::ofstream out(*path_, std::ios::app);
  out << j.dump() << '\n';
}

RemoteJudge::RemoteJudge(JudgeBackendConfig cfg, std::unique_ptr<Transport> transport,
                         const Vocab& vocab)
    : cfg_(std::move(cfg)), transport_(std::move(transport)), vocab_(vocab), cache_(cfg_.cache_path) {}

int RemoteJudge::judge_text(const std::string& question, const std::string& response,
                            const std::string& criterion, int criterion_index) {
  uint64_t key = JudgeCache::key(question, response, criterion, cfg_.model_name);
  if (std::optional<int> hit = cache_.lookup(key)) return *hit;

  std::string request = build_chat_request(
      cfg_, kRubricJudgeSystemPrompt,
      build_rubric_judge_user_prompt(question, response, criterion));

  std::string body;
  int attempt = 0;
  for (;;) {
    try {
      network_calls_.fetch_add(1);
      body = transport_->post_chat(request);
      break;
    } catch (const JudgeError& e) {
      if ((e.kind != JudgeError::Kind::Http && e.kind != JudgeError::Kind::Timeout) ||
          attempt >= cfg_.max_retries) {
        throw JudgeError(e.kind, criterion_index, e.what());
      }
      ++attempt;
    }
  }
  int rating;
  try {
    rating = parse_rating_reply(extract_reply_text(body), JudgePromptMode::Rubric);
  } catch (const JudgeError& e) {
    throw JudgeError(e.kind, criterion_index, e.what());
  }
  cache_.store(key, fnv1a64_str(question), fnv1a64_str(response), fnv1a64_str(criterion),
               cfg_.model_name, rating);
  return rating;
}

int RemoteJudge::judge_criterion(const TaskInstance& instance, std::span<const TokenId> response,
                                 int criterion_index) {
  if (criterion_index < 0 || criterion_index >= instance.rubric.size()) {
    throw JudgeError(JudgeError::Kind::Http, criterion_index, "criterion index out of range");
  }
  return judge_text(vocab_.decode(instance.question), vocab_.decode(response),
                    instance.rubric.criteria[static_cast<size_t>(criterion_index)].description,
                    criterion_index);
}

}  // namespace rgr
