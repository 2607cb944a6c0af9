// rgrlab: operator CLI for the rubric-reward GRPO lab.
//
// Subcommands: gen-tasks, train, eval, probe-variance, judge. Every command is
// deterministic given its inputs and --seed; outputs are plot-ready JSON/CSV
// (timestamps live only in the run manifest).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "rgr/eval.hpp"
#include "rgr/judging.hpp"
#include "rgr/probe.hpp"
#include "rgr/remote_judge.hpp"
#include "rgr/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr uint64_t kGenTag = 17;

// Exit codes: 0 success, 2 config error, 3 data error, 4 runtime failure.
enum ExitCode { kOk = 0, kConfigError = 2, kDataError = 3, kRuntimeError = 4 };

void write_atomically(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw rgr::DataError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rgr::DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- train config ----------------------------------------------------------

struct TrainFile {
  rgr::TrainerConfig cfg;
  int modulus = 17;
  std::string train_tasks;
  std::string val_tasks;
  std::string out_dir;
  bool save_checkpoints = true;
  json resolved;  // the full config snapshot for the manifest
};

TrainFile parse_train_config(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw rgr::ConfigError("config parse error in " + path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw rgr::ConfigError("config must be a flat JSON object");

  TrainFile out;
  rgr::TrainerConfig& c = out.cfg;
  std::map<std::string, std::function<void(const json&)>> keys = {
      {"training_steps", [&](const json& v) { c.steps = v.get<int>(); }},
      {"training_batch", [&](const json& v) { c.batch_size = v.get<int>(); }},
      {"n_rollouts", [&](const json& v) { c.group_size = v.get<int>(); }},
      {"n_refine", [&](const json& v) { c.n_refine = v.get<int>(); }},
      {"learning_rate", [&](const json& v) { c.learning_rate = v.get<double>(); }},
      {"reward_mode",
       [&](const json& v) {
         std::string mode = v.get<std::string>();
         if (mode == "rubric") c.reward_mode = rgr::RewardMode::Rubric;
         else if (mode == "outcome") c.reward_mode = rgr::RewardMode::Outcome;
         else throw rgr::ConfigError("reward_mode must be \"rubric\" or \"outcome\"");
       }},
      {"lambda", [&](const json& v) { c.lambda = v.get<double>(); }},
      {"l_star", [&](const json& v) { c.l_star = v.get<int>(); }},
      {"length_penalty_unclamped", [&](const json& v) { c.length_penalty_unclamped = v.get<bool>(); }},
      {"refine_length_penalty", [&](const json& v) { c.refine_length_penalty = v.get<bool>(); }},
      {"use_std_normalization", [&](const json& v) { c.advantage.use_std_normalization = v.get<bool>(); }},
      {"use_token_mean", [&](const json& v) { c.advantage.use_token_mean = v.get<bool>(); }},
      {"clip_epsilon",
       [&](const json& v) {
         if (v.is_null()) c.surrogate.clip_epsilon.reset();
         else c.surrogate.clip_epsilon = v.get<double>();
       }},
      {"kl_loss_coef", [&](const json& v) { c.surrogate.kl_beta = v.get<double>(); }},
      {"gamma", [&](const json& v) { c.surrogate.shaping_gamma = v.get<double>(); }},
      {"entropy_coef", [&](const json& v) { c.surrogate.entropy_coef = v.get<double>(); }},
      {"entropy_on_refined", [&](const json& v) { c.surrogate.entropy_on_refined = v.get<bool>(); }},
      {"seed", [&](const json& v) { c.seed = v.get<uint64_t>(); }},
      {"eval_freq", [&](const json& v) { c.eval_every = v.get<int>(); }},
      {"train_temp", [&](const json& v) { c.train_temp = v.get<double>(); }},
      {"val_temp", [&](const json& v) { c.val_temp = v.get<double>(); }},
      {"max_response_length", [&](const json& v) { c.max_response_len = v.get<int>(); }},
      {"feature_slots", [&](const json& v) { c.feature_slots = v.get<int>(); }},
      {"context_order", [&](const json& v) { c.context_order = v.get<int>(); }},
      {"workers", [&](const json& v) { c.workers = v.get<int>(); }},
      {"modulus", [&](const json& v) { out.modulus = v.get<int>(); }},
      {"train_tasks", [&](const json& v) { out.train_tasks = v.get<std::string>(); }},
      {"val_tasks", [&](const json& v) { out.val_tasks = v.get<std::string>(); }},
      {"out_dir", [&](const json& v) { out.out_dir = v.get<std::string>(); }},
      {"save_checkpoints", [&](const json& v) { out.save_checkpoints = v.get<bool>(); }},
  };
  for (const auto& [key, value] : doc.items()) {
    auto it = keys.find(key);
    if (it == keys.end()) throw rgr::ConfigError("unknown config key: " + key);
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw rgr::ConfigError("bad value for config key '" + key + "': " + e.what());
    }
  }
  if (out.train_tasks.empty()) throw rgr::ConfigError("config must name train_tasks");

  json& r = out.resolved;
  r["training_steps"] = c.steps;
  r["training_batch"] = c.batch_size;
  r["n_rollouts"] = c.group_size;
  r["n_refine"] = c.n_refine;
  r["learning_rate"] = c.learning_rate;
  r["reward_mode"] = c.reward_mode == rgr::RewardMode::Rubric ? "rubric" : "outcome";
  r["lambda"] = c.lambda;
  r["l_star"] = c.l_star;
  r["length_penalty_unclamped"] = c.length_penalty_unclamped;
  r["refine_length_penalty"] = c.refine_length_penalty;
  r["use_std_normalization"] = c.advantage.use_std_normalization;
  r["use_token_mean"] = c.advantage.use_token_mean;
  if (c.surrogate.clip_epsilon) r["clip_epsilon"] = *c.surrogate.clip_epsilon;
  else r["clip_epsilon"] = nullptr;
  r["kl_loss_coef"] = c.surrogate.kl_beta;
  r["gamma"] = c.surrogate.shaping_gamma;
  r["entropy_coef"] = c.surrogate.entropy_coef;
  r["entropy_on_refined"] = c.surrogate.entropy_on_refined;
  r["seed"] = c.seed;
  r["eval_freq"] = c.eval_every;
  r["train_temp"] = c.train_temp;
  r["val_temp"] = c.val_temp;
  r["max_response_length"] = c.max_response_len;
  r["feature_slots"] = c.feature_slots;
  r["context_order"] = c.context_order;
  r["workers"] = c.workers;
  r["modulus"] = out.modulus;
  r["train_tasks"] = out.train_tasks;
  r["val_tasks"] = out.val_tasks;
  r["out_dir"] = out.out_dir;
  r["save_checkpoints"] = out.save_checkpoints;
  return out;
}

void write_manifest(const fs::path& out_dir, const std::string& command, const json& config,
                    uint64_t seed, const json& artifacts) {
  json m;
  m["tool_version"] = kToolVersion;
  m["command"] = command;
  m["config"] = config;
  m["seed"] = seed;
  m["artifacts"] = artifacts;
  m["started_at_unix"] = static_cast<long>(
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch()).count());
  write_atomically(out_dir / "manifest.json", m.dump(2) + "\n");
}

// ---- subcommands -----------------------------------------------------------

int cmd_gen_tasks(long count, std::vector<int> difficulties, int modulus, uint64_t seed,
                  const std::string& out_path, const std::string& sub_answers, int sub_weight,
                  int process_weight_cap) {
  if (difficulties.empty()) difficulties = {4};
  rgr::RubricOptions ropts;
  if (sub_answers == "none") ropts.sub_answers = rgr::RubricOptions::SubAnswers::None;
  else if (sub_answers == "last") ropts.sub_answers = rgr::RubricOptions::SubAnswers::LastOnly;
  else if (sub_answers == "trailing") ropts.sub_answers = rgr::RubricOptions::SubAnswers::Trailing;
  else throw rgr::ConfigError("--sub-answers must be none, last or trailing");
  ropts.sub_weight = sub_weight;
  ropts.process_weight_cap = process_weight_cap;
  rgr::Vocab vocab = rgr::Vocab::for_modulus(modulus);
  std::vector<rgr::TaskInstance> tasks;
  std::map<int, long> per_difficulty;
  for (long i = 0; i < count; ++i) {
    int d = difficulties[static_cast<size_t>(i) % difficulties.size()];
    rgr::RngStream rng = rgr::RngStream::derive(seed, kGenTag, static_cast<uint64_t>(i));
    tasks.push_back(rgr::generate_instance(rng, d, modulus, vocab, ropts));
    ++per_difficulty[d];
  }
  rgr::save_task_set(out_path, tasks, vocab);
  if (count == 0) {
    std::cerr << "warning: generated an empty task set\n";
  }
  for (const auto& [d, n] : per_difficulty) {
    std::cout << "difficulty " << d << ": " << n << " instances\n";
  }
  std::cout << "wrote " << count << " tasks to " << out_path << "\n";
  return kOk;
}

int cmd_train(const std::string& config_path, std::optional<uint64_t> seed_override,
              std::optional<std::string> out_override, std::optional<int> workers_override,
              bool resume) {
  TrainFile tf = parse_train_config(config_path);
  if (seed_override) {
    tf.cfg.seed = *seed_override;
    tf.resolved["seed"] = *seed_override;
  }
  if (out_override) {
    tf.out_dir = *out_override;
    tf.resolved["out_dir"] = *out_override;
  }
  if (workers_override) {
    tf.cfg.workers = *workers_override;
    tf.resolved["workers"] = *workers_override;
  }
  if (tf.out_dir.empty()) throw rgr::ConfigError("an output directory is required (--out or out_dir)");

  auto [vocab, train] = rgr::load_task_set_with_vocab(tf.train_tasks);
  if (vocab.modulus != tf.modulus) {
    throw rgr::ConfigError("config modulus does not match the train task file");
  }
  std::vector<rgr::TaskInstance> val;
  if (!tf.val_tasks.empty()) {
    auto [vvocab, v] = rgr::load_task_set_with_vocab(tf.val_tasks);
    if (vvocab.modulus != vocab.modulus) throw rgr::ConfigError("train/val moduli differ");
    val = std::move(v);
  }

  fs::create_directories(tf.out_dir);
  json artifacts;
  artifacts["train_tasks"] = tf.train_tasks;
  artifacts["val_tasks"] = tf.val_tasks;
  artifacts["metrics"] = (fs::path(tf.out_dir) / "metrics.ldjson").string();
  artifacts["checkpoints_dir"] = tf.out_dir;
  write_manifest(tf.out_dir, "train", tf.resolved, tf.cfg.seed, artifacts);

  rgr::DeterministicJudge judge(vocab);
  rgr::RunSinks sinks;
  sinks.out_dir = tf.out_dir;
  sinks.resume = resume;
  sinks.save_checkpoints = tf.save_checkpoints;
  sinks.on_step = [](const rgr::TrainingMetrics& m) {
    if (m.val_pass1) {
      std::cout << "step " << m.step << " val_pass1 " << *m.val_pass1 << " mean_reward "
                << m.mean_reward << " offpolicy_ratio " << m.offpolicy_ratio << " entropy "
                << m.entropy << "\n";
    }
  };
  rgr::run_training(tf.cfg, train, val, judge, vocab, sinks);
  std::cout << "training complete; artifacts in " << tf.out_dir << "\n";
  return kOk;
}

int cmd_eval(const std::string& ckpt_path, const std::string& tasks_path, int n, double temp,
             std::vector<int> ks, uint64_t seed, int max_len, int workers,
             const std::string& out_path, const std::string& csv_path) {
  rgr::Checkpoint ck = rgr::load_checkpoint(ckpt_path);
  auto [vocab, tasks] = rgr::load_task_set_with_vocab(tasks_path);
  if (vocab.modulus != ck.vocab.modulus) throw rgr::DataError("checkpoint/task moduli differ");
  if (ks.empty()) ks = {1, 2, 4, 8, 16, 32, 64};
  std::sort(ks.begin(), ks.end());
  rgr::PassAtKReport rep =
      rgr::evaluate_pass_at_k(ck.params, tasks, n, temp, ks, vocab, seed, max_len, workers);
  std::string payload = rgr::pass_at_k_report_json(rep) + "\n";
  if (out_path.empty()) std::cout << payload;
  else write_atomically(out_path, payload);
  if (!csv_path.empty()) write_atomically(csv_path, rgr::pass_at_k_report_csv(rep));
  for (size_t i = 0; i < rep.ks.size(); ++i) {
    std::cout << "pass@" << rep.ks[i] << " = " << rep.estimates[i] << "\n";
  }
  return kOk;
}

int cmd_probe_variance(const std::string& ckpt_path, const std::string& tasks_path, int trials,
                       int group_size, uint64_t seed, int workers,
                       const std::vector<std::string>& estimator_names,
                       const std::string& out_path) {
  rgr::Checkpoint ck = rgr::load_checkpoint(ckpt_path);
  auto [vocab, tasks] = rgr::load_task_set_with_vocab(tasks_path);
  if (vocab.modulus != ck.vocab.modulus) throw rgr::DataError("checkpoint/task moduli differ");

  std::vector<rgr::ProbeEstimator> estimators;
  for (const std::string& name : estimator_names) {
    if (name == "on_policy") estimators.push_back(rgr::ProbeEstimator::OnPolicy);
    else if (name == "mix") estimators.push_back(rgr::ProbeEstimator::Mix);
    else if (name == "mix_with_ea") estimators.push_back(rgr::ProbeEstimator::MixWithEA);
    else throw rgr::ConfigError("unknown estimator: " + name);
  }
  if (estimators.empty()) {
    estimators = {rgr::ProbeEstimator::OnPolicy, rgr::ProbeEstimator::Mix,
                  rgr::ProbeEstimator::MixWithEA};
  }

  rgr::ProbeConfig pcfg;
  pcfg.trials = trials;
  pcfg.seed = seed;
  pcfg.workers = workers;
  pcfg.trainer.group_size = group_size;
  pcfg.trainer.feature_slots = ck.params.feature_slots;
  pcfg.trainer.context_order = ck.params.context_order;

  rgr::DeterministicJudge judge(vocab);
  rgr::ProbeReport report =
      rgr::run_variance_probe(ck.params, tasks, judge, vocab, estimators, pcfg);
  std::string payload = rgr::probe_report_json(report) + "\n";
  if (out_path.empty()) std::cout << payload;
  else write_atomically(out_path, payload);
  for (const auto& s : report.summaries) {
    std::cout << rgr::estimator_name(s.estimator) << ": trace " << s.trace << " ci95 ["
              << s.trace_ci_lo << ", " << s.trace_ci_hi << "] grad_norm " << s.mean_grad_norm
              << "\n";
  }
  for (const auto& c : report.comparisons) {
    std::cout << rgr::estimator_name(c.a) << " - " << rgr::estimator_name(c.b) << ": diff "
              << c.trace_diff << " confidence " << c.confidence_a_ge_b << "\n";
  }
  return kOk;
}

int cmd_judge(const std::string& tasks_path, const std::string& responses_path, bool references,
              double lambda, int l_star, const std::string& out_path,
              const std::string& judge_endpoint, const std::string& judge_model,
              const std::string& judge_cache) {
  auto [vocab, tasks] = rgr::load_task_set_with_vocab(tasks_path);
  std::map<std::string, const rgr::TaskInstance*> by_id;
  for (const rgr::TaskInstance& t : tasks) by_id[t.id] = &t;

  std::unique_ptr<rgr::Judge> judge;
  if (!judge_endpoint.empty()) {
    rgr::JudgeBackendConfig jcfg;
    jcfg.endpoint = judge_endpoint;
    jcfg.model_name = judge_model.empty() ? "judge" : judge_model;
    if (!judge_cache.empty()) jcfg.cache_path = judge_cache;
    judge = std::make_unique<rgr::RemoteJudge>(jcfg, rgr::make_http_transport(jcfg), vocab);
  } else {
    judge = std::make_unique<rgr::DeterministicJudge>(vocab);
  }

  struct Item {
    const rgr::TaskInstance* inst;
    std::vector<rgr::TokenId> response;
  };
  std::vector<Item> items;
  if (references) {
    for (const rgr::TaskInstance& t : tasks) items.push_back({&t, t.reference_solution});
  } else {
    if (responses_path.empty()) {
      throw rgr::ConfigError("judge needs --responses FILE or --references");
    }
    std::ifstream in(responses_path);
    if (!in) throw rgr::DataError("cannot open responses: " + responses_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("question_id") || !j.contains("response")) {
        throw rgr::DataError("responses lines need question_id and response");
      }
      auto it = by_id.find(j["question_id"].get<std::string>());
      if (it == by_id.end()) {
        throw rgr::DataError("unknown question_id: " + j["question_id"].get<std::string>());
      }
      Item item;
      item.inst = it->second;
      if (j["response"].is_string()) {
        item.response = vocab.encode(j["response"].get<std::string>());
      } else {
        for (const auto& t : j["response"]) item.response.push_back(vocab.id_of(t.get<std::string>()));
      }
      items.push_back(std::move(item));
    }
  }

  std::ostringstream out;
  double reward_sum = 0.0;
  for (const Item& item : items) {
    rgr::JudgmentVector bits = rgr::judge_rollout(*judge, *item.inst, item.response);
    rgr::RewardBreakdown b = rgr::reward_breakdown(
        item.inst->rubric, bits, static_cast<int>(item.response.size()), lambda, l_star);
    json line;
    line["question_id"] = item.inst->id;
    line["bits"] = bits.bits;
    line["aggregate"] = b.aggregate;
    line["factual_all_pass"] = b.factual_all_pass;
    line["pre_penalty_reward"] = b.pre_penalty_reward;
    line["penalty"] = b.penalty;
    line["final_reward"] = b.final;
    line["outcome"] = rgr::outcome_reward(*item.inst, item.response, vocab);
    out << line.dump() << '\n';
    reward_sum += b.final;
  }
  if (out_path.empty()) std::cout << out.str();
  else write_atomically(out_path, out.str());
  if (!items.empty()) {
    std::cout << "judged " << items.size() << " responses, mean final reward "
              << reward_sum / static_cast<double>(items.size()) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rubric-reward GRPO lab"};
  app.require_subcommand(1);

  // gen-tasks
  auto* gen = app.add_subcommand("gen-tasks", "generate a synthetic task set");
  long count = 100;
  std::vector<int> difficulties;
  int modulus = 17;
  uint64_t gen_seed = 1;
  std::string gen_out = "tasks.ldjson";
  gen->add_option("--count", count, "number of instances");
  gen->add_option("--difficulty", difficulties, "chain length(s), cycled over the set");
  gen->add_option("--modulus", modulus, "prime value ring size (<= 23)");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output path (line-delimited JSON)");
  std::string gen_subs = "trailing";
  int gen_sub_weight = 4, gen_pw_cap = 3;
  gen->add_option("--sub-answers", gen_subs, "factual sub-answer coverage: none|last|trailing");
  gen->add_option("--sub-weight", gen_sub_weight, "weight of sub-answer criteria (1..5)");
  gen->add_option("--process-weight-cap", gen_pw_cap, "cap for position-ramped process weights (1..3)");

  // train
  auto* train = app.add_subcommand("train", "run a training schedule from a config file");
  std::string config_path;
  std::optional<uint64_t> seed_override;
  std::optional<std::string> out_override;
  std::optional<int> workers_override;
  bool resume = false;
  train->add_option("--config", config_path, "JSON config")->required();
  train->add_option("--seed", seed_override, "override the config seed");
  train->add_option("--out", out_override, "override the output directory");
  train->add_option("--workers", workers_override, "override worker count");
  train->add_flag("--resume", resume, "resume from the latest checkpoint in the output dir");

  // eval
  auto* ev = app.add_subcommand("eval", "pass@k evaluation of a checkpoint");
  std::string ckpt, eval_tasks, eval_out, eval_csv;
  int eval_n = 64, eval_maxlen = 64, eval_workers = 1;
  double eval_temp = 1.0;
  uint64_t eval_seed = 1;
  std::vector<int> eval_ks;
  ev->add_option("--checkpoint", ckpt)->required();
  ev->add_option("--tasks", eval_tasks)->required();
  ev->add_option("--n", eval_n, "samples per question");
  ev->add_option("--k", eval_ks, "k values (default 1,2,4,...,64)");
  ev->add_option("--temp", eval_temp, "sampling temperature");
  ev->add_option("--seed", eval_seed);
  ev->add_option("--max-len", eval_maxlen);
  ev->add_option("--workers", eval_workers);
  ev->add_option("--out", eval_out, "JSON report path (stdout when empty)");
  ev->add_option("--csv", eval_csv, "CSV export path");

  // probe-variance
  auto* probe = app.add_subcommand("probe-variance", "gradient variance probe at a checkpoint");
  std::string probe_ckpt, probe_tasks, probe_out;
  int probe_trials = 1000, probe_g = 8, probe_workers = 1;
  uint64_t probe_seed = 1;
  std::vector<std::string> probe_estimators;
  probe->add_option("--checkpoint", probe_ckpt)->required();
  probe->add_option("--tasks", probe_tasks)->required();
  probe->add_option("--trials", probe_trials);
  probe->add_option("--group-size", probe_g);
  probe->add_option("--seed", probe_seed);
  probe->add_option("--workers", probe_workers);
  probe->add_option("--estimators", probe_estimators, "on_policy, mix, mix_with_ea");
  probe->add_option("--out", probe_out, "JSON report path (stdout when empty)");

  // judge
  auto* judge = app.add_subcommand("judge", "judge a file of responses against task rubrics");
  std::string judge_tasks, judge_responses, judge_out;
  bool judge_refs = false;
  double judge_lambda = 0.0;
  int judge_lstar = 0;
  std::string judge_endpoint, judge_model, judge_cache;
  judge->add_option("--tasks", judge_tasks)->required();
  judge->add_option("--responses", judge_responses, "line-delimited {question_id, response}");
  judge->add_flag("--references", judge_refs, "judge the embedded reference solutions");
  judge->add_option("--lambda", judge_lambda, "length penalty per token");
  judge->add_option("--l-star", judge_lstar, "length penalty target");
  judge->add_option("--judge-endpoint", judge_endpoint, "remote judge URL (deterministic if empty)");
  judge->add_option("--judge-model", judge_model, "remote judge model name");
  judge->add_option("--judge-cache", judge_cache, "verdict cache path");
  judge->add_option("--out", judge_out, "output path (stdout when empty)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (gen->parsed())
      return cmd_gen_tasks(count, difficulties, modulus, gen_seed, gen_out, gen_subs,
                           gen_sub_weight, gen_pw_cap);
    if (train->parsed())
      return cmd_train(config_path, seed_override, out_override, workers_override, resume);
    if (ev->parsed())
      return cmd_eval(ckpt, eval_tasks, eval_n, eval_temp, eval_ks, eval_seed, eval_maxlen,
                      eval_workers, eval_out, eval_csv);
    if (probe->parsed())
      return cmd_probe_variance(probe_ckpt, probe_tasks, probe_trials, probe_g, probe_seed,
                                probe_workers, probe_estimators, probe_out);
    if (judge->parsed())
      return cmd_judge(judge_tasks, judge_responses, judge_refs, judge_lambda, judge_lstar,
                       judge_out, judge_endpoint, judge_model, judge_cache);
  } catch (const rgr::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const rgr::RubricParseError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const rgr::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}
