#include "rgr/tasks.hpp"

#include <fstream>

#include "json.hpp"

namespace rgr {

namespace {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

int apply_op(int lhs, TokenId op, int rhs, int modulus, const Vocab& vocab) {
  long v;
  if (op == vocab.op_add) v = lhs + rhs;
  else if (op == vocab.op_sub) v = lhs - rhs;
  else v = static_cast<long>(lhs) * rhs;
  long m = v % modulus;
  if (m < 0) m += modulus;
  return static_cast<int>(m);
}

char op_char(TokenId op, const Vocab& vocab) {
  if (op == vocab.op_add) return '+';
  if (op == vocab.op_sub) return '-';
  if (op == vocab.op_mul) return '*';
  throw DataError("not an operator token");
}

}  // namespace

TaskInstance generate_instance(RngStream& stream, int difficulty, int modulus,
                               const Vocab& vocab, const RubricOptions& rubric_opts) {
  if (difficulty < 2 || difficulty > 10) {
    throw ConfigError("difficulty must be in [2, 10], got " + std::to_string(difficulty));
  }
  if (!is_prime(modulus) || modulus > 23) {
    throw ConfigError("modulus must be prime and <= 23, got " + std::to_string(modulus));
  }
  if (modulus != vocab.modulus) throw ConfigError("modulus does not match vocab");
  if (rubric_opts.sub_weight < 1 || rubric_opts.sub_weight > 5 ||
      rubric_opts.process_weight_cap < 1 || rubric_opts.process_weight_cap > 3) {
    throw ConfigError("rubric weights outside their allowed ranges");
  }

  TaskInstance inst;
  inst.difficulty = difficulty;
  inst.modulus = modulus;

  const TokenId ops[3] = {vocab.op_add, vocab.op_sub, vocab.op_mul};
  std::vector<int> operands;
  std::vector<TokenId> op_tokens;
  for (int i = 0; i < difficulty; ++i) operands.push_back(stream.uniform_int(modulus));
  for (int i = 0; i + 1 < difficulty; ++i) op_tokens.push_back(ops[stream.uniform_int(3)]);

  // Question surface form: a_1 op_1 a_2 ... op_{d-1} a_d =
  inst.question.push_back(vocab.value(operands[0]));
  for (int i = 0; i + 1 < difficulty; ++i) {
    inst.question.push_back(op_tokens[static_cast<size_t>(i)]);
    inst.question.push_back(vocab.value(operands[static_cast<size_t>(i) + 1]));
  }
  inst.question.push_back(vocab.equals);

  // Running values r_1 = a_1, r_i = r_{i-1} op a_i; the last is the answer.
  int running = operands[0];
  inst.intermediates.push_back(running);
  for (int i = 0; i + 1 < difficulty; ++i) {
    running = apply_op(running, op_tokens[static_cast<size_t>(i)],
                       operands[static_cast<size_t>(i) + 1], modulus, vocab);
    inst.intermediates.push_back(running);
  }
  inst.ground_truth = inst.intermediates.back();
  inst.intermediates.pop_back();  // keep r_1 .. r_{d-1}

  for (int r : inst.intermediates) {
    inst.reference_solution.push_back(vocab.value(r));
    inst.reference_solution.push_back(vocab.sep);
  }
  inst.reference_solution.push_back(vocab.ans);
  inst.reference_solution.push_back(vocab.value(inst.ground_truth));
  inst.reference_solution.push_back(vocab.end);

  // Rubric: one Process criterion per running value (weight ramping 1..3 with
  // step position), Factual sub-answer criteria for the trailing intermediates
  // (full credit must re-derive them, not just state a lucky final token), and
  // the weight-5 Factual final-answer criterion. Sub-answers are capped so the
  // rubric never exceeds 10 items; d=2 chains carry none.
  const int n_inter = static_cast<int>(inst.intermediates.size());
  int n_subs = 0;
  if (difficulty >= 3) {
    switch (rubric_opts.sub_answers) {
      case RubricOptions::SubAnswers::None: n_subs = 0; break;
      case RubricOptions::SubAnswers::LastOnly: n_subs = 1; break;
      case RubricOptions::SubAnswers::Trailing: n_subs = std::min(n_inter, 10 - difficulty); break;
    }
  }
  for (int i = 0; i < n_inter; ++i) {
    Criterion c;
    c.kind = CriterionKind::Process;
    c.description = std::string(kProcessPrefix) + " Shows the running value " +
                    std::to_string(inst.intermediates[static_cast<size_t>(i)]) + " at step " +
                    std::to_string(i + 1) + " before stating the final answer.";
    c.weight = std::min(rubric_opts.process_weight_cap, i + 1);
    inst.rubric.criteria.push_back(std::move(c));
    CriterionPayload p;
    p.check = CriterionPayload::Check::IntermediateAppearsBeforeAnswer;
    p.value = inst.intermediates[static_cast<size_t>(i)];
    p.position = i + 1;
    inst.payloads.push_back(p);
  }
  for (int i = n_inter - n_subs; i < n_inter; ++i) {
    Criterion c;
    c.kind = CriterionKind::Factual;
    c.description = std::string(kFactualPrefix) + " States the intermediate sub-answer " +
                    std::to_string(inst.intermediates[static_cast<size_t>(i)]) + " of step " +
                    std::to_string(i + 1) + " before the final answer.";
    c.weight = rubric_opts.sub_weight;
    inst.rubric.criteria.push_back(std::move(c));
    CriterionPayload p;
    p.check = CriterionPayload::Check::IntermediateAppearsBeforeAnswer;
    p.value = inst.intermediates[static_cast<size_t>(i)];
    p.position = i + 1;
    inst.payloads.push_back(p);
  }
  {
    Criterion c;
    c.kind = CriterionKind::Factual;
    c.description = std::string(kFactualPrefix) + " States the correct final value as " +
                    std::to_string(inst.ground_truth) + ".";
    c.weight = 5;
    inst.rubric.criteria.push_back(std::move(c));
    CriterionPayload p;
    p.check = CriterionPayload::Check::FinalAnswerEquals;
    p.value = inst.ground_truth;
    inst.payloads.push_back(p);
  }
  inst.rubric.below_generated_minimum = inst.rubric.size() < 3;

  char idbuf[32];
  std::snprintf(idbuf, sizeof(idbuf), "ca-d%d-%012llx", difficulty,
                static_cast<unsigned long long>(stream.next_u64() & 0xffffffffffffULL));
  inst.id = idbuf;
  inst.rubric.question_id = inst.id;
  validate_rubric(inst.rubric);
  return inst;
}

PromptContext render_prompt(const TaskInstance& instance) {
  PromptContext ctx;
  ctx.tokens = instance.question;
  ctx.origin = PromptContext::Origin::Plain;
  return ctx;
}

ParsedQuestion parse_question(std::span<const TokenId> question, const Vocab& vocab) {
  ParsedQuestion q;
  if (question.empty() || question.back() != vocab.equals) {
    throw DataError("question must end with '='");
  }
  bool expect_operand = true;
  for (size_t i = 0; i + 1 < question.size(); ++i) {
    TokenId t = question[i];
    if (expect_operand) {
      if (!vocab.is_value(t)) throw DataError("expected operand token");
      q.operands.push_back(vocab.value_of(t));
    } else {
      q.ops.push_back(op_char(t, vocab));
    }
    expect_operand = !expect_operand;
  }
  if (q.operands.size() != q.ops.size() + 1 || q.operands.empty()) {
    throw DataError("malformed operand/operator alternation");
  }
  return q;
}

std::optional<int> extract_final_answer(std::span<const TokenId> response, const Vocab& vocab) {
  for (size_t i = response.size(); i-- > 0;) {
    if (response[i] == vocab.ans) {
      if (i + 1 < response.size() && vocab.is_value(response[i + 1])) {
        return vocab.value_of(response[i + 1]);
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string task_to_json_line(const TaskInstance& instance, const Vocab& vocab) {
  nlohmann::json j;
  j["id"] = instance.id;
  j["difficulty"] = instance.difficulty;
  j["modulus"] = instance.modulus;
  j["question"] = nlohmann::json::array();
  for (TokenId t : instance.question) j["question"].push_back(vocab.tokens.at(static_cast<size_t>(t)));
  j["ground_truth"] = instance.ground_truth;
  j["intermediates"] = instance.intermediates;
  j["reference_solution"] = nlohmann::json::array();
  for (TokenId t : instance.reference_solution)
    j["reference_solution"].push_back(vocab.tokens.at(static_cast<size_t>(t)));
  j["rubric"] = nlohmann::json::parse(serialize_rubric(instance.rubric));
  nlohmann::json payloads = nlohmann::json::array();
  for (const CriterionPayload& p : instance.payloads) {
    nlohmann::json pj;
    pj["check"] = p.check == CriterionPayload::Check::FinalAnswerEquals
                      ? "final_answer_equals"
                      : "intermediate_before_answer";
    pj["value"] = p.value;
    if (p.position >= 0) pj["position"] = p.position;
    payloads.push_back(pj);
  }
  j["payloads"] = payloads;
  return j.dump();
}

TaskInstance task_from_json_line(const std::string& line, const Vocab& vocab) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("bad task line: ") + e.what());
  }
  TaskInstance inst;
  try {
    inst.id = j.at("id").get<std::string>();
    inst.difficulty = j.at("difficulty").get<int>();
    inst.modulus = j.at("modulus").get<int>();
    for (const auto& t : j.at("question")) inst.question.push_back(vocab.id_of(t.get<std::string>()));
    inst.ground_truth = j.at("ground_truth").get<int>();
    inst.intermediates = j.at("intermediates").get<std::vector<int>>();
    for (const auto& t : j.at("reference_solution"))
      inst.reference_solution.push_back(vocab.id_of(t.get<std::string>()));
    inst.rubric = parse_rubric(j.at("rubric").dump());
    inst.rubric.question_id = inst.id;
    for (const auto& pj : j.at("payloads")) {
      CriterionPayload p;
      std::string check = pj.at("check").get<std::string>();
      if (check == "final_answer_equals") p.check = CriterionPayload::Check::FinalAnswerEquals;
      else if (check == "intermediate_before_answer")
        p.check = CriterionPayload::Check::IntermediateAppearsBeforeAnswer;
      else throw DataError("unknown payload check: " + check);
      p.value = pj.at("value").get<int>();
      p.position = pj.value("position", -1);
      inst.payloads.push_back(p);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad task line: ") + e.what());
  }
  if (inst.payloads.size() != inst.rubric.criteria.size()) {
    throw DataError("payload array not aligned with rubric for task " + inst.id);
  }
  return inst;
}

void save_task_set(const std::filesystem::path& path, std::span<const TaskInstance> instances,
                   const Vocab& vocab) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open task file for writing: " + path.string());
  for (const TaskInstance& inst : instances) out << task_to_json_line(inst, vocab) << '\n';
  if (!out) throw DataError("failed writing task file: " + path.string());
}

std::vector<TaskInstance> load_task_set(const std::filesystem::path& path, const Vocab& vocab) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open task file: " + path.string());
  std::vector<TaskInstance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(task_from_json_line(line, vocab));
  }
  return out;
}

std::pair<Vocab, std::vector<TaskInstance>> load_task_set_with_vocab(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open task file: " + path.string());
  std::string line;
  int modulus = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("modulus")) {
      throw DataError("task file has no readable modulus: " + path.string());
    }
    modulus = j["modulus"].get<int>();
    break;
  }
  if (modulus < 0) throw DataError("task file is empty: " + path.string());
  Vocab vocab = Vocab::for_modulus(modulus);
  auto tasks = load_task_set(path, vocab);
  for (const TaskInstance& t : tasks) {
    if (t.modulus != modulus) throw DataError("mixed moduli in task file: " + path.string());
  }
  return {std::move(vocab), std::move(tasks)};
}

}  // namespace rgr
