#include "rgr/rubric.hpp"

#include <algorithm>

#include "json.hpp"

namespace rgr {

namespace {

void check_alignment(const Rubric& rubric, const JudgmentVector& judgments) {
  if (rubric.size() != judgments.size()) {
    throw Error("judgment vector length " + std::to_string(judgments.size()) +
                " does not match rubric size " + std::to_string(rubric.size()));
  }
  for (uint8_t b : judgments.bits) {
    if (b != 0 && b != 1) throw Error("judgment bits must be 0 or 1");
  }
}

}  // namespace

void validate_rubric(const Rubric& rubric) {
  if (rubric.criteria.empty()) throw Error("rubric has no criteria");
  long weight_sum = 0;
  for (size_t k = 0; k < rubric.criteria.size(); ++k) {
    const Criterion& c = rubric.criteria[k];
    if (c.weight < 1 || c.weight > 5) {
      throw Error("criterion " + std::to_string(k) + ": weight " + std::to_string(c.weight) +
                  " outside 1..5");
    }
    const char* prefix = c.kind == CriterionKind::Factual ? kFactualPrefix : kProcessPrefix;
    if (c.description.rfind(prefix, 0) != 0) {
      throw Error("criterion " + std::to_string(k) + ": description does not carry its kind prefix");
    }
    weight_sum += c.weight;
  }
  if (weight_sum <= 0) throw Error("rubric weight sum must be positive");
}

Rubric parse_rubric(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw RubricParseError(RubricParseError::Kind::MalformedJson, -1,
                           std::string("malformed rubric JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw RubricParseError(RubricParseError::Kind::MalformedJson, -1,
                           "rubric JSON must be an array of criterion objects");
  }
  if (doc.empty()) {
    throw RubricParseError(RubricParseError::Kind::EmptyRubric, -1, "rubric array is empty");
  }

  Rubric rubric;
  for (size_t k = 0; k < doc.size(); ++k) {
    const auto& item = doc[k];
    int idx = static_cast<int>(k);
    if (!item.is_object()) {
      throw RubricParseError(RubricParseError::Kind::BadType, idx,
                             "item " + std::to_string(k) + " is not an object");
    }
    if (!item.contains("description") || !item.contains("weight")) {
      throw RubricParseError(RubricParseError::Kind::MissingKey, idx,
                             "item " + std::to_string(k) + " missing description or weight");
    }
    if (item.size() != 2) {
      throw RubricParseError(RubricParseError::Kind::ExtraKey, idx,
                             "item " + std::to_string(k) + " carries keys beyond description/weight");
    }
    if (!item["description"].is_string() || !item["weight"].is_number_integer()) {
      throw RubricParseError(RubricParseError::Kind::BadType, idx,
                             "item " + std::to_string(k) + " has wrongly typed keys");
    }
    Criterion c;
    c.description = item["description"].get<std::string>();
    c.weight = item["weight"].get<int>();
    if (c.weight < 1 || c.weight > 5) {
      throw RubricParseError(RubricParseError::Kind::WeightOutOfRange, idx,
                             "item " + std::to_string(k) + ": weight " +
                                 std::to_string(c.weight) + " outside 1..5");
    }
    if (c.description.rfind(kFactualPrefix, 0) == 0) {
      c.kind = CriterionKind::Factual;
    } else if (c.description.rfind(kProcessPrefix, 0) == 0) {
      c.kind = CriterionKind::Process;
    } else {
      throw RubricParseError(RubricParseError::Kind::UnknownPrefix, idx,
                             "item " + std::to_string(k) + ": description lacks a kind prefix");
    }
    rubric.criteria.push_back(std::move(c));
  }
  rubric.below_generated_minimum = rubric.size() < 3;
  return rubric;
}

std::string serialize_rubric(const Rubric& rubric) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Criterion& c : rubric.criteria) {
    arr.push_back({{"description", c.description}, {"weight", c.weight}});
  }
  return arr.dump();
}

double aggregate_score(const Rubric& rubric, const JudgmentVector& judgments) {
  check_alignment(rubric, judgments);
  double num = 0.0, den = 0.0;
  for (int k = 0; k < rubric.size(); ++k) {
    den += rubric.criteria[static_cast<size_t>(k)].weight;
    num += rubric.criteria[static_cast<size_t>(k)].weight * judgments.bits[static_cast<size_t>(k)];
  }
  if (den <= 0.0) throw Error("rubric weight sum must be positive");
  return num / den;
}

double final_reward(const Rubric& rubric, const JudgmentVector& judgments) {
  check_alignment(rubric, judgments);
  bool has_factual = false;
  bool factual_all = true;
  for (int k = 0; k < rubric.size(); ++k) {
    if (rubric.criteria[static_cast<size_t>(k)].kind == CriterionKind::Factual) {
      has_factual = true;
      if (!judgments.bits[static_cast<size_t>(k)]) factual_all = false;
    }
  }
  if (has_factual && factual_all) return 1.0;
  return aggregate_score(rubric, judgments);
}

double apply_length_penalty(double reward, int length_tokens, double lambda, int target_tokens,
                            bool unclamped) {
  if (length_tokens < 0) throw Error("length must be nonnegative");
  if (lambda < 0.0) throw Error("lambda must be nonnegative");
  double over = static_cast<double>(length_tokens - target_tokens);
  if (!unclamped) over = std::max(0.0, over);
  return reward - lambda * over;
}

std::vector<Criterion> failed_criteria(const Rubric& rubric, const JudgmentVector& judgments) {
  check_alignment(rubric, judgments);
  std::vector<Criterion> out;
  for (int k = 0; k < rubric.size(); ++k) {
    if (!judgments.bits[static_cast<size_t>(k)]) out.push_back(rubric.criteria[static_cast<size_t>(k)]);
  }
  return out;
}

std::vector<int> failed_indices(const Rubric& rubric, const JudgmentVector& judgments) {
  check_alignment(rubric, judgments);
  std::vector<int> out;
  for (int k = 0; k < rubric.size(); ++k) {
    if (!judgments.bits[static_cast<size_t>(k)]) out.push_back(k);
  }
  return out;
}

RewardBreakdown reward_breakdown(const Rubric& rubric, const JudgmentVector& judgments,
                                 int length_tokens, double lambda, int target_tokens,
                                 bool unclamped) {
  RewardBreakdown b;
  b.aggregate = aggregate_score(rubric, judgments);
  bool has_factual = false, factual_all = true;
  for (int k = 0; k < rubric.size(); ++k) {
    if (rubric.criteria[static_cast<size_t>(k)].kind == CriterionKind::Factual) {
      has_factual = true;
      if (!judgments.bits[static_cast<size_t>(k)]) factual_all = false;
    }
  }
  b.factual_all_pass = has_factual && factual_all;
  b.pre_penalty_reward = b.factual_all_pass ? 1.0 : b.aggregate;
  b.length_tokens = length_tokens;
  b.final = apply_length_penalty(b.pre_penalty_reward, length_tokens, lambda, target_tokens,
                                 unclamped);
  b.penalty = b.pre_penalty_reward - b.final;
  return b;
}

}  // namespace rgr
