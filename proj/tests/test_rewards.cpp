#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "rgr/judging.hpp"
#include "rgr/rubric.hpp"
#include "rgr/tasks.hpp"

using namespace rgr;
using doctest::Approx;

TEST_CASE("aggregate_score matches hand arithmetic") {
  // weights (5,3,2), bits (1,1,0): oracle gives 8/10.
  auto rubric = testutil::make_rubric(
      {CriterionKind::Factual, CriterionKind::Process, CriterionKind::Process}, {5, 3, 2});
  CHECK(testutil::oracle_aggregate({5, 3, 2}, {1, 1, 0}) == Approx(0.8).epsilon(1e-15));
  CHECK(aggregate_score(rubric, testutil::make_bits({1, 1, 0})) == Approx(0.8).epsilon(1e-15));
  CHECK(aggregate_score(rubric, testutil::make_bits({1, 1, 1})) == 1.0);
  CHECK(aggregate_score(rubric, testutil::make_bits({0, 0, 0})) == 0.0);
}

TEST_CASE("aggregate_score rejects misaligned judgments") {
  auto rubric = testutil::make_rubric({CriterionKind::Factual}, {5});
  CHECK_THROWS_AS(aggregate_score(rubric, testutil::make_bits({1, 0})), Error);
}

TEST_CASE("final_reward factual dominance and fallback") {
  // kinds (F,F,P), weights (5,5,2), bits (1,1,0): both factual pass -> 1.0.
  auto r1 = testutil::make_rubric(
      {CriterionKind::Factual, CriterionKind::Factual, CriterionKind::Process}, {5, 5, 2});
  CHECK(final_reward(r1, testutil::make_bits({1, 1, 0})) == 1.0);

  // kinds (F,P), weights (3,1), bits (0,1): factual failed -> aggregate 1/4.
  auto r2 = testutil::make_rubric({CriterionKind::Factual, CriterionKind::Process}, {3, 1});
  CHECK(testutil::oracle_final({CriterionKind::Factual, CriterionKind::Process}, {3, 1}, {0, 1}) ==
        Approx(0.25).epsilon(1e-15));
  CHECK(final_reward(r2, testutil::make_bits({0, 1})) == Approx(0.25).epsilon(1e-15));

  CHECK(final_reward(r2, testutil::make_bits({1, 1})) == 1.0);

  // No factual criteria: falls back to the aggregate, not constant 1.
  auto r3 = testutil::make_rubric({CriterionKind::Process, CriterionKind::Process}, {2, 2});
  CHECK(final_reward(r3, testutil::make_bits({1, 0})) == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("final_reward equals oracle on random rubrics") {
  RngStream rng(2024);
  for (int trial = 0; trial < 2000; ++trial) {
    int n = 1 + rng.uniform_int(10);
    std::vector<CriterionKind> kinds;
    std::vector<int> weights, bits;
    for (int k = 0; k < n; ++k) {
      kinds.push_back(rng.uniform_int(2) ? CriterionKind::Factual : CriterionKind::Process);
      weights.push_back(1 + rng.uniform_int(5));
      bits.push_back(rng.uniform_int(2));
    }
    auto rubric = testutil::make_rubric(kinds, weights);
    auto j = testutil::make_bits(bits);
    CHECK(aggregate_score(rubric, j) == Approx(testutil::oracle_aggregate(weights, bits)).epsilon(1e-12));
    CHECK(final_reward(rubric, j) == Approx(testutil::oracle_final(kinds, weights, bits)).epsilon(1e-12));
  }
}

TEST_CASE("aggregate_score monotone under bit flips and scale-invariant") {
  RngStream rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    int n = 1 + rng.uniform_int(8);
    std::vector<CriterionKind> kinds(static_cast<size_t>(n), CriterionKind::Process);
    std::vector<int> weights, bits;
    for (int k = 0; k < n; ++k) {
      weights.push_back(1 + rng.uniform_int(5));
      bits.push_back(rng.uniform_int(2));
    }
    auto rubric = testutil::make_rubric(kinds, weights);
    double base = aggregate_score(rubric, testutil::make_bits(bits));
    int k = rng.uniform_int(n);
    auto flipped = bits;
    flipped[static_cast<size_t>(k)] ^= 1;
    double after = aggregate_score(rubric, testutil::make_bits(flipped));
    if (bits[static_cast<size_t>(k)] == 0) CHECK(after >= base);
    else CHECK(after <= base);

    // Uniform positive scaling of weights leaves the score unchanged.
    std::vector<int> kinds_idx;
    auto scaled = weights;
    // scale staying within the 1..5 storage range is not required for the
    // algebra; bypass the ctor checks by scaling the oracle only.
    CHECK(testutil::oracle_aggregate(weights, bits) ==
          Approx([&] {
            std::vector<int> w2;
            for (int w : weights) w2.push_back(w * 3);
            return testutil::oracle_aggregate(w2, bits);
          }()).epsilon(1e-12));
    (void)scaled;
  }
}

TEST_CASE("factual dominance holds for every process-bit pattern") {
  // Exhaustive over |C| <= 12: all-factual-pass forces reward 1 regardless of
  // process bits.
  RngStream rng(99);
  for (int n = 1; n <= 12; ++n) {
    std::vector<CriterionKind> kinds;
    std::vector<int> weights;
    int factual = 0;
    for (int k = 0; k < n; ++k) {
      bool f = rng.uniform_int(3) == 0;
      if (f) ++factual;
      kinds.push_back(f ? CriterionKind::Factual : CriterionKind::Process);
      weights.push_back(1 + rng.uniform_int(5));
    }
    if (factual == 0) {
      kinds[0] = CriterionKind::Factual;
      ++factual;
    }
    auto rubric = testutil::make_rubric(kinds, weights);
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<int> bits;
      bool factual_all = true;
      for (int k = 0; k < n; ++k) {
        int b = (mask >> k) & 1;
        bits.push_back(b);
        if (kinds[static_cast<size_t>(k)] == CriterionKind::Factual && !b) factual_all = false;
      }
      double r = final_reward(rubric, testutil::make_bits(bits));
      if (factual_all) CHECK(r == 1.0);
      else CHECK(r == Approx(testutil::oracle_aggregate(weights, bits)).epsilon(1e-12));
    }
  }
}

TEST_CASE("length penalty") {
  // reward 1.0, L=3000, lambda=1e-4, L*=2000 -> 0.9.
  CHECK(apply_length_penalty(1.0, 3000, 1e-4, 2000) == Approx(0.9).epsilon(1e-12));
  CHECK(apply_length_penalty(0.7, 100, 1e-4, 2000) == 0.7);  // clamp below target
  CHECK(apply_length_penalty(0.7, 3000, 0.0, 2000) == 0.7);  // zero lambda
  // Unclamped literal form rewards brevity below the target.
  CHECK(apply_length_penalty(0.5, 100, 0.01, 200, true) == Approx(1.5).epsilon(1e-12));
  SUBCASE("never increases reward when clamped") {
    RngStream rng(3);
    for (int t = 0; t < 200; ++t) {
      double reward = rng.uniform();
      int len = rng.uniform_int(100);
      int target = rng.uniform_int(100);
      double lambda = rng.uniform() * 0.01;
      double out = apply_length_penalty(reward, len, lambda, target);
      CHECK(out <= reward);
      if (len <= target || lambda == 0.0) CHECK(out == reward);
      else CHECK(out < reward);
    }
  }
}

TEST_CASE("failed_criteria preserves order and matches aggregate") {
  auto rubric = testutil::make_rubric(
      {CriterionKind::Process, CriterionKind::Factual, CriterionKind::Process}, {1, 5, 2});
  auto failed = failed_criteria(rubric, testutil::make_bits({1, 0, 1}));
  REQUIRE(failed.size() == 1);
  CHECK(failed[0].description == rubric.criteria[1].description);
  CHECK(failed_criteria(rubric, testutil::make_bits({1, 1, 1})).empty());
  auto all = failed_criteria(rubric, testutil::make_bits({0, 0, 0}));
  REQUIRE(all.size() == 3);
  CHECK(all[0].description == rubric.criteria[0].description);
  CHECK(all[2].description == rubric.criteria[2].description);

  SUBCASE("empty failed set iff aggregate is 1") {
    RngStream rng(11);
    for (int t = 0; t < 500; ++t) {
      int n = 1 + rng.uniform_int(8);
      std::vector<CriterionKind> kinds(static_cast<size_t>(n), CriterionKind::Process);
      std::vector<int> weights, bits;
      for (int k = 0; k < n; ++k) {
        weights.push_back(1 + rng.uniform_int(5));
        bits.push_back(rng.uniform_int(2));
      }
      auto r = testutil::make_rubric(kinds, weights);
      auto j = testutil::make_bits(bits);
      CHECK(failed_criteria(r, j).empty() == (aggregate_score(r, j) == 1.0));
    }
  }
}

TEST_CASE("reward_breakdown fields") {
  auto rubric = testutil::make_rubric({CriterionKind::Factual, CriterionKind::Process}, {5, 3});
  auto b = reward_breakdown(rubric, testutil::make_bits({1, 0}), 40, 0.01, 30);
  CHECK(b.factual_all_pass);
  CHECK(b.aggregate == Approx(5.0 / 8.0));
  CHECK(b.pre_penalty_reward == 1.0);
  CHECK(b.penalty == Approx(0.1));
  CHECK(b.final == Approx(0.9));
  CHECK(b.final == Approx(b.pre_penalty_reward - b.penalty));
}

// ---- rubric JSON schema ----------------------------------------------------

TEST_CASE("parse_rubric accepts the interchange form") {
  Rubric r = parse_rubric(
      R"([{"description":"Factual Criteria: States the correct final value of the integral as pi/2","weight":5}])");
  REQUIRE(r.size() == 1);
  CHECK(r.criteria[0].kind == CriterionKind::Factual);
  CHECK(r.criteria[0].weight == 5);
  CHECK(r.below_generated_minimum);  // |C| < 3: hand-written rubric warning
}

TEST_CASE("parse_rubric error variants carry the offending index") {
  auto kind_of = [](const std::string& text) {
    try {
      parse_rubric(text);
    } catch (const RubricParseError& e) {
      return std::pair<RubricParseError::Kind, int>{e.kind, e.item_index};
    }
    return std::pair<RubricParseError::Kind, int>{RubricParseError::Kind::MalformedJson, -99};
  };
  CHECK(kind_of("[").first == RubricParseError::Kind::MalformedJson);
  CHECK(kind_of("[]").first == RubricParseError::Kind::EmptyRubric);
  CHECK(kind_of(R"([{"description":"Factual Criteria: x"}])") ==
        std::pair{RubricParseError::Kind::MissingKey, 0});
  CHECK(kind_of(R"([{"description":"Factual Criteria: x","weight":1,"extra":2}])") ==
        std::pair{RubricParseError::Kind::ExtraKey, 0});
  CHECK(kind_of(R"([{"description":"Factual Criteria: x","weight":0}])") ==
        std::pair{RubricParseError::Kind::WeightOutOfRange, 0});
  CHECK(kind_of(R"([{"description":"Factual Criteria: x","weight":6}])") ==
        std::pair{RubricParseError::Kind::WeightOutOfRange, 0});
  // "Shows substitution u = x^2" carries no kind prefix.
  CHECK(kind_of(R"([{"description":"Factual Criteria: ok","weight":1},)"
                R"({"description":"Shows substitution u = x^2","weight":2}])") ==
        std::pair{RubricParseError::Kind::UnknownPrefix, 1});
}

TEST_CASE("rubric serialization round-trips byte-for-byte") {
  const std::string canonical =
      R"([{"description":"Factual Criteria: States the correct final value as 7.","weight":5},)"
      R"({"description":"Process Criteria: Shows the running value 3 at step 1 before stating the final answer.","weight":1}])";
  Rubric r = parse_rubric(canonical);
  CHECK(serialize_rubric(r) == canonical);
  Rubric again = parse_rubric(serialize_rubric(r));
  REQUIRE(again.size() == r.size());
  for (int k = 0; k < r.size(); ++k) {
    CHECK(again.criteria[static_cast<size_t>(k)].description ==
          r.criteria[static_cast<size_t>(k)].description);
    CHECK(again.criteria[static_cast<size_t>(k)].weight == r.criteria[static_cast<size_t>(k)].weight);
    CHECK(again.criteria[static_cast<size_t>(k)].kind == r.criteria[static_cast<size_t>(k)].kind);
  }
}

// ---- tasks -----------------------------------------------------------------

TEST_CASE("generate_instance d=2 hand check") {
  // Find a (3, 4, +) instance by scanning seeds; then verify the chain by hand:
  // ground truth 7, one Process criterion for intermediate 3, Factual(7).
  Vocab vocab = Vocab::for_modulus(17);
  bool found = false;
  for (uint64_t seed = 0; seed < 4000 && !found; ++seed) {
    RngStream rng(seed);
    TaskInstance inst = generate_instance(rng, 2, 17, vocab);
    auto q = parse_question(inst.question, vocab);
    if (q.operands == std::vector<int>{3, 4} && q.ops == std::vector<char>{'+'}) {
      found = true;
      CHECK(inst.ground_truth == 7);
      REQUIRE(inst.intermediates.size() == 1);
      CHECK(inst.intermediates[0] == 3);
      REQUIRE(inst.rubric.size() == 2);
      CHECK(inst.rubric.criteria[0].kind == CriterionKind::Process);
      CHECK(inst.rubric.criteria[1].kind == CriterionKind::Factual);
      CHECK(inst.rubric.criteria[1].weight == 5);
      CHECK(inst.payloads[1].value == 7);
      CHECK(vocab.decode(inst.reference_solution) == "3 ; #ANS 7 #END");
    }
  }
  CHECK(found);
}

TEST_CASE("generate_instance is deterministic and self-consistent") {
  Vocab vocab = Vocab::for_modulus(17);
  DeterministicJudge judge(vocab);
  RngStream a(42), b(42);
  TaskInstance x = generate_instance(a, 4, 17, vocab);
  TaskInstance y = generate_instance(b, 4, 17, vocab);
  CHECK(x.id == y.id);
  CHECK(x.question == y.question);
  CHECK(x.reference_solution == y.reference_solution);

  // Reference solutions satisfy every criterion and score outcome 1.
  RngStream rng(7);
  for (int t = 0; t < 2000; ++t) {
    int d = 2 + rng.uniform_int(5);
    TaskInstance inst = generate_instance(rng, d, 17, vocab);
    JudgmentVector j = judge_rollout(judge, inst, inst.reference_solution);
    CHECK(j.all_satisfied());
    CHECK(outcome_reward(inst, inst.reference_solution, vocab) == 1);
    CHECK(final_reward(inst.rubric, j) == 1.0);
    // Rubric shape: d-1 process criteria, factual sub-answers on the trailing
    // intermediates for d >= 3, one factual final; 3 <= |C| <= 10 for d >= 3.
    int subs = d >= 3 ? std::min(d - 1, 10 - d) : 0;
    CHECK(inst.rubric.size() == (d - 1) + subs + 1);
    CHECK(inst.rubric.size() <= 10);
    if (d >= 3) {
      CHECK(inst.rubric.size() >= 3);
      CHECK(!inst.rubric.below_generated_minimum);
    }
    CHECK(inst.rubric.criteria.back().kind == CriterionKind::Factual);
    CHECK(inst.rubric.criteria.back().weight == 5);
    // Chain evaluation reproduces the embedded intermediates.
    auto q = parse_question(inst.question, vocab);
    int run = q.operands[0];
    for (size_t i = 0; i < q.ops.size(); ++i) {
      if (i + 1 < q.operands.size()) {
        int rhs = q.operands[i + 1];
        if (q.ops[i] == '+') run = (run + rhs) % 17;
        else if (q.ops[i] == '-') run = ((run - rhs) % 17 + 17) % 17;
        else run = (run * rhs) % 17;
      }
    }
    CHECK(run == inst.ground_truth);
  }
}

TEST_CASE("generate_instance validates bounds") {
  Vocab vocab = Vocab::for_modulus(17);
  RngStream rng(1);
  CHECK_THROWS_AS(generate_instance(rng, 1, 17, vocab), ConfigError);
  CHECK_THROWS_AS(generate_instance(rng, 11, 17, vocab), ConfigError);
  CHECK_THROWS_AS(generate_instance(rng, 4, 15, vocab), ConfigError);  // not prime
}

TEST_CASE("render_prompt is injective and parseable") {
  Vocab vocab = Vocab::for_modulus(7);
  RngStream rng(5);
  std::vector<TaskInstance> seen;
  for (int t = 0; t < 300; ++t) {
    TaskInstance inst = generate_instance(rng, 3, 7, vocab);
    PromptContext ctx = render_prompt(inst);
    CHECK(ctx.origin == PromptContext::Origin::Plain);
    for (TokenId tok : ctx.tokens) {
      CHECK(tok != vocab.ans);
      CHECK(tok != vocab.end);
    }
    auto q = parse_question(ctx.tokens, vocab);
    // Round trip: re-render from the parse and compare.
    std::vector<TokenId> rebuilt;
    rebuilt.push_back(vocab.value(q.operands[0]));
    for (size_t i = 0; i < q.ops.size(); ++i) {
      rebuilt.push_back(q.ops[i] == '+' ? vocab.op_add
                        : q.ops[i] == '-' ? vocab.op_sub
                                          : vocab.op_mul);
      rebuilt.push_back(vocab.value(q.operands[i + 1]));
    }
    rebuilt.push_back(vocab.equals);
    CHECK(rebuilt == ctx.tokens);
    for (const TaskInstance& other : seen) {
      if (other.question == inst.question) {
        CHECK(other.ground_truth == inst.ground_truth);
      }
    }
    seen.push_back(inst);
  }
}

TEST_CASE("extract_final_answer rules") {
  Vocab vocab = Vocab::for_modulus(17);
  auto enc = [&](const std::string& s) { return vocab.encode(s); };
  CHECK(extract_final_answer(enc("3 ; #ANS 12 #END"), vocab) == 12);
  CHECK(!extract_final_answer(enc("3 ; 12"), vocab).has_value());
  // Two markers: the value after the LAST one wins.
  CHECK(extract_final_answer(enc("#ANS 4 ; #ANS 9 #END"), vocab) == 9);
  // Marker followed by a non-value token parses as none.
  CHECK(!extract_final_answer(enc("3 #ANS + 4"), vocab).has_value());
  CHECK(!extract_final_answer(enc("3 #ANS"), vocab).has_value());
}

TEST_CASE("deterministic judge criterion semantics") {
  Vocab vocab = Vocab::for_modulus(17);
  DeterministicJudge judge(vocab);
  RngStream rng(123);
  // Build an instance and craft responses around its payloads.
  TaskInstance inst = generate_instance(rng, 3, 17, vocab);
  int mid = inst.intermediates[1];
  int answer = inst.ground_truth;
  const int final_idx = inst.rubric.size() - 1;

  // Process value before the marker: satisfied.
  auto ok = vocab.encode(std::to_string(inst.intermediates[0]) + " ; " + std::to_string(mid) +
                         " ; #ANS " + std::to_string(answer) + " #END");
  CHECK(judge.judge_criterion(inst, ok, 1) == 1);

  // Wrong final token: factual final bit 0, intermediate bits unaffected.
  auto wrong_final = vocab.encode(std::to_string(inst.intermediates[0]) + " ; " +
                                  std::to_string(mid) + " ; #ANS " +
                                  std::to_string((answer + 1) % 17) + " #END");
  CHECK(judge.judge_criterion(inst, wrong_final, final_idx) == 0);
  CHECK(judge.judge_criterion(inst, wrong_final, 0) == 1);
  CHECK(judge.judge_criterion(inst, wrong_final, 1) == 1);

  // Intermediate appearing only after the marker does not count.
  auto late = vocab.encode("#ANS " + std::to_string(answer) + " " + std::to_string(mid) + " #END");
  if (mid != answer) CHECK(judge.judge_criterion(inst, late, 1) == 0);

  // Empty response: nothing satisfied.
  std::vector<TokenId> empty;
  JudgmentVector j = judge_rollout(judge, inst, empty);
  CHECK(!j.all_satisfied());
  for (uint8_t b : j.bits) CHECK(b == 0);

  // Reference solution: all ones.
  CHECK(judge_rollout(judge, inst, inst.reference_solution).all_satisfied());
}

TEST_CASE("judge and outcome share the extraction rule") {
  Vocab vocab = Vocab::for_modulus(17);
  DeterministicJudge judge(vocab);
  RngStream rng(77);
  for (int t = 0; t < 400; ++t) {
    TaskInstance inst = generate_instance(rng, 2 + rng.uniform_int(4), 17, vocab);
    // Random token soup responses.
    std::vector<TokenId> resp;
    int len = rng.uniform_int(20);
    for (int i = 0; i < len; ++i) resp.push_back(rng.uniform_int(vocab.size()));
    int outcome = outcome_reward(inst, resp, vocab);
    JudgmentVector j = judge_rollout(judge, inst, resp);
    int final_idx = inst.rubric.size() - 1;
    if (outcome == 1) CHECK(j.bits[static_cast<size_t>(final_idx)] == 1);
    if (j.bits[static_cast<size_t>(final_idx)] == 1) CHECK(outcome == 1);
  }
}

TEST_CASE("surgical mutations flip exactly the bits that check the mutated token") {
  Vocab vocab = Vocab::for_modulus(17);
  DeterministicJudge judge(vocab);
  RngStream rng(55);
  int deletion_cases = 0;
  for (int t = 0; t < 1500; ++t) {
    TaskInstance inst = generate_instance(rng, 2 + rng.uniform_int(4), 17, vocab);
    JudgmentVector ref = judge_rollout(judge, inst, inst.reference_solution);
    REQUIRE(ref.all_satisfied());

    // Corrupt the final value: flips exactly the factual final-answer bit.
    auto corrupted = inst.reference_solution;
    size_t val_pos = corrupted.size() - 2;  // ... #ANS <value> #END
    corrupted[val_pos] = vocab.value((inst.ground_truth + 1) % 17);
    JudgmentVector after = judge_rollout(judge, inst, corrupted);
    for (int k = 0; k < inst.rubric.size(); ++k) {
      bool is_final = k == inst.rubric.size() - 1;
      CHECK(after.bits[static_cast<size_t>(k)] == (is_final ? 0 : 1));
    }

    // Delete one intermediate (when intermediates are pairwise distinct):
    // flips that process bit plus the sub-answer bit when one covers it, and
    // nothing else.
    bool distinct = true;
    for (size_t a = 0; a < inst.intermediates.size(); ++a)
      for (size_t b = a + 1; b < inst.intermediates.size(); ++b)
        if (inst.intermediates[a] == inst.intermediates[b]) distinct = false;
    if (!distinct || inst.intermediates.empty()) continue;
    ++deletion_cases;
    size_t victim = static_cast<size_t>(rng.uniform_int(static_cast<int>(inst.intermediates.size())));
    std::vector<TokenId> pruned;
    for (size_t i = 0; i < inst.reference_solution.size(); ++i) {
      if (i == 2 * victim || i == 2 * victim + 1) continue;  // value + separator
      pruned.push_back(inst.reference_solution[i]);
    }
    JudgmentVector mut = judge_rollout(judge, inst, pruned);
    for (int k = 0; k < inst.rubric.size(); ++k) {
      bool checks_victim =
          inst.payloads[static_cast<size_t>(k)].check ==
              CriterionPayload::Check::IntermediateAppearsBeforeAnswer &&
          inst.payloads[static_cast<size_t>(k)].position == static_cast<int>(victim) + 1;
      CHECK(mut.bits[static_cast<size_t>(k)] == (checks_victim ? 0 : 1));
    }
  }
  CHECK(deletion_cases > 500);
}

TEST_CASE("factual payload on an intermediate acts as a sub-answer check") {
  // Hand-written rubric: a Factual criterion carrying an
  // intermediate-presence payload (the generator emits none of these, but the
  // judge supports them).
  Vocab vocab = Vocab::for_modulus(17);
  DeterministicJudge judge(vocab);
  RngStream rng(9);
  TaskInstance inst = generate_instance(rng, 3, 17, vocab);
  Criterion sub;
  sub.kind = CriterionKind::Factual;
  sub.description = std::string(kFactualPrefix) + " States the sub-answer " +
                    std::to_string(inst.intermediates[1]) + ".";
  sub.weight = 4;
  inst.rubric.criteria.push_back(sub);
  CriterionPayload p;
  p.check = CriterionPayload::Check::IntermediateAppearsBeforeAnswer;
  p.value = inst.intermediates[1];
  p.position = 2;
  inst.payloads.push_back(p);

  JudgmentVector j = judge_rollout(judge, inst, inst.reference_solution);
  CHECK(j.all_satisfied());
  // Missing payload is a configuration error.
  inst.payloads.pop_back();
  CHECK_THROWS_AS(judge_rollout(judge, inst, inst.reference_solution), JudgeError);
}

TEST_CASE("task set files round-trip") {
  Vocab vocab = Vocab::for_modulus(17);
  RngStream rng(31);
  std::vector<TaskInstance> tasks;
  for (int i = 0; i < 40; ++i) tasks.push_back(generate_instance(rng, 2 + (i % 4), 17, vocab));
  auto path = std::filesystem::temp_directory_path() / "rgr_tasks_test.ldjson";
  save_task_set(path, tasks, vocab);
  auto loaded = load_task_set(path, vocab);
  REQUIRE(loaded.size() == tasks.size());
  for (size_t i = 0; i < tasks.size(); ++i) {
    CHECK(loaded[i].id == tasks[i].id);
    CHECK(loaded[i].question == tasks[i].question);
    CHECK(loaded[i].reference_solution == tasks[i].reference_solution);
    CHECK(loaded[i].ground_truth == tasks[i].ground_truth);
    CHECK(serialize_rubric(loaded[i].rubric) == serialize_rubric(tasks[i].rubric));
    REQUIRE(loaded[i].payloads.size() == tasks[i].payloads.size());
    for (size_t k = 0; k < tasks[i].payloads.size(); ++k) {
      CHECK(loaded[i].payloads[k].check == tasks[i].payloads[k].check);
      CHECK(loaded[i].payloads[k].value == tasks[i].payloads[k].value);
      CHECK(loaded[i].payloads[k].position == tasks[i].payloads[k].position);
    }
  }
  std::filesystem::remove(path);
}
