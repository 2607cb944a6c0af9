#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "rgr/grpo.hpp"
#include "rgr/policy.hpp"
#include "rgr/rng.hpp"
#include "rgr/rubric.hpp"
#include "rgr/vocab.hpp"

namespace testutil {

// ---- independent reward oracles -------------------------------------------
// Deliberately separate evaluations of the weighted-aggregate and
// factual-dominance rules; the library implementation is never called here.

inline double oracle_aggregate(const std::vector<int>& weights, const std::vector<int>& bits) {
  long num = 0, den = 0;
  for (size_t k = 0; k < weights.size(); ++k) {
    den += weights[k];
    num += weights[k] * bits[k];
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

inline double oracle_final(const std::vector<rgr::CriterionKind>& kinds,
                           const std::vector<int>& weights, const std::vector<int>& bits) {
  bool has_factual = false, all_factual = true;
  for (size_t k = 0; k < kinds.size(); ++k) {
    if (kinds[k] == rgr::CriterionKind::Factual) {
      has_factual = true;
      if (!bits[k]) all_factual = false;
    }
  }
  if (has_factual && all_factual) return 1.0;
  return oracle_aggregate(weights, bits);
}

inline rgr::Rubric make_rubric(const std::vector<rgr::CriterionKind>& kinds,
                               const std::vector<int>& weights) {
  rgr::Rubric r;
  for (size_t k = 0; k < kinds.size(); ++k) {
    rgr::Criterion c;
    c.kind = kinds[k];
    c.description = std::string(c.kind == rgr::CriterionKind::Factual ? rgr::kFactualPrefix
                                                                      : rgr::kProcessPrefix) +
                    " item " + std::to_string(k);
    c.weight = weights[k];
    r.criteria.push_back(c);
  }
  return r;
}

inline rgr::JudgmentVector make_bits(const std::vector<int>& bits) {
  rgr::JudgmentVector j;
  for (int b : bits) j.bits.push_back(static_cast<uint8_t>(b));
  return j;
}

// ---- tiny vocab for pure policy/gradient math ------------------------------
// Marker layout mirrors the real vocab's conventions (begin is the last id,
// end just before it) without the arithmetic-task tokens.

inline rgr::Vocab tiny_vocab(int size) {
  rgr::Vocab v;
  v.modulus = 1;
  for (int i = 0; i < size; ++i) {
    v.tokens.push_back("t" + std::to_string(i));
    v.index.emplace(v.tokens.back(), i);
  }
  v.end = size - 2;
  v.begin = size - 1;
  v.sep = 0;
  v.ans = 0;
  v.refine = 0;
  v.equals = 0;
  v.op_add = v.op_sub = v.op_mul = 0;
  return v;
}

inline rgr::PolicyParams random_params(int slots, int order, int vocab, double scale,
                                       rgr::RngStream& rng) {
  rgr::PolicyParams p = rgr::make_params(slots, order, vocab);
  for (double& x : p.theta) x = scale * (2.0 * rng.uniform() - 1.0);
  return p;
}

// ---- finite-difference gradient oracle -------------------------------------
// Central differences over every coordinate the analytic gradient touches,
// plus spot coordinates outside its support. Returns the vector-level
// relative error ||g_fd - g_an|| / max(||g_fd||, ||g_an||, floor).

inline double fd_relative_error(rgr::PolicyParams& params, const rgr::GradAccum& analytic,
                                const std::function<double()>& objective, double h = 1e-5) {
  double diff_sq = 0.0, an_sq = 0.0, fd_sq = 0.0;
  auto probe_coord = [&](int slot, int v, double an) {
    double saved = params.at(slot, v);
    params.at(slot, v) = saved + h;
    double up = objective();
    params.at(slot, v) = saved - h;
    double down = objective();
    params.at(slot, v) = saved;
    double fd = (up - down) / (2.0 * h);
    diff_sq += (fd - an) * (fd - an);
    an_sq += an * an;
    fd_sq += fd * fd;
  };
  for (const auto& [slot, row] : analytic.rows()) {
    for (int v = 0; v < analytic.vocab_size(); ++v) probe_coord(slot, v, row[static_cast<size_t>(v)]);
  }
  // A few rows outside the support must have (near-)zero finite differences.
  for (int probe = 0; probe < 2; ++probe) {
    int slot = (probe * 37 + 11) % params.feature_slots;
    if (analytic.rows().count(slot)) continue;
    probe_coord(slot, probe % params.vocab_size, 0.0);
  }
  double denom = std::max({std::sqrt(an_sq), std::sqrt(fd_sq), 1e-10});
  return std::sqrt(diff_sq) / denom;
}

}  // namespace testutil
