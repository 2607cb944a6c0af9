#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rgr/rng.hpp"
#include "rgr/rollout.hpp"
#include "rgr/vocab.hpp"

namespace rgr {

/// Linear-softmax sequence policy over hashed suffix n-gram features.
///
/// The conditioning window is the last `context_order` tokens of
/// prompt + generated prefix (left-padded with the begin marker). Each suffix
/// n-gram, n = 1..m, hashes into its own slot block of size F/m, so a window
/// always activates exactly m distinct slots. Logits are the sum of the active
/// rows of theta; probabilities are softmax(logits / tau). Gradients of
/// log-probabilities and entropy are exact and analytic.
struct PolicyParams {
  int feature_slots = 0;  // F, total rows
  int context_order = 0;  // m
  int vocab_size = 0;     // V
  std::vector<double> theta;  // F x V row-major

  double& at(int slot, int v) { return theta[static_cast<size_t>(slot) * vocab_size + v]; }
  double at(int slot, int v) const { return theta[static_cast<size_t>(slot) * vocab_size + v]; }
};

PolicyParams make_params(int feature_slots, int context_order, int vocab_size);

/// Slot indices activated by the window ending the given prefix. Exactly m
/// entries, one per suffix n-gram length, all distinct (per-length blocks).
void context_slots(const PolicyParams& params, std::span<const TokenId> prefix,
                   TokenId begin_token, std::span<int> out_slots);

std::vector<int> context_slots(const PolicyParams& params, std::span<const TokenId> prefix,
                               TokenId begin_token);

/// softmax(sum of active rows / tau); entries positive, sums to 1.
std::vector<double> token_distribution(const PolicyParams& params, std::span<const int> slots,
                                       double tau);

/// Allocation-free variant writing into a V-sized buffer.
void token_distribution_into(const PolicyParams& params, std::span<const int> slots, double tau,
                             std::span<double> out);

/// Ancestral sampling until the end marker or max_len. Per-token
/// log-probabilities are recorded at the sampling temperature.
Rollout sample_sequence(const PolicyParams& params, const PromptContext& prompt, int max_len,
                        double tau, RngStream& rng, const Vocab& vocab);

/// Greedy (argmax) decoding, ties broken toward the lowest token id. This is
/// the temperature-0 evaluation path.
std::vector<TokenId> greedy_sequence(const PolicyParams& params, const PromptContext& prompt,
                                     int max_len, const Vocab& vocab);

/// log pi(o_t | prompt, o_<t) for each t. Re-scoring a rollout under its
/// generating params reproduces the stored values.
std::vector<double> sequence_logprob(const PolicyParams& params, const PromptContext& prompt,
                                     std::span<const TokenId> tokens, double tau);

/// Sparse gradient accumulator shaped like theta. Merges and reductions are
/// done in sorted-slot order where bit-stable results matter.
class GradAccum {
 public:
  GradAccum(int feature_slots, int vocab_size)
      : feature_slots_(feature_slots), vocab_size_(vocab_size) {}

  int vocab_size() const { return vocab_size_; }
  int feature_slots() const { return feature_slots_; }
  bool empty() const { return rows_.empty(); }
  size_t row_count() const { return rows_.size(); }

  /// row[slot] += scale * vec
  void add_row(int slot, double scale, std::span<const double> vec);
  /// row[slot][v] += value
  void add(int slot, int v, double value);
  void scale(double factor);
  /// this += other, iterating other's rows in sorted slot order.
  void merge(const GradAccum& other);
  /// theta += lr * this, rows applied in sorted slot order.
  void axpy_into(PolicyParams& params, double lr) const;
  double l2_norm() const;
  double squared_distance(const GradAccum& other) const;
  bool all_finite() const;
  double dot_theta_like(const GradAccum& other) const;

  const std::map<int, std::vector<double>>& rows() const { return rows_; }

 private:
  int feature_slots_;
  int vocab_size_;
  std::map<int, std::vector<double>> rows_;
};

/// Accumulates sum_t coef[t] * grad_theta log pi(o_t | prompt, o_<t).
/// For one position the per-slot contribution is coef * (onehot(o_t) - p) / tau.
void logprob_gradient(const PolicyParams& params, const PromptContext& prompt,
                      std::span<const TokenId> tokens, double tau,
                      std::span<const double> coefficients, GradAccum& accum);

/// All conditioning windows a response was sampled under, one per emitted
/// token, each exactly context_order tokens (begin-padded).
std::vector<std::vector<TokenId>> sampling_windows(const PolicyParams& params,
                                                   std::span<const TokenId> prompt_tokens,
                                                   std::span<const TokenId> response_tokens,
                                                   TokenId begin_token);

/// Mean Shannon entropy (nats) of the token distribution over the windows.
/// When grad_out is given, the analytic gradient of the MEAN entropy is
/// accumulated into it (scaled by grad_scale).
double mean_entropy(const PolicyParams& params, std::span<const std::vector<TokenId>> windows,
                    double tau, GradAccum* grad_out = nullptr, double grad_scale = 1.0);

/// Refinement conditioning: question ++ #REFINE ++ one #Ck per failed
/// criterion (ascending rubric order) ++ ";" ++ best-response body ++ ";".
/// Errors if any index exceeds 9, or if failed is empty with allow_empty off
/// (the gate only routes here when something failed; the unconditional-mix
/// variance probe is the one caller that passes allow_empty).
PromptContext build_refinement_prompt(std::span<const TokenId> question_tokens,
                                      const Rollout& best, std::span<const int> failed_indices,
                                      const Vocab& vocab, bool allow_empty = false);

// ---- checkpoints: sparse textual dump, bit-exact round-trip ----

void save_checkpoint(const std::filesystem::path& path, const PolicyParams& params,
                     const Vocab& vocab);
struct Checkpoint {
  PolicyParams params;
  Vocab vocab;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace rgr
