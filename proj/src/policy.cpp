#include "rgr/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace rgr {

PolicyParams make_params(int feature_slots, int context_order, int vocab_size) {
  if (feature_slots < 1 || context_order < 1 || vocab_size < 1) {
    throw ConfigError("policy dimensions must be positive");
  }
  if (feature_slots < context_order) {
    throw ConfigError("feature_slots must be at least context_order");
  }
  PolicyParams p;
  p.feature_slots = feature_slots;
  p.context_order = context_order;
  p.vocab_size = vocab_size;
  p.theta.assign(static_cast<size_t>(feature_slots) * vocab_size, 0.0);
  return p;
}

void context_slots(const PolicyParams& params, std::span<const TokenId> prefix,
                   TokenId begin_token, std::span<int> out_slots) {
  const int m = params.context_order;
  const int block = params.feature_slots / m;
  // Window = last m tokens, begin-padded on the left.
  int32_t window[64];
  for (int i = 0; i < m; ++i) {
    long src = static_cast<long>(prefix.size()) - m + i;
    window[i] = src >= 0 ? static_cast<int32_t>(prefix[static_cast<size_t>(src)])
                         : static_cast<int32_t>(begin_token);
  }
  for (int n = 1; n <= m; ++n) {
    // Suffix n-gram = window[m-n .. m-1]; each length owns its own block so a
    // slot set always has exactly m distinct members.
    uint64_t h = fnv1a64(&window[m - n], sizeof(int32_t) * static_cast<size_t>(n),
                         0x9e3779b97f4a7c15ULL ^ static_cast<uint64_t>(n));
    out_slots[static_cast<size_t>(n) - 1] =
        (n - 1) * block + static_cast<int>(h % static_cast<uint64_t>(block));
  }
}

std::vector<int> context_slots(const PolicyParams& params, std::span<const TokenId> prefix,
                               TokenId begin_token) {
  std::vector<int> slots(static_cast<size_t>(params.context_order));
  context_slots(params, prefix, begin_token, slots);
  return slots;
}

void token_distribution_into(const PolicyParams& params, std::span<const int> slots, double tau,
                             std::span<double> out) {
  if (tau <= 0.0) throw ConfigError("temperature must be positive");
  const int V = params.vocab_size;
  double* z = out.data();
  std::fill(z, z + V, 0.0);
  for (int s : slots) {
    const double* row = &params.theta[static_cast<size_t>(s) * V];
    for (int v = 0; v < V; ++v) z[v] += row[v];
  }
  double zmax = z[0];
  for (int v = 1; v < V; ++v) zmax = std::max(zmax, z[v]);
  double sum = 0.0;
  for (int v = 0; v < V; ++v) {
    z[v] = std::exp((z[v] - zmax) / tau);
    sum += z[v];
  }
  for (int v = 0; v < V; ++v) z[v] /= sum;
}

std::vector<double> token_distribution(const PolicyParams& params, std::span<const int> slots,
                                       double tau) {
  std::vector<double> out(static_cast<size_t>(params.vocab_size));
  token_distribution_into(params, slots, tau, out);
  return out;
}

Rollout sample_sequence(const PolicyParams& params, const PromptContext& prompt, int max_len,
                        double tau, RngStream& rng, const Vocab& vocab) {
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  Rollout r;
  r.prompt = prompt;
  std::vector<TokenId> prefix = prompt.tokens;
  prefix.reserve(prefix.size() + static_cast<size_t>(max_len));
  std::vector<int> slots(static_cast<size_t>(params.context_order));
  std::vector<double> p(static_cast<size_t>(params.vocab_size));
  for (int t = 0; t < max_len; ++t) {
    context_slots(params, prefix, vocab.begin, slots);
    token_distribution_into(params, slots, tau, p);
    int tok = rng.categorical(p);
    r.tokens.push_back(tok);
    r.old_logp.push_back(std::log(p[static_cast<size_t>(tok)]));
    prefix.push_back(tok);
    if (tok == vocab.end) return r;
  }
  r.truncated = true;
  return r;
}

std::vector<TokenId> greedy_sequence(const PolicyParams& params, const PromptContext& prompt,
                                     int max_len, const Vocab& vocab) {
  std::vector<TokenId> out;
  std::vector<TokenId> prefix = prompt.tokens;
  std::vector<int> slots(static_cast<size_t>(params.context_order));
  const int V = params.vocab_size;
  for (int t = 0; t < max_len; ++t) {
    context_slots(params, prefix, vocab.begin, slots);
    // Argmax over logits; softmax and temperature are monotone so this is the
    // tau -> 0 limit. Ties resolve to the lowest token id.
    std::vector<double> z(static_cast<size_t>(V), 0.0);
    for (int s : slots) {
      const double* row = &params.theta[static_cast<size_t>(s) * V];
      for (int v = 0; v < V; ++v) z[static_cast<size_t>(v)] += row[v];
    }
    int tok = 0;
    for (int v = 1; v < V; ++v)
      if (z[static_cast<size_t>(v)] > z[static_cast<size_t>(tok)]) tok = v;
    out.push_back(tok);
    prefix.push_back(tok);
    if (tok == vocab.end) break;
  }
  return out;
}

std::vector<double> sequence_logprob(const PolicyParams& params, const PromptContext& prompt,
                                     std::span<const TokenId> tokens, double tau) {
  std::vector<double> out;
  out.reserve(tokens.size());
  std::vector<TokenId> prefix = prompt.tokens;
  prefix.reserve(prefix.size() + tokens.size());
  std::vector<int> slots(static_cast<size_t>(params.context_order));
  std::vector<double> p(static_cast<size_t>(params.vocab_size));
  // Window padding uses the begin marker, which is always the last vocab id.
  for (TokenId tok : tokens) {
    context_slots(params, prefix, params.vocab_size - 1, slots);
    token_distribution_into(params, slots, tau, p);
    out.push_back(std::log(p[static_cast<size_t>(tok)]));
    prefix.push_back(tok);
  }
  return out;
}

void GradAccum::add_row(int slot, double scale, std::span<const double> vec) {
  auto [it, inserted] = rows_.try_emplace(slot);
  if (inserted) it->second.assign(static_cast<size_t>(vocab_size_), 0.0);
  double* row = it->second.data();
  for (int v = 0; v < vocab_size_; ++v) row[v] += scale * vec[static_cast<size_t>(v)];
}

void GradAccum::add(int slot, int v, double value) {
  auto [it, inserted] = rows_.try_emplace(slot);
  if (inserted) it->second.assign(static_cast<size_t>(vocab_size_), 0.0);
  it->second[static_cast<size_t>(v)] += value;
}

void GradAccum::scale(double factor) {
  for (auto& [slot, row] : rows_)
    for (double& x : row) x *= factor;
}

void GradAccum::merge(const GradAccum& other) {
  for (const auto& [slot, row] : other.rows_) {
    auto [it, inserted] = rows_.try_emplace(slot);
    if (inserted) it->second.assign(static_cast<size_t>(vocab_size_), 0.0);
    for (int v = 0; v < vocab_size_; ++v) it->second[static_cast<size_t>(v)] += row[static_cast<size_t>(v)];
  }
}

void GradAccum::axpy_into(PolicyParams& params, double lr) const {
  for (const auto& [slot, row] : rows_) {
    double* dst = &params.theta[static_cast<size_t>(slot) * vocab_size_];
    for (int v = 0; v < vocab_size_; ++v) dst[v] += lr * row[static_cast<size_t>(v)];
  }
}

double GradAccum::l2_norm() const {
  double s = 0.0;
  for (const auto& [slot, row] : rows_)
    for (double x : row) s += x * x;
  return std::sqrt(s);
}

double GradAccum::squared_distance(const GradAccum& other) const {
  // || this - other ||^2 over the union of rows.
  double s = 0.0;
  auto a = rows_.begin();
  auto b = other.rows_.begin();
  auto row_sq = [](const std::vector<double>& row) {
    double t = 0.0;
    for (double x : row) t += x * x;
    return t;
  };
  while (a != rows_.end() || b != other.rows_.end()) {
    if (b == other.rows_.end() || (a != rows_.end() && a->first < b->first)) {
      s += row_sq(a->second);
      ++a;
    } else if (a == rows_.end() || b->first < a->first) {
      s += row_sq(b->second);
      ++b;
    } else {
      for (int v = 0; v < vocab_size_; ++v) {
        double d = a->second[static_cast<size_t>(v)] - b->second[static_cast<size_t>(v)];
        s += d * d;
      }
      ++a;
      ++b;
    }
  }
  return s;
}

double GradAccum::dot_theta_like(const GradAccum& other) const {
  double s = 0.0;
  auto a = rows_.begin();
  auto b = other.rows_.begin();
  while (a != rows_.end() && b != other.rows_.end()) {
    if (a->first < b->first) ++a;
    else if (b->first < a->first) ++b;
    else {
      for (int v = 0; v < vocab_size_; ++v)
        s += a->second[static_cast<size_t>(v)] * b->second[static_cast<size_t>(v)];
      ++a;
      ++b;
    }
  }
  return s;
}

bool GradAccum::all_finite() const {
  for (const auto& [slot, row] : rows_)
    for (double x : row)
      if (!std::isfinite(x)) return false;
  return true;
}

void logprob_gradient(const PolicyParams& params, const PromptContext& prompt,
                      std::span<const TokenId> tokens, double tau,
                      std::span<const double> coefficients, GradAccum& accum) {
  if (tokens.size() != coefficients.size()) {
    throw Error("coefficient list not aligned with tokens");
  }
  std::vector<TokenId> prefix = prompt.tokens;
  prefix.reserve(prefix.size() + tokens.size());
  std::vector<int> slots(static_cast<size_t>(params.context_order));
  std::vector<double> g(static_cast<size_t>(params.vocab_size));
  for (size_t t = 0; t < tokens.size(); ++t) {
    context_slots(params, prefix, params.vocab_size - 1, slots);
    double c = coefficients[t];
    if (c != 0.0) {
      token_distribution_into(params, slots, tau, g);
      // d log pi(o_t) / d theta[slot, v] = (1[v = o_t] - p_v) / tau
      for (int v = 0; v < params.vocab_size; ++v) g[static_cast<size_t>(v)] = -g[static_cast<size_t>(v)];
      g[static_cast<size_t>(tokens[t])] += 1.0;
      for (int s : slots) accum.add_row(s, c / tau, g);
    }
    prefix.push_back(tokens[t]);
  }
}

std::vector<std::vector<TokenId>> sampling_windows(const PolicyParams& params,
                                                   std::span<const TokenId> prompt_tokens,
                                                   std::span<const TokenId> response_tokens,
                                                   TokenId begin_token) {
  const int m = params.context_order;
  std::vector<std::vector<TokenId>> out;
  out.reserve(response_tokens.size());
  std::vector<TokenId> prefix(prompt_tokens.begin(), prompt_tokens.end());
  for (TokenId tok : response_tokens) {
    std::vector<TokenId> w(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
      long src = static_cast<long>(prefix.size()) - m + i;
      w[static_cast<size_t>(i)] = src >= 0 ? prefix[static_cast<size_t>(src)] : begin_token;
    }
    out.push_back(std::move(w));
    prefix.push_back(tok);
  }
  return out;
}

double mean_entropy(const PolicyParams& params, std::span<const std::vector<TokenId>> windows,
                    double tau, GradAccum* grad_out, double grad_scale) {
  if (windows.empty()) throw Error("mean_entropy needs at least one context");
  const int V = params.vocab_size;
  const double n = static_cast<double>(windows.size());
  double total = 0.0;
  std::vector<int> slots(static_cast<size_t>(params.context_order));
  std::vector<double> g(static_cast<size_t>(V));
  std::vector<double> p(static_cast<size_t>(V));
  for (const auto& w : windows) {
    context_slots(params, w, params.vocab_size - 1, slots);
    token_distribution_into(params, slots, tau, p);
    double h = 0.0;
    for (int v = 0; v < V; ++v) {
      double pv = p[static_cast<size_t>(v)];
      if (pv > 0.0) h -= pv * std::log(pv);
    }
    total += h;
    if (grad_out) {
      // dH/dz_v = -p_v (log p_v + H) / tau
      for (int v = 0; v < V; ++v) {
        double pv = p[static_cast<size_t>(v)];
        g[static_cast<size_t>(v)] = pv > 0.0 ? -pv * (std::log(pv) + h) / tau : 0.0;
      }
      for (int s : slots) grad_out->add_row(s, grad_scale / n, g);
    }
  }
  return total / n;
}

PromptContext build_refinement_prompt(std::span<const TokenId> question_tokens,
                                      const Rollout& best, std::span<const int> failed_indices,
                                      const Vocab& vocab, bool allow_empty) {
  if (failed_indices.empty() && !allow_empty) {
    throw Error("refinement prompt needs at least one failed criterion");
  }
  std::vector<int> sorted(failed_indices.begin(), failed_indices.end());
  std::sort(sorted.begin(), sorted.end());
  for (int k : sorted) {
    if (k < 0 || k > 9) {
      throw Error("criterion index " + std::to_string(k) + " exceeds the #C0..#C9 token range");
    }
  }
  PromptContext ctx;
  ctx.origin = PromptContext::Origin::Refine;
  ctx.tokens.assign(question_tokens.begin(), question_tokens.end());
  ctx.tokens.push_back(vocab.refine);
  for (int k : sorted) ctx.tokens.push_back(vocab.crit[static_cast<size_t>(k)]);
  ctx.tokens.push_back(vocab.sep);
  std::vector<TokenId> body = best.body(vocab);
  ctx.tokens.insert(ctx.tokens.end(), body.begin(), body.end());
  ctx.tokens.push_back(vocab.sep);
  return ctx;
}

void save_checkpoint(const std::filesystem::path& path, const PolicyParams& params,
                     const Vocab& vocab) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open checkpoint for writing: " + path.string());
  size_t nonzeros = 0;
  for (double x : params.theta)
    if (x != 0.0) ++nonzeros;
  out << "rgrlab-checkpoint v1\n";
  out << "feature_slots " << params.feature_slots << '\n';
  out << "context_order " << params.context_order << '\n';
  out << "vocab_size " << params.vocab_size << '\n';
  out << "modulus " << vocab.modulus << '\n';
  out << "vocab";
  for (const std::string& t : vocab.tokens) out << ' ' << t;
  out << '\n';
  out << "nonzeros " << nonzeros << '\n';
  char buf[64];
  for (int s = 0; s < params.feature_slots; ++s) {
    for (int v = 0; v < params.vocab_size; ++v) {
      double x = params.at(s, v);
      if (x != 0.0) {
        // Hexfloat keeps the round-trip bit-exact.
        std::snprintf(buf, sizeof(buf), "%d %d %a\n", s, v, x);
        out << buf;
      }
    }
  }
  out << "end\n";
  if (!out) throw DataError("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint: " + path.string());
  std::string line;
  auto read_line = [&]() {
    if (!std::getline(in, line)) throw DataError("truncated checkpoint: " + path.string());
    return line;
  };
  if (read_line() != "rgrlab-checkpoint v1") throw DataError("bad checkpoint header");
  auto read_kv = [&](const std::string& key) {
    read_line();
    if (line.rfind(key + " ", 0) != 0) throw DataError("expected '" + key + "' in checkpoint");
    return line.substr(key.size() + 1);
  };
  int F = std::stoi(read_kv("feature_slots"));
  int m = std::stoi(read_kv("context_order"));
  int V = std::stoi(read_kv("vocab_size"));
  int modulus = std::stoi(read_kv("modulus"));
  std::string vocab_line = read_kv("vocab");

  Checkpoint ck;
  ck.vocab = Vocab::for_modulus(modulus);
  if (ck.vocab.size() != V) throw DataError("checkpoint vocab size mismatch");
  {
    std::string expect;
    for (size_t i = 0; i < ck.vocab.tokens.size(); ++i) {
      if (i) expect += ' ';
      expect += ck.vocab.tokens[i];
    }
    if (vocab_line != expect) throw DataError("checkpoint vocab listing mismatch");
  }
  size_t nonzeros = std::stoull(read_kv("nonzeros"));
  ck.params = make_params(F, m, V);
  for (size_t i = 0; i < nonzeros; ++i) {
    read_line();
    int s, v;
    char hex[64];
    if (std::sscanf(line.c_str(), "%d %d %63s", &s, &v, hex) != 3) {
      throw DataError("bad checkpoint entry: " + line);
    }
    if (s < 0 || s >= F || v < 0 || v >= V) throw DataError("checkpoint entry out of range");
    ck.params.at(s, v) = std::strtod(hex, nullptr);
  }
  if (read_line() != "end") throw DataError("missing checkpoint trailer");
  return ck;
}

}  // namespace rgr
