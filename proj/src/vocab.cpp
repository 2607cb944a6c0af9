#include "rgr/vocab.hpp"

#include <sstream>

namespace rgr {

Vocab Vocab::for_modulus(int modulus) {
  if (modulus < 2 || modulus > 23) {
    throw ConfigError("vocab modulus must be in [2, 23], got " + std::to_string(modulus));
  }
  Vocab v;
  v.modulus = modulus;
  auto add = [&v](const std::string& tok) {
    TokenId id = static_cast<TokenId>(v.tokens.size());
    v.tokens.push_back(tok);
    v.index.emplace(tok, id);
    return id;
  };
  for (int i = 0; i < modulus; ++i) add(std::to_string(i));
  v.op_add = add("+");
  v.op_sub = add("-");
  v.op_mul = add("*");
  v.sep = add(";");
  v.equals = add("=");
  v.ans = add("#ANS");
  v.end = add("#END");
  v.refine = add("#REFINE");
  for (int i = 0; i < 10; ++i) v.crit[i] = add("#C" + std::to_string(i));
  v.begin = add("#BEGIN");
  return v;
}

TokenId Vocab::id_of(const std::string& tok) const {
  auto it = index.find(tok);
  if (it == index.end()) throw DataError("unknown token: " + tok);
  return it->second;
}

std::string Vocab::decode(std::span<const TokenId> seq) const {
  std::string out;
  for (size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ' ';
    out += tokens.at(static_cast<size_t>(seq[i]));
  }
  return out;
}

std::vector<TokenId> Vocab::encode(const std::string& text) const {
  std::vector<TokenId> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(id_of(tok));
  return out;
}

}  // namespace rgr
