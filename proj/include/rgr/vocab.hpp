#pragma once

#include <array>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rgr/errors.hpp"

namespace rgr {

using TokenId = int;

/// Token table for the arithmetic-chain environment. Value tokens occupy ids
/// 0..modulus-1 so a value token's id equals the value it denotes; the fixed
/// marker tokens follow. Total size stays well under the 128-token cap.
struct Vocab {
  std::vector<std::string> tokens;
  std::unordered_map<std::string, TokenId> index;
  int modulus = 0;

  TokenId op_add = -1, op_sub = -1, op_mul = -1;
  TokenId sep = -1;      // ";"
  TokenId equals = -1;   // "="
  TokenId ans = -1;      // "#ANS"
  TokenId end = -1;      // "#END"
  TokenId refine = -1;   // "#REFINE"
  TokenId begin = -1;    // "#BEGIN", window padding only; always the last id
  std::array<TokenId, 10> crit{};  // "#C0".."#C9"

  static Vocab for_modulus(int modulus);

  int size() const { return static_cast<int>(tokens.size()); }

  bool is_value(TokenId t) const { return t >= 0 && t < modulus; }
  int value_of(TokenId t) const { return t; }
  TokenId value(int v) const { return v; }

  TokenId id_of(const std::string& tok) const;

  /// Space-joined surface form, mainly for judge prompts and logs.
  std::string decode(std::span<const TokenId> seq) const;

  /// Inverse of decode for whitespace-separated token strings.
  std::vector<TokenId> encode(const std::string& text) const;
};

}  // namespace rgr
