#pragma once

#include <stdexcept>
#include <string>

namespace rgr {

/// Base for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Bad run configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or missing data artifacts (CLI exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

class RubricParseError : public Error {
 public:
  enum class Kind {
    MalformedJson,
    EmptyRubric,
    MissingKey,
    ExtraKey,
    BadType,
    WeightOutOfRange,
    UnknownPrefix,
  };

  RubricParseError(Kind kind, int item_index, const std::string& what)
      : Error(what), kind(kind), item_index(item_index) {}

  Kind kind;
  int item_index;  // -1 when the error is not tied to one item
};

/// Per-criterion judging failure. The trainer fails closed on these.
class JudgeError : public Error {
 public:
  enum class Kind {
    MissingPayload,
    Http,
    Timeout,
    NoJsonBlock,
    MalformedJson,
    RatingOutOfRange,
  };

  JudgeError(Kind kind, int criterion_index, const std::string& what)
      : Error(what), kind(kind), criterion_index(criterion_index) {}

  Kind kind;
  int criterion_index;  // -1 when unknown
};

class TrainerError : public Error {
 public:
  using Error::Error;
};

}  // namespace rgr
