#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace weaklab {

struct NonHermitianInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Type/invariant validation failures (state not PSD, series not complete, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroPostselectionProbability : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroOutcomeProbability : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroOverlap : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LambdaOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExtrapolationDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GridTooCoarse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleProblem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config validation collects every problem, not just the first.
struct ConfigInvalid : std::runtime_error {
  struct Item {
    std::string path;
    std::string message;
  };
  std::vector<Item> items;

  explicit ConfigInvalid(std::vector<Item> problems)
      : std::runtime_error(join(problems)), items(std::move(problems)) {}

  ConfigInvalid(std::string path, std::string message)
      : ConfigInvalid(std::vector<Item>{
            Item{std::move(path), std::move(message)}}) {}

 private:
  static std::string join(const std::vector<Item>& problems) {
    std::string out = "invalid config:";
    for (const auto& p : problems) {
      out += "\n  " + p.path + ": " + p.message;
    }
    return out;
  }
};

}  // namespace weaklab
