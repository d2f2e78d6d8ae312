#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "codesum/config.hpp"

namespace codesum::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

// Raised for bad input that is not a library Error (missing files, empty splits).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BuildCorpusOptions {
  std::string src;
  std::string out;
  std::string project;
};

struct TrainOptions {
  std::string data;
  std::string out;
  std::string model = "copy";
  std::string state = "gru";
  std::string preset;
  std::string log;
  std::string dtype = "f64";
  std::uint64_t seed = 0;
  // Hyperparameter overrides, applied on top of the defaults or preset.
  std::optional<std::size_t> embedding, k1, k2, w1, w2, w3;
  std::optional<std::size_t> epochs, patience, minibatch, min_count, max_valid;
  std::optional<double> dropout, learning_rate, clip_norm, init_std;
  std::optional<std::string> dropout_mode;
};

struct EvaluateOptions {
  std::string ckpt;
  std::string data;
  std::string split = "test";
  std::string baseline;
  std::optional<std::uint64_t> shuffle_seed;
  std::string oov_reading = "best-f1";
  std::string out;
  std::string per_example;
};

struct SuggestOptions {
  std::string ckpt;
  std::string snippet = "-";
  std::size_t k = 5;
  std::string viz;
};

int build_corpus(const BuildCorpusOptions& opt, std::ostream& out);
int train(const TrainOptions& opt, std::ostream& out);
int evaluate(const EvaluateOptions& opt, std::ostream& out);
int suggest(const SuggestOptions& opt, std::istream& in, std::ostream& out);

// Worker count: CODESUM_THREADS when set, else the hardware concurrency.
std::size_t worker_threads();

}  // namespace codesum::cli
