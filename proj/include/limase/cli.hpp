#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "limase/json_io.hpp"

namespace limase::cli {

// Every knob of a run. Parsed from flags and an optional key = value config
// file (flags win) and echoed into each JSON output.
struct RunConfig {
  std::string command;
  std::string data;
  std::string target;
  std::string task = "regression";
  std::string model = "forest";  // tree | forest | mlp | external:<cmd> | file:<path>
  std::string explainer = "limase";  // limase | treeshap | kernelshap
  double sigma = 0.0;                // 0 selects the automatic width
  std::size_t n_samples = 1000;
  std::uint64_t seed = 0;
  std::size_t budget = 10;
  int class_index = -1;  // -1: the predicted class
  std::string out = ".";
  std::size_t threads = 0;  // 0: all cores
  int max_depth = 6;
  int min_samples_leaf = 5;
  std::size_t instance = 0;
  std::size_t count = 100;
  // Black-box training.
  int trees = 50;
  int model_depth = 8;
  std::string hidden = "32";
  int epochs = 200;
  double learning_rate = 0.05;
  // Kernel baseline.
  std::string kernel_samples = "2048";  // or "exact"
  std::size_t background = 100;
  bool timing = false;
  std::string sign_mode = "absolute";  // absolute | literal
  // synth
  std::size_t rows = 500;
  std::size_t features = 8;
  std::size_t informative = 5;
  double noise = 0.1;
  int classes = 0;
  std::string csv = "data.csv";
};

Json to_json(const RunConfig& config);

// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace limase::cli
