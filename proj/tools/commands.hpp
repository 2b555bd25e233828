#pragma once

#include "colp/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace colp::cli {

inline constexpr const char* tool_version = "1.0.0";

struct generate_options {
  std::string group;
  std::string topology = "democracy";
  int particles = 3;
  real chi = 0.5;
  real dt = 0.1;
  int trajectories = -1;  // group default when negative
  int points = 51;
  std::uint64_t seed = 42;
  real ic_box = 1.0;
  int substeps = 100;
  std::filesystem::path out;
};

struct train_options {
  std::filesystem::path data;
  std::filesystem::path out;
  int epochs = 10000;
  real lr = 0.005;
  int width = 3;
  int passes = 1;
  std::string init = "glorot";
  real init_scale = 0.1;
  std::uint64_t seed = 1;
};

struct evaluate_options {
  std::filesystem::path model;
  std::filesystem::path data;
  std::filesystem::path out;
  int num_initials = 10;
  int steps = -1;  // group default when negative
  std::uint64_t seed = 7;
  int substeps = -1;  // dataset value when negative
  real ic_box = 1.0;
};

struct selftest_options {
  bool quick = false;
  bool corrupt_gamma = false;
};

int run_generate(const generate_options& opt);
int run_train(const train_options& opt);
int run_evaluate(const evaluate_options& opt);
int run_selftest(const selftest_options& opt);

}  // namespace colp::cli
