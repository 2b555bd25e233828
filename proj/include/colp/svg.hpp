#pragma once

#include "colp/types.hpp"

#include <string>
#include <vector>

namespace colp::svg {

struct series {
  std::string label;
  std::string color;
  std::vector<real> y;
  /// empty means x = 0, 1, 2, ...
  std::vector<real> x;
};

struct panel {
  std::string title;
  std::vector<series> lines;
};

/// Grid of line charts with autoscaled axes. Output depends only on the inputs.
std::string render(const std::vector<panel>& panels, int columns, const std::string& title = {});

inline constexpr const char* ground_color = "#1f4fd8";
inline constexpr const char* learned_color = "#d8281f";

}  // namespace colp::svg
