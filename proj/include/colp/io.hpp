#pragma once

#include "colp/types.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace colp {

/// 17 significant digits; round-trips every double exactly.
std::string format_real(real value);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace colp
