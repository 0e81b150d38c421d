#pragma once

#include <string>

namespace rotorid {

/// Writes to "<path>.tmp" then renames, so a failed run never leaves a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

}  // namespace rotorid
