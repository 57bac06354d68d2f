#pragma once

#include <string>

namespace pinnet {

std::string read_file(const std::string& path);

// Write to a sibling temp file, then rename over the destination, so readers
// never observe a truncated file.
void write_file_atomic(const std::string& path, const std::string& content);

void ensure_dir(const std::string& path);

}  // namespace pinnet
