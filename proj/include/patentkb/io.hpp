#pragma once

#include <string>
#include <string_view>

namespace patentkb {

/// Six significant digits ("%.6g"); zero is always written as "0".
std::string format_number(double v);

/// Whole file as a string. Throws IoError.
std::string read_text_file(const std::string& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file. Throws IoError.
void write_file_atomically(const std::string& path, std::string_view content);

}  // namespace patentkb
