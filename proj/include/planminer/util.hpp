#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace planminer {

// Bad or missing input (files, records, config values). CLI maps this to
// exit code 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Failure inside a pipeline stage after inputs validated. Exit code 3.
struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);

// Writes to <path>.tmp in the same directory, then renames over path.
void write_file_atomic(const std::string& path, std::string_view content);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

// Fixed-precision decimal formatting; used wherever report bytes must be
// reproducible.
std::string fmt_double(double v, int digits = 6);

std::string lower_copy(std::string_view s);
std::string_view trim(std::string_view s);
std::string collapse_ws(std::string_view s);
bool starts_with_ci(std::string_view text, std::string_view prefix);

// Splits on '\n'; lines do not include the newline.
std::vector<std::string_view> split_lines(std::string_view text);

}  // namespace planminer
