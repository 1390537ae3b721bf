#pragma once

#include <filesystem>
#include <string>

namespace mca::cli {

/// Entry point of the `mca` tool. Returns the process exit status: 0 on
/// success (soft per-frame failures included), nonzero on a fatal error.
int run(int argc, const char* const* argv);

/// Lower-case hex SHA-256 of a file's bytes. Throws std::runtime_error.
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

}  // namespace mca::cli
