#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace isa::cli {

inline constexpr const char* kRevision = "isa-sim/1";

/// Everything needed to replay a run. Written as flat key=value lines.
struct RunManifest {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::uint64_t seed = 0;
    std::vector<std::filesystem::path> outputs;
    double duration_seconds = 0.0;
};

std::string manifest_to_text(const RunManifest& manifest);

/// Entry point shared by the isa_sim binary and the tests. `args` excludes
/// the program name. Returns 0 on success (including EveDetected), 1 on
/// domain or I/O errors, 2 on invalid usage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace isa::cli
