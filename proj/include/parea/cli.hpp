#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace parea::cli {

enum ExitCode { ok = 0, verification_failed = 1, usage_error = 2, not_converged = 3 };

struct Options {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> out;  // overrides "out" in the config
  std::optional<std::uint64_t> seed;         // overrides "seed" in the config
};

int run_solve(const Options& o, std::ostream& log);
int run_vary(const Options& o, std::ostream& log);
int run_verify(const Options& o, std::ostream& log);
int run_area(const Options& o, std::ostream& log);
int run_curvature(const Options& o, std::ostream& log);
int run_decompose(const Options& o, std::ostream& log);

// Dispatch by subcommand name; unknown names give usage_error.
int run(const std::string& command, const Options& o, std::ostream& log);

}  // namespace parea::cli
