#pragma once

// The `weenie` command line: phantom, align, train, synth and eval.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "weenie/train.hpp"

namespace weenie {

/// Exit codes returned by run_cli.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Training configuration from a JSON object; absent fields keep their
/// defaults. Throws FormatError naming the offending field.
TrainConfig parse_train_config(const std::string& json_text);
TrainConfig load_train_config(const std::filesystem::path& path);

}  // namespace weenie
