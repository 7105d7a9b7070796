#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace rssd::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitNumeric = 4;

struct CommonArgs {
  std::filesystem::path plantset;
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> grid;
  std::optional<std::filesystem::path> out;
};

int cmd_vgap(const CommonArgs& args);
int cmd_synth(const CommonArgs& args);
int cmd_analyze(const CommonArgs& args, const std::filesystem::path& controller);
int cmd_sim(const CommonArgs& args, const std::filesystem::path& controller,
            const std::filesystem::path& scenarios);
int cmd_verify(const CommonArgs& args, const std::filesystem::path& report);

}  // namespace rssd::cli
