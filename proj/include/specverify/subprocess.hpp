#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace specverify {

using Seconds = std::chrono::duration<double>;

struct ProcessResult {
  int exit_code = -1;   ///< -1 when killed by a signal
  int term_signal = 0;  ///< 0 when the process exited on its own
  bool timed_out = false;
  std::string output;   ///< stdout and stderr, interleaved
  Seconds wall_time{0};

  bool exited_normally() const { return term_signal == 0 && exit_code == 0; }
};

/// Runs argv[0] (PATH lookup) in its own process group. Past `timeout` the group
/// gets SIGTERM, and SIGKILL once `grace` more has elapsed. Throws ToolNotFound
/// when the program cannot be executed.
ProcessResult run_process(const std::vector<std::string>& argv, Seconds timeout,
                          const std::filesystem::path& cwd = {},
                          Seconds grace = std::chrono::seconds(2));

/// Absolute path of an executable, looked up on PATH when `name` has no slash.
std::optional<std::filesystem::path> find_executable(std::string_view name);

}  // namespace specverify
