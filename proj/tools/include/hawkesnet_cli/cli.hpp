#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace hawkesnet::cli {

/// Bad command-line usage detected after parsing (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// What a run read, wrote and was configured with; serialized as the
/// run manifest.
struct RunRecord {
  std::string subcommand;
  std::optional<std::uint64_t> seed;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;

  void input(const std::filesystem::path& p) { inputs.push_back(p); }
  void output(const std::filesystem::path& p) { outputs.push_back(p); }
};

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  std::string log_level = "info";
  std::string manifest;
};

struct Command {
  CLI::App* app = nullptr;
  bool stochastic = false;
  std::function<void(const GlobalOptions&, RunRecord&)> run;
};

/// Registers every subcommand on `app`.
std::vector<Command> register_commands(CLI::App& app);

/// The reproduce subcommand.
Command register_reproduce(CLI::App& app);

/// SHA-256 of a file as lowercase hex.
std::string sha256_file(const std::filesystem::path& path);

nlohmann::json manifest_json(const RunRecord& record, const GlobalOptions& global, double seconds);

/// Parses a comma-separated list of reals.
std::vector<double> parse_real_list(const std::string& text);

std::uint64_t require_seed(const GlobalOptions& global);

}  // namespace hawkesnet::cli
