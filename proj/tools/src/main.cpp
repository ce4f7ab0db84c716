#include <chrono>
#include <iostream>
#include <thread>

#include "hawkesnet/io.hpp"
#include "hawkesnet/log.hpp"
#include "hawkesnet/parallel.hpp"
#include "hawkesnet/types.hpp"
#include "hawkesnet/version.hpp"
#include "hawkesnet_cli/cli.hpp"

namespace {

using hawkesnet::cli::Command;
using hawkesnet::cli::GlobalOptions;
using hawkesnet::cli::RunRecord;

int run(int argc, char** argv) {
  CLI::App app{"Network Hawkes and latent-state count models: simulation and estimation"};
  app.set_version_flag("--version", std::string(hawkesnet::kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Seed for stochastic subcommands (required there)");
  app.add_option("--threads", global.threads, "Worker thread cap (default: available parallelism)")
      ->check(CLI::PositiveNumber);
  app.add_option("--log-level", global.log_level, "debug, info, warn, error or off")
      ->check(CLI::IsMember({"debug", "info", "warn", "warning", "error", "off"}));
  app.add_option("--manifest", global.manifest, "Write a JSON run manifest to this file");

  std::vector<Command> commands = hawkesnet::cli::register_commands(app);
  commands.push_back(hawkesnet::cli::register_reproduce(app));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  hawkesnet::set_log_level(hawkesnet::parse_log_level(global.log_level));
  const std::size_t threads = global.threads > 0 ? global.threads : std::max(1u, std::thread::hardware_concurrency());
  hawkesnet::set_max_threads(threads);

  const Command* chosen = nullptr;
  for (const Command& c : commands) {
    if (c.app->parsed()) chosen = &c;
  }
  if (chosen == nullptr) {
    std::cerr << app.help();
    return 2;
  }

  RunRecord record;
  record.subcommand = chosen->app->get_name();
  const auto start = std::chrono::steady_clock::now();
  try {
    if (chosen->stochastic) record.seed = hawkesnet::cli::require_seed(global);
    chosen->run(global, record);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const nlohmann::json manifest = hawkesnet::cli::manifest_json(record, global, seconds);
    if (!global.manifest.empty()) {
      hawkesnet::write_text_file(global.manifest, manifest.dump(2) + "\n");
    } else {
      hawkesnet::log_debug("manifest: " + manifest.dump());
    }
  } catch (const hawkesnet::cli::UsageError& e) {
    std::cerr << "hawkesnet " << record.subcommand << ": " << e.what() << "\n"
              << "Run with --help for usage.\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hawkesnet " << record.subcommand << ": error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
