#include <Eigen/Core>
#include <array>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

#include "hawkesnet/io.hpp"
#include "hawkesnet/parallel.hpp"
#include "hawkesnet/version.hpp"
#include "hawkesnet_cli/cli.hpp"

namespace hawkesnet::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("SHA-256 unavailable");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

nlohmann::json manifest_json(const RunRecord& record, const GlobalOptions& global, double seconds) {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& p : record.inputs) inputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& p : record.outputs) outputs.push_back(p.string());
  nlohmann::json m{{"subcommand", record.subcommand},
                   {"config", record.config},
                   {"seed", record.seed ? nlohmann::json(*record.seed) : nlohmann::json(nullptr)},
                   {"threads", hawkesnet::max_threads()},
                   {"versions",
                    {{"hawkesnet", kVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__}}},
                   {"inputs", inputs},
                   {"outputs", outputs},
                   {"wall_clock_seconds", seconds}};
  return m;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a number in list: '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::uint64_t require_seed(const GlobalOptions& global) {
  if (!global.seed) throw UsageError("this subcommand is stochastic and needs --seed");
  return *global.seed;
}

}  // namespace hawkesnet::cli
