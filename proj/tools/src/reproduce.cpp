#include <array>
#include <charconv>
#include <fstream>
#include <memory>

#include "hawkesnet/ensemble_em.hpp"
#include "hawkesnet/expkf.hpp"
#include "hawkesnet/fixtures.hpp"
#include "hawkesnet/io.hpp"
#include "hawkesnet/log.hpp"
#include "hawkesnet/metrics.hpp"
#include "hawkesnet/mm.hpp"
#include "hawkesnet/model.hpp"
#include "hawkesnet/rng.hpp"
#include "hawkesnet_cli/cli.hpp"

namespace hawkesnet::cli {

namespace {

namespace fs = std::filesystem;

std::string num(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return {buf.data(), res.ptr};
}

/// Plain CSV table with string cells.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  void write(const fs::path& path, RunRecord& record) const {
    std::string text;
    auto line = [&text](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) text += ',';
        text += cells[i];
      }
      text += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    write_text_file(path, text);
    record.output(path);
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct Context {
  fs::path dir;
  std::uint64_t seed = 0;
  bool quick = false;
  RunRecord* record = nullptr;

  [[nodiscard]] std::uint64_t stream(std::uint64_t tag) const { return mix64(seed ^ mix64(tag)); }

  void matrix(const std::string& name, const Matrix& m) const {
    const fs::path p = dir / name;
    write_matrix_csv(p, m);
    record->output(p);
  }

  void text(const std::string& name, const std::string& body) const {
    const fs::path p = dir / name;
    write_text_file(p, body);
    record->output(p);
  }
};

HawkesParams fit_mm_regularized(const CountSeries& counts, double gamma) {
  MmConfig c;
  c.gamma = gamma;
  c.gamma_prior = GammaPrior{};
  return mm_fit(counts, c).params;
}

HawkesParams fit_expkf(const CountSeries& counts, double gamma) {
  ExpkfConfig c;
  c.gamma = gamma;
  c.trajectory_stride = 0;
  return run_filter(counts, c).state.params();
}

std::vector<std::string> error_row(const Matrix& est, const Matrix& reference) {
  const PatternSeparation sep = pattern_separation(est, reference);
  return {num(frobenius_error(est, reference)), num(hellinger_distance(est, reference)), num(sep.min_on),
          num(sep.max_off), sep.separated() ? "1" : "0"};
}

// Shared by the 9-node and ABM experiments: simulate once at the longest
// length, fit MM and ExPKF on each prefix.
void hawkes_error_sweep(const Context& ctx, const std::string& label, const CountSeries& full,
                        const Matrix& reference, const std::optional<HawkesParams>& truth, double gamma,
                        const std::vector<std::size_t>& lengths, Table& table) {
  for (std::size_t K : lengths) {
    const CountSeries counts = full.head(K);
    const std::array<std::pair<const char*, HawkesParams>, 2> fits{
        std::pair<const char*, HawkesParams>{"mm", fit_mm_regularized(counts, gamma)},
        std::pair<const char*, HawkesParams>{"expkf", fit_expkf(counts, gamma)}};
    for (const auto& [method, est] : fits) {
      std::vector<std::string> row{label, std::to_string(K), method};
      for (auto& cell : error_row(est.alpha, reference)) row.push_back(cell);
      row.push_back(truth ? num(evaluate(est, *truth).relative_error) : "");
      table.add(std::move(row));
      ctx.matrix("alpha_" + label + "_K" + std::to_string(K) + "_" + method + ".csv", est.alpha);
      log_info("reproduce: " + label + " K=" + std::to_string(K) + " " + method + " done");
    }
  }
}

Table sweep_table() {
  return Table({"case", "K", "method", "frobenius", "hellinger", "min_on", "max_off", "separated", "relative_error"});
}

void exp_9node(const Context& ctx) {
  const std::vector<std::size_t> lengths =
      ctx.quick ? std::vector<std::size_t>{500, 1000, 2000} : std::vector<std::size_t>{2000, 4000, 8000, 20000};
  Table table = sweep_table();
  for (int which = 1; which <= 3; ++which) {
    const HawkesParams truth = fixtures::nine_node_truth(which);
    const Simulation sim = simulate_hawkes(truth, lengths.back(), ctx.stream(0x900 + static_cast<unsigned>(which)));
    ctx.matrix("alpha_truth" + std::to_string(which) + ".csv", truth.alpha);
    hawkes_error_sweep(ctx, "truth" + std::to_string(which), sim.counts, truth.alpha, truth,
                       fixtures::kNineNodeGamma, lengths, table);
  }
  table.write(ctx.dir / "errors.csv", *ctx.record);
}

void exp_abm(const Context& ctx, int which) {
  const std::vector<std::size_t> lengths =
      ctx.quick ? std::vector<std::size_t>{500, 1000, 2000} : std::vector<std::size_t>{2000, 4000, 8000, 20000};
  const AbmConfig config = fixtures::abm_case(which, ctx.stream(0xAB0 + static_cast<unsigned>(which)));
  const AbmSimulation sim = simulate_abm(config, lengths.back());
  const double avg = static_cast<double>(sim.counts.counts.sum()) /
                     (static_cast<double>(sim.counts.steps()) * static_cast<double>(sim.counts.nodes()));
  ctx.text("summary.json", "{\"average_count\": " + num(avg) + ", \"steps\": " + std::to_string(lengths.back()) +
                               ", \"gamma\": " + num(1.0 - config.omega(0) * config.dt) + "}\n");
  ctx.matrix("W.csv", config.W);
  Table table = sweep_table();
  // The ABM has no Hawkes truth; W is the reference pattern and decay 1 - omega dt.
  hawkes_error_sweep(ctx, "case" + std::to_string(which), sim.counts, config.W, std::nullopt,
                     1.0 - config.omega(0) * config.dt, lengths, table);
  table.write(ctx.dir / "errors.csv", *ctx.record);
}

void write_em(const Context& ctx, const EmResult& res, const StateSpaceSpec& truth) {
  ctx.text("estimate.json", state_space_to_json(res.spec));
  ctx.text("truth.json", state_space_to_json(truth));
  Table trace({"iteration", "q_before", "q_after", "relative_change", "relative_error", "resamples", "log_evidence"});
  trace.add({"0", "", "", "", res.initial_relative_error ? num(*res.initial_relative_error) : "", "", ""});
  for (std::size_t k = 0; k < res.trace.size(); ++k) {
    const EmIteration& it = res.trace[k];
    trace.add({std::to_string(k + 1), num(it.q_before), num(it.q_after), num(it.relative_change),
               it.relative_error ? num(*it.relative_error) : "", std::to_string(it.resamples), num(it.log_evidence)});
  }
  trace.write(ctx.dir / "trace.csv", *ctx.record);
  Matrix var(res.filtered_intensity_variance.size(), 2);
  var.col(0) = res.filtered_intensity_variance;
  var.col(1) = res.smoothed_intensity_variance;
  const fs::path p = ctx.dir / "intensity_variance.csv";
  write_matrix_csv(p, var, {"filtered", "smoothed"});
  ctx.record->output(p);
}

void exp_lgcp(const Context& ctx, const std::string& name) {
  StateSpaceSpec truth;
  StateSpaceSpec init;
  Vector x0;
  std::size_t steps = 0;
  EmConfig config;
  if (name == "exp-lgcp-1d") {
    truth = fixtures::lgcp_truth();
    init = fixtures::lgcp_init();
    x0 = Vector::Constant(1, fixtures::kLgcpX0);
    steps = fixtures::kLgcpSteps;
  } else if (name == "exp-lgcp-logistic") {
    truth = fixtures::logistic_truth();
    init = fixtures::logistic_init();
    x0 = Vector::Constant(1, fixtures::kLogisticX0);
    steps = fixtures::kLogisticSteps;
    config.bounds.A_min = 1.0;
    config.bounds.A_max = 100.0;
    config.bounds.B_min = 0.5;
    config.bounds.B_max = 50.0;
  } else {
    truth = fixtures::network_truth();
    init = fixtures::network_init();
    x0 = Vector::Zero(3);
    steps = 2000;
    config.particles = 600;
    config.initial_prior = fixtures::network_initial_prior();
  }
  if (ctx.quick) {
    steps = std::min<std::size_t>(steps, 500);
    config.particles = 100;
    config.max_iters = 4;
  }
  config.seed = ctx.stream(0xE30);
  const StateSpaceSimulation sim = simulate_state_space(truth, steps, x0, ctx.stream(0xE31));
  const fs::path counts = ctx.dir / "counts.csv";
  write_counts_csv(counts, sim.counts);
  ctx.record->output(counts);
  const EmResult res = em_fit(sim.counts, init, config, truth);
  write_em(ctx, res, truth);
  if (truth.kind == ModelKind::lgcp_network) {
    ctx.matrix("alpha_truth.csv", truth.alpha);
    ctx.matrix("alpha_estimate.csv", res.spec.alpha);
  }
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"exp-9node",   "exp-abm-case1",     "exp-abm-case2",
                                              "exp-lgcp-1d", "exp-lgcp-logistic", "exp-lgcp-3node"};
  return names;
}

}  // namespace

Command register_reproduce(CLI::App& app) {
  struct Opts {
    std::string name;
    std::string out_dir = "results";
    bool quick = false;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("reproduce", "Run a fixed-seed experiment and write its tables");
  sub->add_option("--name", o->name, "Experiment name")->required()->check(CLI::IsMember(experiment_names()));
  sub->add_option("--out-dir", o->out_dir, "Output directory (a subdirectory per experiment)");
  sub->add_flag("--quick", o->quick, "Shorter series and smaller ensembles");
  return {sub, true, [o](const GlobalOptions&, RunRecord& r) {
            Context ctx;
            ctx.dir = fs::path(o->out_dir) / o->name;
            ctx.seed = *r.seed;
            ctx.quick = o->quick;
            ctx.record = &r;
            fs::create_directories(ctx.dir);
            r.config = {{"name", o->name}, {"out_dir", o->out_dir}, {"quick", o->quick}};
            if (o->name == "exp-9node") {
              exp_9node(ctx);
            } else if (o->name == "exp-abm-case1") {
              exp_abm(ctx, 1);
            } else if (o->name == "exp-abm-case2") {
              exp_abm(ctx, 2);
            } else {
              exp_lgcp(ctx, o->name);
            }
          }};
}

}  // namespace hawkesnet::cli
