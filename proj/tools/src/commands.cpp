#include <cmath>
#include <memory>
#include <sstream>

#include "hawkesnet/abm.hpp"
#include "hawkesnet/ensemble_em.hpp"
#include "hawkesnet/expkf.hpp"
#include "hawkesnet/fixtures.hpp"
#include "hawkesnet/io.hpp"
#include "hawkesnet/log.hpp"
#include "hawkesnet/metrics.hpp"
#include "hawkesnet/mm.hpp"
#include "hawkesnet/model.hpp"
#include "hawkesnet/state_space.hpp"
#include "hawkesnet_cli/cli.hpp"

namespace hawkesnet::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

CountSeries load_counts(const std::string& path, RunRecord& record) {
  CountSeries c = read_counts_csv(path);
  record.input(path);
  if (fs::exists(sidecar_path(path))) record.input(sidecar_path(path));
  return c;
}

HawkesParams load_params(const std::string& path, RunRecord& record) {
  HawkesParams p = hawkes_params_from_json(read_text_file(path), path);
  record.input(path);
  return p;
}

void write_counts(const std::string& path, const CountSeries& c, RunRecord& record) {
  write_counts_csv(path, c);
  record.output(path);
  record.output(sidecar_path(path));
}

void write_text(const std::string& path, const std::string& text, RunRecord& record) {
  write_text_file(path, text);
  record.output(path);
}

std::vector<std::string> param_header(std::size_t m) {
  std::vector<std::string> h;
  for (std::size_t i = 0; i < m; ++i) h.push_back("mu_" + std::to_string(i));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) h.push_back("alpha_" + std::to_string(i) + "_" + std::to_string(j));
  }
  return h;
}

std::vector<std::string> labels(const std::string& prefix, std::size_t m) {
  std::vector<std::string> h;
  for (std::size_t i = 0; i < m; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

// ---------------------------------------------------------------- simulate

Command simulate_hawkes_command(CLI::App& app) {
  struct Opts {
    std::string params, out, intensity;
    std::size_t steps = 0;
    double dt = 1.0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("simulate-hawkes", "Simulate counts from a discrete-time Hawkes model");
  sub->add_option("--params", o->params, "Parameter JSON (mu, alpha, gamma)")->required();
  sub->add_option("--steps", o->steps, "Number of bins")->required()->check(CLI::PositiveNumber);
  sub->add_option("--dt", o->dt, "Bin width")->check(CLI::PositiveNumber);
  sub->add_option("--out", o->out, "Count CSV")->required();
  sub->add_option("--intensity", o->intensity, "Optional CSV of the simulated intensities");
  return {sub, true, [o](const GlobalOptions&, RunRecord& r) {
            const HawkesParams p = load_params(o->params, r);
            r.config = {{"params", o->params}, {"steps", o->steps}, {"dt", o->dt}};
            const Simulation sim = simulate_hawkes(p, o->steps, *r.seed, o->dt);
            write_counts(o->out, sim.counts, r);
            if (!o->intensity.empty()) {
              write_matrix_csv(o->intensity, sim.intensity, labels("lambda_", p.nodes()));
              r.output(o->intensity);
            }
          }};
}

Command simulate_abm_command(CLI::App& app) {
  struct Opts {
    std::string config, out, population;
    int fixture = 0;
    std::size_t steps = 0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("simulate-abm", "Simulate event counts from the agent-based model");
  auto* cfg = sub->add_option("--config", o->config, "ABM configuration JSON");
  auto* fix = sub->add_option("--case", o->fixture, "Use the built-in 64-node case 1 or 2")->check(CLI::Range(1, 2));
  cfg->excludes(fix);
  sub->add_option("--steps", o->steps, "Number of steps")->required()->check(CLI::PositiveNumber);
  sub->add_option("--out", o->out, "Count CSV")->required();
  sub->add_option("--population", o->population, "Optional CSV of the agent population per step");
  return {sub, true, [o](const GlobalOptions&, RunRecord& r) {
            AbmConfig c;
            if (o->fixture != 0) {
              c = fixtures::abm_case(o->fixture);
            } else if (!o->config.empty()) {
              c = abm_config_from_json(read_text_file(o->config), o->config);
              r.input(o->config);
            } else {
              throw UsageError("one of --config or --case is required");
            }
            c.seed = *r.seed;
            r.config = {{"config", o->config}, {"case", o->fixture}, {"steps", o->steps}};
            const AbmSimulation sim = simulate_abm(c, o->steps);
            write_counts(o->out, sim.counts, r);
            if (!o->population.empty()) {
              Matrix pop(static_cast<Eigen::Index>(sim.population.size()), 1);
              for (std::size_t k = 0; k < sim.population.size(); ++k) pop(static_cast<Eigen::Index>(k), 0) = static_cast<double>(sim.population[k]);
              write_matrix_csv(o->population, pop, {"population"});
              r.output(o->population);
            }
          }};
}

Command simulate_lgcp_command(CLI::App& app) {
  struct Opts {
    std::string model, out, states, intensity;
    std::size_t steps = 0;
    std::vector<double> x0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("simulate-lgcp", "Simulate counts from a latent-state Cox model");
  sub->add_option("--model", o->model, "State-space model JSON")->required();
  sub->add_option("--steps", o->steps, "Number of bins")->required()->check(CLI::PositiveNumber);
  sub->add_option("--x0", o->x0, "Initial state per node (default: mu)")->delimiter(',');
  sub->add_option("--out", o->out, "Count CSV")->required();
  sub->add_option("--states", o->states, "Optional CSV of latent states x_0..x_K");
  sub->add_option("--intensity", o->intensity, "Optional CSV of intensities");
  return {sub, true, [o](const GlobalOptions&, RunRecord& r) {
            const StateSpaceSpec spec = state_space_from_json(read_text_file(o->model), o->model);
            r.input(o->model);
            Vector x0 = spec.mu;
            if (!o->x0.empty()) {
              if (o->x0.size() != spec.nodes()) throw UsageError("--x0 needs one value per node");
              x0 = Eigen::Map<const Vector>(o->x0.data(), static_cast<Eigen::Index>(o->x0.size()));
            }
            r.config = {{"model", o->model}, {"steps", o->steps}, {"x0", std::vector<double>(x0.data(), x0.data() + x0.size())}};
            const StateSpaceSimulation sim = simulate_state_space(spec, o->steps, x0, *r.seed);
            write_counts(o->out, sim.counts, r);
            if (!o->states.empty()) {
              write_matrix_csv(o->states, sim.states, labels("x_", spec.nodes()));
              r.output(o->states);
            }
            if (!o->intensity.empty()) {
              write_matrix_csv(o->intensity, sim.intensity, labels("lambda_", spec.nodes()));
              r.output(o->intensity);
            }
          }};
}

// -------------------------------------------------------------------- fits

Command fit_mm_command(CLI::App& app) {
  struct Opts {
    std::string counts, out, trace, init;
    double gamma = 0.15;
    std::string mode = "fixed";
    bool regularize = false;
    bool exact = false;
    std::size_t max_iters = 500;
    double tol = 1e-6;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("fit-mm", "Batch maximum likelihood by majorization-minimization");
  sub->add_option("--counts", o->counts, "Count CSV")->required();
  sub->add_option("--gamma", o->gamma, "Decay (fixed mode) or starting decay")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--mode", o->mode, "fixed or full (decays estimated too)")->check(CLI::IsMember({"fixed", "full"}));
  sub->add_flag("--regularize", o->regularize, "Gamma prior on the baselines (and beta prior on decays in full mode)");
  sub->add_flag("--exact-denominator", o->exact, "Use the exact excitation exposure in the alpha update");
  sub->add_option("--init", o->init, "Starting parameters JSON");
  sub->add_option("--max-iters", o->max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  sub->add_option("--tol", o->tol, "Relative objective tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--out", o->out, "Estimated parameters JSON")->required();
  sub->add_option("--trace", o->trace, "Optional CSV of the objective per iteration");
  return {sub, false, [o](const GlobalOptions&, RunRecord& r) {
            const CountSeries counts = load_counts(o->counts, r);
            MmConfig c;
            c.mode = o->mode == "full" ? MmMode::full_decay : MmMode::fixed_decay;
            c.gamma = o->gamma;
            if (o->regularize) {
              c.gamma_prior = GammaPrior{};
              if (c.mode == MmMode::full_decay) c.beta_prior = BetaPrior{};
            }
            c.exact_denominator = o->exact;
            c.max_iters = o->max_iters;
            c.tol = o->tol;
            if (!o->init.empty()) c.init = load_params(o->init, r);
            r.config = {{"counts", o->counts}, {"gamma", o->gamma},         {"mode", o->mode},
                        {"regularize", o->regularize}, {"exact_denominator", o->exact},
                        {"max_iters", o->max_iters},   {"tol", o->tol},     {"init", o->init}};
            const MmResult res = mm_fit(counts, c);
            log_info("fit-mm: " + std::to_string(res.trace.iterations) + " iterations, " +
                     (res.trace.converged ? "converged" : "stopped at the iteration cap"));
            write_text(o->out, hawkes_params_to_json(res.params), r);
            if (!o->trace.empty()) {
              Matrix t(static_cast<Eigen::Index>(res.trace.nll.size() + 1), 3);
              t.row(0) << 0, res.trace.initial_objective, res.trace.initial_nll;
              for (std::size_t k = 0; k < res.trace.nll.size(); ++k) {
                t.row(static_cast<Eigen::Index>(k + 1)) << static_cast<double>(k + 1), res.trace.objective[k], res.trace.nll[k];
              }
              write_matrix_csv(o->trace, t, {"iteration", "objective", "nll"});
              r.output(o->trace);
            }
          }};
}

ExpkfConfig expkf_config(double gamma, double q, double p0) {
  ExpkfConfig c;
  c.gamma = gamma;
  c.q_scale = q;
  c.p0_scale = p0;
  return c;
}

Command fit_expkf_command(CLI::App& app) {
  struct Opts {
    std::string counts, out, trajectory, predictive;
    double gamma = 0.15, q = 1e-5, p0 = 1e-4;
    std::size_t stride = 0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("fit-expkf", "Sequential estimation with the extended Poisson-Kalman filter");
  sub->add_option("--counts", o->counts, "Count CSV")->required();
  sub->add_option("--gamma", o->gamma, "Decay shared by all nodes")->check(CLI::Range(0.0, 1.0));
  sub->add_option("--q", o->q, "Process noise scale")->check(CLI::PositiveNumber);
  sub->add_option("--p0", o->p0, "Initial covariance scale")->check(CLI::PositiveNumber);
  sub->add_option("--out", o->out, "Final parameters JSON")->required();
  sub->add_option("--trajectory", o->trajectory, "Optional CSV of the parameter mean every --stride steps");
  sub->add_option("--stride", o->stride, "Trajectory stride (default: K / 200)");
  sub->add_option("--predictive", o->predictive, "Optional CSV of one-step predictive log-probabilities");
  return {sub, false, [o](const GlobalOptions&, RunRecord& r) {
            const CountSeries counts = load_counts(o->counts, r);
            ExpkfConfig c = expkf_config(o->gamma, o->q, o->p0);
            c.trajectory_stride = 0;
            if (!o->trajectory.empty()) c.trajectory_stride = o->stride > 0 ? o->stride : std::max<std::size_t>(1, counts.steps() / 200);
            r.config = {{"counts", o->counts}, {"gamma", o->gamma}, {"q", o->q}, {"p0", o->p0}, {"stride", c.trajectory_stride}};
            const ExpkfResult res = run_filter(counts, c);
            log_info("fit-expkf: average predictive log-probability " + std::to_string(res.average_pred_loglik()));
            if (res.state.skipped_updates > 0) {
              log_warn("fit-expkf: " + std::to_string(res.state.skipped_updates) + " covariance updates skipped");
            }
            write_text(o->out, hawkes_params_to_json(res.state.params()), r);
            if (!o->trajectory.empty()) {
              const std::size_t m = counts.nodes();
              Matrix t(static_cast<Eigen::Index>(res.trajectory.size()), static_cast<Eigen::Index>(1 + m + m * m));
              for (std::size_t k = 0; k < res.trajectory.size(); ++k) {
                const Vector& th = res.trajectory[k];
                t(static_cast<Eigen::Index>(k), 0) = static_cast<double>(res.steps[k]);
                for (std::size_t i = 0; i < m; ++i) {
                  const auto base = static_cast<Eigen::Index>(i * (m + 1));
                  t(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(1 + i)) = std::exp(th(base));
                  for (std::size_t j = 0; j < m; ++j) {
                    t(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(1 + m + i * m + j)) =
                        std::exp(th(base + 1 + static_cast<Eigen::Index>(j)));
                  }
                }
              }
              std::vector<std::string> header{"step"};
              for (auto& h : param_header(m)) header.push_back(h);
              write_matrix_csv(o->trajectory, t, header);
              r.output(o->trajectory);
            }
            if (!o->predictive.empty()) {
              write_matrix_csv(o->predictive, res.pred_loglik, labels("logp_", counts.nodes()));
              r.output(o->predictive);
            }
          }};
}

Command profile_gamma_command(CLI::App& app) {
  struct Opts {
    std::string counts, out;
    std::string grid = "0.05,0.1,0.15,0.175,0.2,0.3,0.4";
    double q = 1e-5, p0 = 1e-4;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("profile-gamma", "Pick the decay maximizing the filter's predictive likelihood");
  sub->add_option("--counts", o->counts, "Count CSV")->required();
  sub->add_option("--grid", o->grid, "Comma-separated decay values in (0, 1)");
  sub->add_option("--q", o->q, "Process noise scale")->check(CLI::PositiveNumber);
  sub->add_option("--p0", o->p0, "Initial covariance scale")->check(CLI::PositiveNumber);
  sub->add_option("--out", o->out, "CSV of gamma and average predictive log-probability")->required();
  return {sub, false, [o](const GlobalOptions&, RunRecord& r) {
            const std::vector<double> grid = parse_real_list(o->grid);
            for (double g : grid) {
              if (!(g > 0.0 && g < 1.0)) throw UsageError("grid values must lie in (0, 1)");
            }
            const CountSeries counts = load_counts(o->counts, r);
            ExpkfConfig c = expkf_config(grid.front(), o->q, o->p0);
            c.trajectory_stride = 0;
            r.config = {{"counts", o->counts}, {"grid", grid}, {"q", o->q}, {"p0", o->p0}};
            const DecayProfile prof = profile_decay(counts, grid, c);
            Matrix t(static_cast<Eigen::Index>(prof.grid.size()), 2);
            for (std::size_t k = 0; k < prof.grid.size(); ++k) t.row(static_cast<Eigen::Index>(k)) << prof.grid[k], prof.avg_pred_loglik[k];
            write_matrix_csv(o->out, t, {"gamma", "avg_pred_loglik"});
            r.output(o->out);
            std::ostringstream msg;
            msg << "profile-gamma: best gamma " << prof.best_gamma;
            log_info(msg.str());
            r.config["best_gamma"] = prof.best_gamma;
          }};
}

Command fit_em_command(CLI::App& app) {
  struct Opts {
    std::string counts, init, config, out, trace, intensity, truth;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("fit-em", "Ensemble EM for latent-state Cox models");
  sub->add_option("--counts", o->counts, "Count CSV")->required();
  sub->add_option("--init", o->init, "Starting model JSON (also fixes the model kind and dt)")->required();
  sub->add_option("--config", o->config, "EM configuration JSON");
  sub->add_option("--truth", o->truth, "Optional true model JSON for relative-error tracking");
  sub->add_option("--out", o->out, "Estimated model JSON")->required();
  sub->add_option("--trace", o->trace, "Optional CSV with one row per iteration");
  sub->add_option("--intensity", o->intensity, "Optional CSV of smoothed intensity means and variances");
  return {sub, true, [o](const GlobalOptions&, RunRecord& r) {
            const CountSeries counts = load_counts(o->counts, r);
            const StateSpaceSpec init = state_space_from_json(read_text_file(o->init), o->init);
            r.input(o->init);
            EmConfig c;
            if (!o->config.empty()) {
              c = em_config_from_json(read_text_file(o->config), o->config);
              r.input(o->config);
            }
            c.seed = *r.seed;
            std::optional<StateSpaceSpec> truth;
            if (!o->truth.empty()) {
              truth = state_space_from_json(read_text_file(o->truth), o->truth);
              r.input(o->truth);
            }
            r.config = {{"counts", o->counts}, {"init", o->init}, {"truth", o->truth},
                        {"em", json::parse(em_config_to_json(c))}};
            const EmResult res = em_fit(counts, init, c, truth);
            write_text(o->out, state_space_to_json(res.spec), r);
            if (!o->trace.empty()) {
              const auto p = static_cast<Eigen::Index>(res.spec.parameter_vector().size());
              Matrix t(static_cast<Eigen::Index>(res.trace.size()), 7 + p);
              for (std::size_t k = 0; k < res.trace.size(); ++k) {
                const EmIteration& it = res.trace[k];
                const auto row = static_cast<Eigen::Index>(k);
                t(row, 0) = static_cast<double>(k + 1);
                t(row, 1) = it.q_before;
                t(row, 2) = it.q_after;
                t(row, 3) = it.relative_change;
                t(row, 4) = it.relative_error.value_or(NAN);
                t(row, 5) = static_cast<double>(it.resamples);
                t(row, 6) = it.log_evidence;
                t.row(row).tail(p) = it.params.transpose();
              }
              std::vector<std::string> header{"iteration", "q_before", "q_after", "relative_change", "relative_error",
                                              "resamples", "log_evidence"};
              for (Eigen::Index i = 0; i < p; ++i) header.push_back("theta_" + std::to_string(i));
              write_matrix_csv(o->trace, t, header);
              r.output(o->trace);
            }
            if (!o->intensity.empty()) {
              const auto K = static_cast<Eigen::Index>(counts.steps());
              const auto m = static_cast<Eigen::Index>(counts.nodes());
              Matrix mean = Matrix::Zero(K, m);
              for (const Matrix& path : res.smoothed_intensity) mean += path;
              if (!res.smoothed_intensity.empty()) mean /= static_cast<double>(res.smoothed_intensity.size());
              Matrix t(K, m + 2);
              t.leftCols(m) = mean;
              t.col(m) = res.filtered_intensity_variance;
              t.col(m + 1) = res.smoothed_intensity_variance;
              std::vector<std::string> header = labels("smoothed_mean_", static_cast<std::size_t>(m));
              header.push_back("filtered_variance");
              header.push_back("smoothed_variance");
              write_matrix_csv(o->intensity, t, header);
              r.output(o->intensity);
            }
          }};
}

// -------------------------------------------------------------- data tools

Command aggregate_command(CLI::App& app) {
  struct Opts {
    std::string events, out;
    double bin = 1.0, t0 = 0.0, t1 = 0.0;
    std::vector<std::string> nodes;
    bool allow_create = false;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("aggregate", "Bin a timestamped event log into counts");
  sub->add_option("--events", o->events, "Event CSV with header timestamp,node[,receiver]")->required();
  sub->add_option("--bin", o->bin, "Bin width in timestamp units (seconds for ISO-8601 times)")
      ->required()
      ->check(CLI::PositiveNumber);
  sub->add_option("--t0", o->t0, "Start of the first bin")->required();
  sub->add_option("--t1", o->t1, "End of the observation window (exclusive)")->required();
  sub->add_option("--nodes", o->nodes, "Fixed node order")->delimiter(',');
  sub->add_flag("--allow-create", o->allow_create, "Append labels missing from --nodes");
  sub->add_option("--out", o->out, "Count CSV")->required();
  return {sub, false, [o](const GlobalOptions&, RunRecord& r) {
            const EventLog log = read_event_log(o->events);
            r.input(o->events);
            AggregateOptions a;
            a.bin_width = o->bin;
            a.t0 = o->t0;
            a.t1 = o->t1;
            a.nodes = o->nodes;
            a.allow_create = o->allow_create;
            if (!(a.t0 < a.t1)) throw UsageError("--t0 must be smaller than --t1");
            r.config = {{"events", o->events}, {"bin", o->bin}, {"t0", o->t0}, {"t1", o->t1},
                        {"nodes", o->nodes},   {"allow_create", o->allow_create}};
            const AggregateResult res = aggregate_timestamps(log, a);
            r.config["dropped"] = res.dropped;
            write_counts(o->out, res.series, r);
          }};
}

Command gapfilter_command(CLI::App& app) {
  struct Opts {
    std::string counts, out, segments;
    std::size_t max_zero_run = 0;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("gapfilter", "Cut long all-zero stretches and mark segment restarts");
  sub->add_option("--counts", o->counts, "Count CSV")->required();
  sub->add_option("--max-zero-run", o->max_zero_run, "Longest all-zero run kept")->required()->check(CLI::PositiveNumber);
  sub->add_option("--out", o->out, "Filtered count CSV")->required();
  sub->add_option("--segments", o->segments, "JSON report of removed intervals and segments");
  return {sub, false, [o](const GlobalOptions&, RunRecord& r) {
            const CountSeries counts = load_counts(o->counts, r);
            r.config = {{"counts", o->counts}, {"max_zero_run", o->max_zero_run}};
            const GapFilterResult res = gap_filter(counts, o->max_zero_run);
            log_info("gapfilter: removed " + std::to_string(res.removed.size()) + " intervals, kept " +
                     std::to_string(res.series.steps()) + " of " + std::to_string(counts.steps()) + " bins");
            write_counts(o->out, res.series, r);
            if (!o->segments.empty()) {
              json removed = json::array();
              for (const auto& g : res.removed) removed.push_back({{"begin", g.begin}, {"end", g.end}});
              const json report{{"removed", removed},
                                {"segment_starts", res.series.segment_starts},
                                {"input_steps", counts.steps()},
                                {"output_steps", res.series.steps()}};
              write_text(o->segments, report.dump(2) + "\n", r);
            }
          }};
}

Command eval_command(CLI::App& app) {
  struct Opts {
    std::string est, truth, truth_abm, out;
    double threshold = 0.15;
  };
  auto o = std::make_shared<Opts>();
  CLI::App* sub = app.add_subcommand("eval", "Compare estimated parameters with a reference");
  sub->add_option("--est", o->est, "Estimated parameters JSON")->required();
  auto* t = sub->add_option("--truth", o->truth, "Reference parameters JSON");
  auto* ta = sub->add_option("--truth-abm", o->truth_abm, "ABM configuration whose W is the reference pattern");
  t->excludes(ta);
  sub->add_option("--threshold", o->threshold, "Edge threshold")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", o->out, "Report JSON")->required();
  return {sub, false, [o](const GlobalOptions&, RunRecord& r) {
            const HawkesParams est = load_params(o->est, r);
            json report;
            Matrix reference;
            if (!o->truth.empty()) {
              const HawkesParams truth = load_params(o->truth, r);
              if (truth.nodes() != est.nodes()) throw DomainError("estimate and reference differ in node count");
              const EvalReport e = evaluate(est, truth, o->threshold);
              report = {{"frobenius", e.frobenius}, {"hellinger", e.hellinger}, {"relative_error", e.relative_error}};
              reference = truth.alpha;
            } else if (!o->truth_abm.empty()) {
              const AbmConfig c = abm_config_from_json(read_text_file(o->truth_abm), o->truth_abm);
              r.input(o->truth_abm);
              if (c.nodes() != est.nodes()) throw DomainError("estimate and reference differ in node count");
              reference = c.W;
              report = {{"frobenius", frobenius_error(est.alpha, c.W)},
                        {"hellinger", hellinger_distance(est.alpha, c.W)},
                        {"relative_error", nullptr}};
            } else {
              throw UsageError("one of --truth or --truth-abm is required");
            }
            const PatternSeparation sep = pattern_separation(est.alpha, reference);
            report["pattern"] = {{"min_on", sep.min_on}, {"max_off", sep.max_off}, {"mean_on", sep.mean_on},
                                 {"mean_off", sep.mean_off}, {"separated", sep.separated()}};
            json edges = json::array();
            for (const Edge& e : edge_threshold(est.alpha, o->threshold)) {
              edges.push_back({{"receiver", e.receiver}, {"source", e.source}, {"weight", e.weight}});
            }
            report["threshold"] = o->threshold;
            report["edges"] = edges;
            r.config = {{"est", o->est}, {"truth", o->truth}, {"truth_abm", o->truth_abm}, {"threshold", o->threshold}};
            write_text(o->out, report.dump(2) + "\n", r);
          }};
}

}  // namespace

std::vector<Command> register_commands(CLI::App& app) {
  return {simulate_hawkes_command(app), simulate_abm_command(app), simulate_lgcp_command(app),
          fit_mm_command(app),          fit_expkf_command(app),    profile_gamma_command(app),
          fit_em_command(app),          aggregate_command(app),    gapfilter_command(app),
          eval_command(app)};
}

}  // namespace hawkesnet::cli
