#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hawkesnet/abm.hpp"
#include "hawkesnet/ensemble_em.hpp"
#include "hawkesnet/state_space.hpp"
#include "hawkesnet/types.hpp"

namespace hawkesnet {

/// Malformed or unreadable input. The message starts with the location
/// ("file:line: ..." or "file: field: ...").
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EventRecord {
  double time = 0.0;
  std::string node;
};

struct EventLog {
  std::vector<EventRecord> records;
};

/// Parses a timestamp: a plain real, or ISO-8601 "YYYY-MM-DD[THH:MM[:SS[.f]]][Z]"
/// (a space may replace the T), returned as seconds since 1970-01-01 UTC.
[[nodiscard]] double parse_timestamp(std::string_view text);

/// CSV with header `timestamp,node[,receiver]`; the receiver column is
/// ignored.
[[nodiscard]] EventLog read_event_log(const std::filesystem::path& path);
[[nodiscard]] EventLog parse_event_log(std::string_view text, std::string_view origin = "<events>");

struct AggregateOptions {
  double bin_width = 1.0;
  double t0 = 0.0;
  double t1 = 1.0;
  /// Fixed node order. Empty: the sorted set of labels found in the log.
  std::vector<std::string> nodes;
  /// With a fixed node list, append unseen labels instead of failing.
  bool allow_create = false;
};

struct AggregateResult {
  CountSeries series;
  /// Events outside [t0, t1).
  std::size_t dropped = 0;
};

/// Bins events into [t0 + k w, t0 + (k + 1) w) for k < ceil((t1 - t0) / w).
/// An event within 1e-9 bin widths of a boundary counts as on it. The
/// series dt is the bin width.
[[nodiscard]] AggregateResult aggregate_timestamps(const EventLog& log, const AggregateOptions& options);

struct RemovedInterval {
  /// Half-open row range of the input series.
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct GapFilterResult {
  CountSeries series;
  std::vector<RemovedInterval> removed;
  /// Input row of each output row.
  std::vector<std::size_t> source_rows;
};

/// Drops every maximal run of all-zero rows longer than max_zero_run and
/// starts a new segment where a run was cut out.
[[nodiscard]] GapFilterResult gap_filter(const CountSeries& series, std::size_t max_zero_run);

/// Count CSV: a header of node labels, then one row of integers per bin.
/// dt and the segment starts live in a JSON sidecar next to it
/// (`<file>.json`); without a sidecar dt = 1 and there is one segment.
void write_counts_csv(const std::filesystem::path& path, const CountSeries& series);
[[nodiscard]] CountSeries read_counts_csv(const std::filesystem::path& path);
[[nodiscard]] std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Real-valued matrix CSV with an optional header (plot output).
void write_matrix_csv(const std::filesystem::path& path, const Matrix& values,
                      const std::vector<std::string>& header = {});

/// Hawkes parameters as {"mu": [...], "alpha": [[...]], "gamma": x}, where
/// gamma is a number, a per-node list or a matrix.
[[nodiscard]] std::string hawkes_params_to_json(const HawkesParams& params);
[[nodiscard]] HawkesParams hawkes_params_from_json(std::string_view text, std::string_view origin = "<params>");

[[nodiscard]] std::string state_space_to_json(const StateSpaceSpec& spec);
[[nodiscard]] StateSpaceSpec state_space_from_json(std::string_view text, std::string_view origin = "<model>");

/// AbmConfig without its seed. Vector fields accept a single number.
[[nodiscard]] std::string abm_config_to_json(const AbmConfig& config);
[[nodiscard]] AbmConfig abm_config_from_json(std::string_view text, std::string_view origin = "<abm>");

/// EmConfig without its seed. Missing fields keep their defaults.
[[nodiscard]] std::string em_config_to_json(const EmConfig& config);
[[nodiscard]] EmConfig em_config_from_json(std::string_view text, std::string_view origin = "<em>");

[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace hawkesnet
