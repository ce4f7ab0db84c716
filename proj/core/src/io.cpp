#include "hawkesnet/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hawkesnet/log.hpp"

namespace hawkesnet {

namespace {

using json = nlohmann::json;
using Eigen::Index;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

bool blank(std::string_view line) { return trim(line).empty(); }

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

[[noreturn]] void fail_at(std::string_view origin, std::size_t line, const std::string& message) {
  throw IoError(std::string(origin) + ":" + std::to_string(line) + ": " + message);
}

[[noreturn]] void fail_field(std::string_view origin, std::string_view field, const std::string& message) {
  throw IoError(std::string(origin) + ": " + std::string(field) + ": " + message);
}

std::string origin_of(const std::filesystem::path& path) { return path.string(); }

json parse_json(std::string_view text, std::string_view origin) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw IoError(std::string(origin) + ": invalid JSON: " + e.what());
  }
}

double get_real(const json& v, std::string_view origin, std::string_view field) {
  if (!v.is_number()) fail_field(origin, field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail_field(origin, field, "expected a finite number");
  return x;
}

Vector get_vector(const json& v, std::string_view origin, std::string_view field,
                  std::optional<Index> broadcast = std::nullopt) {
  if (v.is_number() && broadcast) return Vector::Constant(*broadcast, get_real(v, origin, field));
  if (!v.is_array()) fail_field(origin, field, "expected an array of numbers");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Index>(i)) = get_real(v[i], origin, std::string(field) + "[" + std::to_string(i) + "]");
  }
  return out;
}

Matrix get_matrix(const json& v, std::string_view origin, std::string_view field) {
  if (!v.is_array() || v.empty()) fail_field(origin, field, "expected a non-empty array of rows");
  const std::size_t rows = v.size();
  if (!v[0].is_array()) fail_field(origin, field, "expected an array of rows");
  const std::size_t cols = v[0].size();
  Matrix out(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row = std::string(field) + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != cols) fail_field(origin, row, "rows must have equal length");
    for (std::size_t j = 0; j < cols; ++j) {
      out(static_cast<Index>(i), static_cast<Index>(j)) =
          get_real(v[i][j], origin, row + "[" + std::to_string(j) + "]");
    }
  }
  return out;
}

const json& require(const json& obj, std::string_view key, std::string_view origin) {
  if (!obj.is_object()) fail_field(origin, "<root>", "expected a JSON object");
  const auto it = obj.find(std::string(key));
  if (it == obj.end()) fail_field(origin, key, "missing field");
  return *it;
}

template <class T>
T get_count(const json& v, std::string_view origin, std::string_view field) {
  if (!v.is_number_integer() || v.get<long long>() < 0) fail_field(origin, field, "expected a non-negative integer");
  return static_cast<T>(v.get<long long>());
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view origin) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) fail_field(origin, key, "unknown field");
  }
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json to_json(const Matrix& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
  return out;
}

template <class Fn>
void rethrow_invalid(std::string_view origin, Fn&& fn) {
  try {
    fn();
  } catch (const std::invalid_argument& e) {
    fail_field(origin, "<value>", e.what());
  }
}

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

double parse_timestamp(std::string_view text) {
  text = trim(text);
  double plain = 0.0;
  if (parse_number(text, plain)) {
    if (!std::isfinite(plain)) throw IoError("non-finite timestamp");
    return plain;
  }
  const auto bad = [&]() -> IoError { return IoError("unparseable timestamp '" + std::string(text) + "'"); };
  const auto digits = [&](std::size_t pos, std::size_t n) {
    int v = 0;
    if (pos + n > text.size()) throw bad();
    for (std::size_t k = pos; k < pos + n; ++k) {
      if (text[k] < '0' || text[k] > '9') throw bad();
      v = v * 10 + (text[k] - '0');
    }
    return v;
  };
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') throw bad();
  const int y = digits(0, 4);
  const int mo = digits(5, 2);
  const int d = digits(8, 2);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw bad();
  double seconds = 86400.0 * static_cast<double>(std::chrono::sys_days{ymd}.time_since_epoch().count());
  std::size_t pos = 10;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    const int h = digits(pos + 1, 2);
    if (pos + 3 >= text.size() || text[pos + 3] != ':') throw bad();
    const int mi = digits(pos + 4, 2);
    pos += 6;
    double sec = 0.0;
    if (pos < text.size() && text[pos] == ':') {
      std::size_t end = pos + 1;
      while (end < text.size() && (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == '.')) ++end;
      if (!parse_number(text.substr(pos + 1, end - pos - 1), sec)) throw bad();
      pos = end;
    }
    if (h > 23 || mi > 59 || sec >= 61.0) throw bad();
    seconds += 3600.0 * h + 60.0 * mi + sec;
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) throw bad();
  return seconds;
}

EventLog parse_event_log(std::string_view text, std::string_view origin) {
  const auto lines = lines_of(text);
  std::size_t first = 0;
  while (first < lines.size() && blank(lines[first])) ++first;
  if (first == lines.size()) fail_at(origin, 1, "missing header 'timestamp,node[,receiver]'");
  const auto header = split(lines[first], ',');
  if (header.size() < 2 || header.size() > 3 || header[0] != "timestamp" || header[1] != "node" ||
      (header.size() == 3 && header[2] != "receiver")) {
    fail_at(origin, first + 1, "header must be 'timestamp,node[,receiver]'");
  }
  EventLog log;
  for (std::size_t l = first + 1; l < lines.size(); ++l) {
    if (blank(lines[l])) continue;
    const auto fields = split(lines[l], ',');
    if (fields.size() != header.size()) {
      fail_at(origin, l + 1, "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
    }
    EventRecord r;
    try {
      r.time = parse_timestamp(fields[0]);
    } catch (const IoError& e) {
      fail_at(origin, l + 1, e.what());
    }
    if (fields[1].empty()) fail_at(origin, l + 1, "empty node label");
    r.node = std::string(fields[1]);
    log.records.push_back(std::move(r));
  }
  return log;
}

EventLog read_event_log(const std::filesystem::path& path) {
  return parse_event_log(read_text_file(path), origin_of(path));
}

AggregateResult aggregate_timestamps(const EventLog& log, const AggregateOptions& options) {
  if (!(options.bin_width > 0.0) || !std::isfinite(options.bin_width)) throw std::invalid_argument("bin width must be positive");
  if (!(options.t0 < options.t1)) throw std::invalid_argument("aggregation needs t0 < t1");
  const double span = (options.t1 - options.t0) / options.bin_width;
  if (span > 1e8) throw std::invalid_argument("aggregation would create more than 1e8 bins");
  const auto K = static_cast<std::size_t>(std::ceil(span));

  std::vector<std::string> nodes = options.nodes;
  if (nodes.empty()) {
    for (const auto& r : log.records) nodes.push_back(r.node);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!index.emplace(nodes[i], i).second) throw std::invalid_argument("duplicate node label '" + nodes[i] + "'");
  }
  for (const auto& r : log.records) {
    if (index.count(r.node)) continue;
    if (!options.allow_create) throw DomainError("unknown node label '" + r.node + "'");
    index.emplace(r.node, nodes.size());
    nodes.push_back(r.node);
  }

  AggregateResult out;
  CountMatrix counts = CountMatrix::Zero(static_cast<Index>(K), static_cast<Index>(nodes.size()));
  for (const auto& r : log.records) {
    if (!(r.time >= options.t0 && r.time < options.t1)) {
      ++out.dropped;
      continue;
    }
    // Boundaries are matched to 1e-9 bin widths so that decimal timestamps
    // such as 0.3 with bins of 0.1 land on the bin they start.
    const double x = (r.time - options.t0) / options.bin_width;
    const double nearest = std::round(x);
    const double bin = std::abs(x - nearest) <= 1e-9 * std::max(1.0, x) ? nearest : std::floor(x);
    auto k = static_cast<std::size_t>(bin);
    k = std::min(k, K - 1);
    ++counts(static_cast<Index>(k), static_cast<Index>(index.at(r.node)));
  }
  if (out.dropped > 0) {
    log_warn(std::to_string(out.dropped) + " events outside [t0, t1) dropped");
  }
  out.series = CountSeries::from_counts(std::move(counts), options.bin_width);
  out.series.node_ids = std::move(nodes);
  return out;
}

GapFilterResult gap_filter(const CountSeries& series, std::size_t max_zero_run) {
  if (max_zero_run < 1) throw std::invalid_argument("max_zero_run must be at least 1");
  series.validate();
  const std::size_t K = series.steps();
  std::vector<char> zero(K, 0);
  for (std::size_t k = 0; k < K; ++k) zero[k] = series.counts.row(static_cast<Index>(k)).isZero() ? 1 : 0;

  GapFilterResult out;
  std::vector<char> keep(K, 1);
  for (std::size_t k = 0; k < K;) {
    if (!zero[k]) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end < K && zero[end]) ++end;
    if (end - k > max_zero_run) {
      out.removed.push_back({k, end});
      std::fill(keep.begin() + static_cast<std::ptrdiff_t>(k), keep.begin() + static_cast<std::ptrdiff_t>(end), 0);
    }
    k = end;
  }

  const std::vector<char> starts = series.segment_start_mask();
  std::vector<std::size_t> new_starts;
  bool cut = true;
  for (std::size_t k = 0; k < K; ++k) {
    if (!keep[k]) {
      cut = true;
      continue;
    }
    if (cut || starts[k]) new_starts.push_back(out.source_rows.size());
    cut = false;
    out.source_rows.push_back(k);
  }
  CountMatrix kept(static_cast<Index>(out.source_rows.size()), series.counts.cols());
  for (std::size_t r = 0; r < out.source_rows.size(); ++r) {
    kept.row(static_cast<Index>(r)) = series.counts.row(static_cast<Index>(out.source_rows[r]));
  }
  out.series.counts = std::move(kept);
  out.series.dt = series.dt;
  out.series.node_ids = series.node_ids;
  out.series.segment_starts = new_starts.empty() ? std::vector<std::size_t>{0} : new_starts;
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
  std::filesystem::path p = csv;
  p += ".json";
  return p;
}

void write_counts_csv(const std::filesystem::path& path, const CountSeries& series) {
  series.validate();
  std::ostringstream os;
  for (std::size_t i = 0; i < series.nodes(); ++i) {
    if (i) os << ',';
    os << (series.node_ids.empty() ? "n" + std::to_string(i) : series.node_ids[i]);
  }
  os << '\n';
  for (Index k = 0; k < series.counts.rows(); ++k) {
    for (Index i = 0; i < series.counts.cols(); ++i) {
      if (i) os << ',';
      os << series.counts(k, i);
    }
    os << '\n';
  }
  write_text_file(path, os.str());
  json meta{{"dt", series.dt},
            {"steps", series.steps()},
            {"nodes", series.nodes()},
            {"segment_starts", series.segment_starts}};
  write_text_file(sidecar_path(path), meta.dump(2) + "\n");
}

CountSeries read_counts_csv(const std::filesystem::path& path) {
  const std::string origin = origin_of(path);
  const std::string text = read_text_file(path);
  const auto lines = lines_of(text);
  std::size_t first = 0;
  while (first < lines.size() && blank(lines[first])) ++first;
  if (first == lines.size()) fail_at(origin, 1, "empty count file");
  const auto header = split(lines[first], ',');
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i].empty()) fail_at(origin, first + 1, "empty node label in column " + std::to_string(i + 1));
  }
  const std::size_t m = header.size();
  std::vector<std::int64_t> values;
  std::size_t rows = 0;
  for (std::size_t l = first + 1; l < lines.size(); ++l) {
    if (blank(lines[l])) continue;
    const auto fields = split(lines[l], ',');
    if (fields.size() != m) {
      fail_at(origin, l + 1, "expected " + std::to_string(m) + " counts, found " + std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::int64_t v = 0;
      if (!parse_number(fields[i], v)) fail_at(origin, l + 1, "column " + std::string(header[i]) + ": not an integer: '" + std::string(fields[i]) + "'");
      if (v < 0) fail_at(origin, l + 1, "column " + std::string(header[i]) + ": negative count " + std::to_string(v));
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) fail_at(origin, first + 2, "no count rows");
  CountSeries series;
  series.counts.resize(static_cast<Index>(rows), static_cast<Index>(m));
  std::copy(values.begin(), values.end(), series.counts.data());
  for (const auto& h : header) series.node_ids.emplace_back(h);

  const std::filesystem::path meta_path = sidecar_path(path);
  if (std::filesystem::exists(meta_path)) {
    const std::string meta_origin = origin_of(meta_path);
    const json meta = parse_json(read_text_file(meta_path), meta_origin);
    check_keys(meta, {"dt", "steps", "nodes", "segment_starts"}, meta_origin);
    series.dt = get_real(require(meta, "dt", meta_origin), meta_origin, "dt");
    if (meta.contains("steps") && get_count<std::size_t>(meta["steps"], meta_origin, "steps") != rows) {
      fail_field(meta_origin, "steps", "does not match the " + std::to_string(rows) + " rows of the CSV");
    }
    if (meta.contains("nodes") && get_count<std::size_t>(meta["nodes"], meta_origin, "nodes") != m) {
      fail_field(meta_origin, "nodes", "does not match the " + std::to_string(m) + " CSV columns");
    }
    if (meta.contains("segment_starts")) {
      const json& s = meta["segment_starts"];
      if (!s.is_array()) fail_field(meta_origin, "segment_starts", "expected an array");
      series.segment_starts.clear();
      for (std::size_t i = 0; i < s.size(); ++i) {
        series.segment_starts.push_back(get_count<std::size_t>(s[i], meta_origin, "segment_starts[" + std::to_string(i) + "]"));
      }
    }
    try {
      series.validate();
    } catch (const std::invalid_argument& e) {
      fail_field(meta_origin, "<sidecar>", e.what());
    }
  }
  return series;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& values, const std::vector<std::string>& header) {
  if (!header.empty() && header.size() != static_cast<std::size_t>(values.cols())) {
    throw std::invalid_argument("header size does not match the matrix columns");
  }
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  if (!header.empty()) os << '\n';
  for (Index k = 0; k < values.rows(); ++k) {
    for (Index i = 0; i < values.cols(); ++i) os << (i ? "," : "") << format_real(values(k, i));
    os << '\n';
  }
  write_text_file(path, os.str());
}

std::string hawkes_params_to_json(const HawkesParams& params) {
  json gamma;
  switch (params.gamma.kind()) {
    case DecayKind::scalar:
      gamma = params.gamma(0, 0);
      break;
    case DecayKind::per_node: {
      Vector g(static_cast<Index>(params.nodes()));
      for (std::size_t i = 0; i < params.nodes(); ++i) g(static_cast<Index>(i)) = params.gamma.receiver(i);
      gamma = to_json(g);
      break;
    }
    case DecayKind::per_pair:
      gamma = to_json(params.gamma.pairs());
      break;
  }
  const json out{{"mu", to_json(params.mu)}, {"alpha", to_json(params.alpha)}, {"gamma", gamma}};
  return out.dump(2) + "\n";
}

HawkesParams hawkes_params_from_json(std::string_view text, std::string_view origin) {
  const json j = parse_json(text, origin);
  if (!j.is_object()) fail_field(origin, "<root>", "expected a JSON object");
  check_keys(j, {"mu", "alpha", "gamma"}, origin);
  HawkesParams p;
  p.mu = get_vector(require(j, "mu", origin), origin, "mu");
  const auto m = p.mu.size();
  if (m < 1) fail_field(origin, "mu", "needs at least one node");
  p.alpha = get_matrix(require(j, "alpha", origin), origin, "alpha");
  if (p.alpha.rows() != m || p.alpha.cols() != m) {
    fail_field(origin, "alpha", "must be " + std::to_string(m) + " x " + std::to_string(m));
  }
  const json& g = require(j, "gamma", origin);
  const auto check_gamma = [&](double v, const std::string& field) {
    if (!(v > 0.0 && v < 1.0)) fail_field(origin, field, "gamma must lie in (0, 1), got " + format_real(v));
  };
  if (g.is_number()) {
    const double v = get_real(g, origin, "gamma");
    check_gamma(v, "gamma");
    p.gamma = DecaySpec::scalar(v, static_cast<std::size_t>(m));
  } else if (g.is_array() && !g.empty() && g[0].is_array()) {
    const Matrix G = get_matrix(g, origin, "gamma");
    if (G.rows() != m || G.cols() != m) fail_field(origin, "gamma", "matrix must be " + std::to_string(m) + " x " + std::to_string(m));
    for (Index i = 0; i < m; ++i) {
      for (Index k = 0; k < m; ++k) check_gamma(G(i, k), "gamma[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    p.gamma = DecaySpec::per_pair(G);
  } else {
    const Vector G = get_vector(g, origin, "gamma");
    if (G.size() != m) fail_field(origin, "gamma", "needs " + std::to_string(m) + " entries");
    for (Index i = 0; i < m; ++i) check_gamma(G(i), "gamma[" + std::to_string(i) + "]");
    p.gamma = DecaySpec::per_node(G);
  }
  for (Index i = 0; i < m; ++i) {
    if (p.mu(i) < 0.0) fail_field(origin, "mu[" + std::to_string(i) + "]", "must be non-negative");
    for (Index k = 0; k < m; ++k) {
      if (p.alpha(i, k) < 0.0) {
        fail_field(origin, "alpha[" + std::to_string(i) + "][" + std::to_string(k) + "]", "must be non-negative");
      }
    }
  }
  return p;
}

std::string state_space_to_json(const StateSpaceSpec& spec) {
  json out{{"kind", model_kind_name(spec.kind)},
           {"dt", spec.dt},
           {"mu", to_json(spec.mu)},
           {"omega1", to_json(spec.omega1)},
           {"epsilon", to_json(spec.epsilon)},
           {"alpha", to_json(spec.alpha)},
           {"omega2", to_json(spec.omega2)}};
  if (spec.kind == ModelKind::lgcp_network) out["eta"] = to_json(spec.eta);
  if (spec.kind == ModelKind::lgcp_logistic) {
    out["A"] = spec.A;
    out["B"] = spec.B;
  }
  const ParameterMask& e = spec.estimate;
  out["estimate"] = json{{"mu", e.mu},       {"omega1", e.omega1}, {"epsilon", e.epsilon}, {"eta", e.eta},
                         {"alpha", e.alpha}, {"omega2", e.omega2}, {"A", e.A},             {"B", e.B}};
  return out.dump(2) + "\n";
}

StateSpaceSpec state_space_from_json(std::string_view text, std::string_view origin) {
  const json j = parse_json(text, origin);
  if (!j.is_object()) fail_field(origin, "<root>", "expected a JSON object");
  check_keys(j, {"kind", "dt", "mu", "omega1", "epsilon", "eta", "alpha", "omega2", "A", "B", "estimate"}, origin);
  StateSpaceSpec s;
  const json& kind = require(j, "kind", origin);
  if (!kind.is_string()) fail_field(origin, "kind", "expected a string");
  try {
    s.kind = parse_model_kind(kind.get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail_field(origin, "kind", e.what());
  }
  s.dt = get_real(require(j, "dt", origin), origin, "dt");
  s.mu = get_vector(require(j, "mu", origin), origin, "mu");
  const Index m = s.mu.size();
  s.omega1 = get_vector(require(j, "omega1", origin), origin, "omega1", m);
  s.epsilon = get_vector(require(j, "epsilon", origin), origin, "epsilon", m);
  s.omega2 = get_vector(require(j, "omega2", origin), origin, "omega2", m);
  const json& alpha = require(j, "alpha", origin);
  if (alpha.is_number()) {
    s.alpha = Matrix::Constant(m, m, get_real(alpha, origin, "alpha"));
  } else {
    s.alpha = get_matrix(alpha, origin, "alpha");
  }
  s.eta = j.contains("eta") ? get_vector(j["eta"], origin, "eta", m) : Vector::Zero(m);
  if (s.kind == ModelKind::lgcp_logistic) {
    s.A = get_real(require(j, "A", origin), origin, "A");
    s.B = get_real(require(j, "B", origin), origin, "B");
  } else if (j.contains("A") || j.contains("B")) {
    fail_field(origin, j.contains("A") ? "A" : "B", "only the logistic model has A and B");
  }
  if (j.contains("estimate")) {
    const json& e = j["estimate"];
    if (!e.is_object()) fail_field(origin, "estimate", "expected an object of booleans");
    const std::string where = std::string(origin) + ": estimate";
    check_keys(e, {"mu", "omega1", "epsilon", "eta", "alpha", "omega2", "A", "B"}, where);
    const auto flag = [&](const char* key, bool& target) {
      if (!e.contains(key)) return;
      if (!e[key].is_boolean()) fail_field(where, key, "expected true or false");
      target = e[key].get<bool>();
    };
    flag("mu", s.estimate.mu);
    flag("omega1", s.estimate.omega1);
    flag("epsilon", s.estimate.epsilon);
    flag("eta", s.estimate.eta);
    flag("alpha", s.estimate.alpha);
    flag("omega2", s.estimate.omega2);
    flag("A", s.estimate.A);
    flag("B", s.estimate.B);
  }
  rethrow_invalid(origin, [&] { s.validate(); });
  return s;
}

std::string abm_config_to_json(const AbmConfig& config) {
  json out{{"W", to_json(config.W)},         {"A0", to_json(config.A0)},       {"omega", to_json(config.omega)},
           {"eta", to_json(config.eta)},     {"Gamma", to_json(config.Gamma)}, {"dt", config.dt}};
  if (config.B0.size() > 0) out["B0"] = to_json(config.B0);
  return out.dump(2) + "\n";
}

AbmConfig abm_config_from_json(std::string_view text, std::string_view origin) {
  const json j = parse_json(text, origin);
  if (!j.is_object()) fail_field(origin, "<root>", "expected a JSON object");
  check_keys(j, {"W", "A0", "omega", "eta", "Gamma", "dt", "B0"}, origin);
  AbmConfig c;
  c.W = get_matrix(require(j, "W", origin), origin, "W");
  const Index m = c.W.rows();
  c.A0 = get_vector(require(j, "A0", origin), origin, "A0", m);
  c.omega = get_vector(require(j, "omega", origin), origin, "omega", m);
  c.eta = get_vector(require(j, "eta", origin), origin, "eta", m);
  c.Gamma = get_vector(require(j, "Gamma", origin), origin, "Gamma", m);
  c.dt = get_real(require(j, "dt", origin), origin, "dt");
  if (j.contains("B0")) c.B0 = get_vector(j["B0"], origin, "B0", m);
  rethrow_invalid(origin, [&] { c.validate(); });
  return c;
}

std::string em_config_to_json(const EmConfig& config) {
  json out{{"particles", config.particles},
           {"max_iters", config.max_iters},
           {"tol", config.tol},
           {"resample_threshold", config.resample_threshold}};
  if (config.smoothing_paths) out["smoothing_paths"] = *config.smoothing_paths;
  if (config.initial_prior) {
    out["initial_prior"] = json{{"mean", to_json(config.initial_prior->mean)}, {"sd", to_json(config.initial_prior->sd)}};
  }
  const NelderMeadOptions& o = config.optimizer;
  out["optimizer"] = json{{"max_evals", o.max_evals},
                          {"restarts", o.restarts},
                          {"initial_step", o.initial_step},
                          {"ftol", o.ftol},
                          {"barrier", o.barrier}};
  const ObservationBounds& b = config.bounds;
  out["bounds"] = json{{"alpha_max", b.alpha_max}, {"A_min", b.A_min}, {"A_max", b.A_max},
                       {"B_min", b.B_min},         {"B_max", b.B_max}};
  return out.dump(2) + "\n";
}

EmConfig em_config_from_json(std::string_view text, std::string_view origin) {
  const json j = parse_json(text, origin);
  if (!j.is_object()) fail_field(origin, "<root>", "expected a JSON object");
  check_keys(j, {"particles", "smoothing_paths", "max_iters", "tol", "resample_threshold", "initial_prior",
                 "optimizer", "bounds"},
             origin);
  EmConfig c;
  if (j.contains("particles")) c.particles = get_count<std::size_t>(j["particles"], origin, "particles");
  if (j.contains("smoothing_paths")) {
    c.smoothing_paths = get_count<std::size_t>(j["smoothing_paths"], origin, "smoothing_paths");
  }
  if (j.contains("max_iters")) c.max_iters = get_count<std::size_t>(j["max_iters"], origin, "max_iters");
  if (j.contains("tol")) c.tol = get_real(j["tol"], origin, "tol");
  if (j.contains("resample_threshold")) {
    c.resample_threshold = get_real(j["resample_threshold"], origin, "resample_threshold");
  }
  if (j.contains("initial_prior")) {
    const json& p = j["initial_prior"];
    const std::string where = std::string(origin) + ": initial_prior";
    GaussianPrior prior;
    prior.mean = get_vector(require(p, "mean", where), where, "mean");
    prior.sd = get_vector(require(p, "sd", where), where, "sd", prior.mean.size());
    if (prior.sd.size() != prior.mean.size()) fail_field(where, "sd", "must match the length of mean");
    if ((prior.sd.array() <= 0.0).any()) fail_field(where, "sd", "must be positive");
    c.initial_prior = std::move(prior);
  }
  if (j.contains("optimizer")) {
    const json& o = j["optimizer"];
    const std::string where = std::string(origin) + ": optimizer";
    if (!o.is_object()) fail_field(origin, "optimizer", "expected an object");
    check_keys(o, {"max_evals", "restarts", "initial_step", "ftol", "barrier"}, where);
    if (o.contains("max_evals")) c.optimizer.max_evals = get_count<std::size_t>(o["max_evals"], where, "max_evals");
    if (o.contains("restarts")) c.optimizer.restarts = get_count<std::size_t>(o["restarts"], where, "restarts");
    if (o.contains("initial_step")) c.optimizer.initial_step = get_real(o["initial_step"], where, "initial_step");
    if (o.contains("ftol")) c.optimizer.ftol = get_real(o["ftol"], where, "ftol");
    if (o.contains("barrier")) c.optimizer.barrier = get_real(o["barrier"], where, "barrier");
  }
  if (j.contains("bounds")) {
    const json& b = j["bounds"];
    const std::string where = std::string(origin) + ": bounds";
    if (!b.is_object()) fail_field(origin, "bounds", "expected an object");
    check_keys(b, {"alpha_max", "A_min", "A_max", "B_min", "B_max"}, where);
    const auto real = [&](const char* key, double& target) {
      if (b.contains(key)) target = get_real(b[key], where, key);
    };
    real("alpha_max", c.bounds.alpha_max);
    real("A_min", c.bounds.A_min);
    real("A_max", c.bounds.A_max);
    real("B_min", c.bounds.B_min);
    real("B_max", c.bounds.B_max);
  }
  rethrow_invalid(origin, [&] { c.validate(); });
  return c;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(origin_of(path) + ": cannot open for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError(origin_of(path) + ": read failed");
  return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(origin_of(path) + ": cannot open for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError(origin_of(path) + ": write failed");
}

}  // namespace hawkesnet
