#include "it2pf/dataset_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>
#include <vector>

#include "it2pf/errors.hpp"

namespace it2pf {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v))
    fail(ErrorCategory::Format, "line " + std::to_string(line) + ": field '" + field +
                                    "' is not a finite number: '" + s + "'");
  return v;
}

int parse_int(const std::string& s, std::size_t line, const std::string& field) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size())
    fail(ErrorCategory::Format, "line " + std::to_string(line) + ": field '" + field +
                                    "' is not an integer: '" + s + "'");
  return static_cast<int>(v);
}

}  // namespace

void Recording::validate() const {
  require(dt > 0.0, ErrorCategory::Parameter, "recording dt must be > 0");
  require(n >= 1 && m >= 1, ErrorCategory::Shape, "recording dimensions must be >= 1");
  for (std::size_t k = 0; k < ticks.size(); ++k) {
    const Tick& t = ticks[k];
    if (t.x.size() != n || t.v.size() != n || t.y.size() != m)
      fail(ErrorCategory::Shape, "tick " + std::to_string(k) + " has inconsistent shape");
    if (!t.x.allFinite() || !t.v.allFinite() || !t.y.allFinite() || !std::isfinite(t.t))
      fail(ErrorCategory::InputDomain, "tick " + std::to_string(k) + " has non-finite entries");
    if (k == 0) continue;
    const Tick& prev = ticks[k - 1];
    if (t.trial_id < prev.trial_id)
      fail(ErrorCategory::Format, "tick " + std::to_string(k) + ": rows not sorted by trial id");
    if (t.trial_id == prev.trial_id && std::abs(t.t - prev.t - dt) > 1e-9)
      fail(ErrorCategory::Format, "tick " + std::to_string(k) + ": time step differs from dt");
  }
}

std::vector<int> Recording::trials() const {
  std::vector<int> out;
  for (const Tick& t : ticks)
    if (out.empty() || out.back() != t.trial_id) out.push_back(t.trial_id);
  return out;
}

Dataset Recording::to_dataset() const {
  Dataset ds;
  ds.channel = channel;
  ds.dt = dt;
  ds.n = n;
  ds.m = m;
  for (std::size_t k = 0; k + 1 < ticks.size(); ++k) {
    const Tick& cur = ticks[k];
    const Tick& next = ticks[k + 1];
    if (next.trial_id != cur.trial_id) continue;
    ds.samples.push_back(Sample{cur.x, cur.v, next.v, cur.y});
    ds.trial_ids.push_back(cur.trial_id);
  }
  return ds;
}

void Recording::append(const Recording& other) {
  if (ticks.empty() && n == 0) {
    channel = other.channel;
    dt = other.dt;
    n = other.n;
    m = other.m;
  }
  require(other.n == n && other.m == m && other.channel == channel, ErrorCategory::Shape,
          "cannot append recordings of different channels or shapes");
  ticks.insert(ticks.end(), other.ticks.begin(), other.ticks.end());
}

void write_recording_csv(const Recording& rec, std::ostream& out) {
  out << "# it2pf-dataset v" << kDatasetFormatVersion << " channel=" << channel_tag(rec.channel)
      << " dt=" << fmt(rec.dt) << " n=" << rec.n << " m=" << rec.m << '\n';
  out << "t,trial_id";
  for (int i = 1; i <= rec.n; ++i) out << ",x" << i;
  for (int i = 1; i <= rec.n; ++i) out << ",v" << i;
  for (int i = 1; i <= rec.m; ++i) out << ",y" << i;
  out << '\n';
  for (const Tick& t : rec.ticks) {
    out << fmt(t.t) << ',' << t.trial_id;
    for (int i = 0; i < rec.n; ++i) out << ',' << fmt(t.x[i]);
    for (int i = 0; i < rec.n; ++i) out << ',' << fmt(t.v[i]);
    for (int i = 0; i < rec.m; ++i) out << ',' << fmt(t.y[i]);
    out << '\n';
  }
}

Recording read_recording_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCategory::Format,
          "line 1: missing dataset metadata line");
  std::istringstream meta(line);
  std::string hash, magic, version;
  meta >> hash >> magic >> version;
  require(hash == "#" && magic == "it2pf-dataset", ErrorCategory::Format,
          "line 1: not an it2pf dataset file");
  if (version != "v" + std::to_string(kDatasetFormatVersion))
    fail(ErrorCategory::Version, "line 1: unsupported dataset format version '" + version + "'");

  Recording rec;
  std::set<std::string> seen;
  std::string kv;
  while (meta >> kv) {
    const auto eq = kv.find('=');
    require(eq != std::string::npos, ErrorCategory::Format, "line 1: malformed metadata '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (key == "channel")
      rec.channel = parse_channel(value);
    else if (key == "dt")
      rec.dt = parse_double(value, 1, "dt");
    else if (key == "n")
      rec.n = parse_int(value, 1, "n");
    else if (key == "m")
      rec.m = parse_int(value, 1, "m");
    else
      fail(ErrorCategory::Format, "line 1: unknown metadata key '" + key + "'");
    seen.insert(key);
  }
  require(seen.size() == 4, ErrorCategory::Format, "line 1: metadata needs channel, dt, n and m");
  require(rec.dt > 0.0 && rec.n >= 1 && rec.m >= 1, ErrorCategory::Format,
          "line 1: metadata values out of range");

  require(static_cast<bool>(std::getline(in, line)), ErrorCategory::Format, "line 2: missing header");
  std::string expected = "t,trial_id";
  for (int i = 1; i <= rec.n; ++i) expected += ",x" + std::to_string(i);
  for (int i = 1; i <= rec.n; ++i) expected += ",v" + std::to_string(i);
  for (int i = 1; i <= rec.m; ++i) expected += ",y" + std::to_string(i);
  if (line != expected) fail(ErrorCategory::Format, "line 2: header must be '" + expected + "'");

  const std::size_t cols = 2 + 2 * static_cast<std::size_t>(rec.n) + static_cast<std::size_t>(rec.m);
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != cols)
      fail(ErrorCategory::Format, "line " + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                                      " fields, got " + std::to_string(cells.size()));
    Tick t;
    t.t = parse_double(cells[0], lineno, "t");
    t.trial_id = parse_int(cells[1], lineno, "trial_id");
    t.x.resize(rec.n);
    t.v.resize(rec.n);
    t.y.resize(rec.m);
    std::size_t c = 2;
    for (int i = 0; i < rec.n; ++i, ++c) t.x[i] = parse_double(cells[c], lineno, "x" + std::to_string(i + 1));
    for (int i = 0; i < rec.n; ++i, ++c) t.v[i] = parse_double(cells[c], lineno, "v" + std::to_string(i + 1));
    for (int i = 0; i < rec.m; ++i, ++c) t.y[i] = parse_double(cells[c], lineno, "y" + std::to_string(i + 1));
    rec.ticks.push_back(std::move(t));
  }
  try {
    rec.validate();
  } catch (const Error& e) {
    throw Error(ErrorCategory::Format, std::string("dataset invariant violated: ") + e.what());
  }
  return rec;
}

Recording load_recording(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCategory::Io, "cannot open dataset '" + path.string() + "'");
  return read_recording_csv(in);
}

void save_recording(const Recording& rec, const std::filesystem::path& path) {
  std::ostringstream out;
  write_recording_csv(rec, out);
  write_file_atomic(path, out.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCategory::Io, "cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    require(static_cast<bool>(out), ErrorCategory::Io, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCategory::Io, "cannot rename '" + tmp.string() + "': " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCategory::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace it2pf
