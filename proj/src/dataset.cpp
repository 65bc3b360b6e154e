#include "turbuq/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "turbuq/numfmt.hpp"
#include "turbuq/rng.hpp"

namespace turbuq::data {

namespace {

constexpr const char* kHeader = "case,station,x,y,k_rans,k_dns";

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_field(const std::string& field, std::size_t line_no, const char* name) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    throw ParseError("line " + std::to_string(line_no) + ": bad " + std::string(name) + " '" +
                     field + "'");
  return value;
}

std::string profile_label(const Profile& p) {
  return p.case_id + " @ station " + format_double(p.station);
}

}  // namespace

std::size_t ProfileSet::record_count() const {
  std::size_t n = 0;
  for (const Profile& p : profiles) n += p.size();
  return n;
}

int SplitAssignment::count(Partition p) const {
  return static_cast<int>(std::count(partition.begin(), partition.end(), p));
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension();
  p += ".uinf.json";
  return p;
}

ProfileSet load_dataset(const std::filesystem::path& csv_path, double u_inf_override) {
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open dataset file " + csv_path.string());

  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty dataset file " + csv_path.string());
  if (strip_cr(line) != kHeader)
    throw ParseError("line 1: expected header '" + std::string(kHeader) + "'");

  ProfileSet ps;
  std::map<std::pair<std::string, double>, std::size_t> index;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;

    std::array<std::string, 6> fields;
    std::size_t field_count = 0;
    std::string cur;
    std::istringstream row(line);
    while (std::getline(row, cur, ',')) {
      if (field_count >= fields.size())
        throw ParseError("line " + std::to_string(line_no) + ": too many fields");
      fields[field_count++] = cur;
    }
    if (field_count != 6)
      throw ParseError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                       std::to_string(field_count));

    SampleRecord r;
    r.case_id = fields[0];
    if (r.case_id.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty case id");
    r.station = parse_field(fields[1], line_no, "station");
    r.x = parse_field(fields[2], line_no, "x");
    r.y = parse_field(fields[3], line_no, "y");
    r.k_rans = parse_field(fields[4], line_no, "k_rans");
    r.k_dns = parse_field(fields[5], line_no, "k_dns");
    if (!std::isfinite(r.k_rans) || !std::isfinite(r.k_dns) || r.k_rans < 0.0 || r.k_dns < 0.0)
      throw NegativeTke("line " + std::to_string(line_no) + ": k must be finite and >= 0");

    const std::pair<std::string, double> key{r.case_id, r.station};
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, ps.profiles.size()).first;
      Profile p;
      p.case_id = r.case_id;
      p.station = r.station;
      ps.profiles.push_back(std::move(p));
    }
    Profile& p = ps.profiles[it->second];
    p.x.push_back(r.x);
    p.y.push_back(r.y);
    p.k_rans.push_back(r.k_rans);
    p.k_dns.push_back(r.k_dns);
  }

  // freestream velocities: override or sidecar
  if (u_inf_override != 0.0) {
    if (!(u_inf_override > 0.0))
      throw NonPositiveFreestream("u_inf override must be positive");
    for (Profile& p : ps.profiles) {
      p.u_inf = u_inf_override;
      ps.u_inf[p.case_id] = u_inf_override;
    }
  } else {
    const std::filesystem::path side = sidecar_path(csv_path);
    std::ifstream sin(side);
    if (!sin) throw MissingFreestream("missing freestream sidecar " + side.string());
    nlohmann::json j;
    try {
      sin >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("sidecar " + side.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ParseError("sidecar " + side.string() + ": expected an object");
    for (Profile& p : ps.profiles) {
      if (!j.contains(p.case_id))
        throw MissingFreestream("no freestream velocity for case '" + p.case_id + "'");
      if (!j[p.case_id].is_number())
        throw ParseError("sidecar " + side.string() + ": U_inf for '" + p.case_id +
                         "' is not a number");
      const double u = j[p.case_id].get<double>();
      if (!(u > 0.0) || !std::isfinite(u))
        throw NonPositiveFreestream("U_inf for case '" + p.case_id + "' must be positive");
      p.u_inf = u;
      ps.u_inf[p.case_id] = u;
    }
  }

  // per-profile invariants: sort by y, require strict monotonicity and >= 3 points
  for (Profile& p : ps.profiles) {
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return p.y[a] < p.y[b]; });
    Profile sorted = p;
    for (std::size_t i = 0; i < order.size(); ++i) {
      sorted.x[i] = p.x[order[i]];
      sorted.y[i] = p.y[order[i]];
      sorted.k_rans[i] = p.k_rans[order[i]];
      sorted.k_dns[i] = p.k_dns[order[i]];
    }
    p = std::move(sorted);
    for (std::size_t i = 1; i < p.size(); ++i)
      if (!(p.y[i] > p.y[i - 1]))
        throw NonMonotoneProfile("profile " + profile_label(p) + ": duplicate y = " +
                                 format_double(p.y[i]));
    if (p.size() < 3)
      throw TooFewPoints("profile " + profile_label(p) + " has " + std::to_string(p.size()) +
                         " points, need at least 3");
  }
  return ps;
}

void write_dataset(const ProfileSet& ps, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw IoError("cannot write dataset file " + csv_path.string());
  out << kHeader << '\n';
  for (const Profile& p : ps.profiles)
    for (std::size_t i = 0; i < p.size(); ++i)
      out << p.case_id << ',' << format_double(p.station) << ',' << format_double(p.x[i]) << ','
          << format_double(p.y[i]) << ',' << format_double(p.k_rans[i]) << ','
          << format_double(p.k_dns[i]) << '\n';
  if (!out) throw IoError("failed while writing " + csv_path.string());

  nlohmann::json j = nlohmann::json::object();
  for (const auto& [case_id, u] : ps.u_inf) j[case_id] = u;
  const std::filesystem::path side = sidecar_path(csv_path);
  std::ofstream sout(side);
  if (!sout) throw IoError("cannot write freestream sidecar " + side.string());
  sout << j.dump(2) << '\n';
  if (!sout) throw IoError("failed while writing " + side.string());
}

double normalize_k(double k, double u_inf) {
  if (!(u_inf > 0.0) || !std::isfinite(u_inf))
    throw NonPositiveFreestream("U_inf must be positive, got " + format_double(u_inf));
  return k / (u_inf * u_inf);
}

std::vector<double> window_at(const Profile& profile, int index, int width) {
  if (width < 1 || width % 2 == 0)
    throw InvalidConfig("window width must be odd and positive, got " + std::to_string(width));
  const int n = static_cast<int>(profile.size());
  if (index < 0 || index >= n)
    throw InvalidConfig("window index " + std::to_string(index) + " outside profile of " +
                        std::to_string(n) + " points");
  const int half = width / 2;
  std::vector<double> window(static_cast<std::size_t>(width));
  for (int o = -half; o <= half; ++o) {
    const int j = std::clamp(index + o, 0, n - 1);  // edge replication
    window[static_cast<std::size_t>(o + half)] =
        normalize_k(profile.k_rans[static_cast<std::size_t>(j)], profile.u_inf);
  }
  return window;
}

std::vector<WindowRecord> make_windows(const Profile& profile, int width) {
  const int n = static_cast<int>(profile.size());
  if (n < 3)
    throw TooFewPoints("profile " + profile_label(profile) + " has " + std::to_string(n) +
                       " points, need at least 3");
  std::vector<WindowRecord> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    WindowRecord& w = out[static_cast<std::size_t>(i)];
    w.index = i;
    w.window = window_at(profile, i, width);
    w.target = normalize_k(profile.k_dns[static_cast<std::size_t>(i)], profile.u_inf);
  }
  return out;
}

SplitAssignment split_profiles(const ProfileSet& ps, double train_fraction, double val_fraction,
                               double test_fraction, std::uint64_t seed) {
  const int n = static_cast<int>(ps.profiles.size());
  if (n < 3) throw TooFewProfiles("need at least 3 profiles to split, got " + std::to_string(n));
  const double sum = train_fraction + val_fraction + test_fraction;
  if (std::fabs(sum - 1.0) > 1e-9)
    throw InvalidConfig("split fractions sum to " + format_double(sum) + ", expected 1");
  if (train_fraction <= 0.0 || val_fraction < 0.0 || test_fraction < 0.0)
    throw InvalidConfig("split fractions must be non-negative with a positive train share");

  const int n_val = static_cast<int>(std::lround(n * val_fraction));
  const int n_test = static_cast<int>(std::lround(n * test_fraction));
  const int n_train = n - n_val - n_test;  // train absorbs the rounding remainder
  if (n_train < 1)
    throw InvalidConfig("rounded split leaves no training profiles");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  SplitAssignment a;
  a.partition.assign(static_cast<std::size_t>(n), Partition::Train);
  a.train_fraction = train_fraction;
  a.val_fraction = val_fraction;
  a.test_fraction = test_fraction;
  a.seed = seed;
  for (int i = 0; i < n; ++i) {
    const std::size_t profile = static_cast<std::size_t>(order[static_cast<std::size_t>(i)]);
    a.partition[profile] =
        i < n_train ? Partition::Train : (i < n_train + n_val ? Partition::Val : Partition::Test);
  }
  return a;
}

StreamStats standardize_fit(std::span<const double> values) {
  if (values.empty()) throw EmptyBatch("standardize_fit: empty stream");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;
  const double std_dev = std::sqrt(var);
  if (std_dev < 1e-12)
    throw DegenerateSpread("stream is constant (std = " + format_double(std_dev) + ")");
  return {mean, std_dev};
}

double standardize_apply(double value, const StreamStats& s) { return (value - s.mean) / s.std; }

double destandardize(double value, const StreamStats& s) { return s.mean + value * s.std; }

std::vector<double> Standardization::apply_window(std::span<const double> window) const {
  std::vector<double> out(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) out[i] = standardize_apply(window[i], input);
  return out;
}

SplitWindows prepare_training_windows(const ProfileSet& ps, const SplitAssignment& split,
                                      int width) {
  if (split.partition.size() != ps.profiles.size())
    throw ShapeMismatch("split assignment covers " + std::to_string(split.partition.size()) +
                        " profiles, set has " + std::to_string(ps.profiles.size()));

  std::vector<WindowRecord> raw[3];
  for (std::size_t i = 0; i < ps.profiles.size(); ++i) {
    auto ws = make_windows(ps.profiles[i], width);
    auto& bucket = raw[static_cast<int>(split.partition[i])];
    std::move(ws.begin(), ws.end(), std::back_inserter(bucket));
  }
  if (raw[static_cast<int>(Partition::Train)].empty())
    throw EmptyPartition("no training windows after the split");

  std::vector<double> inputs, targets;
  for (const WindowRecord& w : raw[static_cast<int>(Partition::Train)]) {
    inputs.insert(inputs.end(), w.window.begin(), w.window.end());
    targets.push_back(w.target);
  }

  SplitWindows out;
  out.stats.input = standardize_fit(inputs);
  out.stats.target = standardize_fit(targets);
  auto convert = [&](const std::vector<WindowRecord>& src) {
    std::vector<ml::WindowSample> dst(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i].window = out.stats.apply_window(src[i].window);
      dst[i].target = standardize_apply(src[i].target, out.stats.target);
    }
    return dst;
  };
  out.train = convert(raw[static_cast<int>(Partition::Train)]);
  out.val = convert(raw[static_cast<int>(Partition::Val)]);
  out.test = convert(raw[static_cast<int>(Partition::Test)]);
  return out;
}

}  // namespace turbuq::data
