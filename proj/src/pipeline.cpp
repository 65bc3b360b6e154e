#include "turbuq/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "json.hpp"
#include "turbuq/numfmt.hpp"

namespace turbuq::uq {

namespace {

using nlohmann::json;

double mean_abs_error(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

json metrics_to_json(const StationReport& r) {
  json j{{"mae_baseline", r.mae_baseline},
         {"mae_corrected", r.mae_corrected},
         {"coverage", r.coverage},
         {"mean_band_width", r.mean_band_width}};
  // non-finite ratios (a zero corrected error) serialize as null
  j["improvement_factor"] = r.improvement_factor;
  return j;
}

StationReport finish_report(std::string id, double mae_b, double mae_c, int covered,
                            double width_sum, int n) {
  StationReport r;
  r.id = std::move(id);
  r.mae_baseline = mae_b;
  r.mae_corrected = mae_c;
  r.improvement_factor =
      mae_c > 0.0 ? mae_b / mae_c : std::numeric_limits<double>::infinity();
  r.coverage = static_cast<double>(covered) / n;
  r.mean_band_width = width_sum / n;
  return r;
}

}  // namespace

SymTensor3 correct_reynolds_stress(const SymTensor3& r_rans, double k_hat) {
  if (!(k_hat >= 0.0) || !std::isfinite(k_hat))
    throw std::invalid_argument("correct_reynolds_stress: k_hat must be finite and >= 0");
  const AnisotropyTensor b = anisotropy(r_rans);  // enforces the tke floor
  if (k_hat == tke(r_rans)) return r_rans;        // exact identity correction
  const SymTensor3 third = SymTensor3::diag(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
  return 2.0 * k_hat * (b.t + third);
}

double modulation_delta(double k, double k_hat) {
  return std::min(1.0, std::fabs(k_hat - k) / std::max(k, kTkeFloor));
}

std::vector<PerturbationSpec> modulated_specs(const SymTensor3& r_rans, double k_hat,
                                              std::span<const LimitingState> corners) {
  const double k = tke(r_rans);
  if (!(k > kTkeFloor))
    throw DegenerateTke("modulated_specs: tke at or below the floor");
  if (!(k_hat >= 0.0) || !std::isfinite(k_hat))
    throw std::invalid_argument("modulated_specs: k_hat must be finite and >= 0");
  const double delta = modulation_delta(k, k_hat);
  const double factor = k_hat == k ? 1.0 : k_hat / k;

  std::vector<PerturbationSpec> specs;
  specs.reserve(corners.size() + 1);
  // pure amplitude member: realizes R_corr
  specs.push_back({LimitingState::OneComponent, 0.0, factor, EigenvectorMode::Keep});
  for (LimitingState corner : corners)
    specs.push_back({corner, delta, factor, EigenvectorMode::Keep});
  return specs;
}

std::vector<SymTensor3> modulated_members(const SymTensor3& r_rans, double k_hat,
                                          std::span<const LimitingState> corners) {
  std::vector<SymTensor3> members;
  for (const PerturbationSpec& spec : modulated_specs(r_rans, k_hat, corners))
    members.push_back(apply_perturbation(r_rans, spec));
  return members;
}

Envelope modulated_envelope(const SymTensor3& r_rans, double k_hat,
                            std::span<const LimitingState> corners) {
  const std::vector<PerturbationSpec> specs = modulated_specs(r_rans, k_hat, corners);
  return envelope(r_rans, specs);
}

CorrectionResult correct_and_bound(const SymTensor3& r_rans, double k_hat,
                                   std::span<const LimitingState> corners) {
  CorrectionResult out;
  out.k_rans = tke(r_rans);
  out.k_hat = k_hat;
  out.r_rans = r_rans;
  out.r_corr = correct_reynolds_stress(r_rans, k_hat);
  out.envelope = modulated_envelope(r_rans, k_hat, corners);
  return out;
}

PointPredictor model_predictor(const Checkpoint& ckpt, int width) {
  if (ckpt.model.arch.input_len != width)
    throw ShapeMismatch("model expects windows of " +
                        std::to_string(ckpt.model.arch.input_len) + ", asked for " +
                        std::to_string(width));
  return [ckpt, width](const data::Profile& profile, int index) {
    const std::vector<double> window = data::window_at(profile, index, width);
    const std::vector<double> standardized = ckpt.standardization.apply_window(window);
    const double out = ckpt.model.forward(standardized);
    return std::max(0.0, data::destandardize(out, ckpt.standardization.target));
  };
}

StationEvaluation evaluate_station(const data::Profile& profile, const PointPredictor& predict) {
  const int n = static_cast<int>(profile.size());
  if (n < 3)
    throw TooFewPoints("profile " + profile.case_id + " has too few points to evaluate");

  StationEvaluation ev;
  ev.case_id = profile.case_id;
  ev.station = profile.station;
  ev.points.resize(static_cast<std::size_t>(n));

  std::vector<double> base(static_cast<std::size_t>(n)), corr(static_cast<std::size_t>(n)),
      dns(static_cast<std::size_t>(n));
  int covered = 0;
  double width_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    StationPoint& pt = ev.points[static_cast<std::size_t>(i)];
    pt.y = profile.y[static_cast<std::size_t>(i)];
    pt.k_plus_rans = data::normalize_k(profile.k_rans[static_cast<std::size_t>(i)], profile.u_inf);
    pt.k_plus_dns = data::normalize_k(profile.k_dns[static_cast<std::size_t>(i)], profile.u_inf);
    pt.k_plus_hat = predict(profile, i);
    pt.band_lo = std::min(pt.k_plus_rans, pt.k_plus_hat);
    pt.band_hi = std::max(pt.k_plus_rans, pt.k_plus_hat);
    if (pt.k_plus_dns >= pt.band_lo && pt.k_plus_dns <= pt.band_hi) ++covered;
    width_sum += pt.band_hi - pt.band_lo;
    base[static_cast<std::size_t>(i)] = pt.k_plus_rans;
    corr[static_cast<std::size_t>(i)] = pt.k_plus_hat;
    dns[static_cast<std::size_t>(i)] = pt.k_plus_dns;
  }
  ev.report = finish_report(profile.case_id + "@" + format_double(profile.station),
                            mean_abs_error(base, dns), mean_abs_error(corr, dns), covered,
                            width_sum, n);
  return ev;
}

StationEvaluation evaluate_station(const data::Profile& profile, const Checkpoint& ckpt) {
  return evaluate_station(profile, model_predictor(ckpt, ckpt.model.arch.input_len));
}

StationReport pooled_report(std::span<const StationEvaluation> evaluations) {
  double abs_base = 0.0, abs_corr = 0.0, width_sum = 0.0;
  int covered = 0, n = 0;
  for (const StationEvaluation& ev : evaluations)
    for (const StationPoint& pt : ev.points) {
      abs_base += std::fabs(pt.k_plus_rans - pt.k_plus_dns);
      abs_corr += std::fabs(pt.k_plus_hat - pt.k_plus_dns);
      width_sum += pt.band_hi - pt.band_lo;
      if (pt.k_plus_dns >= pt.band_lo && pt.k_plus_dns <= pt.band_hi) ++covered;
      ++n;
    }
  if (n == 0) {
    StationReport empty;
    empty.id = "aggregate";
    empty.improvement_factor = std::numeric_limits<double>::quiet_NaN();
    empty.mae_baseline = std::numeric_limits<double>::quiet_NaN();
    empty.mae_corrected = std::numeric_limits<double>::quiet_NaN();
    empty.coverage = std::numeric_limits<double>::quiet_NaN();
    empty.mean_band_width = std::numeric_limits<double>::quiet_NaN();
    return empty;
  }
  return finish_report("aggregate", abs_base / n, abs_corr / n, covered, width_sum, n);
}

void write_report(std::span<const StationEvaluation> evaluations,
                  const std::filesystem::path& directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw IoError("cannot create report directory " + directory.string());

  json stations = json::array();
  for (std::size_t i = 0; i < evaluations.size(); ++i) {
    const StationEvaluation& ev = evaluations[i];
    char name[32];
    std::snprintf(name, sizeof name, "station_%03zu.csv", i);
    const std::filesystem::path csv = directory / name;
    std::ofstream out(csv);
    if (!out) throw IoError("cannot write " + csv.string());
    out << "y,k_plus_rans,k_plus_hat,k_plus_dns,band_lo,band_hi\n";
    for (const StationPoint& pt : ev.points)
      out << format_double(pt.y) << ',' << format_double(pt.k_plus_rans) << ','
          << format_double(pt.k_plus_hat) << ',' << format_double(pt.k_plus_dns) << ','
          << format_double(pt.band_lo) << ',' << format_double(pt.band_hi) << '\n';
    if (!out) throw IoError("failed while writing " + csv.string());

    json entry = metrics_to_json(ev.report);
    entry["id"] = ev.report.id;
    entry["file"] = name;
    entry["points"] = ev.points.size();
    stations.push_back(std::move(entry));
  }

  const StationReport pooled = pooled_report(evaluations);
  json aggregate = metrics_to_json(pooled);
  aggregate["station_count"] = evaluations.size();

  const json summary{{"stations", std::move(stations)}, {"aggregate", std::move(aggregate)}};
  const std::filesystem::path path = directory / "summary.json";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << summary.dump(2) << '\n';
  if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace turbuq::uq
