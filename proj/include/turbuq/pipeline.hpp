#pragma once

// Couples the learned correction to the perturbation engine: corrected
// stresses, discrepancy-modulated envelopes, and station-level metrics.

#include <array>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "turbuq/checkpoint.hpp"
#include "turbuq/dataset.hpp"
#include "turbuq/epm.hpp"
#include "turbuq/tensor.hpp"

namespace turbuq::uq {

inline constexpr std::array<LimitingState, 3> kAllCorners{
    LimitingState::OneComponent, LimitingState::TwoComponent, LimitingState::ThreeComponent};

// R_corr = 2 k_hat (b + delta/3): rescales turbulence energy to k_hat while
// preserving the anisotropy exactly. DegenerateTke at the tke floor;
// k_hat must be finite and >= 0.
SymTensor3 correct_reynolds_stress(const SymTensor3& r_rans, double k_hat);

// min(1, |k_hat - k| / max(k, k_floor)): relative discrepancy clipped to
// the realizable perturbation range.
double modulation_delta(double k, double k_hat);

// One spec per corner at the modulated delta, plus the pure-amplitude spec
// that realizes R_corr; every member rescales tke by k_hat / k.
std::vector<PerturbationSpec> modulated_specs(const SymTensor3& r_rans, double k_hat,
                                              std::span<const LimitingState> corners);

std::vector<SymTensor3> modulated_members(const SymTensor3& r_rans, double k_hat,
                                          std::span<const LimitingState> corners);

Envelope modulated_envelope(const SymTensor3& r_rans, double k_hat,
                            std::span<const LimitingState> corners = kAllCorners);

struct CorrectionResult {
  double k_rans = 0.0;
  double k_hat = 0.0;
  SymTensor3 r_rans;
  SymTensor3 r_corr;
  Envelope envelope;
};

CorrectionResult correct_and_bound(const SymTensor3& r_rans, double k_hat,
                                   std::span<const LimitingState> corners = kAllCorners);

struct StationReport {
  std::string id;
  double mae_baseline = 0.0;
  double mae_corrected = 0.0;
  double improvement_factor = 0.0;  // +inf when mae_corrected is 0
  double coverage = 0.0;
  double mean_band_width = 0.0;
};

struct StationPoint {
  double y = 0.0;
  double k_plus_rans = 0.0;
  double k_plus_hat = 0.0;
  double k_plus_dns = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;
};

struct StationEvaluation {
  std::string case_id;
  double station = 0.0;
  std::vector<StationPoint> points;
  StationReport report;
};

// Returns the corrected k+ (non-negative) for one profile point.
using PointPredictor = std::function<double(const data::Profile&, int)>;

// Window -> standardize -> forward -> destandardize -> clamp at 0.
PointPredictor model_predictor(const Checkpoint& ckpt, int width = 9);

// Per-point k+ band spans the turbulence energies of the modulated envelope
// members, i.e. [min(k+, k_hat+), max(k+, k_hat+)]; coverage counts DNS
// values inside it, bounds inclusive.
StationEvaluation evaluate_station(const data::Profile& profile, const PointPredictor& predict);
StationEvaluation evaluate_station(const data::Profile& profile, const Checkpoint& ckpt);

// Metrics pooled over every point of every station.
StationReport pooled_report(std::span<const StationEvaluation> evaluations);

// station_NNN.csv per evaluation (y,k_plus_rans,k_plus_hat,k_plus_dns,
// band_lo,band_hi) plus summary.json with per-station and pooled metrics.
void write_report(std::span<const StationEvaluation> evaluations,
                  const std::filesystem::path& directory);

}  // namespace turbuq::uq
