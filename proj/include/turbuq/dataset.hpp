#pragma once

// Paired low/high-fidelity dataset handling: CSV ingestion with per-case
// freestream velocities, k+ normalization, sliding windows over profiles,
// profile-granularity splits, and train-only standardization.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "turbuq/errors.hpp"
#include "turbuq/train.hpp"

namespace turbuq::data {

struct SampleRecord {
  std::string case_id;
  double station = 0.0;
  double x = 0.0;
  double y = 0.0;
  double k_rans = 0.0;
  double k_dns = 0.0;
};

// One (case, station) group, sorted by wall-normal coordinate.
struct Profile {
  std::string case_id;
  double station = 0.0;
  double u_inf = 1.0;
  std::vector<double> x, y, k_rans, k_dns;

  std::size_t size() const { return y.size(); }
};

struct ProfileSet {
  std::vector<Profile> profiles;
  std::map<std::string, double> u_inf;  // per case

  std::size_t record_count() const;
};

enum class Partition { Train, Val, Test };

struct SplitAssignment {
  std::vector<Partition> partition;  // aligned with ProfileSet::profiles
  double train_fraction = 0.75;
  double val_fraction = 0.05;
  double test_fraction = 0.20;
  std::uint64_t seed = 0;

  int count(Partition p) const;
};

// CSV with header `case,station,x,y,k_rans,k_dns`; freestream velocities
// come from the sidecar `<stem>.uinf.json` unless `u_inf_override` > 0.
// Profiles are grouped in first-appearance order and sorted by y.
// ParseError carries the offending line number; NegativeTke the row;
// NonMonotoneProfile fires on duplicate y; TooFewPoints below 3 points;
// MissingFreestream / NonPositiveFreestream on sidecar problems.
ProfileSet load_dataset(const std::filesystem::path& csv_path, double u_inf_override = 0.0);

// Writes the CSV plus its `.uinf.json` sidecar; numbers use the shortest
// exact round-trip form, so load(write(ps)) reproduces ps bit for bit.
void write_dataset(const ProfileSet& ps, const std::filesystem::path& csv_path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

// k+ = k / U_inf^2. NonPositiveFreestream unless U_inf > 0.
double normalize_k(double k, double u_inf);

struct WindowRecord {
  std::vector<double> window;  // k+_rans, edge-replicated
  double target = 0.0;         // k+_dns at the window center
  int index = 0;               // point index within the profile
};

// k+_rans window centered at `index`, boundaries edge-replicated. Width
// must be odd.
std::vector<double> window_at(const Profile& profile, int index, int width = 9);

// One window per profile point, centered there, boundaries edge-replicated.
// Width must be odd. TooFewPoints below 3 profile points.
std::vector<WindowRecord> make_windows(const Profile& profile, int width = 9);

// Profile-granularity shuffle split; val and test get round(N * fraction)
// profiles and train absorbs the remainder. TooFewProfiles below 3.
SplitAssignment split_profiles(const ProfileSet& ps, double train_fraction, double val_fraction,
                               double test_fraction, std::uint64_t seed);

struct StreamStats {
  double mean = 0.0;
  double std = 1.0;
};

// Population mean/std of one stream. DegenerateSpread when std < 1e-12.
StreamStats standardize_fit(std::span<const double> values);

double standardize_apply(double value, const StreamStats& s);
double destandardize(double value, const StreamStats& s);

// Input/target constants fitted on the train partition, stored alongside
// the model so inference sees the training scale.
struct Standardization {
  StreamStats input;
  StreamStats target;

  std::vector<double> apply_window(std::span<const double> window) const;
};

struct SplitWindows {
  std::vector<ml::WindowSample> train, val, test;
  Standardization stats;
};

// Windows every profile, fits standardization on the train partition only,
// and returns standardized samples for all three partitions.
SplitWindows prepare_training_windows(const ProfileSet& ps, const SplitAssignment& split,
                                      int width = 9);

}  // namespace turbuq::data
