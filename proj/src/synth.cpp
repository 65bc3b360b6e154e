#include "turbuq/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "turbuq/rng.hpp"

namespace turbuq::data {

double apply_law(DiscrepancyLaw law, double k) {
  switch (law) {
    case DiscrepancyLaw::PowerLaw:
      return 1.8 * std::pow(k, 0.9);
    case DiscrepancyLaw::Identity:
      return k;
  }
  throw InvalidConfig("unknown discrepancy law");
}

void SynthConfig::validate() const {
  if (profiles < 3)
    throw InvalidConfig("need at least 3 profiles, got " + std::to_string(profiles));
  if (points < 9) throw InvalidConfig("need at least 9 points, got " + std::to_string(points));
  if (!(noise_sigma >= 0.0)) throw InvalidConfig("noise_sigma must be non-negative");
}

ProfileSet synthesize(const SynthConfig& config) {
  config.validate();
  constexpr std::array<double, 4> kStations{0.2, 0.4, 0.6, 0.8};

  Rng rng(config.seed);
  ProfileSet ps;
  for (int i = 0; i < config.profiles; ++i) {
    Profile p;
    char name[16];
    std::snprintf(name, sizeof name, "case%02d", i / static_cast<int>(kStations.size()) + 1);
    p.case_id = name;
    p.station = kStations[static_cast<std::size_t>(i) % kStations.size()];
    p.u_inf = 1.0;

    const double amplitude = rng.uniform(0.5, 1.5);
    const double delta = rng.uniform(0.5, 1.2);
    p.x.resize(static_cast<std::size_t>(config.points));
    p.y.resize(static_cast<std::size_t>(config.points));
    p.k_rans.resize(static_cast<std::size_t>(config.points));
    p.k_dns.resize(static_cast<std::size_t>(config.points));
    for (int j = 0; j < config.points; ++j) {
      const double y = 3.0 * (j + 1) / config.points;
      const double eta = y / delta;
      const double k_rans = amplitude * eta * std::exp(1.0 - eta);
      double k_dns = apply_law(config.law, k_rans);
      if (config.noise_sigma > 0.0) k_dns += config.noise_sigma * rng.normal();
      p.x[static_cast<std::size_t>(j)] = p.station;
      p.y[static_cast<std::size_t>(j)] = y;
      p.k_rans[static_cast<std::size_t>(j)] = k_rans;
      p.k_dns[static_cast<std::size_t>(j)] = std::max(0.0, k_dns);
    }
    ps.u_inf[p.case_id] = p.u_inf;
    ps.profiles.push_back(std::move(p));
  }
  return ps;
}

}  // namespace turbuq::data
