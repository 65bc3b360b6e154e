#include "turbuq/epm.hpp"

#include <cmath>
#include <stdexcept>

namespace turbuq {

Vec3 corner_eigenvalues(LimitingState s) {
  switch (s) {
    case LimitingState::OneComponent:
      return {2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0};
    case LimitingState::TwoComponent:
      return {1.0 / 6.0, 1.0 / 6.0, -1.0 / 3.0};
    case LimitingState::ThreeComponent:
      return {0.0, 0.0, 0.0};
  }
  throw std::invalid_argument("corner_eigenvalues: unknown limiting state");
}

BarycentricPoint corner_point(LimitingState s) {
  switch (s) {
    case LimitingState::OneComponent:
      return {1.0, 0.0, 0.0};
    case LimitingState::TwoComponent:
      return {0.0, 1.0, 0.0};
    case LimitingState::ThreeComponent:
      return {0.0, 0.0, 1.0};
  }
  throw std::invalid_argument("corner_point: unknown limiting state");
}

const char* corner_name(LimitingState s) {
  switch (s) {
    case LimitingState::OneComponent:
      return "1c";
    case LimitingState::TwoComponent:
      return "2c";
    case LimitingState::ThreeComponent:
      return "3c";
  }
  return "?";
}

void PerturbationSpec::validate() const {
  if (!(delta_b >= 0.0 && delta_b <= 1.0)) {
    throw InvalidDelta("delta_b must lie in [0, 1]");
  }
  if (!(amplitude_factor >= 0.0) || !std::isfinite(amplitude_factor)) {
    throw std::invalid_argument("amplitude_factor must be finite and non-negative");
  }
}

bool Envelope::contains(const SymTensor3& t, double tol) const {
  const auto inside = [tol](double lo, double x, double hi) {
    return x >= lo - tol && x <= hi + tol;
  };
  return inside(lower.xx, t.xx, upper.xx) && inside(lower.yy, t.yy, upper.yy) &&
         inside(lower.zz, t.zz, upper.zz) && inside(lower.xy, t.xy, upper.xy) &&
         inside(lower.xz, t.xz, upper.xz) && inside(lower.yz, t.yz, upper.yz);
}

Vec3 perturb_eigenvalues(const Vec3& lambda, LimitingState target, double delta_b) {
  if (!(delta_b >= 0.0 && delta_b <= 1.0)) {
    throw InvalidDelta("perturb_eigenvalues: delta_b must lie in [0, 1]");
  }
  if (delta_b == 0.0) return lambda;
  if (delta_b == 1.0) return corner_eigenvalues(target);

  const BarycentricPoint p = barycentric(lambda);
  const BarycentricPoint pt = corner_point(target);
  const BarycentricPoint moved{p.c1 + delta_b * (pt.c1 - p.c1),
                               p.c2 + delta_b * (pt.c2 - p.c2),
                               p.c3 + delta_b * (pt.c3 - p.c3)};
  return from_barycentric(moved);
}

Mat3 perturb_eigenvectors(const Mat3& v, EigenvectorMode mode) {
  if (mode == EigenvectorMode::Keep) return v;
  // swap extreme columns, negate the new third to keep det = +1
  Mat3 out = v;
  for (int r = 0; r < 3; ++r) {
    out[r][0] = v[r][2];
    out[r][2] = -v[r][0];
  }
  return out;
}

SymTensor3 apply_perturbation(const SymTensor3& r, const PerturbationSpec& spec) {
  spec.validate();
  const double k = tke(r);
  const AnisotropyTensor b = anisotropy(r);  // throws DegenerateTke at the floor
  // a no-op spec is the exact identity, not a decompose/rebuild round trip
  if (spec.delta_b == 0.0 && spec.amplitude_factor == 1.0 && spec.mode == EigenvectorMode::Keep)
    return r;
  const EigenDecomp d = eig_sym3(b.t);

  EigenDecomp perturbed;
  perturbed.eigenvalues = perturb_eigenvalues(d.eigenvalues, spec.target, spec.delta_b);
  perturbed.vectors = perturb_eigenvectors(d.vectors, spec.mode);
  return reconstruct(spec.amplitude_factor * k, perturbed);
}

Envelope envelope(const SymTensor3& r, std::span<const PerturbationSpec> specs) {
  if (specs.empty()) {
    throw EmptySpecList("envelope: at least one perturbation spec required");
  }
  Envelope env{r, r, 1};
  for (const PerturbationSpec& spec : specs) {
    const SymTensor3 member = apply_perturbation(r, spec);
    env.lower = SymTensor3::component_min(env.lower, member);
    env.upper = SymTensor3::component_max(env.upper, member);
    ++env.member_count;
  }
  return env;
}

std::vector<PerturbationSpec> baseline_specs() {
  return {{LimitingState::OneComponent, 1.0, 1.0, EigenvectorMode::Keep},
          {LimitingState::TwoComponent, 1.0, 1.0, EigenvectorMode::Keep},
          {LimitingState::ThreeComponent, 1.0, 1.0, EigenvectorMode::Keep}};
}

}  // namespace turbuq
