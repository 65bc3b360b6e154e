#pragma once

// Eigenspace Perturbation Method: physically constrained perturbations of
// eigenvalue shape, eigenvector alignment, and TKE amplitude, plus the
// componentwise uncertainty envelope over a set of perturbed stresses.

#include <span>
#include <vector>

#include "turbuq/tensor.hpp"

namespace turbuq {

// Extremal realizable anisotropy states (barycentric triangle corners).
enum class LimitingState { OneComponent, TwoComponent, ThreeComponent };

enum class EigenvectorMode { Keep, SwapExtremes };

// Anisotropy eigenvalues of a limiting state:
// 1C = (2/3, -1/3, -1/3), 2C = (1/6, 1/6, -1/3), 3C = (0, 0, 0).
Vec3 corner_eigenvalues(LimitingState s);
BarycentricPoint corner_point(LimitingState s);
const char* corner_name(LimitingState s);

struct PerturbationSpec {
  LimitingState target = LimitingState::ThreeComponent;
  double delta_b = 0.0;           // relative eigenvalue-perturbation magnitude, in [0, 1]
  double amplitude_factor = 1.0;  // multiplier on tke, >= 0 and finite
  EigenvectorMode mode = EigenvectorMode::Keep;

  // Throws InvalidDelta / std::invalid_argument on out-of-range fields.
  void validate() const;
};

// Componentwise bounds over a family of perturbed tensors.
struct Envelope {
  SymTensor3 lower, upper;
  int member_count = 0;

  bool contains(const SymTensor3& t, double tol = 0.0) const;
  SymTensor3 width() const { return upper - lower; }
};

// Linear barycentric move toward the target corner:
// p* = p + delta_b (p_target - p). The endpoints are exact: delta_b = 0
// returns the input, delta_b = 1 the corner eigenvalues.
Vec3 perturb_eigenvalues(const Vec3& lambda, LimitingState target, double delta_b);

// Keep returns v unchanged; SwapExtremes exchanges the first and third
// columns and negates the new third so the frame stays right-handed.
Mat3 perturb_eigenvectors(const Mat3& v, EigenvectorMode mode);

// Full eigenspace perturbation of a realizable stress (Reconstructs with
// k* = amplitude_factor * k, perturbed eigenvalues and frame).
SymTensor3 apply_perturbation(const SymTensor3& r, const PerturbationSpec& spec);

// Componentwise min/max over {r} and all perturbed members.
Envelope envelope(const SymTensor3& r, std::span<const PerturbationSpec> specs);

// Uncalibrated physics baseline: the three corners at delta_b = 1,
// amplitude_factor = 1, mode = Keep.
std::vector<PerturbationSpec> baseline_specs();

}  // namespace turbuq
