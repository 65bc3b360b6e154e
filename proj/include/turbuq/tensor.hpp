#pragma once

// Realizability-aware algebra for symmetric 3x3 Reynolds-stress tensors:
// TKE extraction, anisotropy normalization, eigendecomposition, barycentric
// limiting-state coordinates, and eigenspace reconstruction.

#include <array>
#include <cmath>

#include "turbuq/errors.hpp"

namespace turbuq {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

// PSD tolerance for realizability checks; absorbs eigensolver round-off.
inline constexpr double kTolPsd = 1e-10;
// TKE floor guarding anisotropy normalization at near-laminar points.
inline constexpr double kTkeFloor = 1e-12;

// Symmetric 3x3 tensor stored as its six independent components,
// velocity^2 units (stresses are per unit density).
struct SymTensor3 {
  double xx = 0.0, yy = 0.0, zz = 0.0;
  double xy = 0.0, xz = 0.0, yz = 0.0;

  static SymTensor3 diag(double a, double b, double c) { return {a, b, c, 0.0, 0.0, 0.0}; }
  static SymTensor3 isotropic(double k) { return diag(2.0 * k / 3.0, 2.0 * k / 3.0, 2.0 * k / 3.0); }

  double trace() const { return xx + yy + zz; }

  Mat3 matrix() const {
    return {{{xx, xy, xz}, {xy, yy, yz}, {xz, yz, zz}}};
  }

  Vec3 apply(const Vec3& v) const {
    return {xx * v[0] + xy * v[1] + xz * v[2],
            xy * v[0] + yy * v[1] + yz * v[2],
            xz * v[0] + yz * v[1] + zz * v[2]};
  }

  bool finite() const {
    return std::isfinite(xx) && std::isfinite(yy) && std::isfinite(zz) &&
           std::isfinite(xy) && std::isfinite(xz) && std::isfinite(yz);
  }

  friend SymTensor3 operator+(const SymTensor3& a, const SymTensor3& b) {
    return {a.xx + b.xx, a.yy + b.yy, a.zz + b.zz, a.xy + b.xy, a.xz + b.xz, a.yz + b.yz};
  }
  friend SymTensor3 operator-(const SymTensor3& a, const SymTensor3& b) {
    return {a.xx - b.xx, a.yy - b.yy, a.zz - b.zz, a.xy - b.xy, a.xz - b.xz, a.yz - b.yz};
  }
  friend SymTensor3 operator*(double s, const SymTensor3& a) {
    return {s * a.xx, s * a.yy, s * a.zz, s * a.xy, s * a.xz, s * a.yz};
  }

  static SymTensor3 component_min(const SymTensor3& a, const SymTensor3& b);
  static SymTensor3 component_max(const SymTensor3& a, const SymTensor3& b);
};

// Largest componentwise absolute difference.
double max_abs_diff(const SymTensor3& a, const SymTensor3& b);

// Ordered eigenvalues with a right-handed orthonormal eigenvector frame.
// vectors[r][c]: row r of column c; column c pairs with eigenvalues[c].
struct EigenDecomp {
  Vec3 eigenvalues{};  // descending
  Mat3 vectors{};

  Vec3 column(int c) const { return {vectors[0][c], vectors[1][c], vectors[2][c]}; }
};

// Traceless, dimensionless deviation of a stress from isotropy.
struct AnisotropyTensor {
  SymTensor3 t;
};

// Weights on the one-, two-, and three-component limiting states.
struct BarycentricPoint {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
};

// trace(R)/2, total on all inputs.
double tke(const SymTensor3& r);

// b = R/(2k) - I/3. Throws DegenerateTke when tke <= kTkeFloor.
AnisotropyTensor anisotropy(const SymTensor3& r);

// Cyclic Jacobi eigendecomposition. Converges when the off-diagonal
// Frobenius norm drops below 1e-13; throws NoConvergence after 50 sweeps
// (only reachable for non-finite input).
EigenDecomp eig_sym3(const SymTensor3& a);

// R = 2k (V L V^T + I/3) from anisotropy eigenvalues. Throws
// NonRealizableEigenvalues when any eigenvalue leaves [-1/3, 2/3] by more
// than kTolPsd; std::invalid_argument for negative or non-finite k.
SymTensor3 reconstruct(double k, const EigenDecomp& d);

// c1 = l1 - l2, c2 = 2(l2 - l3), c3 = 3 l3 + 1. Expects descending input.
BarycentricPoint barycentric(const Vec3& lambda);

// Inverse of barycentric. Throws InvalidBarycentric when a weight is below
// -1e-9 or the weights do not sum to 1 within 1e-9.
Vec3 from_barycentric(const BarycentricPoint& p);

// True iff the smallest eigenvalue is >= -tol. Non-finite input is never
// realizable.
bool is_realizable(const SymTensor3& r, double tol = kTolPsd);

}  // namespace turbuq
