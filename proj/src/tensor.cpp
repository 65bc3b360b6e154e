#include "turbuq/tensor.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace turbuq {

namespace {

constexpr double kOffDiagTol = 1e-13;
constexpr int kMaxSweeps = 50;
constexpr double kEigenTieTol = 1e-12;

double off_diagonal_norm(const Mat3& m) {
  return std::sqrt(2.0 * (m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2]));
}

// One Jacobi rotation zeroing m[p][q]; accumulates the rotation into v.
void jacobi_rotate(Mat3& m, Mat3& v, int p, int q) {
  const double apq = m[p][q];
  if (apq == 0.0) return;
  const double theta = (m[q][q] - m[p][p]) / (2.0 * apq);
  const double sign = theta >= 0.0 ? 1.0 : -1.0;
  const double t = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  m[p][p] -= t * apq;
  m[q][q] += t * apq;
  m[p][q] = 0.0;
  m[q][p] = 0.0;
  const int r = 3 - p - q;  // the remaining index
  const double arp = m[r][p];
  const double arq = m[r][q];
  m[r][p] = arp - s * (arq + tau * arp);
  m[p][r] = m[r][p];
  m[r][q] = arq + s * (arp - tau * arq);
  m[q][r] = m[r][q];

  for (int i = 0; i < 3; ++i) {
    const double vip = v[i][p];
    const double viq = v[i][q];
    v[i][p] = c * vip - s * viq;
    v[i][q] = s * vip + c * viq;
  }
}

struct EigenPair {
  double value;
  Vec3 vec;
};

// Flip sign so the largest-magnitude component (first on ties) is positive.
void normalize_sign(EigenPair& p) {
  int arg = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(p.vec[i]) > std::abs(p.vec[arg])) arg = i;
  }
  if (p.vec[arg] < 0.0) {
    for (double& c : p.vec) c = -c;
  }
}

bool lex_greater(const Vec3& a, const Vec3& b) {
  for (int i = 0; i < 3; ++i) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

// Descending by eigenvalue; eigenvalue ties broken lexicographically on the
// (sign-normalized) eigenvector components so degenerate inputs come out
// deterministic.
bool precedes(const EigenPair& a, const EigenPair& b) {
  if (std::abs(a.value - b.value) >= kEigenTieTol) return a.value > b.value;
  return lex_greater(a.vec, b.vec);
}

double det3(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

SymTensor3 SymTensor3::component_min(const SymTensor3& a, const SymTensor3& b) {
  return {std::min(a.xx, b.xx), std::min(a.yy, b.yy), std::min(a.zz, b.zz),
          std::min(a.xy, b.xy), std::min(a.xz, b.xz), std::min(a.yz, b.yz)};
}

SymTensor3 SymTensor3::component_max(const SymTensor3& a, const SymTensor3& b) {
  return {std::max(a.xx, b.xx), std::max(a.yy, b.yy), std::max(a.zz, b.zz),
          std::max(a.xy, b.xy), std::max(a.xz, b.xz), std::max(a.yz, b.yz)};
}

double max_abs_diff(const SymTensor3& a, const SymTensor3& b) {
  const SymTensor3 d = a - b;
  double m = 0.0;
  for (double c : {d.xx, d.yy, d.zz, d.xy, d.xz, d.yz}) m = std::max(m, std::abs(c));
  return m;
}

double tke(const SymTensor3& r) { return 0.5 * r.trace(); }

AnisotropyTensor anisotropy(const SymTensor3& r) {
  const double k = tke(r);
  if (!(k > kTkeFloor)) {
    throw DegenerateTke("anisotropy: tke below floor, cannot normalize");
  }
  const double inv = 1.0 / (2.0 * k);
  constexpr double third = 1.0 / 3.0;
  return {{r.xx * inv - third, r.yy * inv - third, r.zz * inv - third,
           r.xy * inv, r.xz * inv, r.yz * inv}};
}

EigenDecomp eig_sym3(const SymTensor3& a) {
  Mat3 m = a.matrix();
  Mat3 v = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  bool converged = off_diagonal_norm(m) < kOffDiagTol;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    jacobi_rotate(m, v, 0, 1);
    jacobi_rotate(m, v, 0, 2);
    jacobi_rotate(m, v, 1, 2);
    converged = off_diagonal_norm(m) < kOffDiagTol;
  }
  if (!converged) {
    throw NoConvergence("eig_sym3: Jacobi sweeps exhausted (non-finite input?)");
  }

  std::array<EigenPair, 3> pairs;
  for (int c = 0; c < 3; ++c) {
    pairs[c] = {m[c][c], {v[0][c], v[1][c], v[2][c]}};
    normalize_sign(pairs[c]);
  }
  // 3-element sorting network keeps the tie-break comparator exact
  if (!precedes(pairs[0], pairs[1])) std::swap(pairs[0], pairs[1]);
  if (!precedes(pairs[1], pairs[2])) std::swap(pairs[1], pairs[2]);
  if (!precedes(pairs[0], pairs[1])) std::swap(pairs[0], pairs[1]);

  EigenDecomp d;
  for (int c = 0; c < 3; ++c) {
    d.eigenvalues[c] = pairs[c].value;
    for (int r = 0; r < 3; ++r) d.vectors[r][c] = pairs[c].vec[r];
  }
  if (det3(d.vectors) < 0.0) {
    for (int r = 0; r < 3; ++r) d.vectors[r][2] = -d.vectors[r][2];
  }
  return d;
}

SymTensor3 reconstruct(double k, const EigenDecomp& d) {
  if (!(k >= 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("reconstruct: tke must be finite and non-negative");
  }
  constexpr double third = 1.0 / 3.0;
  for (double l : d.eigenvalues) {
    if (l < -third - kTolPsd || l > 2.0 * third + kTolPsd) {
      throw NonRealizableEigenvalues("reconstruct: anisotropy eigenvalue outside [-1/3, 2/3]");
    }
  }

  // S = sum_n lambda_n v_n v_n^T, computed on the upper triangle
  double s[3][3] = {};
  for (int n = 0; n < 3; ++n) {
    const Vec3 vn = d.column(n);
    const double l = d.eigenvalues[n];
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        s[i][j] += l * vn[i] * vn[j];
      }
    }
  }
  const double f = 2.0 * k;
  return {f * (s[0][0] + third), f * (s[1][1] + third), f * (s[2][2] + third),
          f * s[0][1], f * s[0][2], f * s[1][2]};
}

BarycentricPoint barycentric(const Vec3& lambda) {
  return {lambda[0] - lambda[1], 2.0 * (lambda[1] - lambda[2]), 3.0 * lambda[2] + 1.0};
}

Vec3 from_barycentric(const BarycentricPoint& p) {
  constexpr double tol = 1e-9;
  if (p.c1 < -tol || p.c2 < -tol || p.c3 < -tol ||
      std::abs(p.c1 + p.c2 + p.c3 - 1.0) > tol) {
    throw InvalidBarycentric("from_barycentric: weights must be non-negative and sum to 1");
  }
  const double l3 = (p.c3 - 1.0) / 3.0;
  const double l2 = l3 + p.c2 / 2.0;
  const double l1 = l2 + p.c1;
  return {l1, l2, l3};
}

bool is_realizable(const SymTensor3& r, double tol) {
  if (!r.finite()) return false;
  const EigenDecomp d = eig_sym3(r);
  return d.eigenvalues[2] >= -tol;
}

}  // namespace turbuq
