#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "turbuq/tensor.hpp"

using namespace turbuq;
using namespace turbuq::testing;

TEST_SUITE("tensor") {

TEST_CASE("tke of reference tensors") {
  CHECK(tke(SymTensor3::isotropic(1.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(tke(SymTensor3{}) == 0.0);
  // trace/2 by hand: (1.0 + 0.6 + 0.4)/2
  CHECK(tke(SymTensor3::diag(1.0, 0.6, 0.4)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("tke is linear in its argument") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const SymTensor3 r = random_symmetric(rng);
    const double alpha = rng.uniform(-3.0, 3.0);
    CHECK(tke(alpha * r) == doctest::Approx(alpha * tke(r)).epsilon(1e-12));
  }
}

TEST_CASE("anisotropy of isotropic stress vanishes") {
  const AnisotropyTensor b = anisotropy(SymTensor3::isotropic(1.0));
  CHECK(max_abs_diff(b.t, SymTensor3{}) < 1e-15);
}

TEST_CASE("anisotropy of the one-component limit") {
  const AnisotropyTensor b = anisotropy(SymTensor3::diag(2.0, 0.0, 0.0));
  CHECK(max_abs_diff(b.t, SymTensor3::diag(2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0)) < 1e-15);
}

TEST_CASE("anisotropy formula applied by hand") {
  // R = diag(1.0, 0.6, 0.4), k = 1: b = R/2 - I/3 = diag(1/6, -1/30, -2/15)
  const AnisotropyTensor b = anisotropy(SymTensor3::diag(1.0, 0.6, 0.4));
  CHECK(b.t.xx == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(b.t.yy == doctest::Approx(-1.0 / 30.0).epsilon(1e-13));
  CHECK(b.t.zz == doctest::Approx(-2.0 / 15.0).epsilon(1e-13));
  CHECK(std::abs(b.t.trace()) < 1e-12);
}

TEST_CASE("anisotropy rejects degenerate tke") {
  CHECK_THROWS_AS(anisotropy(SymTensor3{}), DegenerateTke);
  CHECK_THROWS_AS(anisotropy(SymTensor3::isotropic(1e-13)), DegenerateTke);
}

TEST_CASE("anisotropy round trip through reconstruct") {
  Rng rng(17);
  for (int i = 0; i < 200; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    const double k = tke(r);
    const AnisotropyTensor b = anisotropy(r);
    const EigenDecomp d = eig_sym3(b.t);
    const SymTensor3 rebuilt = reconstruct(k, d);
    CHECK(max_abs_diff(anisotropy(rebuilt).t, b.t) < 1e-10);
  }
}

TEST_CASE("eig_sym3 on a diagonal tensor") {
  const EigenDecomp d = eig_sym3(SymTensor3::diag(3.0, 1.0, 2.0));
  CHECK(d.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(d.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d.eigenvalues[2] == doctest::Approx(1.0).epsilon(1e-14));
  // columns are signed axis vectors
  for (int c = 0; c < 3; ++c) {
    const Vec3 v = d.column(c);
    int nonzero = 0;
    for (double e : v) {
      if (std::abs(std::abs(e) - 1.0) < 1e-14) ++nonzero;
      else CHECK(std::abs(e) < 1e-14);
    }
    CHECK(nonzero == 1);
  }
  CHECK(orthonormality_defect(d.vectors) < 1e-14);
  CHECK(det3x3(d.vectors) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eig_sym3 of the zero tensor is the identity frame") {
  const EigenDecomp d = eig_sym3(SymTensor3{});
  for (int i = 0; i < 3; ++i) {
    CHECK(d.eigenvalues[i] == 0.0);
    for (int j = 0; j < 3; ++j) {
      CHECK(d.vectors[i][j] == (i == j ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("eig_sym3 residual oracle on random symmetric tensors") {
  Rng rng(23);
  for (int i = 0; i < 500; ++i) {
    const SymTensor3 a = random_symmetric(rng);
    const EigenDecomp d = eig_sym3(a);
    CHECK(eigen_residual(a, d) < 1e-9);
    CHECK(orthonormality_defect(d.vectors) < 1e-10);
    CHECK(d.eigenvalues[0] >= d.eigenvalues[1]);
    CHECK(d.eigenvalues[1] >= d.eigenvalues[2]);
    CHECK(det3x3(d.vectors) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("eig_sym3 reconstructs its input") {
  Rng rng(29);
  for (int i = 0; i < 200; ++i) {
    const SymTensor3 a = random_symmetric(rng);
    const EigenDecomp d = eig_sym3(a);
    // V diag(l) V^T from raw components
    SymTensor3 rebuilt{};
    double s[3][3] = {};
    for (int n = 0; n < 3; ++n) {
      const Vec3 v = d.column(n);
      for (int r = 0; r < 3; ++r) {
        for (int c = r; c < 3; ++c) s[r][c] += d.eigenvalues[n] * v[r] * v[c];
      }
    }
    rebuilt = {s[0][0], s[1][1], s[2][2], s[0][1], s[0][2], s[1][2]};
    CHECK(max_abs_diff(rebuilt, a) < 1e-10);
  }
}

TEST_CASE("eig_sym3 is deterministic for degenerate spectra") {
  const SymTensor3 axi = SymTensor3::diag(0.5, 0.5, -1.0);
  const EigenDecomp d1 = eig_sym3(axi);
  const EigenDecomp d2 = eig_sym3(axi);
  for (int i = 0; i < 3; ++i) {
    CHECK(d1.eigenvalues[i] == d2.eigenvalues[i]);
    for (int j = 0; j < 3; ++j) CHECK(d1.vectors[i][j] == d2.vectors[i][j]);
  }
  CHECK(det3x3(d1.vectors) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eig_sym3 signals non-finite input") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(eig_sym3(SymTensor3{nan, 1.0, 1.0, 0.2, 0.0, 0.1}), NoConvergence);
}

TEST_CASE("reconstruct reference values") {
  EigenDecomp iso;
  iso.eigenvalues = {0.0, 0.0, 0.0};
  iso.vectors = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  CHECK(max_abs_diff(reconstruct(1.0, iso), SymTensor3::isotropic(1.0)) < 1e-15);

  EigenDecomp onec = iso;
  onec.eigenvalues = {2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0};
  CHECK(max_abs_diff(reconstruct(1.0, onec), SymTensor3::diag(2.0, 0.0, 0.0)) < 1e-14);
}

TEST_CASE("reconstruct validates its inputs") {
  EigenDecomp d;
  d.vectors = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  d.eigenvalues = {0.8, -0.4, -0.4};
  CHECK_THROWS_AS(reconstruct(1.0, d), NonRealizableEigenvalues);
  d.eigenvalues = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(reconstruct(-1.0, d), std::invalid_argument);
}

TEST_CASE("decompose-reconstruct round trip on random PSD tensors") {
  Rng rng(31);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    const double k = tke(r);
    const EigenDecomp d = eig_sym3(anisotropy(r).t);
    worst = std::max(worst, max_abs_diff(reconstruct(k, d), r));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("reconstructed tensors satisfy the tke contract") {
  Rng rng(37);
  for (int i = 0; i < 200; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    const double k = tke(r);
    const SymTensor3 rebuilt = reconstruct(k, eig_sym3(anisotropy(r).t));
    CHECK(std::abs(tke(rebuilt) - k) < 1e-12 * std::max(1.0, k));
    CHECK(is_realizable(rebuilt));
  }
}

TEST_CASE("barycentric corner coordinates") {
  const BarycentricPoint iso = barycentric({0.0, 0.0, 0.0});
  CHECK(iso.c1 == 0.0);
  CHECK(iso.c2 == 0.0);
  CHECK(iso.c3 == 1.0);

  const BarycentricPoint onec = barycentric({2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0});
  CHECK(onec.c1 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(onec.c2) < 1e-15);
  CHECK(std::abs(onec.c3) < 1e-15);

  const BarycentricPoint twoc = barycentric({1.0 / 6.0, 1.0 / 6.0, -1.0 / 3.0});
  CHECK(std::abs(twoc.c1) < 1e-15);
  CHECK(twoc.c2 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(twoc.c3) < 1e-15);
}

TEST_CASE("barycentric weights sum to one for traceless triples") {
  Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    const EigenDecomp d = eig_sym3(anisotropy(r).t);
    const BarycentricPoint p = barycentric(d.eigenvalues);
    CHECK(std::abs(p.c1 + p.c2 + p.c3 - 1.0) < 1e-12);
    CHECK(p.c1 > -1e-12);
    CHECK(p.c2 > -1e-12);
    CHECK(p.c3 > -1e-12);
  }
}

TEST_CASE("from_barycentric corner landings") {
  const Vec3 onec = from_barycentric({1.0, 0.0, 0.0});
  CHECK(onec[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(onec[1] == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(onec[2] == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));

  const Vec3 iso = from_barycentric({0.0, 0.0, 1.0});
  for (double l : iso) CHECK(std::abs(l) < 1e-15);
}

TEST_CASE("barycentric round trips") {
  const Vec3 lambda = from_barycentric({0.2, 0.3, 0.5});
  const BarycentricPoint back = barycentric(lambda);
  CHECK(std::abs(back.c1 - 0.2) < 1e-12);
  CHECK(std::abs(back.c2 - 0.3) < 1e-12);
  CHECK(std::abs(back.c3 - 0.5) < 1e-12);

  Rng rng(43);
  for (int i = 0; i < 200; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    const EigenDecomp d = eig_sym3(anisotropy(r).t);
    const Vec3 again = from_barycentric(barycentric(d.eigenvalues));
    for (int c = 0; c < 3; ++c) CHECK(std::abs(again[c] - d.eigenvalues[c]) < 1e-12);
  }
}

TEST_CASE("from_barycentric rejects invalid weights") {
  CHECK_THROWS_AS(from_barycentric({-0.1, 0.6, 0.5}), InvalidBarycentric);
  CHECK_THROWS_AS(from_barycentric({0.5, 0.2, 0.2}), InvalidBarycentric);
}

TEST_CASE("is_realizable classification") {
  CHECK(is_realizable(SymTensor3::diag(1.0, 1.0, 1.0)));
  CHECK_FALSE(is_realizable(SymTensor3::diag(1.0, 1.0, -0.5)));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(is_realizable(SymTensor3{nan, 0, 0, 0, 0, 0}));
}

TEST_CASE("realizable anisotropy eigenvalues stay in [-1/3, 2/3]") {
  Rng rng(47);
  for (int i = 0; i < 500; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    const EigenDecomp d = eig_sym3(anisotropy(r).t);
    for (double l : d.eigenvalues) {
      CHECK(l >= -1.0 / 3.0 - 1e-10);
      CHECK(l <= 2.0 / 3.0 + 1e-10);
    }
  }
}

}  // TEST_SUITE
