#include <doctest.h>

#include <cmath>
#include <vector>

#include "test_support.hpp"
#include "turbuq/epm.hpp"

using namespace turbuq;
using namespace turbuq::testing;

namespace {

const std::array<LimitingState, 3> kCorners{LimitingState::OneComponent,
                                            LimitingState::TwoComponent,
                                            LimitingState::ThreeComponent};

}  // namespace

TEST_SUITE("epm") {

TEST_CASE("eigenvalue perturbation lands on corners at delta_b = 1") {
  const Vec3 onec = perturb_eigenvalues({0.0, 0.0, 0.0}, LimitingState::OneComponent, 1.0);
  CHECK(onec[0] == 2.0 / 3.0);
  CHECK(onec[1] == -1.0 / 3.0);
  CHECK(onec[2] == -1.0 / 3.0);
}

TEST_CASE("eigenvalue perturbation is the identity at delta_b = 0") {
  const Vec3 lambda{0.2, 0.0, -0.2};
  for (LimitingState target : kCorners) {
    const Vec3 out = perturb_eigenvalues(lambda, target, 0.0);
    CHECK(out[0] == lambda[0]);
    CHECK(out[1] == lambda[1]);
    CHECK(out[2] == lambda[2]);
  }
}

TEST_CASE("eigenvalue perturbation midpoint agrees with the barycentric oracle") {
  // isotropic start p = (0,0,1), halfway to the 1C corner: p* = (0.5, 0, 0.5)
  const Vec3 expected = from_barycentric({0.5, 0.0, 0.5});
  const Vec3 out = perturb_eigenvalues({0.0, 0.0, 0.0}, LimitingState::OneComponent, 0.5);
  for (int i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(expected[i]).epsilon(1e-14));
  // which evaluates to (1/3, -1/6, -1/6)
  CHECK(out[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(out[1] == doctest::Approx(-1.0 / 6.0).epsilon(1e-13));
  CHECK(out[2] == doctest::Approx(-1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("eigenvalue perturbation rejects out-of-range delta_b") {
  CHECK_THROWS_AS(perturb_eigenvalues({0, 0, 0}, LimitingState::OneComponent, 1.5), InvalidDelta);
  CHECK_THROWS_AS(perturb_eigenvalues({0, 0, 0}, LimitingState::OneComponent, -0.1), InvalidDelta);
}

TEST_CASE("perturbed eigenvalues stay ordered and realizable") {
  Rng rng(53);
  for (int i = 0; i < 200; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    const EigenDecomp d = eig_sym3(anisotropy(r).t);
    for (LimitingState target : kCorners) {
      const Vec3 out = perturb_eigenvalues(d.eigenvalues, target, rng.uniform(0.0, 1.0));
      CHECK(out[0] >= out[1]);
      CHECK(out[1] >= out[2]);
      CHECK(out[2] >= -1.0 / 3.0 - 1e-12);
      CHECK(out[0] <= 2.0 / 3.0 + 1e-12);
    }
  }
}

TEST_CASE("eigenvector modes") {
  const Mat3 identity{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  const Mat3 kept = perturb_eigenvectors(identity, EigenvectorMode::Keep);
  CHECK(kept == identity);

  // e1 <-> e3 with the new third column negated: (e3, e2, -e1)
  const Mat3 swapped = perturb_eigenvectors(identity, EigenvectorMode::SwapExtremes);
  const Mat3 expected{{{0, 0, -1}, {0, 1, 0}, {1, 0, 0}}};
  CHECK(swapped == expected);
  CHECK(det3x3(swapped) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("swap-extremes preserves orthonormality and handedness") {
  Rng rng(59);
  for (int i = 0; i < 100; ++i) {
    const Mat3 v = random_orthonormal(rng);
    const Mat3 out = perturb_eigenvectors(v, EigenvectorMode::SwapExtremes);
    CHECK(orthonormality_defect(out) < 1e-12);
    CHECK(det3x3(out) == doctest::Approx(det3x3(v)).epsilon(1e-10));
  }
}

TEST_CASE("apply_perturbation corner cases on the isotropic stress") {
  const SymTensor3 iso = SymTensor3::isotropic(1.0);

  PerturbationSpec to3c{LimitingState::ThreeComponent, 1.0, 1.0, EigenvectorMode::Keep};
  CHECK(max_abs_diff(apply_perturbation(iso, to3c), iso) < 1e-14);

  PerturbationSpec to1c{LimitingState::OneComponent, 1.0, 1.0, EigenvectorMode::Keep};
  CHECK(max_abs_diff(apply_perturbation(iso, to1c), SymTensor3::diag(2.0, 0.0, 0.0)) < 1e-14);
}

TEST_CASE("apply_perturbation identity round trip") {
  Rng rng(61);
  for (int i = 0; i < 200; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    const PerturbationSpec noop{LimitingState::OneComponent, 0.0, 1.0, EigenvectorMode::Keep};
    CHECK(max_abs_diff(apply_perturbation(r, noop), r) < 1e-10);
  }
}

TEST_CASE("apply_perturbation preserves realizability across the sweep") {
  Rng rng(67);
  for (int i = 0; i < 100; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    for (LimitingState target : kCorners) {
      for (double delta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        for (EigenvectorMode mode : {EigenvectorMode::Keep, EigenvectorMode::SwapExtremes}) {
          const SymTensor3 out = apply_perturbation(r, {target, delta, 1.0, mode});
          CHECK(is_realizable(out));
        }
      }
    }
  }
}

TEST_CASE("apply_perturbation scales tke by the amplitude factor") {
  Rng rng(71);
  for (int i = 0; i < 100; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    const double factor = rng.uniform(0.1, 3.0);
    const LimitingState target = kCorners[rng.below(3)];
    const EigenvectorMode mode =
        rng.below(2) == 0 ? EigenvectorMode::Keep : EigenvectorMode::SwapExtremes;
    const SymTensor3 out = apply_perturbation(r, {target, rng.uniform(0.0, 1.0), factor, mode});
    CHECK(std::abs(tke(out) - factor * tke(r)) < 1e-12 * std::max(1.0, factor * tke(r)));
  }
}

TEST_CASE("corner landing in barycentric coordinates") {
  Rng rng(73);
  for (int i = 0; i < 50; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    for (LimitingState target : kCorners) {
      const SymTensor3 out = apply_perturbation(r, {target, 1.0, 1.0, EigenvectorMode::Keep});
      const EigenDecomp d = eig_sym3(anisotropy(out).t);
      const BarycentricPoint p = barycentric(d.eigenvalues);
      const BarycentricPoint c = corner_point(target);
      CHECK(std::abs(p.c1 - c.c1) < 1e-12);
      CHECK(std::abs(p.c2 - c.c2) < 1e-12);
      CHECK(std::abs(p.c3 - c.c3) < 1e-12);
    }
  }
}

TEST_CASE("apply_perturbation propagates DegenerateTke") {
  const PerturbationSpec spec{LimitingState::OneComponent, 0.5, 1.0, EigenvectorMode::Keep};
  CHECK_THROWS_AS(apply_perturbation(SymTensor3{}, spec), DegenerateTke);
}

TEST_CASE("envelope of the corner set around the isotropic stress") {
  // members at k = 1, V = I: baseline diag(2/3), 1C diag(2,0,0),
  // 2C diag(1,1,0), 3C diag(2/3); componentwise bounds follow directly
  const Envelope env = envelope(SymTensor3::isotropic(1.0), baseline_specs());
  CHECK(env.member_count == 4);
  CHECK(max_abs_diff(env.lower, SymTensor3::diag(2.0 / 3.0, 0.0, 0.0)) < 1e-14);
  CHECK(max_abs_diff(env.upper, SymTensor3::diag(2.0, 1.0, 2.0 / 3.0)) < 1e-14);
}

TEST_CASE("envelope of a no-op spec collapses to the input") {
  Rng rng(79);
  const SymTensor3 r = random_psd_tensor(rng);
  const std::vector<PerturbationSpec> noop{{LimitingState::OneComponent, 0.0, 1.0, EigenvectorMode::Keep}};
  const Envelope env = envelope(r, noop);
  CHECK(max_abs_diff(env.lower, env.upper) < 1e-10);
  CHECK(env.contains(r, 1e-10));
}

TEST_CASE("envelope width grows with delta_b") {
  Rng rng(83);
  for (int i = 0; i < 50; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    double prev_width = -1.0;
    for (double delta : {0.25, 0.5, 1.0}) {
      std::vector<PerturbationSpec> specs;
      for (LimitingState target : kCorners) {
        specs.push_back({target, delta, 1.0, EigenvectorMode::Keep});
      }
      const Envelope env = envelope(r, specs);
      const SymTensor3 w = env.width();
      double total = w.xx + w.yy + w.zz + w.xy + w.xz + w.yz;
      CHECK(total >= prev_width - 1e-12);
      prev_width = total;
    }
  }
}

TEST_CASE("envelopes nest when the spec set grows") {
  Rng rng(89);
  for (int i = 0; i < 50; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    std::vector<PerturbationSpec> small{{kCorners[rng.below(3)], rng.uniform(0.0, 1.0), 1.0,
                                         EigenvectorMode::Keep}};
    std::vector<PerturbationSpec> big = small;
    big.push_back({kCorners[rng.below(3)], rng.uniform(0.0, 1.0), rng.uniform(0.5, 2.0),
                   EigenvectorMode::SwapExtremes});
    const Envelope inner = envelope(r, small);
    const Envelope outer = envelope(r, big);
    CHECK(outer.contains(inner.lower, 1e-12));
    CHECK(outer.contains(inner.upper, 1e-12));
  }
}

TEST_CASE("envelope requires at least one spec") {
  CHECK_THROWS_AS(envelope(SymTensor3::isotropic(1.0), {}), EmptySpecList);
}

TEST_CASE("every baseline envelope member contains the generating tensor") {
  Rng rng(97);
  for (int i = 0; i < 100; ++i) {
    const SymTensor3 r = random_psd_tensor(rng);
    const Envelope env = envelope(r, baseline_specs());
    CHECK(env.contains(r, 1e-12));
    for (const PerturbationSpec& spec : baseline_specs()) {
      CHECK(env.contains(apply_perturbation(r, spec), 1e-12));
    }
  }
}

}  // TEST_SUITE
