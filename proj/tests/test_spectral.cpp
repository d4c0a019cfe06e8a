/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <cmath>
#include <numbers>

#include <catch2/catch_amalgamated.hpp>

#include "iondet/spectral.hpp"
#include "test_support.hpp"

using namespace iondet;

namespace {

/// true if eigenvector mu of a single-coupled-level Hamiltonian is the
/// decoupled ground-level one
bool is_ground_eigenvector(const EigenSystem& eig, int mu) {
  return std::abs(eig.components()(kIndexG, mu)) > 0.5;
}

} // namespace

TEST_CASE("continuum grid") {
  const auto grid = ContinuumGrid::uniform(5, -1.0, 1.0);
  CHECK(grid.spacing() == Catch::Approx(0.5));
  CHECK(grid.level_density() == Catch::Approx(2.0));
  CHECK(grid.energy(0) == Catch::Approx(-1.0));
  CHECK(grid.energy(4) == Catch::Approx(1.0));
  CHECK(grid.recurrence_time() ==
        Catch::Approx(2.0 * std::numbers::pi / 0.5));
  CHECK(grid.energies().size() == 5);

  CHECK_THROWS_AS(ContinuumGrid::uniform(2, -1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(ContinuumGrid::uniform(5, 1.0, -1.0), InvalidArgument);

  const auto centered = ContinuumGrid::centered(11, 2.0, 4.0);
  CHECK(centered.e_min == Catch::Approx(0.0));
  CHECK(centered.e_max == Catch::Approx(4.0));
}

TEST_CASE("golden rule rate") {
  const auto grid = ContinuumGrid::uniform(101, -5.0, 5.0);
  const double v = 0.05;
  CHECK(golden_rule_rate(grid, v) ==
        Catch::Approx(2.0 * std::numbers::pi * v * v / grid.spacing()));
  CHECK(golden_rule_rate(grid, coupling_for_rate(grid, 1.0)) ==
        Catch::Approx(1.0));
}

TEST_CASE("hamiltonian with zero couplings is diagonal") {
  const auto grid = ContinuumGrid::uniform(5, -1.0, 1.0);
  const DetectorSpec spec{0.7, -0.3, 0.0, 0.0, Zone::De, 1.0};
  const RMatrix h = build_hamiltonian(grid, spec);
  CHECK(h.rows() == 7);
  CHECK((h - RMatrix(h.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
  CHECK(h(kIndexE, kIndexE) == 0.7);
  CHECK(h(kIndexG, kIndexG) == -0.3);

  const auto eig = diagonalize(h);
  RVector expected(7);
  expected << 0.7, -0.3, -1.0, -0.5, 0.0, 0.5, 1.0;
  std::sort(expected.begin(), expected.end());
  CHECK((eig.eigenvalues() - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("single-coupled-level hamiltonian leaves g decoupled") {
  const auto grid = ContinuumGrid::uniform(9, -2.0, 2.0);
  const DetectorSpec spec{0.1, 0.0, 0.04, 0.0, Zone::De, 1.0};
  const RMatrix h = build_hamiltonian(grid, spec);
  CHECK(h.row(kIndexG).cwiseAbs().sum() == 0.0);
  CHECK(h.col(kIndexG).cwiseAbs().sum() == 0.0);
  CHECK(h(kIndexE, kFirstMode) == 0.04);
  CHECK(h(kIndexE, kIndexG) == 0.0);
}

TEST_CASE("two-coupled-level hamiltonian is symmetric with both rows set") {
  const auto grid = ContinuumGrid::uniform(3, -1.0, 1.0);
  const DetectorSpec spec{0.5, 0.0, 0.1, 0.05, Zone::De, 1.0};
  const RMatrix h = build_hamiltonian(grid, spec);
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (int k = 0; k < 3; ++k) {
    CHECK(h(kIndexE, kFirstMode + k) == 0.1);
    CHECK(h(kIndexG, kFirstMode + k) == 0.05);
  }
  CHECK(h(kIndexE, kIndexG) == 0.0);
}

TEST_CASE("two-by-two analytic eigenvalues") {
  RMatrix h(2, 2);
  h << 0.0, 0.3, 0.3, 0.0;
  const auto eig = diagonalize(h);
  CHECK(eig.eigenvalues()(0) == Catch::Approx(-0.3));
  CHECK(eig.eigenvalues()(1) == Catch::Approx(0.3));
}

TEST_CASE("diagonalization satisfies residual and orthonormality bounds") {
  SplitMix64 rng(99);
  RMatrix h(40, 40);
  for (int r = 0; r < 40; ++r)
    for (int c = 0; c <= r; ++c) {
      h(r, c) = iondet::testing::gaussian(rng);
      h(c, r) = h(r, c);
    }
  const auto eig = diagonalize(h);
  const double h_norm = h.cwiseAbs().maxCoeff();

  const RMatrix residual =
      h * eig.components() -
      eig.components() * eig.eigenvalues().asDiagonal();
  CHECK(residual.cwiseAbs().maxCoeff() < 1e-9 * h_norm);

  const RMatrix gram =
      eig.components().transpose() * eig.components();
  CHECK((gram - RMatrix::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-10);

  for (int mu = 1; mu < eig.size(); ++mu)
    CHECK(eig.eigenvalues()(mu) >= eig.eigenvalues()(mu - 1));
}

TEST_CASE("detection-zone eigensystem satisfies the residual bound") {
  const auto grid = ContinuumGrid::uniform(201, -2.0, 2.0);
  const DetectorSpec spec{0.3, 0.0, 0.03, 0.015, Zone::De, 1.0};
  const RMatrix h = build_hamiltonian(grid, spec);
  const auto eig = diagonalize(h);
  const RMatrix residual =
      h * eig.components() - eig.components() * eig.eigenvalues().asDiagonal();
  CHECK(residual.cwiseAbs().maxCoeff() < 1e-9 * h.cwiseAbs().maxCoeff());
  const RMatrix gram = eig.components().transpose() * eig.components();
  CHECK((gram - RMatrix::Identity(eig.size(), eig.size()))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("coupled-sector eigenvalues interlace the grid and satisfy the "
          "pole equation") {
  const auto grid = ContinuumGrid::uniform(501, -2.5, 2.5);
  const DetectorSpec spec{0.0, 5.0, 0.02, 0.0, Zone::De, 1.0};
  const auto eig = diagonalize(build_hamiltonian(grid, spec));

  std::vector<double> coupled;
  for (int mu = 0; mu < eig.size(); ++mu)
    if (!is_ground_eigenvector(eig, mu))
      coupled.push_back(eig.eigenvalues()(mu));
  REQUIRE(coupled.size() == static_cast<std::size_t>(grid.n_modes) + 1);

  // one eigenvalue strictly inside every grid interval
  for (int k = 0; k + 1 < grid.n_modes; ++k) {
    CHECK(coupled[k + 1] > grid.energy(k));
    CHECK(coupled[k + 1] < grid.energy(k + 1));
  }

  // each eigenvalue is a root of eps - eps_e - sum_k v^2/(eps - eps_k);
  // measure the Newton step, which is insensitive to the huge derivative
  // near the poles
  for (const double eps : coupled) {
    double f = eps - spec.eps_e;
    double fprime = 1.0;
    for (int k = 0; k < grid.n_modes; ++k) {
      const double delta = eps - grid.energy(k);
      f -= spec.coupling_e * spec.coupling_e / delta;
      fprime += spec.coupling_e * spec.coupling_e / (delta * delta);
    }
    CHECK(std::abs(f) / fprime < 1e-10);
  }
}

TEST_CASE("single-level coefficients in the decoupled limit") {
  const auto grid = ContinuumGrid::uniform(11, -1.0, 1.0);
  const DetectorSpec spec{0.0037, 5.0, 0.0, 0.0, Zone::De, 1.0};
  const auto c = stationary_coefficients_single(grid, spec, 0.0037);
  CHECK(c.amp_level == Catch::Approx(1.0));
  CHECK(c.amp_modes.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-level coefficients are normalized for any argument") {
  const auto grid = ContinuumGrid::uniform(101, -3.0, 3.0);
  const DetectorSpec spec{0.0, 5.0, 0.03, 0.0, Zone::De, 1.0};
  for (const double eps : {-3.3, -0.00234, 1.0411, 2.72, 4.1}) {
    const auto c = stationary_coefficients_single(grid, spec, eps);
    CHECK(c.amp_level * c.amp_level + c.amp_modes.squaredNorm() ==
          Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("single-level coefficients reproduce numerical eigenvectors") {
  const auto grid = ContinuumGrid::uniform(201, -2.0, 2.0);
  const DetectorSpec spec{0.05, 5.0, 0.02, 0.0, Zone::De, 1.0};
  const auto eig = diagonalize(build_hamiltonian(grid, spec));

  int checked = 0;
  for (int mu = 0; mu < eig.size(); ++mu) {
    if (is_ground_eigenvector(eig, mu)) {
      CHECK(eig.eigenvalues()(mu) == Catch::Approx(spec.eps_g));
      continue;
    }
    const auto c =
        stationary_coefficients_single(grid, spec, eig.eigenvalues()(mu));
    RVector numeric = eig.components().col(mu);
    if (numeric(kIndexE) < 0)
      numeric = -numeric;
    double dev = std::abs(numeric(kIndexE) - c.amp_level);
    dev = std::max(dev, std::abs(numeric(kIndexG)));
    for (int k = 0; k < grid.n_modes; ++k)
      dev = std::max(dev,
                     std::abs(numeric(kFirstMode + k) - c.amp_modes(k)));
    CHECK(dev < 1e-8);
    ++checked;
  }
  CHECK(checked == grid.n_modes + 1);
}

TEST_CASE("single-level coefficients reject poles and misuse") {
  const auto grid = ContinuumGrid::uniform(11, -1.0, 1.0);
  const DetectorSpec spec{0.0, 5.0, 0.05, 0.0, Zone::De, 1.0};
  CHECK_THROWS_AS(stationary_coefficients_single(grid, spec, grid.energy(3)),
                  PoleCollision);
  const DetectorSpec both{0.0, 5.0, 0.05, 0.01, Zone::De, 1.0};
  CHECK_THROWS_AS(stationary_coefficients_single(grid, both, 0.33),
                  InvalidArgument);
}

TEST_CASE("two-level coefficients reproduce numerical eigenvectors") {
  const auto grid = ContinuumGrid::uniform(201, -2.0, 2.0);
  const DetectorSpec spec{0.5, 0.0, 0.02, 0.008, Zone::De, 1.0};
  const auto eig = diagonalize(build_hamiltonian(grid, spec));

  for (int mu = 0; mu < eig.size(); ++mu) {
    const auto c =
        stationary_coefficients_double(grid, spec, eig.eigenvalues()(mu));
    RVector numeric = eig.components().col(mu);
    if (numeric(kIndexG) < 0)
      numeric = -numeric;
    double dev = std::abs(numeric(kIndexG) - c.amp_g);
    dev = std::max(dev, std::abs(numeric(kIndexE) - c.amp_e));
    for (int k = 0; k < grid.n_modes; ++k)
      dev = std::max(dev,
                     std::abs(numeric(kFirstMode + k) - c.amp_modes(k)));
    CHECK(dev < 1e-8);
    CHECK(c.amp_g >= 0.0);
  }
}

TEST_CASE("two-level coefficients: structure of the e component") {
  const auto grid = ContinuumGrid::uniform(101, -2.0, 2.0);

  // zero excited coupling removes the e component entirely
  const DetectorSpec no_e{0.5, 0.0, 0.0, 0.01, Zone::De, 1.0};
  const auto eig = diagonalize(build_hamiltonian(grid, no_e));
  for (int mu = 0; mu < eig.size(); ++mu) {
    const double eps = eig.eigenvalues()(mu);
    if (std::abs(eps - no_e.eps_e) < 1e-9)
      continue; // the decoupled excited level itself
    const auto c = stationary_coefficients_double(grid, no_e, eps);
    CHECK(c.amp_e == 0.0);
  }

  // the e component is proportional to the eigenvalue, so the eigenvector
  // closest to zero energy has almost no excited-level content
  const DetectorSpec spec{0.5, 0.0, 0.02, 0.01, Zone::De, 1.0};
  const auto eig2 = diagonalize(build_hamiltonian(grid, spec));
  double eps_near_zero = 1e9;
  for (int mu = 0; mu < eig2.size(); ++mu)
    if (std::abs(eig2.eigenvalues()(mu)) < std::abs(eps_near_zero))
      eps_near_zero = eig2.eigenvalues()(mu);
  REQUIRE(std::abs(eps_near_zero) < grid.spacing());
  const auto c = stationary_coefficients_double(grid, spec, eps_near_zero);
  CHECK(std::abs(c.amp_e) < 10.0 * std::abs(eps_near_zero) *
                                spec.coupling_e / spec.coupling_g);
}

TEST_CASE("two-level coefficients reject misuse") {
  const auto grid = ContinuumGrid::uniform(11, -1.0, 1.0);
  const DetectorSpec no_g{0.5, 0.0, 0.02, 0.0, Zone::De, 1.0};
  CHECK_THROWS_AS(stationary_coefficients_double(grid, no_g, 0.33),
                  ZeroCoupling);
  const DetectorSpec shifted{0.5, 0.1, 0.02, 0.01, Zone::De, 1.0};
  CHECK_THROWS_AS(stationary_coefficients_double(grid, shifted, 0.33),
                  InvalidArgument);
  const DetectorSpec spec{0.5, 0.0, 0.02, 0.01, Zone::De, 1.0};
  CHECK_THROWS_AS(stationary_coefficients_double(grid, spec, spec.eps_e),
                  PoleCollision);
  CHECK_THROWS_AS(stationary_coefficients_double(grid, spec, grid.energy(0)),
                  PoleCollision);
}

TEST_CASE("evolution at t = 0 is the identity") {
  const auto grid = ContinuumGrid::uniform(21, -1.0, 1.0);
  const DetectorSpec spec{0.0, -0.2, 0.05, 0.02, Zone::De, 1.0};
  const auto eig = diagonalize(build_hamiltonian(grid, spec));

  SplitMix64 rng(5);
  const CVector x = iondet::testing::random_complex(rng, eig.size(), 1);
  CHECK((evolve(eig, x, 0.0) - x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("eigenstates only pick up phases") {
  const auto grid = ContinuumGrid::uniform(21, -1.0, 1.0);
  const DetectorSpec spec{0.0, -0.2, 0.05, 0.0, Zone::De, 1.0};
  const auto eig = diagonalize(build_hamiltonian(grid, spec));

  const int mu = 7;
  const CVector x = eig.components().col(mu).cast<complexd>();
  const double t = 2.31;
  const CVector y = evolve(eig, x, t);
  const complexd phase(std::cos(-eig.eigenvalues()(mu) * t),
                       std::sin(-eig.eigenvalues()(mu) * t));
  CHECK((y - phase * x).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(y.norm() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("evolution is unitary and composes additively") {
  const auto grid = ContinuumGrid::uniform(31, -2.0, 2.0);
  const DetectorSpec spec{0.3, 0.0, 0.04, 0.02, Zone::De, 1.0};
  const auto eig = diagonalize(build_hamiltonian(grid, spec));

  SplitMix64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    CVector x = iondet::testing::random_complex(rng, eig.size(), 1);
    x /= x.norm();
    const double t1 = 3.0 * rng.next_double();
    const double t2 = 3.0 * rng.next_double();
    CHECK(evolve(eig, x, t1).norm() == Catch::Approx(1.0).margin(1e-10));
    const CVector split = evolve(eig, evolve(eig, x, t1), t2);
    const CVector direct = evolve(eig, x, t1 + t2);
    CHECK((split - direct).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("survival amplitude matches the full propagation") {
  const auto grid = ContinuumGrid::uniform(51, -2.0, 2.0);
  const DetectorSpec spec{0.0, 5.0, 0.05, 0.0, Zone::De, 1.0};
  const auto eig = diagonalize(build_hamiltonian(grid, spec));

  CVector bare = CVector::Zero(eig.size());
  bare(kIndexE) = 1.0;
  for (const double t : {0.0, 0.7, 2.9}) {
    const CVector evolved = evolve(eig, bare, t);
    CHECK(std::abs(survival_amplitude(eig, kIndexE, t) - evolved(kIndexE)) <
          1e-12);
  }
}

TEST_CASE("golden-rule decay holds at the percent level") {
  // spacing well below the rate, bandwidth well above it
  const int n = 1001;
  const double rate = 1.0;
  const auto g = ContinuumGrid::centered(n, 0.0, 400.0 * rate);
  const double v = coupling_for_rate(g, rate);
  const DetectorSpec spec{0.0, 0.0, v, 0.0, Zone::De, 1.0};
  const auto eig = diagonalize(build_hamiltonian(g, spec));

  REQUIRE(0.5 * g.recurrence_time() > 3.0);
  double worst = 0.0;
  for (int i = 1; i <= 60; ++i) {
    const double t = 3.0 * i / 60.0;
    const double survival = std::norm(survival_amplitude(eig, kIndexE, t));
    const double exact = std::exp(-rate * t);
    worst = std::max(worst, std::abs(survival - exact) / exact);
  }
  CHECK(worst < 0.01);
}
