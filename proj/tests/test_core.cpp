/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <catch2/catch_amalgamated.hpp>

#include "iondet/core.hpp"
#include "test_support.hpp"

using namespace iondet;
using iondet::testing::max_abs;

namespace {

CMatrix projector(Eigen::Index dim, Eigen::Index i) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(i, i) = 1.0;
  return m;
}

} // namespace

TEST_CASE("pure excited state with vacuum cavity") {
  const auto state = AtomCavityState::make(projector(2, 0),
                                           CMatrix::Zero(2, 2),
                                           CMatrix::Zero(2, 2));
  CHECK(state.trace() == Catch::Approx(1.0).margin(1e-15));
  const auto tr = trace_cavity(state);
  CHECK(tr.p_ee == Catch::Approx(1.0).margin(1e-15));
  CHECK(tr.p_gg == Catch::Approx(0.0).margin(1e-15));
  CHECK(std::abs(tr.c_eg) < 1e-15);
  CHECK(max_abs(trace_atom(state) - projector(2, 0)) < 1e-15);
}

TEST_CASE("entangled pair state blocks and traces") {
  const auto state = entangled_pair_state();
  CHECK(state.rho_ee()(0, 0).real() == Catch::Approx(0.5));
  CHECK(state.rho_eg()(0, 1).real() == Catch::Approx(0.5));
  CHECK(state.rho_gg()(1, 1).real() == Catch::Approx(0.5));
  CHECK(state.rho_ge()(1, 0).real() == Catch::Approx(0.5));

  const auto tr = trace_cavity(state);
  CHECK(tr.p_ee == Catch::Approx(0.5));
  CHECK(tr.p_gg == Catch::Approx(0.5));
  // the cavity parts of the two branches are orthogonal
  CHECK(std::abs(tr.c_eg) < 1e-15);

  CMatrix expected = CMatrix::Zero(2, 2);
  expected(0, 0) = 0.5;
  expected(1, 1) = 0.5;
  CHECK(max_abs(trace_atom(state) - expected) < 1e-15);
}

TEST_CASE("fig1-style diagonal populations") {
  CMatrix ee = 0.01 * CMatrix::Identity(2, 2) / 2.0;
  CMatrix gg = 0.99 * CMatrix::Identity(2, 2) / 2.0;
  const auto state = AtomCavityState::make(ee, CMatrix::Zero(2, 2), gg);
  const auto tr = trace_cavity(state);
  CHECK(tr.p_ee == Catch::Approx(0.01));
  CHECK(tr.p_gg == Catch::Approx(0.99));
  CHECK(std::abs(tr.c_eg) < 1e-15);
}

TEST_CASE("off-diagonal-only block is rejected") {
  CHECK_THROWS_AS(AtomCavityState::make(CMatrix::Zero(2, 2), projector(2, 0),
                                        CMatrix::Zero(2, 2)),
                  NotPositive);
}

TEST_CASE("coherence exceeding the populations is rejected") {
  CMatrix ee = 0.5 * projector(2, 0);
  CMatrix gg = 0.5 * projector(2, 1);
  CMatrix eg = CMatrix::Zero(2, 2);
  eg(0, 1) = 0.9; // needs |eg| <= 0.5 for positivity
  CHECK_THROWS_AS(AtomCavityState::make(ee, eg, gg), NotPositive);
}

TEST_CASE("dimension mismatches are rejected") {
  CHECK_THROWS_AS(AtomCavityState::make(CMatrix::Zero(2, 2),
                                        CMatrix::Zero(3, 3),
                                        CMatrix::Zero(2, 2)),
                  DimensionMismatch);
  CHECK_THROWS_AS(AtomCavityState::make(CMatrix::Zero(2, 3),
                                        CMatrix::Zero(2, 3),
                                        CMatrix::Zero(2, 3)),
                  DimensionMismatch);
}

TEST_CASE("normalization") {
  CMatrix ee = 0.5 * projector(2, 0);
  const auto subnormalized =
      AtomCavityState::make(ee, CMatrix::Zero(2, 2), CMatrix::Zero(2, 2));
  CHECK(subnormalized.trace() == Catch::Approx(0.5));
  CHECK_FALSE(subnormalized.is_normalized());

  const auto normalized = AtomCavityState::make(ee, CMatrix::Zero(2, 2),
                                                CMatrix::Zero(2, 2), true);
  CHECK(normalized.trace() == Catch::Approx(1.0).margin(1e-14));
  CHECK(normalized.is_normalized());

  CHECK_THROWS_AS(AtomCavityState::make(CMatrix::Zero(2, 2),
                                        CMatrix::Zero(2, 2),
                                        CMatrix::Zero(2, 2), true),
                  ZeroTrace);
}

TEST_CASE("partial traces are linear and consistent") {
  SplitMix64 rng(20260811);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = iondet::testing::random_state(rng, 3);
    const auto b = iondet::testing::random_state(rng, 3);
    const double alpha = rng.next_double();
    const double beta = rng.next_double();

    const auto mixed = AtomCavityState::make(
        alpha * a.rho_ee() + beta * b.rho_ee(),
        alpha * a.rho_eg() + beta * b.rho_eg(),
        alpha * a.rho_gg() + beta * b.rho_gg());

    const auto tr_a = trace_cavity(a);
    const auto tr_b = trace_cavity(b);
    const auto tr_m = trace_cavity(mixed);
    CHECK(tr_m.p_ee ==
          Catch::Approx(alpha * tr_a.p_ee + beta * tr_b.p_ee).margin(1e-12));
    CHECK(tr_m.p_gg ==
          Catch::Approx(alpha * tr_a.p_gg + beta * tr_b.p_gg).margin(1e-12));
    CHECK(std::abs(tr_m.c_eg - (alpha * tr_a.c_eg + beta * tr_b.c_eg)) <
          1e-12);

    CHECK(max_abs(trace_atom(mixed) -
                  (alpha * trace_atom(a) + beta * trace_atom(b))) < 1e-12);

    // the two reduction orders agree on the total trace
    CHECK(trace_atom(mixed).trace().real() ==
          Catch::Approx(tr_m.p_ee + tr_m.p_gg).margin(1e-12));
  }
}

TEST_CASE("random states satisfy the construction invariants") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto state = iondet::testing::random_state(rng, 2);
    const CMatrix block = state.block_matrix();
    CHECK(max_abs(block - block.adjoint()) < 1e-14);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(block);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    CHECK(state.trace() == Catch::Approx(1.0).margin(1e-12));
    CHECK(max_abs(state.rho_ge() - state.rho_eg().adjoint()) == 0.0);
  }
}

TEST_CASE("scaling a state scales its traces") {
  const auto state = entangled_pair_state();
  const auto halved = AtomCavityState::make(
      0.5 * state.rho_ee(), 0.5 * state.rho_eg(), 0.5 * state.rho_gg());
  CHECK(halved.trace() == Catch::Approx(0.5));
  CHECK(trace_atom(halved).trace().real() == Catch::Approx(0.5));
}

TEST_CASE("click records") {
  CHECK(ClickRecord::click_de().complete());
  CHECK(ClickRecord::click_dg().complete());
  CHECK(ClickRecord::double_nonclick().complete());
  CHECK_FALSE(ClickRecord{Outcome::NoClick, std::nullopt}.complete());
  CHECK_FALSE(ClickRecord{Outcome::Click, Outcome::Click}.complete());
  CHECK(to_string(ClickRecord::click_de()) == "click_de");
  CHECK(to_string(ClickRecord::click_dg()) == "click_dg");
  CHECK(to_string(ClickRecord::double_nonclick()) == "double_nonclick");
}

TEST_CASE("cavity space validation") {
  CHECK_THROWS_AS(CavitySpace(0), DimensionMismatch);
  CHECK(CavitySpace(1).dim == 1);
}
