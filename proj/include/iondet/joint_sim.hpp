/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "iondet/core.hpp"
#include "iondet/errors.hpp"
#include "iondet/spectral.hpp"

namespace iondet {

// Reference simulation of the detection chain on the full joint space
// (discrete levels + continuum modes) x cavity. The input density operator
// is decomposed into pure components, each component is propagated with the
// zone unitary and cut by the click / non-click projectors, and the pieces
// are reassembled. No closed-form probability or conditional-state formula
// enters anywhere, which is what makes this path a useful cross-check for
// all of them.

namespace detail {

/// Pure component of a mixed atom-cavity state: weight and a 2 x dim
/// amplitude matrix (row 0 = e, row 1 = g).
struct PureComponent {
  double weight;
  CMatrix amplitudes;
};

inline std::vector<PureComponent> decompose(const AtomCavityState& state,
                                            double tol = kValidationTol) {
  const Eigen::Index d = state.dim();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(state.block_matrix());
  if (es.info() != Eigen::Success)
    throw ConvergenceFailure("eigensolver failed on the input state");

  std::vector<PureComponent> parts;
  for (Eigen::Index j = 0; j < 2 * d; ++j) {
    const double w = es.eigenvalues()(j);
    if (w < -tol)
      throw NotPositive("input state has a negative eigenvalue");
    if (w <= kBranchEps)
      continue;
    CMatrix amp(2, d);
    amp.row(0) = es.eigenvectors().col(j).head(d).transpose();
    amp.row(1) = es.eigenvectors().col(j).tail(d).transpose();
    parts.push_back({w, std::move(amp)});
  }
  return parts;
}

/// rho[c, c'] = sum_r m(r, c) conj(m(r, c')): cavity operator left by
/// tracing the joint index r out of an amplitude matrix.
inline CMatrix cavity_density(const CMatrix& m) {
  return m.transpose() * m.conjugate();
}

} // namespace detail

/// Outcome of pushing a state through a single detection zone.
struct StageOutcome {
  double click_probability = 0.0;
  CMatrix click_cavity_state;                  // empty when impossible
  double nonclick_probability = 0.0;
  std::optional<AtomCavityState> nonclick_state;
};

/// Evolves the joint state through one zone (given its spectral
/// decomposition) and projects on the continuum (click) and discrete
/// (non-click) sectors.
inline StageOutcome simulate_stage(const AtomCavityState& state,
                                   const EigenSystem& eig, double t) {
  const Eigen::Index d = state.dim();
  const int n = eig.size();
  const CMatrix basis = eig.components().cast<complexd>();

  CVector phases(n);
  for (int mu = 0; mu < n; ++mu) {
    const double ph = -eig.eigenvalues()(mu) * t;
    phases(mu) = complexd(std::cos(ph), std::sin(ph));
  }

  double p_click = 0.0;
  double p_nonclick = 0.0;
  CMatrix click_cavity = CMatrix::Zero(d, d);
  CMatrix ee = CMatrix::Zero(d, d), eg = CMatrix::Zero(d, d),
          gg = CMatrix::Zero(d, d);

  for (const auto& part : detail::decompose(state)) {
    // embed the discrete amplitudes in the joint space and evolve
    CMatrix joint = CMatrix::Zero(n, d);
    joint.row(kIndexE) = part.amplitudes.row(0);
    joint.row(kIndexG) = part.amplitudes.row(1);
    joint = basis * (phases.asDiagonal() * (basis.transpose() * joint));

    const CMatrix continuum = joint.bottomRows(n - 2);
    p_click += part.weight * continuum.squaredNorm();
    click_cavity += part.weight * detail::cavity_density(continuum);

    const auto e_row = joint.row(kIndexE);
    const auto g_row = joint.row(kIndexG);
    p_nonclick += part.weight * (e_row.squaredNorm() + g_row.squaredNorm());
    ee += part.weight * (e_row.transpose() * e_row.conjugate());
    eg += part.weight * (e_row.transpose() * g_row.conjugate());
    gg += part.weight * (g_row.transpose() * g_row.conjugate());
  }

  StageOutcome out;
  out.click_probability = p_click;
  if (p_click > kBranchEps)
    out.click_cavity_state = click_cavity / p_click;
  out.nonclick_probability = p_nonclick;
  if (p_nonclick > kBranchEps)
    out.nonclick_state = AtomCavityState::make(
        ee / p_nonclick, eg / p_nonclick, gg / p_nonclick);
  return out;
}

inline StageOutcome simulate_stage(const AtomCavityState& state,
                                   const ContinuumGrid& grid,
                                   const DetectorSpec& spec) {
  spec.validate();
  return simulate_stage(state, diagonalize(build_hamiltonian(grid, spec)),
                        spec.interaction_time);
}

/// Reference two-zone chain from precomputed zone decompositions: one
/// simulated stage per zone, with the non-click remainder of the first fed
/// into the second.
inline ChainDistribution simulate_chain(const AtomCavityState& state,
                                        const EigenSystem& eig_de, double t_de,
                                        const EigenSystem& eig_dg,
                                        double t_dg) {
  if (!state.is_normalized(1e-8))
    throw InvalidArgument("simulate_chain expects a normalized state");

  const StageOutcome first = simulate_stage(state, eig_de, t_de);

  ChainDistribution dist;
  dist.click_de = {ClickRecord::click_de(), first.click_probability,
                   first.click_cavity_state};
  dist.click_dg = {ClickRecord::click_dg(), 0.0, CMatrix()};
  dist.double_nonclick = {ClickRecord::double_nonclick(), 0.0, CMatrix()};
  if (!first.nonclick_state)
    return dist;

  const StageOutcome second =
      simulate_stage(*first.nonclick_state, eig_dg, t_dg);
  dist.click_dg.probability =
      first.nonclick_probability * second.click_probability;
  dist.click_dg.cavity_state = second.click_cavity_state;

  dist.double_nonclick.probability =
      first.nonclick_probability * second.nonclick_probability;
  if (second.nonclick_state)
    dist.double_nonclick.cavity_state = trace_atom(*second.nonclick_state);
  return dist;
}

inline ChainDistribution simulate_chain(const AtomCavityState& state,
                                        const ContinuumGrid& grid,
                                        const DetectorSpec& spec_de,
                                        const DetectorSpec& spec_dg) {
  if (spec_de.zone != Zone::De || spec_dg.zone != Zone::Dg)
    throw InvalidArgument("simulate_chain expects a De spec and a Dg spec");
  return simulate_chain(state, diagonalize(build_hamiltonian(grid, spec_de)),
                        spec_de.interaction_time,
                        diagonalize(build_hamiltonian(grid, spec_dg)),
                        spec_dg.interaction_time);
}

} // namespace iondet
