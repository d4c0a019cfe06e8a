/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "iondet/core.hpp"
#include "iondet/errors.hpp"
#include "iondet/spectral.hpp"

namespace iondet {

/// Transition amplitudes q_{a,b}(t) = <b|U(t)|a> of one detection zone,
/// for initial states a in {e, g} and final states b in {e, g} (discrete
/// table) or b = k (ionization table). The zone Hamiltonian is real
/// symmetric, so q is symmetric in its indices; the time phases still make
/// it complex. Stacked as a (n_modes+2) x 2 array the entries form two
/// columns of a unitary, which is validated on construction.
class QCoefficientTable {
public:
  Zone zone() const { return zone_; }
  double time() const { return time_; }
  int n_modes() const { return static_cast<int>(ionize_.cols()); }

  /// q_{a,b} between discrete levels; indices kIndexE / kIndexG.
  complexd discrete(int from, int to) const { return discrete_(from, to); }
  const Eigen::Matrix2cd& discrete() const { return discrete_; }

  /// q_{a,k} into the continuum; row a in {kIndexE, kIndexG}, column k.
  complexd ionize(int from, int k) const { return ionize_(from, k); }
  const CMatrix& ionize() const { return ionize_; }

  /// Total ionization weight sum_k |q_{a,k}|^2 of level a.
  double ionization_weight(int from) const {
    return ionize_.row(from).squaredNorm();
  }

  /// Interference overlap sum_k q_{e,k} conj(q_{g,k}).
  complexd ionization_overlap() const {
    return (ionize_.row(kIndexE) * ionize_.row(kIndexG).adjoint())(0, 0);
  }

  /// |q_{g,e}|^2, the weight of the continuum-mediated transition between
  /// the discrete levels. Closed forms that neglect it are only valid while
  /// this is small; the chain operations never assume it vanishes.
  double cross_transition_weight() const {
    return std::norm(discrete_(kIndexG, kIndexE));
  }

  static QCoefficientTable build(const ContinuumGrid& grid,
                                 const DetectorSpec& spec, double t) {
    spec.validate();
    if (!(t >= 0.0))
      throw InvalidArgument("q-table time must be non-negative");
    const EigenSystem eig = diagonalize(build_hamiltonian(grid, spec));
    const int n = eig.size();

    // columns U(t)|e> and U(t)|g>
    CMatrix cols(n, 2);
    for (int a = 0; a < 2; ++a) {
      CVector bare = CVector::Zero(n);
      bare(a) = 1.0;
      cols.col(a) = evolve(eig, bare, t);
    }

    QCoefficientTable table;
    table.zone_ = spec.zone;
    table.time_ = t;
    table.discrete_ << cols(kIndexE, 0), cols(kIndexG, 0), cols(kIndexE, 1),
        cols(kIndexG, 1);
    table.ionize_ = cols.bottomRows(n - 2).transpose();
    table.validate();
    return table;
  }

private:
  QCoefficientTable() = default;

  void validate() const {
    const double nrm_e =
        std::norm(discrete_(0, 0)) + std::norm(discrete_(0, 1)) +
        ionization_weight(kIndexE);
    const double nrm_g =
        std::norm(discrete_(1, 0)) + std::norm(discrete_(1, 1)) +
        ionization_weight(kIndexG);
    const complexd overlap = discrete_(0, 0) * std::conj(discrete_(1, 0)) +
                             discrete_(0, 1) * std::conj(discrete_(1, 1)) +
                             ionization_overlap();
    if (std::abs(nrm_e - 1.0) > kValidationTol ||
        std::abs(nrm_g - 1.0) > kValidationTol ||
        std::abs(overlap) > kValidationTol)
      throw Error("q-table columns are not orthonormal; evolution is broken");
  }

  Zone zone_ = Zone::De;
  double time_ = 0.0;
  Eigen::Matrix2cd discrete_; // (from, to)
  CMatrix ionize_;            // (from, k)
};

inline QCoefficientTable q_table(const ContinuumGrid& grid,
                                 const DetectorSpec& spec, double t) {
  return QCoefficientTable::build(grid, spec, t);
}

inline QCoefficientTable q_table(const ContinuumGrid& grid,
                                 const DetectorSpec& spec) {
  return QCoefficientTable::build(grid, spec, spec.interaction_time);
}

/// Contribution of the atomic coherence blocks to the click probability:
/// 2 Re[ sum_k q_{e,k} conj(q_{g,k}) Tr_C(rho_eg) ].
inline double interference_term(const AtomCavityState& state,
                                const QCoefficientTable& table) {
  return 2.0 * std::real(table.ionization_overlap() *
                         trace_cavity(state).c_eg);
}

/// Click probability of a false-count zone. Unlike the single-level model,
/// both populations contribute and the coherence blocks shift the result
/// through the interference term.
inline double click_probability_false(const AtomCavityState& state,
                                      const QCoefficientTable& table) {
  const CavityTraces tr = trace_cavity(state);
  const double p = table.ionization_weight(kIndexE) * tr.p_ee +
                   table.ionization_weight(kIndexG) * tr.p_gg +
                   interference_term(state, table);
  if (p < -kValidationTol || p > 1.0 + kValidationTol)
    throw Error("click probability outside [0, 1] beyond tolerance");
  return std::clamp(p, 0.0, 1.0);
}

/// Cavity state conditioned on a click of a false-count zone: each pair of
/// atomic blocks is weighted by the corresponding continuum overlap and the
/// result renormalized.
inline CMatrix post_click_state_false(const AtomCavityState& state,
                                      const QCoefficientTable& table) {
  const double w_e = table.ionization_weight(kIndexE);
  const double w_g = table.ionization_weight(kIndexG);
  const complexd w_eg = table.ionization_overlap();

  CMatrix numerator = w_e * state.rho_ee() + w_g * state.rho_gg() +
                      w_eg * state.rho_eg() +
                      std::conj(w_eg) * state.rho_ge();
  const double p = numerator.trace().real();
  if (p <= kBranchEps)
    throw ZeroProbabilityBranch("click has zero probability");
  return numerator / p;
}

/// Conditional state after a non-click of a false-count zone. Both discrete
/// amplitudes survive, so every output block mixes all four input blocks.
inline NonClickBranch nonclick_state_false(const AtomCavityState& state,
                                           const QCoefficientTable& table) {
  const Eigen::Index d = state.dim();
  const auto& q = table.discrete();

  std::array<std::array<const CMatrix*, 2>, 2> in{};
  const CMatrix ge = state.rho_ge();
  in[0][0] = &state.rho_ee();
  in[0][1] = &state.rho_eg();
  in[1][0] = &ge;
  in[1][1] = &state.rho_gg();

  // out_{c,d} = sum_{a,b} q_{a,c} conj(q_{b,d}) in_{a,b}
  std::array<std::array<CMatrix, 2>, 2> out;
  for (int c = 0; c < 2; ++c)
    for (int dd = 0; dd < 2; ++dd) {
      CMatrix block = CMatrix::Zero(d, d);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          block += q(a, c) * std::conj(q(b, dd)) * (*in[a][b]);
      out[c][dd] = std::move(block);
    }

  const double n = out[0][0].trace().real() + out[1][1].trace().real();
  if (n <= kBranchEps)
    throw ZeroProbabilityBranch("non-click has zero probability");
  return {n, AtomCavityState::make(out[0][0] / n, out[0][1] / n,
                                   out[1][1] / n)};
}

/// Full two-zone chain of the false-count model from precomputed q-tables.
inline ChainDistribution chain_false(const AtomCavityState& state,
                                     const QCoefficientTable& table_de,
                                     const QCoefficientTable& table_dg) {
  if (table_de.zone() != Zone::De || table_dg.zone() != Zone::Dg)
    throw InvalidArgument("chain_false expects a De table and a Dg table");
  if (!state.is_normalized(1e-8))
    throw InvalidArgument("chain_false expects a normalized state");

  ChainDistribution dist;
  const double p1 = click_probability_false(state, table_de);
  dist.click_de = {ClickRecord::click_de(), p1, CMatrix()};
  if (p1 > kBranchEps)
    dist.click_de.cavity_state = post_click_state_false(state, table_de);

  dist.click_dg = {ClickRecord::click_dg(), 0.0, CMatrix()};
  dist.double_nonclick = {ClickRecord::double_nonclick(), 0.0, CMatrix()};
  if (1.0 - p1 <= kBranchEps)
    return dist;

  const NonClickBranch survived = nonclick_state_false(state, table_de);

  const double p2 = click_probability_false(survived.state, table_dg);
  dist.click_dg.probability = survived.probability * p2;
  if (dist.click_dg.probability > kBranchEps)
    dist.click_dg.cavity_state =
        post_click_state_false(survived.state, table_dg);

  if (1.0 - p2 > kBranchEps) {
    const NonClickBranch silent =
        nonclick_state_false(survived.state, table_dg);
    dist.double_nonclick.probability = survived.probability * silent.probability;
    if (dist.double_nonclick.probability > kBranchEps)
      dist.double_nonclick.cavity_state =
          trace_atom(silent.state.normalized());
  }
  return dist;
}

/// Convenience overload building the per-zone tables at their interaction
/// times. Each zone gets its own parameter set.
inline ChainDistribution chain_false(const AtomCavityState& state,
                                     const ContinuumGrid& grid,
                                     const DetectorSpec& spec_de,
                                     const DetectorSpec& spec_dg) {
  if (spec_de.zone != Zone::De || spec_dg.zone != Zone::Dg)
    throw InvalidArgument("chain_false expects a De spec and a Dg spec");
  return chain_false(state, q_table(grid, spec_de), q_table(grid, spec_dg));
}

} // namespace iondet
