/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <algorithm>
#include <cmath>

#include "iondet/core.hpp"
#include "iondet/errors.hpp"
#include "iondet/spectral.hpp"

namespace iondet {

enum class EfficiencySource { Analytic, Numeric };

/// Ionization probability of a detection zone's target level after one
/// transit. Analytic values follow 1 - e^{-rate*t} (or are supplied
/// directly); numeric values are continuum populations of the evolved level.
class Efficiency {
public:
  static Efficiency from_value(double p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw InvalidArgument("efficiency must lie in [0, 1]");
    return Efficiency(p, EfficiencySource::Analytic);
  }

  static Efficiency golden_rule(double rate, double t) {
    if (!(rate >= 0.0))
      throw InvalidArgument("rate must be non-negative");
    return Efficiency(1.0 - std::exp(-rate * std::abs(t)),
                      EfficiencySource::Analytic);
  }

  double value() const { return value_; }
  EfficiencySource source() const { return source_; }

private:
  friend Efficiency efficiency_numeric(const EigenSystem&, int, double);
  Efficiency(double v, EfficiencySource s) : value_(v), source_(s) {}

  double value_;
  EfficiencySource source_;
};

/// Evolves the bare basis state `target_index` for time t and sums the
/// continuum populations.
inline Efficiency efficiency_numeric(const EigenSystem& eig, int target_index,
                                     double t) {
  CVector bare = CVector::Zero(eig.size());
  bare(target_index) = 1.0;
  const CVector evolved = evolve(eig, bare, t);
  double p = 0.0;
  for (int k = kFirstMode; k < eig.size(); ++k)
    p += std::norm(evolved(k));
  if (p < -kValidationTol || p > 1.0 + kValidationTol)
    throw Error("numeric efficiency outside [0, 1] beyond tolerance");
  return Efficiency(std::clamp(p, 0.0, 1.0), EfficiencySource::Numeric);
}

/// Dynamical efficiency of an inefficient-model zone: the zone couples only
/// its target level, whose ionization probability after the interaction time
/// defines the efficiency.
inline Efficiency efficiency_numeric(const ContinuumGrid& grid,
                                     const DetectorSpec& spec) {
  spec.validate();
  if (spec.off_coupling() != 0.0)
    throw InvalidArgument(
        "the inefficient model couples a single level per zone");
  const EigenSystem eig = diagonalize(build_hamiltonian(grid, spec));
  return efficiency_numeric(eig, spec.target_index(), spec.interaction_time);
}

/// p_e * Tr_C(rho_ee): probability that D_e clicks on a normalized state.
inline double click_probability_de(const AtomCavityState& state,
                                   const Efficiency& p_e) {
  return p_e.value() * trace_cavity(state).p_ee;
}

/// Conditional state after a non-click at D_e, with its probability
/// N = 1 - p_e Tr_C(rho_ee). The g-sector is untouched, the e-sector
/// population shrinks by the survival probability, and the coherence block
/// picks up the complex survival amplitude of |e> (relative to the free
/// phase of |g>), which generally differs from sqrt(1 - p_e) in phase.
inline NonClickBranch nonclick_state_de(const AtomCavityState& state,
                                        const ContinuumGrid& grid,
                                        const DetectorSpec& spec) {
  spec.validate();
  if (spec.zone != Zone::De)
    throw InvalidArgument("nonclick_state_de expects a De zone");
  if (spec.off_coupling() != 0.0)
    throw InvalidArgument(
        "the inefficient model couples a single level per zone");

  const EigenSystem eig = diagonalize(build_hamiltonian(grid, spec));
  const double t = spec.interaction_time;
  const Efficiency p_e = efficiency_numeric(eig, kIndexE, t);

  const double n = 1.0 - p_e.value() * trace_cavity(state).p_ee;
  if (n <= kBranchEps)
    throw ZeroProbabilityBranch("non-click at De has zero probability");

  // amplitude for |e> to survive the zone, divided by the free evolution
  // phase e^{-i eps_g t} of |g>
  const complexd surv = survival_amplitude(eig, kIndexE, t);
  const complexd coherence =
      surv * complexd(std::cos(spec.eps_g * t), std::sin(spec.eps_g * t));

  AtomCavityState conditional = AtomCavityState::make(
      (1.0 - p_e.value()) / n * state.rho_ee(),
      coherence / n * state.rho_eg(), state.rho_gg() / n);
  return {n, std::move(conditional)};
}

/// Probability that D_g clicks given that D_e did not, for a normalized
/// pre-chain state: p_g Tr_C(rho_gg) / (1 - p_e Tr_C(rho_ee)).
inline double click_probability_dg(const AtomCavityState& state,
                                   const Efficiency& p_e,
                                   const Efficiency& p_g) {
  const CavityTraces tr = trace_cavity(state);
  const double denom = 1.0 - p_e.value() * tr.p_ee;
  if (denom <= kBranchEps)
    throw ZeroProbabilityBranch("conditioning on a certain click at De");
  return p_g.value() * tr.p_gg / denom;
}

/// Complement of click_probability_dg.
inline double nonclick_probability_dg(const AtomCavityState& state,
                                      const Efficiency& p_e,
                                      const Efficiency& p_g) {
  const CavityTraces tr = trace_cavity(state);
  const double denom = 1.0 - p_e.value() * tr.p_ee;
  if (denom <= kBranchEps)
    throw ZeroProbabilityBranch("conditioning on a certain click at De");
  return (denom - p_g.value() * tr.p_gg) / denom;
}

/// Cavity state after both zones stayed silent:
/// [(1-p_e) rho_ee + (1-p_g) rho_gg] / (1 - p_e Tr(rho_ee) - p_g Tr(rho_gg)).
inline CMatrix double_nonclick_cavity_state(const AtomCavityState& state,
                                            const Efficiency& p_e,
                                            const Efficiency& p_g) {
  const CavityTraces tr = trace_cavity(state);
  const double denom = 1.0 - p_e.value() * tr.p_ee - p_g.value() * tr.p_gg;
  if (denom <= kBranchEps)
    throw ZeroProbabilityBranch("double non-click has zero probability");
  return ((1.0 - p_e.value()) * state.rho_ee() +
          (1.0 - p_g.value()) * state.rho_gg()) /
         denom;
}

/// Full two-zone chain of the inefficient model with given efficiencies.
/// The three outcome probabilities sum to one by construction; impossible
/// outcomes carry an empty state matrix.
inline ChainDistribution run_chain(const AtomCavityState& state,
                                   const Efficiency& p_e,
                                   const Efficiency& p_g) {
  if (!state.is_normalized(1e-8))
    throw InvalidArgument("run_chain expects a normalized state");
  const CavityTraces tr = trace_cavity(state);

  const double p_click_de = p_e.value() * tr.p_ee;
  const double p_click_dg = p_g.value() * tr.p_gg;
  const double p_dnc = 1.0 - p_click_de - p_click_dg;

  ChainDistribution dist;
  dist.click_de = {ClickRecord::click_de(), p_click_de, CMatrix()};
  if (p_click_de > kBranchEps)
    dist.click_de.cavity_state = state.rho_ee() / tr.p_ee;

  dist.click_dg = {ClickRecord::click_dg(), p_click_dg, CMatrix()};
  if (p_click_dg > kBranchEps)
    dist.click_dg.cavity_state = state.rho_gg() / tr.p_gg;

  dist.double_nonclick = {ClickRecord::double_nonclick(), p_dnc, CMatrix()};
  if (p_dnc > kBranchEps)
    dist.double_nonclick.cavity_state =
        double_nonclick_cavity_state(state, p_e, p_g);
  return dist;
}

/// Same chain with efficiencies realized dynamically from the zone
/// parameters.
inline ChainDistribution run_chain(const AtomCavityState& state,
                                   const ContinuumGrid& grid,
                                   const DetectorSpec& spec_de,
                                   const DetectorSpec& spec_dg) {
  if (spec_de.zone != Zone::De || spec_dg.zone != Zone::Dg)
    throw InvalidArgument("run_chain expects a De spec and a Dg spec");
  return run_chain(state, efficiency_numeric(grid, spec_de),
                   efficiency_numeric(grid, spec_dg));
}

} // namespace iondet
