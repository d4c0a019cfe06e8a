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
#include "iondet/detect_false.hpp"
#include "iondet/errors.hpp"

namespace iondet {

/// Default ceiling on |q_{g,e}|^2 below which the level-preserving closed
/// forms are accepted.
inline constexpr double kCrossTransitionThreshold = 1e-4;

namespace detail {

inline void require_density_operator(const CMatrix& rho, double tol) {
  if (rho.rows() != rho.cols() || rho.rows() < 1)
    throw NotDensityOperator("density operator must be square");
  if (hermiticity_defect(rho) > tol)
    throw NotDensityOperator("density operator must be Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 100.0 * tol ||
      std::abs(rho.trace().imag()) > tol)
    throw NotDensityOperator("density operator must have unit trace");
}

/// Hermitian square root by spectral decomposition; eigenvalues slightly
/// below zero are clipped, genuinely negative ones are an error.
inline CMatrix hermitian_sqrt(const CMatrix& rho, double tol) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  if (es.info() != Eigen::Success)
    throw ConvergenceFailure("eigensolver failed in matrix square root");
  RVector vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals(i) < -tol)
      throw NotDensityOperator("density operator has a negative eigenvalue");
    vals(i) = std::sqrt(std::max(vals(i), 0.0));
  }
  return es.eigenvectors() * vals.asDiagonal() *
         es.eigenvectors().adjoint();
}

} // namespace detail

/// Uhlmann fidelity (Tr sqrt(sqrt(rho_a) rho_b sqrt(rho_a)))^2 between two
/// density operators of equal dimension.
inline double fidelity(const CMatrix& rho_a, const CMatrix& rho_b,
                       double tol = kValidationTol) {
  detail::require_density_operator(rho_a, tol);
  detail::require_density_operator(rho_b, tol);
  if (rho_a.rows() != rho_b.rows())
    throw DimensionMismatch("fidelity requires operators of equal dimension");

  const CMatrix root_a = detail::hermitian_sqrt(rho_a, tol);
  const CMatrix inner = root_a * rho_b * root_a;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (inner + inner.adjoint()),
                                            Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ConvergenceFailure("eigensolver failed in fidelity");

  double trace_root = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    trace_root += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  const double f = trace_root * trace_root;
  if (f < -kValidationTol || f > 1.0 + kValidationTol)
    throw Error("fidelity outside [0, 1] beyond tolerance");
  return std::clamp(f, 0.0, 1.0);
}

/// Fidelity between the post-click cavity states of the ideal single-level
/// first zone and a false-count first zone, for the entangled-pair input:
/// the correct-level ionization weight over the total ionization weight.
inline double fidelity_first_zone(const QCoefficientTable& table_de) {
  if (table_de.zone() != Zone::De)
    throw InvalidArgument("fidelity_first_zone expects a De table");
  const double w_e = table_de.ionization_weight(kIndexE);
  const double w_g = table_de.ionization_weight(kIndexG);
  if (w_e + w_g <= kBranchEps)
    throw ZeroProbabilityBranch("no ionization weight in the first zone");
  return w_e / (w_e + w_g);
}

/// Second-zone analogue without the level-preservation assumption: both
/// level-preserving and level-crossing paths through the first zone feed the
/// second-zone ionization amplitudes.
inline double fidelity_second_zone_general(const QCoefficientTable& table_de,
                                           const QCoefficientTable& table_dg) {
  if (table_de.zone() != Zone::De || table_dg.zone() != Zone::Dg)
    throw InvalidArgument("expected a De table and a Dg table");
  const complexd qe_ee = table_de.discrete(kIndexE, kIndexE);
  const complexd qe_eg = table_de.discrete(kIndexE, kIndexG);
  const complexd qe_ge = table_de.discrete(kIndexG, kIndexE);
  const complexd qe_gg = table_de.discrete(kIndexG, kIndexG);

  double from_g = 0.0; // |1><1| weight: atom entered the chain in g
  double from_e = 0.0; // |0><0| weight: atom entered the chain in e
  for (int k = 0; k < table_dg.n_modes(); ++k) {
    const complexd qg_ek = table_dg.ionize(kIndexE, k);
    const complexd qg_gk = table_dg.ionize(kIndexG, k);
    from_g += std::norm(qe_gg * qg_gk + qe_ge * qg_ek);
    from_e += std::norm(qe_ee * qg_ek + qe_eg * qg_gk);
  }
  const double total = from_g + from_e;
  if (total <= kBranchEps)
    throw ZeroProbabilityBranch("no ionization weight in the second zone");
  return from_g / total;
}

/// Closed-form second-zone fidelity under the assumption that the first zone
/// preserves the atomic level (|q_{g,e}|^2 negligible). Refuses to evaluate
/// when the measured cross-transition weight exceeds the threshold.
inline double fidelity_second_zone(
    const QCoefficientTable& table_de, const QCoefficientTable& table_dg,
    double cross_threshold = kCrossTransitionThreshold) {
  if (table_de.zone() != Zone::De || table_dg.zone() != Zone::Dg)
    throw InvalidArgument("expected a De table and a Dg table");
  const double cross = table_de.cross_transition_weight();
  if (cross > cross_threshold)
    throw AssumptionViolated(
        "first-zone cross-transition weight too large for the closed form");

  const double keep_g = std::norm(table_de.discrete(kIndexG, kIndexG));
  const double keep_e = std::norm(table_de.discrete(kIndexE, kIndexE));
  const double ion_g = table_dg.ionization_weight(kIndexG);
  const double ion_e = table_dg.ionization_weight(kIndexE);

  const double num = keep_g * ion_g;
  const double den = num + keep_e * ion_e;
  if (den <= kBranchEps)
    throw ZeroProbabilityBranch("no ionization weight in the second zone");
  return num / den;
}

} // namespace iondet
