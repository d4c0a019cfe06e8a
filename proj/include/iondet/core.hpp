/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "iondet/errors.hpp"

namespace iondet {

using complexd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Tolerance for Hermiticity / positivity / trace validation.
inline constexpr double kValidationTol = 1e-10;

/// Conditioning on a branch whose probability is below this is a caller error.
inline constexpr double kBranchEps = 1e-14;

/// Truncated Fock space of the cavity mode, basis |0>, ..., |dim-1>.
struct CavitySpace {
  Eigen::Index dim;

  explicit CavitySpace(Eigen::Index d) : dim(d) {
    if (d < 1)
      throw DimensionMismatch("cavity dimension must be at least 1");
  }
};

enum class Outcome { Click, NoClick };

inline std::string to_string(Outcome o) {
  return o == Outcome::Click ? "click" : "nonclick";
}

/// Classical record of the two-stage detection chain. The second entry is
/// only defined when the atom survived the first zone; a click there removes
/// the atom from the beam.
struct ClickRecord {
  Outcome de;
  std::optional<Outcome> dg;

  static ClickRecord click_de() { return {Outcome::Click, std::nullopt}; }
  static ClickRecord click_dg() { return {Outcome::NoClick, Outcome::Click}; }
  static ClickRecord double_nonclick() {
    return {Outcome::NoClick, Outcome::NoClick};
  }

  /// A complete record has a second-zone outcome exactly when the first zone
  /// did not click.
  bool complete() const { return dg.has_value() == (de == Outcome::NoClick); }

  bool operator==(const ClickRecord&) const = default;
};

inline std::string to_string(const ClickRecord& r) {
  if (r.de == Outcome::Click)
    return "click_de";
  if (r.dg && *r.dg == Outcome::Click)
    return "click_dg";
  return "double_nonclick";
}

namespace detail {

inline void require_square_same_dim(const CMatrix& a, const CMatrix& b,
                                    const CMatrix& c) {
  const auto d = a.rows();
  if (a.cols() != d || b.rows() != d || b.cols() != d || c.rows() != d ||
      c.cols() != d)
    throw DimensionMismatch("state blocks must be square matrices of equal dimension");
  if (d < 1)
    throw DimensionMismatch("state blocks must be at least 1x1");
}

/// Smallest eigenvalue of the Hermitian part of m.
inline double min_eigenvalue(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()),
                                            Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ConvergenceFailure("eigensolver failed during validation");
  return es.eigenvalues().minCoeff();
}

inline double hermiticity_defect(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

} // namespace detail

/// Block density operator of the atom (levels e, g) and the cavity mode:
/// four dim x dim cavity-space operators rho_ee, rho_eg, rho_ge, rho_gg.
/// rho_ge is stored implicitly as the adjoint of rho_eg, so that invariant
/// holds exactly. States may be subnormalized (conditioning produces them);
/// normalization is an explicit operation.
class AtomCavityState {
public:
  /// Validates and assembles a state from its blocks. The full 2dim x 2dim
  /// block matrix must be Hermitian positive semidefinite within `tol`.
  /// With `normalize`, the blocks are rescaled to unit total trace.
  static AtomCavityState make(CMatrix rho_ee, CMatrix rho_eg, CMatrix rho_gg,
                              bool normalize = false,
                              double tol = kValidationTol) {
    detail::require_square_same_dim(rho_ee, rho_eg, rho_gg);

    const double scale =
        std::max({1.0, rho_ee.cwiseAbs().maxCoeff(), rho_eg.cwiseAbs().maxCoeff(),
                  rho_gg.cwiseAbs().maxCoeff()});
    if (detail::hermiticity_defect(rho_ee) > tol * scale ||
        detail::hermiticity_defect(rho_gg) > tol * scale)
      throw NotPositive("diagonal blocks must be Hermitian");

    AtomCavityState state(std::move(rho_ee), std::move(rho_eg),
                          std::move(rho_gg));
    if (detail::min_eigenvalue(state.block_matrix()) < -tol * scale)
      throw NotPositive("block density matrix has a negative eigenvalue");

    if (normalize) {
      const double tr = state.trace();
      if (std::abs(tr) <= tol)
        throw ZeroTrace("cannot normalize a state with zero trace");
      state.ee_ /= tr;
      state.eg_ /= tr;
      state.gg_ /= tr;
    }
    return state;
  }

  Eigen::Index dim() const { return ee_.rows(); }

  const CMatrix& rho_ee() const { return ee_; }
  const CMatrix& rho_eg() const { return eg_; }
  const CMatrix& rho_gg() const { return gg_; }
  CMatrix rho_ge() const { return eg_.adjoint(); }

  /// Total trace Tr(rho_ee) + Tr(rho_gg); real for valid states.
  double trace() const { return ee_.trace().real() + gg_.trace().real(); }

  bool is_normalized(double tol = kValidationTol) const {
    return std::abs(trace() - 1.0) <= tol;
  }

  AtomCavityState normalized(double tol = kValidationTol) const {
    const double tr = trace();
    if (std::abs(tr) <= tol)
      throw ZeroTrace("cannot normalize a state with zero trace");
    return AtomCavityState(ee_ / tr, eg_ / tr, gg_ / tr);
  }

  /// The full 2dim x 2dim operator in the ordered basis
  /// {|e,0>, ..., |e,dim-1>, |g,0>, ..., |g,dim-1>}.
  CMatrix block_matrix() const {
    const auto d = dim();
    CMatrix full(2 * d, 2 * d);
    full.topLeftCorner(d, d) = ee_;
    full.topRightCorner(d, d) = eg_;
    full.bottomLeftCorner(d, d) = eg_.adjoint();
    full.bottomRightCorner(d, d) = gg_;
    return full;
  }

private:
  AtomCavityState(CMatrix ee, CMatrix eg, CMatrix gg)
      : ee_(std::move(ee)), eg_(std::move(eg)), gg_(std::move(gg)) {}

  CMatrix ee_, eg_, gg_;
};

/// Result of tracing out the cavity mode.
struct CavityTraces {
  double p_ee;    ///< Tr(rho_ee)
  double p_gg;    ///< Tr(rho_gg)
  complexd c_eg;  ///< Tr(rho_eg)
};

inline CavityTraces trace_cavity(const AtomCavityState& state) {
  return {state.rho_ee().trace().real(), state.rho_gg().trace().real(),
          state.rho_eg().trace()};
}

/// Reduced cavity operator rho_ee + rho_gg.
inline CMatrix trace_atom(const AtomCavityState& state) {
  return state.rho_ee() + state.rho_gg();
}

/// The entangled probe state (|e,0><e,0| + |e,0><g,1| + h.c. + |g,1><g,1|)/2
/// on a cavity space of dimension >= 2.
inline AtomCavityState entangled_pair_state(Eigen::Index dim = 2) {
  if (dim < 2)
    throw DimensionMismatch("entangled pair state needs cavity dimension >= 2");
  CMatrix ee = CMatrix::Zero(dim, dim);
  CMatrix eg = CMatrix::Zero(dim, dim);
  CMatrix gg = CMatrix::Zero(dim, dim);
  ee(0, 0) = 0.5;
  eg(0, 1) = 0.5;
  gg(1, 1) = 0.5;
  return AtomCavityState::make(ee, eg, gg);
}

/// One exclusive outcome of a detection chain: its classical record, its
/// total probability, and the conditional cavity state. The state matrix is
/// empty (0x0) when the outcome is impossible.
struct ChainOutcome {
  ClickRecord record;
  double probability = 0.0;
  CMatrix cavity_state;
};

/// The three-outcome distribution produced by a two-zone detection chain.
struct ChainDistribution {
  ChainOutcome click_de;
  ChainOutcome click_dg;
  ChainOutcome double_nonclick;

  std::array<double, 3> probabilities() const {
    return {click_de.probability, click_dg.probability,
            double_nonclick.probability};
  }
  std::array<const ChainOutcome*, 3> outcomes() const {
    return {&click_de, &click_dg, &double_nonclick};
  }
};

/// Conditional state after a non-click, together with the branch probability.
struct NonClickBranch {
  double probability;
  AtomCavityState state;
};

} // namespace iondet
