/**
 * This code is part of iondet.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "iondet/core.hpp"
#include "iondet/errors.hpp"

namespace iondet {

// Basis layout of a detection-zone Hamiltonian: the two discrete levels
// first, then the continuum modes.
inline constexpr int kIndexE = 0;
inline constexpr int kIndexG = 1;
inline constexpr int kFirstMode = 2;

/// Relative pole guard for the analytic eigenvector formulas, in units of the
/// grid bandwidth.
inline constexpr double kPoleGuardFactor = 1e-12;

/// Uniform discretization of the ionization continuum: n_modes energies
/// equally spaced over [e_min, e_max], level density 1/spacing.
struct ContinuumGrid {
  int n_modes;
  double e_min;
  double e_max;

  static ContinuumGrid uniform(int n_modes, double e_min, double e_max) {
    if (n_modes < 3)
      throw InvalidArgument("continuum grid needs at least 3 modes");
    if (!(e_max > e_min))
      throw InvalidArgument("continuum grid needs e_max > e_min");
    return {n_modes, e_min, e_max};
  }

  /// Grid of the given total bandwidth centered on `center`.
  static ContinuumGrid centered(int n_modes, double center, double bandwidth) {
    if (!(bandwidth > 0))
      throw InvalidArgument("bandwidth must be positive");
    return uniform(n_modes, center - 0.5 * bandwidth, center + 0.5 * bandwidth);
  }

  double spacing() const { return (e_max - e_min) / (n_modes - 1); }
  double level_density() const { return 1.0 / spacing(); }
  double bandwidth() const { return e_max - e_min; }
  double energy(int k) const {
    return e_min + k * (e_max - e_min) / (n_modes - 1);
  }
  RVector energies() const {
    return RVector::LinSpaced(n_modes, e_min, e_max);
  }

  /// Time at which the discretized continuum produces revivals, 2*pi/spacing.
  double recurrence_time() const {
    return 2.0 * std::numbers::pi / spacing();
  }
};

enum class Zone { De, Dg };

inline std::string to_string(Zone z) { return z == Zone::De ? "De" : "Dg"; }

/// Parameters of one detection zone: the two discrete level energies, the
/// per-mode couplings of each level to the continuum, and the time the atom
/// spends inside the zone. A zone of the intrinsically-inefficient model
/// couples only its target level (coupling_g = 0 for De, coupling_e = 0 for
/// Dg); the false-count model couples both.
struct DetectorSpec {
  double eps_e = 0.0;
  double eps_g = 0.0;
  double coupling_e = 0.0;
  double coupling_g = 0.0;
  Zone zone = Zone::De;
  double interaction_time = 0.0;

  void validate() const {
    if (!std::isfinite(coupling_e) || !std::isfinite(coupling_g) ||
        !std::isfinite(eps_e) || !std::isfinite(eps_g))
      throw InvalidArgument("detector parameters must be finite");
    if (!(interaction_time >= 0.0))
      throw InvalidArgument("interaction time must be non-negative");
  }

  int target_index() const { return zone == Zone::De ? kIndexE : kIndexG; }
  double target_energy() const { return zone == Zone::De ? eps_e : eps_g; }
  double target_coupling() const {
    return zone == Zone::De ? coupling_e : coupling_g;
  }
  double off_coupling() const {
    return zone == Zone::De ? coupling_g : coupling_e;
  }
};

/// Fermi golden-rule rate 2*pi*v^2*rho(E) for per-mode coupling v on this
/// grid (hbar = 1).
inline double golden_rule_rate(const ContinuumGrid& grid, double coupling) {
  return 2.0 * std::numbers::pi * coupling * coupling * grid.level_density();
}

/// Per-mode coupling that realizes a given golden-rule rate on this grid.
inline double coupling_for_rate(const ContinuumGrid& grid, double rate) {
  if (!(rate >= 0))
    throw InvalidArgument("rate must be non-negative");
  return std::sqrt(rate / (2.0 * std::numbers::pi * grid.level_density()));
}

/// Assembles the (n_modes+2) x (n_modes+2) real symmetric detection-zone
/// Hamiltonian: diagonal (eps_e, eps_g, eps_k, ...); level e coupled to every
/// mode with coupling_e, level g with coupling_g; no direct e-g element.
inline RMatrix build_hamiltonian(const ContinuumGrid& grid,
                                 const DetectorSpec& spec) {
  spec.validate();
  const int n = grid.n_modes + 2;
  RMatrix h = RMatrix::Zero(n, n);
  h(kIndexE, kIndexE) = spec.eps_e;
  h(kIndexG, kIndexG) = spec.eps_g;
  for (int k = 0; k < grid.n_modes; ++k) {
    const int row = kFirstMode + k;
    h(row, row) = grid.energy(k);
    h(kIndexE, row) = spec.coupling_e;
    h(row, kIndexE) = spec.coupling_e;
    h(kIndexG, row) = spec.coupling_g;
    h(row, kIndexG) = spec.coupling_g;
  }
  return h;
}

/// Full spectral decomposition of a detection-zone Hamiltonian. Eigenvalues
/// ascending; components(b, mu) is the amplitude of eigenvector mu on basis
/// state b (b = 0 is |e>, b = 1 is |g>, b >= 2 the continuum modes).
class EigenSystem {
public:
  EigenSystem(RVector eigenvalues, RMatrix components)
      : eigenvalues_(std::move(eigenvalues)), components_(std::move(components)) {}

  const RVector& eigenvalues() const { return eigenvalues_; }
  const RMatrix& components() const { return components_; }
  int size() const { return static_cast<int>(eigenvalues_.size()); }
  int n_modes() const { return size() - 2; }

private:
  RVector eigenvalues_;
  RMatrix components_;
};

inline EigenSystem diagonalize(const RMatrix& hamiltonian) {
  if (hamiltonian.rows() != hamiltonian.cols())
    throw DimensionMismatch("hamiltonian must be square");
  Eigen::SelfAdjointEigenSolver<RMatrix> solver(hamiltonian);
  if (solver.info() != Eigen::Success)
    throw ConvergenceFailure("symmetric eigensolver did not converge");
  return EigenSystem(solver.eigenvalues(), solver.eigenvectors());
}

/// Applies U(t) = sum_mu e^{-i eps_mu t} |psi_mu><psi_mu| to an amplitude
/// vector over the basis {e, g, modes}.
inline CVector evolve(const EigenSystem& eig, const CVector& amplitudes,
                      double t) {
  if (amplitudes.size() != eig.size())
    throw DimensionMismatch("amplitude vector length must match the eigensystem");
  const RMatrix& basis = eig.components();
  const RVector in_re = basis.transpose() * amplitudes.real();
  const RVector in_im = basis.transpose() * amplitudes.imag();
  CVector rotated(eig.size());
  for (int mu = 0; mu < eig.size(); ++mu) {
    const double ph = -eig.eigenvalues()(mu) * t;
    rotated(mu) =
        complexd(std::cos(ph), std::sin(ph)) * complexd(in_re(mu), in_im(mu));
  }
  CVector out(eig.size());
  out.real() = basis * rotated.real();
  out.imag() = basis * rotated.imag();
  return out;
}

/// Transition amplitude <to|U(t)|from> between basis states.
inline complexd transition_amplitude(const EigenSystem& eig, int from, int to,
                                     double t) {
  complexd sum = 0.0;
  const auto& vals = eig.eigenvalues();
  const auto& comp = eig.components();
  for (int mu = 0; mu < eig.size(); ++mu) {
    const double w = comp(to, mu) * comp(from, mu);
    const double ph = -vals(mu) * t;
    sum += w * complexd(std::cos(ph), std::sin(ph));
  }
  return sum;
}

/// Amplitude <b|U(t)|b> for a basis state to survive unchanged.
inline complexd survival_amplitude(const EigenSystem& eig, int basis_index,
                                   double t) {
  return transition_amplitude(eig, basis_index, basis_index, t);
}

/// Analytic eigenvector of a single-level zone Hamiltonian (only one discrete
/// level coupled to the continuum), evaluated at one of its eigenvalues.
struct SingleLevelCoefficients {
  double amp_level;  ///< component on the coupled discrete level
  RVector amp_modes; ///< components on the continuum modes
};

inline SingleLevelCoefficients stationary_coefficients_single(
    const ContinuumGrid& grid, const DetectorSpec& spec, double eigenvalue) {
  spec.validate();
  if (spec.off_coupling() != 0.0)
    throw InvalidArgument(
        "single-level coefficients require the non-target coupling to vanish");
  const double v = spec.target_coupling();
  const double guard = kPoleGuardFactor * grid.bandwidth();

  double sum = 0.0;
  RVector ratio(grid.n_modes);
  for (int k = 0; k < grid.n_modes; ++k) {
    const double delta = eigenvalue - grid.energy(k);
    if (std::abs(delta) < guard)
      throw PoleCollision("eigenvalue collides with a continuum grid energy");
    ratio(k) = v / delta;
    sum += ratio(k) * ratio(k);
  }
  const double amp = 1.0 / std::sqrt(1.0 + sum);
  return {amp, ratio * amp};
}

/// Analytic eigenvector of a two-level zone Hamiltonian (both discrete levels
/// coupled), evaluated at one of its eigenvalues. Uses the convention
/// eps_g = 0; the overall sign makes the g component non-negative.
struct TwoLevelCoefficients {
  double amp_g;
  double amp_e;
  RVector amp_modes;
};

inline TwoLevelCoefficients stationary_coefficients_double(
    const ContinuumGrid& grid, const DetectorSpec& spec, double eigenvalue) {
  spec.validate();
  if (spec.coupling_g == 0.0)
    throw ZeroCoupling(
        "two-level coefficients are singular at coupling_g = 0; use the "
        "single-level form");
  if (spec.eps_g != 0.0)
    throw InvalidArgument("two-level coefficients assume eps_g = 0");
  const double guard = kPoleGuardFactor * grid.bandwidth();
  if (std::abs(eigenvalue - spec.eps_e) < guard)
    throw PoleCollision("eigenvalue collides with the excited level energy");

  // ratio of the e and g components, and the shared mode prefactor
  const double e_over_g = eigenvalue * spec.coupling_e /
                          (spec.coupling_g * (eigenvalue - spec.eps_e));
  const double mode_factor = spec.coupling_g + spec.coupling_e * e_over_g;

  double pole_sum = 0.0;
  RVector inv(grid.n_modes);
  for (int k = 0; k < grid.n_modes; ++k) {
    const double delta = eigenvalue - grid.energy(k);
    if (std::abs(delta) < guard)
      throw PoleCollision("eigenvalue collides with a continuum grid energy");
    inv(k) = 1.0 / delta;
    pole_sum += inv(k) * inv(k);
  }

  const double amp_g = 1.0 / std::sqrt(1.0 + e_over_g * e_over_g +
                                       mode_factor * mode_factor * pole_sum);
  return {amp_g, e_over_g * amp_g, (mode_factor * amp_g) * inv};
}

} // namespace iondet
