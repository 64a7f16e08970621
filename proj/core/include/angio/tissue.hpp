#pragma once

#include "angio/common.hpp"
#include "angio/mesh.hpp"
#include "angio/parameters.hpp"

#include <vector>

namespace angio {

/// Constitutive data of the tumor cell phase.
struct TumorConstitutive {
  double young = 10e3 / units::kPascalPerMmHg;  // E (mmHg)
  double motility = 1e-4 * units::kSecondsPerHour * units::kPascalPerMmHg / 1e6;
  double phi_max = 1.0;
  double phi_0 = 0.5;
  double gamma = 1.93e-2;
  double c_ref = 10.5;
  /// Distance below phi_max treated as saturation.
  double saturation_guard = 1e-6;

  static TumorConstitutive from(const ParameterSet& p);
  /// Throws InputError unless 0 < phi_0 < phi_max <= 1 and E, M, gamma, c_ref > 0.
  void validate() const;
};

/// Cell stress Sigma(phi) = E (phi - phi_0) phi / (phi_max - phi).
double cell_stress(const TumorConstitutive& tc, double phi);

/// F_c(phi) = M phi Sigma'(phi); throws NumericalError for phi >= phi_max.
double diffusivity_fc(const TumorConstitutive& tc, double phi);
double diffusivity_fc_derivative(const TumorConstitutive& tc, double phi);

/// S_c(phi, c) = gamma / c_ref ((phi_max - phi) c - c_ref)_+
double growth_rate(const TumorConstitutive& tc, double phi, double c);
/// d S_c / d phi, with the sub-gradient 0 at the kink.
double growth_rate_derivative(const TumorConstitutive& tc, double phi, double c);

/// Residual G(Phi) = (B + K(Phi) - M(Phi)) Phi - B Phi0 of one backward Euler step.
Vector tumor_residual(const TetMesh& mesh, const TumorConstitutive& tc, const NodalField& phi,
                      const NodalField& phi_prev, const NodalField& oxygen, double dt);

/// Jacobian of tumor_residual with respect to Phi.
LinearOperator tumor_jacobian(const TetMesh& mesh, const TumorConstitutive& tc, const NodalField& phi,
                              const NodalField& oxygen, double dt);

struct NewtonSettings {
  double abs_tolerance_per_node = 1e-10;  // ||G|| < this * N
  double rel_tolerance = 1e-8;            // ||G|| < rel * ||G(Phi0)||
  int max_iterations = 30;
  int max_halvings = 8;
};

struct TumorStepResult {
  NodalField phi;
  int iterations = 0;  // total Newton iterations over all sub-steps
  int substeps = 1;
  double residual = 0.0;
  /// Increment norms of the last successful sub-step.
  std::vector<double> increments;
};

/// Advances Phi over dt with Newton's method; the interval is halved up to
/// max_halvings times when an iteration diverges or leaves [0, phi_max).
TumorStepResult tumor_step(const TetMesh& mesh, const TumorConstitutive& tc, const NodalField& phi_prev,
                           const NodalField& oxygen, double dt, const NewtonSettings& settings = {});

/// Liquid fraction Phi_l = phi_max - Phi.
NodalField update_phil(const TumorConstitutive& tc, const NodalField& phi);

}  // namespace angio
