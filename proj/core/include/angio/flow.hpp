#pragma once

#include "angio/common.hpp"
#include "angio/coupling.hpp"
#include "angio/line_quadrature.hpp"
#include "angio/mesh.hpp"
#include "angio/parameters.hpp"
#include "angio/tissue.hpp"
#include "angio/vessel_network.hpp"

#include <vector>

namespace angio {

struct FlowParameters {
  double kappa = 3.22e-9;
  double mu = 4e-3 / units::kPascalPerMmHg / units::kSecondsPerHour;
  double beta_p0 = 2.78e-10 * units::kMmHgMassUnits;
  double r_p = 1.0;
  double dp_onc = 25.0;
  double beta_ls = 0.5;
  double p_ls = 0.0;
  double p_in = 33.75;
  double p_out = 35.0;
  double radius = 5e-3;

  static FlowParameters from(const ParameterSet& p);
};

/// Wall exchange law with a case split fixed from previous-step values.
struct ExchangeCoefficients {
  Vector coefficient;  // 2 pi R beta, times phi_l in the absorption case
  Vector outward;      // 1 where the inner value exceeded outer + jump
};

/// Per line-quadrature-point coefficients of the modified Starling law:
/// 2 pi R beta where inner_prev > outer_prev + jump, 2 pi R beta phi_l
/// elsewhere. beta is `beta0` on the initial network and `scale * beta0` on
/// segments with birth_time > 0.
ExchangeCoefficients starling_flux_coefficients(const LineQuadrature& quad, const VesselNetwork& net,
                                                double beta0, double scale, double jump,
                                                const Vector& inner_prev, const Vector& outer_prev,
                                                const Vector& phil_trace);

struct PressureInputs {
  const NodalField* phi = nullptr;        // tumor fraction at t_k
  const NodalField* phil = nullptr;       // liquid fraction at t_k
  const NodalField* phil_prev = nullptr;  // liquid fraction at t_{k-1}
  const NodalField* oxygen_prev = nullptr;
  Vector p_hat_prev;      // 1D pressure from t_{k-1}, current dof layout
  Vector psi_omega_prev;  // auxiliary trace pressure from t_{k-1}
  double dt = 6.0;
  bool storage = true;      // include (phil - phil_prev) / dt
  bool growth_sink = true;  // include phi S_c(phi, c)
  int case_iterations = 1;  // re-selection of the Starling case within the step
};

struct PressureResult {
  NodalField p;
  Vector p_hat;
  Vector psi_omega;
  Vector psi_lambda;
  std::vector<Vec3> velocity;                     // per tet
  std::vector<std::vector<double>> vessel_velocity;  // per segment, per element
  double cost = 0.0;
  double residual = 0.0;
  double source_3d = 0.0;  // int f_p(psi_lambda, trace p) ds
  double sink_1d = 0.0;    // int f_p(p_hat, psi_omega) ds
  double lymphatic = 0.0;  // int phil beta_ls (p - p_ls) dx
  double storage = 0.0;    // int (phil - phil_prev) / dt dx
  double growth = 0.0;     // int phi S_c dx
};

PressureResult pressure_step(const TetMesh& mesh, const VesselNetwork& net, const LineQuadrature& quad,
                             const FlowParameters& fp, const TumorConstitutive& tc,
                             const PressureInputs& in);

/// v_l = -(1 / (1 - phil)) (kappa / mu) grad p, phil averaged over each tet.
std::vector<Vec3> tissue_velocity(const TetMesh& mesh, const NodalField& p, const NodalField& phil,
                                  const FlowParameters& fp);

/// v = -(R^2 / 8 mu) dp/ds on each 1D element, s oriented along the segment.
std::vector<std::vector<double>> vessel_velocity(const VesselNetwork& net, const Vector& p_hat,
                                                 const FlowParameters& fp);

/// Fixed 1D dofs: inlet and outlet junctions.
std::vector<std::pair<int, double>> pressure_dirichlet(const VesselNetwork& net, const FlowParameters& fp);

}  // namespace angio
