#pragma once

#include "angio/common.hpp"
#include "angio/flow.hpp"
#include "angio/line_quadrature.hpp"
#include "angio/mesh.hpp"
#include "angio/parameters.hpp"
#include "angio/vessel_network.hpp"

#include <span>
#include <vector>

namespace angio {

enum class OutletCondition { zero_flux, zero_concentration };

struct TransportParameters {
  double d_c = 4.86;
  double d_c_vessel = 1.8e3;
  double beta_c0 = 12.6;
  double r_c = 1.0;
  double m_c = 0.55;
  double c_in = 95.0;
  double phi_max = 1.0;
  double d_g = 0.18;
  double sigma = 0.5;
  double sigma_tilde = 1.4;
  double production = 1.0;
  double c_star = 11.5;
  double b = 11.5;
  double radius = 5e-3;
  OutletCondition outlet = OutletCondition::zero_flux;
  bool artificial_diffusion = false;

  static TransportParameters from(const ParameterSet& p);
};

struct OxygenInputs {
  const NodalField* c_prev = nullptr;
  const NodalField* phil = nullptr;
  std::span<const Vec3> velocity;
  const std::vector<std::vector<double>>* vessel_velocity = nullptr;
  Vector c_hat_prev;        // zero on segments created this step
  Vector theta_omega_prev;  // auxiliary trace concentration from t_{k-1}
  double dt = 6.0;
  bool steady = false;  // drop both time derivatives
  int case_iterations = 1;
};

struct OxygenResult {
  NodalField c;
  Vector c_hat;
  Vector theta_omega;
  Vector theta_lambda;
  double cost = 0.0;
  double residual = 0.0;
  double source_3d = 0.0;  // int f_c(theta_lambda, trace c) ds
  double sink_1d = 0.0;    // int f_c(c_hat, theta_omega) ds
};

OxygenResult oxygen_step(const TetMesh& mesh, const VesselNetwork& net, const LineQuadrature& quad,
                         const TransportParameters& tp, const OxygenInputs& in);

/// Gamma_g = G phi (1 - 1 / (1 + exp(b (1 - phil c / c*)))).
double vegf_source(const TransportParameters& tp, double phi, double c, double phil);

struct VegfInputs {
  const NodalField* g_prev = nullptr;
  const NodalField* phi = nullptr;
  const NodalField* phil = nullptr;
  const NodalField* oxygen = nullptr;
  std::span<const Vec3> velocity;
  double dt = 6.0;
};

/// One implicit step; the wall sink 2 pi R sigma~ phil g is kept implicit
/// through the trace-weighted line mass.
NodalField vegf_step(const TetMesh& mesh, const LineQuadrature* quad, const TransportParameters& tp,
                     const VegfInputs& in);

}  // namespace angio
