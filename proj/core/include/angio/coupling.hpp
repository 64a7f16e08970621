#pragma once

#include "angio/common.hpp"
#include "angio/line_quadrature.hpp"

#include <utility>
#include <vector>

namespace angio {

/// Two linear systems exchanging through the network,
///
///   A_O Q  + B_Ot Q  - B_Oa Psi_L = b_O
///   A_L Qh + B_Lh Qh - B_La Psi_O = b_L
///
/// together with the Gram blocks of the mismatch functional
/// J = 1/2 (|trace Q - Psi_O|^2 + |Qh - Psi_L|^2) in L2 of the network.
struct CoupledSystem {
  LinearOperator A_omega;
  LinearOperator A_lambda;
  LinearOperator B_omega_t;   // N x N
  LinearOperator B_omega_a;   // N x Na
  LinearOperator B_lambda_h;  // Nh x Nh
  LinearOperator B_lambda_a;  // Nh x Na
  Vector b_omega;
  Vector b_lambda;

  LinearOperator G_t;   // N x N
  LinearOperator G_ta;  // N x Na
  LinearOperator G_h;   // Nh x Nh
  LinearOperator G_ha;  // Nh x Na
  LinearOperator G_a;   // Na x Na

  /// 1D dofs replaced by the identity row with the given value.
  std::vector<std::pair<int, double>> dirichlet;
};

/// Builds the coupling and Gram blocks from the line quadrature. `beta` is the
/// exchange coefficient per quadrature point (e.g. 2 pi R beta_p times the
/// case factor).
CoupledSystem make_coupled_system(const LineQuadrature& quad, LinearOperator A_omega, Vector b_omega,
                                  LinearOperator A_lambda, Vector b_lambda, const Vector& beta,
                                  std::vector<std::pair<int, double>> dirichlet);

/// Symmetric indefinite optimality system [H C^T; C 0] for the unknowns
/// x = [Q, Qh, Psi_O, Psi_L] and the two constraint multipliers.
struct KktSystem {
  LinearOperator matrix;
  Vector rhs;
  LinearOperator cost;  // H
  int n3d = 0;
  int n1d = 0;
  int naux = 0;
};

KktSystem build_saddle_system(const CoupledSystem& sys);

struct CoupledSolution {
  Vector q;
  Vector q_hat;
  Vector psi_omega;
  Vector psi_lambda;
  Vector multiplier_omega;
  Vector multiplier_lambda;
  double cost = 0.0;
  double residual = 0.0;  // relative KKT residual
};

/// Direct sparse LU of the KKT matrix; throws NumericalError when the
/// factorization fails or the relative residual exceeds `tolerance`.
CoupledSolution solve_kkt(const KktSystem& kkt, double tolerance = 1e-9);

/// Value of J for a candidate solution.
double coupling_cost(const KktSystem& kkt, const Vector& x);

}  // namespace angio
