#include "angio/coupling.hpp"

#include <Eigen/SparseLU>

#include <sstream>

namespace angio {

namespace {

using Triplet = Eigen::Triplet<double>;

void append_block(std::vector<Triplet>& out, const LinearOperator& block, int row0, int col0,
                  double scale, const std::vector<char>* skip_rows = nullptr, bool transpose = false) {
  for (int k = 0; k < block.outerSize(); ++k) {
    for (LinearOperator::InnerIterator it(block, k); it; ++it) {
      const int r = static_cast<int>(it.row());
      if (skip_rows && (*skip_rows)[static_cast<std::size_t>(r)]) {
        continue;
      }
      if (transpose) {
        out.emplace_back(col0 + static_cast<int>(it.col()), row0 + r, scale * it.value());
      } else {
        out.emplace_back(row0 + r, col0 + static_cast<int>(it.col()), scale * it.value());
      }
    }
  }
}

void check_dims(const LinearOperator& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << "coupled system block " << name << " is " << m.rows() << "x" << m.cols() << ", expected "
       << rows << "x" << cols;
    throw InputError(os.str());
  }
}

}  // namespace

CoupledSystem make_coupled_system(const LineQuadrature& quad, LinearOperator A_omega, Vector b_omega,
                                  LinearOperator A_lambda, Vector b_lambda, const Vector& beta,
                                  std::vector<std::pair<int, double>> dirichlet) {
  CoupledSystem sys;
  sys.A_omega = std::move(A_omega);
  sys.A_lambda = std::move(A_lambda);
  sys.b_omega = std::move(b_omega);
  sys.b_lambda = std::move(b_lambda);
  sys.B_omega_t = quad.line_mass(LineSpace::tissue, LineSpace::tissue, beta);
  sys.B_omega_a = quad.line_mass(LineSpace::tissue, LineSpace::aux, beta);
  sys.B_lambda_h = quad.line_mass(LineSpace::primary, LineSpace::primary, beta);
  sys.B_lambda_a = quad.line_mass(LineSpace::primary, LineSpace::aux, beta);
  sys.G_t = quad.line_mass(LineSpace::tissue, LineSpace::tissue);
  sys.G_ta = quad.line_mass(LineSpace::tissue, LineSpace::aux);
  sys.G_h = quad.line_mass(LineSpace::primary, LineSpace::primary);
  sys.G_ha = quad.line_mass(LineSpace::primary, LineSpace::aux);
  sys.G_a = quad.line_mass(LineSpace::aux, LineSpace::aux);
  sys.dirichlet = std::move(dirichlet);
  return sys;
}

KktSystem build_saddle_system(const CoupledSystem& sys) {
  const int n = static_cast<int>(sys.A_omega.rows());
  const int nh = static_cast<int>(sys.A_lambda.rows());
  const int na = static_cast<int>(sys.G_a.rows());
  check_dims(sys.A_omega, n, n, "A_omega");
  check_dims(sys.A_lambda, nh, nh, "A_lambda");
  check_dims(sys.B_omega_t, n, n, "B_omega_t");
  check_dims(sys.B_omega_a, n, na, "B_omega_a");
  check_dims(sys.B_lambda_h, nh, nh, "B_lambda_h");
  check_dims(sys.B_lambda_a, nh, na, "B_lambda_a");
  check_dims(sys.G_t, n, n, "G_t");
  check_dims(sys.G_ta, n, na, "G_ta");
  check_dims(sys.G_h, nh, nh, "G_h");
  check_dims(sys.G_ha, nh, na, "G_ha");
  check_dims(sys.G_a, na, na, "G_a");
  if (sys.b_omega.size() != n || sys.b_lambda.size() != nh) {
    throw InputError("coupled system load vectors have wrong sizes");
  }

  KktSystem kkt;
  kkt.n3d = n;
  kkt.n1d = nh;
  kkt.naux = na;
  const int o_q = 0;
  const int o_qh = n;
  const int o_po = n + nh;
  const int o_pl = n + nh + na;
  const int nx = n + nh + 2 * na;
  const int nc = n + nh;

  std::vector<Triplet> h;
  append_block(h, sys.G_t, o_q, o_q, 1.0);
  append_block(h, sys.G_ta, o_q, o_po, -1.0);
  append_block(h, sys.G_ta, o_q, o_po, -1.0, nullptr, true);
  append_block(h, sys.G_a, o_po, o_po, 1.0);
  append_block(h, sys.G_h, o_qh, o_qh, 1.0);
  append_block(h, sys.G_ha, o_qh, o_pl, -1.0);
  append_block(h, sys.G_ha, o_qh, o_pl, -1.0, nullptr, true);
  append_block(h, sys.G_a, o_pl, o_pl, 1.0);
  kkt.cost.resize(nx, nx);
  kkt.cost.setFromTriplets(h.begin(), h.end());
  kkt.cost.makeCompressed();

  std::vector<char> fixed(static_cast<std::size_t>(nh), 0);
  Vector b_lambda = sys.b_lambda;
  for (const auto& [dof, value] : sys.dirichlet) {
    if (dof < 0 || dof >= nh) {
      throw InputError("Dirichlet dof " + std::to_string(dof) + " out of range");
    }
    fixed[static_cast<std::size_t>(dof)] = 1;
    b_lambda[dof] = value;
  }

  std::vector<Triplet> c;
  append_block(c, sys.A_omega, 0, o_q, 1.0);
  append_block(c, sys.B_omega_t, 0, o_q, 1.0);
  append_block(c, sys.B_omega_a, 0, o_pl, -1.0);
  append_block(c, sys.A_lambda, n, o_qh, 1.0, &fixed);
  append_block(c, sys.B_lambda_h, n, o_qh, 1.0, &fixed);
  append_block(c, sys.B_lambda_a, n, o_po, -1.0, &fixed);
  for (const auto& [dof, value] : sys.dirichlet) {
    c.emplace_back(n + dof, o_qh + dof, 1.0);
  }
  LinearOperator cmat(nc, nx);
  cmat.setFromTriplets(c.begin(), c.end());

  std::vector<Triplet> k = h;
  append_block(k, cmat, nx, 0, 1.0);
  append_block(k, cmat, nx, 0, 1.0, nullptr, true);
  kkt.matrix.resize(nx + nc, nx + nc);
  kkt.matrix.setFromTriplets(k.begin(), k.end());
  kkt.matrix.makeCompressed();

  kkt.rhs = Vector::Zero(nx + nc);
  kkt.rhs.segment(nx, n) = sys.b_omega;
  kkt.rhs.segment(nx + n, nh) = b_lambda;
  return kkt;
}

double coupling_cost(const KktSystem& kkt, const Vector& x) {
  const Vector xs = x.head(kkt.cost.rows());
  return 0.5 * xs.dot(kkt.cost * xs);
}

CoupledSolution solve_kkt(const KktSystem& kkt, double tolerance) {
  Eigen::SparseLU<LinearOperator, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(kkt.matrix);
  lu.factorize(kkt.matrix);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("KKT factorization failed: " + lu.lastErrorMessage());
  }
  Vector sol = lu.solve(kkt.rhs);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("KKT back-substitution failed");
  }
  const double bnorm = kkt.rhs.norm();
  Vector r = kkt.matrix * sol - kkt.rhs;
  double residual = r.norm() / (bnorm > 0.0 ? bnorm : 1.0);
  // One step of iterative refinement when the first solve is marginal.
  if (residual >= tolerance) {
    sol -= lu.solve(r);
    r = kkt.matrix * sol - kkt.rhs;
    residual = r.norm() / (bnorm > 0.0 ? bnorm : 1.0);
  }
  if (!(residual < tolerance)) {
    std::ostringstream os;
    os << "KKT solve residual " << residual << " exceeds tolerance " << tolerance << " after refinement";
    throw NumericalError(os.str());
  }
  CoupledSolution out;
  const int n = kkt.n3d;
  const int nh = kkt.n1d;
  const int na = kkt.naux;
  out.q = sol.segment(0, n);
  out.q_hat = sol.segment(n, nh);
  out.psi_omega = sol.segment(n + nh, na);
  out.psi_lambda = sol.segment(n + nh + na, na);
  out.multiplier_omega = sol.segment(n + nh + 2 * na, n);
  out.multiplier_lambda = sol.segment(2 * n + nh + 2 * na, nh);
  out.cost = coupling_cost(kkt, sol);
  out.residual = residual;
  return out;
}

}  // namespace angio
