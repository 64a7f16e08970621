#include "angio/tissue.hpp"

#include "angio/quadrature.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace angio {

TumorConstitutive TumorConstitutive::from(const ParameterSet& p) {
  TumorConstitutive tc;
  tc.young = p.young;
  tc.motility = p.motility;
  tc.phi_max = p.phi_max;
  tc.phi_0 = p.phi_0;
  tc.gamma = p.gamma;
  tc.c_ref = p.c_ref;
  return tc;
}

void TumorConstitutive::validate() const {
  if (!(phi_0 > 0.0 && phi_0 < phi_max && phi_max <= 1.0)) {
    throw InputError("tumor fractions must satisfy 0 < phi_0 < phi_max <= 1");
  }
  if (!(young > 0.0 && motility > 0.0 && gamma > 0.0 && c_ref > 0.0)) {
    throw InputError("E, M, gamma and c_ref must be positive");
  }
}

double cell_stress(const TumorConstitutive& tc, double phi) {
  return tc.young * (phi - tc.phi_0) * phi / (tc.phi_max - phi);
}

namespace {

void check_saturation(const TumorConstitutive& tc, double phi) {
  if (!(phi < tc.phi_max - tc.saturation_guard)) {
    std::ostringstream os;
    os << "tumor fraction " << phi << " reached the saturation limit phi_max = " << tc.phi_max;
    throw NumericalError(os.str());
  }
}

}  // namespace

double diffusivity_fc(const TumorConstitutive& tc, double phi) {
  check_saturation(tc, phi);
  const double gap = tc.phi_max - phi;
  return tc.young * tc.motility * phi * (tc.phi_max * (2.0 * phi - tc.phi_0) - phi * phi) / (gap * gap);
}

double diffusivity_fc_derivative(const TumorConstitutive& tc, double phi) {
  check_saturation(tc, phi);
  const double gap = tc.phi_max - phi;
  const double n = 2.0 * tc.phi_max * phi * phi - tc.phi_max * tc.phi_0 * phi - phi * phi * phi;
  const double dn = 4.0 * tc.phi_max * phi - tc.phi_max * tc.phi_0 - 3.0 * phi * phi;
  return tc.young * tc.motility * (dn / (gap * gap) + 2.0 * n / (gap * gap * gap));
}

double growth_rate(const TumorConstitutive& tc, double phi, double c) {
  const double arg = (tc.phi_max - phi) * c - tc.c_ref;
  return arg > 0.0 ? tc.gamma / tc.c_ref * arg : 0.0;
}

double growth_rate_derivative(const TumorConstitutive& tc, double phi, double c) {
  const double arg = (tc.phi_max - phi) * c - tc.c_ref;
  return arg > 0.0 ? -tc.gamma / tc.c_ref * c : 0.0;
}

namespace {

// Element loop shared by residual and Jacobian.
void assemble_tumor(const TetMesh& mesh, const TumorConstitutive& tc, const NodalField& phi,
                    const NodalField* phi_prev, const NodalField& oxygen, double dt, Vector* residual,
                    std::vector<Eigen::Triplet<double>>* jac) {
  if (phi.size() != mesh.num_nodes() || oxygen.size() != mesh.num_nodes() ||
      (phi_prev && phi_prev->size() != mesh.num_nodes())) {
    throw InputError("tumor assembly: field sizes do not match the mesh");
  }
  if (!(dt > 0.0)) {
    throw InputError("tumor assembly: time step must be positive");
  }
  const double inv_dt = 1.0 / dt;
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto& tet = mesh.tets()[static_cast<std::size_t>(t)];
    const TetGeometry& g = mesh.geometry(t);
    double phin[4];
    double cn[4];
    double phi0n[4] = {};
    Vec3 grad = Vec3::Zero();
    for (int a = 0; a < 4; ++a) {
      const int node = tet[static_cast<std::size_t>(a)];
      phin[a] = phi[node];
      cn[a] = oxygen[node];
      if (phi_prev) {
        phi0n[a] = (*phi_prev)[node];
      }
      grad += phin[a] * g.grad[static_cast<std::size_t>(a)];
    }
    double gdot[4];
    for (int a = 0; a < 4; ++a) {
      gdot[a] = grad.dot(g.grad[static_cast<std::size_t>(a)]);
    }
    double res[4] = {};
    double local[4][4] = {};
    for (const auto& qp : quadrature::kTet4) {
      double pq = 0.0;
      double p0q = 0.0;
      double cq = 0.0;
      for (int a = 0; a < 4; ++a) {
        pq += qp.bary[static_cast<std::size_t>(a)] * phin[a];
        p0q += qp.bary[static_cast<std::size_t>(a)] * phi0n[a];
        cq += qp.bary[static_cast<std::size_t>(a)] * cn[a];
      }
      const double w = qp.weight * g.volume;
      const double fc = diffusivity_fc(tc, pq);
      const double sc = growth_rate(tc, pq, cq);
      if (residual) {
        for (int l = 0; l < 4; ++l) {
          res[l] += w * ((inv_dt * (pq - p0q) - sc * pq) * qp.bary[static_cast<std::size_t>(l)] + fc * gdot[l]);
        }
      }
      if (jac) {
        const double dfc = diffusivity_fc_derivative(tc, pq);
        const double react = inv_dt - (growth_rate_derivative(tc, pq, cq) * pq + sc);
        for (int l = 0; l < 4; ++l) {
          const double el = qp.bary[static_cast<std::size_t>(l)];
          for (int m = 0; m < 4; ++m) {
            const double em = qp.bary[static_cast<std::size_t>(m)];
            local[l][m] += w * (react * em * el +
                                fc * g.grad[static_cast<std::size_t>(m)].dot(g.grad[static_cast<std::size_t>(l)]) +
                                dfc * em * gdot[l]);
          }
        }
      }
    }
    for (int l = 0; l < 4; ++l) {
      const int rl = tet[static_cast<std::size_t>(l)];
      if (residual) {
        (*residual)[rl] += res[l];
      }
      if (jac) {
        for (int m = 0; m < 4; ++m) {
          jac->emplace_back(rl, tet[static_cast<std::size_t>(m)], local[l][m]);
        }
      }
    }
  }
}

}  // namespace

Vector tumor_residual(const TetMesh& mesh, const TumorConstitutive& tc, const NodalField& phi,
                      const NodalField& phi_prev, const NodalField& oxygen, double dt) {
  Vector r = Vector::Zero(mesh.num_nodes());
  assemble_tumor(mesh, tc, phi, &phi_prev, oxygen, dt, &r, nullptr);
  return r;
}

LinearOperator tumor_jacobian(const TetMesh& mesh, const TumorConstitutive& tc, const NodalField& phi,
                              const NodalField& oxygen, double dt) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(16 * mesh.num_tets()));
  assemble_tumor(mesh, tc, phi, nullptr, oxygen, dt, nullptr, &triplets);
  LinearOperator j(mesh.num_nodes(), mesh.num_nodes());
  j.setFromTriplets(triplets.begin(), triplets.end());
  j.makeCompressed();
  return j;
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  NodalField phi;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> increments;
  std::string reason;
};

NewtonOutcome newton_solve(const TetMesh& mesh, const TumorConstitutive& tc, const NodalField& phi_prev,
                           const NodalField& oxygen, double dt, const NewtonSettings& s) {
  NewtonOutcome out;
  out.phi = phi_prev;
  const double abs_tol = s.abs_tolerance_per_node * mesh.num_nodes();
  const double bound = tc.phi_max - 0.5 * tc.saturation_guard;
  Eigen::SparseLU<LinearOperator, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  try {
    Vector g = tumor_residual(mesh, tc, out.phi, phi_prev, oxygen, dt);
    const double g0 = g.norm();
    out.residual = g0;
    for (int it = 0; it <= s.max_iterations; ++it) {
      if (out.residual < abs_tol || out.residual <= s.rel_tolerance * g0) {
        out.converged = true;
        return out;
      }
      if (it == s.max_iterations) {
        out.reason = "no convergence within the iteration limit";
        return out;
      }
      const LinearOperator jac = tumor_jacobian(mesh, tc, out.phi, oxygen, dt);
      if (!analyzed) {
        lu.analyzePattern(jac);
        analyzed = true;
      }
      lu.factorize(jac);
      if (lu.info() != Eigen::Success) {
        out.reason = "singular Jacobian";
        return out;
      }
      const Vector delta = lu.solve(-g);
      out.phi += delta;
      ++out.iterations;
      out.increments.push_back(delta.norm());
      if (!out.phi.allFinite()) {
        out.reason = "non-finite iterate";
        return out;
      }
      if (out.phi.maxCoeff() > bound) {
        out.reason = "iterate exceeded phi_max - guard/2";
        return out;
      }
      g = tumor_residual(mesh, tc, out.phi, phi_prev, oxygen, dt);
      out.residual = g.norm();
      if (!std::isfinite(out.residual) || out.residual > 1e6 * std::max(g0, abs_tol)) {
        out.reason = "residual diverged";
        return out;
      }
    }
  } catch (const NumericalError& e) {
    out.reason = e.what();
  }
  return out;
}

}  // namespace

TumorStepResult tumor_step(const TetMesh& mesh, const TumorConstitutive& tc, const NodalField& phi_prev,
                           const NodalField& oxygen, double dt, const NewtonSettings& settings) {
  if (phi_prev.size() != mesh.num_nodes() || oxygen.size() != mesh.num_nodes()) {
    throw InputError("tumor_step: field sizes do not match the mesh");
  }
  TumorStepResult result;
  std::string last_reason;
  for (int level = 0; level <= settings.max_halvings; ++level) {
    const int pieces = 1 << level;
    const double h = dt / pieces;
    NodalField phi = phi_prev;
    bool ok = true;
    int iterations = 0;
    NewtonOutcome step;
    for (int k = 0; k < pieces && ok; ++k) {
      step = newton_solve(mesh, tc, phi, oxygen, h, settings);
      iterations += step.iterations;
      if (!step.converged) {
        ok = false;
        last_reason = step.reason;
      } else {
        phi = step.phi;
      }
    }
    result.iterations += iterations;
    if (ok) {
      result.phi = std::move(phi);
      result.substeps = pieces;
      result.residual = step.residual;
      result.increments = std::move(step.increments);
      return result;
    }
  }
  std::ostringstream os;
  os << "tumor Newton solve failed after " << settings.max_halvings << " halvings of dt = " << dt
     << " h (" << result.iterations << " iterations): " << last_reason;
  throw NumericalError(os.str());
}

NodalField update_phil(const TumorConstitutive& tc, const NodalField& phi) {
  return NodalField::Constant(phi.size(), tc.phi_max) - phi;
}

}  // namespace angio
