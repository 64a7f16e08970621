#include "angio/angiogenesis.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace angio {

std::string Rng::state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::set_state(const std::string& text) {
  std::istringstream is(text);
  is >> engine_;
  if (!is) {
    throw InputError("corrupt random number generator state");
  }
}

GrowthParameters GrowthParameters::from(const ParameterSet& p) {
  GrowthParameters gp;
  gp.g_lim = p.g_lim;
  gp.g_bar = p.g_bar;
  gp.g_br = p.g_br;
  gp.l_e = p.l_e;
  gp.tau = p.tau;
  gp.tau_br = p.tau_br;
  gp.alpha_br = p.alpha_br;
  gp.d_br = p.d_br;
  return gp;
}

void GrowthParameters::validate() const {
  if (!(g_lim > 0.0 && g_lim < g_bar && g_bar <= g_br)) {
    throw InputError("growth parameters must satisfy 0 < g_lim < g_bar <= g_br");
  }
  if (!(l_e > 0.0 && tau > 0.0 && tau_br > 0.0 && d_br > 0.0)) {
    throw InputError("l_e, tau, tau_br and d_br must be positive");
  }
  if (!(alpha_br > 0.0 && alpha_br < 1.0)) {
    throw InputError("alpha_br must lie in (0, 1)");
  }
}

EcmField build_ecm(const TetMesh& mesh, std::uint64_t seed, double magnitude) {
  if (magnitude < 0.0 || magnitude >= 0.5) {
    throw InputError("ECM perturbation magnitude must lie in [0, 0.5)");
  }
  EcmField ecm;
  ecm.tensors.assign(static_cast<std::size_t>(mesh.num_tets()), Eigen::Matrix3d::Identity());
  if (magnitude == 0.0) {
    return ecm;
  }
  Rng rng(seed);
  for (auto& k : ecm.tensors) {
    Eigen::Matrix3d a;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        a(i, j) = 2.0 * rng.uniform() - 1.0;
      }
    }
    k = Eigen::Matrix3d::Identity() + magnitude * 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(k);
    const Eigen::Vector3d lambda = eig.eigenvalues();
    if (lambda.minCoeff() < 0.1) {
      const Eigen::Vector3d floored = lambda.cwiseMax(0.1);
      k = eig.eigenvectors() * floored.asDiagonal() * eig.eigenvectors().transpose();
      k = 0.5 * (k + k.transpose());
    }
  }
  return ecm;
}

double cell_cycle_time(const GrowthParameters& gp, double g) {
  if (!(g > 0.0)) {
    return std::numeric_limits<double>::infinity();
  }
  return gp.tau * (1.0 + std::exp(gp.g_bar / g - 1.0));
}

TipVelocity tip_velocity(const GrowthParameters& gp, double g, const Vec3& grad_g, const Eigen::Matrix3d& k) {
  TipVelocity out;
  if (!(g >= gp.g_lim)) {
    return out;
  }
  const Vec3 dir = k * grad_g;
  const double norm = dir.norm();
  if (norm < 1e-14) {
    out.degenerate = true;
    return out;
  }
  const double tc = cell_cycle_time(gp, g);
  if (!std::isfinite(tc)) {
    return out;
  }
  out.w = (gp.l_e / tc) * dir / norm;
  return out;
}

std::pair<double, double> branching_logistic(const GrowthParameters& gp) {
  const double l99 = std::log(99.0);
  const double l19 = std::log(19.0);
  const double a = gp.g_bar * (l99 + l19) / (gp.g_br - gp.g_lim);
  const double d = gp.g_br / gp.g_bar - l99 / a;
  return {a, d};
}

double branching_probability(const GrowthParameters& gp, double g) {
  const auto [a, d] = branching_logistic(gp);
  return 1.0 / (1.0 + std::exp(-a * (g / gp.g_bar - d)));
}

BranchDecision branching_check(const Tip& tip, const Vec3& w, double g, const GrowthParameters& gp, Rng& rng) {
  BranchDecision out;
  if (tip.age < gp.tau_br) {
    return out;
  }
  const double wn = w.norm();
  if (wn == 0.0) {
    return out;
  }
  const Vec3 perp = w - w.dot(tip.direction) * tip.direction;
  const double pn = perp.norm();
  if (pn == 0.0 || pn < gp.alpha_br * wn) {
    return out;
  }
  if (rng.uniform() < branching_probability(gp, g)) {
    out.branch = true;
    out.normal = perp / pn;
  }
  return out;
}

std::string to_string(GrowthEventKind kind) {
  switch (kind) {
    case GrowthEventKind::advance: return "advance";
    case GrowthEventKind::branch: return "branch";
    case GrowthEventKind::freeze: return "freeze";
  }
  return "advance";
}

namespace {

bool inside(const TetMesh& mesh, const Vec3& x) { return mesh.find(x, location_tolerance(mesh)).has_value(); }

// Appends a segment from the tip's junction to x and returns the new tip junction.
int grow_to(VesselNetwork& net, int from, const Vec3& x, double time) {
  const int j = net.add_junction(x, JunctionKind::tip);
  net.add_segment(from, j, time);
  net.set_kind(from, JunctionKind::interior);
  return j;
}

}  // namespace

std::vector<GrowthEvent> advance_tips(VesselNetwork& net, const TetMesh& mesh, const NodalField& g,
                                      const EcmField& ecm, double dt, double time, const GrowthParameters& gp,
                                      Rng& rng) {
  if (g.size() != mesh.num_nodes()) {
    throw InputError("advance_tips: VEGF field does not match the mesh");
  }
  if (static_cast<int>(ecm.tensors.size()) != mesh.num_tets()) {
    throw InputError("advance_tips: ECM field does not match the mesh");
  }
  std::vector<GrowthEvent> events;
  std::vector<Tip> next;
  const std::vector<Tip> current = net.tips();
  const double ell = gp.threshold();
  for (Tip tip : current) {
    if (tip.frozen) {
      tip.age += dt;
      next.push_back(tip);
      continue;
    }
    const Vec3 x = net.junctions()[static_cast<std::size_t>(tip.junction)].position;
    const auto loc = mesh.find(x, location_tolerance(mesh));
    if (!loc) {
      tip.frozen = true;
      events.push_back({time, GrowthEventKind::freeze, tip.junction, x, 0.0});
      next.push_back(tip);
      continue;
    }
    double gx = 0.0;
    const auto& tet = mesh.tets()[static_cast<std::size_t>(loc->tet)];
    for (int a = 0; a < 4; ++a) {
      gx += loc->bary[static_cast<std::size_t>(a)] * g[tet[static_cast<std::size_t>(a)]];
    }
    const Vec3 grad = mesh.gradient(g, loc->tet);
    const Vec3 w = tip_velocity(gp, gx, grad, ecm.tensors[static_cast<std::size_t>(loc->tet)]).w;

    const BranchDecision br = branching_check(tip, w, gx, gp, rng);
    if (br.branch) {
      Vec3 disp = tip.accumulator + dt * w;
      double len = disp.norm();
      if (len < ell) {
        disp = (len > 0.0 ? disp / len : w.normalized()) * ell;
        len = ell;
      }
      const Vec3 v1 = disp + br.normal * gp.d_br;
      const Vec3 v2 = disp - br.normal * gp.d_br;
      // A split that cancels the displacement leaves no direction for one child.
      const bool split_ok = std::min(v1.norm(), v2.norm()) > 1e-12 * len;
      const Vec3 d1 = split_ok ? Vec3(v1.normalized()) : Vec3::Zero();
      const Vec3 d2 = split_ok ? Vec3(v2.normalized()) : Vec3::Zero();
      const Vec3 x1 = x + len * d1;
      const Vec3 x2 = x + len * d2;
      if (split_ok && inside(mesh, x1) && inside(mesh, x2)) {
        events.push_back({time, GrowthEventKind::branch, tip.junction, x, gx});
        for (const auto& [xc, dc] : {std::pair{x1, d1}, std::pair{x2, d2}}) {
          Tip child;
          child.junction = grow_to(net, tip.junction, xc, time);
          child.parent_segment = net.num_segments() - 1;
          child.direction = dc;
          next.push_back(child);
          events.push_back({time, GrowthEventKind::advance, child.junction, xc, gx});
        }
        continue;
      }
    }

    const Vec3 disp = tip.accumulator + dt * w;
    if (disp.norm() >= ell) {
      const Vec3 target = x + disp;
      if (!inside(mesh, target)) {
        tip.frozen = true;
        events.push_back({time, GrowthEventKind::freeze, tip.junction, x, gx});
      } else {
        tip.junction = grow_to(net, tip.junction, target, time);
        tip.parent_segment = net.num_segments() - 1;
        tip.direction = disp.normalized();
        tip.accumulator = Vec3::Zero();
        events.push_back({time, GrowthEventKind::advance, tip.junction, target, gx});
      }
    } else {
      tip.accumulator = disp;
    }
    tip.age += dt;
    next.push_back(tip);
  }
  net.tips() = std::move(next);
  return events;
}

void write_event_log(const std::string& path, const std::vector<GrowthEvent>& events) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write event log " + path);
  }
  out.precision(17);
  out << "time_h,event,tip,x,y,z,g\n";
  for (const auto& e : events) {
    out << e.time << ',' << to_string(e.kind) << ',' << e.tip << ',' << e.x[0] << ',' << e.x[1] << ','
        << e.x[2] << ',' << e.g << '\n';
  }
}

}  // namespace angio
