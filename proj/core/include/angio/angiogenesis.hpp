#pragma once

#include "angio/common.hpp"
#include "angio/mesh.hpp"
#include "angio/parameters.hpp"
#include "angio/vessel_network.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace angio {

/// Seeded 64-bit Mersenne twister with a portable uniform draw; the engine
/// state can be saved and restored as text.
class Rng {
 public:
  Rng() : engine_(1) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t next() { return engine_(); }
  std::string state() const;
  void set_state(const std::string& text);

 private:
  std::mt19937_64 engine_;
};

struct GrowthParameters {
  double g_lim = 0.25;
  double g_bar = 1.0;
  double g_br = 1.5;
  double l_e = 0.04;
  double tau = 36.0;
  double tau_br = 48.0;
  double alpha_br = 0.3;
  double d_br = 0.04;

  /// Displacement threshold for appending a segment (one cell length).
  double threshold() const { return l_e; }
  static GrowthParameters from(const ParameterSet& p);
  void validate() const;
};

/// Per-tet symmetric positive definite orientation tensors.
struct EcmField {
  std::vector<Eigen::Matrix3d> tensors;
};

/// K = I + m (A + A^T) / 2 with A uniform in (-1, 1), eigenvalues floored at 0.1.
EcmField build_ecm(const TetMesh& mesh, std::uint64_t seed, double magnitude);

/// t_c = tau (1 + exp(g_bar / g - 1)); +inf for g <= 0.
double cell_cycle_time(const GrowthParameters& gp, double g);

struct TipVelocity {
  Vec3 w = Vec3::Zero();
  bool degenerate = false;  // g >= g_lim but |K grad g| vanished
};

TipVelocity tip_velocity(const GrowthParameters& gp, double g, const Vec3& grad_g, const Eigen::Matrix3d& k);

/// Logistic P_br(g) = 1 / (1 + exp(-a (g / g_bar - d))) through
/// P_br(g_br) = 0.99 and P_br(g_lim) = 0.05.
double branching_probability(const GrowthParameters& gp, double g);
std::pair<double, double> branching_logistic(const GrowthParameters& gp);

struct BranchDecision {
  bool branch = false;
  Vec3 normal = Vec3::Zero();  // unit perpendicular component of w
};

/// Age, perpendicularity and probability gates. A uniform number is drawn
/// only when the first two gates pass.
BranchDecision branching_check(const Tip& tip, const Vec3& w, double g, const GrowthParameters& gp, Rng& rng);

enum class GrowthEventKind { advance, branch, freeze };
std::string to_string(GrowthEventKind kind);

struct GrowthEvent {
  double time = 0.0;
  GrowthEventKind kind = GrowthEventKind::advance;
  int tip = -1;  // tip junction id
  Vec3 x = Vec3::Zero();
  double g = 0.0;
};

/// One growth update over dt using the VEGF field g. New segments carry
/// birth_time = time. Returns the events in tip order.
std::vector<GrowthEvent> advance_tips(VesselNetwork& net, const TetMesh& mesh, const NodalField& g,
                                      const EcmField& ecm, double dt, double time, const GrowthParameters& gp,
                                      Rng& rng);

void write_event_log(const std::string& path, const std::vector<GrowthEvent>& events);

}  // namespace angio
