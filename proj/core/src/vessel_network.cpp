#include "angio/vessel_network.hpp"

#include "angio/line_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace angio {

namespace {

using Triplet = Eigen::Triplet<double>;

constexpr double kBaryEps = 1e-12;
constexpr double kParamEps = 1e-12;

}  // namespace

std::string to_string(JunctionKind kind) {
  switch (kind) {
    case JunctionKind::interior: return "interior";
    case JunctionKind::inlet: return "inlet";
    case JunctionKind::outlet: return "outlet";
    case JunctionKind::tip: return "tip";
  }
  return "interior";
}

JunctionKind parse_junction_kind(const std::string& text) {
  if (text == "interior") return JunctionKind::interior;
  if (text == "inlet") return JunctionKind::inlet;
  if (text == "outlet") return JunctionKind::outlet;
  if (text == "tip") return JunctionKind::tip;
  throw InputError("unknown junction flag '" + text + "' (expected interior, inlet, outlet or tip)");
}

int VesselNetwork::add_junction(const Vec3& x, JunctionKind kind) {
  junctions_.push_back(Junction{x, kind, {}});
  partitioned_ = false;
  return num_junctions() - 1;
}

int VesselNetwork::add_segment(int j0, int j1, double birth_time) {
  if (j0 < 0 || j1 < 0 || j0 >= num_junctions() || j1 >= num_junctions() || j0 == j1) {
    throw InputError("segment references invalid junctions " + std::to_string(j0) + ", " +
                     std::to_string(j1));
  }
  Segment seg;
  seg.junctions = {j0, j1};
  seg.birth_time = birth_time;
  seg.length = (junctions_[static_cast<std::size_t>(j1)].position -
                junctions_[static_cast<std::size_t>(j0)].position)
                   .norm();
  if (!(seg.length > 1e-12)) {
    throw InputError("zero-length segment between junctions " + std::to_string(j0) + " and " +
                     std::to_string(j1));
  }
  segments_.push_back(std::move(seg));
  const int id = num_segments() - 1;
  junctions_[static_cast<std::size_t>(j0)].segments.push_back(id);
  junctions_[static_cast<std::size_t>(j1)].segments.push_back(id);
  partitioned_ = false;
  return id;
}

void VesselNetwork::reset_tips() {
  tips_.clear();
  for (int j = 0; j < num_junctions(); ++j) {
    const Junction& jn = junctions_[static_cast<std::size_t>(j)];
    if (jn.kind != JunctionKind::tip) {
      continue;
    }
    if (jn.segments.size() != 1) {
      throw InputError("tip junction " + std::to_string(j) + " must have exactly one segment");
    }
    Tip tip;
    tip.junction = j;
    tip.parent_segment = jn.segments.front();
    const Segment& s = segments_[static_cast<std::size_t>(tip.parent_segment)];
    const int other = s.junctions[0] == j ? s.junctions[1] : s.junctions[0];
    tip.direction = (jn.position - junctions_[static_cast<std::size_t>(other)].position).normalized();
    tips_.push_back(tip);
  }
}

Vec3 VesselNetwork::point(int segment, double t) const {
  const Segment& s = segments_[static_cast<std::size_t>(segment)];
  const Vec3& a = junctions_[static_cast<std::size_t>(s.junctions[0])].position;
  const Vec3& b = junctions_[static_cast<std::size_t>(s.junctions[1])].position;
  return a + t * (b - a);
}

Vec3 VesselNetwork::direction(int segment) const {
  return (point(segment, 1.0) - point(segment, 0.0)).normalized();
}

double VesselNetwork::total_length() const {
  double total = 0.0;
  for (const auto& s : segments_) {
    total += s.length;
  }
  return total;
}

int VesselNetwork::num_tips() const {
  return static_cast<int>(std::count_if(junctions_.begin(), junctions_.end(), [](const Junction& j) {
    return j.kind == JunctionKind::tip;
  }));
}

Vec3 VesselNetwork::dof_position(int dof) const {
  const auto [seg, node] = dof_owner_.at(static_cast<std::size_t>(dof));
  const Segment& s = segments_[static_cast<std::size_t>(seg)];
  return point(seg, static_cast<double>(node) / (s.primary_nodes - 1));
}

std::vector<int> VesselNetwork::dofs_of_kind(JunctionKind kind) const {
  std::vector<int> out;
  for (int j = 0; j < num_junctions(); ++j) {
    if (junctions_[static_cast<std::size_t>(j)].kind == kind) {
      out.push_back(j);  // junction j owns dof j
    }
  }
  return out;
}

VesselNetwork load_network(const std::filesystem::path& path, double radius) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open network file " + path.string());
  }
  std::string line;
  int line_no = 0;
  auto next_line = [&](const std::string& what) {
    while (std::getline(in, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] != '#') {
        return;
      }
    }
    throw InputError("network file " + path.string() + ": unexpected end of file reading " + what);
  };
  auto fail = [&](const std::string& msg) {
    throw InputError("network file " + path.string() + " line " + std::to_string(line_no) + ": " + msg);
  };
  next_line("header");
  int nj = 0;
  int ns = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> nj >> ns) || nj < 2 || ns < 1) {
      fail("bad header '" + line + "'");
    }
  }
  VesselNetwork net(radius);
  for (int i = 0; i < nj; ++i) {
    next_line("junction " + std::to_string(i));
    std::istringstream ls(line);
    double x = 0, y = 0, z = 0;
    std::string flag;
    if (!(ls >> x >> y >> z >> flag)) {
      fail("cannot parse junction " + std::to_string(i));
    }
    net.add_junction(Vec3(x, y, z), parse_junction_kind(flag));
  }
  for (int i = 0; i < ns; ++i) {
    next_line("segment " + std::to_string(i));
    std::istringstream ls(line);
    int a = 0, b = 0;
    double birth = 0.0;
    if (!(ls >> a >> b >> birth)) {
      fail("cannot parse segment " + std::to_string(i));
    }
    net.add_segment(a, b, birth);
  }
  for (int j = 0; j < net.num_junctions(); ++j) {
    const Junction& jn = net.junctions()[static_cast<std::size_t>(j)];
    const std::size_t deg = jn.segments.size();
    if (jn.kind == JunctionKind::interior ? deg < 2 : deg != 1) {
      throw InputError("network file " + path.string() + ": junction " + std::to_string(j) + " (" +
                       to_string(jn.kind) + ") has " + std::to_string(deg) + " incident segments");
    }
  }
  net.reset_tips();
  return net;
}

void save_network(const std::filesystem::path& path, const VesselNetwork& net) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write network file " + path.string());
  }
  out.precision(17);
  out << net.num_junctions() << ' ' << net.num_segments() << '\n';
  for (const auto& j : net.junctions()) {
    out << j.position[0] << ' ' << j.position[1] << ' ' << j.position[2] << ' ' << to_string(j.kind)
        << '\n';
  }
  for (const auto& s : net.segments()) {
    out << s.junctions[0] << ' ' << s.junctions[1] << ' ' << s.birth_time << '\n';
  }
}

std::vector<LinePiece> clip_segment(const TetMesh& mesh, const Vec3& a, const Vec3& b) {
  const double margin = 1e-9 * mesh.diameter();
  const Vec3 lo = a.cwiseMin(b) - Vec3::Constant(margin);
  const Vec3 hi = a.cwiseMax(b) + Vec3::Constant(margin);
  // Slivers shorter than ~1e-10 diam come from endpoints sitting on faces.
  const double len = (b - a).norm();
  const double param_eps = std::max(kParamEps, len > 0.0 ? 1e-10 * mesh.diameter() / len : kParamEps);

  struct Interval {
    double lo;
    double hi;
    int tet;
  };
  std::vector<Interval> intervals;
  for (int t : mesh.candidates(lo, hi)) {
    const auto la = mesh.barycentric(t, a);
    const auto lb = mesh.barycentric(t, b);
    double tlo = 0.0;
    double thi = 1.0;
    for (int k = 0; k < 4 && tlo <= thi; ++k) {
      const double d = lb[static_cast<std::size_t>(k)] - la[static_cast<std::size_t>(k)];
      const double v = la[static_cast<std::size_t>(k)];
      if (std::abs(d) < 1e-15) {
        if (v < -kBaryEps) {
          thi = -1.0;
        }
      } else if (d > 0.0) {
        tlo = std::max(tlo, (-kBaryEps - v) / d);
      } else {
        thi = std::min(thi, (-kBaryEps - v) / d);
      }
    }
    if (thi - tlo > param_eps) {
      intervals.push_back({tlo, thi, t});
    }
  }

  std::vector<double> breaks = {0.0, 1.0};
  for (const auto& iv : intervals) {
    breaks.push_back(std::clamp(iv.lo, 0.0, 1.0));
    breaks.push_back(std::clamp(iv.hi, 0.0, 1.0));
  }
  std::sort(breaks.begin(), breaks.end());

  std::vector<LinePiece> pieces;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double t0 = breaks[i];
    const double t1 = breaks[i + 1];
    if (t1 - t0 <= param_eps) {
      continue;
    }
    const double tm = 0.5 * (t0 + t1);
    const Vec3 xm = a + tm * (b - a);
    int best = -1;
    double best_min = -std::numeric_limits<double>::infinity();
    for (const auto& iv : intervals) {
      if (iv.lo <= tm && tm <= iv.hi) {
        const auto bary = mesh.barycentric(iv.tet, xm);
        const double m = *std::min_element(bary.begin(), bary.end());
        if (m > best_min) {
          best_min = m;
          best = iv.tet;
        }
      }
    }
    if (best < 0) {
      std::ostringstream os;
      os << "segment from (" << a[0] << ", " << a[1] << ", " << a[2] << ") to (" << b[0] << ", "
         << b[1] << ", " << b[2] << ") leaves the mesh near parameter " << tm;
      throw InputError(os.str());
    }
    if (!pieces.empty() && pieces.back().tet == best) {
      pieces.back().t1 = t1;
    } else {
      pieces.push_back({t0, t1, best});
    }
  }
  if (pieces.empty()) {
    throw InputError("segment lies outside the mesh");
  }
  pieces.front().t0 = 0.0;
  pieces.back().t1 = 1.0;
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    pieces[i].t0 = pieces[i - 1].t1;
  }
  return pieces;
}

void build_partitions(VesselNetwork& net, const TetMesh& mesh, double density_factor) {
  if (!(density_factor > 0.0)) {
    throw InputError("partition density factor must be positive");
  }
  for (int j = 0; j < net.num_junctions(); ++j) {
    if (net.junctions_[static_cast<std::size_t>(j)].segments.empty()) {
      throw InputError("junction " + std::to_string(j) + " has no incident segment");
    }
  }
  int next_dof = net.num_junctions();
  int next_aux = 0;
  net.dof_owner_.assign(static_cast<std::size_t>(net.num_junctions()), {-1, -1});
  for (int si = 0; si < net.num_segments(); ++si) {
    Segment& s = net.segments_[static_cast<std::size_t>(si)];
    if (s.pieces.empty()) {
      s.pieces = clip_segment(mesh, net.point(si, 0.0), net.point(si, 1.0));
    }
    std::set<int> tets;
    for (const auto& p : s.pieces) {
      tets.insert(p.tet);
    }
    const int crossed = static_cast<int>(tets.size());
    s.primary_nodes =
        std::max(2, static_cast<int>(std::ceil(density_factor * crossed - 1e-12)) + 1);
    s.aux_nodes = std::max(2, (s.primary_nodes + 1) / 2);
    s.dofs.assign(static_cast<std::size_t>(s.primary_nodes), -1);
    s.dofs.front() = s.junctions[0];
    s.dofs.back() = s.junctions[1];
    net.dof_owner_[static_cast<std::size_t>(s.junctions[0])] = {si, 0};
    net.dof_owner_[static_cast<std::size_t>(s.junctions[1])] = {si, s.primary_nodes - 1};
    for (int k = 1; k + 1 < s.primary_nodes; ++k) {
      s.dofs[static_cast<std::size_t>(k)] = next_dof++;
      net.dof_owner_.emplace_back(si, k);
    }
    s.aux_offset = next_aux;
    next_aux += s.aux_nodes;
  }
  net.num_dofs_ = next_dof;
  net.num_aux_dofs_ = next_aux;
  net.partitioned_ = true;
}

namespace {

void require_partitions(const VesselNetwork& net, const char* what) {
  if (!net.partitioned()) {
    throw InputError(std::string(what) + ": network partitions have not been built");
  }
}

LinearOperator from_triplets(int rows, int cols, const std::vector<Triplet>& triplets) {
  LinearOperator op(rows, cols);
  op.setFromTriplets(triplets.begin(), triplets.end());
  op.makeCompressed();
  return op;
}

}  // namespace

LinearOperator assemble_1d_operator(const VesselNetwork& net, Operator1D kind, const Vector& coeff) {
  require_partitions(net, "assemble_1d_operator");
  if (coeff.size() != net.num_dofs()) {
    throw InputError("assemble_1d_operator: coefficient has " + std::to_string(coeff.size()) +
                     " entries, network has " + std::to_string(net.num_dofs()) + " dofs");
  }
  std::vector<Triplet> triplets;
  for (const auto& s : net.segments()) {
    const double h = s.length / (s.primary_nodes - 1);
    for (int e = 0; e + 1 < s.primary_nodes; ++e) {
      const int d[2] = {s.dofs[static_cast<std::size_t>(e)], s.dofs[static_cast<std::size_t>(e + 1)]};
      const double c[2] = {coeff[d[0]], coeff[d[1]]};
      double local[2][2] = {};
      switch (kind) {
        case Operator1D::mass:
          local[0][0] = h / 12.0 * (3.0 * c[0] + c[1]);
          local[0][1] = h / 12.0 * (c[0] + c[1]);
          local[1][0] = local[0][1];
          local[1][1] = h / 12.0 * (c[0] + 3.0 * c[1]);
          break;
        case Operator1D::stiffness: {
          const double k = 0.5 * (c[0] + c[1]) / h;
          local[0][0] = k;
          local[0][1] = -k;
          local[1][0] = -k;
          local[1][1] = k;
          break;
        }
        case Operator1D::advection:
          for (int l = 0; l < 2; ++l) {
            const double lumped = (2.0 * c[l] + c[1 - l]) / 6.0;
            local[l][0] = -lumped;
            local[l][1] = lumped;
          }
          break;
      }
      for (int l = 0; l < 2; ++l) {
        for (int j = 0; j < 2; ++j) {
          triplets.emplace_back(d[l], d[j], local[l][j]);
        }
      }
    }
  }
  return from_triplets(net.num_dofs(), net.num_dofs(), triplets);
}

LinearOperator assemble_1d_advection(const VesselNetwork& net,
                                     const std::vector<std::vector<double>>& element_velocity,
                                     double scale) {
  require_partitions(net, "assemble_1d_advection");
  if (static_cast<int>(element_velocity.size()) != net.num_segments()) {
    throw InputError("assemble_1d_advection: velocity must be given for every segment");
  }
  std::vector<Triplet> triplets;
  for (int si = 0; si < net.num_segments(); ++si) {
    const Segment& s = net.segments()[static_cast<std::size_t>(si)];
    const auto& v = element_velocity[static_cast<std::size_t>(si)];
    if (static_cast<int>(v.size()) != s.primary_nodes - 1) {
      throw InputError("assemble_1d_advection: segment " + std::to_string(si) +
                       " velocity has wrong element count");
    }
    for (int e = 0; e + 1 < s.primary_nodes; ++e) {
      const int d[2] = {s.dofs[static_cast<std::size_t>(e)], s.dofs[static_cast<std::size_t>(e + 1)]};
      const double a = 0.5 * scale * v[static_cast<std::size_t>(e)];
      for (int l = 0; l < 2; ++l) {
        triplets.emplace_back(d[l], d[0], -a);
        triplets.emplace_back(d[l], d[1], a);
      }
    }
  }
  return from_triplets(net.num_dofs(), net.num_dofs(), triplets);
}

LinearOperator trace_operator(const VesselNetwork& net, const TetMesh& mesh) {
  require_partitions(net, "trace_operator");
  std::vector<Triplet> triplets;
  std::vector<char> done(static_cast<std::size_t>(net.num_dofs()), 0);
  for (int si = 0; si < net.num_segments(); ++si) {
    const Segment& s = net.segments()[static_cast<std::size_t>(si)];
    for (int k = 0; k < s.primary_nodes; ++k) {
      const int dof = s.dofs[static_cast<std::size_t>(k)];
      if (done[static_cast<std::size_t>(dof)]) {
        continue;
      }
      done[static_cast<std::size_t>(dof)] = 1;
      const double t = static_cast<double>(k) / (s.primary_nodes - 1);
      const Vec3 x = net.point(si, t);
      auto piece = std::find_if(s.pieces.begin(), s.pieces.end(),
                                [t](const LinePiece& p) { return t >= p.t0 && t <= p.t1; });
      if (piece == s.pieces.end()) {
        piece = std::prev(s.pieces.end());
      }
      auto bary = mesh.barycentric(piece->tet, x);
      double sum = 0.0;
      for (double& b : bary) {
        b = std::clamp(b, 0.0, 1.0);
        sum += b;
      }
      const auto& tet = mesh.tets()[static_cast<std::size_t>(piece->tet)];
      for (int a = 0; a < 4; ++a) {
        if (bary[static_cast<std::size_t>(a)] > 0.0) {
          triplets.emplace_back(dof, tet[static_cast<std::size_t>(a)], bary[static_cast<std::size_t>(a)] / sum);
        }
      }
    }
  }
  return from_triplets(net.num_dofs(), mesh.num_nodes(), triplets);
}

LinearOperator line_source_operator(const VesselNetwork& net, const TetMesh& mesh) {
  require_partitions(net, "line_source_operator");
  return LineQuadrature(mesh, net).line_mass(LineSpace::tissue, LineSpace::primary);
}

NetworkStats network_stats(const VesselNetwork& net, const TetMesh& mesh) {
  NetworkStats stats;
  stats.length = net.total_length();
  stats.tips = net.num_tips();
  stats.density = stats.tips > 0 ? stats.length / stats.tips : std::numeric_limits<double>::infinity();
  std::set<int> tets;
  for (int si = 0; si < net.num_segments(); ++si) {
    const Segment& s = net.segments()[static_cast<std::size_t>(si)];
    const auto pieces = s.pieces.empty() ? clip_segment(mesh, net.point(si, 0.0), net.point(si, 1.0))
                                         : s.pieces;
    for (const auto& p : pieces) {
      tets.insert(p.tet);
    }
  }
  stats.covered_fraction = static_cast<double>(tets.size()) / mesh.num_tets();
  return stats;
}

std::vector<std::vector<double>> split_by_segment(const VesselNetwork& net, const Vector& values) {
  require_partitions(net, "split_by_segment");
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(net.num_segments()));
  for (const auto& s : net.segments()) {
    std::vector<double> v;
    v.reserve(s.dofs.size());
    for (int d : s.dofs) {
      v.push_back(values[d]);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::vector<double>> split_aux_by_segment(const VesselNetwork& net, const Vector& values) {
  require_partitions(net, "split_aux_by_segment");
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(net.num_segments()));
  for (const auto& s : net.segments()) {
    out.emplace_back(values.data() + s.aux_offset, values.data() + s.aux_offset + s.aux_nodes);
  }
  return out;
}

}  // namespace angio
