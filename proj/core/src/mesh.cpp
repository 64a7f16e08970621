#include "angio/mesh.hpp"

#include "angio/quadrature.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace angio {

namespace {

using Triplet = Eigen::Triplet<double>;

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

LinearOperator from_triplets(int rows, int cols, const std::vector<Triplet>& triplets) {
  LinearOperator op(rows, cols);
  op.setFromTriplets(triplets.begin(), triplets.end());
  op.makeCompressed();
  return op;
}

void check_size(const TetMesh& mesh, const NodalField& w, const char* what) {
  if (w.size() != mesh.num_nodes()) {
    throw InputError(std::string(what) + ": field has " + std::to_string(w.size()) +
                     " entries, mesh has " + std::to_string(mesh.num_nodes()) + " nodes");
  }
}

}  // namespace

TetMesh::TetMesh(std::vector<Vec3> nodes, std::vector<std::array<int, 4>> tets)
    : nodes_(std::move(nodes)), tets_(std::move(tets)) {
  if (nodes_.empty() || tets_.empty()) {
    throw InputError("mesh must contain at least one node and one tetrahedron");
  }
  std::vector<char> used(nodes_.size(), 0);
  for (std::size_t t = 0; t < tets_.size(); ++t) {
    for (int v : tets_[t]) {
      if (v < 0 || v >= num_nodes()) {
        throw InputError("tet " + std::to_string(t) + ": node index " + std::to_string(v) +
                         " out of range");
      }
      used[static_cast<std::size_t>(v)] = 1;
    }
  }
  for (std::size_t n = 0; n < used.size(); ++n) {
    if (!used[n]) {
      throw InputError("dangling node " + std::to_string(n) + " is not referenced by any tet");
    }
  }
  build_geometry();
  build_boundary();
  build_bins();
}

void TetMesh::build_geometry() {
  geometry_.resize(tets_.size());
  bbox_min_ = nodes_.front();
  bbox_max_ = nodes_.front();
  for (const auto& x : nodes_) {
    bbox_min_ = bbox_min_.cwiseMin(x);
    bbox_max_ = bbox_max_.cwiseMax(x);
  }
  total_volume_ = 0.0;
  for (std::size_t t = 0; t < tets_.size(); ++t) {
    const auto& tet = tets_[t];
    const Vec3& x0 = nodes_[static_cast<std::size_t>(tet[0])];
    Eigen::Matrix3d jac;
    for (int k = 0; k < 3; ++k) {
      jac.col(k) = nodes_[static_cast<std::size_t>(tet[static_cast<std::size_t>(k + 1)])] - x0;
    }
    const double vol = jac.determinant() / 6.0;
    const double scale = std::pow(std::max(jac.cwiseAbs().maxCoeff(), 1e-300), 3);
    if (!(vol > 1e-14 * scale)) {
      throw InputError("tet " + std::to_string(t) + " has non-positive signed volume " +
                       std::to_string(vol));
    }
    TetGeometry& g = geometry_[t];
    g.volume = vol;
    g.origin = x0;
    g.inverse_jacobian = jac.inverse();
    g.grad[1] = g.inverse_jacobian.row(0).transpose();
    g.grad[2] = g.inverse_jacobian.row(1).transpose();
    g.grad[3] = g.inverse_jacobian.row(2).transpose();
    g.grad[0] = -(g.grad[1] + g.grad[2] + g.grad[3]);
    total_volume_ += vol;
  }
}

void TetMesh::build_boundary() {
  std::map<std::array<int, 3>, std::pair<int, std::array<int, 3>>> faces;
  static constexpr std::array<std::array<int, 3>, 4> kLocalFaces = {
      {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}};
  for (const auto& tet : tets_) {
    for (const auto& lf : kLocalFaces) {
      std::array<int, 3> face = {tet[static_cast<std::size_t>(lf[0])],
                                 tet[static_cast<std::size_t>(lf[1])],
                                 tet[static_cast<std::size_t>(lf[2])]};
      std::array<int, 3> key = face;
      std::sort(key.begin(), key.end());
      auto [it, inserted] = faces.try_emplace(key, 1, face);
      if (!inserted) {
        ++it->second.first;
      }
    }
  }
  boundary_faces_.clear();
  for (const auto& [key, entry] : faces) {
    if (entry.first > 2) {
      throw InputError("non-manifold face shared by " + std::to_string(entry.first) + " tets");
    }
    if (entry.first == 1) {
      boundary_faces_.push_back(entry.second);
    }
  }
}

void TetMesh::build_bins() {
  const int per_dim =
      std::max(1, static_cast<int>(std::lround(std::cbrt(static_cast<double>(tets_.size()) / 3.0))));
  const Vec3 extent = (bbox_max_ - bbox_min_).cwiseMax(Vec3::Constant(1e-12));
  for (int d = 0; d < 3; ++d) {
    bin_count_[static_cast<std::size_t>(d)] = per_dim;
    bin_size_[d] = extent[d] / per_dim;
  }
  bins_.assign(static_cast<std::size_t>(per_dim * per_dim * per_dim), {});
  const double margin = 1e-8 * diameter();
  for (std::size_t t = 0; t < tets_.size(); ++t) {
    Vec3 lo = nodes_[static_cast<std::size_t>(tets_[t][0])];
    Vec3 hi = lo;
    for (int v : tets_[t]) {
      lo = lo.cwiseMin(nodes_[static_cast<std::size_t>(v)]);
      hi = hi.cwiseMax(nodes_[static_cast<std::size_t>(v)]);
    }
    const auto blo = bin_of(lo - Vec3::Constant(margin));
    const auto bhi = bin_of(hi + Vec3::Constant(margin));
    for (int i = blo[0]; i <= bhi[0]; ++i) {
      for (int j = blo[1]; j <= bhi[1]; ++j) {
        for (int k = blo[2]; k <= bhi[2]; ++k) {
          bins_[static_cast<std::size_t>((i * bin_count_[1] + j) * bin_count_[2] + k)].push_back(
              static_cast<int>(t));
        }
      }
    }
  }
}

std::array<int, 3> TetMesh::bin_of(const Vec3& x) const {
  std::array<int, 3> b{};
  for (int d = 0; d < 3; ++d) {
    const int n = bin_count_[static_cast<std::size_t>(d)];
    const int idx = static_cast<int>(std::floor((x[d] - bbox_min_[d]) / bin_size_[d]));
    b[static_cast<std::size_t>(d)] = std::clamp(idx, 0, n - 1);
  }
  return b;
}

std::array<double, 4> TetMesh::barycentric(int tet, const Vec3& x) const {
  const TetGeometry& g = geometry(tet);
  const Vec3 l = g.inverse_jacobian * (x - g.origin);
  return {1.0 - l.sum(), l[0], l[1], l[2]};
}

std::vector<int> TetMesh::candidates(const Vec3& lo, const Vec3& hi) const {
  const auto blo = bin_of(lo);
  const auto bhi = bin_of(hi);
  std::vector<int> out;
  for (int i = blo[0]; i <= bhi[0]; ++i) {
    for (int j = blo[1]; j <= bhi[1]; ++j) {
      for (int k = blo[2]; k <= bhi[2]; ++k) {
        const auto& bin = bins_[static_cast<std::size_t>((i * bin_count_[1] + j) * bin_count_[2] + k)];
        out.insert(out.end(), bin.begin(), bin.end());
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<PointLocation> TetMesh::find(const Vec3& x, double tol) const {
  for (int d = 0; d < 3; ++d) {
    if (x[d] < bbox_min_[d] - tol || x[d] > bbox_max_[d] + tol) {
      return std::nullopt;
    }
  }
  const auto& bin = bins_[static_cast<std::size_t>([&] {
    const auto b = bin_of(x);
    return (b[0] * bin_count_[1] + b[1]) * bin_count_[2] + b[2];
  }())];
  int best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  std::array<double, 4> best_bary{};
  for (int t : bin) {
    const auto bary = barycentric(t, x);
    // Scale barycentric deficits to a length using the element size.
    const double h = std::cbrt(6.0 * geometry(t).volume);
    const double m = *std::min_element(bary.begin(), bary.end()) * h;
    if (m > best_min) {
      best_min = m;
      best = t;
      best_bary = bary;
    }
  }
  if (best < 0 || best_min < -tol) {
    return std::nullopt;
  }
  double sum = 0.0;
  for (double& b : best_bary) {
    b = std::clamp(b, 0.0, 1.0);
    sum += b;
  }
  for (double& b : best_bary) {
    b /= sum;
  }
  return PointLocation{best, best_bary};
}

double TetMesh::evaluate(const NodalField& field, const Vec3& x) const {
  const auto loc = locate_point(*this, x);
  double v = 0.0;
  for (int k = 0; k < 4; ++k) {
    v += loc.bary[static_cast<std::size_t>(k)] *
         field[tets_[static_cast<std::size_t>(loc.tet)][static_cast<std::size_t>(k)]];
  }
  return v;
}

Vec3 TetMesh::gradient(const NodalField& field, int tet) const {
  const TetGeometry& g = geometry(tet);
  Vec3 grad = Vec3::Zero();
  for (int k = 0; k < 4; ++k) {
    grad += field[tets_[static_cast<std::size_t>(tet)][static_cast<std::size_t>(k)]] *
            g.grad[static_cast<std::size_t>(k)];
  }
  return grad;
}

TetMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open mesh file " + path.string());
  }
  std::string line;
  auto next_line = [&](const std::string& what) {
    while (std::getline(in, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first != std::string::npos && line[first] != '#') {
        return;
      }
    }
    throw InputError("mesh file " + path.string() + ": unexpected end of file reading " + what);
  };
  next_line("header");
  long n_nodes = 0;
  long n_tets = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> n_nodes >> n_tets) || n_nodes <= 0 || n_tets <= 0) {
      throw InputError("mesh file " + path.string() + ": bad header '" + line + "'");
    }
  }
  std::vector<Vec3> nodes(static_cast<std::size_t>(n_nodes));
  for (long i = 0; i < n_nodes; ++i) {
    next_line("node " + std::to_string(i));
    std::istringstream ls(line);
    double x = 0, y = 0, z = 0;
    if (!(ls >> x >> y >> z)) {
      throw InputError("mesh file " + path.string() + ": cannot parse node " + std::to_string(i));
    }
    nodes[static_cast<std::size_t>(i)] = Vec3(x, y, z);
  }
  std::vector<std::array<int, 4>> tets(static_cast<std::size_t>(n_tets));
  for (long i = 0; i < n_tets; ++i) {
    next_line("tet " + std::to_string(i));
    std::istringstream ls(line);
    auto& t = tets[static_cast<std::size_t>(i)];
    if (!(ls >> t[0] >> t[1] >> t[2] >> t[3])) {
      throw InputError("mesh file " + path.string() + ": cannot parse tet " + std::to_string(i));
    }
  }
  return TetMesh(std::move(nodes), std::move(tets));
}

void save_mesh(const std::filesystem::path& path, const TetMesh& mesh) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write mesh file " + path.string());
  }
  out.precision(17);
  out << mesh.num_nodes() << ' ' << mesh.num_tets() << '\n';
  for (const auto& x : mesh.nodes()) {
    out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
  }
  for (const auto& t : mesh.tets()) {
    out << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  }
}

TetMesh make_cube_mesh(int cells, double edge) {
  if (cells < 1 || !(edge > 0.0)) {
    throw InputError("cube mesh needs cells >= 1 and edge > 0");
  }
  const int n = cells + 1;
  const double h = edge / cells;
  std::vector<Vec3> nodes;
  nodes.reserve(static_cast<std::size_t>(n * n * n));
  auto id = [n](int i, int j, int k) { return (k * n + j) * n + i; };
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        nodes.emplace_back(i * h, j * h, k * h);
      }
    }
  }
  static constexpr std::array<std::array<int, 3>, 6> kPerms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<int, 4>> tets;
  tets.reserve(static_cast<std::size_t>(6 * cells * cells * cells));
  for (int k = 0; k < cells; ++k) {
    for (int j = 0; j < cells; ++j) {
      for (int i = 0; i < cells; ++i) {
        for (const auto& perm : kPerms) {
          std::array<int, 3> c = {i, j, k};
          std::array<int, 4> tet{};
          tet[0] = id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])];
            tet[static_cast<std::size_t>(s + 1)] = id(c[0], c[1], c[2]);
          }
          const double vol = signed_volume(nodes[static_cast<std::size_t>(tet[0])],
                                           nodes[static_cast<std::size_t>(tet[1])],
                                           nodes[static_cast<std::size_t>(tet[2])],
                                           nodes[static_cast<std::size_t>(tet[3])]);
          if (vol < 0.0) {
            std::swap(tet[2], tet[3]);
          }
          tets.push_back(tet);
        }
      }
    }
  }
  return TetMesh(std::move(nodes), std::move(tets));
}

double location_tolerance(const TetMesh& mesh) { return 1e-10 * mesh.diameter(); }

PointLocation locate_point(const TetMesh& mesh, const Vec3& x) {
  auto loc = mesh.find(x, location_tolerance(mesh));
  if (!loc) {
    std::ostringstream os;
    os << "point (" << x[0] << ", " << x[1] << ", " << x[2] << ") lies outside the mesh";
    throw InputError(os.str());
  }
  return *loc;
}

LinearOperator assemble_weighted_mass(const TetMesh& mesh, const NodalField& w) {
  check_size(mesh, w, "assemble_weighted_mass");
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(16 * mesh.num_tets()));
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto& tet = mesh.tets()[static_cast<std::size_t>(t)];
    const double vol = mesh.geometry(t).volume;
    double local[4][4] = {};
    for (const auto& qp : quadrature::kTet4) {
      double wq = 0.0;
      for (int a = 0; a < 4; ++a) {
        wq += qp.bary[static_cast<std::size_t>(a)] * w[tet[static_cast<std::size_t>(a)]];
      }
      const double scale = wq * qp.weight * vol;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          local[a][b] += scale * (qp.bary[static_cast<std::size_t>(a)] * qp.bary[static_cast<std::size_t>(b)]);
        }
      }
    }
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        triplets.emplace_back(tet[static_cast<std::size_t>(a)], tet[static_cast<std::size_t>(b)], local[a][b]);
      }
    }
  }
  return from_triplets(mesh.num_nodes(), mesh.num_nodes(), triplets);
}

LinearOperator assemble_weighted_stiffness(const TetMesh& mesh, const NodalField& w) {
  check_size(mesh, w, "assemble_weighted_stiffness");
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(16 * mesh.num_tets()));
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto& tet = mesh.tets()[static_cast<std::size_t>(t)];
    const TetGeometry& g = mesh.geometry(t);
    // P1 weight: the 4-point rule integrates it exactly, i.e. |T| * mean.
    const double wint = 0.25 * g.volume *
                        (w[tet[0]] + w[tet[1]] + w[tet[2]] + w[tet[3]]);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        triplets.emplace_back(tet[static_cast<std::size_t>(a)], tet[static_cast<std::size_t>(b)],
                              wint * g.grad[static_cast<std::size_t>(a)].dot(g.grad[static_cast<std::size_t>(b)]));
      }
    }
  }
  return from_triplets(mesh.num_nodes(), mesh.num_nodes(), triplets);
}

LinearOperator assemble_advection(const TetMesh& mesh, std::span<const Vec3> velocity,
                                  const NodalField& w, AdvectionOptions options) {
  check_size(mesh, w, "assemble_advection");
  if (static_cast<int>(velocity.size()) != mesh.num_tets()) {
    throw InputError("assemble_advection: velocity has " + std::to_string(velocity.size()) +
                     " entries, mesh has " + std::to_string(mesh.num_tets()) + " tets");
  }
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(16 * mesh.num_tets()));
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto& tet = mesh.tets()[static_cast<std::size_t>(t)];
    const TetGeometry& g = mesh.geometry(t);
    const Vec3& v = velocity[static_cast<std::size_t>(t)];
    if (v.squaredNorm() == 0.0) {
      continue;
    }
    double vgrad[4];
    for (int b = 0; b < 4; ++b) {
      vgrad[b] = v.dot(g.grad[static_cast<std::size_t>(b)]);
    }
    double local[4][4] = {};
    for (const auto& qp : quadrature::kTet4) {
      double wq = 0.0;
      for (int a = 0; a < 4; ++a) {
        wq += qp.bary[static_cast<std::size_t>(a)] * w[tet[static_cast<std::size_t>(a)]];
      }
      const double scale = wq * qp.weight * g.volume;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          local[a][b] += scale * qp.bary[static_cast<std::size_t>(a)] * vgrad[b];
        }
      }
    }
    if (options.artificial_diffusion) {
      const double h = std::cbrt(6.0 * g.volume);
      const double wmean = 0.25 * (w[tet[0]] + w[tet[1]] + w[tet[2]] + w[tet[3]]);
      const double nu = 0.5 * h * v.norm() * wmean * g.volume;
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          local[a][b] += nu * g.grad[static_cast<std::size_t>(a)].dot(g.grad[static_cast<std::size_t>(b)]);
        }
      }
    }
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        triplets.emplace_back(tet[static_cast<std::size_t>(a)], tet[static_cast<std::size_t>(b)], local[a][b]);
      }
    }
  }
  return from_triplets(mesh.num_nodes(), mesh.num_nodes(), triplets);
}

Vector assemble_load(const TetMesh& mesh, const NodalField& f) {
  check_size(mesh, f, "assemble_load");
  Vector load = Vector::Zero(mesh.num_nodes());
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto& tet = mesh.tets()[static_cast<std::size_t>(t)];
    const double vol = mesh.geometry(t).volume;
    for (const auto& qp : quadrature::kTet4) {
      double fq = 0.0;
      for (int a = 0; a < 4; ++a) {
        fq += qp.bary[static_cast<std::size_t>(a)] * f[tet[static_cast<std::size_t>(a)]];
      }
      for (int a = 0; a < 4; ++a) {
        load[tet[static_cast<std::size_t>(a)]] += fq * qp.weight * vol * qp.bary[static_cast<std::size_t>(a)];
      }
    }
  }
  return load;
}

double integrate(const TetMesh& mesh, const NodalField& f) {
  check_size(mesh, f, "integrate");
  double total = 0.0;
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto& tet = mesh.tets()[static_cast<std::size_t>(t)];
    total += 0.25 * mesh.geometry(t).volume * (f[tet[0]] + f[tet[1]] + f[tet[2]] + f[tet[3]]);
  }
  return total;
}

double integrate_product(const TetMesh& mesh, const NodalField& a, const NodalField& b) {
  check_size(mesh, a, "integrate_product");
  check_size(mesh, b, "integrate_product");
  double total = 0.0;
  for (int t = 0; t < mesh.num_tets(); ++t) {
    const auto& tet = mesh.tets()[static_cast<std::size_t>(t)];
    for (const auto& qp : quadrature::kTet4) {
      double aq = 0.0;
      double bq = 0.0;
      for (int k = 0; k < 4; ++k) {
        aq += qp.bary[static_cast<std::size_t>(k)] * a[tet[static_cast<std::size_t>(k)]];
        bq += qp.bary[static_cast<std::size_t>(k)] * b[tet[static_cast<std::size_t>(k)]];
      }
      total += qp.weight * mesh.geometry(t).volume * aq * bq;
    }
  }
  return total;
}

}  // namespace angio
