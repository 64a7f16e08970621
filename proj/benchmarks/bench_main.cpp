#include "angio/config.hpp"
#include "angio/coupling.hpp"
#include "angio/line_quadrature.hpp"
#include "angio/mesh.hpp"
#include "angio/simulation.hpp"
#include "angio/tissue.hpp"
#include "angio/vessel_network.hpp"

#include <benchmark/benchmark.h>

using namespace angio;

namespace {

const char* kNetwork = ANGIO_DATA_DIR "/testface_network.txt";

void BM_StiffnessAssembly(benchmark::State& state) {
  const TetMesh mesh = make_cube_mesh(static_cast<int>(state.range(0)), 2.5);
  const NodalField w = NodalField::Constant(mesh.num_nodes(), 0.7);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_weighted_stiffness(mesh, w));
  state.counters["dofs"] = mesh.num_nodes();
}
BENCHMARK(BM_StiffnessAssembly)->Arg(7)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_TumorJacobian(benchmark::State& state) {
  const TetMesh mesh = make_cube_mesh(static_cast<int>(state.range(0)), 2.5);
  const TumorConstitutive tc;
  const int n = mesh.num_nodes();
  const NodalField phi = NodalField::Constant(n, 0.5);
  const NodalField c = NodalField::Constant(n, 60.0);
  for (auto _ : state) benchmark::DoNotOptimize(tumor_jacobian(mesh, tc, phi, c, 6.0));
}
BENCHMARK(BM_TumorJacobian)->Arg(7)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_KktSolve(benchmark::State& state) {
  const TetMesh mesh = make_cube_mesh(static_cast<int>(state.range(0)), 2.5);
  VesselNetwork net = load_network(kNetwork, 5e-3);
  build_partitions(net, mesh);
  const LineQuadrature quad(mesh, net);
  const int n = mesh.num_nodes();
  const int nh = net.num_dofs();
  const LinearOperator a = assemble_weighted_stiffness(mesh, NodalField::Ones(n)) +
                           assemble_weighted_mass(mesh, NodalField::Constant(n, 0.1));
  const LinearOperator a1 = assemble_1d_operator(net, Operator1D::stiffness, Vector::Ones(nh));
  std::vector<std::pair<int, double>> fixed;
  for (int d : net.dofs_of_kind(JunctionKind::inlet)) fixed.emplace_back(d, 1.0);
  const auto sys = make_coupled_system(quad, a, Vector::Zero(n), a1, Vector::Zero(nh), Vector::Constant(quad.size(), 5.0),
                                       fixed);
  for (auto _ : state) benchmark::DoNotOptimize(solve_kkt(build_saddle_system(sys)));
  state.counters["dofs"] = n + nh;
}
BENCHMARK(BM_KktSolve)->Arg(7)->Arg(14)->Unit(benchmark::kMillisecond);

void BM_SimulationStep(benchmark::State& state) {
  const SimulationConfig cfg =
      validate_config("[run]\nmesh = cube:" + std::to_string(state.range(0)) +
                          "\nnetwork = testface_network.txt\nT = 30 d\nvtk_every = 0\n[initial]\ng = 1.2\n",
                      ANGIO_DATA_DIR)
          .config;
  Simulation sim(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(sim.advance());
}
BENCHMARK(BM_SimulationStep)->Arg(7)->Arg(14)->Iterations(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
