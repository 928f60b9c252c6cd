// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0
//
// Wall-clock comparison of the OpenMP kernels against their serial
// reference implementations. Results are asserted bitwise-identical in the
// test suite; this binary reports the speedups.

#include <chrono>
#include <cstdio>

#include "combo/dfmg.hpp"
#include "combo/normals.hpp"
#include "combo/solver.hpp"

using namespace combo;

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    const double s = std::chrono::duration<double>(Clock::now() - t0).count();
    if (s < best) best = s;
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %8.3f ms   omp %8.3f ms   speedup %.2fx\n", name,
              1e3 * serial, 1e3 * parallel, serial / parallel);
}

}  // namespace

int main() {
  std::printf("threads: %d\n\n", max_threads());

  const auto img = generate_sphere({96, 96, 96}, {1, 1, 1}, 0.4);
  auto grid = coarsen(img, {4, 4, 4});  // 24^3 boxels
  compute_normals(img, grid, NormalMethod::second_moment);

  auto soft =
      std::make_shared<NeoHookeanLaw>(NeoHookeanParams::from_enu(1.0, 0.0));
  auto stiff =
      std::make_shared<NeoHookeanLaw>(NeoHookeanParams::from_enu(10.0, 0.3));

  // image generation
  report("generate sphere 96^3",
         time_best_of(3, [&] {
           generate_sphere({96, 96, 96}, {1, 1, 1}, 0.4, Exec::serial);
         }),
         time_best_of(3, [&] {
           generate_sphere({96, 96, 96}, {1, 1, 1}, 0.4, Exec::parallel);
         }));

  // coarse graining
  report("coarsen 96^3 -> 24^3",
         time_best_of(3, [&] { coarsen(img, {4, 4, 4}, Exec::serial); }),
         time_best_of(3, [&] { coarsen(img, {4, 4, 4}, Exec::parallel); }));

  // interface weights
  report("laplace weights 96^3",
         time_best_of(3, [&] {
           laplace_weights(img, ConvMethod::direct, Exec::serial);
         }),
         time_best_of(3, [&] {
           laplace_weights(img, ConvMethod::direct, Exec::parallel);
         }));

  // constitutive sweep with the laminate kernel in the composite boxels
  Field9 f(SimGrid{grid.dims, grid.lengths});
  Mat3 fbar = Mat3::Identity();
  fbar(0, 1) = 0.3;
  f.fill(fbar);
  Field9 p(f.grid);
  std::vector<double> tans;
  {
    CellMaterials cm(grid, soft, stiff, true);
    const double ts = time_best_of(
        3, [&] { stress_sweep(cm, f, p, nullptr, Exec::serial); });
    const double tp = time_best_of(
        3, [&] { stress_sweep(cm, f, p, nullptr, Exec::parallel); });
    report("stress sweep 24^3 (combo)", ts, tp);
    const double ts2 = time_best_of(
        3, [&] { stress_sweep(cm, f, p, &tans, Exec::serial); });
    const double tp2 = time_best_of(
        3, [&] { stress_sweep(cm, f, p, &tans, Exec::parallel); });
    report("tangent sweep 24^3 (combo)", ts2, tp2);
    const double ts3 = time_best_of(
        3, [&] { tangent_matvec(tans, f, p, Exec::serial); });
    const double tp3 = time_best_of(
        3, [&] { tangent_matvec(tans, f, p, Exec::parallel); });
    report("tangent matvec 24^3", ts3, tp3);
  }

  // doubly-fine material grid sweep
  {
    CellMaterials cm(grid, soft, stiff, true);
    DfmgState state;
    const double ts = time_best_of(
        2, [&] { dfmg_stress(cm, state, f, p, Exec::serial); });
    const double tp = time_best_of(
        2, [&] { dfmg_stress(cm, state, f, p, Exec::parallel); });
    report("dfmg stress 24^3 (combo)", ts, tp);
  }

  // reductions
  {
    std::vector<double> x(9 * 96 * 96 * 96, 1.0);
    const double ts = time_best_of(
        5, [&] { deterministic_sum(x.data(), x.size(), Exec::serial); });
    const double tp = time_best_of(
        5, [&] { deterministic_sum(x.data(), x.size(), Exec::parallel); });
    report("deterministic sum 9x96^3", ts, tp);
  }
  return 0;
}
