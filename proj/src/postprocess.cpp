// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/postprocess.hpp"

#include <atomic>
#include <cmath>

#include "combo/errors.hpp"

namespace combo {

RecoveredFields recover_phase_fields(const Field9& f, CellMaterials& cm,
                                     Exec exec) {
  RecoveredFields out;
  const auto nid = static_cast<std::int64_t>(cm.metas().size());
  out.composite.resize(static_cast<std::size_t>(nid));
  out.states.resize(static_cast<std::size_t>(nid));
  std::atomic<int> iter_max{0};
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t id = 0; id < nid; ++id) {
    const auto sid = static_cast<std::size_t>(id);
    const std::size_t cell = cm.combo_cell(static_cast<std::int32_t>(id));
    const Mat3 fc = f.cell(cell);
    LaminateSolution sol = finite_strain_solve(
        fc, cm.inclusion(), cm.matrix(), cm.meta(static_cast<std::int32_t>(id)),
        cm.warm_start(static_cast<std::int32_t>(id)), cm.laminate_options(),
        /*want_tangent=*/false);
    out.composite[sid] = sol.result;
    out.states[sid] = sol.state;
    int prev = iter_max.load(std::memory_order_relaxed);
    while (prev < sol.state.iterations &&
           !iter_max.compare_exchange_weak(prev, sol.state.iterations)) {
    }
  }
  out.max_resolve_iterations = iter_max.load();
  return out;
}

namespace {

struct MatAccum {
  Mat3 sum = Mat3::Zero();
  double weight = 0.0;
};

}  // namespace

PhaseAverages phase_averages(const Field9& f, CellMaterials& cm,
                             const RecoveredFields& rec) {
  const std::int64_t n = cm.cells();
  constexpr std::int64_t chunk = 4096;
  const std::int64_t nchunks = (n + chunk - 1) / chunk;
  std::vector<MatAccum> plus(static_cast<std::size_t>(nchunks));
  std::vector<MatAccum> minus(static_cast<std::size_t>(nchunks));

#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    MatAccum ap, am;
    const std::int64_t lo = c * chunk;
    const std::int64_t hi = std::min(lo + chunk, n);
    for (std::int64_t i = lo; i < hi; ++i) {
      const auto si = static_cast<std::size_t>(i);
      const std::uint8_t ph = cm.cell_phase(si);
      if (ph == 2) {
        const auto id = static_cast<std::size_t>(cm.combo_id(si));
        const ComboMeta& meta =
            cm.meta(static_cast<std::int32_t>(id));
        ap.sum += meta.c_plus * rec.composite[id].p_plus;
        ap.weight += meta.c_plus;
        am.sum += meta.c_minus * rec.composite[id].p_minus;
        am.weight += meta.c_minus;
      } else {
        const MaterialLaw& law = ph == 1 ? cm.inclusion() : cm.matrix();
        Mat3 p;
        law.eval(f.cell(si), p);
        if (ph == 1) {
          ap.sum += p;
          ap.weight += 1.0;
        } else {
          am.sum += p;
          am.weight += 1.0;
        }
      }
    }
    plus[static_cast<std::size_t>(c)] = ap;
    minus[static_cast<std::size_t>(c)] = am;
  }

  MatAccum tp, tm;
  for (std::int64_t c = 0; c < nchunks; ++c) {
    tp.sum += plus[static_cast<std::size_t>(c)].sum;
    tp.weight += plus[static_cast<std::size_t>(c)].weight;
    tm.sum += minus[static_cast<std::size_t>(c)].sum;
    tm.weight += minus[static_cast<std::size_t>(c)].weight;
  }

  PhaseAverages out;
  out.c_plus = tp.weight / static_cast<double>(n);
  out.has_plus = tp.weight > 0.0;
  out.has_minus = tm.weight > 0.0;
  if (out.has_plus) out.pbar_plus = tp.sum / tp.weight;
  if (out.has_minus) out.pbar_minus = tm.sum / tm.weight;
  out.pbar = (tp.sum + tm.sum) / static_cast<double>(n);
  return out;
}

double error_norm(const Mat3& p, const Mat3& ref) {
  const double d = ref.norm();
  if (!(d > 0.0)) throw ZeroReference("error_norm: zero reference");
  return (p - ref).norm() / d;
}

std::vector<InterfaceSample> interface_tractions(
    const RecoveredFields& rec, const CellMaterials& cm,
    const std::vector<Facet>& facets, const ComboGrid& grid) {
  std::vector<InterfaceSample> out;
  out.reserve(facets.size());
  for (const auto& fac : facets) {
    const std::size_t cell = grid.index(fac.boxel[0], fac.boxel[1],
                                        fac.boxel[2]);
    const std::int32_t id = cm.combo_id(cell);
    if (id < 0) continue;
    const LaminateResult& r = rec.composite[static_cast<std::size_t>(id)];
    InterfaceSample s;
    s.boxel = fac.boxel;
    s.centroid = fac.centroid;
    s.normal = fac.normal;
    s.area = fac.area;
    s.traction = r.traction;
    const Mat3 fmid = 0.5 * (r.f_plus + r.f_minus);
    const double jmid = fmid.determinant();
    const Vec3 nanson = jmid * inv3(fmid).transpose() * fac.normal;
    const double stretch = nanson.norm();
    s.area_spatial = fac.area * stretch;
    s.traction_spatial =
        stretch > 0.0 ? Vec3(s.traction / stretch) : Vec3::Zero();
    out.push_back(s);
  }
  return out;
}

}  // namespace combo
