// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/normals.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "combo/errors.hpp"
#include "combo/fft.hpp"

namespace combo {

namespace {

inline std::int64_t wrap(std::int64_t a, std::int64_t n) {
  a %= n;
  return a < 0 ? a + n : a;
}

}  // namespace

WeightField laplace_weights(const PhaseImage& img, ConvMethod method,
                            Exec exec) {
  WeightField out;
  out.dims = img.dims;
  const std::int64_t n = img.size();
  out.w.assign(static_cast<std::size_t>(n), 0.0);
  const double h1 = img.spacing(0), h2 = img.spacing(1), h3 = img.spacing(2);
  const double r1 = h2 * h3 / h1, r2 = h1 * h3 / h2, r3 = h1 * h2 / h3;
  const auto [n1, n2, n3] = img.dims;

  if (method == ConvMethod::direct) {
#pragma omp parallel for collapse(2) schedule(static) if (exec == Exec::parallel)
    for (std::int64_t i = 0; i < n1; ++i) {
      for (std::int64_t j = 0; j < n2; ++j) {
        const std::int64_t im = wrap(i - 1, n1), ip = wrap(i + 1, n1);
        const std::int64_t jm = wrap(j - 1, n2), jp = wrap(j + 1, n2);
        for (std::int64_t k = 0; k < n3; ++k) {
          const std::int64_t km = wrap(k - 1, n3), kp = wrap(k + 1, n3);
          const double c = img.at(i, j, k);
          const double s = r1 * (img.at(im, j, k) - 2.0 * c + img.at(ip, j, k)) +
                           r2 * (img.at(i, jm, k) - 2.0 * c + img.at(i, jp, k)) +
                           r3 * (img.at(i, j, km) - 2.0 * c + img.at(i, j, kp));
          out.w[out.index(i, j, k)] = std::abs(s);
        }
      }
    }
    return out;
  }

  // Fourier-domain path: w = |ifft(fft(chi) * fft(S))|
  Fft3 fft(img.dims, 2);
  double* chi = fft.real(0);
  double* sten = fft.real(1);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    chi[i] = img.data[static_cast<std::size_t>(i)];
    sten[i] = 0.0;
  }
  auto sidx = [&](std::int64_t i, std::int64_t j, std::int64_t k) {
    return static_cast<std::size_t>(
        (wrap(i, n1) * n2 + wrap(j, n2)) * n3 + wrap(k, n3));
  };
  sten[sidx(0, 0, 0)] = -2.0 * (r1 + r2 + r3);
  sten[sidx(1, 0, 0)] += r1;
  sten[sidx(-1, 0, 0)] += r1;
  sten[sidx(0, 1, 0)] += r2;
  sten[sidx(0, -1, 0)] += r2;
  sten[sidx(0, 0, 1)] += r3;
  sten[sidx(0, 0, -1)] += r3;
  fft.forward();
  auto* a = fft.cplx(0);
  const auto* b = fft.cplx(1);
  const std::int64_t nc = fft.n_complex();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < nc; ++i) a[i] *= b[i];
  fft.inverse();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out.w[static_cast<std::size_t>(i)] = std::abs(chi[i]);
  return out;
}

BarycenterNormal boxel_barycenter_normal(const PhaseImage& img,
                                         const ComboGrid& grid,
                                         std::int64_t bi, std::int64_t bj,
                                         std::int64_t bk) {
  const auto [f1, f2, f3] = grid.factors;
  Vec3 sum_p = Vec3::Zero(), sum_m = Vec3::Zero();
  Vec3 lo_p = Vec3::Zero(), hi_p = Vec3::Zero();
  std::int64_t np = 0, nm = 0;
  for (std::int64_t a = 0; a < f1; ++a)
    for (std::int64_t b = 0; b < f2; ++b)
      for (std::int64_t c = 0; c < f3; ++c) {
        const std::int64_t i = bi * f1 + a, j = bj * f2 + b, k = bk * f3 + c;
        const Vec3 x = img.voxel_center(i, j, k);
        if (img.at(i, j, k)) {
          sum_p += x;
          if (np == 0) {
            lo_p = x;
            hi_p = x;
          } else {
            lo_p = lo_p.cwiseMin(x);
            hi_p = hi_p.cwiseMax(x);
          }
          ++np;
        } else {
          sum_m += x;
          ++nm;
        }
      }
  BarycenterNormal out;
  if (np == 0 || nm == 0) {
    out.degenerate = true;
    out.n = Vec3::UnitX();
    return out;
  }
  const Vec3 d = sum_m / static_cast<double>(nm) -
                 sum_p / static_cast<double>(np);
  const double boxel_diag =
      Vec3(grid.boxel_length(0), grid.boxel_length(1), grid.boxel_length(2))
          .norm();
  if (d.norm() < 1e-12 * boxel_diag) {
    out.degenerate = true;
    const Vec3 ext = hi_p - lo_p;
    int axis = 0;
    if (ext[1] > ext[axis]) axis = 1;
    if (ext[2] > ext[axis]) axis = 2;
    out.n = Vec3::Unit(axis);
    return out;
  }
  out.n = d.normalized();
  return out;
}

namespace {

struct SecondMomentResult {
  Vec3 n = Vec3::Zero();
  bool too_few = false;
};

SecondMomentResult boxel_second_moment_normal(
    const PhaseImage& img, const ComboGrid& grid, const WeightField& w,
    std::int64_t bi, std::int64_t bj, std::int64_t bk,
    const NormalOptions& opt) {
  const auto [f1, f2, f3] = grid.factors;
  SecondMomentResult out;

  Vec3 wsum_x = Vec3::Zero();
  double wsum = 0.0;
  std::int64_t support = 0;
  for (std::int64_t a = 0; a < f1; ++a)
    for (std::int64_t b = 0; b < f2; ++b)
      for (std::int64_t c = 0; c < f3; ++c) {
        const std::int64_t i = bi * f1 + a, j = bj * f2 + b, k = bk * f3 + c;
        const double wt = w.w[w.index(i, j, k)];
        if (wt <= 0.0) continue;
        ++support;
        wsum += wt;
        wsum_x += wt * img.voxel_center(i, j, k);
      }
  if (support < opt.min_interface_voxels) {
    out.too_few = true;
    return out;
  }

  Vec3 center;
  if (opt.centering == SecondMomentCentering::weighted_centroid) {
    center = wsum_x / wsum;
  } else {
    center = Vec3((static_cast<double>(bi) + 0.5) * grid.boxel_length(0),
                  (static_cast<double>(bj) + 0.5) * grid.boxel_length(1),
                  (static_cast<double>(bk) + 0.5) * grid.boxel_length(2));
  }

  Mat3 m = Mat3::Zero();
  for (std::int64_t a = 0; a < f1; ++a)
    for (std::int64_t b = 0; b < f2; ++b)
      for (std::int64_t c = 0; c < f3; ++c) {
        const std::int64_t i = bi * f1 + a, j = bj * f2 + b, k = bk * f3 + c;
        const double wt = w.w[w.index(i, j, k)];
        if (wt <= 0.0) continue;
        const Vec3 x = img.voxel_center(i, j, k) - center;
        m += wt * (x * x.transpose());
      }

  // single-voxel-thick axes carry no geometric information: exclude them
  // from the fit (plane-strain semantics of 2D images)
  const double big = m.trace() + 1.0;
  for (int ax = 0; ax < 3; ++ax) {
    if (grid.factors[static_cast<std::size_t>(ax)] == 1) {
      for (int o = 0; o < 3; ++o) {
        m(ax, o) = 0.0;
        m(o, ax) = 0.0;
      }
      m(ax, ax) = big;
    }
  }

  const Eig3 eig = sym_eig3(m);
  out.n = eig.eigenvectors.col(0);
  return out;
}

}  // namespace

NormalStats compute_normals(const PhaseImage& img, ComboGrid& grid,
                            NormalMethod method, const NormalOptions& opt,
                            Exec exec) {
  NormalStats stats;
  WeightField weights;
  if (method == NormalMethod::second_moment)
    weights = laplace_weights(img, opt.conv, exec);

  std::atomic<std::int64_t> composite{0}, degenerate{0}, too_few{0};

#pragma omp parallel for collapse(2) schedule(static) if (exec == Exec::parallel)
  for (std::int64_t bi = 0; bi < grid.dims[0]; ++bi) {
    for (std::int64_t bj = 0; bj < grid.dims[1]; ++bj) {
      for (std::int64_t bk = 0; bk < grid.dims[2]; ++bk) {
        const std::size_t ib = grid.index(bi, bj, bk);
        if (grid.kind[ib] != BoxelKind::composite) continue;
        composite.fetch_add(1, std::memory_order_relaxed);
        const BarycenterNormal bary =
            boxel_barycenter_normal(img, grid, bi, bj, bk);
        Vec3 n = bary.n;
        std::uint8_t flag = bary.degenerate ? normal_degenerate_fallback
                                            : normal_barycenter_ok;
        if (bary.degenerate)
          degenerate.fetch_add(1, std::memory_order_relaxed);
        if (method == NormalMethod::second_moment) {
          const SecondMomentResult sm = boxel_second_moment_normal(
              img, grid, weights, bi, bj, bk, opt);
          if (sm.too_few) {
            too_few.fetch_add(1, std::memory_order_relaxed);
            flag = normal_too_few_interface;
          } else {
            // orient out of the + phase via the barycenter direction
            n = sm.n.dot(bary.n) >= 0.0 ? sm.n : Vec3(-sm.n);
            flag = normal_second_moment_ok;
          }
        }
        grid.normal[ib] = n;
        grid.normal_flag[ib] = flag;
      }
    }
  }
  stats.composite = composite.load();
  stats.degenerate_fallbacks = degenerate.load();
  stats.too_few_fallbacks = too_few.load();
  return stats;
}

std::vector<Vec3> interface_centroids(const PhaseImage& img,
                                      const ComboGrid& grid,
                                      const WeightField& w) {
  std::vector<Vec3> out(static_cast<std::size_t>(grid.boxel_count()),
                        Vec3::Zero());
  const auto [f1, f2, f3] = grid.factors;
#pragma omp parallel for collapse(2) schedule(static)
  for (std::int64_t bi = 0; bi < grid.dims[0]; ++bi) {
    for (std::int64_t bj = 0; bj < grid.dims[1]; ++bj) {
      for (std::int64_t bk = 0; bk < grid.dims[2]; ++bk) {
        Vec3 acc = Vec3::Zero();
        double wsum = 0.0;
        for (std::int64_t a = 0; a < f1; ++a)
          for (std::int64_t b = 0; b < f2; ++b)
            for (std::int64_t c = 0; c < f3; ++c) {
              const std::int64_t i = bi * f1 + a, j = bj * f2 + b,
                                 k = bk * f3 + c;
              const double wt = w.w[w.index(i, j, k)];
              if (wt <= 0.0) continue;
              acc += wt * img.voxel_center(i, j, k);
              wsum += wt;
            }
        if (wsum > 0.0) out[grid.index(bi, bj, bk)] = acc / wsum;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// convex clipping for the facet reconstruction

namespace {

struct Polyhedron {
  std::vector<Vec3> verts;
  std::vector<std::vector<int>> faces;  // outward-oriented vertex loops
};

Polyhedron make_box(const Vec3& lo, const Vec3& hi) {
  Polyhedron p;
  p.verts = {
      {lo[0], lo[1], lo[2]}, {hi[0], lo[1], lo[2]}, {hi[0], hi[1], lo[2]},
      {lo[0], hi[1], lo[2]}, {lo[0], lo[1], hi[2]}, {hi[0], lo[1], hi[2]},
      {hi[0], hi[1], hi[2]}, {lo[0], hi[1], hi[2]},
  };
  p.faces = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
             {2, 3, 7, 6}, {1, 2, 6, 5}, {0, 4, 7, 3}};
  return p;
}

double polyhedron_volume(const Polyhedron& p) {
  double v = 0.0;
  for (const auto& f : p.faces) {
    for (std::size_t t = 1; t + 1 < f.size(); ++t) {
      const Vec3& a = p.verts[static_cast<std::size_t>(f[0])];
      const Vec3& b = p.verts[static_cast<std::size_t>(f[t])];
      const Vec3& c = p.verts[static_cast<std::size_t>(f[t + 1])];
      v += a.dot(b.cross(c));
    }
  }
  return v / 6.0;
}

/// Clips to {x.n <= d}; returns the polygon of the cap face (empty when the
/// plane misses the polyhedron).
std::vector<Vec3> clip_halfspace(Polyhedron& p, const Vec3& n, double d,
                                 double eps) {
  std::vector<double> s(p.verts.size());
  for (std::size_t i = 0; i < p.verts.size(); ++i)
    s[i] = p.verts[i].dot(n) - d;

  std::vector<Vec3> nverts;
  std::vector<std::vector<int>> nfaces;
  std::vector<Vec3> cap;

  auto push_vert = [&](const Vec3& v) {
    for (std::size_t i = 0; i < nverts.size(); ++i)
      if ((nverts[i] - v).norm() <= eps) return static_cast<int>(i);
    nverts.push_back(v);
    return static_cast<int>(nverts.size() - 1);
  };

  for (const auto& f : p.faces) {
    std::vector<int> nf;
    const std::size_t m = f.size();
    for (std::size_t a = 0; a < m; ++a) {
      const int ia = f[a], ib = f[(a + 1) % m];
      const double sa = s[static_cast<std::size_t>(ia)];
      const double sb = s[static_cast<std::size_t>(ib)];
      if (sa <= eps) nf.push_back(push_vert(p.verts[static_cast<std::size_t>(ia)]));
      const bool cross = (sa < -eps && sb > eps) || (sa > eps && sb < -eps);
      if (cross) {
        const double t = sa / (sa - sb);
        const Vec3 x = p.verts[static_cast<std::size_t>(ia)] +
                       t * (p.verts[static_cast<std::size_t>(ib)] -
                            p.verts[static_cast<std::size_t>(ia)]);
        const int iv = push_vert(x);
        nf.push_back(iv);
        cap.push_back(x);
      }
    }
    // drop duplicate consecutive indices
    std::vector<int> clean;
    for (std::size_t a = 0; a < nf.size(); ++a)
      if (clean.empty() || (clean.back() != nf[a] &&
                            !(a + 1 == nf.size() && nf[a] == clean.front())))
        clean.push_back(nf[a]);
    if (clean.size() >= 3) nfaces.push_back(std::move(clean));
  }

  // cap polygon: order around its centroid in the plane basis
  std::vector<Vec3> cap_unique;
  for (const auto& v : cap) {
    bool dup = false;
    for (const auto& u : cap_unique)
      if ((u - v).norm() <= eps) {
        dup = true;
        break;
      }
    if (!dup) cap_unique.push_back(v);
  }
  if (cap_unique.size() >= 3) {
    Vec3 c = Vec3::Zero();
    for (const auto& v : cap_unique) c += v;
    c /= static_cast<double>(cap_unique.size());
    Vec3 u = (std::abs(n[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(n);
    u.normalize();
    const Vec3 w = n.cross(u);
    std::sort(cap_unique.begin(), cap_unique.end(),
              [&](const Vec3& a, const Vec3& b) {
                const Vec3 da = a - c, db = b - c;
                return std::atan2(da.dot(w), da.dot(u)) <
                       std::atan2(db.dot(w), db.dot(u));
              });
    std::vector<int> capf;
    for (const auto& v : cap_unique) capf.push_back(push_vert(v));
    nfaces.push_back(std::move(capf));  // oriented with +n = outward
  }

  p.verts = std::move(nverts);
  p.faces = std::move(nfaces);
  return cap_unique;
}

}  // namespace

double box_cut_fraction(const Vec3& lo, const Vec3& hi, const Vec3& n,
                        double d) {
  Polyhedron box = make_box(lo, hi);
  const double vol = (hi - lo).prod();
  const double eps = 1e-12 * (hi - lo).norm();
  clip_halfspace(box, n, d, eps);
  if (box.faces.empty()) return 0.0;
  return std::clamp(polyhedron_volume(box) / vol, 0.0, 1.0);
}

std::vector<Facet> facet_export(const ComboGrid& grid) {
  std::vector<Facet> out;
  const Vec3 bl(grid.boxel_length(0), grid.boxel_length(1),
                grid.boxel_length(2));
  for (std::int64_t bi = 0; bi < grid.dims[0]; ++bi)
    for (std::int64_t bj = 0; bj < grid.dims[1]; ++bj)
      for (std::int64_t bk = 0; bk < grid.dims[2]; ++bk) {
        const std::size_t ib = grid.index(bi, bj, bk);
        if (grid.kind[ib] != BoxelKind::composite) continue;
        const Vec3 n = grid.normal[ib];
        if (n.norm() == 0.0) continue;
        const Vec3 lo(static_cast<double>(bi) * bl[0],
                      static_cast<double>(bj) * bl[1],
                      static_cast<double>(bk) * bl[2]);
        const Vec3 hi = lo + bl;
        // bracket the plane offset by the corner projections
        double dmin = std::numeric_limits<double>::max();
        double dmax = std::numeric_limits<double>::lowest();
        for (int cx = 0; cx < 2; ++cx)
          for (int cy = 0; cy < 2; ++cy)
            for (int cz = 0; cz < 2; ++cz) {
              const Vec3 corner(cx ? hi[0] : lo[0], cy ? hi[1] : lo[1],
                                cz ? hi[2] : lo[2]);
              dmin = std::min(dmin, corner.dot(n));
              dmax = std::max(dmax, corner.dot(n));
            }
        const double target = grid.c_plus[ib];
        double a = dmin, b = dmax, d = 0.5 * (a + b);
        for (int it = 0; it < 200; ++it) {
          d = 0.5 * (a + b);
          const double frac = box_cut_fraction(lo, hi, n, d);
          if (std::abs(frac - target) <= 1e-10) break;
          (frac < target ? a : b) = d;
        }
        Polyhedron box = make_box(lo, hi);
        const double eps = 1e-12 * (hi - lo).norm();
        Facet f;
        f.boxel = {bi, bj, bk};
        f.normal = n;
        f.plane_offset = d;
        f.polygon = clip_halfspace(box, n, d, eps);
        if (f.polygon.size() < 3) continue;
        Vec3 c = Vec3::Zero();
        for (const auto& v : f.polygon) c += v;
        f.centroid = c / static_cast<double>(f.polygon.size());
        double area = 0.0;
        for (std::size_t t = 1; t + 1 < f.polygon.size(); ++t)
          area += 0.5 * ((f.polygon[t] - f.polygon[0])
                             .cross(f.polygon[t + 1] - f.polygon[0]))
                            .norm();
        f.area = area;
        out.push_back(std::move(f));
      }
  return out;
}

namespace {

double point_segment_dist(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

/// Facet boundary segment lying on the boxel face {x[axis] = plane}.
bool facet_face_segment(const Facet& f, int axis, double plane, double tol,
                        Vec3& a, Vec3& b) {
  std::vector<Vec3> pts;
  for (const auto& v : f.polygon)
    if (std::abs(v[axis] - plane) <= tol) pts.push_back(v);
  if (pts.size() < 2) return false;
  // take the two farthest points (the polygon edge on that face)
  double best = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = (pts[i] - pts[j]).norm();
      if (d > best) {
        best = d;
        a = pts[i];
        b = pts[j];
      }
    }
  return best > tol;
}

}  // namespace

double facet_gap_metric(const ComboGrid& grid,
                        const std::vector<Facet>& facets) {
  std::vector<const Facet*> by_boxel(
      static_cast<std::size_t>(grid.boxel_count()), nullptr);
  for (const auto& f : facets)
    by_boxel[grid.index(f.boxel[0], f.boxel[1], f.boxel[2])] = &f;
  const Vec3 bl(grid.boxel_length(0), grid.boxel_length(1),
                grid.boxel_length(2));
  const double tol = 1e-9 * bl.norm();

  double acc = 0.0;
  std::int64_t pairs = 0;
  for (std::int64_t bi = 0; bi < grid.dims[0]; ++bi)
    for (std::int64_t bj = 0; bj < grid.dims[1]; ++bj)
      for (std::int64_t bk = 0; bk < grid.dims[2]; ++bk) {
        const Facet* f0 = by_boxel[grid.index(bi, bj, bk)];
        if (!f0) continue;
        for (int axis = 0; axis < 3; ++axis) {
          std::int64_t ni = bi + (axis == 0), nj = bj + (axis == 1),
                       nk = bk + (axis == 2);
          if (ni >= grid.dims[0] || nj >= grid.dims[1] || nk >= grid.dims[2])
            continue;  // no periodic pairing in the metric
          const Facet* f1 = by_boxel[grid.index(ni, nj, nk)];
          if (!f1) continue;
          const std::int64_t along = axis == 0 ? bi : axis == 1 ? bj : bk;
          const double plane = bl[axis] * static_cast<double>(along + 1);
          Vec3 a0, b0, a1, b1;
          if (!facet_face_segment(*f0, axis, plane, tol, a0, b0)) continue;
          if (!facet_face_segment(*f1, axis, plane, tol, a1, b1)) continue;
          const double gap = 0.25 * (point_segment_dist(a0, a1, b1) +
                                     point_segment_dist(b0, a1, b1) +
                                     point_segment_dist(a1, a0, b0) +
                                     point_segment_dist(b1, a0, b0));
          acc += gap;
          ++pairs;
        }
      }
  return pairs > 0 ? acc / static_cast<double>(pairs) : 0.0;
}

Colinearity colinearity_stats(
    const ComboGrid& grid, const std::vector<Vec3>& anchors,
    const std::function<Vec3(const Vec3&)>& analytic_normal) {
  Colinearity st;
  st.min = 1.0;
  double acc = 0.0;
  for (std::int64_t ib = 0; ib < grid.boxel_count(); ++ib) {
    const auto sib = static_cast<std::size_t>(ib);
    if (grid.kind[sib] != BoxelKind::composite) continue;
    if (grid.normal[sib].norm() == 0.0) continue;
    const Vec3 n0 = analytic_normal(anchors[sib]).normalized();
    const double c = grid.normal[sib].dot(n0);
    acc += c;
    st.min = std::min(st.min, c);
    ++st.count;
  }
  st.mean = st.count > 0 ? acc / static_cast<double>(st.count) : 0.0;
  return st;
}

}  // namespace combo
