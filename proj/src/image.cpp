// Copyright combo contributors
// SPDX-License-Identifier: Apache-2.0

#include "combo/image.hpp"

#include <cmath>
#include <algorithm>

#include "combo/errors.hpp"

namespace combo {

namespace {

/// splitmix64; the stdlib distributions are implementation-defined, so the
/// generator and the unit mapping are spelled out here to keep seeds
/// reproducible across toolchains.
struct Splitmix64 {
  std::uint64_t state;
  explicit Splitmix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double unit() {  // [0,1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  double symmetric() { return 2.0 * unit() - 1.0; }  // [-1,1)
};

inline double wrap(double d, double l) { return d - l * std::round(d / l); }

}  // namespace

std::int64_t PhaseImage::inclusion_count(Exec exec) const {
  const std::int64_t n = size();
  constexpr std::int64_t chunk = 1 << 16;
  const std::int64_t nchunks = (n + chunk - 1) / chunk;
  std::vector<std::int64_t> partial(static_cast<std::size_t>(nchunks), 0);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t lo = c * chunk;
    const std::int64_t hi = std::min(lo + chunk, n);
    std::int64_t s = 0;
    for (std::int64_t i = lo; i < hi; ++i)
      s += data[static_cast<std::size_t>(i)];
    partial[static_cast<std::size_t>(c)] = s;
  }
  std::int64_t total = 0;
  for (auto p : partial) total += p;
  return total;
}

PhaseImage generate_from_predicate(
    const std::array<std::int64_t, 3>& dims,
    const std::array<double, 3>& lengths,
    const std::function<bool(const Vec3&)>& inside, Exec exec) {
  for (int a = 0; a < 3; ++a) {
    if (dims[static_cast<std::size_t>(a)] < 1)
      throw BadShapeSpec("generate: dims must be >= 1");
    if (!(lengths[static_cast<std::size_t>(a)] > 0.0))
      throw BadShapeSpec("generate: lengths must be positive");
  }
  PhaseImage img;
  img.dims = dims;
  img.lengths = lengths;
  img.data.assign(static_cast<std::size_t>(img.size()), 0);
  const double h1 = img.spacing(0), h2 = img.spacing(1), h3 = img.spacing(2);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
  for (std::int64_t i = 0; i < dims[0]; ++i) {
    const double x = (static_cast<double>(i) + 0.5) * h1;
    for (std::int64_t j = 0; j < dims[1]; ++j) {
      const double y = (static_cast<double>(j) + 0.5) * h2;
      std::size_t base = img.index(i, j, 0);
      for (std::int64_t k = 0; k < dims[2]; ++k) {
        const double z = (static_cast<double>(k) + 0.5) * h3;
        img.data[base + static_cast<std::size_t>(k)] =
            inside(Vec3(x, y, z)) ? 1 : 0;
      }
    }
  }
  return img;
}

PhaseImage generate_sphere(const std::array<std::int64_t, 3>& dims,
                           const std::array<double, 3>& lengths, double radius,
                           Exec exec) {
  if (radius < 0.0) throw BadShapeSpec("sphere: radius must be >= 0");
  const Vec3 c(0.5 * lengths[0], 0.5 * lengths[1], 0.5 * lengths[2]);
  const double r2 = radius * radius;
  return generate_from_predicate(
      dims, lengths,
      [&](const Vec3& x) {
        const double dx = wrap(x[0] - c[0], lengths[0]);
        const double dy = wrap(x[1] - c[1], lengths[1]);
        const double dz = wrap(x[2] - c[2], lengths[2]);
        return dx * dx + dy * dy + dz * dz < r2;
      },
      exec);
}

PhaseImage generate_octahedron(const std::array<std::int64_t, 3>& dims,
                               const std::array<double, 3>& lengths,
                               double radius, Exec exec) {
  if (radius < 0.0) throw BadShapeSpec("octahedron: radius must be >= 0");
  const Vec3 c(0.5 * lengths[0], 0.5 * lengths[1], 0.5 * lengths[2]);
  return generate_from_predicate(
      dims, lengths,
      [&](const Vec3& x) {
        return std::abs(wrap(x[0] - c[0], lengths[0])) +
                   std::abs(wrap(x[1] - c[1], lengths[1])) +
                   std::abs(wrap(x[2] - c[2], lengths[2])) <
               radius;
      },
      exec);
}

namespace {

/// Distance from p (already wrapped relative to the capsule center) to the
/// segment along dir with half length hl.
double capsule_dist(const Vec3& p, const Vec3& dir, double hl) {
  const double t = std::clamp(p.dot(dir), -hl, hl);
  return (p - t * dir).norm();
}

}  // namespace

PhaseImage generate_fiber(const std::array<std::int64_t, 3>& dims,
                          const std::array<double, 3>& lengths, int axis,
                          double radius, double length, Exec exec) {
  if (axis < 0 || axis > 2) throw BadShapeSpec("fiber: axis must be 0, 1, 2");
  if (radius < 0.0) throw BadShapeSpec("fiber: radius must be >= 0");
  const Vec3 c(0.5 * lengths[0], 0.5 * lengths[1], 0.5 * lengths[2]);
  const bool full = length >= lengths[static_cast<std::size_t>(axis)];
  Vec3 dir = Vec3::Zero();
  dir[axis] = 1.0;
  const double hl = 0.5 * length;
  return generate_from_predicate(
      dims, lengths,
      [&](const Vec3& x) {
        Vec3 d(wrap(x[0] - c[0], lengths[0]), wrap(x[1] - c[1], lengths[1]),
               wrap(x[2] - c[2], lengths[2]));
        if (full) {
          d[axis] = 0.0;
          return d.norm() < radius;
        }
        return capsule_dist(d, dir, hl) < radius;
      },
      exec);
}

PhaseImage generate_cross_ply(const std::array<std::int64_t, 3>& dims,
                              const std::array<double, 3>& lengths,
                              double radius, double pitch, int layers,
                              Exec exec) {
  if (layers < 1) throw BadShapeSpec("cross_ply: need at least one layer");
  if (!(pitch > 0.0) || radius < 0.0)
    throw BadShapeSpec("cross_ply: pitch must be > 0 and radius >= 0");
  const double lt = lengths[0] / layers;  // ply thickness along x
  return generate_from_predicate(
      dims, lengths,
      [&](const Vec3& x) {
        const int ply = std::min<int>(layers - 1,
                                      static_cast<int>(x[0] / lt));
        const double xc = (ply + 0.5) * lt;  // fiber axis plane
        const double dx = x[0] - xc;
        // even plies run along y, odd plies along z
        const double t = (ply % 2 == 0) ? x[2] : x[1];
        const double dt = wrap(t - 0.5 * pitch, pitch);
        return dx * dx + dt * dt < radius * radius;
      },
      exec);
}

PhaseImage generate_fiber_pack(const std::array<std::int64_t, 3>& dims,
                               const std::array<double, 3>& lengths,
                               std::uint64_t seed, int count, double radius,
                               double length, double orientation_spread,
                               Exec exec) {
  if (count < 0) throw BadShapeSpec("fiber_pack: count must be >= 0");
  if (radius < 0.0 || length < 0.0)
    throw BadShapeSpec("fiber_pack: radius and length must be >= 0");
  Splitmix64 rng(seed);
  std::vector<Vec3> centers(static_cast<std::size_t>(count));
  std::vector<Vec3> dirs(static_cast<std::size_t>(count));
  for (int f = 0; f < count; ++f) {
    centers[static_cast<std::size_t>(f)] =
        Vec3(rng.unit() * lengths[0], rng.unit() * lengths[1],
             rng.unit() * lengths[2]);
    Vec3 d(1.0, orientation_spread * rng.symmetric(),
           orientation_spread * rng.symmetric());
    dirs[static_cast<std::size_t>(f)] = d.normalized();
  }
  const double hl = 0.5 * length;
  return generate_from_predicate(
      dims, lengths,
      [&](const Vec3& x) {
        for (int f = 0; f < count; ++f) {
          const auto fi = static_cast<std::size_t>(f);
          Vec3 d(wrap(x[0] - centers[fi][0], lengths[0]),
                 wrap(x[1] - centers[fi][1], lengths[1]),
                 wrap(x[2] - centers[fi][2], lengths[2]));
          if (capsule_dist(d, dirs[fi], hl) < radius) return true;
        }
        return false;
      },
      exec);
}

PhaseImage generate_slab(const std::array<std::int64_t, 3>& dims,
                         const std::array<double, 3>& lengths, int axis,
                         double fraction, Exec exec) {
  if (axis < 0 || axis > 2) throw BadShapeSpec("slab: axis must be 0, 1, 2");
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw BadShapeSpec("slab: fraction must be in [0,1]");
  const double l = lengths[static_cast<std::size_t>(axis)];
  const double half = 0.5 * fraction * l;
  const double c = 0.5 * l;
  return generate_from_predicate(
      dims, lengths,
      [&](const Vec3& x) { return std::abs(wrap(x[axis] - c, l)) < half; },
      exec);
}

PhaseImage mirrored(const PhaseImage& img, int axis) {
  PhaseImage out;
  out.dims = img.dims;
  out.lengths = img.lengths;
  out.data.resize(img.data.size());
  const auto [n1, n2, n3] = img.dims;
  for (std::int64_t i = 0; i < n1; ++i)
    for (std::int64_t j = 0; j < n2; ++j)
      for (std::int64_t k = 0; k < n3; ++k) {
        const std::int64_t mi = axis == 0 ? n1 - 1 - i : i;
        const std::int64_t mj = axis == 1 ? n2 - 1 - j : j;
        const std::int64_t mk = axis == 2 ? n3 - 1 - k : k;
        out.data[out.index(mi, mj, mk)] = img.at(i, j, k);
      }
  return out;
}

}  // namespace combo
