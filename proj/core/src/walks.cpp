// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <vector>

#include "specdet/determinants.hpp"
#include "specdet/error.hpp"

namespace specdet {

namespace {

struct WalkSetup {
  int dim, box, k, inner, band, width;
  std::vector<std::pair<Mode, cplx>> steps;

  WalkSetup(const PerturbationField& V, int dim_, int box_, int k_, int inner_)
      : dim(dim_), box(box_), k(k_), inner(inner_), band(V.bandwidth()), width(2 * box_ + 1) {
    if (dim != 1 && dim != 2) throw Error(ErrorKind::invalid_argument, "walk_trace: dim must be 1 or 2");
    if (V.dim() != dim) throw Error(ErrorKind::invalid_argument, "walk_trace: field dimension mismatch");
    if (box < 0 || k < 1) throw Error(ErrorKind::invalid_argument, "walk_trace: need box >= 0, k >= 1");
    if (inner >= box) throw Error(ErrorKind::invalid_argument, "walk_trace: inner box must be smaller than box");
    for (const auto& [q, v] : V.coefficients()) steps.emplace_back(q, v);
  }

  int sup(const Mode& n) const { return std::max(std::abs(n[0]), std::abs(n[1])); }
  bool inside(const Mode& n) const { return sup(n) <= box; }
  // Steps needed to get from n to the outside of the inner box.
  int steps_out(const Mode& n) const {
    if (inner < 0) return 0;
    const int d = inner + 1 - sup(n);
    if (d <= 0) return 0;
    if (band == 0) return k + 1;
    return (d + band - 1) / band;
  }
  bool start_ok(const Mode& n0) const { return inner < 0 || 2 * steps_out(n0) <= k; }
  std::size_t index(const Mode& n) const {
    return dim == 1 ? std::size_t(n[0] + box)
                    : std::size_t(n[0] + box) * width + std::size_t(n[1] + box);
  }
  template <class F>
  void for_each_mode(F f) const {
    if (dim == 1) {
      for (int a = -box; a <= box; ++a) f(Mode{a, 0});
    } else {
      for (int a = -box; a <= box; ++a)
        for (int b = -box; b <= box; ++b) f(Mode{a, b});
    }
  }
};

}  // namespace

double walk_trace_cost(const PerturbationField& V, int dim, int box, int k, int inner) {
  const WalkSetup w(V, dim, box, k, inner);
  double starts = 0;
  w.for_each_mode([&](const Mode& n) {
    if (w.start_ok(n)) starts += 1;
  });
  return starts * std::pow(double(std::max<std::size_t>(w.steps.size(), 1)), k - 1);
}

cplx walk_trace(const PerturbationField& V, const ModeWeight& g, int dim, int box, int k, int inner) {
  const WalkSetup w(V, dim, box, k, inner);
  if (w.steps.empty()) return 0.0;
  std::vector<cplx> gv(dim == 1 ? std::size_t(w.width) : std::size_t(w.width) * w.width);
  w.for_each_mode([&](const Mode& n) { gv[w.index(n)] = g(n); });

  double vsum = 0;
  for (const auto& st : w.steps) vsum += std::abs(st.second);
  // Largest |g| within reach of a start: g evaluated at the start pulled
  // toward the origin by the walk radius.  Assumes |g| decreases in |n|,
  // true for the radial free weights this is used with.
  const int reach = w.band * (k / 2);
  auto local_max = [&](const Mode& n) {
    Mode c = n;
    for (int i = 0; i < 2; ++i) {
      const int s = c[i] > 0 ? 1 : -1;
      c[i] = std::abs(c[i]) <= reach ? 0 : c[i] - s * reach;
    }
    if (dim == 1) c[1] = 0;
    return std::abs(g(c));
  };
  constexpr double negligible = 1e-24;

  long double re = 0, im = 0;
  Mode n0{};
  int out0 = 0;
  double gloc = 0;
  // (G V)_{a b} = g(a) Vhat(a - b): a step a -> b = a - q carries g(a) Vhat(q).
  auto rec = [&](auto&& self, const Mode& cur, int j, cplx weight, bool touched) -> void {
    const cplx wg = weight * gv[w.index(cur)];
    const int r = k - j;  // steps left, including the one taken now
    if (std::abs(wg) * vsum * std::pow(gloc * vsum, r - 1) < negligible) return;
    if (r == 1) {
      const Mode q = cur - n0;
      for (const auto& [s, v] : w.steps) {
        if (s == q) {
          if (touched || w.inner < 0) {
            const cplx t = wg * v;
            re += t.real();
            im += t.imag();
          }
          return;
        }
      }
      return;
    }
    for (const auto& [s, v] : w.steps) {
      const Mode nxt = cur - s;
      if (!w.inside(nxt)) continue;
      const Mode dn = nxt - n0;
      if (std::max(std::abs(dn[0]), std::abs(dn[1])) > w.band * (r - 1)) continue;
      bool t = touched;
      if (w.inner >= 0 && !t) {
        t = w.sup(nxt) > w.inner;
        if (!t && w.steps_out(nxt) + out0 > r - 1) continue;
      }
      self(self, nxt, j + 1, wg * v, t);
    }
  };
  w.for_each_mode([&](const Mode& n) {
    if (!w.start_ok(n)) return;
    gloc = local_max(n);
    if (std::pow(gloc * vsum, k) < negligible) return;
    n0 = n;
    out0 = w.steps_out(n);
    rec(rec, n, 0, 1.0, w.inner >= 0 && w.sup(n) > w.inner);
  });
  return {double(re), double(im)};
}

}  // namespace specdet
