// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "specdet/perturbation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#include "specdet/error.hpp"

namespace specdet {

namespace {

// The FFTW planner is not reentrant.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

double periodic_distance(double a, double b, double length) {
  double d = std::fmod(std::abs(a - b), length);
  return std::min(d, length - d);
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

}  // namespace

double Bump::operator()(const Geometry& g, double x, double y) const {
  double r2 = 0;
  const double dx = periodic_distance(x, center[0], g.length);
  r2 += dx * dx;
  if (g.dim() == 2) {
    const double dy = periodic_distance(y, center[1], g.length);
    r2 += dy * dy;
  }
  const double u = r2 / (radius * radius);
  if (u >= 1.0) return 0.0;
  return amplitude * std::exp(1.0 - 1.0 / (1.0 - u));
}

bool Bump::disjoint_from(const Bump& other, const Geometry& g) const {
  double d2 = 0;
  const double dx = periodic_distance(center[0], other.center[0], g.length);
  d2 += dx * dx;
  if (g.dim() == 2) {
    const double dy = periodic_distance(center[1], other.center[1], g.length);
    d2 += dy * dy;
  }
  return std::sqrt(d2) >= radius + other.radius;
}

PerturbationField::PerturbationField(int dim) : dim_(dim) {
  if (dim != 1 && dim != 2) {
    throw Error(ErrorKind::invalid_argument, "perturbation: dimension must be 1 or 2");
  }
}

void PerturbationField::add(const Mode& n, cplx v) {
  if (dim_ == 1 && n[1] != 0) {
    throw Error(ErrorKind::invalid_argument, "perturbation: mode has a second component in d=1");
  }
  if (v == cplx(0.0)) return;
  auto [it, inserted] = coeffs_.emplace(n, v);
  if (!inserted) {
    it->second += v;
    if (it->second == cplx(0.0)) coeffs_.erase(it);
  }
}

PerturbationField PerturbationField::from_coefficients(int dim, std::map<Mode, cplx> coeffs) {
  PerturbationField f(dim);
  for (const auto& [n, v] : coeffs) f.add(n, v);
  return f;
}

PerturbationField PerturbationField::constant(int dim, cplx c) {
  PerturbationField f(dim);
  f.add({0, 0}, c);
  return f;
}

PerturbationField PerturbationField::cosine(int dim, const Mode& k, double amplitude) {
  PerturbationField f(dim);
  if (k == Mode{0, 0}) {
    f.add(k, amplitude);
  } else {
    f.add(k, 0.5 * amplitude);
    f.add(-k, 0.5 * amplitude);
  }
  return f;
}

PerturbationField PerturbationField::sine(int dim, const Mode& k, double amplitude) {
  PerturbationField f(dim);
  if (k == Mode{0, 0}) return f;
  f.add(k, cplx(0.0, -0.5 * amplitude));
  f.add(-k, cplx(0.0, 0.5 * amplitude));
  return f;
}

PerturbationField PerturbationField::from_grid(const Geometry& g, const std::vector<double>& samples,
                                               int grid, int band) {
  const int d = g.dim();
  const std::size_t total = d == 1 ? std::size_t(grid) : std::size_t(grid) * grid;
  if (samples.size() != total) {
    throw Error(ErrorKind::invalid_argument, "perturbation: grid sample count does not match grid^d");
  }
  if (band < 0 || 2 * band + 1 > grid) {
    throw Error(ErrorKind::invalid_argument, "perturbation: band must satisfy 2*band+1 <= grid");
  }
  std::vector<fftw_complex> buf(total);
  for (std::size_t i = 0; i < total; ++i) {
    buf[i][0] = samples[i];
    buf[i][1] = 0.0;
  }
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_plan plan = d == 1
        ? fftw_plan_dft_1d(grid, buf.data(), buf.data(), FFTW_FORWARD, FFTW_ESTIMATE)
        : fftw_plan_dft_2d(grid, grid, buf.data(), buf.data(), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  const double norm = 1.0 / double(total);
  auto at = [&](int a, int b) {
    const int ia = (a + grid) % grid;
    const int ib = (b + grid) % grid;
    const std::size_t idx = d == 1 ? std::size_t(ia) : std::size_t(ia) * grid + ib;
    return cplx(buf[idx][0], buf[idx][1]) * norm;
  };
  // Real input: impose exact Hermitian symmetry so builders produce exactly
  // Hermitian matrices.
  PerturbationField f(d);
  const int bb = d == 1 ? 0 : band;
  for (int a = -band; a <= band; ++a) {
    for (int b = -bb; b <= bb; ++b) {
      const cplx v = 0.5 * (at(a, b) + std::conj(at(-a, -b)));
      f.add({a, b}, v);
    }
  }
  return f;
}

PerturbationField PerturbationField::from_bump(const Geometry& g, const Bump& bump, int band) {
  const int d = g.dim();
  const int grid = d == 1 ? next_pow2(std::max(8 * band, 1024)) : next_pow2(std::max(4 * band, 128));
  std::vector<double> s;
  s.reserve(d == 1 ? grid : std::size_t(grid) * grid);
  const double h = g.length / grid;
  if (d == 1) {
    for (int i = 0; i < grid; ++i) s.push_back(bump(g, i * h));
  } else {
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) s.push_back(bump(g, i * h, j * h));
  }
  return from_grid(g, s, grid, band);
}

cplx PerturbationField::coefficient(const Mode& n) const {
  auto it = coeffs_.find(n);
  return it == coeffs_.end() ? cplx(0.0) : it->second;
}

int PerturbationField::bandwidth() const {
  int b = 0;
  for (const auto& [n, v] : coeffs_) b = std::max({b, std::abs(n[0]), std::abs(n[1])});
  return b;
}

bool PerturbationField::is_real() const {
  double scale = 0;
  for (const auto& [n, v] : coeffs_) scale = std::max(scale, std::abs(v));
  for (const auto& [n, v] : coeffs_) {
    if (std::abs(coefficient(-n) - std::conj(v)) > 1e-15 * scale) return false;
  }
  return true;
}

cplx PerturbationField::evaluate(const Geometry& g, double x, double y) const {
  const double k = g.wavenumber();
  cplx s = 0;
  for (const auto& [n, v] : coeffs_) s += v * std::polar(1.0, k * (n[0] * x + n[1] * y));
  return s;
}

std::vector<double> PerturbationField::sample_grid(const Geometry& g, int n) const {
  const int d = g.dim();
  const double h = g.length / n;
  std::vector<double> s;
  s.reserve(d == 1 ? n : std::size_t(n) * n);
  if (d == 1) {
    for (int i = 0; i < n; ++i) s.push_back(evaluate(g, i * h).real());
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.push_back(evaluate(g, i * h, j * h).real());
  }
  return s;
}

double PerturbationField::min_value(const Geometry& g, int grid) const {
  const auto s = sample_grid(g, grid);
  return s.empty() ? 0.0 : *std::min_element(s.begin(), s.end());
}

PerturbationField PerturbationField::scaled(cplx s) const {
  PerturbationField f(dim_);
  for (const auto& [n, v] : coeffs_) f.add(n, s * v);
  return f;
}

PerturbationField PerturbationField::operator+(const PerturbationField& other) const {
  if (other.dim_ != dim_) throw Error(ErrorKind::invalid_argument, "perturbation: dimension mismatch");
  PerturbationField f = *this;
  for (const auto& [n, v] : other.coeffs_) f.add(n, v);
  return f;
}

PerturbationField PerturbationField::operator-(const PerturbationField& other) const {
  return *this + other.scaled(-1.0);
}

cplx integral_of_product(const PerturbationField& a, const PerturbationField& b, const Geometry& g) {
  cplx s = 0;
  for (const auto& [n, v] : a.coefficients()) s += v * b.coefficient(-n);
  return s * g.volume();
}

}  // namespace specdet
