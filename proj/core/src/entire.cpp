// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "specdet/entire.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "specdet/error.hpp"

namespace specdet {

namespace {

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_se = std::sqrt(rss / double(n - 2) / sxx);
  }
  return f;
}

}  // namespace

ZeroSequence ZeroSequence::make(std::vector<cplx> zeros, int origin_order, bool complete) {
  std::stable_sort(zeros.begin(), zeros.end(),
                   [](const cplx& a, const cplx& b) { return std::abs(a) < std::abs(b); });
  ZeroSequence s{std::move(zeros), origin_order, complete};
  s.validate();
  return s;
}

void ZeroSequence::validate() const {
  if (origin_order < 0) throw Error(ErrorKind::invalid_argument, "zeros: origin order must be >= 0");
  for (std::size_t i = 0; i < zeros.size(); ++i) {
    if (zeros[i] == cplx(0.0)) {
      throw Error(ErrorKind::invalid_argument, "zeros: the origin is carried by origin_order, not the list");
    }
    if (i > 0 && std::abs(zeros[i]) < std::abs(zeros[i - 1])) {
      throw Error(ErrorKind::invalid_argument, "zeros: moduli must be nondecreasing");
    }
  }
}

cplx log_weierstrass_factor(int p, cplx z) {
  if (p < 0) throw Error(ErrorKind::invalid_argument, "weierstrass factor: p must be >= 0");
  if (std::abs(z) < 0.5) {
    // -sum_{k>p} z^k/k; the tail after k terms is below |z|^{k+1}/(1-|z|).
    cplx zk = std::pow(z, p + 1);
    cplx s = 0;
    for (int k = p + 1; k < p + 200; ++k) {
      const cplx t = zk / double(k);
      s -= t;
      if (std::abs(t) <= 1e-18 * std::abs(s) || std::abs(t) < 1e-300) break;
      zk *= z;
    }
    return s;
  }
  cplx s = std::log(1.0 - z);
  cplx zk = 1.0;
  for (int k = 1; k <= p; ++k) {
    zk *= z;
    s += zk / double(k);
  }
  return s;
}

cplx weierstrass_factor(int p, cplx z) {
  if (p < 0) throw Error(ErrorKind::invalid_argument, "weierstrass factor: p must be >= 0");
  if (std::abs(z) < 0.5) return std::exp(log_weierstrass_factor(p, z));
  cplx poly = 0;
  cplx zk = 1.0;
  for (int k = 1; k <= p; ++k) {
    zk *= z;
    poly += zk / double(k);
  }
  return (1.0 - z) * std::exp(poly);
}

ExponentEstimate critical_exponent(const ZeroSequence& zeros) {
  zeros.validate();
  const std::size_t M = zeros.zeros.size();
  if (M < 100) {
    throw Error(ErrorKind::invalid_argument, "critical_exponent: need at least 100 zeros, got " + std::to_string(M));
  }
  // Fit on the upper 90 percent of ranks; the low end is pre-asymptotic.
  std::vector<double> x, y;
  for (std::size_t n = M / 10; n < M; ++n) {
    x.push_back(std::log(std::abs(zeros.zeros[n])));
    y.push_back(std::log(double(n + 1)));
  }
  const LineFit all = fit_line(x, y);
  const std::size_t h = x.size() / 2;
  const LineFit lo = fit_line({x.begin(), x.begin() + h}, {y.begin(), y.begin() + h});
  const LineFit hi = fit_line({x.begin() + h, x.end()}, {y.begin() + h, y.end()});
  ExponentEstimate e;
  e.value = all.slope;
  e.uncertainty = all.slope_se + 0.5 * std::abs(hi.slope - lo.slope);
  return e;
}

HadamardValue hadamard_eval(const HadamardData& data, cplx z, double tol) {
  const ZeroSequence& zs = data.zeros;
  zs.validate();
  const int p = data.factor_order;
  HadamardValue out;

  double tail = 0.0;
  if (!zs.complete && z != cplx(0.0)) {
    const std::size_t M = zs.zeros.size();
    if (M < 10) {
      throw Error(ErrorKind::invalid_argument, "hadamard_eval: tail bound exceeds tol (fewer than 10 stored zeros)");
    }
    const double aM = std::abs(zs.zeros.back());
    if (aM < 2 * std::abs(z)) {
      throw Error(ErrorKind::invalid_argument,
                  "hadamard_eval: tail bound exceeds tol (zeros with |a| < 2|z| are not all stored)");
    }
    // Extrapolate |a_n| ~ |a_M| (n/M)^{1/alpha} beyond the stored list and
    // use |log E_p(w)| <= 2|w|^{p+1} for |w| <= 1/2.
    std::vector<double> x, y;
    for (std::size_t n = M / 2; n < M; ++n) {
      x.push_back(std::log(std::abs(zs.zeros[n])));
      y.push_back(std::log(double(n + 1)));
    }
    const LineFit f = fit_line(x, y);
    const double alpha = f.slope + 2 * f.slope_se + 1e-3;
    const double q = (p + 1) / alpha;
    tail = q > 1 ? 2 * std::pow(std::abs(z) / aM, p + 1) * double(M) / (q - 1)
                 : std::numeric_limits<double>::infinity();
    if (!(tail <= tol)) {
      std::ostringstream os;
      os << "hadamard_eval: tail bound exceeds tol (" << tail << " > " << tol << ")";
      throw Error(ErrorKind::invalid_argument, os.str());
    }
  }
  out.tail_bound = tail;

  cplx logv = 0;
  cplx zk = 1.0;
  for (const auto& c : data.exponent_poly) {
    logv += c * zk;
    zk *= z;
  }
  if (zs.origin_order > 0) {
    if (z == cplx(0.0)) {
      out.value = 0.0;
      out.log_value = {-std::numeric_limits<double>::infinity(), 0.0};
      return out;
    }
    logv += double(zs.origin_order) * std::log(z);
  }
  for (const auto& a : zs.zeros) logv += log_weierstrass_factor(p, z / a);
  out.log_value = logv;
  out.value = std::exp(logv);
  return out;
}

OrderEstimate estimate_order_log(const std::function<double(cplx)>& log_abs_f,
                                 const std::vector<double>& angles,
                                 const std::vector<double>& radii) {
  if (radii.size() < 3 || angles.empty()) {
    throw Error(ErrorKind::invalid_argument, "estimate_order: need >= 3 radii and >= 1 ray");
  }
  const double rmax = *std::max_element(radii.begin(), radii.end());
  std::vector<double> used;
  for (double r : radii)
    if (r >= rmax / 100.0) used.push_back(r);
  std::sort(used.begin(), used.end());

  OrderEstimate est;
  est.radii_used = used;
  est.order = -std::numeric_limits<double>::infinity();
  bool overflow_everywhere = true;
  for (double theta : angles) {
    std::vector<double> x, y;
    bool overflow = false;
    for (double r : used) {
      const double L = log_abs_f(std::polar(r, theta));
      if (std::isinf(L) && L > 0) {
        overflow = true;
        continue;
      }
      if (!(L > 0) || !std::isfinite(L)) continue;
      x.push_back(std::log(r));
      y.push_back(std::log(L));
    }
    if (!overflow) overflow_everywhere = false;
    if (x.size() < 3) {
      est.per_ray.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const LineFit f = fit_line(x, y);
    est.per_ray.push_back(f.slope);
    if (f.slope > est.order) {
      est.order = f.slope;
      est.uncertainty = f.slope_se;
      est.best_angle = theta;
    }
  }
  if (!std::isfinite(est.order)) {
    if (overflow_everywhere) {
      throw Error(ErrorKind::invalid_argument, "estimate_order: overflow on all rays; use smaller radii");
    }
    throw Error(ErrorKind::invalid_argument, "estimate_order: log|f| is not positive on any ray");
  }
  return est;
}

OrderEstimate estimate_order(const std::function<cplx(cplx)>& f,
                             const std::vector<double>& angles,
                             const std::vector<double>& radii) {
  return estimate_order_log([&](cplx z) { return std::log(std::abs(f(z))); }, angles, radii);
}

std::vector<double> geometric_grid(double first, double last, int count) {
  if (!(first > 0) || !(last > first) || count < 2) {
    throw Error(ErrorKind::invalid_argument, "geometric_grid: need 0 < first < last and count >= 2");
  }
  std::vector<double> g(count);
  const double r = std::log(last / first) / (count - 1);
  for (int i = 0; i < count; ++i) g[i] = first * std::exp(r * i);
  g.back() = last;
  return g;
}

}  // namespace specdet
