// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "specdet/rng.hpp"

#include <cmath>

namespace specdet {

namespace {

constexpr std::uint32_t philox_m0 = 0xD2511F53u;
constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
constexpr std::uint32_t philox_w0 = 0x9E3779B9u;
constexpr std::uint32_t philox_w1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = std::uint64_t(a) * b;
  hi = std::uint32_t(p >> 32);
  lo = std::uint32_t(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += philox_w0;
      key[1] += philox_w1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(philox_m0, ctr[0], hi0, lo0);
    mulhilo(philox_m1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

CounterStream::CounterStream(std::uint64_t seed, std::uint64_t stream)
    : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)}, stream_(stream) {}

std::uint32_t CounterStream::next_u32() {
  if (used_ == 4) {
    const Philox4x32::Counter ctr{std::uint32_t(block_), std::uint32_t(block_ >> 32),
                                  std::uint32_t(stream_), std::uint32_t(stream_ >> 32)};
    buf_ = Philox4x32::apply(ctr, key_);
    ++block_;
    used_ = 0;
  }
  return buf_[used_++];
}

double CounterStream::uniform() {
  const std::uint64_t a = next_u32() >> 5;  // 27 bits
  const std::uint64_t b = next_u32() >> 6;  // 26 bits
  return (double((a << 26) | b) + 0.5) * 0x1.0p-53;
}

double CounterStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

SampleMoments sample_moments(const std::vector<double>& x) {
  SampleMoments m;
  m.count = x.size();
  if (x.empty()) return m;
  CompensatedSum s;
  for (double v : x) s.add(v);
  m.mean = s.value() / double(x.size());
  if (x.size() < 2) return m;
  CompensatedSum s2, s4;
  for (double v : x) {
    const double d = v - m.mean;
    s2.add(d * d);
    s4.add(d * d * d * d);
  }
  m.variance = s2.value() / double(x.size() - 1);
  m.std_error = std::sqrt(m.variance / double(x.size()));
  m.fourth_central = s4.value() / double(x.size());
  return m;
}

}  // namespace specdet
