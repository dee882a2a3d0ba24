// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace specdet {

// Philox4x32-10 counter based generator (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key);
};

// Independent stream for (seed, stream id).  The seed is the key, the
// stream id fills the upper counter words and the lower words count blocks,
// so draw i of stream s never depends on other streams or on scheduling.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  // Box-Muller; deterministic pairs.
  double normal();

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buf_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct SampleMoments {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;
  double fourth_central = 0.0;
};

// Two-pass moments with compensated sums.
SampleMoments sample_moments(const std::vector<double>& x);

}  // namespace specdet
