// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "specdet/geometry.hpp"

namespace specdet {

// Argument of z measured from the cut ray at angle theta, in
// (theta - 2 pi, theta].
double arg_cut(cplx z, double theta);
cplx log_cut(cplx z, double theta);
// Angular distance from z to the ray arg = theta.
double angle_to_ray(cplx z, double theta);

// Ein(z) = sum_{k>=1} (-1)^{k+1} z^k / (k k!), entire.
cplx ein(cplx z);
// Principal exponential integral E1(z) = -gamma - Log z + Ein(z).
cplx expint_e1(cplx z);
// E1 continued with the logarithm branch of the cut theta.
cplx expint_e1_cut(cplx z, double theta);

}  // namespace specdet
