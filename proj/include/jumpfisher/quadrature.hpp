// Copyright 2026 The jumpfisher Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>

#include "jumpfisher/types.hpp"

namespace jumpfisher {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  int max_intervals = 4000;
};

/// Adaptive Gauss-Kronrod 15(7) integration of f on [a, b]: the worst
/// interval by local error estimate is bisected until the summed error
/// passes the tolerance. Suited to the oscillatory decaying integrands
/// that waiting-time statistics produce. Throws NumericalError when the
/// interval budget runs out before convergence.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadratureOptions& opt = {});

}  // namespace jumpfisher
