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

#include <map>

#include "jumpfisher/monitoring.hpp"
#include "jumpfisher/renewal.hpp"

namespace jumpfisher {

// Throwing away part of a record (click labels, time tags, whole
// channels, or everything but a summary statistic) can only lose
// information. These routines compute what is left.

struct CompressionSpec {
  enum class Mode { ChannelsOnly, TimesOnly, SampleMean, PartialMonitoring };
  Mode mode = Mode::ChannelsOnly;
  std::vector<std::string> retained;              // PartialMonitoring
  std::map<std::string, double> efficiencies;     // PartialMonitoring
};

struct CompressionOptions {
  double dtheta = 0.0;
  int trajectories = 1000;
  std::uint64_t seed = 99;
  int threads = 0;
  GridSpec grid{};
  std::optional<ComplexMatrix> rho0;
};

struct ChannelsOnlyReport {
  bool renewal_route = false;
  double per_jump = 0.0;
  double per_jump_se = 0.0;        // zero on the closed-form route
  FisherEstimate estimate;         // populated on the Monte Carlo route
};

/// Fisher information of the click-label sequence with time tags
/// discarded: the renewal closed form when it applies, otherwise the
/// monitoring recursion over the discrete label chain (step operators
/// -J_k L0^{-1}).
ChannelsOnlyReport channels_only_fisher(const LindbladModel& model,
                                        const RealVector& theta, int param_index,
                                        int n_jumps,
                                        const CompressionOptions& opt = {});

/// Fisher information of the click times with labels discarded (one still
/// knows each click was monitored). Label-blind records are non-renewal
/// in general even when the labeled process is renewal, so this always
/// runs the Monte Carlo monitoring route with the summed click block.
FisherEstimate times_only_fisher(const LindbladModel& model, const RealVector& theta,
                                 int param_index, const StopRule& stop,
                                 const CompressionOptions& opt = {});

/// Restrict the monitored set and/or detector efficiencies; channels
/// absent from `retained` become unmonitored. All downstream machinery
/// applies to the result unchanged. Throws ConfigError when nothing
/// observable remains.
LindbladModel partial_monitoring(const LindbladModel& model,
                                 const std::vector<std::string>& retained,
                                 const std::map<std::string, double>& efficiencies = {});

/// Sample-mean compression: identical to sample_mean_fisher; see
/// renewal.hpp. Re-exported here so the compression surface is complete.
inline SampleMeanReport sample_mean_fisher_compressed(
    const LindbladModel& model, const RealVector& theta, int param_index,
    double n_jumps, const SampleMeanOptions& opt = {}) {
  return sample_mean_fisher(model, theta, param_index, n_jumps, opt);
}

}  // namespace jumpfisher
