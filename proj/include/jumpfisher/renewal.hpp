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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jumpfisher/model.hpp"
#include "jumpfisher/quadrature.hpp"

namespace jumpfisher {

// A jump process is renewal when every observed click resets the system
// to a channel-dependent state, which happens exactly when each monitored
// jump operator is rank one: L_k = c_k |mu_k><nu_k|. The click then lands
// the system in the pure reset state |mu_k><mu_k| no matter what came
// before, and the record is a Markov chain over (waiting time, channel)
// pairs.

struct RenewalChannel {
  std::string label;
  bool active = true;       // zero operators never fire and are skipped
  double amplitude = 0.0;   // c_k, real positive (phase moved into mu)
  double efficiency = 1.0;
  ComplexVector mu;         // post-jump ket
  ComplexVector nu;         // pre-jump ket
  ComplexMatrix reset_state;
};

struct RenewalStructure {
  ModelOperators ops;
  std::vector<RenewalChannel> channels;  // aligned with ops.labels
  bool amplitude_path = false;  // all channels monitored at unit efficiency
  ComplexMatrix h_eff;          // H - (i/2) sum_k L_k^dag L_k (amplitude path)
};

struct RenewalVerdict {
  bool renewal = false;
  std::string reason;
  std::optional<RenewalStructure> structure;
};

/// Rank-one test (second singular value below 1e-10 times the first) on
/// every monitored channel at the given parameter point.
RenewalVerdict check_renewal(const LindbladModel& model, const RealVector& theta);

/// Waiting-time statistics of an assembled operator set with given reset
/// states. Densities are evaluated as sums of complex exponentials from
/// the spectral decomposition of the no-click generator, with a dense
/// matrix-exponential fallback when that generator resists
/// diagonalization.
class WtdEvaluator {
 public:
  WtdEvaluator(const Superoperator& nojump, const std::vector<Superoperator>& jumps,
               const std::vector<ComplexMatrix>& initial_states);

  /// W(tau, k | q) = tr{ J_k e^{L0 tau} sigma_q }.
  double density(int k, int q, double tau) const;

  /// tr{ e^{L0 tau} sigma_q }: probability that no monitored click has
  /// happened after tau.
  double survival(int q, double tau) const;

  /// p(k|q): probability the next click is k given the last was q,
  /// whenever it happens.
  double transition_prob(int k, int q) const;

  /// Conditional mean / second moment of tau given the transition q -> k,
  /// from resolvent moments of the no-click generator.
  double conditional_mean(int k, int q) const;
  double conditional_second_moment(int k, int q) const;

  /// Decay rate of the slowest surviving mode; sets integration horizons.
  double slowest_decay() const;

  int n_channels() const { return static_cast<int>(rows_.size()); }
  int n_states() const { return static_cast<int>(cols_.size()); }

 private:
  ComplexVector resolvent_apply(const ComplexVector& v) const;  // L0^{-1} v

  SpectralPropagator prop_;
  Eigen::RowVectorXcd trace_row_;
  std::vector<Eigen::RowVectorXcd> rows_;   // tr_row * J_k (times P if spectral)
  std::vector<ComplexVector> cols_;         // vec(sigma_q) (P^{-1}-rotated if spectral)
  Eigen::RowVectorXcd survival_row_;
  std::vector<ComplexVector> sigma_vecs_;   // unrotated vec(sigma_q)
  std::vector<ComplexMatrix> jump_mats_;    // J_k superoperator matrices
  Eigen::FullPivLU<ComplexMatrix> nojump_lu_;
  bool spectral_ = false;
  double slowest_decay_ = 0.0;
};

/// The Markov chain of click labels: transition matrix, stationary law,
/// and channel activities, with the two independent routes to the
/// stationary law (activities at the full stationary state, and the
/// Perron vector of the transition matrix) cross-checked against each
/// other.
struct ChannelChain {
  std::vector<std::string> labels;
  RealMatrix transition;        // transition(k, q) = p(k|q)
  RealVector stationary;        // from activities at rho_ss
  RealVector stationary_perron; // from the transition matrix
  RealVector activities;        // clicks per unit time and channel
  double route_mismatch = 0.0;  // max |stationary - stationary_perron|
};

ChannelChain channel_chain(const RenewalStructure& s, double check_tol = 1e-8);

struct PairDiagnostics {
  int k = 0, q = 0;
  double weight = 0.0;           // p_q (joint) resp. p(k|q) p_q (conditional)
  double integral = 0.0;
  double quadrature_error = 0.0;
};

struct RenewalFisherOptions {
  double dtheta = 0.0;           // 0 -> 1e-4 * max(1, |theta_i|)
  QuadratureOptions quadrature{};
  double horizon_factor = 35.0;  // T_max = factor / slowest decay rate
};

struct RenewalFisherReport {
  double fisher_per_jump = 0.0;            // joint (time, channel) information
  double channels_per_jump = 0.0;          // click labels only
  double times_given_channels_per_jump = 0.0;
  double quadrature_error = 0.0;
  double decomposition_residual = 0.0;     // fisher - channels - times|channels
  double dtheta = 0.0;
  double horizon = 0.0;
  std::vector<PairDiagnostics> pairs;
};

/// Per-click Fisher information of a renewal record about parameter
/// component `param_index`, by adaptive quadrature of the squared
/// waiting-time score, together with its channel / times-given-channels
/// decomposition. Throws ModelModeError when the model is not renewal at
/// theta. The O(1) boundary term of a finite record is not included.
RenewalFisherReport fisher_renewal(const LindbladModel& model,
                                   const RealVector& theta, int param_index,
                                   const RenewalFisherOptions& opt = {});

/// Per-click Fisher information lower bound from conditional means and
/// variances of the waiting times (plus the exact channel term). Equality
/// holds for single-exponential waiting time distributions.
double fisher_bound(const LindbladModel& model, const RealVector& theta,
                    int param_index, const RenewalFisherOptions& opt = {});

/// Per-click Fisher information of the click-label sequence alone (time
/// tags discarded), in closed form for renewal models.
double channels_only_fisher_renewal(const LindbladModel& model,
                                    const RealVector& theta, int param_index,
                                    double dtheta = 0.0);

struct ClassicalFisherReport {
  double per_jump = 0.0;
  double channels_per_jump = 0.0;
  double times_given_channels_per_jump = 0.0;
  double activity = 0.0;  // jumps per unit time in the stationary state
};

/// Closed-form per-click Fisher information of a classical (Pauli) master
/// equation with rate matrix R(theta): R(j, i) >= 0 is the i -> j rate,
/// diagonal zero, all transitions monitored.
ClassicalFisherReport fisher_classical_me(
    const std::function<RealMatrix(double)>& rates, double theta,
    double dtheta = 0.0);

struct SampleMeanOptions {
  double dtheta = 0.0;
  // Non-renewal (correlated) route: covariances estimated from simulated
  // records until a run of lags stays below the threshold. The sample
  // volume must keep the covariance estimator noise under the threshold,
  // or the run never settles.
  int trajectories = 128;
  int jumps_per_trajectory = 30000;
  int max_lag = 256;
  double cov_rel_threshold = 1e-3;  // relative to the variance
  int consecutive_below = 10;
  std::uint64_t seed = 0x5eed;
  int grid_points = 2000;
  int threads = 0;
};

struct SampleMeanReport {
  double per_jump = 0.0;      // (d mu)^2 / (sigma^2 + 2 sum_i C_i)
  double per_jump_se = 0.0;   // from the covariance-sum spread (0 when exact)
  double fisher_total = 0.0;  // per_jump * n_jumps
  double mean = 0.0;
  double variance = 0.0;
  double covariance_sum = 0.0;
  double covariance_sum_se = 0.0;  // spread across trajectories
  int lags_used = 0;
  bool renewal_route = false;
};

/// Fisher information of the sample mean of the waiting times (labels
/// ignored). Single-channel renewal processes use exact Laplace-transform
/// moments and zero covariances; everything else estimates the covariance
/// series from simulated records.
SampleMeanReport sample_mean_fisher(const LindbladModel& model,
                                    const RealVector& theta, int param_index,
                                    double n_jumps,
                                    const SampleMeanOptions& opt = {});

}  // namespace jumpfisher
