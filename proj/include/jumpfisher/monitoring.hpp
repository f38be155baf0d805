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

#include "jumpfisher/trajectory.hpp"

namespace jumpfisher {

// The monitoring operator xi is the parameter derivative of the
// unnormalized conditional state divided by its trace. Its trace is the
// running score d/dtheta log P(record so far), so E[(tr xi)^2] over
// records is the Fisher information, sampled here along Gillespie
// trajectories.

struct MonitoringState {
  ComplexMatrix rho;  // normalized conditional state
  ComplexMatrix xi;
  double t = 0.0;
  int jumps_seen = 0;
  double trace_xi = 0.0;

  bool pure = false;   // state-vector representation active
  ComplexVector psi;   // valid when pure
};

/// Start a trajectory: rho = rho0 (given, or the model's initial state at
/// theta), xi = d rho0 / d theta by central differences: the zero matrix
/// whenever rho0 does not depend on theta, and traceless always.
MonitoringState init_monitor(const LindbladModel& model, const RealVector& theta,
                             int param_index, double dtheta = 0.0,
                             const std::optional<ComplexMatrix>& rho0 = {});

/// Advance (rho, xi) through one observed click (tau, channel k), using
/// the table blocks at the grid point tau snaps to. The denominator is
/// the click probability density; its underflow is reported, not hidden.
MonitoringState step_monitor(const MonitoringState& state, const JumpEntry& entry,
                             const SimulationTables& tables);

/// Advance (rho, xi) through a click-free stretch of length delta_t
/// (same update with the no-click propagator in place of the click
/// block). Used to read the score out between jumps on a time grid.
MonitoringState drift_monitor(const MonitoringState& state, double delta_t,
                              const SimulationTables& tables);

struct FisherEstimate {
  std::vector<double> grid;  // jump counts or times, depending on the ensemble
  std::vector<double> mean;  // E[(tr xi)^2] per grid point
  std::vector<double> se;    // standard error of the mean
  std::vector<double> score_mean;  // E[tr xi]: zero in expectation
  std::vector<double> score_se;
  int trajectories = 0;
  bool time_grid = false;
  std::vector<std::vector<double>> per_trajectory;  // kept on request
};

struct GillespieFisherOptions {
  GridSpec grid{};
  double dtheta = 0.0;
  int epochs = 100;  // readout points for time-stopped ensembles
  int threads = 0;   // 0 -> hardware concurrency
  bool keep_trajectories = false;
  bool merge_channels = false;  // label-blind records (times-only statistics)
  std::optional<ComplexMatrix> rho0;
};

/// Monte Carlo Fisher information along `trajectories` independent
/// records: mean and standard error of (tr xi)^2 at every grid point.
/// Deterministic for fixed (seed, trajectories) regardless of thread
/// count.
FisherEstimate gillespie_fisher(const LindbladModel& model, const RealVector& theta,
                                int param_index, const StopRule& stop,
                                int trajectories, std::uint64_t seed,
                                const GillespieFisherOptions& opt = {});

/// (grid_value, mean_tr_xi_sq, stderr, M) rows.
void write_fisher_csv(std::ostream& out, const FisherEstimate& estimate);

struct FisherRateReport {
  std::vector<double> times;
  std::vector<double> mean;  // sum_k E[(d I_k)^2 / I_k] per epoch
  std::vector<double> se;
  double asymptotic_rate = 0.0;    // average over the later half of the window
  double asymptotic_se = 0.0;
  int trajectories = 0;
};

/// Fisher information rate from the stochastic click currents I_k =
/// tr(J_k rho_c): at each epoch, average (d_theta I_k)^2 / I_k over
/// trajectories and channels. The state derivative is recovered from the
/// monitoring operator as d rho_c = xi - rho_c tr(xi).
FisherRateReport fisher_rate(const LindbladModel& model, const RealVector& theta,
                             int param_index, int trajectories, double horizon,
                             std::uint64_t seed,
                             const GillespieFisherOptions& opt = {});

struct FisherMatrixReport {
  RealMatrix matrix;       // PSD-clamped when Monte Carlo noise dips below zero
  RealMatrix raw;          // as estimated
  RealMatrix se;           // entrywise standard errors
  int trajectories = 0;
  bool clamped = false;
};

/// Multi-parameter Fisher information matrix: one monitoring operator per
/// component rides along the same sampled record; entry (i, j) averages
/// tr(xi_i) tr(xi_j) at the stopping point. Eigenvalues within the Monte
/// Carlo clamp tolerance below zero are set to zero; anything more
/// negative is an error.
FisherMatrixReport fisher_matrix(const LindbladModel& model, const RealVector& theta,
                                 const StopRule& stop, int trajectories,
                                 std::uint64_t seed,
                                 const GillespieFisherOptions& opt = {});

}  // namespace jumpfisher
