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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jumpfisher/model.hpp"
#include "jumpfisher/rng.hpp"

namespace jumpfisher {

/// One detector click: the waiting time since the previous click and the
/// index of the channel that fired (into the monitored label list).
struct JumpEntry {
  double tau = 0.0;
  int channel = 0;
};

struct MeasurementRecord {
  std::vector<JumpEntry> entries;
  /// Engaged exactly for records stopped at a fixed final time: the
  /// click-free stretch between the last jump and the stopping time.
  std::optional<double> final_stretch;
  std::uint64_t seed = 0;
  std::uint64_t trajectory = 0;
  std::vector<std::string> labels;  // channel index -> label
};

struct StopRule {
  enum class Kind { Jumps, Time };
  Kind kind = Kind::Jumps;
  double value = 0.0;

  static StopRule after_jumps(int n) {
    return {Kind::Jumps, static_cast<double>(n)};
  }
  static StopRule after_time(double t) { return {Kind::Time, t}; }
};

struct GridSpec {
  int points = 2000;
  double t_max = 0.0;  // 0 -> 20 / (slowest decay rate of the no-click generator)
};

/// Everything trajectory sampling needs, precomputed on a uniform time
/// grid: no-click propagators, their parameter derivatives, and the
/// per-channel derivative blocks used to push the monitoring operator
/// along a record. Immutable once built; share freely across threads.
///
/// Sampled waiting times are snapped to this grid, and the snapped value
/// is what enters the record, so replaying a record against exact
/// propagators reproduces the sampled dynamics without interpolation
/// error.
struct SimulationTables {
  int dim = 0;
  std::vector<std::string> labels;
  GridSpec grid;      // resolved (t_max filled in)
  double dt = 0.0;
  double dtheta = 0.0;   // 0 when built without derivatives
  int param_index = -1;

  // Superoperator path (always present).
  std::vector<ComplexMatrix> props;                  // e^{L0 T_a}
  std::vector<Eigen::RowVectorXcd> survival_rows;    // tr_row * props[a]
  std::vector<ComplexMatrix> jumps;                  // click superoperators
  std::vector<Eigen::RowVectorXcd> weight_rows;      // tr_row * jumps[k]
  std::vector<ComplexMatrix> props_dot;              // d/dtheta e^{L0 T_a}
  std::vector<ComplexMatrix> jumps_dot;
  std::vector<std::vector<ComplexMatrix>> delta;     // [k][a]: d/dtheta (J_k e^{L0 T_a})

  // State-vector fast path, filled when every channel is monitored at
  // unit efficiency with rank-one jump operators.
  bool pure_available = false;
  ComplexMatrix h_eff;
  std::vector<ComplexMatrix> pure_props;             // e^{-i H_e T_a}
  std::vector<ComplexMatrix> jump_ops;               // L_k matrices
  std::vector<ComplexMatrix> jump_gram;              // L_k^dag L_k
  std::vector<ComplexMatrix> pure_props_dot;
  std::vector<ComplexMatrix> jump_ops_dot;
  std::vector<std::vector<ComplexMatrix>> pure_delta;  // d/dtheta (L_k e^{-i H_e T_a})

  int n_channels() const { return static_cast<int>(jumps.size()); }
  bool has_derivatives() const { return param_index >= 0; }
  int snap_index(double tau) const;
  double grid_time(int index) const { return index * dt; }
};

/// Build tables for `model` at `theta`. Pass `param_index >= 0` to also
/// tabulate the central-difference derivative blocks for that parameter
/// (needed by monitoring; plain simulation can skip them). The time
/// horizon is taken from the slowest decay mode unless the grid fixes it;
/// if the click-free survival from the stationary post-click state still
/// exceeds 1e-8 at the horizon, the horizon is doubled once, after which
/// a remaining overflow is an error.
///
/// `merge_monitored_channels` replaces the per-channel click blocks with
/// their sum under the single label "(any)": the statistics of records
/// whose click labels are discarded while the click times (and membership
/// in the monitored set) are kept. The no-click generator is unchanged.
SimulationTables precompute_tables(const LindbladModel& model,
                                   const RealVector& theta,
                                   const GridSpec& grid = {},
                                   int param_index = -1, double dtheta = 0.0,
                                   bool merge_monitored_channels = false);

/// Draw a waiting time from W(tau | rho) by inverse transform on the
/// tabulated click-free survival, returning the grid index of the snapped
/// draw. Throws NumericalError when the draw falls beyond the grid.
int sample_waiting_time_index(const SimulationTables& tables,
                              const ComplexVector& rho_vec, RngStream& rng);

/// As above for the state-vector path (survival = |V psi|^2).
int sample_waiting_time_index_pure(const SimulationTables& tables,
                                   const ComplexVector& psi, RngStream& rng);

/// Categorical draw over the monitored channels with weights tr(J_k rho).
/// Throws NumericalError when every weight is numerically zero.
int sample_channel(const SimulationTables& tables, const ComplexVector& rho_vec,
                   RngStream& rng);
int sample_channel_pure(const SimulationTables& tables, const ComplexVector& psi,
                        RngStream& rng);

/// Generate one record by Gillespie sampling: waiting time, drift,
/// channel, reset, repeat. The conditional state is renormalized exactly
/// at every step. `state_log`, when given, receives the normalized
/// post-click states.
MeasurementRecord simulate_record(const SimulationTables& tables,
                                  const ComplexMatrix& rho0, const StopRule& stop,
                                  RngStream& rng,
                                  std::vector<ComplexMatrix>* state_log = nullptr);

struct RecordProbability {
  double log_probability = 0.0;
  double probability = 0.0;  // exp(log), may underflow for long records
};

/// Exact density of a record: alternate exact no-click propagation and
/// click updates from rho0, accumulating per-step log traces of the
/// renormalized state. Records with a final stretch pick up the
/// click-free survival factor of that stretch.
RecordProbability record_probability(const LindbladModel& model,
                                     const RealVector& theta,
                                     const MeasurementRecord& record,
                                     const ComplexMatrix& rho0);

/// Line-delimited JSON, one record per line.
void write_records_jsonl(std::ostream& out,
                         const std::vector<MeasurementRecord>& records);
std::vector<MeasurementRecord> read_records_jsonl(
    std::istream& in, const std::vector<std::string>& labels);

}  // namespace jumpfisher
