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

#include "jumpfisher/renewal.hpp"
#include "jumpfisher/trajectory.hpp"

namespace jumpfisher {

/// Renewal log-likelihood of a record at a candidate parameter: the sum
/// over entries j >= 2 of log W(tau_j, k_j | k_{j-1}). The first entry
/// has no conditioning channel and is dropped (it does not scale with
/// record length). Returns -inf when an observed transition has zero
/// density. Throws ModelModeError off the renewal class, ConfigError for
/// records shorter than two clicks.
double loglik_renewal(const MeasurementRecord& record, const LindbladModel& model,
                      const RealVector& theta_candidate, int param_index);

struct EstimationOptions {
  double tol = 0.0;     // interval tolerance; 0 -> 1e-6 * interval width
  int max_evals = 200;  // replay budget
  double dtheta = 0.0;  // derivative step at each candidate
  /// Replay from the record's origin state including the first entry
  /// (the full likelihood). Switch off to optimize exactly the renewal
  /// log-likelihood, whose border term is dropped.
  bool include_first_entry = true;
  /// Origin state for the replay; by default the model's initial state
  /// at each candidate (parameter dependent). An explicit origin is
  /// treated as parameter free.
  std::optional<ComplexMatrix> rho0;
};

struct EstimationResult {
  double theta_hat = 0.0;
  double lo = 0.0, hi = 0.0;
  int iterations = 0;
  double final_abs_trace_xi = 0.0;
  double loglik = 0.0;     // renewal log-likelihood at theta_hat when defined
  bool boundary = false;   // extremum sits on the border; theta_hat is not an estimate
  bool flat = false;       // score identically zero over the interval
  std::string diagnostic;
};

/// Maximum likelihood by the traceless-monitoring-operator condition: the
/// likelihood is stationary exactly where tr xi vanishes, so the record
/// is replayed at candidate parameters (exact propagators at the
/// record's waiting times, quantized-candidate caching) and the score is
/// driven to zero, by bisection when it changes sign across the
/// interval and otherwise by golden-section descent on its square. A
/// minimum on the border is reported as a boundary verdict rather than an
/// estimate.
EstimationResult mle_monitoring(const MeasurementRecord& record,
                                const LindbladModel& model, const RealVector& theta,
                                int param_index, double lo, double hi,
                                const EstimationOptions& opt = {});

struct MeanWaitEstimate {
  double theta_hat = 0.0;
  double empirical_mean = 0.0;
  std::size_t pairs_used = 0;
  bool low_count_warning = false;  // a single observed pair
};

/// Summary-statistic estimator: average the waiting times observed on
/// the q -> k transitions of the records, then invert the model's
/// conditional mean waiting time (monotone on [lo, hi]) at that value.
MeanWaitEstimate mean_waiting_time_estimator(
    const std::vector<MeasurementRecord>& records, const LindbladModel& model,
    const RealVector& theta, int param_index, const std::string& from_label,
    const std::string& to_label, double lo, double hi, double tol = 0.0);

struct EnsembleStudy {
  std::vector<double> estimates;
  std::vector<double> logliks;
  std::vector<int> iterations;
  double mean = 0.0;
  double variance = 0.0;
  double mse = 0.0;        // against true_theta
  double true_theta = 0.0;
  double cr_bound = 0.0;   // 1 / F for the record length studied
  int boundary_verdicts = 0;
};

/// MLE over a batch of records (parallel across records).
EnsembleStudy run_mle_study(const std::vector<MeasurementRecord>& records,
                            const LindbladModel& model, const RealVector& theta,
                            int param_index, double lo, double hi,
                            double true_theta, double fisher_total,
                            const EstimationOptions& opt = {}, int threads = 0);

void write_study_csv(std::ostream& out, const EnsembleStudy& study);
void write_study_summary_json(std::ostream& out, const EnsembleStudy& study);

}  // namespace jumpfisher
