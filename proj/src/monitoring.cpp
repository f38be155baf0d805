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

#include "jumpfisher/monitoring.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "jumpfisher/parallel.hpp"

namespace jumpfisher {

namespace {

double real_trace(const ComplexMatrix& m) { return m.trace().real(); }

}  // namespace

MonitoringState init_monitor(const LindbladModel& model, const RealVector& theta,
                             int param_index, double dtheta,
                             const std::optional<ComplexMatrix>& rho0) {
  if (dtheta == 0.0) dtheta = default_displacement(theta, param_index);
  MonitoringState st;
  st.rho = rho0 ? *rho0 : model.initial_state_at(theta);
  if (rho0) {
    // An externally supplied start carries no parameter dependence.
    st.xi = ComplexMatrix::Zero(model.dim, model.dim);
  } else {
    RealVector up = theta, down = theta;
    up(param_index) += dtheta;
    down(param_index) -= dtheta;
    if (!model.theta_valid(up) || !model.theta_valid(down)) {
      throw ConfigError("init_monitor: theta +- dtheta leaves the valid region");
    }
    st.xi = (model.initial_state_at(up) - model.initial_state_at(down)) /
            (2.0 * dtheta);
  }
  st.trace_xi = real_trace(st.xi);
  return st;
}

namespace {

MonitoringState to_pure(const MonitoringState& st) {
  MonitoringState out = st;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(st.rho));
  out.psi = es.eigenvectors().col(es.eigenvalues().size() - 1);
  out.pure = true;
  return out;
}

// Shared Kraus-sandwich update: given the combined operator K (click or
// no-click block at the snapped time) and its parameter derivative D,
//   rho' = K rho K^dag / p,   xi' = (D rho K^dag + K rho D^dag + K xi
//   K^dag) / p,   p = tr(K rho K^dag).
MonitoringState kraus_update_pure(const MonitoringState& st, const ComplexMatrix& k,
                                  const ComplexMatrix& d) {
  MonitoringState out = st;
  const ComplexVector kpsi = k * st.psi;
  const double denom = kpsi.squaredNorm();
  if (denom < 1e-300) throw NumericalError("monitoring update underflow");
  const ComplexVector dpsi = d * st.psi;
  out.xi = (k * st.xi * k.adjoint() + dpsi * kpsi.adjoint() + kpsi * dpsi.adjoint()) /
           denom;
  out.psi = kpsi / std::sqrt(denom);
  out.rho = out.psi * out.psi.adjoint();
  out.trace_xi = real_trace(out.xi);
  return out;
}

MonitoringState superop_update(const MonitoringState& st, const ComplexMatrix& m,
                               const ComplexMatrix& m_dot) {
  MonitoringState out = st;
  const ComplexVector rho_next = m * vectorize(st.rho);
  const ComplexVector xi_next = m_dot * vectorize(st.rho) + m * vectorize(st.xi);
  const double denom = devectorize(rho_next).trace().real();
  if (denom < 1e-300) throw NumericalError("monitoring update underflow");
  out.rho = devectorize(rho_next) / denom;
  out.xi = devectorize(xi_next) / denom;
  out.trace_xi = real_trace(out.xi);
  out.pure = false;
  return out;
}

}  // namespace

MonitoringState step_monitor(const MonitoringState& state, const JumpEntry& entry,
                             const SimulationTables& tables) {
  if (!tables.has_derivatives()) {
    throw ConfigError("step_monitor: tables were built without derivative blocks");
  }
  const int idx = tables.snap_index(entry.tau);
  const int k = entry.channel;
  MonitoringState out;
  if (state.pure) {
    out = kraus_update_pure(state, tables.jump_ops[k] * tables.pure_props[idx],
                            tables.pure_delta[k][idx]);
  } else {
    out = superop_update(state, tables.jumps[k] * tables.props[idx],
                         tables.delta[k][idx]);
  }
  out.t = state.t + entry.tau;
  out.jumps_seen = state.jumps_seen + 1;
  return out;
}

MonitoringState drift_monitor(const MonitoringState& state, double delta_t,
                              const SimulationTables& tables) {
  if (!tables.has_derivatives()) {
    throw ConfigError("drift_monitor: tables were built without derivative blocks");
  }
  if (delta_t <= 0.5 * tables.dt) return state;  // snaps to the identity block
  const int idx = tables.snap_index(delta_t);
  MonitoringState out;
  if (state.pure) {
    out = kraus_update_pure(state, tables.pure_props[idx], tables.pure_props_dot[idx]);
  } else {
    out = superop_update(state, tables.props[idx], tables.props_dot[idx]);
  }
  out.t = state.t + delta_t;
  out.jumps_seen = state.jumps_seen;
  return out;
}

namespace {

struct TrajectoryPlan {
  const SimulationTables* tables = nullptr;
  StopRule stop;
  std::vector<double> epoch_times;  // time-stopped readout grid
  MonitoringState init;
  bool use_pure = false;
};

// One Gillespie trajectory with the monitoring operator riding along;
// `emit` receives (grid slot, tr xi) at every readout point.
void run_trajectory(const TrajectoryPlan& plan, RngStream& rng,
                    const std::function<void(int, double)>& emit) {
  const SimulationTables& tables = *plan.tables;
  MonitoringState st = plan.use_pure ? to_pure(plan.init) : plan.init;

  if (plan.stop.kind == StopRule::Kind::Jumps) {
    const int n_jumps = static_cast<int>(plan.stop.value);
    for (int j = 0; j < n_jumps; ++j) {
      const int idx = st.pure
                          ? sample_waiting_time_index_pure(tables, st.psi, rng)
                          : [&] {
                              const ComplexVector v = vectorize(st.rho);
                              return sample_waiting_time_index(tables, v, rng);
                            }();
      const double tau = tables.grid_time(idx);
      int channel;
      if (st.pure) {
        ComplexVector drifted = tables.pure_props[idx] * st.psi;
        drifted.normalize();
        channel = sample_channel_pure(tables, drifted, rng);
      } else {
        ComplexVector drifted = tables.props[idx] * vectorize(st.rho);
        drifted /= devectorize(drifted).trace().real();
        channel = sample_channel(tables, drifted, rng);
      }
      st = step_monitor(st, {tau, channel}, tables);
      emit(j, st.trace_xi);
    }
    return;
  }

  const double t_f = plan.stop.value;
  std::size_t next_epoch = 0;
  for (;;) {
    const int idx = st.pure ? sample_waiting_time_index_pure(tables, st.psi, rng)
                            : [&] {
                                const ComplexVector v = vectorize(st.rho);
                                return sample_waiting_time_index(tables, v, rng);
                              }();
    const double tau = tables.grid_time(idx);
    const double t_next = st.t + tau;
    while (next_epoch < plan.epoch_times.size() &&
           plan.epoch_times[next_epoch] <= std::min(t_next, t_f)) {
      const MonitoringState read =
          drift_monitor(st, plan.epoch_times[next_epoch] - st.t, tables);
      emit(static_cast<int>(next_epoch), read.trace_xi);
      ++next_epoch;
    }
    if (t_next > t_f) break;
    int channel;
    if (st.pure) {
      ComplexVector drifted = tables.pure_props[idx] * st.psi;
      drifted.normalize();
      channel = sample_channel_pure(tables, drifted, rng);
    } else {
      ComplexVector drifted = tables.props[idx] * vectorize(st.rho);
      drifted /= devectorize(drifted).trace().real();
      channel = sample_channel(tables, drifted, rng);
    }
    st = step_monitor(st, {tau, channel}, tables);
  }
}

std::vector<double> make_epochs(double t_f, int epochs) {
  std::vector<double> out(epochs);
  for (int i = 0; i < epochs; ++i) out[i] = t_f * (i + 1) / epochs;
  return out;
}

void mean_and_se(const std::vector<std::vector<double>>& samples,
                 std::vector<double>& mean, std::vector<double>& se) {
  const std::size_t m = samples.size();
  const std::size_t n = samples.empty() ? 0 : samples[0].size();
  mean.assign(n, 0.0);
  se.assign(n, 0.0);
  for (const auto& row : samples) {
    for (std::size_t i = 0; i < n; ++i) mean[i] += row[i];
  }
  for (std::size_t i = 0; i < n; ++i) mean[i] /= static_cast<double>(m);
  if (m < 2) return;
  for (const auto& row : samples) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = row[i] - mean[i];
      se[i] += d * d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    se[i] = std::sqrt(se[i] / (static_cast<double>(m) * (m - 1)));
  }
}

}  // namespace

FisherEstimate gillespie_fisher(const LindbladModel& model, const RealVector& theta,
                                int param_index, const StopRule& stop,
                                int trajectories, std::uint64_t seed,
                                const GillespieFisherOptions& opt) {
  if (trajectories < 2) {
    throw ConfigError("gillespie_fisher: need at least 2 trajectories");
  }
  const SimulationTables tables = precompute_tables(
      model, theta, opt.grid, param_index, opt.dtheta, opt.merge_channels);

  TrajectoryPlan plan;
  plan.tables = &tables;
  plan.stop = stop;
  plan.init = init_monitor(model, theta, param_index, opt.dtheta, opt.rho0);
  plan.use_pure = tables.pure_available &&
                  std::abs((plan.init.rho * plan.init.rho).trace().real() - 1.0) < 1e-10;

  FisherEstimate est;
  est.trajectories = trajectories;
  est.time_grid = stop.kind == StopRule::Kind::Time;
  if (est.time_grid) {
    plan.epoch_times = make_epochs(stop.value, opt.epochs);
    est.grid = plan.epoch_times;
  } else {
    est.grid.resize(static_cast<std::size_t>(stop.value));
    for (std::size_t j = 0; j < est.grid.size(); ++j) est.grid[j] = double(j + 1);
  }

  std::vector<std::vector<double>> samples(
      trajectories, std::vector<double>(est.grid.size(), 0.0));
  std::vector<std::vector<double>> scores(
      trajectories, std::vector<double>(est.grid.size(), 0.0));
  run_parallel(trajectories, opt.threads, [&](int m) {
    RngStream rng(seed, static_cast<std::uint64_t>(m));
    run_trajectory(plan, rng, [&](int slot, double trace_xi) {
      samples[m][slot] = trace_xi * trace_xi;
      scores[m][slot] = trace_xi;
    });
  });

  mean_and_se(samples, est.mean, est.se);
  mean_and_se(scores, est.score_mean, est.score_se);
  if (opt.keep_trajectories) est.per_trajectory = std::move(samples);
  return est;
}

void write_fisher_csv(std::ostream& out, const FisherEstimate& estimate) {
  out << "grid_value,mean_tr_xi_sq,stderr,M\n";
  out.precision(17);
  for (std::size_t i = 0; i < estimate.grid.size(); ++i) {
    out << estimate.grid[i] << ',' << estimate.mean[i] << ',' << estimate.se[i]
        << ',' << estimate.trajectories << "\n";
  }
}

FisherRateReport fisher_rate(const LindbladModel& model, const RealVector& theta,
                             int param_index, int trajectories, double horizon,
                             std::uint64_t seed, const GillespieFisherOptions& opt) {
  if (trajectories < 2) throw ConfigError("fisher_rate: need at least 2 trajectories");
  const SimulationTables tables =
      precompute_tables(model, theta, opt.grid, param_index, opt.dtheta);

  TrajectoryPlan plan;
  plan.tables = &tables;
  plan.stop = StopRule::after_time(horizon);
  plan.epoch_times = make_epochs(horizon, opt.epochs);
  plan.init = init_monitor(model, theta, param_index, opt.dtheta, opt.rho0);
  plan.use_pure = false;  // current readout needs the full conditional state

  const int n_epochs = static_cast<int>(plan.epoch_times.size());
  std::vector<std::vector<double>> samples(
      trajectories, std::vector<double>(n_epochs, 0.0));

  run_parallel(trajectories, opt.threads, [&](int m) {
    RngStream rng(seed, static_cast<std::uint64_t>(m));
    MonitoringState st = plan.init;
    std::size_t next_epoch = 0;
    while (next_epoch < plan.epoch_times.size()) {
      const ComplexVector v = vectorize(st.rho);
      const int idx = sample_waiting_time_index(tables, v, rng);
      const double tau = tables.grid_time(idx);
      const double t_next = st.t + tau;
      while (next_epoch < plan.epoch_times.size() &&
             plan.epoch_times[next_epoch] <= std::min(t_next, horizon)) {
        const MonitoringState read =
            drift_monitor(st, plan.epoch_times[next_epoch] - st.t, tables);
        // d rho_c recovered from the monitoring operator.
        const ComplexMatrix drho = read.xi - read.rho * Complex(read.trace_xi, 0.0);
        double rate = 0.0;
        const ComplexVector rho_vec = vectorize(read.rho);
        const ComplexVector drho_vec = vectorize(drho);
        for (int k = 0; k < tables.n_channels(); ++k) {
          const double current = (tables.weight_rows[k] * rho_vec)(0).real();
          const double d_value =
              devectorize(tables.jumps_dot[k] * rho_vec).trace().real() +
              (tables.weight_rows[k] * drho_vec)(0).real();
          if (current < 1e-14) {
            if (std::abs(d_value) < 1e-10) continue;
            throw InfiniteInformationError(
                "fisher_rate: channel '" + tables.labels[k] +
                "' has vanishing current with nonvanishing derivative");
          }
          rate += d_value * d_value / current;
        }
        samples[m][static_cast<int>(next_epoch)] = rate;
        ++next_epoch;
      }
      if (t_next > horizon) break;
      ComplexVector drifted = tables.props[idx] * v;
      drifted /= devectorize(drifted).trace().real();
      const int channel = sample_channel(tables, drifted, rng);
      st = step_monitor(st, {tau, channel}, tables);
    }
  });

  FisherRateReport rep;
  rep.trajectories = trajectories;
  rep.times = plan.epoch_times;
  mean_and_se(samples, rep.mean, rep.se);

  // Long-time value: per-trajectory average over the later half of the
  // window, then mean and spread over trajectories.
  const int half = n_epochs / 2;
  std::vector<std::vector<double>> tail(trajectories, std::vector<double>(1, 0.0));
  for (int m = 0; m < trajectories; ++m) {
    double acc = 0.0;
    for (int e = half; e < n_epochs; ++e) acc += samples[m][e];
    tail[m][0] = acc / (n_epochs - half);
  }
  std::vector<double> mean1, se1;
  mean_and_se(tail, mean1, se1);
  rep.asymptotic_rate = mean1[0];
  rep.asymptotic_se = se1[0];
  return rep;
}

FisherMatrixReport fisher_matrix(const LindbladModel& model, const RealVector& theta,
                                 const StopRule& stop, int trajectories,
                                 std::uint64_t seed,
                                 const GillespieFisherOptions& opt) {
  const int n_params = static_cast<int>(theta.size());
  if (n_params < 1) throw ConfigError("fisher_matrix: no parameters");
  if (trajectories < 2) throw ConfigError("fisher_matrix: need at least 2 trajectories");

  // One table set per parameter; the center blocks coincide, so the first
  // set also drives the sampling.
  std::vector<SimulationTables> tables;
  tables.reserve(n_params);
  for (int i = 0; i < n_params; ++i) {
    tables.push_back(precompute_tables(model, theta, opt.grid, i, opt.dtheta));
  }
  const SimulationTables& t0 = tables[0];

  std::vector<MonitoringState> init;
  for (int i = 0; i < n_params; ++i) {
    init.push_back(init_monitor(model, theta, i, opt.dtheta, opt.rho0));
  }

  std::vector<RealVector> scores(trajectories, RealVector::Zero(n_params));
  run_parallel(trajectories, opt.threads, [&](int m) {
    RngStream rng(seed, static_cast<std::uint64_t>(m));
    std::vector<MonitoringState> st = init;
    double t_now = 0.0;
    int jumps = 0;
    for (;;) {
      if (stop.kind == StopRule::Kind::Jumps &&
          jumps >= static_cast<int>(stop.value)) {
        break;
      }
      const ComplexVector v = vectorize(st[0].rho);
      const int idx = sample_waiting_time_index(t0, v, rng);
      const double tau = t0.grid_time(idx);
      if (stop.kind == StopRule::Kind::Time && t_now + tau > stop.value) {
        // Read out through the final click-free stretch.
        for (int i = 0; i < n_params; ++i) {
          st[i] = drift_monitor(st[i], stop.value - t_now, tables[i]);
        }
        break;
      }
      ComplexVector drifted = t0.props[idx] * v;
      drifted /= devectorize(drifted).trace().real();
      const int channel = sample_channel(t0, drifted, rng);
      for (int i = 0; i < n_params; ++i) {
        st[i] = step_monitor(st[i], {tau, channel}, tables[i]);
      }
      t_now += tau;
      ++jumps;
    }
    for (int i = 0; i < n_params; ++i) scores[m](i) = st[i].trace_xi;
  });

  FisherMatrixReport rep;
  rep.trajectories = trajectories;
  rep.raw = RealMatrix::Zero(n_params, n_params);
  rep.se = RealMatrix::Zero(n_params, n_params);
  for (const auto& s : scores) rep.raw += s * s.transpose();
  rep.raw /= trajectories;
  for (const auto& s : scores) {
    const RealMatrix d = s * s.transpose() - rep.raw;
    rep.se += d.cwiseProduct(d);
  }
  rep.se = (rep.se / (double(trajectories) * (trajectories - 1))).cwiseSqrt();

  rep.matrix = rep.raw;
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(rep.matrix);
  const double lambda_min = es.eigenvalues().minCoeff();
  if (lambda_min < 0) {
    const double clamp_tol = 3.0 * rep.se.maxCoeff();
    if (lambda_min < -clamp_tol) {
      throw NumericalError(
          "fisher_matrix: eigenvalue " + std::to_string(lambda_min) +
          " is more negative than the Monte Carlo clamp tolerance " +
          std::to_string(clamp_tol));
    }
    RealVector clamped = es.eigenvalues().cwiseMax(0.0);
    rep.matrix = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
    rep.clamped = true;
  }
  return rep;
}

}  // namespace jumpfisher
