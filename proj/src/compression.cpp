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

#include "jumpfisher/compression.hpp"

#include <cmath>

#include "jumpfisher/parallel.hpp"

namespace jumpfisher {

namespace {

// Step operators of the label-only chain: M_k = -J_k L0^{-1}. Applied to
// the running state they give the probability of the next label
// irrespective of when it fires; the weights over k sum to one.
std::vector<ComplexMatrix> label_chain_ops(const ModelOperators& ops) {
  Eigen::FullPivLU<ComplexMatrix> lu(ops.nojump.matrix);
  if (!lu.isInvertible()) {
    throw DarkSubspaceError(
        "channels_only_fisher: the no-click generator is singular");
  }
  const ComplexMatrix inv = lu.inverse();
  std::vector<ComplexMatrix> out;
  out.reserve(ops.jumps.size());
  for (const auto& j : ops.jumps) out.push_back(-(j.matrix * inv));
  return out;
}

}  // namespace

ChannelsOnlyReport channels_only_fisher(const LindbladModel& model,
                                        const RealVector& theta, int param_index,
                                        int n_jumps, const CompressionOptions& opt) {
  ChannelsOnlyReport rep;
  const RenewalVerdict verdict = check_renewal(model, theta);
  if (verdict.renewal) {
    rep.renewal_route = true;
    rep.per_jump =
        channels_only_fisher_renewal(model, theta, param_index, opt.dtheta);
    return rep;
  }

  if (opt.trajectories < 2) {
    throw ConfigError("channels_only_fisher: need at least 2 trajectories");
  }
  const DisplacedOperators d = displace(model, theta, param_index, opt.dtheta);
  const std::vector<ComplexMatrix> m_c = label_chain_ops(d.center);
  const std::vector<ComplexMatrix> m_p = label_chain_ops(d.plus);
  const std::vector<ComplexMatrix> m_m = label_chain_ops(d.minus);
  const int nk = static_cast<int>(m_c.size());
  std::vector<ComplexMatrix> m_dot(nk);
  for (int k = 0; k < nk; ++k) m_dot[k] = (m_p[k] - m_m[k]) / (2.0 * d.dtheta);

  const MonitoringState init =
      init_monitor(model, theta, param_index, opt.dtheta, opt.rho0);
  const Eigen::RowVectorXcd tr_row = trace_row(model.dim);

  std::vector<std::vector<double>> samples(
      opt.trajectories, std::vector<double>(n_jumps, 0.0));
  run_parallel(opt.trajectories, opt.threads, [&](int m) {
    RngStream rng(opt.seed, static_cast<std::uint64_t>(m));
    ComplexVector rho = vectorize(init.rho);
    ComplexVector xi = vectorize(init.xi);
    for (int j = 0; j < n_jumps; ++j) {
      // Categorical draw over labels; the weights already sum to one.
      const double u = rng.uniform();
      double acc = 0.0;
      int pick = nk - 1;
      for (int k = 0; k < nk; ++k) {
        acc += std::max(0.0, (tr_row * (m_c[k] * rho))(0).real());
        if (u <= acc) {
          pick = k;
          break;
        }
      }
      const ComplexVector rho_next = m_c[pick] * rho;
      const double denom = (tr_row * rho_next)(0).real();
      if (denom < 1e-300) {
        throw NumericalError("channels_only_fisher: label probability underflow");
      }
      const ComplexVector xi_next = m_dot[pick] * rho + m_c[pick] * xi;
      rho = rho_next / denom;
      xi = xi_next / denom;
      const double score = devectorize(xi).trace().real();
      samples[m][j] = score * score;
    }
  });

  rep.estimate.trajectories = opt.trajectories;
  rep.estimate.grid.resize(n_jumps);
  for (int j = 0; j < n_jumps; ++j) rep.estimate.grid[j] = j + 1;
  rep.estimate.mean.assign(n_jumps, 0.0);
  rep.estimate.se.assign(n_jumps, 0.0);
  for (const auto& row : samples) {
    for (int j = 0; j < n_jumps; ++j) rep.estimate.mean[j] += row[j];
  }
  for (int j = 0; j < n_jumps; ++j) rep.estimate.mean[j] /= opt.trajectories;
  for (const auto& row : samples) {
    for (int j = 0; j < n_jumps; ++j) {
      const double dd = row[j] - rep.estimate.mean[j];
      rep.estimate.se[j] += dd * dd;
    }
  }
  for (int j = 0; j < n_jumps; ++j) {
    rep.estimate.se[j] = std::sqrt(rep.estimate.se[j] /
                                   (double(opt.trajectories) * (opt.trajectories - 1)));
  }
  rep.per_jump = rep.estimate.mean.back() / n_jumps;
  rep.per_jump_se = rep.estimate.se.back() / n_jumps;
  return rep;
}

FisherEstimate times_only_fisher(const LindbladModel& model, const RealVector& theta,
                                 int param_index, const StopRule& stop,
                                 const CompressionOptions& opt) {
  GillespieFisherOptions gopt;
  gopt.grid = opt.grid;
  gopt.dtheta = opt.dtheta;
  gopt.threads = opt.threads;
  gopt.rho0 = opt.rho0;
  gopt.merge_channels = true;
  return gillespie_fisher(model, theta, param_index, stop, opt.trajectories,
                          opt.seed, gopt);
}

LindbladModel partial_monitoring(const LindbladModel& model,
                                 const std::vector<std::string>& retained,
                                 const std::map<std::string, double>& efficiencies) {
  LindbladModel out = model;
  for (const auto& name : retained) {
    bool found = false;
    for (const auto& ch : model.channels) found = found || ch.label == name;
    if (!found) {
      throw ConfigError("partial_monitoring: unknown channel '" + name + "'");
    }
  }
  for (const auto& [name, eta] : efficiencies) {
    if (eta < 0.0 || eta > 1.0) {
      throw ConfigError("partial_monitoring: efficiency for '" + name +
                        "' outside [0, 1]");
    }
  }
  bool observable = false;
  for (auto& ch : out.channels) {
    ch.monitored =
        std::find(retained.begin(), retained.end(), ch.label) != retained.end();
    const auto it = efficiencies.find(ch.label);
    if (it != efficiencies.end()) ch.efficiency = it->second;
    observable = observable || (ch.monitored && ch.efficiency > 0.0);
  }
  if (!observable) {
    throw ConfigError("partial_monitoring: nothing observable remains");
  }
  return out;
}

}  // namespace jumpfisher
