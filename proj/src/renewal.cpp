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

#include "jumpfisher/renewal.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "jumpfisher/trajectory.hpp"

#include "jumpfisher/parallel.hpp"

namespace jumpfisher {

namespace {

// 0/0 guard for squared-score integrands: densities below kDensityFloor
// with derivatives below kScoreFloor are genuine zeros of the support and
// contribute nothing; a surviving derivative there means the information
// integral diverges.
constexpr double kDensityFloor = 1e-14;
constexpr double kScoreFloor = 1e-10;

double guarded_score_square(double w, double dw, const char* what) {
  if (w < -1e-12) {
    throw NumericalError(std::string(what) +
                         ": negative density encountered; reduce dtheta or "
                         "refine the model");
  }
  if (w < kDensityFloor) {
    if (std::abs(dw) < kScoreFloor) return 0.0;
    // Oscillatory densities touch zero at isolated points where the
    // derivative vanishes at the same rate, so a small surviving dw is
    // finite-difference noise with a negligible ratio. Only a ratio that
    // actually blows up marks a derivative escaping the support.
    const double ratio = dw * dw / std::max(w, 1e-16);
    if (ratio > 1e8) {
      throw InfiniteInformationError(
          std::string(what) +
          ": vanishing density with nonvanishing derivative (diverging "
          "information)");
    }
    return ratio;
  }
  return dw * dw / w;
}

}  // namespace

RenewalVerdict check_renewal(const LindbladModel& model, const RealVector& theta) {
  RenewalVerdict verdict;
  RenewalStructure s;
  s.ops = assemble(model, theta);

  bool all_rank_one = true;
  for (std::size_t k = 0; k < s.ops.jump_ops.size(); ++k) {
    RenewalChannel ch;
    ch.label = s.ops.labels[k];
    ch.efficiency = s.ops.efficiencies[k];
    const ComplexMatrix& L = s.ops.jump_ops[k];
    if (L.norm() < 1e-12) {
      ch.active = false;
      s.channels.push_back(std::move(ch));
      continue;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(L, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() > 1 && sv(1) > 1e-10 * sv(0)) {
      verdict.renewal = false;
      verdict.reason = "channel '" + ch.label + "' is not rank one (s1 = " +
                       std::to_string(sv(0)) + ", s2 = " + std::to_string(sv(1)) + ")";
      all_rank_one = false;
      break;
    }
    ch.amplitude = sv(0);
    ch.mu = svd.matrixU().col(0);
    ch.nu = svd.matrixV().col(0);
    ch.reset_state = ch.mu * ch.mu.adjoint();
    s.channels.push_back(std::move(ch));
  }
  if (!all_rank_one) return verdict;

  bool any_active = false;
  for (const auto& ch : s.channels) any_active = any_active || ch.active;
  if (!any_active) {
    verdict.renewal = false;
    verdict.reason = "no active monitored channel";
    return verdict;
  }

  s.amplitude_path = true;
  for (const auto& ch : model.channels) {
    if (!ch.monitored || ch.efficiency != 1.0) s.amplitude_path = false;
  }
  if (s.amplitude_path) {
    ComplexMatrix acc = ComplexMatrix::Zero(model.dim, model.dim);
    for (const auto& L : s.ops.jump_ops) acc += L.adjoint() * L;
    s.h_eff = s.ops.hamiltonian - Complex(0.0, 0.5) * acc;
  }
  verdict.renewal = true;
  verdict.structure = std::move(s);
  return verdict;
}

WtdEvaluator::WtdEvaluator(const Superoperator& nojump,
                           const std::vector<Superoperator>& jumps,
                           const std::vector<ComplexMatrix>& initial_states)
    : prop_(nojump.matrix), nojump_lu_(nojump.matrix) {
  const int d = nojump.dim;
  trace_row_ = trace_row(d);
  slowest_decay_ = prop_.slowest_decay_rate();
  if (slowest_decay_ < 1e-10) {
    throw DarkSubspaceError(
        "waiting times are not normalizable: the no-click generator has a "
        "non-decaying mode (rate " + std::to_string(slowest_decay_) + ")");
  }
  spectral_ = prop_.diagonalizable();

  for (const auto& j : jumps) jump_mats_.push_back(j.matrix);
  for (const auto& sigma : initial_states) sigma_vecs_.push_back(vectorize(sigma));

  if (spectral_) {
    for (const auto& j : jumps) {
      rows_.push_back(trace_row_ * j.matrix * prop_.eigenvectors());
    }
    survival_row_ = trace_row_ * prop_.eigenvectors();
    for (const auto& v : sigma_vecs_) cols_.push_back(prop_.eigenvectors_inv() * v);
  } else {
    for (const auto& j : jumps) rows_.push_back(trace_row_ * j.matrix);
    survival_row_ = trace_row_;
    cols_ = sigma_vecs_;
  }
}

double WtdEvaluator::density(int k, int q, double tau) const {
  if (tau < 0) throw std::invalid_argument("wtd: negative waiting time");
  if (spectral_) {
    Complex acc = 0.0;
    const auto& row = rows_[k];
    const auto& col = cols_[q];
    const auto& ev = prop_.eigenvalues();
    for (Eigen::Index j = 0; j < ev.size(); ++j) {
      acc += row(j) * std::exp(ev(j) * tau) * col(j);
    }
    return acc.real();
  }
  const ComplexVector evolved = prop_.apply(tau, cols_[q]);
  return (rows_[k] * evolved)(0).real();
}

double WtdEvaluator::survival(int q, double tau) const {
  if (spectral_) {
    Complex acc = 0.0;
    const auto& col = cols_[q];
    const auto& ev = prop_.eigenvalues();
    for (Eigen::Index j = 0; j < ev.size(); ++j) {
      acc += survival_row_(j) * std::exp(ev(j) * tau) * col(j);
    }
    return acc.real();
  }
  return (survival_row_ * prop_.apply(tau, cols_[q]))(0).real();
}

ComplexVector WtdEvaluator::resolvent_apply(const ComplexVector& v) const {
  if (!nojump_lu_.isInvertible()) {
    throw DarkSubspaceError(
        "the no-click generator is singular; the inverse needed for "
        "time-integrated statistics does not exist");
  }
  return nojump_lu_.solve(v);
}

double WtdEvaluator::transition_prob(int k, int q) const {
  const ComplexVector x = resolvent_apply(sigma_vecs_[q]);
  return -(trace_row_ * (jump_mats_[k] * x))(0).real();
}

double WtdEvaluator::conditional_mean(int k, int q) const {
  const double p = transition_prob(k, q);
  if (p < kDensityFloor) {
    throw NumericalError("conditional_mean: transition has vanishing probability");
  }
  const ComplexVector x1 = resolvent_apply(sigma_vecs_[q]);
  const ComplexVector x2 = resolvent_apply(x1);
  return (trace_row_ * (jump_mats_[k] * x2))(0).real() / p;
}

double WtdEvaluator::conditional_second_moment(int k, int q) const {
  const double p = transition_prob(k, q);
  if (p < kDensityFloor) {
    throw NumericalError("conditional_second_moment: transition has vanishing probability");
  }
  const ComplexVector x1 = resolvent_apply(sigma_vecs_[q]);
  const ComplexVector x2 = resolvent_apply(x1);
  const ComplexVector x3 = resolvent_apply(x2);
  return -2.0 * (trace_row_ * (jump_mats_[k] * x3))(0).real() / p;
}

double WtdEvaluator::slowest_decay() const { return slowest_decay_; }

namespace {

// Active-channel view of a renewal structure: click superoperators and
// reset states of the channels that can actually fire.
struct ActiveView {
  std::vector<int> index;  // into ops.jumps / structure.channels
  std::vector<std::string> labels;
  std::vector<Superoperator> jumps;
  std::vector<ComplexMatrix> resets;
};

ActiveView active_view(const RenewalStructure& s) {
  ActiveView v;
  for (std::size_t k = 0; k < s.channels.size(); ++k) {
    if (!s.channels[k].active) continue;
    v.index.push_back(static_cast<int>(k));
    v.labels.push_back(s.channels[k].label);
    v.jumps.push_back(s.ops.jumps[k]);
    v.resets.push_back(s.channels[k].reset_state);
  }
  return v;
}

RealVector stationary_weights(const RenewalStructure& s, const ActiveView& v) {
  const ComplexMatrix rho_ss = steady_state(s.ops.liouvillian);
  RealVector f(static_cast<Eigen::Index>(v.jumps.size()));
  for (std::size_t k = 0; k < v.jumps.size(); ++k) {
    f(static_cast<Eigen::Index>(k)) = v.jumps[k].apply(rho_ss).trace().real();
  }
  const double total = f.sum();
  if (total <= 0) throw NumericalError("stationary click activity vanishes");
  return f / total;
}

// Waiting-time evaluators at theta and at the four displaced points
// theta +- h, theta +- h/2. Derivatives are Richardson-extrapolated
// central differences, (4 D_{h/2} - D_h) / 3: plain differences at the
// default step could not hold the closed-form agreement to 1e-6 in
// strongly oscillatory regimes, and the extrapolation stays within the
// finite-difference design at fourth order.
class DisplacedEvaluators {
 public:
  DisplacedEvaluators(const LindbladModel& model, const RealVector& theta,
                      int param_index, double dtheta) {
    if (dtheta == 0.0) dtheta = default_displacement(theta, param_index);
    h_ = dtheta;
    const double shifts[5] = {0.0, dtheta, -dtheta, 0.5 * dtheta, -0.5 * dtheta};
    for (int i = 0; i < 5; ++i) {
      RealVector th = theta;
      th(param_index) += shifts[i];
      if (!model.theta_valid(th)) {
        throw ConfigError("fisher_renewal: theta +- dtheta leaves the valid region");
      }
      RenewalVerdict v = check_renewal(model, th);
      if (!v.renewal) {
        throw ModelModeError(i == 0
                                 ? "model is not renewal at theta: " + v.reason
                                 : "model loses the renewal property under displacement");
      }
      structures_[i] = std::move(*v.structure);
      views_[i] = active_view(structures_[i]);
      if (views_[i].index != views_[0].index) {
        throw ModelModeError(
            "fisher_renewal: active channel set changes under displacement");
      }
      evals_[i].emplace(structures_[i].ops.nojump, views_[i].jumps,
                        views_[i].resets);
    }
  }

  const RenewalStructure& center_structure() const { return structures_[0]; }
  const ActiveView& view() const { return views_[0]; }
  const WtdEvaluator& center() const { return *evals_[0]; }
  double step() const { return h_; }
  int n_channels() const { return center().n_channels(); }

  double density(int k, int q, double tau) const {
    return evals_[0]->density(k, q, tau);
  }
  double density_derivative(int k, int q, double tau) const {
    return richardson([&](int i) { return evals_[i]->density(k, q, tau); });
  }
  double transition(int k, int q) const {
    return evals_[0]->transition_prob(k, q);
  }
  double transition_derivative(int k, int q) const {
    return richardson([&](int i) { return evals_[i]->transition_prob(k, q); });
  }
  // Conditional density W(tau | k, q) = W(tau, k | q) / p(k | q).
  double conditional_density(int k, int q, double tau) const {
    return evals_[0]->density(k, q, tau) / evals_[0]->transition_prob(k, q);
  }
  double conditional_density_derivative(int k, int q, double tau) const {
    return richardson([&](int i) {
      return evals_[i]->density(k, q, tau) / evals_[i]->transition_prob(k, q);
    });
  }
  double conditional_mean_derivative(int k, int q) const {
    return richardson([&](int i) { return evals_[i]->conditional_mean(k, q); });
  }

 private:
  template <typename F>
  double richardson(F&& value_at) const {
    const double coarse = (value_at(1) - value_at(2)) / (2.0 * h_);
    const double fine = (value_at(3) - value_at(4)) / h_;
    return (4.0 * fine - coarse) / 3.0;
  }

  RenewalStructure structures_[5];
  ActiveView views_[5];
  std::optional<WtdEvaluator> evals_[5];
  double h_ = 0.0;
};

// The click-label chain term: sum over pairs of p(k|q) p_q (d log p)^2.
double channel_information(const DisplacedEvaluators& ev,
                           const RealVector& p_station) {
  double total = 0.0;
  for (int q = 0; q < ev.n_channels(); ++q) {
    if (p_station(q) < 1e-15) continue;
    for (int k = 0; k < ev.n_channels(); ++k) {
      total += p_station(q) * guarded_score_square(ev.transition(k, q),
                                                   ev.transition_derivative(k, q),
                                                   "channel chain");
    }
  }
  return total;
}

}  // namespace

ChannelChain channel_chain(const RenewalStructure& s, double check_tol) {
  const ActiveView v = active_view(s);
  WtdEvaluator eval(s.ops.nojump, v.jumps, v.resets);
  const int n = static_cast<int>(v.jumps.size());

  ChannelChain chain;
  chain.labels = v.labels;
  chain.transition.resize(n, n);
  for (int q = 0; q < n; ++q) {
    for (int k = 0; k < n; ++k) {
      chain.transition(k, q) = eval.transition_prob(k, q);
    }
    const double colsum = chain.transition.col(q).sum();
    if (std::abs(colsum - 1.0) > 1e-8) {
      throw NumericalError("channel_chain: transition column " + std::to_string(q) +
                           " sums to " + std::to_string(colsum) +
                           "; the process is not persistent");
    }
  }

  const ComplexMatrix rho_ss = steady_state(s.ops.liouvillian);
  chain.activities.resize(n);
  for (int k = 0; k < n; ++k) {
    chain.activities(k) = v.jumps[k].apply(rho_ss).trace().real();
  }
  chain.stationary = chain.activities / chain.activities.sum();

  // Independent route: the Perron vector of the transition matrix.
  Eigen::EigenSolver<RealMatrix> es(chain.transition);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i) - Complex(1, 0)) <
        std::abs(es.eigenvalues()(best) - Complex(1, 0))) {
      best = i;
    }
  }
  RealVector perron = es.eigenvectors().col(best).real();
  if (perron.sum() < 0) perron = -perron;
  chain.stationary_perron = perron / perron.sum();

  chain.route_mismatch =
      (chain.stationary - chain.stationary_perron).cwiseAbs().maxCoeff();
  if (chain.route_mismatch > check_tol) {
    throw NumericalError(
        "channel_chain: the activity route and the Perron route disagree by " +
        std::to_string(chain.route_mismatch));
  }
  return chain;
}

RenewalFisherReport fisher_renewal(const LindbladModel& model,
                                   const RealVector& theta, int param_index,
                                   const RenewalFisherOptions& opt) {
  const DisplacedEvaluators ev(model, theta, param_index, opt.dtheta);
  const ActiveView& vc = ev.view();
  const RealVector p_station = stationary_weights(ev.center_structure(), vc);

  RenewalFisherReport report;
  report.dtheta = ev.step();
  report.horizon = opt.horizon_factor / ev.center().slowest_decay();
  const int n = ev.n_channels();

  for (int q = 0; q < n; ++q) {
    if (p_station(q) < 1e-15) continue;
    for (int k = 0; k < n; ++k) {
      // Joint information of (waiting time, channel).
      const auto joint = [&](double tau) {
        return guarded_score_square(ev.density(k, q, tau),
                                    ev.density_derivative(k, q, tau),
                                    "waiting time density");
      };
      QuadratureResult rj;
      try {
        rj = integrate_adaptive(joint, 0.0, report.horizon, opt.quadrature);
      } catch (const InfiniteInformationError&) {
        throw;
      } catch (const NumericalError& e) {
        throw NumericalError("fisher_renewal: quadrature failed on pair (" +
                             vc.labels[k] + "|" + vc.labels[q] + "): " + e.what());
      }
      report.fisher_per_jump += p_station(q) * rj.value;
      report.quadrature_error += p_station(q) * rj.error_estimate;
      report.pairs.push_back({k, q, p_station(q), rj.value, rj.error_estimate});

      // Times-given-channels: score of the normalized conditional density.
      const double pc = ev.transition(k, q);
      if (pc >= kDensityFloor) {
        const auto conditional = [&](double tau) {
          return guarded_score_square(ev.conditional_density(k, q, tau),
                                      ev.conditional_density_derivative(k, q, tau),
                                      "conditional waiting time density");
        };
        const QuadratureResult rt =
            integrate_adaptive(conditional, 0.0, report.horizon, opt.quadrature);
        report.times_given_channels_per_jump += pc * p_station(q) * rt.value;
        report.quadrature_error += pc * p_station(q) * rt.error_estimate;
      }
    }
  }

  report.channels_per_jump = channel_information(ev, p_station);
  report.decomposition_residual =
      report.fisher_per_jump - report.channels_per_jump -
      report.times_given_channels_per_jump;
  return report;
}

double fisher_bound(const LindbladModel& model, const RealVector& theta,
                    int param_index, const RenewalFisherOptions& opt) {
  const DisplacedEvaluators ev(model, theta, param_index, opt.dtheta);
  const ActiveView& vc = ev.view();
  const RealVector p_station = stationary_weights(ev.center_structure(), vc);
  const int n = ev.n_channels();

  double bound = channel_information(ev, p_station);
  for (int q = 0; q < n; ++q) {
    if (p_station(q) < 1e-15) continue;
    for (int k = 0; k < n; ++k) {
      const double pc = ev.transition(k, q);
      if (pc < 1e-12) continue;
      const double mean = ev.center().conditional_mean(k, q);
      const double second = ev.center().conditional_second_moment(k, q);
      const double var = second - mean * mean;
      if (var < 1e-14) {
        throw NumericalError("fisher_bound: vanishing conditional variance on pair (" +
                             vc.labels[k] + "|" + vc.labels[q] + ")");
      }
      const double dmean = ev.conditional_mean_derivative(k, q);
      bound += dmean * dmean / var * pc * p_station(q);
    }
  }
  return bound;
}

double channels_only_fisher_renewal(const LindbladModel& model,
                                    const RealVector& theta, int param_index,
                                    double dtheta) {
  const DisplacedEvaluators ev(model, theta, param_index, dtheta);
  const RealVector p_station = stationary_weights(ev.center_structure(), ev.view());
  return channel_information(ev, p_station);
}

ClassicalFisherReport fisher_classical_me(
    const std::function<RealMatrix(double)>& rates, double theta, double dtheta) {
  if (dtheta == 0.0) dtheta = 1e-4 * std::max(1.0, std::abs(theta));
  const RealMatrix r = rates(theta);
  const int n = static_cast<int>(r.rows());
  if (r.cols() != n) throw ConfigError("fisher_classical_me: rate matrix must be square");
  for (int i = 0; i < n; ++i) {
    if (std::abs(r(i, i)) > 1e-14) {
      throw ConfigError("fisher_classical_me: rate matrix diagonal must be zero");
    }
    for (int j = 0; j < n; ++j) {
      if (r(j, i) < -1e-12) {
        throw ConfigError("fisher_classical_me: negative rate");
      }
    }
  }
  const RealVector exit_rates = r.colwise().sum();

  RealMatrix generator = r;
  generator.diagonal() -= exit_rates;
  Eigen::EigenSolver<RealMatrix> es(generator);
  Eigen::Index best = 0;
  int near_null = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (std::abs(es.eigenvalues()(i)) < std::abs(es.eigenvalues()(best))) best = i;
    if (std::abs(es.eigenvalues()(i)) < 1e-9) ++near_null;
  }
  if (near_null != 1) {
    throw NumericalError("fisher_classical_me: chain is not ergodic (" +
                         std::to_string(near_null) + " null modes)");
  }
  RealVector p_ss = es.eigenvectors().col(best).real();
  if (p_ss.sum() < 0) p_ss = -p_ss;
  p_ss /= p_ss.sum();

  const RealMatrix dr = (rates(theta + dtheta) - rates(theta - dtheta)) / (2.0 * dtheta);
  const RealVector d_exit = dr.colwise().sum();

  ClassicalFisherReport rep;
  rep.activity = exit_rates.dot(p_ss);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      rep.per_jump += p_ss(i) * guarded_score_square(r(j, i), dr(j, i), "classical rate");
    }
    rep.times_given_channels_per_jump +=
        p_ss(i) * guarded_score_square(exit_rates(i), d_exit(i), "classical exit rate");
  }
  rep.per_jump /= rep.activity;
  rep.times_given_channels_per_jump /= rep.activity;
  rep.channels_per_jump = rep.per_jump - rep.times_given_channels_per_jump;
  return rep;
}

namespace {

// Stationary post-click average state J rho_ss / tr(J rho_ss): waiting
// times drawn from it have the stationary marginal law, and because the
// per-state moments are linear in the state, the stationary moments are
// exact resolvent moments evaluated there.
ComplexMatrix stationary_post_click_state(const ModelOperators& ops) {
  const ComplexMatrix rho_ss = steady_state(ops.liouvillian);
  ComplexMatrix after = ops.total_jump().apply(rho_ss);
  const double norm = after.trace().real();
  if (norm <= 0) throw NumericalError("sample_mean_fisher: no stationary click activity");
  return after / norm;
}

double marginal_mean(const ModelOperators& ops) {
  WtdEvaluator eval(ops.nojump, {ops.total_jump()},
                    {stationary_post_click_state(ops)});
  return eval.conditional_mean(0, 0);
}

double marginal_second_moment(const ModelOperators& ops) {
  WtdEvaluator eval(ops.nojump, {ops.total_jump()},
                    {stationary_post_click_state(ops)});
  return eval.conditional_second_moment(0, 0);
}

}  // namespace

SampleMeanReport sample_mean_fisher(const LindbladModel& model,
                                    const RealVector& theta, int param_index,
                                    double n_jumps, const SampleMeanOptions& opt) {
  double dtheta = opt.dtheta;
  if (dtheta == 0.0) dtheta = default_displacement(theta, param_index);

  const ModelOperators ops = assemble(model, theta);
  SampleMeanReport rep;
  rep.mean = marginal_mean(ops);
  rep.variance = marginal_second_moment(ops) - rep.mean * rep.mean;
  if (rep.variance <= 0) {
    throw NumericalError("sample_mean_fisher: nonpositive waiting-time variance");
  }

  // d mu / d theta by Richardson-extrapolated central differences; the
  // resolvent moments are smooth, and the fourth-order formula keeps the
  // step error well below the quantities compared downstream.
  const auto mean_at = [&](double shift) {
    RealVector th = theta;
    th(param_index) += shift;
    if (!model.theta_valid(th)) {
      throw ConfigError("sample_mean_fisher: displaced theta leaves the valid region");
    }
    return marginal_mean(assemble(model, th));
  };
  const double coarse = (mean_at(dtheta) - mean_at(-dtheta)) / (2.0 * dtheta);
  const double fine = (mean_at(0.5 * dtheta) - mean_at(-0.5 * dtheta)) / dtheta;
  const double dmean = (4.0 * fine - coarse) / 3.0;

  // Renewal with a single active channel: waiting times are i.i.d.
  const RenewalVerdict verdict = check_renewal(model, theta);
  int active = 0;
  if (verdict.renewal) {
    for (const auto& ch : verdict.structure->channels) active += ch.active ? 1 : 0;
  }
  rep.renewal_route = verdict.renewal && active == 1;

  if (!rep.renewal_route) {
    // Correlated waiting times: estimate the covariance series from
    // records started in the stationary post-click state.
    SimulationTables tables = precompute_tables(
        model, theta, GridSpec{opt.grid_points, 0.0}, -1);
    const ComplexMatrix rho0 = stationary_post_click_state(ops);
    std::vector<std::vector<double>> taus(opt.trajectories);
    run_parallel(opt.trajectories, opt.threads, [&](int m) {
      RngStream rng(opt.seed, static_cast<std::uint64_t>(m));
      const MeasurementRecord rec = simulate_record(
          tables, rho0, StopRule::after_jumps(opt.jumps_per_trajectory), rng);
      taus[m].reserve(rec.entries.size());
      for (const auto& e : rec.entries) taus[m].push_back(e.tau);
    });
    int below_streak = 0;
    for (int lag = 1; lag <= opt.max_lag; ++lag) {
      double cov = 0.0;
      std::size_t count = 0;
      for (const auto& t : taus) {
        for (std::size_t i = 0; i + lag < t.size(); ++i) {
          cov += (t[i] - rep.mean) * (t[i + lag] - rep.mean);
          ++count;
        }
      }
      cov /= static_cast<double>(count);
      rep.covariance_sum += cov;
      rep.lags_used = lag;
      below_streak = std::abs(cov) < opt.cov_rel_threshold * rep.variance
                         ? below_streak + 1
                         : 0;
      if (below_streak >= opt.consecutive_below) break;
    }
    if (below_streak < opt.consecutive_below) {
      throw NumericalError(
          "sample_mean_fisher: covariance series did not settle within " +
          std::to_string(opt.max_lag) + " lags");
    }

    // Spread of the truncated covariance sum across trajectories, for an
    // honest error bar on the nearly-sufficient cases.
    std::vector<double> per_traj(taus.size(), 0.0);
    for (std::size_t m = 0; m < taus.size(); ++m) {
      const auto& t = taus[m];
      for (int lag = 1; lag <= rep.lags_used; ++lag) {
        double cov = 0.0;
        for (std::size_t i = 0; i + lag < t.size(); ++i) {
          cov += (t[i] - rep.mean) * (t[i + lag] - rep.mean);
        }
        per_traj[m] += cov / static_cast<double>(t.size() - lag);
      }
    }
    double acc = 0.0;
    for (double v : per_traj) acc += v;
    const double cov_mean = acc / per_traj.size();
    double var_acc = 0.0;
    for (double v : per_traj) var_acc += (v - cov_mean) * (v - cov_mean);
    rep.covariance_sum_se =
        std::sqrt(var_acc / (per_traj.size() * (per_traj.size() - 1.0)));
  }

  const double denom = rep.variance + 2.0 * rep.covariance_sum;
  rep.per_jump = dmean * dmean / denom;
  rep.per_jump_se = rep.per_jump * 2.0 * rep.covariance_sum_se / denom;
  rep.fisher_total = rep.per_jump * n_jumps;
  return rep;
}

}  // namespace jumpfisher
