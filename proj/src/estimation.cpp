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

#include "jumpfisher/estimation.hpp"

#include <cmath>
#include <map>
#include <ostream>

#include <json.hpp>

#include "jumpfisher/parallel.hpp"

namespace jumpfisher {

namespace {

// Map record channel indices (into the monitored label list) onto the
// active-channel indices a renewal structure exposes.
std::vector<int> active_channel_map(const RenewalStructure& s,
                                    const std::vector<std::string>& labels) {
  std::vector<int> to_active(labels.size(), -1);
  int active = 0;
  for (std::size_t k = 0; k < s.channels.size(); ++k) {
    if (!s.channels[k].active) continue;
    for (std::size_t r = 0; r < labels.size(); ++r) {
      if (labels[r] == s.channels[k].label) to_active[r] = active;
    }
    ++active;
  }
  return to_active;
}

struct ActiveRenewal {
  RenewalStructure structure;
  std::vector<Superoperator> jumps;
  std::vector<ComplexMatrix> resets;
  std::vector<int> record_to_active;
};

ActiveRenewal active_renewal(const LindbladModel& model, const RealVector& theta,
                             const std::vector<std::string>& labels) {
  RenewalVerdict verdict = check_renewal(model, theta);
  if (!verdict.renewal) {
    throw ModelModeError("renewal likelihood requested for a non-renewal model: " +
                         verdict.reason);
  }
  ActiveRenewal out{std::move(*verdict.structure), {}, {}, {}};
  for (std::size_t k = 0; k < out.structure.channels.size(); ++k) {
    if (!out.structure.channels[k].active) continue;
    out.jumps.push_back(out.structure.ops.jumps[k]);
    out.resets.push_back(out.structure.channels[k].reset_state);
  }
  out.record_to_active = active_channel_map(out.structure, labels);
  return out;
}

}  // namespace

double loglik_renewal(const MeasurementRecord& record, const LindbladModel& model,
                      const RealVector& theta_candidate, int param_index) {
  (void)param_index;
  if (record.entries.size() < 2) {
    throw ConfigError("loglik_renewal: need at least two clicks");
  }
  const ActiveRenewal ar = active_renewal(model, theta_candidate, record.labels);
  WtdEvaluator eval(ar.structure.ops.nojump, ar.jumps, ar.resets);

  double loglik = 0.0;
  for (std::size_t j = 1; j < record.entries.size(); ++j) {
    const int k = ar.record_to_active[record.entries[j].channel];
    const int q = ar.record_to_active[record.entries[j - 1].channel];
    if (k < 0 || q < 0) {
      throw ConfigError("loglik_renewal: record uses an inactive channel");
    }
    const double w = eval.density(k, q, record.entries[j].tau);
    if (w <= 0) return -std::numeric_limits<double>::infinity();
    loglik += std::log(w);
  }
  return loglik;
}

namespace {

// Replay machinery for one candidate parameter value: exact spectral
// propagators at theta and theta +- dtheta, applied at the record's own
// waiting times.
class ReplayContext {
 public:
  ReplayContext(const LindbladModel& model, const RealVector& theta,
                int param_index, double dtheta)
      : displaced_(displace(model, theta, param_index, dtheta)),
        prop_c_(displaced_.center.nojump.matrix),
        prop_p_(displaced_.plus.nojump.matrix),
        prop_m_(displaced_.minus.nojump.matrix),
        tr_row_(trace_row(displaced_.center.dim)) {}

  // Score tr xi after replaying the record from its origin. When the
  // first entry is excluded, it is consumed as the conditioning origin
  // instead: the replay starts from the reset state of that click (the
  // model must be renewal), which makes the score the exact derivative of
  // the border-dropped renewal log-likelihood.
  double score(const MeasurementRecord& record, const LindbladModel& model,
               const RealVector& theta, int param_index,
               const EstimationOptions& opt) const {
    const double dtheta = displaced_.dtheta;
    ComplexMatrix rho, xi;
    std::size_t first = 0;

    RealVector up = theta, down = theta;
    up(param_index) += dtheta;
    down(param_index) -= dtheta;
    if (!opt.include_first_entry) {
      if (record.entries.empty()) {
        throw ConfigError("mle replay: empty record cannot set the origin");
      }
      const RenewalVerdict verdict = check_renewal(model, theta);
      if (!verdict.renewal) {
        throw ModelModeError(
            "mle replay: dropping the first entry needs a renewal model");
      }
      const RenewalVerdict vp = check_renewal(model, up);
      const RenewalVerdict vm = check_renewal(model, down);
      const int k1 = record.entries.front().channel;
      const auto reset_of = [&](const RenewalVerdict& v) -> const ComplexMatrix& {
        for (const auto& ch : v.structure->channels) {
          if (ch.label == record.labels[k1]) return ch.reset_state;
        }
        throw ConfigError("mle replay: first click channel not found");
      };
      rho = reset_of(verdict);
      xi = (reset_of(vp) - reset_of(vm)) / (2.0 * dtheta);
      first = 1;
    } else if (opt.rho0) {
      rho = *opt.rho0;
      xi = ComplexMatrix::Zero(model.dim, model.dim);
    } else {
      rho = model.initial_state_at(theta);
      xi = (model.initial_state_at(up) - model.initial_state_at(down)) /
           (2.0 * dtheta);
    }

    ComplexVector rho_vec = vectorize(rho);
    ComplexVector xi_vec = vectorize(xi);
    for (std::size_t j = first; j < record.entries.size(); ++j) {
      const auto& e = record.entries[j];
      const auto& jk = displaced_.center.jumps[e.channel].matrix;
      const auto& jk_p = displaced_.plus.jumps[e.channel].matrix;
      const auto& jk_m = displaced_.minus.jumps[e.channel].matrix;

      const ComplexVector v_rho = prop_c_.apply(e.tau, rho_vec);
      const ComplexVector vdot_rho =
          (prop_p_.apply(e.tau, rho_vec) - prop_m_.apply(e.tau, rho_vec)) /
          (2.0 * dtheta);
      const ComplexVector jdot_v_rho =
          ((jk_p - jk_m) / (2.0 * dtheta)) * v_rho;

      const ComplexVector rho_next = jk * v_rho;
      const ComplexVector xi_next =
          jdot_v_rho + jk * vdot_rho + jk * prop_c_.apply(e.tau, xi_vec);
      const double denom = (tr_row_ * rho_next)(0).real();
      if (denom < 1e-300) {
        throw NumericalError("mle replay: click probability underflow");
      }
      rho_vec = rho_next / denom;
      xi_vec = xi_next / denom;
    }
    if (record.final_stretch) {
      const double s = *record.final_stretch;
      const ComplexVector v_rho = prop_c_.apply(s, rho_vec);
      const ComplexVector vdot_rho =
          (prop_p_.apply(s, rho_vec) - prop_m_.apply(s, rho_vec)) / (2.0 * dtheta);
      const ComplexVector xi_next = vdot_rho + prop_c_.apply(s, xi_vec);
      const double denom = (tr_row_ * v_rho)(0).real();
      if (denom < 1e-300) {
        throw NumericalError("mle replay: survival underflow");
      }
      rho_vec = v_rho / denom;
      xi_vec = xi_next / denom;
    }
    return devectorize(xi_vec).trace().real();
  }

 private:
  DisplacedOperators displaced_;
  SpectralPropagator prop_c_, prop_p_, prop_m_;
  Eigen::RowVectorXcd tr_row_;
};

}  // namespace

EstimationResult mle_monitoring(const MeasurementRecord& record,
                                const LindbladModel& model, const RealVector& theta,
                                int param_index, double lo, double hi,
                                const EstimationOptions& opt) {
  if (!(hi > lo)) throw ConfigError("mle_monitoring: empty search interval");
  const double tol = opt.tol > 0 ? opt.tol : 1e-6 * (hi - lo);

  EstimationResult res;
  res.lo = lo;
  res.hi = hi;

  int evals = 0;
  std::map<long long, double> cache;  // candidates quantized to tol / 10
  const double quantum = tol / 10.0;
  const auto score_at = [&](double cand) {
    const long long key = static_cast<long long>(std::llround(cand / quantum));
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (evals >= opt.max_evals) {
      throw NumericalError("mle_monitoring: evaluation budget exhausted");
    }
    ++evals;
    RealVector cand_theta = theta;
    cand_theta(param_index) = cand;
    ReplayContext ctx(model, cand_theta, param_index, opt.dtheta);
    const double s = ctx.score(record, model, cand_theta, param_index, opt);
    cache.emplace(key, s);
    return s;
  };

  const double f_lo = score_at(lo);
  const double f_hi = score_at(hi);
  const double f_mid = score_at(0.5 * (lo + hi));

  if (std::abs(f_lo) < 1e-12 && std::abs(f_hi) < 1e-12 && std::abs(f_mid) < 1e-12) {
    res.theta_hat = 0.5 * (lo + hi);
    res.flat = true;
    res.diagnostic = "flat likelihood: score vanishes over the interval";
    res.iterations = evals;
    return res;
  }

  double a = lo, b = hi;
  if (f_lo * f_hi < 0) {
    // The score changes sign: bisect it to zero.
    double fa = f_lo;
    while (b - a > tol) {
      const double mid = 0.5 * (a + b);
      const double fm = score_at(mid);
      if (fa * fm <= 0) {
        b = mid;
      } else {
        a = mid;
        fa = fm;
      }
    }
    res.theta_hat = 0.5 * (a + b);
  } else {
    // No interior sign change: descend on the squared score.
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double g1 = std::pow(score_at(x1), 2);
    double g2 = std::pow(score_at(x2), 2);
    while (b - a > tol) {
      if (g1 < g2) {
        b = x2;
        x2 = x1;
        g2 = g1;
        x1 = b - gr * (b - a);
        g1 = std::pow(score_at(x1), 2);
      } else {
        a = x1;
        x1 = x2;
        g1 = g2;
        x2 = a + gr * (b - a);
        g2 = std::pow(score_at(x2), 2);
      }
    }
    res.theta_hat = 0.5 * (a + b);
    const double g_in = std::pow(score_at(res.theta_hat), 2);
    if (std::min(f_lo * f_lo, f_hi * f_hi) <= g_in ||
        res.theta_hat - lo < 2 * tol || hi - res.theta_hat < 2 * tol) {
      res.boundary = true;
      res.theta_hat = f_lo * f_lo < f_hi * f_hi ? lo : hi;
      res.diagnostic =
          "score minimum sits on the interval border; widen the interval";
    }
  }

  res.final_abs_trace_xi = std::abs(score_at(res.theta_hat));
  res.iterations = evals;
  const RenewalVerdict verdict = check_renewal(model, theta);
  if (verdict.renewal && record.entries.size() >= 2) {
    RealVector at = theta;
    at(param_index) = res.theta_hat;
    res.loglik = loglik_renewal(record, model, at, param_index);
  }
  return res;
}

MeanWaitEstimate mean_waiting_time_estimator(
    const std::vector<MeasurementRecord>& records, const LindbladModel& model,
    const RealVector& theta, int param_index, const std::string& from_label,
    const std::string& to_label, double lo, double hi, double tol) {
  if (!(hi > lo)) throw ConfigError("mean_waiting_time_estimator: empty interval");
  if (tol <= 0) tol = 1e-9 * (hi - lo);

  MeanWaitEstimate out;
  double acc = 0.0;
  for (const auto& rec : records) {
    for (std::size_t j = 1; j < rec.entries.size(); ++j) {
      if (rec.labels[rec.entries[j - 1].channel] == from_label &&
          rec.labels[rec.entries[j].channel] == to_label) {
        acc += rec.entries[j].tau;
        ++out.pairs_used;
      }
    }
  }
  if (out.pairs_used == 0) {
    throw ConfigError("mean_waiting_time_estimator: transition " + from_label +
                      " -> " + to_label + " never observed");
  }
  out.low_count_warning = out.pairs_used == 1;
  out.empirical_mean = acc / static_cast<double>(out.pairs_used);

  const auto model_mean = [&](double cand) {
    RealVector th = theta;
    th(param_index) = cand;
    const ActiveRenewal ar = active_renewal(model, th, records.front().labels);
    int k = -1, q = -1;
    int active = 0;
    for (const auto& ch : ar.structure.channels) {
      if (!ch.active) continue;
      if (ch.label == to_label) k = active;
      if (ch.label == from_label) q = active;
      ++active;
    }
    if (k < 0 || q < 0) {
      throw ConfigError("mean_waiting_time_estimator: unknown channel pair");
    }
    WtdEvaluator eval(ar.structure.ops.nojump, ar.jumps, ar.resets);
    return eval.conditional_mean(k, q);
  };

  double f_lo = model_mean(lo) - out.empirical_mean;
  double f_hi = model_mean(hi) - out.empirical_mean;
  if (f_lo * f_hi > 0) {
    throw NumericalError(
        "mean_waiting_time_estimator: empirical mean " +
        std::to_string(out.empirical_mean) +
        " is outside the model's conditional-mean range over the interval");
  }
  double a = lo, b = hi;
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    const double fm = model_mean(mid) - out.empirical_mean;
    if (f_lo * fm <= 0) {
      b = mid;
      f_hi = fm;
    } else {
      a = mid;
      f_lo = fm;
    }
  }
  out.theta_hat = 0.5 * (a + b);
  return out;
}

EnsembleStudy run_mle_study(const std::vector<MeasurementRecord>& records,
                            const LindbladModel& model, const RealVector& theta,
                            int param_index, double lo, double hi,
                            double true_theta, double fisher_total,
                            const EstimationOptions& opt, int threads) {
  if (records.empty()) throw ConfigError("run_mle_study: no records");
  EnsembleStudy study;
  study.true_theta = true_theta;
  study.cr_bound = fisher_total > 0 ? 1.0 / fisher_total : 0.0;
  study.estimates.resize(records.size());
  study.logliks.resize(records.size());
  study.iterations.resize(records.size());
  std::vector<int> boundary(records.size(), 0);

  run_parallel(static_cast<int>(records.size()), threads, [&](int i) {
    const EstimationResult r =
        mle_monitoring(records[i], model, theta, param_index, lo, hi, opt);
    study.estimates[i] = r.theta_hat;
    study.logliks[i] = r.loglik;
    study.iterations[i] = r.iterations;
    boundary[i] = r.boundary ? 1 : 0;
  });

  for (int b : boundary) study.boundary_verdicts += b;
  double mean = 0.0;
  for (double e : study.estimates) mean += e;
  mean /= static_cast<double>(study.estimates.size());
  double var = 0.0, mse = 0.0;
  for (double e : study.estimates) {
    var += (e - mean) * (e - mean);
    mse += (e - true_theta) * (e - true_theta);
  }
  study.mean = mean;
  study.variance = study.estimates.size() > 1
                       ? var / static_cast<double>(study.estimates.size() - 1)
                       : 0.0;
  study.mse = mse / static_cast<double>(study.estimates.size());
  return study;
}

void write_study_csv(std::ostream& out, const EnsembleStudy& study) {
  out << "record_id,theta_hat,loglik,iterations\n";
  out.precision(17);
  for (std::size_t i = 0; i < study.estimates.size(); ++i) {
    out << i << ',' << study.estimates[i] << ',' << study.logliks[i] << ','
        << study.iterations[i] << "\n";
  }
}

void write_study_summary_json(std::ostream& out, const EnsembleStudy& study) {
  nlohmann::json j;
  j["mean"] = study.mean;
  j["variance"] = study.variance;
  j["mse"] = study.mse;
  j["cr_bound"] = study.cr_bound;
  j["true_theta"] = study.true_theta;
  j["records"] = study.estimates.size();
  j["boundary_verdicts"] = study.boundary_verdicts;
  out << j.dump(2) << "\n";
}

}  // namespace jumpfisher
