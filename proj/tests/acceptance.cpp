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

// End-to-end validation against closed forms and cross-route checks.
// Every criterion prints one PASS/FAIL line; the binary exits nonzero if
// any fail.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "jumpfisher/compression.hpp"
#include "jumpfisher/estimation.hpp"
#include "jumpfisher/models.hpp"
#include "jumpfisher/monitoring.hpp"
#include "jumpfisher/parallel.hpp"

using namespace jumpfisher;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "  FAILED: " << what << "\n";
    }
  }
  void note(const std::string& what) { detail << "  " << what << "\n"; }
};

double thermometry_closed_form(double omega, double Omega, double gamma,
                               double nbar) {
  const double r2 = (Omega / gamma) * (Omega / gamma);
  const double w = (omega / gamma) / (2.0 * nbar + 1.0);
  const double lorentz = 1.0 + 4.0 * w * w;
  const double nn1 = nbar * (nbar + 1.0);
  const double term1 =
      ((nbar + 1.0) * (nbar + 1.0) + nbar * nbar) / (nn1 + 0.5 * r2 / lorentz);
  const double term2 = r2 / (nn1 * lorentz + 0.5 * r2);
  return (term1 + term2) / (2.0 * nn1);
}

double stationary_activity(const LindbladModel& m) {
  const ModelOperators ops = assemble(m, m.theta);
  return ops.total_jump().apply(steady_state(ops.liouvillian)).trace().real();
}

ComplexMatrix ground_state(int dim) {
  ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
  rho(dim - 1, dim - 1) = 1.0;
  return rho;
}

// ---------------------------------------------------------------------------

void criterion_1(Check& c) {
  // Fluorescence closed form 8/Gamma^2 + 4/Omega^2 to 1e-6 relative on the
  // 3x3 grid; 12 at the unit point.
  for (double Omega : {0.5, 1.0, 2.0}) {
    for (double Gamma : {0.5, 1.0, 2.0}) {
      const LindbladModel m = resonant_fluorescence(Omega, Gamma);
      const double got = fisher_renewal(m, m.theta, 0).fisher_per_jump;
      const double expect = 8.0 / (Gamma * Gamma) + 4.0 / (Omega * Omega);
      std::ostringstream what;
      what << "Omega=" << Omega << " Gamma=" << Gamma << ": got " << got
           << ", expected " << expect;
      c.require(std::abs(got - expect) <= 1e-6 * expect, what.str());
    }
  }
  const LindbladModel unit = resonant_fluorescence(1.0, 1.0);
  const double f = fisher_renewal(unit, unit.theta, 0).fisher_per_jump;
  c.note("per-jump information at Omega=Gamma=1: " + std::to_string(f));
  c.require(std::abs(f - 12.0) <= 12e-6, "unit point should give 12");
}

void criterion_2(Check& c) {
  // Thermometer closed form to 1e-6 relative on a 3x3x3 grid at gamma=1.
  for (double omega : {0.5, 1.0, 2.0}) {
    for (double Omega : {0.5, 1.0, 2.0}) {
      for (double nbar : {0.8, 1.5, 2.5}) {
        const LindbladModel m = qubit_thermometer(omega, Omega, 1.0, nbar);
        const double got = fisher_renewal(m, m.theta, 0).fisher_per_jump;
        const double expect = thermometry_closed_form(omega, Omega, 1.0, nbar);
        std::ostringstream what;
        what << "omega=" << omega << " Omega=" << Omega << " nbar=" << nbar
             << ": got " << got << ", expected " << expect;
        c.require(std::abs(got - expect) <= 1e-6 * expect, what.str());
      }
    }
  }
  const LindbladModel ref = qubit_thermometer(1.0, 1.0, 1.0, 1.5);
  const double f = fisher_renewal(ref, ref.theta, 0).fisher_per_jump;
  c.note("reference point value: " + std::to_string(f));
  c.require(std::abs(f - 0.2988) < 1e-4, "reference point should give 0.2988");
}

void criterion_3(Check& c) {
  // Vanishing-drive limit: quadrature at Omega = 1e-3 pins the
  // (1/2)(1/nbar^2 + 1/(nbar+1)^2) value, and the Omega = 0 quadrature
  // agrees with the classical two-state chain to 1e-8.
  const double nbar = 1.5;
  const double expect =
      0.5 * (1.0 / (nbar * nbar) + 1.0 / ((nbar + 1) * (nbar + 1)));
  const LindbladModel near_zero = qubit_thermometer(1.0, 1e-3, 1.0, nbar);
  const double f_near = fisher_renewal(near_zero, near_zero.theta, 0).fisher_per_jump;
  c.note("Omega=1e-3: " + std::to_string(f_near) + " vs limit " + std::to_string(expect));
  c.require(std::abs(f_near - expect) < 1e-4, "Omega=1e-3 value off the limit");

  const LindbladModel zero = qubit_thermometer(1.0, 0.0, 1.0, nbar);
  const double f_zero = fisher_renewal(zero, zero.theta, 0).fisher_per_jump;
  const auto rates = [](double nb) {
    RealMatrix r = RealMatrix::Zero(2, 2);
    r(0, 1) = nb;        // ground -> excited at gamma nbar (gamma = 1)
    r(1, 0) = nb + 1.0;  // excited -> ground at gamma (nbar + 1)
    return r;
  };
  const double f_classical = fisher_classical_me(rates, nbar).per_jump;
  c.note("quadrature " + std::to_string(f_zero) + " vs classical chain " +
         std::to_string(f_classical));
  c.require(std::abs(f_zero - f_classical) < 1e-8,
            "quantum and classical routes disagree beyond 1e-8");
}

void criterion_4(Check& c) {
  // Monte Carlo vs analytic on the thermometer: N = 50 clicks, M = 1000
  // trajectories, fixed seed, single-threaded.
  const LindbladModel m = qubit_thermometer(1.0, 1.0, 1.0, 1.5);
  const int n_jumps = 50, M = 1000;
  GillespieFisherOptions opt;
  opt.threads = 1;
  const FisherEstimate est =
      gillespie_fisher(m, m.theta, 0, StopRule::after_jumps(n_jumps), M, 424242, opt);
  const double expect = n_jumps * fisher_renewal(m, m.theta, 0).fisher_per_jump;
  std::ostringstream what;
  what << "Monte Carlo " << est.mean.back() << " +- " << est.se.back()
       << " vs analytic " << expect;
  c.note(what.str());
  c.require(std::abs(est.mean.back() - expect) < 3.0 * est.se.back(), what.str());
}

void criterion_5(Check& c) {
  // Decoupled limit of the coupled qubits: the record is qubit-B
  // fluorescence, so the Monte Carlo information about gamma must match
  // the single-channel renewal quadrature of the reduced model.
  const double gamma = 0.4, Omega_B = 1.0;
  const LindbladModel coupled = coupled_qubits(1.0, Omega_B, 0.0, 0.0, 0.0, gamma);

  LindbladModel reduced;
  reduced.dim = 2;
  reduced.name = "decoupled-qubit-B";
  reduced.param_names = {"gamma"};
  reduced.theta = RealVector::Constant(1, gamma);
  reduced.hamiltonian_at = [Omega_B](const RealVector&) {
    return ComplexMatrix(Omega_B * pauli_x());
  };
  reduced.channels.push_back({"-",
                              [](const RealVector& th) {
                                return ComplexMatrix(std::sqrt(th(0)) * sigma_minus());
                              },
                              1.0, true});
  reduced.valid_region = [](const RealVector& th) { return th(0) > 0; };
  const double per_jump = fisher_renewal(reduced, reduced.theta, 0).fisher_per_jump;

  const int n_jumps = 40, M = 1000;
  GillespieFisherOptions opt;
  opt.rho0 = ground_state(4);  // g = 0 has no unique stationary state
  const FisherEstimate est = gillespie_fisher(
      coupled, coupled.theta, 0, StopRule::after_jumps(n_jumps), M, 777, opt);
  const double expect = n_jumps * per_jump;
  std::ostringstream what;
  what << "Monte Carlo " << est.mean.back() << " +- " << est.se.back()
       << " vs reduced-model analytic " << expect;
  c.note(what.str());
  c.require(std::abs(est.mean.back() - expect) < 3.0 * est.se.back(), what.str());
}

void criterion_6(Check& c) {
  // Asymptotically linear growth of the information for the coupled
  // qubits at the published operating point: R^2 > 0.99 over t in
  // [50, 100] at M = 500.
  const LindbladModel m = coupled_qubits(1.0, 1.0, 0.0, 0.0, 0.01, 0.4);
  GillespieFisherOptions opt;
  opt.epochs = 100;
  const FisherEstimate est = gillespie_fisher(
      m, m.theta, 0, StopRule::after_time(100.0), 500, 606, opt);

  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    if (est.grid[i] >= 50.0) {
      ts.push_back(est.grid[i]);
      ys.push_back(est.mean[i]);
    }
  }
  const auto n = static_cast<double>(ts.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sy += ys[i];
    stt += ts[i] * ts[i];
    sty += ts[i] * ys[i];
  }
  const double slope = (n * sty - st * sy) / (n * stt - st * st);
  const double intercept = (sy - slope * st) / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    ss_res += std::pow(ys[i] - (intercept + slope * ts[i]), 2);
    ss_tot += std::pow(ys[i] - sy / n, 2);
  }
  const double r2 = 1.0 - ss_res / ss_tot;
  std::ostringstream what;
  what << "R^2 = " << r2 << " (slope " << slope << " per unit time)";
  c.note(what.str());
  c.require(r2 > 0.99, what.str());
  c.require(slope > 0, "information should grow");
}

void criterion_7(Check& c) {
  // Estimator saturation on the thermometer: 500 records of 200 clicks;
  // MSE(MLE) * F in [0.75, 1.3] and no worse than the mean-waiting-time
  // summary estimator.
  const double nbar = 1.5;
  const LindbladModel m = qubit_thermometer(1.0, 1.0, 1.0, nbar);
  const int n_jumps = 200, n_records = 500;
  const SimulationTables tables = precompute_tables(m, m.theta, GridSpec{4000, 0.0});
  const ComplexMatrix rho0 = m.initial_state_at(m.theta);
  std::vector<MeasurementRecord> records(n_records);
  run_parallel(n_records, 0, [&](int i) {
    RngStream rng(1234, static_cast<std::uint64_t>(i));
    records[i] = simulate_record(tables, rho0, StopRule::after_jumps(n_jumps), rng);
  });

  const double fisher_total =
      fisher_renewal(m, m.theta, 0).fisher_per_jump * n_jumps;
  EstimationOptions opt;
  opt.tol = 1e-4;
  const EnsembleStudy mle = run_mle_study(records, m, m.theta, 0, 0.3, 5.0, nbar,
                                          fisher_total, opt);
  const double ratio = mle.mse * fisher_total;
  std::ostringstream what;
  what << "MSE(MLE) * F = " << ratio << " (MSE " << mle.mse << ", 1/F "
       << 1.0 / fisher_total << ")";
  c.note(what.str());
  c.require(ratio >= 0.75 && ratio <= 1.3, what.str());

  double mw_mse = 0.0;
  int mw_count = 0;
  for (const auto& rec : records) {
    const MeanWaitEstimate est =
        mean_waiting_time_estimator({rec}, m, m.theta, 0, "-", "+", 0.05, 20.0);
    mw_mse += (est.theta_hat - nbar) * (est.theta_hat - nbar);
    ++mw_count;
  }
  mw_mse /= mw_count;
  std::ostringstream cmp;
  cmp << "MSE(MLE) = " << mle.mse << " vs MSE(mean-wait) = " << mw_mse;
  c.note(cmp.str());
  c.require(mle.mse <= mw_mse, cmp.str());
}

void criterion_8(Check& c) {
  // Sample-mean information: 4/3 per click at Omega = Gamma = 1 to 1e-8,
  // and never above the full-record information across Gamma.
  const LindbladModel unit = resonant_fluorescence(1.0, 1.0);
  const double ft = sample_mean_fisher(unit, unit.theta, 0, 1.0).per_jump;
  c.note("F_T per click at the unit point: " + std::to_string(ft));
  c.require(std::abs(ft - 4.0 / 3.0) < 1e-8, "sample-mean value should be 4/3");

  for (double Gamma : {0.5, 1.0, 2.0}) {
    const LindbladModel m = resonant_fluorescence(1.0, Gamma);
    const double compressed = sample_mean_fisher(m, m.theta, 0, 1.0).per_jump;
    const double full = fisher_renewal(m, m.theta, 0).fisher_per_jump;
    std::ostringstream what;
    what << "Gamma=" << Gamma << ": F_T " << compressed << " vs full " << full;
    c.require(compressed <= full + 1e-9, what.str());
  }
}

void criterion_9(Check& c) {
  // Data processing on the thermometer and the coupled qubits: no
  // compression may beat the full record.
  {
    const LindbladModel m = qubit_thermometer(1.0, 1.0, 1.0, 1.5);
    const double full_per_jump = fisher_renewal(m, m.theta, 0).fisher_per_jump;

    const double channels = channels_only_fisher(m, m.theta, 0, 1).per_jump;
    c.require(channels <= full_per_jump,
              "thermometer: channels-only exceeds the full record");

    const int n_jumps = 60;
    CompressionOptions copt;
    copt.trajectories = 600;
    copt.seed = 42;
    const FisherEstimate blind =
        times_only_fisher(m, m.theta, 0, StopRule::after_jumps(n_jumps), copt);
    std::ostringstream what;
    what << "thermometer times-only " << blind.mean.back() << " +- "
         << blind.se.back() << " vs full " << full_per_jump * n_jumps;
    c.note(what.str());
    c.require(blind.mean.back() <= full_per_jump * n_jumps + 3.0 * blind.se.back(),
              what.str());

    const SampleMeanReport ft = sample_mean_fisher(m, m.theta, 0, 1.0);
    std::ostringstream smw;
    smw << "thermometer sample-mean " << ft.per_jump << " +- " << ft.per_jump_se
        << " vs full " << full_per_jump;
    c.note(smw.str());
    c.require(ft.per_jump <= full_per_jump + 3.0 * ft.per_jump_se, smw.str());

    // Partial monitoring, compared per unit time against the analytic
    // full-record rate.
    const double full_rate = full_per_jump * stationary_activity(m);
    const LindbladModel partial = partial_monitoring(m, {"-"});
    GillespieFisherOptions gopt;
    gopt.epochs = 20;
    const double tf = 40.0;
    const FisherEstimate less = gillespie_fisher(
        partial, partial.theta, 0, StopRule::after_time(tf), 600, 43, gopt);
    std::ostringstream pm;
    pm << "thermometer partial rate " << less.mean.back() / tf << " +- "
       << less.se.back() / tf << " vs full rate " << full_rate;
    c.note(pm.str());
    c.require(less.mean.back() / tf <= full_rate + 3.0 * less.se.back() / tf,
              pm.str());
  }
  {
    const LindbladModel m = coupled_qubits(1.0, 1.0, 0.0, 0.0, 0.01, 0.4);
    const int n_jumps = 40, M = 800;
    const FisherEstimate full = gillespie_fisher(
        m, m.theta, 0, StopRule::after_jumps(n_jumps), M, 52, {});

    // Single channel: the label sequence is constant.
    const ChannelsOnlyReport channels =
        channels_only_fisher(m, m.theta, 0, n_jumps, {});
    c.require(std::abs(channels.per_jump) <= 3.0 * channels.per_jump_se + 1e-9,
              "coupled qubits: constant labels should carry nothing");

    CompressionOptions copt;
    copt.trajectories = M;
    copt.seed = 52;
    const FisherEstimate blind =
        times_only_fisher(m, m.theta, 0, StopRule::after_jumps(n_jumps), copt);
    std::ostringstream what;
    what << "coupled qubits times-only " << blind.mean.back() << " vs full "
         << full.mean.back();
    c.note(what.str());
    c.require(blind.mean.back() <=
                  full.mean.back() + 3.0 * (blind.se.back() + full.se.back()),
              what.str());

    const SampleMeanReport ft = sample_mean_fisher(m, m.theta, 0, n_jumps);
    std::ostringstream sm;
    sm << "coupled qubits sample-mean " << ft.fisher_total << " vs full "
       << full.mean.back();
    c.note(sm.str());
    c.require(ft.fisher_total <= full.mean.back() +
                                     3.0 * (full.se.back() +
                                            n_jumps * ft.per_jump_se),
              sm.str());

    // Half-efficiency detection cannot beat full monitoring (per time).
    GillespieFisherOptions gopt;
    gopt.epochs = 20;
    const double tf = 100.0;
    const FisherEstimate eta_full = gillespie_fisher(
        m, m.theta, 0, StopRule::after_time(tf), 500, 53, gopt);
    const LindbladModel half = partial_monitoring(m, {"-B"}, {{"-B", 0.5}});
    const FisherEstimate eta_half = gillespie_fisher(
        half, half.theta, 0, StopRule::after_time(tf), 500, 53, gopt);
    std::ostringstream pe;
    pe << "coupled qubits half-efficiency " << eta_half.mean.back() << " vs full "
       << eta_full.mean.back();
    c.note(pe.str());
    c.require(eta_half.mean.back() <= eta_full.mean.back() +
                                          3.0 * (eta_half.se.back() + eta_full.se.back()),
              pe.str());
  }
}

void criterion_10(Check& c) {
  // Micromaser preparation-angle scan at the published parameters: the
  // information rate for g collapses when atoms enter in the ground
  // state.
  const int M = 100;
  const double horizon = 60.0;
  GillespieFisherOptions opt;
  opt.epochs = 60;
  const LindbladModel excited = micromaser(1.0, 1.0, 0.0, 0.1, 0.1, 5);
  const FisherRateReport top =
      fisher_rate(excited, excited.theta, 0, M, horizon, 99, opt);
  const LindbladModel ground = micromaser(1.0, 1.0, M_PI / 2, 0.1, 0.1, 5);
  const FisherRateReport bottom =
      fisher_rate(ground, ground.theta, 0, M, horizon, 99, opt);
  std::ostringstream what;
  what << "rate(theta=0) = " << top.asymptotic_rate << " +- " << top.asymptotic_se
       << ", rate(theta=pi/2) = " << bottom.asymptotic_rate << " +- "
       << bottom.asymptotic_se;
  c.note(what.str());
  c.require(bottom.asymptotic_rate < 0.1 * top.asymptotic_rate, what.str());
}

void criterion_11(Check& c) {
  // Moment bound below the information everywhere; equality for
  // single-exponential waiting times.
  for (double nbar : {0.8, 1.5, 2.5}) {
    for (double Omega : {0.5, 1.0, 2.0}) {
      const LindbladModel m = qubit_thermometer(1.0, Omega, 1.0, nbar);
      const double bound = fisher_bound(m, m.theta, 0);
      const double exact = fisher_renewal(m, m.theta, 0).fisher_per_jump;
      std::ostringstream what;
      what << "thermometer nbar=" << nbar << " Omega=" << Omega << ": bound "
           << bound << " vs F " << exact;
      c.require(bound <= exact + 1e-9, what.str());
    }
  }
  for (double Omega : {0.5, 1.0, 2.0}) {
    const LindbladModel m = resonant_fluorescence(Omega, 1.0);
    const double bound = fisher_bound(m, m.theta, 0);
    const double exact = fisher_renewal(m, m.theta, 0).fisher_per_jump;
    std::ostringstream what;
    what << "fluorescence Omega=" << Omega << ": bound " << bound << " vs F "
         << exact;
    c.require(bound <= exact + 1e-9, what.str());
  }
  for (double nbar : {0.8, 1.5}) {
    const LindbladModel m = qubit_thermometer(1.0, 0.0, 1.0, nbar);
    const double bound = fisher_bound(m, m.theta, 0);
    const double exact = fisher_renewal(m, m.theta, 0).fisher_per_jump;
    std::ostringstream what;
    what << "exponential case nbar=" << nbar << ": |bound - F| = "
         << std::abs(bound - exact);
    c.note(what.str());
    c.require(std::abs(bound - exact) < 1e-8, what.str());
  }
}

void criterion_12(Check& c) {
  // Monte Carlo hygiene: error scaling, vanishing mean score, and a
  // symmetric PSD information matrix.
  const LindbladModel m = qubit_thermometer(1.0, 1.0, 1.0, 1.5);
  const int n_jumps = 40;
  const FisherEstimate small =
      gillespie_fisher(m, m.theta, 0, StopRule::after_jumps(n_jumps), 500, 2718, {});
  const FisherEstimate big =
      gillespie_fisher(m, m.theta, 0, StopRule::after_jumps(n_jumps), 2000, 2718, {});
  const double ratio = small.se.back() / big.se.back();
  std::ostringstream what;
  what << "stderr ratio under 4x trajectories: " << ratio;
  c.note(what.str());
  c.require(ratio > 2.0 * 0.7 && ratio < 2.0 * 1.3, what.str());

  int score_violations = 0;
  for (std::size_t i = 0; i < big.grid.size(); ++i) {
    if (std::abs(big.score_mean[i]) > 3.0 * big.score_se[i] + 1e-12) {
      ++score_violations;
    }
  }
  std::ostringstream sc;
  sc << "mean-score 3-sigma violations: " << score_violations << " of "
     << big.grid.size();
  c.note(sc.str());
  // With 40 correlated readouts a stray 3-sigma excursion is possible;
  // systematic bias is not.
  c.require(score_violations <= 2, sc.str());

  const LindbladModel two = qubit_thermometer(1.0, 1.0, 1.0, 1.5, {"nbar", "gamma"});
  const FisherMatrixReport fm =
      fisher_matrix(two, two.theta, StopRule::after_jumps(30), 600, 3141, {});
  c.require(fm.matrix(0, 1) == fm.matrix(1, 0), "matrix should be symmetric");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(fm.matrix);
  std::ostringstream fmw;
  fmw << "information matrix eigenvalues: " << es.eigenvalues()(0) << ", "
      << es.eigenvalues()(1) << (fm.clamped ? " (clamped)" : "");
  c.note(fmw.str());
  c.require(es.eigenvalues().minCoeff() >= 0.0, fmw.str());
}

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<void(Check&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "fluorescence closed form (1e-6 relative, 3x3 grid)", 60, criterion_1},
      {2, "thermometer closed form (1e-6 relative, 3x3x3 grid)", 120, criterion_2},
      {3, "vanishing-drive limit and classical-chain agreement", 120, criterion_3},
      {4, "Monte Carlo vs analytic information (thermometer)", 300, criterion_4},
      {5, "decoupled-limit cross-validation (coupled qubits)", 300, criterion_5},
      {6, "linear information growth (coupled qubits)", 300, criterion_6},
      {7, "estimator saturation and ranking (500 records)", 900, criterion_7},
      {8, "sample-mean information value and ordering", 120, criterion_8},
      {9, "data-processing inequalities across compressions", 600, criterion_9},
      {10, "micromaser preparation-angle collapse", 1800, criterion_10},
      {11, "moment bound below the information, tight for exponentials", 120,
       criterion_11},
      {12, "Monte Carlo hygiene: scaling, score, matrix", 300, criterion_12},
  };

  int failures = 0;
  for (const auto& crit : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      crit.run(check);
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail << "  EXCEPTION: " << e.what() << "\n";
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (elapsed > crit.budget_s) {
      check.ok = false;
      check.detail << "  FAILED: runtime " << elapsed << "s exceeds budget "
                   << crit.budget_s << "s\n";
    }
    std::cout << (check.ok ? "[PASS]" : "[FAIL]") << " criterion " << crit.id
              << ": " << crit.title << " (" << elapsed << "s)\n";
    std::cout << check.detail.str();
    std::cout.flush();
    failures += check.ok ? 0 : 1;
  }
  if (failures > 0) {
    std::cout << failures << " criteria failed\n";
    return 1;
  }
  std::cout << "all 12 criteria passed\n";
  return 0;
}
