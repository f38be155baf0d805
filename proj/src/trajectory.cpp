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

#include "jumpfisher/trajectory.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "jumpfisher/renewal.hpp"

namespace jumpfisher {

int SimulationTables::snap_index(double tau) const {
  int idx = static_cast<int>(std::lround(tau / dt));
  idx = std::max(1, std::min(idx, grid.points - 1));
  return idx;
}

namespace {

ComplexMatrix stationary_post_click(const ModelOperators& ops) {
  const ComplexMatrix rho_ss = steady_state(ops.liouvillian);
  ComplexMatrix after = ops.total_jump().apply(rho_ss);
  const double norm = after.trace().real();
  if (norm <= 0) {
    throw NumericalError("precompute_tables: no stationary click activity");
  }
  return after / norm;
}

void fill_propagators(const Superoperator& generator, const GridSpec& grid,
                      double dt, std::vector<ComplexMatrix>& out) {
  SpectralPropagator prop(generator.matrix);
  out.resize(grid.points);
  for (int a = 0; a < grid.points; ++a) out[a] = prop.at(a * dt);
}

// Slowest decay rate among the modes that decay at all. Dark modes
// (stationary under the no-click flow) are excluded: they set no time
// scale for the waiting times that do occur, and models that can decay
// into them simply stop clicking.
double slowest_active_decay(const ComplexMatrix& nojump) {
  Eigen::ComplexEigenSolver<ComplexMatrix> es(nojump);
  double slowest = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double rate = -es.eigenvalues()(i).real();
    if (rate > 1e-10) slowest = std::min(slowest, rate);
  }
  if (!std::isfinite(slowest)) {
    throw DarkSubspaceError(
        "precompute_tables: no decaying mode; monitored clicks never occur");
  }
  return slowest;
}

}  // namespace

namespace {

void merge_channels(ModelOperators& ops) {
  Superoperator total = ops.total_jump();
  ops.jumps = {std::move(total)};
  ops.labels = {"(any)"};
  ops.jump_ops.clear();
  ops.efficiencies = {1.0};
}

}  // namespace

SimulationTables precompute_tables(const LindbladModel& model,
                                   const RealVector& theta, const GridSpec& grid,
                                   int param_index, double dtheta,
                                   bool merge_monitored_channels) {
  SimulationTables t;
  t.param_index = param_index;

  ModelOperators center;
  std::optional<DisplacedOperators> displaced;
  if (param_index >= 0) {
    displaced = displace(model, theta, param_index, dtheta);
    center = displaced->center;
    t.dtheta = displaced->dtheta;
  } else {
    center = assemble(model, theta);
  }
  if (merge_monitored_channels) {
    merge_channels(center);
    if (displaced) {
      merge_channels(displaced->center);
      merge_channels(displaced->plus);
      merge_channels(displaced->minus);
    }
  }
  t.dim = center.dim;
  t.labels = center.labels;
  if (t.labels.empty()) {
    throw ConfigError("precompute_tables: model has no monitored channel");
  }

  t.grid = grid;
  if (t.grid.points < 8) throw ConfigError("precompute_tables: grid too coarse");
  SpectralPropagator nojump_prop(center.nojump.matrix);
  const double rate = slowest_active_decay(center.nojump.matrix);
  if (t.grid.t_max <= 0) t.grid.t_max = 20.0 / rate;

  // Tail check from the stationary post-click state, when the model has
  // one. Models that can fall dark have no such state; for them the
  // sampler's beyond-grid error is the only guard.
  std::optional<ComplexVector> after_vec;
  try {
    after_vec = vectorize(stationary_post_click(center));
  } catch (const NumericalError&) {
  }
  const Eigen::RowVectorXcd tr_row = trace_row(t.dim);
  if (after_vec) {
    for (int attempt = 0;; ++attempt) {
      const double tail =
          (tr_row * nojump_prop.apply(t.grid.t_max, *after_vec))(0).real();
      if (tail < 1e-8) break;
      if (attempt >= 1) {
        throw NumericalError(
            "precompute_tables: click-free survival " + std::to_string(tail) +
            " at t_max = " + std::to_string(t.grid.t_max) +
            " after one extension; the grid cannot cover the waiting times");
      }
      t.grid.t_max *= 2.0;
    }
  }
  t.dt = t.grid.t_max / (t.grid.points - 1);

  t.props.resize(t.grid.points);
  t.survival_rows.resize(t.grid.points);
  for (int a = 0; a < t.grid.points; ++a) {
    t.props[a] = nojump_prop.at(a * t.dt);
    t.survival_rows[a] = tr_row * t.props[a];
  }
  for (const auto& j : center.jumps) {
    t.jumps.push_back(j.matrix);
    t.weight_rows.push_back(tr_row * j.matrix);
  }

  if (displaced) {
    std::vector<ComplexMatrix> plus, minus;
    fill_propagators(displaced->plus.nojump, t.grid, t.dt, plus);
    fill_propagators(displaced->minus.nojump, t.grid, t.dt, minus);
    t.props_dot.resize(t.grid.points);
    for (int a = 0; a < t.grid.points; ++a) {
      t.props_dot[a] = (plus[a] - minus[a]) / (2.0 * t.dtheta);
    }
    const int nk = static_cast<int>(center.jumps.size());
    t.jumps_dot.resize(nk);
    t.delta.resize(nk);
    for (int k = 0; k < nk; ++k) {
      t.jumps_dot[k] = displaced->jump_derivative(k).matrix;
      t.delta[k].resize(t.grid.points);
      for (int a = 0; a < t.grid.points; ++a) {
        t.delta[k][a] = t.jumps_dot[k] * t.props[a] + t.jumps[k] * t.props_dot[a];
      }
    }
  }

  // State-vector fast path: all channels monitored at unit efficiency and
  // rank one, so the no-click flow is generated by an effective
  // non-Hermitian Hamiltonian and clicks keep pure states pure. (Merged
  // click blocks are not of that form.)
  const RenewalVerdict verdict = check_renewal(model, theta);
  t.pure_available = !merge_monitored_channels && verdict.renewal &&
                     verdict.structure->amplitude_path;
  if (t.pure_available) {
    t.h_eff = verdict.structure->h_eff;
    SpectralPropagator pure_prop(Complex(0.0, -1.0) * t.h_eff);
    t.pure_props.resize(t.grid.points);
    for (int a = 0; a < t.grid.points; ++a) t.pure_props[a] = pure_prop.at(a * t.dt);
    t.jump_ops = center.jump_ops;
    for (const auto& L : center.jump_ops) t.jump_gram.push_back(L.adjoint() * L);
    if (displaced) {
      RenewalVerdict vp = check_renewal(model, displaced->plus.theta);
      RenewalVerdict vm = check_renewal(model, displaced->minus.theta);
      t.pure_available = vp.renewal && vp.structure->amplitude_path &&
                         vm.renewal && vm.structure->amplitude_path;
      if (t.pure_available) {
        SpectralPropagator pp(Complex(0.0, -1.0) * vp.structure->h_eff);
        SpectralPropagator pm(Complex(0.0, -1.0) * vm.structure->h_eff);
        t.pure_props_dot.resize(t.grid.points);
        for (int a = 0; a < t.grid.points; ++a) {
          t.pure_props_dot[a] =
              (pp.at(a * t.dt) - pm.at(a * t.dt)) / (2.0 * t.dtheta);
        }
        const int nk = static_cast<int>(center.jump_ops.size());
        t.jump_ops_dot.resize(nk);
        t.pure_delta.resize(nk);
        for (int k = 0; k < nk; ++k) {
          t.jump_ops_dot[k] = (vp.structure->ops.jump_ops[k] -
                               vm.structure->ops.jump_ops[k]) /
                              (2.0 * t.dtheta);
          t.pure_delta[k].resize(t.grid.points);
          for (int a = 0; a < t.grid.points; ++a) {
            t.pure_delta[k][a] = t.jump_ops_dot[k] * t.pure_props[a] +
                                 t.jump_ops[k] * t.pure_props_dot[a];
          }
        }
      }
    }
  }
  return t;
}

namespace {

// Inverse transform on a tabulated decreasing survival: locate S_a >= u >
// S_{a+1} by bisection, place the draw by linear interpolation in S, then
// snap to the nearest grid point (never index 0: waiting times are
// positive).
template <typename SurvivalFn>
int invert_survival(const SimulationTables& tables, SurvivalFn&& survival,
                    RngStream& rng) {
  const double u = rng.uniform();
  const int last = tables.grid.points - 1;
  const double s_end = survival(last);
  if (u < s_end) {
    throw NumericalError(
        "sample_waiting_time: draw beyond the grid (u = " + std::to_string(u) +
        ", survival at t_max = " + std::to_string(s_end) +
        "); rebuild the tables with a longer horizon");
  }
  int lo = 0, hi = last;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (survival(mid) >= u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double s_lo = survival(lo);
  const double s_hi = survival(hi);
  double frac = 0.5;
  if (s_lo - s_hi > 1e-300) frac = (s_lo - u) / (s_lo - s_hi);
  const int idx = (frac < 0.5) ? lo : hi;
  return std::max(1, idx);
}

}  // namespace

int sample_waiting_time_index(const SimulationTables& tables,
                              const ComplexVector& rho_vec, RngStream& rng) {
  return invert_survival(
      tables,
      [&](int a) { return (tables.survival_rows[a] * rho_vec)(0).real(); }, rng);
}

int sample_waiting_time_index_pure(const SimulationTables& tables,
                                   const ComplexVector& psi, RngStream& rng) {
  return invert_survival(
      tables, [&](int a) { return (tables.pure_props[a] * psi).squaredNorm(); },
      rng);
}

namespace {

template <typename WeightFn>
int categorical_draw(int n, WeightFn&& weight, RngStream& rng) {
  double total = 0.0;
  for (int k = 0; k < n; ++k) total += std::max(0.0, weight(k));
  if (total < 1e-14) {
    throw NumericalError("sample_channel: all click weights numerically vanish");
  }
  const double draw = rng.uniform() * total;
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    acc += std::max(0.0, weight(k));
    if (draw <= acc) return k;
  }
  return n - 1;
}

}  // namespace

int sample_channel(const SimulationTables& tables, const ComplexVector& rho_vec,
                   RngStream& rng) {
  return categorical_draw(
      tables.n_channels(),
      [&](int k) { return (tables.weight_rows[k] * rho_vec)(0).real(); }, rng);
}

int sample_channel_pure(const SimulationTables& tables, const ComplexVector& psi,
                        RngStream& rng) {
  return categorical_draw(
      static_cast<int>(tables.jump_gram.size()),
      [&](int k) { return (psi.adjoint() * tables.jump_gram[k] * psi)(0).real(); },
      rng);
}

MeasurementRecord simulate_record(const SimulationTables& tables,
                                  const ComplexMatrix& rho0, const StopRule& stop,
                                  RngStream& rng,
                                  std::vector<ComplexMatrix>* state_log) {
  MeasurementRecord rec;
  rec.seed = rng.seed();
  rec.trajectory = rng.stream();
  rec.labels = tables.labels;

  const bool pure = tables.pure_available &&
                    std::abs((rho0 * rho0).trace().real() - 1.0) < 1e-10;
  double t_now = 0.0;

  if (pure) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(rho0));
    ComplexVector psi = es.eigenvectors().col(es.eigenvalues().size() - 1);
    for (;;) {
      if (stop.kind == StopRule::Kind::Jumps &&
          rec.entries.size() >= static_cast<std::size_t>(stop.value)) {
        break;
      }
      const int idx = sample_waiting_time_index_pure(tables, psi, rng);
      const double tau = tables.grid_time(idx);
      if (stop.kind == StopRule::Kind::Time && t_now + tau > stop.value) {
        rec.final_stretch = stop.value - t_now;
        break;
      }
      ComplexVector drifted = tables.pure_props[idx] * psi;
      drifted.normalize();
      const int k = sample_channel_pure(tables, drifted, rng);
      psi = tables.jump_ops[k] * drifted;
      psi.normalize();
      rec.entries.push_back({tau, k});
      t_now += tau;
      if (state_log) state_log->push_back(psi * psi.adjoint());
    }
    return rec;
  }

  ComplexVector rho_vec = vectorize(rho0);
  for (;;) {
    if (stop.kind == StopRule::Kind::Jumps &&
        rec.entries.size() >= static_cast<std::size_t>(stop.value)) {
      break;
    }
    const int idx = sample_waiting_time_index(tables, rho_vec, rng);
    const double tau = tables.grid_time(idx);
    if (stop.kind == StopRule::Kind::Time && t_now + tau > stop.value) {
      rec.final_stretch = stop.value - t_now;
      break;
    }
    ComplexVector drifted = tables.props[idx] * rho_vec;
    drifted /= (trace_row(tables.dim) * drifted)(0).real();
    const int k = sample_channel(tables, drifted, rng);
    ComplexVector after = tables.jumps[k] * drifted;
    const double norm = (trace_row(tables.dim) * after)(0).real();
    if (norm < 1e-300) {
      throw NumericalError("simulate_record: click update underflow");
    }
    rho_vec = after / norm;
    rec.entries.push_back({tau, k});
    t_now += tau;
    if (state_log) state_log->push_back(devectorize(rho_vec));
  }
  return rec;
}

RecordProbability record_probability(const LindbladModel& model,
                                     const RealVector& theta,
                                     const MeasurementRecord& record,
                                     const ComplexMatrix& rho0) {
  const ModelOperators ops = assemble(model, theta);
  SpectralPropagator prop(ops.nojump.matrix);
  const Eigen::RowVectorXcd tr_row = trace_row(ops.dim);

  RecordProbability out;
  ComplexVector state = vectorize(rho0);
  for (const auto& entry : record.entries) {
    if (entry.channel < 0 || entry.channel >= static_cast<int>(ops.jumps.size())) {
      throw ConfigError("record_probability: channel index outside the monitored set");
    }
    ComplexVector next =
        ops.jumps[entry.channel].matrix * prop.apply(entry.tau, state);
    const double step_prob = (tr_row * next)(0).real();
    if (step_prob <= 0) {
      out.log_probability = -std::numeric_limits<double>::infinity();
      out.probability = 0.0;
      return out;
    }
    out.log_probability += std::log(step_prob);
    state = next / step_prob;
  }
  if (record.final_stretch) {
    const double tail =
        (tr_row * prop.apply(*record.final_stretch, state))(0).real();
    if (tail <= 0) {
      out.log_probability = -std::numeric_limits<double>::infinity();
      out.probability = 0.0;
      return out;
    }
    out.log_probability += std::log(tail);
  }
  out.probability = std::exp(out.log_probability);
  return out;
}

void write_records_jsonl(std::ostream& out,
                         const std::vector<MeasurementRecord>& records) {
  for (const auto& rec : records) {
    nlohmann::json j;
    j["trajectory"] = rec.trajectory;
    j["seed"] = rec.seed;
    nlohmann::json jumps = nlohmann::json::array();
    for (const auto& e : rec.entries) {
      jumps.push_back({{"tau", e.tau}, {"channel", rec.labels.at(e.channel)}});
    }
    j["jumps"] = std::move(jumps);
    if (rec.final_stretch) {
      j["final_stretch"] = *rec.final_stretch;
    } else {
      j["final_stretch"] = nullptr;
    }
    out << j.dump() << "\n";
  }
}

std::vector<MeasurementRecord> read_records_jsonl(
    std::istream& in, const std::vector<std::string>& labels) {
  std::vector<MeasurementRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("records line " + std::to_string(line_no) + ": " + e.what());
    }
    MeasurementRecord rec;
    rec.labels = labels;
    rec.trajectory = j.value("trajectory", 0ULL);
    rec.seed = j.value("seed", 0ULL);
    for (const auto& e : j.at("jumps")) {
      const std::string label = e.at("channel").get<std::string>();
      const auto it = std::find(labels.begin(), labels.end(), label);
      if (it == labels.end()) {
        throw ConfigError("records line " + std::to_string(line_no) +
                          ": unknown channel '" + label + "'");
      }
      const double tau = e.at("tau").get<double>();
      if (tau <= 0) {
        throw ConfigError("records line " + std::to_string(line_no) +
                          ": nonpositive waiting time");
      }
      rec.entries.push_back({tau, static_cast<int>(it - labels.begin())});
    }
    if (j.contains("final_stretch") && !j.at("final_stretch").is_null()) {
      rec.final_stretch = j.at("final_stretch").get<double>();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace jumpfisher
