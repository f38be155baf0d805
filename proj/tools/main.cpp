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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "jumpfisher/compression.hpp"
#include "jumpfisher/estimation.hpp"
#include "jumpfisher/model_config.hpp"
#include "jumpfisher/monitoring.hpp"
#include "jumpfisher/parallel.hpp"
#include "jumpfisher/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace jumpfisher;

namespace {

// Exit codes: 0 ok, 2 configuration, 3 numerical failure, 4 model/mode
// incompatibility.
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitModelMode = 4;

std::uint64_t fnv1a64_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot digest '" + path.string() + "'");
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

// "k=v,k=v" -> ordered pairs.
std::vector<std::pair<std::string, double>> parse_settings(const std::string& s) {
  std::vector<std::pair<std::string, double>> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects k=v pairs, got '" + item + "'");
    }
    try {
      out.emplace_back(item.substr(0, eq), std::stod(item.substr(eq + 1)));
    } catch (const std::exception&) {
      throw ConfigError("--set value for '" + item.substr(0, eq) + "' is not numeric");
    }
  }
  return out;
}

struct RunContext {
  std::string command;
  json config;  // full echo of everything that determined the run
  std::uint64_t seed = 1;
  int threads = 0;
  fs::path out_dir = ".";
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
  std::vector<fs::path> outputs;

  fs::path resolve(const std::string& name) const { return out_dir / name; }

  void add_output(const fs::path& p) { outputs.push_back(p); }

  void finish() {
    config["seed"] = seed;
    config["threads"] = threads;
    json manifest;
    manifest["command"] = command;
    manifest["config"] = config;
    manifest["seed"] = seed;
    manifest["version"] = kVersion;
    const auto elapsed = std::chrono::steady_clock::now() - started;
    manifest["wall_time_s"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() / 1e3;
    json files = json::array();
    for (const auto& p : outputs) {
      files.push_back({{"path", p.filename().string()},
                       {"bytes", fs::file_size(p)},
                       {"fnv1a64", fnv1a64_file(p)}});
    }
    manifest["outputs"] = files;
    std::ofstream out(out_dir / "manifest.json");
    out << manifest.dump(2) << "\n";
  }
};

// Model selection shared by the subcommands: --model/--set/--estimate
// and/or --config pointing at a model-config JSON, or at a manifest from
// a previous run whose echoed settings are reused. Command-line --set
// overrides file values.
struct ModelArgs {
  std::string model_name;
  std::string set_string;
  std::vector<std::string> estimate_params;
  std::string config_path;
  json config_echo;
  json manifest_options;  // run options recovered from a manifest

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model_name, "builtin model name");
    cmd->add_option("--set", set_string, "model settings, k=v[,k=v...]");
    cmd->add_option("--estimate", estimate_params,
                    "parameter names forming the estimation vector");
    cmd->add_option("--config", config_path,
                    "model config JSON, or a manifest from a previous run");
  }

  LindbladModel build() {
    json file_config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config '" + config_path + "'");
      json j;
      try {
        in >> j;
      } catch (const json::parse_error& e) {
        throw ConfigError("config '" + config_path + "': " + e.what());
      }
      if (j.contains("config") && j.at("config").contains("model_config")) {
        // Manifest: reuse the echoed model config and run options.
        file_config = j.at("config").at("model_config");
        manifest_options = j.at("config");
      } else {
        file_config = j;
      }
    }

    json merged = file_config.is_null() ? json::object() : file_config;
    if (!model_name.empty()) merged["model"] = model_name;
    if (!merged.contains("model")) {
      throw ConfigError("no model given: pass --model or --config");
    }
    if (!set_string.empty()) {
      for (const auto& [k, v] : parse_settings(set_string)) {
        merged["params"][k] = v;  // command line wins over file values
      }
    }
    if (!estimate_params.empty()) merged["estimate"] = estimate_params;
    config_echo = merged;
    LindbladModel model = model_from_json(merged);
    for (const auto& note : model.notes) std::cerr << "warning: " << note << "\n";
    return model;
  }

  // Option recovery for manifest reruns: manifest value unless the flag
  // was given explicitly (explicit = differs from the declared default).
  template <typename T>
  T option_or(const std::string& key, T cli_value, T default_value) const {
    if (cli_value != default_value) return cli_value;
    if (manifest_options.contains(key)) return manifest_options.at(key).get<T>();
    return cli_value;
  }

  void recover_seed(std::uint64_t& seed) const {
    if (seed == 1 && manifest_options.contains("seed")) {
      seed = manifest_options.at("seed").get<std::uint64_t>();
    }
  }
};

json renewal_report_json(const RenewalFisherReport& rep,
                         const std::vector<std::string>& labels) {
  json j;
  j["fisher_per_jump"] = rep.fisher_per_jump;
  j["channels_per_jump"] = rep.channels_per_jump;
  j["times_given_channels_per_jump"] = rep.times_given_channels_per_jump;
  j["quadrature_error"] = rep.quadrature_error;
  j["decomposition_residual"] = rep.decomposition_residual;
  j["dtheta"] = rep.dtheta;
  j["horizon"] = rep.horizon;
  j["note"] = "per-jump values; the O(1) record-edge term is not included";
  json pairs = json::array();
  for (const auto& p : rep.pairs) {
    pairs.push_back({{"next", labels[p.k]},
                     {"previous", labels[p.q]},
                     {"weight", p.weight},
                     {"integral", p.integral},
                     {"quadrature_error", p.quadrature_error}});
  }
  j["pairs"] = pairs;
  return j;
}

void write_rate_csv(std::ostream& out, const FisherRateReport& rep) {
  out << "time,rate_mean,stderr,M\n";
  out.precision(17);
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    out << rep.times[i] << ',' << rep.mean[i] << ',' << rep.se[i] << ','
        << rep.trajectories << "\n";
  }
}

StopRule make_stop(int stop_jumps, double stop_time) {
  if ((stop_jumps > 0) == (stop_time > 0)) {
    throw ConfigError("pass exactly one of --stop-jumps / --stop-time");
  }
  return stop_jumps > 0 ? StopRule::after_jumps(stop_jumps)
                        : StopRule::after_time(stop_time);
}

std::map<std::string, double> parse_efficiencies(const std::string& s) {
  std::map<std::string, double> out;
  for (const auto& [k, v] : parse_settings(s)) out[k] = v;
  return out;
}

std::vector<std::string> split_labels(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run_simulate(RunContext& ctx, ModelArgs& margs, int stop_jumps,
                 double stop_time, int trajectories, int grid_points,
                 double t_max) {
  const LindbladModel model = margs.build();
  stop_jumps = margs.option_or("stop_jumps", stop_jumps, 0);
  stop_time = margs.option_or("stop_time", stop_time, 0.0);
  trajectories = margs.option_or("trajectories", trajectories, 1);
  grid_points = margs.option_or("grid_points", grid_points, 2000);
  t_max = margs.option_or("t_max", t_max, 0.0);
  margs.recover_seed(ctx.seed);
  const StopRule stop = make_stop(stop_jumps, stop_time);

  ctx.config["model_config"] = margs.config_echo;
  ctx.config["stop_jumps"] = stop_jumps;
  ctx.config["stop_time"] = stop_time;
  ctx.config["trajectories"] = trajectories;
  ctx.config["grid_points"] = grid_points;
  ctx.config["t_max"] = t_max;

  const SimulationTables tables =
      precompute_tables(model, model.theta, GridSpec{grid_points, t_max});
  const ComplexMatrix rho0 = model.initial_state_at(model.theta);

  std::vector<MeasurementRecord> records(trajectories);
  run_parallel(trajectories, ctx.threads, [&](int i) {
    RngStream rng(ctx.seed, static_cast<std::uint64_t>(i));
    records[i] = simulate_record(tables, rho0, stop, rng);
  });

  const fs::path path = ctx.resolve("records.jsonl");
  std::ofstream out(path);
  write_records_jsonl(out, records);
  out.close();
  ctx.add_output(path);
  std::cout << "wrote " << records.size() << " records to " << path.string() << "\n";
  return 0;
}

int run_compressed(RunContext& ctx, const LindbladModel& model, int pidx,
                   const std::string& compression, const std::string& retain,
                   const std::string& efficiency, int stop_jumps, double stop_time,
                   int trajectories, double dtheta, int grid_points) {
  ctx.config["compression"] = compression;
  CompressionOptions copt;
  copt.dtheta = dtheta;
  copt.trajectories = trajectories;
  copt.seed = ctx.seed;
  copt.threads = ctx.threads;
  copt.grid = GridSpec{grid_points, 0.0};

  if (compression == "channels-only") {
    const int n_jumps = stop_jumps > 0 ? stop_jumps : 100;
    const ChannelsOnlyReport rep =
        channels_only_fisher(model, model.theta, pidx, n_jumps, copt);
    json j;
    j["route"] = rep.renewal_route ? "renewal-closed-form" : "monte-carlo";
    j["per_jump"] = rep.per_jump;
    j["per_jump_stderr"] = rep.per_jump_se;
    j["n_jumps"] = n_jumps;
    const fs::path path = ctx.resolve("fisher_channels_only.json");
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    out.close();
    ctx.add_output(path);
    std::cout << "channels-only F per jump = " << rep.per_jump << "\n";
    return 0;
  }
  if (compression == "times-only") {
    const FisherEstimate est = times_only_fisher(
        model, model.theta, pidx, make_stop(stop_jumps, stop_time), copt);
    const fs::path path = ctx.resolve("fisher_times_only.csv");
    std::ofstream out(path);
    write_fisher_csv(out, est);
    out.close();
    ctx.add_output(path);
    std::cout << "times-only F estimate = " << est.mean.back() << " +- "
              << est.se.back() << "\n";
    return 0;
  }
  if (compression == "sample-mean") {
    SampleMeanOptions sopt;
    sopt.dtheta = dtheta;
    sopt.seed = ctx.seed;
    const double n_jumps = stop_jumps > 0 ? stop_jumps : 100;
    const SampleMeanReport rep =
        sample_mean_fisher_compressed(model, model.theta, pidx, n_jumps, sopt);
    json j;
    j["route"] = rep.renewal_route ? "laplace-moments" : "simulated-covariances";
    j["per_jump"] = rep.per_jump;
    j["fisher_total"] = rep.fisher_total;
    j["mean"] = rep.mean;
    j["variance"] = rep.variance;
    j["covariance_sum"] = rep.covariance_sum;
    j["lags_used"] = rep.lags_used;
    const fs::path path = ctx.resolve("fisher_sample_mean.json");
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    out.close();
    ctx.add_output(path);
    std::cout << "sample-mean F per jump = " << rep.per_jump << "\n";
    return 0;
  }
  if (compression == "partial") {
    if (retain.empty()) throw ConfigError("--retain is required for partial mode");
    const LindbladModel partial = partial_monitoring(
        model, split_labels(retain), parse_efficiencies(efficiency));
    GillespieFisherOptions gopt;
    gopt.dtheta = dtheta;
    gopt.threads = ctx.threads;
    gopt.grid = GridSpec{grid_points, 0.0};
    const FisherEstimate est =
        gillespie_fisher(partial, partial.theta, pidx,
                         make_stop(stop_jumps, stop_time), trajectories, ctx.seed, gopt);
    const fs::path path = ctx.resolve("fisher_partial.csv");
    std::ofstream out(path);
    write_fisher_csv(out, est);
    out.close();
    ctx.add_output(path);
    std::cout << "partial-monitoring F estimate = " << est.mean.back() << " +- "
              << est.se.back() << "\n";
    return 0;
  }
  throw ConfigError("unknown compression mode '" + compression + "'");
}

int run_fisher(RunContext& ctx, ModelArgs& margs, std::string mode,
               std::vector<std::string> params, int stop_jumps, double stop_time,
               int trajectories, int epochs, double dtheta, int grid_points,
               double horizon, bool dump_trajectories, std::string compression,
               std::string retain, std::string efficiency) {
  const LindbladModel model = margs.build();
  mode = margs.option_or<std::string>("mode", mode, "renewal");
  stop_jumps = margs.option_or("stop_jumps", stop_jumps, 0);
  stop_time = margs.option_or("stop_time", stop_time, 0.0);
  trajectories = margs.option_or("trajectories", trajectories, 1000);
  epochs = margs.option_or("epochs", epochs, 100);
  dtheta = margs.option_or("dtheta", dtheta, 0.0);
  grid_points = margs.option_or("grid_points", grid_points, 2000);
  horizon = margs.option_or("horizon", horizon, 100.0);
  dump_trajectories =
      margs.option_or("dump_trajectories", dump_trajectories, false);
  compression = margs.option_or<std::string>("compression", compression,
                                             "channels-only");
  retain = margs.option_or<std::string>("retain", retain, "");
  efficiency = margs.option_or<std::string>("efficiency", efficiency, "");
  margs.recover_seed(ctx.seed);
  if (params.empty() && margs.manifest_options.contains("params")) {
    for (const auto& p : margs.manifest_options.at("params")) {
      params.push_back(p.get<std::string>());
    }
  }

  ctx.config["model_config"] = margs.config_echo;
  ctx.config["mode"] = mode;
  ctx.config["stop_jumps"] = stop_jumps;
  ctx.config["stop_time"] = stop_time;
  ctx.config["trajectories"] = trajectories;
  ctx.config["epochs"] = epochs;
  ctx.config["dtheta"] = dtheta;
  ctx.config["grid_points"] = grid_points;
  ctx.config["horizon"] = horizon;
  ctx.config["dump_trajectories"] = dump_trajectories;
  ctx.config["retain"] = retain;
  ctx.config["efficiency"] = efficiency;

  if (params.empty()) params = {model.param_names.front()};
  ctx.config["params"] = params;
  const int pidx = model.param_index(params.front());

  if (mode == "renewal") {
    const RenewalVerdict verdict = check_renewal(model, model.theta);
    if (!verdict.renewal) {
      throw ModelModeError("renewal mode rejected: " + verdict.reason);
    }
    RenewalFisherOptions opt;
    opt.dtheta = dtheta;
    const RenewalFisherReport rep = fisher_renewal(model, model.theta, pidx, opt);
    std::vector<std::string> labels;
    for (const auto& ch : verdict.structure->channels) {
      if (ch.active) labels.push_back(ch.label);
    }
    const fs::path path = ctx.resolve("fisher_renewal.json");
    std::ofstream out(path);
    out << renewal_report_json(rep, labels).dump(2) << "\n";
    out.close();
    ctx.add_output(path);
    std::cout << "F per jump = " << rep.fisher_per_jump
              << " (channels " << rep.channels_per_jump << ", times|channels "
              << rep.times_given_channels_per_jump << ")\n";
    return 0;
  }

  if (mode == "gillespie") {
    GillespieFisherOptions opt;
    opt.dtheta = dtheta;
    opt.threads = ctx.threads;
    opt.epochs = epochs;
    opt.grid = GridSpec{grid_points, 0.0};
    opt.keep_trajectories = dump_trajectories;
    const FisherEstimate est =
        gillespie_fisher(model, model.theta, pidx, make_stop(stop_jumps, stop_time),
                         trajectories, ctx.seed, opt);
    const fs::path path = ctx.resolve("fisher_curve.csv");
    std::ofstream out(path);
    write_fisher_csv(out, est);
    out.close();
    ctx.add_output(path);
    if (dump_trajectories) {
      const fs::path tpath = ctx.resolve("trajectories.jsonl");
      std::ofstream tout(tpath);
      for (std::size_t i = 0; i < est.per_trajectory.size(); ++i) {
        json row;
        row["trajectory"] = i;
        row["tr_xi_sq"] = est.per_trajectory[i];
        tout << row.dump() << "\n";
      }
      tout.close();
      ctx.add_output(tpath);
    }
    std::cout << "F estimate at the last grid point = " << est.mean.back()
              << " +- " << est.se.back() << "\n";
    return 0;
  }

  if (mode == "rate") {
    GillespieFisherOptions opt;
    opt.dtheta = dtheta;
    opt.threads = ctx.threads;
    opt.epochs = epochs;
    opt.grid = GridSpec{grid_points, 0.0};
    const double t_f = stop_time > 0 ? stop_time : horizon;
    const FisherRateReport rep =
        fisher_rate(model, model.theta, pidx, trajectories, t_f, ctx.seed, opt);
    const fs::path csv_path = ctx.resolve("fisher_rate.csv");
    std::ofstream csv(csv_path);
    write_rate_csv(csv, rep);
    csv.close();
    ctx.add_output(csv_path);
    json j;
    j["asymptotic_rate"] = rep.asymptotic_rate;
    j["asymptotic_stderr"] = rep.asymptotic_se;
    j["trajectories"] = rep.trajectories;
    const fs::path json_path = ctx.resolve("fisher_rate.json");
    std::ofstream js(json_path);
    js << j.dump(2) << "\n";
    js.close();
    ctx.add_output(json_path);
    std::cout << "dF/dt = " << rep.asymptotic_rate << " +- " << rep.asymptotic_se
              << "\n";
    return 0;
  }

  if (mode == "matrix") {
    GillespieFisherOptions opt;
    opt.dtheta = dtheta;
    opt.threads = ctx.threads;
    opt.grid = GridSpec{grid_points, 0.0};
    const FisherMatrixReport rep = fisher_matrix(
        model, model.theta, make_stop(stop_jumps, stop_time), trajectories,
        ctx.seed, opt);
    json j;
    j["params"] = model.param_names;
    j["clamped"] = rep.clamped;
    j["trajectories"] = rep.trajectories;
    json mat = json::array(), raw = json::array(), se = json::array();
    for (Eigen::Index i = 0; i < rep.matrix.rows(); ++i) {
      json mrow = json::array(), rrow = json::array(), srow = json::array();
      for (Eigen::Index k = 0; k < rep.matrix.cols(); ++k) {
        mrow.push_back(rep.matrix(i, k));
        rrow.push_back(rep.raw(i, k));
        srow.push_back(rep.se(i, k));
      }
      mat.push_back(mrow);
      raw.push_back(rrow);
      se.push_back(srow);
    }
    j["matrix"] = mat;
    j["raw"] = raw;
    j["stderr"] = se;
    const fs::path path = ctx.resolve("fisher_matrix.json");
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    out.close();
    ctx.add_output(path);
    std::cout << "Fisher matrix written (" << model.param_names.size() << " x "
              << model.param_names.size() << ")\n";
    return 0;
  }

  if (mode == "compressed") {
    return run_compressed(ctx, model, pidx, compression, retain, efficiency,
                          stop_jumps, stop_time, trajectories, dtheta, grid_points);
  }
  throw ConfigError("unknown fisher mode '" + mode + "'");
}

int run_estimate(RunContext& ctx, ModelArgs& margs, std::string records_path,
                 std::vector<std::string> params, std::string estimator,
                 double lo, double hi, double tol, std::string pair,
                 double true_theta, int stop_jumps, int trajectories,
                 int grid_points) {
  const LindbladModel model = margs.build();
  estimator = margs.option_or<std::string>("estimator", estimator, "mle");
  records_path = margs.option_or<std::string>("records", records_path, "");
  pair = margs.option_or<std::string>("pair", pair, "");
  tol = margs.option_or("tol", tol, 0.0);
  stop_jumps = margs.option_or("stop_jumps", stop_jumps, 0);
  trajectories = margs.option_or("trajectories", trajectories, 0);
  grid_points = margs.option_or("grid_points", grid_points, 2000);
  margs.recover_seed(ctx.seed);
  if (lo == 0.0 && hi == 0.0 && margs.manifest_options.contains("interval")) {
    lo = margs.manifest_options.at("interval").at(0).get<double>();
    hi = margs.manifest_options.at("interval").at(1).get<double>();
  }
  if (std::isnan(true_theta) && margs.manifest_options.contains("true_theta") &&
      !margs.manifest_options.at("true_theta").is_null()) {
    true_theta = margs.manifest_options.at("true_theta").get<double>();
  }
  if (params.empty() && margs.manifest_options.contains("params")) {
    for (const auto& p : margs.manifest_options.at("params")) {
      params.push_back(p.get<std::string>());
    }
  }

  ctx.config["model_config"] = margs.config_echo;
  ctx.config["estimator"] = estimator;
  ctx.config["interval"] = {lo, hi};
  ctx.config["records"] = records_path;
  ctx.config["pair"] = pair;
  ctx.config["tol"] = tol;
  ctx.config["stop_jumps"] = stop_jumps;
  ctx.config["trajectories"] = trajectories;
  ctx.config["grid_points"] = grid_points;
  if (!std::isnan(true_theta)) ctx.config["true_theta"] = true_theta;
  if (params.empty()) params = {model.param_names.front()};
  ctx.config["params"] = params;
  const int pidx = model.param_index(params.front());
  if (!(hi > lo)) throw ConfigError("--interval needs lo < hi");

  const ModelOperators ops = assemble(model, model.theta);
  std::vector<MeasurementRecord> records;
  if (!records_path.empty()) {
    std::ifstream in(records_path);
    if (!in) throw ConfigError("cannot open records '" + records_path + "'");
    records = read_records_jsonl(in, ops.labels);
  } else {
    if (stop_jumps <= 0 || trajectories <= 0) {
      throw ConfigError("without --records, pass --stop-jumps and --trajectories");
    }
    const SimulationTables tables =
        precompute_tables(model, model.theta, GridSpec{grid_points, 0.0});
    const ComplexMatrix rho0 = model.initial_state_at(model.theta);
    records.resize(trajectories);
    run_parallel(trajectories, ctx.threads, [&](int i) {
      RngStream rng(ctx.seed, static_cast<std::uint64_t>(i));
      records[i] = simulate_record(tables, rho0, StopRule::after_jumps(stop_jumps), rng);
    });
  }
  if (records.empty()) throw ConfigError("no records to estimate from");
  const double truth = std::isnan(true_theta) ? model.theta(pidx) : true_theta;

  // Information for the Cramer-Rao comparison: analytic on renewal
  // models, omitted otherwise (0 marks 'not computed').
  double fisher_total = 0.0;
  const RenewalVerdict verdict = check_renewal(model, model.theta);
  if (verdict.renewal) {
    double jumps_mean = 0.0;
    for (const auto& r : records) jumps_mean += double(r.entries.size());
    jumps_mean /= double(records.size());
    fisher_total =
        fisher_renewal(model, model.theta, pidx).fisher_per_jump * jumps_mean;
  }

  EnsembleStudy study;
  if (estimator == "mle") {
    EstimationOptions opt;
    opt.tol = tol;
    study = run_mle_study(records, model, model.theta, pidx, lo, hi, truth,
                          fisher_total, opt, ctx.threads);
  } else if (estimator == "mean-wait") {
    const auto sep = pair.find(':');
    if (sep == std::string::npos) {
      throw ConfigError("--pair expects from:to channel labels");
    }
    const std::string from = pair.substr(0, sep), to = pair.substr(sep + 1);
    study.true_theta = truth;
    study.cr_bound = fisher_total > 0 ? 1.0 / fisher_total : 0.0;
    for (const auto& rec : records) {
      const MeanWaitEstimate est = mean_waiting_time_estimator(
          {rec}, model, model.theta, pidx, from, to, lo, hi);
      study.estimates.push_back(est.theta_hat);
      study.logliks.push_back(0.0);
      study.iterations.push_back(static_cast<int>(est.pairs_used));
    }
    double mean = 0.0;
    for (double e : study.estimates) mean += e;
    mean /= double(study.estimates.size());
    study.mean = mean;
    for (double e : study.estimates) {
      study.variance += (e - mean) * (e - mean);
      study.mse += (e - truth) * (e - truth);
    }
    study.variance = study.estimates.size() > 1
                         ? study.variance / double(study.estimates.size() - 1)
                         : 0.0;
    study.mse /= double(study.estimates.size());
  } else {
    throw ConfigError("unknown estimator '" + estimator + "'");
  }

  const fs::path csv_path = ctx.resolve("estimates.csv");
  std::ofstream csv(csv_path);
  write_study_csv(csv, study);
  csv.close();
  ctx.add_output(csv_path);
  const fs::path sum_path = ctx.resolve("summary.json");
  std::ofstream sum(sum_path);
  write_study_summary_json(sum, study);
  sum.close();
  ctx.add_output(sum_path);
  std::cout << "estimates: mean " << study.mean << ", variance " << study.variance
            << ", mse " << study.mse << ", CR bound " << study.cr_bound << "\n";
  return 0;
}

int run_model(const std::string& action, const std::string& name) {
  const std::vector<std::string> names = {"qubit-thermometer", "resonant-fluorescence",
                                          "coupled-qubits", "micromaser"};
  if (action == "list") {
    for (const auto& n : names) std::cout << n << "\n";
    std::cout << "custom (via --config)\n";
    return 0;
  }
  const LindbladModel model = build_named_model(name, {});
  std::cout << "model: " << model.name << "\n";
  std::cout << "dim: " << model.dim << "\n";
  std::cout << "estimation parameters:";
  for (std::size_t i = 0; i < model.param_names.size(); ++i) {
    std::cout << " " << model.param_names[i] << "=" << model.theta(i);
  }
  std::cout << "\nchannels:\n";
  for (const auto& ch : model.channels) {
    std::cout << "  " << ch.label << (ch.monitored ? " (monitored" : " (unmonitored")
              << ", efficiency " << ch.efficiency << ")\n";
  }
  const RenewalVerdict verdict = check_renewal(model, model.theta);
  std::cout << "renewal: " << (verdict.renewal ? "yes" : ("no: " + verdict.reason))
            << "\n";
  for (const auto& note : model.notes) std::cout << "note: " << note << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisher information of continuously monitored quantum jump records"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunContext ctx;
  std::string out_dir = ".";
  app.add_option("--seed", ctx.seed, "base seed for all random streams");
  app.add_option("--threads", ctx.threads, "worker cap (0 = hardware)");
  app.add_option("--out-dir", out_dir, "output directory");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "sample measurement records");
  ModelArgs sim_model;
  sim_model.attach(simulate);
  int sim_jumps = 0, sim_traj = 1, sim_grid = 2000;
  double sim_time = 0.0, sim_tmax = 0.0;
  simulate->add_option("--stop-jumps", sim_jumps, "stop after this many clicks");
  simulate->add_option("--stop-time", sim_time, "stop at this time");
  simulate->add_option("--trajectories", sim_traj, "number of records");
  simulate->add_option("--grid-points", sim_grid, "propagator table size");
  simulate->add_option("--t-max", sim_tmax, "table horizon (0 = auto)");

  // fisher
  auto* fisher = app.add_subcommand("fisher", "compute Fisher information");
  ModelArgs fi_model;
  fi_model.attach(fisher);
  std::string fi_mode = "renewal";
  std::vector<std::string> fi_params;
  int fi_jumps = 0, fi_traj = 1000, fi_epochs = 100, fi_grid = 2000;
  double fi_time = 0.0, fi_dtheta = 0.0, fi_horizon = 100.0;
  std::string fi_compression = "channels-only", fi_retain, fi_eff;
  bool fi_dump = false;
  fisher->add_option("--mode", fi_mode, "renewal|gillespie|rate|matrix|compressed");
  fisher->add_flag("--dump-trajectories", fi_dump,
                   "also write per-trajectory tr(xi)^2 series (JSON lines)");
  fisher->add_option("--param", fi_params, "estimation parameter name(s)");
  fisher->add_option("--stop-jumps", fi_jumps, "record length in clicks");
  fisher->add_option("--stop-time", fi_time, "record duration");
  fisher->add_option("--trajectories", fi_traj, "Monte Carlo sample size");
  fisher->add_option("--epochs", fi_epochs, "readout points on a time grid");
  fisher->add_option("--dtheta", fi_dtheta, "derivative step (0 = default)");
  fisher->add_option("--grid-points", fi_grid, "propagator table size");
  fisher->add_option("--horizon", fi_horizon, "time horizon for rate mode");
  fisher->add_option("--compression", fi_compression,
                     "channels-only|times-only|sample-mean|partial");
  fisher->add_option("--retain", fi_retain, "channels kept under partial monitoring");
  fisher->add_option("--efficiency", fi_eff, "per-channel efficiencies, k=v[,k=v]");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "run estimators on records");
  ModelArgs est_model;
  est_model.attach(estimate);
  std::string est_records, est_estimator = "mle", est_pair;
  std::vector<std::string> est_params;
  std::pair<double, double> est_interval{0.0, 0.0};
  double est_tol = 0.0, est_truth = std::numeric_limits<double>::quiet_NaN();
  int est_jumps = 0, est_traj = 0, est_grid = 2000;
  estimate->add_option("--records", est_records, "records JSONL from simulate");
  estimate->add_option("--param", est_params, "estimation parameter name");
  estimate->add_option("--estimator", est_estimator, "mle|mean-wait");
  estimate->add_option("--interval", est_interval, "search interval lo hi");
  estimate->add_option("--tol", est_tol, "optimizer tolerance");
  estimate->add_option("--pair", est_pair, "from:to labels for mean-wait");
  estimate->add_option("--true-theta", est_truth, "reference value for the MSE");
  estimate->add_option("--stop-jumps", est_jumps, "inline generation: clicks per record");
  estimate->add_option("--trajectories", est_traj, "inline generation: record count");
  estimate->add_option("--grid-points", est_grid, "propagator table size");

  // compress (alias surface for fisher --mode compressed)
  auto* compress = app.add_subcommand("compress", "Fisher information after compression");
  ModelArgs co_model;
  co_model.attach(compress);
  std::string co_compression = "channels-only", co_retain, co_eff;
  std::vector<std::string> co_params;
  int co_jumps = 0, co_traj = 1000, co_grid = 2000;
  double co_time = 0.0, co_dtheta = 0.0;
  compress->add_option("--compression", co_compression,
                       "channels-only|times-only|sample-mean|partial");
  compress->add_option("--param", co_params, "estimation parameter name");
  compress->add_option("--stop-jumps", co_jumps, "record length in clicks");
  compress->add_option("--stop-time", co_time, "record duration");
  compress->add_option("--trajectories", co_traj, "Monte Carlo sample size");
  compress->add_option("--retain", co_retain, "channels kept under partial monitoring");
  compress->add_option("--efficiency", co_eff, "per-channel efficiencies");
  compress->add_option("--dtheta", co_dtheta, "derivative step (0 = default)");
  compress->add_option("--grid-points", co_grid, "propagator table size");

  // model
  auto* model_cmd = app.add_subcommand("model", "list or describe builtin models");
  std::string model_action = "list", model_name;
  model_cmd->add_option("action", model_action, "list|describe");
  model_cmd->add_option("name", model_name, "model to describe");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  ctx.out_dir = out_dir;
  try {
    fs::create_directories(ctx.out_dir);
    int rc = 0;
    if (simulate->parsed()) {
      ctx.command = "simulate";
      rc = run_simulate(ctx, sim_model, sim_jumps, sim_time, sim_traj, sim_grid,
                        sim_tmax);
      ctx.finish();
    } else if (fisher->parsed()) {
      ctx.command = "fisher";
      rc = run_fisher(ctx, fi_model, fi_mode, fi_params, fi_jumps, fi_time, fi_traj,
                      fi_epochs, fi_dtheta, fi_grid, fi_horizon, fi_dump,
                      fi_compression, fi_retain, fi_eff);
      ctx.finish();
    } else if (estimate->parsed()) {
      ctx.command = "estimate";
      rc = run_estimate(ctx, est_model, est_records, est_params, est_estimator,
                        est_interval.first, est_interval.second, est_tol, est_pair,
                        est_truth, est_jumps, est_traj, est_grid);
      ctx.finish();
    } else if (compress->parsed()) {
      ctx.command = "compress";
      const LindbladModel model = co_model.build();
      co_compression = co_model.option_or<std::string>("compression",
                                                       co_compression,
                                                       "channels-only");
      co_retain = co_model.option_or<std::string>("retain", co_retain, "");
      co_eff = co_model.option_or<std::string>("efficiency", co_eff, "");
      co_jumps = co_model.option_or("stop_jumps", co_jumps, 0);
      co_time = co_model.option_or("stop_time", co_time, 0.0);
      co_traj = co_model.option_or("trajectories", co_traj, 1000);
      co_dtheta = co_model.option_or("dtheta", co_dtheta, 0.0);
      co_grid = co_model.option_or("grid_points", co_grid, 2000);
      co_model.recover_seed(ctx.seed);
      ctx.config["model_config"] = co_model.config_echo;
      ctx.config["stop_jumps"] = co_jumps;
      ctx.config["stop_time"] = co_time;
      ctx.config["trajectories"] = co_traj;
      ctx.config["dtheta"] = co_dtheta;
      ctx.config["grid_points"] = co_grid;
      ctx.config["retain"] = co_retain;
      ctx.config["efficiency"] = co_eff;
      if (co_params.empty() && co_model.manifest_options.contains("params")) {
        for (const auto& p : co_model.manifest_options.at("params")) {
          co_params.push_back(p.get<std::string>());
        }
      }
      if (!co_params.empty()) ctx.config["params"] = co_params;
      const int pidx = model.param_index(
          co_params.empty() ? model.param_names.front() : co_params.front());
      rc = run_compressed(ctx, model, pidx, co_compression, co_retain, co_eff,
                          co_jumps, co_time, co_traj, co_dtheta, co_grid);
      ctx.finish();
    } else if (model_cmd->parsed()) {
      if (model_action == "describe" && model_name.empty()) {
        throw ConfigError("model describe needs a name");
      }
      rc = run_model(model_action, model_name);
    }
    return rc;
  } catch (const ModelModeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModelMode;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
