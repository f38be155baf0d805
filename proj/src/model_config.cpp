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

#include "jumpfisher/model_config.hpp"

#include <cmath>
#include <fstream>

namespace jumpfisher {

using nlohmann::json;

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(row);
  }
  return rows;
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw ConfigError("matrix: expected a nonempty array of rows");
  }
  const auto nrows = j.size();
  const auto ncols = j.at(0).size();
  ComplexMatrix m(nrows, ncols);
  for (std::size_t i = 0; i < nrows; ++i) {
    if (j.at(i).size() != ncols) {
      throw ConfigError("matrix: ragged rows at row " + std::to_string(i));
    }
    for (std::size_t k = 0; k < ncols; ++k) {
      const auto& e = j.at(i).at(k);
      if (!e.is_array() || e.size() != 2) {
        throw ConfigError("matrix: entries must be [re, im] pairs");
      }
      m(i, k) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

namespace {

// A matrix-valued function of the scalar custom parameter. Fixed matrices
// are constant; displacement triples are defined exactly at theta0 and
// theta0 +- dtheta.
std::function<ComplexMatrix(const RealVector&)> matrix_family(
    const json& spec, double theta0, double dtheta, const std::string& what) {
  if (spec.is_object()) {
    for (const char* key : {"base", "dtheta_plus", "dtheta_minus"}) {
      if (!spec.contains(key)) {
        throw ConfigError(what + ": displacement triple missing '" + key + "'");
      }
    }
    const ComplexMatrix base = matrix_from_json(spec.at("base"));
    const ComplexMatrix up = matrix_from_json(spec.at("dtheta_plus"));
    const ComplexMatrix down = matrix_from_json(spec.at("dtheta_minus"));
    return [=](const RealVector& th) -> ComplexMatrix {
      const double t = th(0);
      const double snap = 0.25 * dtheta;
      if (std::abs(t - theta0) < snap) return base;
      if (std::abs(t - (theta0 + dtheta)) < snap) return up;
      if (std::abs(t - (theta0 - dtheta)) < snap) return down;
      throw ConfigError(what +
                        ": displacement-triple family is defined only at theta0 "
                        "and theta0 +- dtheta");
    };
  }
  const ComplexMatrix fixed = matrix_from_json(spec);
  return [fixed](const RealVector&) { return fixed; };
}

LindbladModel custom_model_from_json(const json& j) {
  LindbladModel m;
  m.name = "custom";
  m.dim = j.at("dim").get<int>();
  if (m.dim < 2) throw ConfigError("custom model: dim must be at least 2");

  double theta0 = 0.0;
  double dtheta = 1e-4;
  std::string pname = "theta";
  if (j.contains("theta")) {
    const auto& t = j.at("theta");
    pname = t.value("name", "theta");
    theta0 = t.value("value", 0.0);
    dtheta = t.value("dtheta", 1e-4);
  }
  m.param_names = {pname};
  m.theta = RealVector::Constant(1, theta0);

  m.hamiltonian_at =
      matrix_family(j.at("hamiltonian"), theta0, dtheta, "hamiltonian");
  if (!j.contains("channels") || !j.at("channels").is_array()) {
    throw ConfigError("custom model: 'channels' array required");
  }
  for (const auto& c : j.at("channels")) {
    JumpChannel ch;
    ch.label = c.at("label").get<std::string>();
    ch.operator_at =
        matrix_family(c.at("matrix"), theta0, dtheta, "channel " + ch.label);
    ch.efficiency = c.value("efficiency", 1.0);
    ch.monitored = c.value("monitored", true);
    if (ch.efficiency < 0.0 || ch.efficiency > 1.0) {
      throw ConfigError("channel " + ch.label + ": efficiency outside [0, 1]");
    }
    m.channels.push_back(std::move(ch));
  }
  if (j.contains("initial_state")) {
    const ComplexMatrix rho0 = matrix_from_json(j.at("initial_state"));
    if (!is_density_matrix(rho0, 1e-8)) {
      throw ConfigError("custom model: initial_state is not a density matrix");
    }
    m.initial_state = [rho0](const RealVector&) { return rho0; };
  }
  return m;
}

}  // namespace

LindbladModel model_from_json(const json& j) {
  if (!j.contains("model")) throw ConfigError("model config: 'model' key required");
  const std::string name = j.at("model").get<std::string>();
  if (name == "custom") return custom_model_from_json(j);

  std::vector<std::pair<std::string, double>> settings;
  if (j.contains("params")) {
    for (const auto& [key, val] : j.at("params").items()) {
      if (!val.is_number()) {
        throw ConfigError("model config: param '" + key + "' must be numeric");
      }
      settings.emplace_back(key, val.get<double>());
    }
  }
  std::vector<std::string> estimate;
  if (j.contains("estimate")) {
    for (const auto& p : j.at("estimate")) estimate.push_back(p.get<std::string>());
  }
  return build_named_model(name, settings, estimate);
}

LindbladModel load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("model config '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

}  // namespace jumpfisher
