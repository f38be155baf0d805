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

#include "jumpfisher/model.hpp"

#include <algorithm>

namespace jumpfisher {

int LindbladModel::param_index(const std::string& name) const {
  const auto it = std::find(param_names.begin(), param_names.end(), name);
  if (it == param_names.end()) {
    throw ConfigError("model '" + this->name + "' has no parameter '" + name + "'");
  }
  return static_cast<int>(it - param_names.begin());
}

bool LindbladModel::theta_valid(const RealVector& th) const {
  if (th.size() != theta.size()) return false;
  return valid_region ? valid_region(th) : true;
}

ComplexMatrix LindbladModel::initial_state_at(const RealVector& th) const {
  if (initial_state) return (*initial_state)(th);
  return steady_state(assemble(*this, th).liouvillian);
}

std::vector<int> LindbladModel::monitored_indices() const {
  std::vector<int> out;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    if (channels[k].monitored) out.push_back(static_cast<int>(k));
  }
  return out;
}

Superoperator ModelOperators::total_jump() const {
  Superoperator sum = Superoperator::zero(dim);
  for (const auto& j : jumps) sum = sum + j;
  return sum;
}

ModelOperators assemble(const LindbladModel& model, const RealVector& theta) {
  if (!model.theta_valid(theta)) {
    throw ConfigError("assemble: parameter point outside the model's valid region");
  }
  ModelOperators ops;
  ops.dim = model.dim;
  ops.theta = theta;
  ops.hamiltonian = model.hamiltonian_at(theta);

  std::vector<ComplexMatrix> all_ops;
  std::vector<bool> monitored;
  std::vector<double> effs;
  for (const auto& ch : model.channels) {
    ComplexMatrix L = ch.operator_at(theta);
    if (L.rows() != model.dim || L.cols() != model.dim) {
      throw ConfigError("assemble: channel '" + ch.label + "' has wrong dimension");
    }
    if (ch.efficiency < 0.0 || ch.efficiency > 1.0) {
      throw ConfigError("assemble: channel '" + ch.label + "' efficiency outside [0, 1]");
    }
    all_ops.push_back(L);
    monitored.push_back(ch.monitored);
    effs.push_back(ch.efficiency);
  }

  ops.liouvillian = build_liouvillian(ops.hamiltonian, all_ops);
  ops.nojump = build_nojump_generator(ops.hamiltonian, all_ops, monitored, effs);
  for (std::size_t k = 0; k < all_ops.size(); ++k) {
    if (!monitored[k]) continue;
    ops.labels.push_back(model.channels[k].label);
    ops.jump_ops.push_back(all_ops[k]);
    ops.efficiencies.push_back(effs[k]);
    ops.jumps.push_back(jump_superoperator(all_ops[k], effs[k]));
  }
  return ops;
}

double default_displacement(const RealVector& theta, int param_index) {
  return 1e-4 * std::max(1.0, std::abs(theta(param_index)));
}

Superoperator DisplacedOperators::jump_derivative(std::size_t k) const {
  return {center.dim, (plus.jumps[k].matrix - minus.jumps[k].matrix) / (2.0 * dtheta)};
}

Superoperator DisplacedOperators::nojump_derivative() const {
  return {center.dim, (plus.nojump.matrix - minus.nojump.matrix) / (2.0 * dtheta)};
}

DisplacedOperators displace(const LindbladModel& model, const RealVector& theta,
                            int param_index, double dtheta) {
  if (param_index < 0 || param_index >= theta.size()) {
    throw ConfigError("displace: parameter index out of range");
  }
  if (dtheta == 0.0) dtheta = default_displacement(theta, param_index);
  if (dtheta <= 0.0) {
    throw ConfigError("displace: displacement must be positive");
  }
  RealVector up = theta, down = theta;
  up(param_index) += dtheta;
  down(param_index) -= dtheta;
  if (!model.theta_valid(up) || !model.theta_valid(down)) {
    throw ConfigError("displace: theta +- dtheta leaves the valid region");
  }
  DisplacedOperators d;
  d.center = assemble(model, theta);
  d.plus = assemble(model, up);
  d.minus = assemble(model, down);
  d.dtheta = dtheta;
  d.param_index = param_index;
  return d;
}

}  // namespace jumpfisher
