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

#include "jumpfisher/models.hpp"

#include <cmath>
#include <map>

namespace jumpfisher {

namespace {

// Builds the fixed/free parameter split used by every model family:
// `values` holds the build-time settings; the names in `params` become
// the components of theta (in the given order) and override the fixed
// values when the family is evaluated.
class ParamBinder {
 public:
  ParamBinder(std::map<std::string, double> values,
              const std::vector<std::string>& params)
      : values_(std::move(values)) {
    for (const auto& p : params) {
      if (values_.find(p) == values_.end()) {
        throw ConfigError("unknown estimation parameter '" + p + "'");
      }
      free_.push_back(p);
    }
  }

  RealVector theta0() const {
    RealVector th(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t i = 0; i < free_.size(); ++i) th(i) = values_.at(free_[i]);
    return th;
  }

  std::vector<std::string> names() const { return free_; }

  std::map<std::string, double> resolve(const RealVector& th) const {
    std::map<std::string, double> v = values_;
    for (std::size_t i = 0; i < free_.size(); ++i) {
      v[free_[i]] = th(static_cast<Eigen::Index>(i));
    }
    return v;
  }

 private:
  std::map<std::string, double> values_;
  std::vector<std::string> free_;
};

}  // namespace

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix sigma_plus() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1;
  return m;
}

ComplexMatrix sigma_minus() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(1, 0) = 1;
  return m;
}

ComplexMatrix annihilation(int n_levels) {
  ComplexMatrix a = ComplexMatrix::Zero(n_levels, n_levels);
  for (int n = 1; n < n_levels; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

std::function<Complex(double)> sin_sqrt_over_sqrt(double c) {
  return [c](double x) -> Complex {
    if (x < 1e-24) return Complex(c, 0.0);
    const double r = std::sqrt(x);
    return Complex(std::sin(c * r) / r, 0.0);
  };
}

LindbladModel qubit_thermometer(double omega, double Omega, double gamma,
                                double nbar, std::vector<std::string> params) {
  if (gamma <= 0) throw ConfigError("qubit_thermometer: gamma must be positive");
  if (nbar < 0) throw ConfigError("qubit_thermometer: nbar must be nonnegative");
  ParamBinder bind({{"omega", omega}, {"Omega", Omega}, {"gamma", gamma}, {"nbar", nbar}},
                   params);
  LindbladModel m;
  m.dim = 2;
  m.name = "qubit-thermometer";
  m.param_names = bind.names();
  m.theta = bind.theta0();
  m.hamiltonian_at = [bind](const RealVector& th) {
    const auto v = bind.resolve(th);
    return ComplexMatrix(0.5 * v.at("omega") * pauli_z() +
                         0.5 * v.at("Omega") * pauli_x());
  };
  m.channels.push_back({"+",
                        [bind](const RealVector& th) {
                          const auto v = bind.resolve(th);
                          return ComplexMatrix(
                              std::sqrt(v.at("gamma") * v.at("nbar")) * sigma_plus());
                        },
                        1.0, true});
  m.channels.push_back({"-",
                        [bind](const RealVector& th) {
                          const auto v = bind.resolve(th);
                          return ComplexMatrix(
                              std::sqrt(v.at("gamma") * (v.at("nbar") + 1.0)) *
                              sigma_minus());
                        },
                        1.0, true});
  m.valid_region = [bind](const RealVector& th) {
    const auto v = bind.resolve(th);
    return v.at("gamma") > 0 && v.at("nbar") >= 0;
  };
  return m;
}

LindbladModel resonant_fluorescence(double Omega, double Gamma,
                                    std::vector<std::string> params) {
  if (Omega <= 0 || Gamma <= 0) {
    throw ConfigError("resonant_fluorescence: rates must be positive");
  }
  ParamBinder bind({{"Omega", Omega}, {"Gamma", Gamma}}, params);
  LindbladModel m;
  m.dim = 2;
  m.name = "resonant-fluorescence";
  m.param_names = bind.names();
  m.theta = bind.theta0();
  m.hamiltonian_at = [bind](const RealVector& th) {
    const auto v = bind.resolve(th);
    return ComplexMatrix(0.5 * v.at("Omega") * pauli_x());
  };
  m.channels.push_back({"-",
                        [bind](const RealVector& th) {
                          const auto v = bind.resolve(th);
                          return ComplexMatrix(std::sqrt(v.at("Gamma")) * sigma_minus());
                        },
                        1.0, true});
  m.valid_region = [bind](const RealVector& th) {
    const auto v = bind.resolve(th);
    return v.at("Omega") > 0 && v.at("Gamma") > 0;
  };
  return m;
}

LindbladModel coupled_qubits(double Omega_A, double Omega_B, double omega_A,
                             double omega_B, double g, double gamma,
                             double nbar_th, std::vector<std::string> params) {
  if (gamma <= 0) throw ConfigError("coupled_qubits: gamma must be positive");
  if (nbar_th < 0) throw ConfigError("coupled_qubits: nbar_th must be nonnegative");
  ParamBinder bind({{"Omega_A", Omega_A},
                    {"Omega_B", Omega_B},
                    {"omega_A", omega_A},
                    {"omega_B", omega_B},
                    {"g", g},
                    {"gamma", gamma},
                    {"nbar_th", nbar_th}},
                   params);
  const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
  LindbladModel m;
  m.dim = 4;
  m.name = "coupled-qubits";
  m.param_names = bind.names();
  m.theta = bind.theta0();
  m.hamiltonian_at = [bind, id2](const RealVector& th) {
    const auto v = bind.resolve(th);
    ComplexMatrix h = v.at("Omega_A") * kron(pauli_x(), id2) +
                      v.at("Omega_B") * kron(id2, pauli_x()) +
                      v.at("omega_A") * kron(pauli_z(), id2) +
                      v.at("omega_B") * kron(id2, pauli_z()) +
                      v.at("g") * (kron(sigma_plus(), sigma_minus()) +
                                   kron(sigma_minus(), sigma_plus()));
    return h;
  };
  const bool thermal = nbar_th > 0.0;
  m.channels.push_back({"-B",
                        [bind, id2, thermal](const RealVector& th) {
                          const auto v = bind.resolve(th);
                          const double rate =
                              thermal ? v.at("gamma") * (v.at("nbar_th") + 1.0)
                                      : v.at("gamma");
                          return ComplexMatrix(std::sqrt(rate) * kron(id2, sigma_minus()));
                        },
                        1.0, true});
  if (thermal) {
    m.channels.push_back({"+B",
                          [bind, id2](const RealVector& th) {
                            const auto v = bind.resolve(th);
                            return ComplexMatrix(
                                std::sqrt(v.at("gamma") * v.at("nbar_th")) *
                                kron(id2, sigma_plus()));
                          },
                          1.0, true});
  }
  m.valid_region = [bind](const RealVector& th) {
    const auto v = bind.resolve(th);
    return v.at("gamma") > 0 && v.at("nbar_th") >= 0;
  };
  return m;
}

namespace {

// Kraus pair of the field-atom exchange unitary exp(-i phi (a sp + a^dag
// sm)) on the truncated joint space, for an incoming atom alpha|e> +
// beta|g> measured in the energy basis on exit. Exact completeness at any
// truncation comes from exponentiating after truncating. The ground
// branch carries a global phase i to match the usual closed form.
std::pair<ComplexMatrix, ComplexMatrix> collision_kraus(double phi, double alpha,
                                                        double beta, int n_levels) {
  const ComplexMatrix a = annihilation(n_levels);
  const ComplexMatrix idf = ComplexMatrix::Identity(n_levels, n_levels);
  const ComplexMatrix gen = kron(a, sigma_plus()) + kron(a.adjoint(), sigma_minus());
  const ComplexMatrix u = matrix_exp(Complex(0.0, -phi) * gen);
  // Joint index (field n, atom s): row = 2 n + s with s = 0 for |e>.
  ComplexMatrix k_e = ComplexMatrix::Zero(n_levels, n_levels);
  ComplexMatrix k_g = ComplexMatrix::Zero(n_levels, n_levels);
  for (int mrow = 0; mrow < n_levels; ++mrow) {
    for (int ncol = 0; ncol < n_levels; ++ncol) {
      k_e(mrow, ncol) = alpha * u(2 * mrow, 2 * ncol) + beta * u(2 * mrow, 2 * ncol + 1);
      k_g(mrow, ncol) =
          alpha * u(2 * mrow + 1, 2 * ncol) + beta * u(2 * mrow + 1, 2 * ncol + 1);
    }
  }
  return {k_e, Complex(0.0, 1.0) * k_g};
}

}  // namespace

std::pair<ComplexMatrix, ComplexMatrix> micromaser_kraus_closed_form(
    double g, double tau_int, double theta_atom, int n_levels) {
  const double phi = g * tau_int;
  const double alpha = std::cos(theta_atom);
  const double beta = std::sin(theta_atom);
  const ComplexMatrix a = annihilation(n_levels);
  const ComplexMatrix num_plus_one =
      a.adjoint() * a + ComplexMatrix::Identity(n_levels, n_levels);
  const ComplexMatrix number = a.adjoint() * a;
  const auto cosf = [phi](double x) { return Complex(std::cos(phi * std::sqrt(x)), 0.0); };
  const ComplexMatrix cos_s = operator_function(num_plus_one, cosf);
  const ComplexMatrix sin_s_inv = operator_function(num_plus_one, sin_sqrt_over_sqrt(phi));
  const ComplexMatrix cos_s_tilde = operator_function(number, cosf);
  ComplexMatrix l_ae = alpha * cos_s - Complex(0.0, 1.0) * beta * sin_s_inv * a;
  ComplexMatrix l_ag = alpha * a.adjoint() * sin_s_inv + Complex(0.0, 1.0) * beta * cos_s_tilde;
  return {l_ae, l_ag};
}

LindbladModel micromaser(double g, double tau_int, double theta_atom,
                         double gamma, double nbar_th, int n_levels,
                         std::vector<std::string> params) {
  if (n_levels < 2) throw ConfigError("micromaser: need at least 2 Fock levels");
  if (gamma <= 0) throw ConfigError("micromaser: gamma must be positive");
  if (nbar_th < 0) throw ConfigError("micromaser: nbar_th must be nonnegative");
  ParamBinder bind({{"g", g},
                    {"tau_int", tau_int},
                    {"theta_atom", theta_atom},
                    {"gamma", gamma},
                    {"nbar_th", nbar_th}},
                   params);
  LindbladModel m;
  m.dim = n_levels;
  m.name = "micromaser";
  m.param_names = bind.names();
  m.theta = bind.theta0();
  m.hamiltonian_at = [n_levels](const RealVector&) {
    return ComplexMatrix(ComplexMatrix::Zero(n_levels, n_levels));
  };
  m.channels.push_back({"a_e",
                        [bind, n_levels](const RealVector& th) {
                          const auto v = bind.resolve(th);
                          return collision_kraus(v.at("g") * v.at("tau_int"),
                                                 std::cos(v.at("theta_atom")),
                                                 std::sin(v.at("theta_atom")), n_levels)
                              .first;
                        },
                        1.0, true});
  m.channels.push_back({"a_g",
                        [bind, n_levels](const RealVector& th) {
                          const auto v = bind.resolve(th);
                          return collision_kraus(v.at("g") * v.at("tau_int"),
                                                 std::cos(v.at("theta_atom")),
                                                 std::sin(v.at("theta_atom")), n_levels)
                              .second;
                        },
                        1.0, true});
  m.channels.push_back({"p_i",
                        [bind, n_levels](const RealVector& th) {
                          const auto v = bind.resolve(th);
                          return ComplexMatrix(
                              std::sqrt(v.at("gamma") * v.at("nbar_th")) *
                              annihilation(n_levels).adjoint());
                        },
                        1.0, true});
  m.channels.push_back({"p_o",
                        [bind, n_levels](const RealVector& th) {
                          const auto v = bind.resolve(th);
                          return ComplexMatrix(
                              std::sqrt(v.at("gamma") * (v.at("nbar_th") + 1.0)) *
                              annihilation(n_levels));
                        },
                        1.0, true});
  m.valid_region = [bind](const RealVector& th) {
    const auto v = bind.resolve(th);
    return v.at("gamma") > 0 && v.at("nbar_th") >= 0;
  };
  // Truncation sanity: the stationary state should barely touch the top
  // Fock level.
  try {
    const ComplexMatrix rho_ss = steady_state(assemble(m, m.theta).liouvillian);
    const double top = rho_ss(n_levels - 1, n_levels - 1).real();
    if (top > 1e-3) {
      m.notes.push_back("micromaser: top Fock level holds " + std::to_string(top) +
                        " of the stationary population; increase n_levels");
    }
  } catch (const NumericalError&) {
    m.notes.push_back("micromaser: stationary state unavailable at the build point");
  }
  return m;
}

LindbladModel build_named_model(
    const std::string& name,
    const std::vector<std::pair<std::string, double>>& settings,
    const std::vector<std::string>& params) {
  std::map<std::string, double> s(settings.begin(), settings.end());
  const auto get = [&s](const std::string& key, double fallback) {
    const auto it = s.find(key);
    return it == s.end() ? fallback : it->second;
  };
  const auto check_known = [&s](std::initializer_list<const char*> known) {
    for (const auto& kv : s) {
      bool ok = false;
      for (const char* k : known) ok = ok || kv.first == k;
      if (!ok) throw ConfigError("unknown setting '" + kv.first + "'");
    }
  };
  if (name == "qubit-thermometer") {
    check_known({"omega", "Omega", "gamma", "nbar"});
    return qubit_thermometer(get("omega", 1.0), get("Omega", 1.0), get("gamma", 1.0),
                             get("nbar", 1.0),
                             params.empty() ? std::vector<std::string>{"nbar"} : params);
  }
  if (name == "resonant-fluorescence") {
    check_known({"Omega", "Gamma"});
    return resonant_fluorescence(
        get("Omega", 1.0), get("Gamma", 1.0),
        params.empty() ? std::vector<std::string>{"Omega"} : params);
  }
  if (name == "coupled-qubits") {
    check_known({"Omega_A", "Omega_B", "omega_A", "omega_B", "g", "gamma", "nbar_th"});
    return coupled_qubits(get("Omega_A", 1.0), get("Omega_B", 1.0), get("omega_A", 0.0),
                          get("omega_B", 0.0), get("g", 0.01), get("gamma", 0.4),
                          get("nbar_th", 0.0),
                          params.empty() ? std::vector<std::string>{"gamma"} : params);
  }
  if (name == "micromaser") {
    check_known({"g", "tau_int", "theta_atom", "gamma", "nbar_th", "n_levels"});
    return micromaser(get("g", 1.0), get("tau_int", 1.0), get("theta_atom", 0.0),
                      get("gamma", 0.1), get("nbar_th", 0.1),
                      static_cast<int>(get("n_levels", 5)),
                      params.empty() ? std::vector<std::string>{"g"} : params);
  }
  throw ConfigError("unknown model '" + name + "'");
}

}  // namespace jumpfisher
