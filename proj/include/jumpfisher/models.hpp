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

#pragma once

#include "jumpfisher/model.hpp"

namespace jumpfisher {

// Elementary operators. Qubit basis: |e> = (1,0), |g> = (0,1).
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix sigma_plus();   // |e><g|
ComplexMatrix sigma_minus();  // |g><e|
ComplexMatrix annihilation(int n_levels);

/// The scalar map x -> sin(c sqrt(x)) / sqrt(x), continued to its limit
/// c at x = 0. This is the combination in which an inverse square-root
/// number operator enters the collision operators below; the combined
/// function stays finite on the vacuum.
std::function<Complex(double)> sin_sqrt_over_sqrt(double c);

/// Qubit in a thermal bath, H = (omega/2) sz + (Omega/2) sx, with both
/// the excitation channel "+" (rate gamma*nbar) and the decay channel
/// "-" (rate gamma*(nbar+1)) monitored. `params` selects which of
/// {omega, Omega, gamma, nbar} form the estimation vector (default
/// {nbar}); the rest stay fixed at the given values.
LindbladModel qubit_thermometer(double omega, double Omega, double gamma,
                                double nbar,
                                std::vector<std::string> params = {"nbar"});

/// Driven qubit with only the emission channel "-" observed
/// (H = (Omega/2) sx, L = sqrt(Gamma) sigma_minus). Default estimation
/// parameter: Omega.
LindbladModel resonant_fluorescence(double Omega, double Gamma,
                                    std::vector<std::string> params = {"Omega"});

/// Two exchange-coupled driven qubits; only qubit B emits into the bath
/// (channel "-B"). Setting nbar_th > 0 adds the thermal absorption
/// channel "+B" and scales emission to gamma*(nbar_th+1); the default
/// nbar_th = 0 leaves exactly the single emission operator sqrt(gamma)
/// sigma_minus^B. Default estimation parameter: gamma. Tensor order:
/// qubit A (x) qubit B.
LindbladModel coupled_qubits(double Omega_A, double Omega_B, double omega_A,
                             double omega_B, double g, double gamma,
                             double nbar_th = 0.0,
                             std::vector<std::string> params = {"gamma"});

/// Single-atom maser: a cavity mode truncated to `n_levels` Fock states,
/// crossed by two-level atoms prepared in cos(theta_atom)|e> +
/// sin(theta_atom)|g> that are measured in the energy basis on exit
/// (channels "a_e", "a_g"), plus thermal photon exchange with the
/// environment ("p_i", "p_o"). The atomic channels are the Kraus pair of
/// the exchange unitary exp(-i g tau (a sp + a^dag sm)), exponentiated on
/// the truncated joint space so the pair resolves the identity exactly at
/// any truncation; the collision itself is absorbed there and the system
/// Hamiltonian is zero. Default estimation parameter: g.
LindbladModel micromaser(double g, double tau_int, double theta_atom,
                         double gamma, double nbar_th, int n_levels = 5,
                         std::vector<std::string> params = {"g"});

/// Closed-form collision operators cos(g tau s), a^dag sin(g tau s)/s
/// etc. (s = sqrt(a^dag a + 1)), built from truncated mode operators.
/// They coincide with the micromaser builder's pair away from the top
/// Fock level, where truncating inside the functions breaks completeness;
/// kept for cross-checks.
std::pair<ComplexMatrix, ComplexMatrix> micromaser_kraus_closed_form(
    double g, double tau_int, double theta_atom, int n_levels);

/// Look up a builder by name with parameters given as key/value pairs.
/// Known names: qubit-thermometer, resonant-fluorescence, coupled-qubits,
/// micromaser.
LindbladModel build_named_model(
    const std::string& name,
    const std::vector<std::pair<std::string, double>>& settings,
    const std::vector<std::string>& params = {});

}  // namespace jumpfisher
