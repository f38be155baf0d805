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

#include <string>

#include <json.hpp>

#include "jumpfisher/models.hpp"

namespace jumpfisher {

/// Build a model from a JSON description. Two shapes are accepted:
///
///   {"model": "<builtin name>", "params": {...}, "estimate": ["nbar"]}
///
///   {"model": "custom", "dim": d,
///    "hamiltonian": <matrix>,
///    "channels": [{"label": "...", "matrix": <matrix>,
///                  "efficiency": 1.0, "monitored": true}, ...],
///    "theta": {"name": "theta", "value": v, "dtheta": dv}}
///
/// A <matrix> is a row-major array of rows of [re, im] pairs. Custom
/// matrices are theta-independent unless written as a displacement triple
/// {"base": <matrix>, "dtheta_plus": <matrix>, "dtheta_minus": <matrix>},
/// in which case the family is defined exactly at value and value +-
/// dtheta (the hook central differences consume).
LindbladModel model_from_json(const nlohmann::json& j);

LindbladModel load_model_config(const std::string& path);

/// Matrix -> JSON in the format above (round-trips with the parser).
nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

}  // namespace jumpfisher
