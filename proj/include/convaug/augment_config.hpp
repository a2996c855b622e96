// Copyright 2026 The convaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON pipeline configuration.
//
//   {
//     "global_seed": 7,
//     "ops": [
//       {"type": "color_jitter", "brightness": 0.4, "contrast": 0.4, "saturation": 0.4},
//       {"type": "lighting", "alpha_std": 0.1},
//       {"type": "random_erasing", "probability": 0.5, "area_range": [0.02, 0.33],
//        "aspect_range": [0.3, 3.3], "fill": "random"},
//       {"type": "rand_augment", "n_ops": 2, "magnitude": 9}
//     ]
//   }
//
// Omitted keys take the defaults of the corresponding spec struct. Lighting
// defaults to the ImageNet basis; "eigenvalues" (3 numbers) and
// "eigenvectors" (3 rows of 3, columns are directions) override it.
// random_erasing "fill" is "random" or {"constant": <0..255>}.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <tuple>

#include <json.hpp>

#include "convaug/augment.hpp"
#include "convaug/core/error.hpp"

namespace convaug {

class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

namespace detail {

inline double get_number(const nlohmann::json& obj, const char* key, double fallback,
                         const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

inline int get_int(const nlohmann::json& obj, const char* key, int fallback,
                   const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + ": \"" + key + "\" must be an integer");
  return v.get<int>();
}

inline std::pair<double, double> get_range(const nlohmann::json& obj, const char* key,
                                           std::pair<double, double> fallback,
                                           const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(where + ": \"" + key + "\" must be a two-number array");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

inline AugmentOp parse_op(const nlohmann::json& j, std::size_t index) {
  const std::string where = "ops[" + std::to_string(index) + "]";
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ConfigError(where + ": expected an object with a string \"type\"");
  }
  const auto type = j.at("type").get<std::string>();
  if (type == "color_jitter") {
    reject_unknown_keys(j, {"type", "brightness", "contrast", "saturation"}, where);
    ColorJitterSpec s;
    s.brightness = get_number(j, "brightness", s.brightness, where);
    s.contrast = get_number(j, "contrast", s.contrast, where);
    s.saturation = get_number(j, "saturation", s.saturation, where);
    return s;
  }
  if (type == "lighting") {
    reject_unknown_keys(j, {"type", "alpha_std", "eigenvalues", "eigenvectors"}, where);
    LightingSpec s = imagenet_lighting();
    s.alpha_std = get_number(j, "alpha_std", s.alpha_std, where);
    if (j.contains("eigenvalues")) {
      const auto& ev = j.at("eigenvalues");
      if (!ev.is_array() || ev.size() != 3) throw ConfigError(where + ": eigenvalues must have 3 entries");
      for (std::size_t i = 0; i < 3; ++i) s.eigenvalues[i] = ev[i].get<double>();
    }
    if (j.contains("eigenvectors")) {
      const auto& m = j.at("eigenvectors");
      if (!m.is_array() || m.size() != 3) throw ConfigError(where + ": eigenvectors must be 3x3");
      for (std::size_t r = 0; r < 3; ++r) {
        if (!m[r].is_array() || m[r].size() != 3) throw ConfigError(where + ": eigenvectors must be 3x3");
        for (std::size_t c = 0; c < 3; ++c) s.eigenvectors[r][c] = m[r][c].get<double>();
      }
    }
    return s;
  }
  if (type == "random_erasing") {
    reject_unknown_keys(j, {"type", "probability", "area_range", "aspect_range", "fill"}, where);
    RandomErasingSpec s;
    s.probability = get_number(j, "probability", s.probability, where);
    std::tie(s.area_low, s.area_high) = get_range(j, "area_range", {s.area_low, s.area_high}, where);
    std::tie(s.aspect_low, s.aspect_high) =
        get_range(j, "aspect_range", {s.aspect_low, s.aspect_high}, where);
    if (j.contains("fill")) {
      const auto& f = j.at("fill");
      if (f.is_string() && f.get<std::string>() == "random") {
        s.fill = RandomErasingSpec::Fill::kRandomPerPixel;
      } else if (f.is_object() && f.contains("constant") && f.at("constant").is_number_integer() &&
                 f.at("constant").get<int>() >= 0 && f.at("constant").get<int>() <= 255) {
        s.fill = RandomErasingSpec::Fill::kConstant;
        s.fill_value = static_cast<std::uint8_t>(f.at("constant").get<int>());
      } else {
        throw ConfigError(where + ": fill must be \"random\" or {\"constant\": 0..255}");
      }
    }
    return s;
  }
  if (type == "rand_augment") {
    reject_unknown_keys(j, {"type", "n_ops", "magnitude"}, where);
    RandAugmentSpec s;
    s.n_ops = get_int(j, "n_ops", s.n_ops, where);
    s.magnitude = get_int(j, "magnitude", s.magnitude, where);
    return s;
  }
  throw ConfigError(where + ": unknown operator type \"" + type + "\"");
}

}  // namespace detail

inline AugmentPipeline parse_pipeline_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
  detail::reject_unknown_keys(j, {"global_seed", "ops"}, "pipeline config");
  AugmentPipeline p;
  if (j.contains("global_seed")) {
    if (!j.at("global_seed").is_number_unsigned()) {
      throw ConfigError("global_seed must be a non-negative integer");
    }
    p.global_seed = j.at("global_seed").get<std::uint64_t>();
  }
  if (j.contains("ops")) {
    const auto& ops = j.at("ops");
    if (!ops.is_array()) throw ConfigError("\"ops\" must be an array");
    for (std::size_t i = 0; i < ops.size(); ++i) p.ops.push_back(detail::parse_op(ops[i], i));
  }
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

inline AugmentPipeline load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open augmentation config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return parse_pipeline_config(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

inline nlohmann::json lighting_to_json(const LightingSpec& s) {
  nlohmann::json j = {{"type", "lighting"}, {"alpha_std", s.alpha_std}};
  j["eigenvalues"] = s.eigenvalues;
  j["eigenvectors"] = s.eigenvectors;
  return j;
}

}  // namespace convaug
