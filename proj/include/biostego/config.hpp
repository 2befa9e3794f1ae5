#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <json.hpp>

#include "biostego/enhancement.hpp"
#include "biostego/error.hpp"
#include "biostego/matching.hpp"
#include "biostego/minutiae.hpp"
#include "biostego/segmentation.hpp"

namespace biostego {

/// Every tunable of the extraction and matching pipeline.
struct PipelineConfig {
  double k = kDefaultFftExponent;
  int fft_block = kDefaultFftBlock;
  int binarize_block = kDefaultBinarizeBlock;
  int direction_W = kDefaultDirectionBlock;
  /// Foreground iff E >= E_threshold / W^2 (fraction of perfect coherence).
  double E_threshold = kDefaultCertaintyCoefficient;
  int roi_radius = kDefaultDirectionBlock;
  int spur_iterations = kDefaultSpurIterations;
  int border_margin = kDefaultBorderMargin;
  double broken_ridge_angle = kDefaultBrokenRidgeAngle;
  double r0 = 10.0;
  double theta0 = std::numbers::pi / 6.0;
  double similarity_threshold = 0.8;
  int decision_threshold = 25;
  int min_minutiae = 4;

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw Error(ErrorCode::InvalidConfig, what);
    };
    require(k >= 0.0 && std::isfinite(k), "k must be >= 0");
    require(fft_block >= 1, "fft_block must be >= 1");
    require(binarize_block >= 1, "binarize_block must be >= 1");
    require(direction_W >= 2, "direction_W must be >= 2");
    require(E_threshold > 0.0, "E_threshold must be > 0");
    require(roi_radius >= 0, "roi_radius must be >= 0");
    require(spur_iterations >= 0, "spur_iterations must be >= 0");
    require(border_margin >= 0, "border_margin must be >= 0");
    require(broken_ridge_angle > 0.0, "broken_ridge_angle must be > 0");
    require(r0 > 0.0, "r0 must be > 0");
    require(theta0 > 0.0, "theta0 must be > 0");
    require(similarity_threshold > 0.0 && similarity_threshold <= 1.0, "similarity_threshold must be in (0, 1]");
    require(decision_threshold > 0 && decision_threshold <= 100, "decision_threshold must be in 1..100");
    require(min_minutiae >= 1, "min_minutiae must be >= 1");
  }

  MatchConfig match_config() const { return {r0, theta0, similarity_threshold, decision_threshold}; }
};

#define BIOSTEGO_CONFIG_FIELDS(X) \
  X(k) X(fft_block) X(binarize_block) X(direction_W) X(E_threshold) X(roi_radius) X(spur_iterations) \
  X(border_margin) X(broken_ridge_angle) X(r0) X(theta0) X(similarity_threshold) X(decision_threshold) \
  X(min_minutiae)

inline nlohmann::json to_json(const PipelineConfig& c) {
  nlohmann::json j;
#define X(name) j[#name] = c.name;
  BIOSTEGO_CONFIG_FIELDS(X)
#undef X
  return j;
}

/// Sets one knob from its textual value; unknown names are rejected.
inline void apply_override(PipelineConfig& c, const std::string& name, const std::string& value) {
  try {
#define X(field)                                                                  \
  if (name == #field) {                                                           \
    using T = decltype(c.field);                                                  \
    std::size_t used = 0;                                                         \
    if constexpr (std::is_same_v<T, int>) c.field = std::stoi(value, &used);      \
    else c.field = std::stod(value, &used);                                       \
    if (used != value.size()) throw std::invalid_argument(value);                 \
    return;                                                                       \
  }
    BIOSTEGO_CONFIG_FIELDS(X)
#undef X
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidConfig, "bad value '" + value + "' for " + name);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown setting '" + name + "'");
}

inline PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig base = {}) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number()) throw Error(ErrorCode::InvalidConfig, "setting '" + key + "' must be a number");
    apply_override(base, key, value.dump());
  }
  base.validate();
  return base;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config parse error: ") + e.what());
  }
}

#undef BIOSTEGO_CONFIG_FIELDS

}  // namespace biostego
