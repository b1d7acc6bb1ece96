#pragma once

#include <array>
#include <string>

#include "draec/error.hpp"

namespace draec {

enum class Estimator { kalman, rls };
enum class Topology { joint, aec_then_dr, dr_then_aec };

struct AlgorithmVariant {
  Estimator estimator = Estimator::kalman;
  Topology topology = Topology::joint;

  bool operator==(const AlgorithmVariant&) const = default;
};

inline constexpr std::array<AlgorithmVariant, 6> kAllVariants = {{
    {Estimator::kalman, Topology::joint},
    {Estimator::kalman, Topology::aec_then_dr},
    {Estimator::kalman, Topology::dr_then_aec},
    {Estimator::rls, Topology::joint},
    {Estimator::rls, Topology::aec_then_dr},
    {Estimator::rls, Topology::dr_then_aec},
}};

inline std::string variant_name(AlgorithmVariant v) {
  std::string s = v.estimator == Estimator::kalman ? "kalman" : "rls";
  switch (v.topology) {
    case Topology::joint: return s + "-joint";
    case Topology::aec_then_dr: return s + "-aec-dr";
    case Topology::dr_then_aec: return s + "-dr-aec";
  }
  return s;
}

inline AlgorithmVariant parse_variant(const std::string& name) {
  for (const auto& v : kAllVariants)
    if (variant_name(v) == name) return v;
  throw ConfigError("unknown variant '" + name +
                    "' (expected one of kalman-joint, kalman-aec-dr, kalman-dr-aec, "
                    "rls-joint, rls-aec-dr, rls-dr-aec)");
}

}  // namespace draec
