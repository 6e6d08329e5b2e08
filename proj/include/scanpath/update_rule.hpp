#pragma once

#include <scanpath/types.hpp>

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>

namespace scanpath {

/// How the cluster budget changes with depth when dynamic clustering is on.
enum class UpdateRule { constant, halving, linear_decay };

inline std::string_view to_string(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::constant: return "constant";
    case UpdateRule::halving: return "halving";
    case UpdateRule::linear_decay: return "linear_decay";
  }
  return "constant";
}

inline UpdateRule parse_update_rule(std::string_view name) {
  if (name == "constant") return UpdateRule::constant;
  if (name == "halving") return UpdateRule::halving;
  if (name == "linear_decay") return UpdateRule::linear_decay;
  throw ConfigError("unknown update rule '" + std::string(name) +
                    "' (expected constant|halving|linear_decay)");
}

/// Budget at `level` (1-based) derived from the level-1 budget. Never below 1.
inline std::size_t apply_update_rule(UpdateRule rule, std::size_t num_clusters, int level) {
  if (num_clusters < 1) throw ArgumentError("apply_update_rule: num_clusters must be >= 1");
  if (level < 1) throw ArgumentError("apply_update_rule: level must be >= 1");
  const auto steps = static_cast<std::size_t>(level - 1);
  switch (rule) {
    case UpdateRule::constant:
      return num_clusters;
    case UpdateRule::halving:
      return steps >= 64 ? 1 : std::max<std::size_t>(1, num_clusters >> steps);
    case UpdateRule::linear_decay:
      return num_clusters > steps ? std::max<std::size_t>(1, num_clusters - steps) : 1;
  }
  return num_clusters;
}

}  // namespace scanpath
