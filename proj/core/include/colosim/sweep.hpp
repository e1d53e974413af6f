#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "colosim/experiment.hpp"

namespace colosim {

struct GridAxis {
  std::string path;  // dotted config path, e.g. "attack.k"
  std::vector<nlohmann::json> values;
};

using Grid = std::vector<GridAxis>;

// "attack.k=1..10;attack.spreading=true,false". Integer ranges a..b are
// inclusive. An empty string is the empty grid.
Grid parse_grid(std::string_view text);

struct SweepPoint {
  std::size_t index = 0;
  std::vector<std::pair<std::string, nlohmann::json>> params;
  std::uint64_t seed = 0;
  ExperimentResult result;
};

// Cartesian product with the first axis varying slowest. Each point runs with
// seed derive_seed(base seed, index) unless the grid has a "seed" axis, whose
// values are then used verbatim. Unknown paths throw ConfigError before
// anything runs. Results are ordered by index regardless of `jobs`.
std::vector<SweepPoint> sweep(const nlohmann::json& base_config, const Grid& grid,
                              int jobs = 1);

std::string results_csv(const Grid& grid, const std::vector<SweepPoint>& points);

}  // namespace colosim
