#include "colosim/sweep.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "colosim/config.hpp"
#include "colosim/errors.hpp"

namespace colosim {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<long long> parse_integer(std::string_view s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

json parse_scalar(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  if (s == "null") return nullptr;
  if (auto i = parse_integer(s)) return *i;
  try {
    std::size_t used = 0;
    const double d = std::stod(std::string(s), &used);
    if (used == s.size()) return d;
  } catch (const std::exception&) {
  }
  return std::string(s);
}

json::json_pointer pointer_for(const std::string& path) {
  std::string ptr;
  for (auto part : split(path, '.')) {
    if (part.empty()) throw ConfigError(fmt::format("malformed parameter path '{}'", path));
    ptr += '/';
    ptr += part;
  }
  return json::json_pointer(ptr);
}

std::string cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string metric(const std::optional<double>& v) {
  return v ? fmt::format("{:.6f}", *v) : std::string("NA");
}

}  // namespace

Grid parse_grid(std::string_view text) {
  Grid grid;
  std::set<std::string> seen;
  if (trim(text).empty()) return grid;
  for (auto raw : split(text, ';')) {
    auto item = trim(raw);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("grid entry '{}' is not of the form path=values", item));
    }
    GridAxis axis;
    axis.path = std::string(trim(item.substr(0, eq)));
    const auto values = trim(item.substr(eq + 1));
    if (axis.path.empty() || values.empty()) {
      throw ConfigError(fmt::format("grid entry '{}' is missing a path or values", item));
    }
    if (!seen.insert(axis.path).second) {
      throw ConfigError(fmt::format("grid parameter '{}' given twice", axis.path));
    }
    for (auto v : split(values, ',')) {
      v = trim(v);
      if (v.empty()) throw ConfigError(fmt::format("empty value in grid entry '{}'", item));
      if (const auto dots = v.find(".."); dots != std::string_view::npos) {
        auto lo = parse_integer(trim(v.substr(0, dots)));
        auto hi = parse_integer(trim(v.substr(dots + 2)));
        if (!lo || !hi || *hi < *lo) {
          throw ConfigError(fmt::format("bad integer range '{}' in grid entry '{}'", v, item));
        }
        for (long long i = *lo; i <= *hi; ++i) axis.values.emplace_back(i);
      } else {
        axis.values.push_back(parse_scalar(v));
      }
    }
    grid.push_back(std::move(axis));
  }
  return grid;
}

std::vector<SweepPoint> sweep(const json& base_config, const Grid& grid, int jobs) {
  const ExperimentConfig base = parse_config(base_config);
  json canonical = to_json(base);
  for (const auto& axis : grid) {
    if (axis.path.rfind("migration.", 0) == 0 && canonical["migration"].is_null()) {
      ExperimentConfig with_migration;
      with_migration.migration = MigrationConfig{};
      canonical["migration"] = to_json(with_migration)["migration"];
    }
  }

  bool seed_axis = false;
  std::vector<json::json_pointer> pointers;
  for (const auto& axis : grid) {
    auto ptr = pointer_for(axis.path);
    if (!canonical.contains(ptr)) throw ConfigError(fmt::format("unknown parameter '{}'", axis.path));
    if (axis.path == "seed") seed_axis = true;
    pointers.push_back(std::move(ptr));
  }

  std::size_t total = 1;
  for (const auto& axis : grid) total *= axis.values.size();

  // Materialize and validate every point before running anything.
  std::vector<SweepPoint> points(total);
  std::vector<ExperimentConfig> configs;
  configs.reserve(total);
  for (std::size_t index = 0; index < total; ++index) {
    json point_config = canonical;
    SweepPoint& point = points[index];
    point.index = index;
    std::size_t rem = index;
    std::vector<std::size_t> choice(grid.size());
    for (std::size_t a = grid.size(); a-- > 0;) {
      choice[a] = rem % grid[a].values.size();
      rem /= grid[a].values.size();
    }
    for (std::size_t a = 0; a < grid.size(); ++a) {
      const json& value = grid[a].values[choice[a]];
      point_config[pointers[a]] = value;
      point.params.emplace_back(grid[a].path, value);
    }
    if (!seed_axis) point_config["seed"] = derive_seed(base.seed, index);
    configs.push_back(parse_config(point_config));
    point.seed = configs.back().seed;
  }

  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        points[i].result = run(configs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || total == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, total); ++w) pool.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return points;
}

std::string results_csv(const Grid& grid, const std::vector<SweepPoint>& points) {
  std::string out = "point";
  for (const auto& axis : grid) out += "," + axis.path;
  out += ",seed,colocation_rate,affinity_satisfaction,mean_violated_specs,rejection_rate,"
         "attacks_total,attacks_successful\n";
  for (const auto& p : points) {
    out += std::to_string(p.index);
    for (const auto& [path, value] : p.params) out += "," + cell(value);
    const auto& r = p.result;
    out += fmt::format(",{},{},{},{},{:.6f},{},{}\n", p.seed, metric(r.colocation_rate),
                       metric(r.affinity_satisfaction), metric(r.mean_violated_specs),
                       r.rejection_rate, r.attacks_total, r.attacks_successful);
  }
  return out;
}

}  // namespace colosim
