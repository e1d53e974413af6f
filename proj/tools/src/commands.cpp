#include "colosim_cli/commands.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "colosim/attack.hpp"
#include "colosim/config.hpp"
#include "colosim/errors.hpp"
#include "colosim/experiment.hpp"
#include "colosim/manifest.hpp"
#include "colosim/sweep.hpp"

namespace colosim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    body();
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
  } catch (const ExportError& e) {
    err << "export error: " << e.what() << "\n";
  } catch (const SamplingError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const CapacityError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const InvariantError& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kExitInternal;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << contents;
  if (!out.flush()) throw ConfigError(fmt::format("failed writing '{}'", path.string()));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void prepare_dir(const fs::path& dir) {
  if (dir.empty()) throw ConfigError("--out is required");
  fs::create_directories(dir);
}

// Seed precedence: explicit flag, then the config file, then COLOSIM_SEED.
void apply_seed(json& config, const std::optional<std::uint64_t>& flag) {
  if (flag) {
    config["seed"] = *flag;
  } else if (!config.contains("seed")) {
    if (auto env = seed_from_env()) config["seed"] = *env;
  }
}

}  // namespace

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("COLOSIM_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const auto v = std::strtoull(raw, &end, 10);
  if (errno != 0 || *end != '\0' || raw[0] == '-') {
    throw ConfigError(fmt::format("COLOSIM_SEED='{}' is not an unsigned integer", raw));
  }
  return v;
}

int cmd_run(const RunOptions& options, std::ostream& err) {
  return guarded(err, [&] {
    json raw = read_config_file(options.config);
    if (!raw.is_object()) throw ConfigError("config must be a JSON object");
    apply_seed(raw, options.seed);
    ExperimentConfig config = parse_config(raw);
    config.collect_audit = true;
    prepare_dir(options.out);

    SweepPoint point;
    point.seed = config.seed;
    point.result = run(config);

    json summary = summary_json(point.result);
    summary["seed"] = config.seed;
    summary["config"] = to_json(config);
    write_file(options.out / "summary.json", summary.dump(2) + "\n");
    write_file(options.out / "results.csv", results_csv({}, {point}));

    std::string audit;
    for (const auto& record : point.result.audit) audit += to_json(record).dump() + "\n";
    write_file(options.out / "audit.jsonl", audit);
  });
}

int cmd_sweep(const SweepOptions& options, std::ostream& err) {
  return guarded(err, [&] {
    json raw = read_config_file(options.config);
    if (!raw.is_object()) throw ConfigError("config must be a JSON object");
    apply_seed(raw, std::nullopt);
    const Grid grid = parse_grid(options.grid);
    if (options.jobs < 1) throw ConfigError("--jobs must be at least 1");
    const auto points = sweep(raw, grid, options.jobs);
    prepare_dir(options.out);

    write_file(options.out / "results.csv", results_csv(grid, points));
    json summary = json::array();
    for (const auto& p : points) {
      json entry = summary_json(p.result);
      entry["point"] = p.index;
      entry["seed"] = p.seed;
      json params = json::object();
      for (const auto& [path, value] : p.params) params[path] = value;
      entry["params"] = std::move(params);
      summary.push_back(std::move(entry));
    }
    write_file(options.out / "summary.json", summary.dump(2) + "\n");
  });
}

int cmd_attack_gen(const AttackGenOptions& options, std::ostream& err) {
  return guarded(err, [&] {
    AttackConfig attack;
    attack.instance_count = options.k;
    attack.use_spreading_label = options.spread;
    attack.replication_noise = options.noise;
    validate(attack);

    const std::string document = read_file(options.victim);
    LabelUniverse universe;
    const LabelKey kappa =
        universe.add_key(ClusterGenConfig{}.spreading_key, LabelKind::spreading, {});
    const AppSpec victim = parse_pod_manifest(document, universe);

    std::optional<std::uint64_t> seed = options.seed;
    if (!seed) seed = seed_from_env();
    Rng rng(seed.value_or(1));
    const SpreadingLabel spreading{kappa, universe.intern_value(kappa, "nu-0")};
    auto specs = repttack_specs(victim, attack, spreading, rng);

    prepare_dir(options.out);
    const fs::path dir = options.out / "manifests";
    fs::create_directories(dir);
    for (std::size_t i = 0; i < specs.size(); ++i) {
      specs[i].id = InstanceId{i + 1};
      specs[i].submit_slot = victim.submit_slot;
      write_file(dir / fmt::format("attack-{}.yaml", i + 1), to_pod_manifest(specs[i], universe));
    }
  });
}

}  // namespace colosim::cli
