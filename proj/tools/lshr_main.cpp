// lshr: run level-set and Gibbs sampling experiments from JSON configs.
//
//   lshr run <config> [--seed N] [--out DIR] [--m N] [--iterations N] [--burnin N] [--rho R] [--dim D]
//   lshr compare <configA> <configB> --reference <id> [--out DIR]
//   lshr oracle <study> -d <dim> [--rho R] [--out DIR]
//
// Output directories default to the config's output_dir (or a name derived
// from study, sampler, dimension and seed) under $LSHR_OUTPUT_ROOT.
//
// Exit codes: 0 success, 2 invalid config or arguments, 3 sampler error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lshr/errors.hpp"
#include "lshr/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSampler = 3;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> m;
  std::optional<std::int64_t> iterations;
  std::optional<std::int64_t> burnin;
  std::optional<double> rho;
  std::optional<int> dim;
};

void apply(const Overrides& o, lshr::ExperimentConfig& c) {
  if (o.seed) c.seed = *o.seed;
  if (o.m) c.m = *o.m;
  if (o.dim) c.dimension = *o.dim;
  if (o.rho) {
    if (c.study != lshr::Study::kMvn) throw lshr::ConfigError("rho", "only valid for study mvn");
    c.rho = *o.rho;
  }
  if (o.iterations) {
    c.iterations = *o.iterations;
    if (!o.burnin) c.burn_in = lshr::default_burn_in(c.study, c.sampler, c.iterations);
  }
  if (o.burnin) c.burn_in = *o.burnin;
  lshr::validate_config(c);
}

int report(const lshr::Error& e) {
  if (const auto* ce = dynamic_cast<const lshr::ConfigError*>(&e)) {
    std::cerr << "error: invalid config: " << ce->what() << '\n';
    return kExitConfig;
  }
  nlohmann::json j{{"error", e.kind()}, {"message", e.what()}};
  std::cerr << j.dump() << '\n';
  return kExitSampler;
}

lshr::ExperimentConfig oracle_config(const std::string& study, int dim, std::optional<double> rho) {
  // Pick a sampler valid for the study so the config validates.
  const char* sampler = study == "cauchy-normal" ? "lshr2" : "lshr1";
  nlohmann::json j{{"study", study}, {"sampler", sampler}, {"dimension", dim}, {"seed", 0}};
  if (rho) j["model"] = {{"rho", *rho}};
  return lshr::parse_config(j.dump());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Level-set hit-and-run and Gibbs sampling experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lshr::library_version());

  Overrides ov;
  std::string out;

  auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
  std::string config_path;
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--seed", ov.seed, "Master seed");
  run->add_option("--out", out, "Output directory");
  run->add_option("--m", ov.m, "Hit-and-run steps per level");
  run->add_option("--iterations", ov.iterations, "Chain length (gibbs) or subsample size (lshr)");
  run->add_option("--burnin", ov.burnin, "Burn-in iterations (gibbs)");
  run->add_option("--rho", ov.rho, "Equicorrelation (mvn)");
  run->add_option("--dim", ov.dim, "Dimension");

  auto* compare = app.add_subcommand("compare", "Compare two finished runs against a reference");
  std::string config_a;
  std::string config_b;
  std::string reference;
  compare->add_option("configA", config_a, "Config of the first run")->required();
  compare->add_option("configB", config_b, "Config of the second run")->required();
  compare->add_option("--reference", reference, "spike-slab, normal, cone or cauchy-normal")->required();
  compare->add_option("--out", out, "Report directory");
  std::string dir_a;
  std::string dir_b;
  compare->add_option("--dir-a", dir_a, "Output directory of run A (default: resolved from config)");
  compare->add_option("--dir-b", dir_b, "Output directory of run B (default: resolved from config)");

  auto* oracle = app.add_subcommand("oracle", "Write reference tables for a study");
  std::string study;
  int oracle_dim = 0;
  oracle->add_option("study", study, "spike-slab, mvn, cauchy-normal or custom-cone")->required();
  oracle->add_option("-d,--dim", oracle_dim, "Dimension")->required();
  oracle->add_option("--rho", ov.rho, "Equicorrelation (mvn)");
  oracle->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  const std::optional<std::string> cli_out = out.empty() ? std::nullopt : std::optional<std::string>(out);

  try {
    if (*run) {
      lshr::ExperimentConfig config = lshr::load_config(config_path);
      apply(ov, config);
      const auto dir = lshr::resolve_output_dir(config, cli_out);
      const auto manifest = lshr::run_experiment(config, dir);
      std::printf("wrote %s (%.2f s)\n", dir.string().c_str(), manifest.duration_seconds);
    } else if (*compare) {
      const auto a = lshr::load_config(config_a);
      const auto b = lshr::load_config(config_b);
      const auto da = dir_a.empty() ? lshr::resolve_output_dir(a, std::nullopt) : std::filesystem::path(dir_a);
      const auto db = dir_b.empty() ? lshr::resolve_output_dir(b, std::nullopt) : std::filesystem::path(dir_b);
      std::filesystem::path dest;
      if (cli_out) {
        dest = *cli_out;
      } else {
        lshr::ExperimentConfig named = a;
        named.output_dir = "compare-" + da.filename().string() + "-vs-" + db.filename().string();
        dest = lshr::resolve_output_dir(named, std::nullopt);
      }
      const auto result = lshr::compare_runs(a, da, b, db, reference, dest);
      std::printf("%s ks=%.4f\n%s ks=%.4f\nwrote %s\n", result.a.label.c_str(), result.a.ks,
                  result.b.label.c_str(), result.b.ks, dest.string().c_str());
    } else if (*oracle) {
      auto config = oracle_config(study, oracle_dim, ov.rho);
      config.output_dir = "oracle-" + study + "-d" + std::to_string(oracle_dim);
      const auto dir = lshr::resolve_output_dir(config, cli_out);
      for (const auto& p : lshr::write_oracle_tables(config, dir)) std::printf("wrote %s\n", p.string().c_str());
    }
  } catch (const lshr::Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    nlohmann::json j{{"error", "internal"}, {"message", e.what()}};
    std::cerr << j.dump() << '\n';
    return kExitSampler;
  }
  return 0;
}
