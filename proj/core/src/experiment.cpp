#include "lshr/experiment.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "lshr/diagnostics.hpp"
#include "lshr/errors.hpp"
#include "lshr/gibbs.hpp"
#include "lshr/reference.hpp"

#ifndef LSHR_VERSION
#define LSHR_VERSION "0.0.0"
#endif

namespace lshr {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kAcfLags = 20;
constexpr int kTvBins = 100;
constexpr double kTvLo = -10.0;
constexpr double kTvHi = 25.0;
constexpr std::int64_t kReferenceDraws = 200000;

// Stream ids for derive_seed.
constexpr std::uint64_t kSamplerStream = 0;
constexpr std::uint64_t kSubsampleStream = 1;
constexpr std::uint64_t kReferenceStream = 2;

// ---------------------------------------------------------------------------
// enum <-> string

struct StudyName {
  Study study;
  const char* name;
};
constexpr StudyName kStudies[] = {{Study::kSpikeSlab, "spike-slab"},
                                  {Study::kMvn, "mvn"},
                                  {Study::kCauchyNormal, "cauchy-normal"},
                                  {Study::kCustomCone, "custom-cone"}};

struct SamplerName {
  SamplerChoice sampler;
  const char* name;
};
constexpr SamplerName kSamplers[] = {{SamplerChoice::kLshr1, "lshr1"},
                                     {SamplerChoice::kLshr2, "lshr2"},
                                     {SamplerChoice::kGibbs, "gibbs"}};

Study parse_study(const std::string& s) {
  for (const auto& e : kStudies) {
    if (s == e.name) return e.study;
  }
  throw ConfigError("study", "unknown study '" + s + "' (spike-slab, mvn, cauchy-normal, custom-cone)");
}

SamplerChoice parse_sampler(const std::string& s) {
  for (const auto& e : kSamplers) {
    if (s == e.name) return e.sampler;
  }
  throw ConfigError("sampler", "unknown sampler '" + s + "' (lshr1, lshr2, gibbs)");
}

const char* stop_rule_name(StopBound::Rule rule) {
  switch (rule) {
    case StopBound::Rule::kPerDimension: return "per-dimension";
    case StopBound::Rule::kRelative: return "relative";
    case StopBound::Rule::kAbsoluteLog: return "absolute-log";
  }
  return "per-dimension";
}

StopBound::Rule parse_stop_rule(const std::string& s) {
  if (s == "per-dimension") return StopBound::Rule::kPerDimension;
  if (s == "relative") return StopBound::Rule::kRelative;
  if (s == "absolute-log") return StopBound::Rule::kAbsoluteLog;
  throw ConfigError("stop.rule", "unknown rule '" + s + "' (per-dimension, relative, absolute-log)");
}

// ---------------------------------------------------------------------------
// typed field access with field-level errors

template <typename T>
T get_field(const json& obj, const std::string& key, const std::string& path) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path, "missing or has the wrong type");
  }
}

double get_number(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.at(key).is_number()) throw ConfigError(path, "must be a number");
  return obj.at(key).get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(path, "must be an integer");
  return v.get<std::int64_t>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& prefix) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(prefix + key, "unknown field");
  }
}

// ---------------------------------------------------------------------------
// I/O helpers

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("path", "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_samples_csv(const fs::path& path, const Matrix& draws, const std::vector<int>& tags,
                       const std::string& tag_name) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (Eigen::Index j = 0; j < draws.cols(); ++j) {
    out << (j ? "," : "") << "theta_" << (j + 1);
  }
  const bool tagged = !tags.empty();
  if (tagged) out << ',' << tag_name;
  out << '\n';
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    for (Eigen::Index j = 0; j < draws.cols(); ++j) {
      out << (j ? "," : "") << format_double(draws(i, j));
    }
    if (tagged) out << ',' << tags[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

std::vector<double> column(const Matrix& m, Eigen::Index j) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, j);
  return out;
}

std::vector<double> row_norms(const Matrix& m) {
  std::vector<double> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m.row(i).norm();
  return out;
}

SpikeSlabParams spike_slab_params(const ExperimentConfig& c) {
  SpikeSlabParams p;
  p.dimension = c.dimension;
  p.spike_sd = c.spike_sd;
  p.slab_sd = c.slab_sd;
  if (c.scale_reading == ScaleReading::kVariance) {
    p.spike_sd = std::sqrt(c.spike_sd);
    p.slab_sd = std::sqrt(c.slab_sd);
  }
  return p;
}

// Reference law for the statistic a study reports (theta_1, or |x| for the cone).
struct StudyReference {
  ReferenceDistribution distribution;
  bool radial = false;
  std::string id;
};

StudyReference reference_for(const ExperimentConfig& c, const std::string& id) {
  if (id == "spike-slab") {
    if (c.study != Study::kSpikeSlab) throw ConfigError("reference", "spike-slab reference needs a spike-slab run");
    return {spike_slab_reference(spike_slab_params(c)), false, id};
  }
  if (id == "normal") return {standard_normal_reference(), false, id};
  if (id == "cone") {
    if (c.study != Study::kCustomCone) throw ConfigError("reference", "cone reference needs a custom-cone run");
    return {cone_radial_reference(Cone(c.dimension, c.cone_radius)), true, id};
  }
  if (id == "cauchy-normal") {
    if (c.study != Study::kCauchyNormal) {
      throw ConfigError("reference", "cauchy-normal reference needs a cauchy-normal run");
    }
    const auto params = CauchyNormalParams::make(c.dimension, c.sigma2);
    const auto oracle = CauchyNormalReference::build(params);
    if (c.dimension == 1) return {oracle.theta1_reference_1d(), false, id};
    Rng rng = make_rng(c.seed, kReferenceStream);
    return {empirical_reference(oracle.sample_theta1(kReferenceDraws, rng),
                                "cauchy-normal posterior (reference draws)"),
            false, id};
  }
  throw ConfigError("reference", "unknown reference '" + id + "' (spike-slab, normal, cone, cauchy-normal)");
}

std::string default_reference_id(Study study) {
  switch (study) {
    case Study::kSpikeSlab: return "spike-slab";
    case Study::kMvn: return "normal";
    case Study::kCauchyNormal: return "cauchy-normal";
    case Study::kCustomCone: return "cone";
  }
  return "normal";
}

json config_to_json(const ExperimentConfig& c) {
  json model = json::object();
  switch (c.study) {
    case Study::kSpikeSlab:
      model["spike_sd"] = c.spike_sd;
      model["slab_sd"] = c.slab_sd;
      model["scale_reading"] = c.scale_reading == ScaleReading::kVariance ? "variance" : "sd";
      break;
    case Study::kMvn: model["rho"] = c.rho; break;
    case Study::kCauchyNormal: model["sigma2"] = c.sigma2; break;
    case Study::kCustomCone: model["radius"] = c.cone_radius; break;
  }
  json j;
  j["study"] = to_string(c.study);
  j["sampler"] = to_string(c.sampler);
  j["dimension"] = c.dimension;
  j["model"] = model;
  j["m"] = c.m;
  j["t1_fraction"] = c.t1_fraction;
  j["stop"] = {{"rule", stop_rule_name(c.stop.rule)}, {"value", c.stop.value}};
  j["iterations"] = c.iterations;
  j["burnin"] = c.burn_in;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(Study study) noexcept {
  for (const auto& e : kStudies) {
    if (e.study == study) return e.name;
  }
  return "?";
}

const char* to_string(SamplerChoice sampler) noexcept {
  for (const auto& e : kSamplers) {
    if (e.sampler == sampler) return e.name;
  }
  return "?";
}

std::int64_t default_iterations(Study study, SamplerChoice sampler) {
  if (sampler != SamplerChoice::kGibbs) return 20000;
  return study == Study::kSpikeSlab ? 100000 : 1000000;
}

std::int64_t default_burn_in(Study study, SamplerChoice sampler, std::int64_t iterations) {
  if (sampler != SamplerChoice::kGibbs) return 0;
  switch (study) {
    case Study::kMvn: return iterations / 20;
    case Study::kCauchyNormal: return iterations / 2;
    default: return 0;
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("<document>", "must be a JSON object");
  reject_unknown(j, {"study", "sampler", "dimension", "model", "m", "t1_fraction", "stop",
                     "iterations", "burnin", "seed", "output_dir"},
                 "");

  ExperimentConfig c;
  c.study = parse_study(get_field<std::string>(j, "study", "study"));
  c.sampler = parse_sampler(get_field<std::string>(j, "sampler", "sampler"));
  if (!j.contains("dimension")) throw ConfigError("dimension", "missing");
  c.dimension = static_cast<int>(get_integer(j, "dimension", "dimension"));
  if (!j.contains("seed")) throw ConfigError("seed", "missing (a seed is required for reproducibility)");
  if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
    throw ConfigError("seed", "must be a non-negative integer");
  }
  if (j.at("seed").is_number_integer() && j.at("seed").get<std::int64_t>() < 0) {
    throw ConfigError("seed", "must be a non-negative integer");
  }
  c.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("model")) {
    const json& model = j.at("model");
    if (!model.is_object()) throw ConfigError("model", "must be an object");
    for (const auto& [key, value] : model.items()) {
      const std::string path = "model." + key;
      const auto only = [&](Study s) {
        if (c.study != s) {
          throw ConfigError(path, std::string("only valid for study ") + to_string(s));
        }
      };
      if (key == "spike_sd") {
        only(Study::kSpikeSlab);
        c.spike_sd = get_number(model, key, path);
      } else if (key == "slab_sd") {
        only(Study::kSpikeSlab);
        c.slab_sd = get_number(model, key, path);
      } else if (key == "scale_reading") {
        only(Study::kSpikeSlab);
        const auto s = get_field<std::string>(model, key, path);
        if (s == "sd") {
          c.scale_reading = ScaleReading::kStandardDeviation;
        } else if (s == "variance") {
          c.scale_reading = ScaleReading::kVariance;
        } else {
          throw ConfigError(path, "must be 'sd' or 'variance'");
        }
      } else if (key == "rho") {
        only(Study::kMvn);
        c.rho = get_number(model, key, path);
      } else if (key == "sigma2") {
        only(Study::kCauchyNormal);
        c.sigma2 = get_number(model, key, path);
      } else if (key == "radius") {
        only(Study::kCustomCone);
        c.cone_radius = get_number(model, key, path);
      } else {
        throw ConfigError(path, "unknown field");
      }
    }
  }

  if (j.contains("m")) c.m = static_cast<int>(get_integer(j, "m", "m"));
  if (j.contains("t1_fraction")) c.t1_fraction = get_number(j, "t1_fraction", "t1_fraction");
  if (j.contains("stop")) {
    const json& stop = j.at("stop");
    if (!stop.is_object()) throw ConfigError("stop", "must be an object");
    reject_unknown(stop, {"rule", "value"}, "stop.");
    if (stop.contains("rule")) c.stop.rule = parse_stop_rule(get_field<std::string>(stop, "rule", "stop.rule"));
    if (stop.contains("value")) c.stop.value = get_number(stop, "value", "stop.value");
  }
  c.iterations = j.contains("iterations") ? get_integer(j, "iterations", "iterations")
                                          : default_iterations(c.study, c.sampler);
  c.burn_in = j.contains("burnin") ? get_integer(j, "burnin", "burnin")
                                   : default_burn_in(c.study, c.sampler, c.iterations);
  if (j.contains("output_dir")) c.output_dir = get_field<std::string>(j, "output_dir", "output_dir");
  validate_config(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text(path));
}

std::string serialize_config(const ExperimentConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

void validate_config(const ExperimentConfig& c) {
  if (c.dimension < 1 || c.dimension > 1000) throw ConfigError("dimension", "must lie in [1, 1000]");
  const bool compatible = [&] {
    switch (c.study) {
      case Study::kSpikeSlab: return c.sampler != SamplerChoice::kLshr2;
      case Study::kMvn: return true;
      case Study::kCauchyNormal: return c.sampler != SamplerChoice::kLshr1;
      case Study::kCustomCone: return c.sampler == SamplerChoice::kLshr1;
    }
    return false;
  }();
  if (!compatible) {
    throw ConfigError("sampler", std::string(to_string(c.sampler)) + " is not available for study " +
                                     to_string(c.study));
  }
  switch (c.study) {
    case Study::kSpikeSlab: {
      if (!(c.spike_sd > 0.0)) throw ConfigError("model.spike_sd", "must be positive");
      if (!(c.slab_sd > c.spike_sd) || !std::isfinite(c.slab_sd)) {
        throw ConfigError("model.slab_sd", "must be finite and exceed spike_sd");
      }
      break;
    }
    case Study::kMvn: {
      const double lower = c.dimension > 1 ? -1.0 / (c.dimension - 1) : -1.0;
      if (!(c.rho > lower && c.rho < 1.0)) {
        throw ConfigError("model.rho", "must lie in (-1/(d-1), 1) for a positive definite covariance");
      }
      break;
    }
    case Study::kCauchyNormal:
      if (!(c.sigma2 >= 0.0) || !std::isfinite(c.sigma2)) {
        throw ConfigError("model.sigma2", "must be >= 0 (0 selects the default formula)");
      }
      break;
    case Study::kCustomCone:
      if (!(c.cone_radius > 0.0) || !std::isfinite(c.cone_radius)) {
        throw ConfigError("model.radius", "must be positive");
      }
      break;
  }
  if (c.m < 2) throw ConfigError("m", "must be >= 2");
  if (!(c.t1_fraction > 0.0 && c.t1_fraction < 1.0)) throw ConfigError("t1_fraction", "must lie in (0, 1)");
  if (c.stop.rule != StopBound::Rule::kAbsoluteLog && !(c.stop.value > 0.0 && c.stop.value < 1.0)) {
    throw ConfigError("stop.value", "must lie in (0, 1) for relative rules");
  }
  if (c.iterations < 1) throw ConfigError("iterations", "must be >= 1");
  if (c.burn_in < 0 || c.burn_in >= c.iterations) throw ConfigError("burnin", "must lie in [0, iterations)");
  if (c.sampler != SamplerChoice::kGibbs && c.burn_in != 0) {
    throw ConfigError("burnin", "only valid for the gibbs sampler");
  }
}

// ---------------------------------------------------------------------------

std::string library_version() { return LSHR_VERSION; }

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& config,
                                         const std::optional<std::string>& cli_out) {
  if (cli_out && !cli_out->empty()) return fs::path(*cli_out);
  fs::path dir = config.output_dir.empty()
                     ? fs::path(std::string(to_string(config.study)) + "-" + to_string(config.sampler) +
                                "-d" + std::to_string(config.dimension) + "-s" + std::to_string(config.seed))
                     : fs::path(config.output_dir);
  if (dir.is_relative()) {
    if (const char* root = std::getenv("LSHR_OUTPUT_ROOT"); root && *root) dir = fs::path(root) / dir;
  }
  return dir;
}

std::string RunManifest::to_json() const {
  json j;
  j["config"] = config_to_json(config);
  j["library_version"] = library_version;
  j["duration_seconds"] = duration_seconds;
  j["summary"] = summary_json.empty() ? json::object() : json::parse(summary_json);
  json files = json::array();
  for (const auto& f : outputs) files.push_back({{"path", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["outputs"] = files;
  return j.dump(2) + "\n";
}

RunManifest run_experiment(const ExperimentConfig& config, const std::filesystem::path& output_dir) {
  validate_config(config);
  const auto started = std::chrono::steady_clock::now();
  fs::create_directories(output_dir);

  Rng rng = make_rng(config.seed, kSamplerStream);
  const int d = config.dimension;

  Matrix draws;
  std::vector<int> tags;
  std::string tag_name;
  json summary;
  json diag;
  diag["study"] = to_string(config.study);
  diag["sampler"] = to_string(config.sampler);
  diag["dimension"] = d;

  LevelSetOptions options;
  options.m = config.m;
  options.t1_fraction = config.t1_fraction;
  options.stop = config.stop;

  const auto record_run = [&](const LevelSetRun& run) {
    const LevelWeights weights = level_weights(run);
    Rng sub_rng = make_rng(config.seed, kSubsampleStream);
    SampleBatch batch = subsample(run, weights, config.iterations, sub_rng);
    draws = std::move(batch.draws);
    tags = std::move(batch.tags);
    tag_name = "level";
    summary["levels"] = run.levels();
    summary["proposals"] = run.proposals;
    summary["log_thresholds"] = run.log_thresholds;
    summary["ratios"] = run.ratios;
    summary["level_probabilities"] = weights.probabilities;
    summary["log_stop"] = run.log_stop;
    diag["levels"] = run.levels();
    diag["proposals"] = run.proposals;
    diag["log_thresholds"] = run.log_thresholds;
    diag["ratios"] = run.ratios;
  };

  switch (config.sampler) {
    case SamplerChoice::kLshr1: {
      std::unique_ptr<DensityModel> model;
      switch (config.study) {
        case Study::kSpikeSlab: model = std::make_unique<SpikeSlab>(spike_slab_params(config)); break;
        case Study::kMvn: model = std::make_unique<EquicorrelatedNormal>(MvnParams{d, config.rho}); break;
        case Study::kCustomCone: model = std::make_unique<Cone>(d, config.cone_radius); break;
        case Study::kCauchyNormal: throw ConfigError("sampler", "lshr1 is not available for cauchy-normal");
      }
      record_run(lshr1_run(*model, options, rng));
      break;
    }
    case SamplerChoice::kLshr2: {
      if (config.study == Study::kMvn) {
        const UniformBox prior(d, -6.0, 6.0);
        const CorrelatedNormalLikelihood likelihood(MvnParams{d, config.rho});
        record_run(lshr2_run(prior, likelihood, options, rng));
      } else {
        const auto params = CauchyNormalParams::make(d, config.sigma2);
        const MultivariateCauchy prior(d);
        const IsotropicNormalLikelihood likelihood(params);
        record_run(lshr2_run(prior, likelihood, options, rng));
      }
      break;
    }
    case SamplerChoice::kGibbs: {
      GibbsRunOptions gopts{config.iterations, config.burn_in, 1};
      GibbsChainState initial;
      initial.seed = config.seed;
      initial.x = Vector::Zero(d);
      GibbsTrace trace;
      switch (config.study) {
        case Study::kSpikeSlab: {
          initial.indicator = 0;
          trace = run_spike_slab_gibbs(spike_slab_params(config), initial, gopts, rng);
          std::vector<int> in_spike(trace.indicators.size());
          for (std::size_t i = 0; i < in_spike.size(); ++i) in_spike[i] = trace.indicators[i] == 0 ? 1 : 0;
          const auto mix = mixing_proportion_trace(in_spike);
          diag["switch_count"] = trace.switch_count;
          diag["final_mixing_proportion"] = mix.back();
          summary["switch_count"] = trace.switch_count;
          tags.assign(trace.indicators.begin() + config.burn_in, trace.indicators.end());
          tag_name = "indicator";
          break;
        }
        case Study::kMvn:
          trace = run_mvn_gibbs(EquicorrelatedNormal(MvnParams{d, config.rho}), initial, gopts, rng);
          break;
        case Study::kCauchyNormal:
          initial.tau2 = 1.0;
          trace = run_cauchy_normal_gibbs(CauchyNormalParams::make(d, config.sigma2), initial, gopts, rng);
          break;
        case Study::kCustomCone: throw ConfigError("sampler", "gibbs is not available for custom-cone");
      }
      summary["iterations"] = config.iterations;
      summary["burn_in"] = config.burn_in;
      summary["retained"] = trace.draws.rows();
      draws = std::move(trace.draws);
      break;
    }
  }

  const fs::path samples_path = output_dir / "samples.csv";
  write_samples_csv(samples_path, draws, tags, tag_name);

  // Diagnostics on theta_1 (or |x| for the cone).
  const StudyReference reference = reference_for(config, default_reference_id(config.study));
  const std::vector<double> theta1 = column(draws, 0);
  const std::vector<double> statistic = reference.radial ? row_norms(draws) : theta1;
  diag["n_draws"] = draws.rows();
  diag["reference"] = reference.id;
  diag["ks"] = ks_statistic(statistic, reference.distribution);
  diag["ks_statistic_of"] = reference.radial ? "radius" : "theta_1";
  if (draws.rows() > kAcfLags + 1) {
    try {
      const auto acf = autocorrelation(theta1, kAcfLags);
      diag["acf_theta1"] = acf;
      diag["lag1_acf"] = acf[1];
    } catch (const ArgumentError&) {
      diag["acf_theta1"] = nullptr;
    }
  }
  diag["quantiles_theta1"] = quantile_table(statistic, 99);
  if (config.study == Study::kCauchyNormal) {
    const auto params = CauchyNormalParams::make(d, config.sigma2);
    diag["prior_mode_fraction"] = prior_mode_fraction(draws, params.y);
    std::vector<double> ref_hist;
    if (d == 1) {
      ref_hist.assign(kTvBins + 2, 0.0);
      const double w = (kTvHi - kTvLo) / kTvBins;
      for (int b = 0; b < kTvBins; ++b) {
        ref_hist[static_cast<std::size_t>(b)] =
            reference.distribution.cdf(kTvLo + (b + 1) * w) - reference.distribution.cdf(kTvLo + b * w);
      }
      ref_hist[kTvBins] = reference.distribution.cdf(kTvLo);
      ref_hist[kTvBins + 1] = 1.0 - reference.distribution.cdf(kTvHi);
    } else {
      const auto oracle = CauchyNormalReference::build(params);
      Rng ref_rng = make_rng(config.seed, kReferenceStream);
      ref_hist = histogram_with_overflow(oracle.sample_theta1(kReferenceDraws, ref_rng), kTvLo, kTvHi, kTvBins);
    }
    diag["tv_theta1"] = total_variation(histogram_with_overflow(theta1, kTvLo, kTvHi, kTvBins), ref_hist);
  }

  const fs::path diag_path = output_dir / "diagnostics.json";
  write_text(diag_path, diag.dump(2) + "\n");

  RunManifest manifest;
  manifest.config = config;
  manifest.library_version = library_version();
  manifest.output_dir = output_dir;
  manifest.summary_json = summary.is_null() ? "{}" : summary.dump();
  for (const fs::path& p : {samples_path, diag_path}) {
    manifest.outputs.push_back({p.filename().string(), sha256_file(p), fs::file_size(p)});
  }
  manifest.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_text(output_dir / "manifest.json", manifest.to_json());
  return manifest;
}

bool verify_manifest(const std::filesystem::path& output_dir, std::string* problem) {
  const auto fail = [&](const std::string& why) {
    if (problem) *problem = why;
    return false;
  };
  const fs::path path = output_dir / "manifest.json";
  if (!fs::exists(path)) return fail("manifest.json missing");
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const std::exception& e) {
    return fail(std::string("manifest.json unreadable: ") + e.what());
  }
  if (!j.contains("outputs") || !j["outputs"].is_array()) return fail("manifest has no outputs");
  for (const auto& f : j["outputs"]) {
    const fs::path p = output_dir / f.at("path").get<std::string>();
    if (!fs::exists(p)) return fail(p.string() + " missing");
    if (sha256_file(p) != f.at("sha256").get<std::string>()) return fail(p.string() + " digest mismatch");
  }
  return true;
}

LoadedSamples load_samples(const std::filesystem::path& csv_path, int dimension) {
  std::ifstream in(csv_path);
  if (!in) throw ConfigError("samples", "cannot read " + csv_path.string());
  LoadedSamples out;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("samples", "empty file " + csv_path.string());
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) out.columns.push_back(col);
  }
  int theta_cols = 0;
  for (const auto& c : out.columns) theta_cols += c.rfind("theta_", 0) == 0 ? 1 : 0;
  if (theta_cols != dimension) {
    throw ConfigError("dimension", csv_path.string() + " has " + std::to_string(theta_cols) +
                                       " coordinates, config says " + std::to_string(dimension));
  }
  const bool tagged = static_cast<int>(out.columns.size()) > theta_cols;
  std::vector<double> values;
  std::int64_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (int j = 0; j < theta_cols; ++j) {
      std::getline(ss, cell, ',');
      values.push_back(std::strtod(cell.c_str(), nullptr));
    }
    if (tagged && std::getline(ss, cell, ',')) out.tags.push_back(std::atoi(cell.c_str()));
    ++rows;
  }
  out.theta = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), rows, theta_cols);
  return out;
}

std::string ComparisonReport::to_json() const {
  json j;
  j["reference"] = reference_id;
  j["a"] = {{"label", a.label}, {"ks", a.ks}, {"lag1_acf", a.acf.size() > 1 ? a.acf[1] : 0.0}};
  j["b"] = {{"label", b.label}, {"ks", b.ks}, {"lag1_acf", b.acf.size() > 1 ? b.acf[1] : 0.0}};
  double max_diff = 0.0;
  for (std::size_t i = 0; i < a.quantiles.size() && i < b.quantiles.size(); ++i) {
    max_diff = std::max(max_diff, std::abs(a.quantiles[i] - b.quantiles[i]));
  }
  j["max_quantile_difference"] = max_diff;
  return j.dump(2) + "\n";
}

ComparisonReport compare_runs(const ExperimentConfig& a, const std::filesystem::path& dir_a,
                              const ExperimentConfig& b, const std::filesystem::path& dir_b,
                              const std::string& reference_id,
                              const std::filesystem::path& output_dir) {
  if (a.dimension != b.dimension) {
    throw ConfigError("dimension", "runs have different dimensions (" + std::to_string(a.dimension) +
                                       " vs " + std::to_string(b.dimension) + ")");
  }
  const LoadedSamples sa = load_samples(dir_a / "samples.csv", a.dimension);
  const LoadedSamples sb = load_samples(dir_b / "samples.csv", b.dimension);
  const StudyReference reference = reference_for(a, reference_id);

  const auto side = [&](const ExperimentConfig& c, const LoadedSamples& s) {
    ComparisonSide out;
    out.label = std::string(to_string(c.sampler)) + ":" + to_string(c.study) + ":d" + std::to_string(c.dimension);
    const std::vector<double> stat = reference.radial ? row_norms(s.theta) : column(s.theta, 0);
    out.ks = ks_statistic(stat, reference.distribution);
    out.quantiles = quantile_table(stat, 99);
    const int lags = static_cast<int>(std::min<Eigen::Index>(50, s.theta.rows() - 1));
    try {
      out.acf = autocorrelation(column(s.theta, 0), lags);
    } catch (const ArgumentError&) {
      out.acf.assign(static_cast<std::size_t>(std::max(lags, 0)) + 1, 0.0);
    }
    return out;
  };

  ComparisonReport report;
  report.reference_id = reference_id;
  report.reference_quantiles = reference_quantile_table(reference.distribution, 99);
  report.a = side(a, sa);
  report.b = side(b, sb);

  fs::create_directories(output_dir);
  write_text(output_dir / "comparison.json", report.to_json());
  {
    std::ostringstream q;
    q << "probability,reference,a,b\n";
    for (int k = 0; k < 99; ++k) {
      const auto i = static_cast<std::size_t>(k);
      q << format_double((k + 1) / 100.0) << ',' << format_double(report.reference_quantiles[i]) << ','
        << format_double(report.a.quantiles[i]) << ',' << format_double(report.b.quantiles[i]) << '\n';
    }
    write_text(output_dir / "quantiles.csv", q.str());
  }
  {
    std::ostringstream acf;
    acf << "lag,a,b\n";
    const std::size_t n = std::max(report.a.acf.size(), report.b.acf.size());
    for (std::size_t k = 0; k < n; ++k) {
      acf << k << ',' << (k < report.a.acf.size() ? format_double(report.a.acf[k]) : "") << ','
          << (k < report.b.acf.size() ? format_double(report.b.acf[k]) : "") << '\n';
    }
    write_text(output_dir / "acf.csv", acf.str());
  }
  return report;
}

std::vector<std::filesystem::path> write_oracle_tables(const ExperimentConfig& config,
                                                       const std::filesystem::path& output_dir) {
  validate_config(config);
  const StudyReference reference = reference_for(config, default_reference_id(config.study));
  const auto quantiles = reference_quantile_table(reference.distribution, 99);
  fs::create_directories(output_dir);

  const fs::path qpath = output_dir / "oracle_quantiles.csv";
  {
    std::ostringstream q;
    q << "probability," << (reference.radial ? "radius" : "theta_1") << '\n';
    for (int k = 0; k < 99; ++k) {
      q << format_double((k + 1) / 100.0) << ',' << format_double(quantiles[static_cast<std::size_t>(k)]) << '\n';
    }
    write_text(qpath, q.str());
  }

  const fs::path dpath = output_dir / "oracle_density.csv";
  {
    const double lo = reference.distribution.quantile(0.001);
    const double hi = reference.distribution.quantile(0.999);
    constexpr int kPoints = 401;
    const double step = (hi - lo) / (kPoints - 1);
    std::ostringstream dens;
    dens << (reference.radial ? "radius" : "theta_1") << ",density,cdf\n";
    for (int i = 0; i < kPoints; ++i) {
      const double x = lo + i * step;
      double pdf;
      if (config.study == Study::kSpikeSlab) {
        pdf = spike_slab_marginal_pdf(spike_slab_params(config), x);
      } else {
        pdf = (reference.distribution.cdf(x + 0.5 * step) - reference.distribution.cdf(x - 0.5 * step)) / step;
      }
      dens << format_double(x) << ',' << format_double(pdf) << ',' << format_double(reference.distribution.cdf(x))
           << '\n';
    }
    write_text(dpath, dens.str());
  }
  return {qpath, dpath};
}

}  // namespace lshr
