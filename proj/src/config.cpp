#include "rlmh/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rlmh {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "target", "target_dim", "laplace_scale", "banana_sigma1", "banana_b",
    "mixture_separation", "mixture_sd", "mixture_weight", "glm_data", "glm_family",
    "glm_prior_scale", "kernel", "policy", "tuner", "reward", "step_size",
    "total_iterations", "freeze_window", "episode_length", "passes_per_episode",
    "seed", "replicates", "g0_source", "g0_file", "reference_size", "reference_seed",
    "lr_actor", "lr_critic", "tau", "gamma", "eta", "batch", "buffer_capacity",
    "clip_norm", "noise_sd", "reward_centring", "pretrain_epochs", "pretrain_batch",
    "pretrain_lr", "tuner_window", "aar_two_window", "out_dir", "write_trace"};

const std::set<std::string> kKnownTargets = {
    "gaussian",  "gaussian1d", "gaussian2d", "laplace", "laplace2d",
    "banana",    "mixture",    "mixture2d",  "glm"};

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::InvalidValue, "invalid value for '" + key + "': " + why);
}

template <typename T>
T get_as(const json& doc, const std::string& key, const T& fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    invalid(key, "wrong type");
  }
}

KernelChoice parse_kernel(const std::string& s) {
  if (s == "rmala") return KernelChoice::Rmala;
  if (s == "barker") return KernelChoice::Barker;
  if (s == "mala") return KernelChoice::Mala;
  invalid("kernel", "expected rmala, barker, or mala");
}

const char* kernel_name(KernelChoice k) {
  switch (k) {
    case KernelChoice::Rmala: return "rmala";
    case KernelChoice::Barker: return "barker";
    case KernelChoice::Mala: return "mala";
  }
  return "unknown";
}

PolicyKind parse_policy(const std::string& s) {
  if (s == "constant") return PolicyKind::Constant;
  if (s == "neural") return PolicyKind::Neural;
  invalid("policy", "expected constant or neural");
}

G0Source parse_g0(const std::string& s) {
  if (s == "reference-covariance") return G0Source::ReferenceCovariance;
  if (s == "identity") return G0Source::Identity;
  if (s == "file") return G0Source::File;
  invalid("g0_source", "expected reference-covariance, identity, or file");
}

const char* g0_name(G0Source g) {
  switch (g) {
    case G0Source::ReferenceCovariance: return "reference-covariance";
    case G0Source::Identity: return "identity";
    case G0Source::File: return "file";
  }
  return "unknown";
}

void validate(const RunConfig& cfg) {
  if (!kKnownTargets.count(cfg.target)) invalid("target", "unknown target " + cfg.target);
  if (cfg.target == "glm" && cfg.glm_data.empty()) {
    invalid("glm_data", "glm target needs a data file");
  }
  if (cfg.glm_family != "logistic" && cfg.glm_family != "gaussian-likelihood") {
    invalid("glm_family", "expected logistic or gaussian-likelihood");
  }
  if (!(cfg.glm_prior_scale > 0.0)) invalid("glm_prior_scale", "must be > 0");
  if (cfg.target_dim < 0) invalid("target_dim", "must be >= 0");
  if (!(cfg.laplace_scale > 0.0)) invalid("laplace_scale", "must be > 0");
  if (!(cfg.banana_sigma1 > 0.0)) invalid("banana_sigma1", "must be > 0");
  if (!(cfg.mixture_sd > 0.0)) invalid("mixture_sd", "must be > 0");
  if (!(cfg.mixture_weight > 0.0 && cfg.mixture_weight < 1.0)) {
    invalid("mixture_weight", "must lie in (0,1)");
  }
  if (!(cfg.step_size > 0.0)) invalid("step_size", "must be > 0");
  if (cfg.total_iterations < 1) invalid("total_iterations", "must be >= 1");
  if (cfg.freeze_window < 1) invalid("freeze_window", "must be >= 1");
  if (cfg.freeze_window >= cfg.total_iterations) {
    invalid("freeze_window", "must be smaller than total_iterations");
  }
  if (cfg.episode_length < 1) invalid("episode_length", "must be >= 1");
  if (cfg.passes_per_episode < 0) invalid("passes_per_episode", "must be >= 0");
  if (cfg.replicates < 1) invalid("replicates", "must be >= 1");
  if (cfg.g0_source == G0Source::File && cfg.g0_file.empty()) {
    invalid("g0_file", "g0_source=file needs a path");
  }
  if (cfg.reference_size < 2) invalid("reference_size", "must be >= 2");
  if (cfg.lr_actor < 0.0) invalid("lr_actor", "must be >= 0");
  if (cfg.lr_critic < 0.0) invalid("lr_critic", "must be >= 0");
  if (!(cfg.tau > 0.0 && cfg.tau <= 1.0)) invalid("tau", "must lie in (0,1]");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0)) invalid("gamma", "must lie in (0,1)");
  if (cfg.eta < 0.0) invalid("eta", "must be >= 0");
  if (cfg.batch < 1) invalid("batch", "must be >= 1");
  if (cfg.buffer_capacity < cfg.batch) {
    invalid("buffer_capacity", "must be >= batch");
  }
  if (!(cfg.clip_norm > 0.0)) invalid("clip_norm", "must be > 0");
  if (cfg.reward_centring != "td-residual" && cfg.reward_centring != "raw-reward") {
    invalid("reward_centring", "expected td-residual or raw-reward");
  }
  if (cfg.pretrain_epochs < 0) invalid("pretrain_epochs", "must be >= 0");
  if (cfg.pretrain_batch < 1) invalid("pretrain_batch", "must be >= 1");
  if (cfg.pretrain_lr < 0.0) invalid("pretrain_lr", "must be >= 0");
  if (cfg.tuner_window < 0) invalid("tuner_window", "must be >= 0");
  if (cfg.out_dir.empty()) invalid("out_dir", "must be non-empty");
  if (cfg.tuner == TunerKind::Ddpg && cfg.policy != PolicyKind::Neural) {
    invalid("policy", "tuner=ddpg requires policy=neural");
  }
  if ((cfg.tuner == TunerKind::Aar || cfg.tuner == TunerKind::Esjd) &&
      cfg.policy != PolicyKind::Constant) {
    invalid("policy", "window tuners require policy=constant");
  }
}

RunConfig from_json(const json& doc, bool run_validation = true) {
  if (!doc.is_object()) {
    throw Error(ErrorCode::ParseError, "config document must be an object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.count(key)) {
      throw Error(ErrorCode::UnknownKey, "unknown config key '" + key + "'");
    }
  }
  RunConfig cfg;
  cfg.target = get_as<std::string>(doc, "target", cfg.target);
  cfg.target_dim = get_as<int>(doc, "target_dim", cfg.target_dim);
  cfg.laplace_scale = get_as<double>(doc, "laplace_scale", cfg.laplace_scale);
  cfg.banana_sigma1 = get_as<double>(doc, "banana_sigma1", cfg.banana_sigma1);
  cfg.banana_b = get_as<double>(doc, "banana_b", cfg.banana_b);
  cfg.mixture_separation =
      get_as<double>(doc, "mixture_separation", cfg.mixture_separation);
  cfg.mixture_sd = get_as<double>(doc, "mixture_sd", cfg.mixture_sd);
  cfg.mixture_weight = get_as<double>(doc, "mixture_weight", cfg.mixture_weight);
  cfg.glm_data = get_as<std::string>(doc, "glm_data", cfg.glm_data);
  cfg.glm_family = get_as<std::string>(doc, "glm_family", cfg.glm_family);
  cfg.glm_prior_scale = get_as<double>(doc, "glm_prior_scale", cfg.glm_prior_scale);
  cfg.kernel = parse_kernel(get_as<std::string>(doc, "kernel", "rmala"));
  cfg.tuner = [&] {
    const std::string s = get_as<std::string>(doc, "tuner", "none");
    try {
      return tuner_kind_from_string(s);
    } catch (const Error&) {
      invalid("tuner", "expected none, aar, esjd, or ddpg");
    }
  }();
  // policy defaults to what the tuner needs
  const std::string default_policy =
      cfg.tuner == TunerKind::Ddpg ? "neural" : "constant";
  cfg.policy = parse_policy(get_as<std::string>(doc, "policy", default_policy));
  cfg.reward = [&] {
    const std::string s = get_as<std::string>(doc, "reward", "cdlb");
    try {
      return reward_kind_from_string(s);
    } catch (const Error&) {
      invalid("reward", "expected sjd, rb_sjd, lesjd, or cdlb");
    }
  }();
  cfg.step_size = get_as<double>(doc, "step_size", cfg.step_size);
  cfg.total_iterations =
      get_as<long long>(doc, "total_iterations", cfg.total_iterations);
  cfg.freeze_window = get_as<long long>(doc, "freeze_window", cfg.freeze_window);
  cfg.episode_length = get_as<int>(doc, "episode_length", cfg.episode_length);
  cfg.passes_per_episode =
      get_as<int>(doc, "passes_per_episode", cfg.passes_per_episode);
  cfg.seed = get_as<std::uint64_t>(doc, "seed", cfg.seed);
  cfg.replicates = get_as<int>(doc, "replicates", cfg.replicates);
  cfg.g0_source = parse_g0(get_as<std::string>(doc, "g0_source", "reference-covariance"));
  cfg.g0_file = get_as<std::string>(doc, "g0_file", cfg.g0_file);
  cfg.reference_size = get_as<int>(doc, "reference_size", cfg.reference_size);
  cfg.reference_seed = get_as<std::uint64_t>(doc, "reference_seed", cfg.reference_seed);
  cfg.lr_actor = get_as<double>(doc, "lr_actor", cfg.lr_actor);
  cfg.lr_critic = get_as<double>(doc, "lr_critic", cfg.lr_critic);
  cfg.tau = get_as<double>(doc, "tau", cfg.tau);
  cfg.gamma = get_as<double>(doc, "gamma", cfg.gamma);
  cfg.eta = get_as<double>(doc, "eta", cfg.eta);
  cfg.batch = get_as<int>(doc, "batch", cfg.batch);
  cfg.buffer_capacity = get_as<int>(doc, "buffer_capacity", cfg.buffer_capacity);
  cfg.clip_norm = get_as<double>(doc, "clip_norm", cfg.clip_norm);
  cfg.noise_sd = get_as<double>(doc, "noise_sd", cfg.noise_sd);
  cfg.reward_centring =
      get_as<std::string>(doc, "reward_centring", cfg.reward_centring);
  cfg.pretrain_epochs = get_as<int>(doc, "pretrain_epochs", cfg.pretrain_epochs);
  cfg.pretrain_batch = get_as<int>(doc, "pretrain_batch", cfg.pretrain_batch);
  cfg.pretrain_lr = get_as<double>(doc, "pretrain_lr", cfg.pretrain_lr);
  cfg.tuner_window = get_as<int>(doc, "tuner_window", cfg.tuner_window);
  cfg.aar_two_window = get_as<bool>(doc, "aar_two_window", cfg.aar_two_window);
  cfg.out_dir = get_as<std::string>(doc, "out_dir", cfg.out_dir);
  cfg.write_trace = get_as<bool>(doc, "write_trace", cfg.write_trace);
  if (run_validation) validate(cfg);
  return cfg;
}

json to_json(const RunConfig& cfg) {
  json doc;
  doc["target"] = cfg.target;
  doc["target_dim"] = cfg.target_dim;
  doc["laplace_scale"] = cfg.laplace_scale;
  doc["banana_sigma1"] = cfg.banana_sigma1;
  doc["banana_b"] = cfg.banana_b;
  doc["mixture_separation"] = cfg.mixture_separation;
  doc["mixture_sd"] = cfg.mixture_sd;
  doc["mixture_weight"] = cfg.mixture_weight;
  doc["glm_data"] = cfg.glm_data;
  doc["glm_family"] = cfg.glm_family;
  doc["glm_prior_scale"] = cfg.glm_prior_scale;
  doc["kernel"] = kernel_name(cfg.kernel);
  doc["policy"] = cfg.policy == PolicyKind::Neural ? "neural" : "constant";
  doc["tuner"] = tuner_kind_name(cfg.tuner);
  doc["reward"] = reward_kind_name(cfg.reward);
  doc["step_size"] = cfg.step_size;
  doc["total_iterations"] = cfg.total_iterations;
  doc["freeze_window"] = cfg.freeze_window;
  doc["episode_length"] = cfg.episode_length;
  doc["passes_per_episode"] = cfg.passes_per_episode;
  doc["seed"] = cfg.seed;
  doc["replicates"] = cfg.replicates;
  doc["g0_source"] = g0_name(cfg.g0_source);
  doc["g0_file"] = cfg.g0_file;
  doc["reference_size"] = cfg.reference_size;
  doc["reference_seed"] = cfg.reference_seed;
  doc["lr_actor"] = cfg.lr_actor;
  doc["lr_critic"] = cfg.lr_critic;
  doc["tau"] = cfg.tau;
  doc["gamma"] = cfg.gamma;
  doc["eta"] = cfg.eta;
  doc["batch"] = cfg.batch;
  doc["buffer_capacity"] = cfg.buffer_capacity;
  doc["clip_norm"] = cfg.clip_norm;
  doc["noise_sd"] = cfg.noise_sd;
  doc["reward_centring"] = cfg.reward_centring;
  doc["pretrain_epochs"] = cfg.pretrain_epochs;
  doc["pretrain_batch"] = cfg.pretrain_batch;
  doc["pretrain_lr"] = cfg.pretrain_lr;
  doc["tuner_window"] = cfg.tuner_window;
  doc["aar_two_window"] = cfg.aar_two_window;
  doc["out_dir"] = cfg.out_dir;
  doc["write_trace"] = cfg.write_trace;
  return doc;
}

}  // namespace

RunConfig load_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("config parse error: ") + e.what());
  }
  return from_json(doc);
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::MissingFile, "cannot open config file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_config(buffer.str());
}

std::string serialize_config(const RunConfig& cfg) {
  return to_json(cfg).dump(2);
}

RunConfig apply_override(const RunConfig& cfg, const std::string& key_value) {
  const auto pos = key_value.find('=');
  if (pos == std::string::npos || pos == 0) {
    throw Error(ErrorCode::InvalidValue,
                "override must look like key=value: " + key_value);
  }
  const std::string key = key_value.substr(0, pos);
  const std::string value = key_value.substr(pos + 1);
  if (!kKnownKeys.count(key)) {
    throw Error(ErrorCode::UnknownKey, "unknown config key '" + key + "'");
  }
  json doc = to_json(cfg);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // bare strings stay strings
  }
  // Bare words that parse as json (true/false/null) but target string keys
  // would corrupt types; coerce to the declared type.
  if (doc.at(key).is_string() && !parsed.is_string()) {
    parsed = value;
  }
  // Changing the tuner re-derives the policy default; an explicit
  // policy override afterwards still wins.
  if (key == "tuner") doc.erase("policy");
  doc[key] = parsed;
  // Per-key parse and type errors surface here; cross-field constraints are
  // re-checked when the config is actually used, so override order is free.
  return from_json(doc, /*run_validation=*/false);
}

std::uint64_t config_hash(const RunConfig& cfg) {
  json doc = to_json(cfg);
  doc.erase("out_dir");
  doc.erase("write_trace");
  const std::string canon = doc.dump();
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : canon) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

}  // namespace rlmh
