#include "rlmh/c_api.h"

#include <cmath>
#include <cstring>
#include <string>

#include "rlmh/harness.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

rlmh_status status_for(const rlmh::Error& e) {
  switch (e.code()) {
    case rlmh::ErrorCode::ParseError:
    case rlmh::ErrorCode::UnknownKey:
    case rlmh::ErrorCode::InvalidValue:
      return RLMH_ERR_CONFIG;
    default:
      return RLMH_ERR_RUNTIME;
  }
}

}  // namespace

struct rlmh_config {
  rlmh::RunConfig cfg;
};

struct rlmh_result {
  rlmh::RunResult result;
};

extern "C" {

const char* rlmh_last_error(void) { return g_last_error.c_str(); }

rlmh_config* rlmh_config_default(void) {
  set_error("");
  return new rlmh_config{rlmh::RunConfig{}};
}

rlmh_config* rlmh_config_from_file(const char* path) {
  if (path == nullptr) {
    set_error("path is null");
    return nullptr;
  }
  try {
    auto cfg = rlmh::load_config_file(path);
    set_error("");
    return new rlmh_config{std::move(cfg)};
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

rlmh_config* rlmh_config_from_json(const char* json_text) {
  if (json_text == nullptr) {
    set_error("document is null");
    return nullptr;
  }
  try {
    auto cfg = rlmh::load_config(json_text);
    set_error("");
    return new rlmh_config{std::move(cfg)};
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

void rlmh_config_free(rlmh_config* cfg) { delete cfg; }

rlmh_status rlmh_config_override(rlmh_config* cfg, const char* key_value) {
  if (cfg == nullptr || key_value == nullptr) {
    set_error("null argument");
    return RLMH_ERR_CONFIG;
  }
  try {
    cfg->cfg = rlmh::apply_override(cfg->cfg, key_value);
    set_error("");
    return RLMH_OK;
  } catch (const rlmh::Error& e) {
    set_error(e.what());
    return RLMH_ERR_CONFIG;
  } catch (const std::exception& e) {
    set_error(e.what());
    return RLMH_ERR_RUNTIME;
  }
}

rlmh_status rlmh_config_set_seed(rlmh_config* cfg, uint64_t seed) {
  if (cfg == nullptr) {
    set_error("null config");
    return RLMH_ERR_CONFIG;
  }
  cfg->cfg.seed = seed;
  set_error("");
  return RLMH_OK;
}

rlmh_status rlmh_config_set_out_dir(rlmh_config* cfg, const char* dir) {
  if (cfg == nullptr || dir == nullptr) {
    set_error("null argument");
    return RLMH_ERR_CONFIG;
  }
  cfg->cfg.out_dir = dir;
  set_error("");
  return RLMH_OK;
}

rlmh_status rlmh_config_set_replicates(rlmh_config* cfg, int replicates) {
  if (cfg == nullptr) {
    set_error("null config");
    return RLMH_ERR_CONFIG;
  }
  if (replicates < 1) {
    set_error("invalid value for 'replicates': must be >= 1");
    return RLMH_ERR_CONFIG;
  }
  cfg->cfg.replicates = replicates;
  set_error("");
  return RLMH_OK;
}

char* rlmh_config_to_json(const rlmh_config* cfg) {
  if (cfg == nullptr) {
    set_error("null config");
    return nullptr;
  }
  try {
    const std::string text = rlmh::serialize_config(cfg->cfg);
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    set_error("");
    return out;
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

void rlmh_string_free(char* s) { delete[] s; }

rlmh_status rlmh_run(const rlmh_config* cfg, rlmh_result** out_result) {
  if (out_result != nullptr) *out_result = nullptr;
  if (cfg == nullptr || out_result == nullptr) {
    set_error("null argument");
    return RLMH_ERR_CONFIG;
  }
  try {
    rlmh::RunResult result = rlmh::run_experiment(cfg->cfg);
    const bool catastrophic = result.any_catastrophic();
    *out_result = new rlmh_result{std::move(result)};
    set_error(catastrophic ? "catastrophic failure detected in at least one replicate"
                           : "");
    return catastrophic ? RLMH_ERR_CATASTROPHIC : RLMH_OK;
  } catch (const rlmh::Error& e) {
    set_error(e.what());
    return status_for(e);
  } catch (const std::exception& e) {
    set_error(e.what());
    return RLMH_ERR_RUNTIME;
  }
}

void rlmh_result_free(rlmh_result* result) { delete result; }

int rlmh_result_replicates(const rlmh_result* r) {
  return r == nullptr ? 0 : static_cast<int>(r->result.replicates.size());
}

const char* rlmh_result_out_dir(const rlmh_result* r) {
  return r == nullptr ? nullptr : r->result.out_dir.c_str();
}

namespace {

const rlmh::ReplicateResult* replicate_at(const rlmh_result* r, int i) {
  if (r == nullptr || i < 0 ||
      i >= static_cast<int>(r->result.replicates.size())) {
    return nullptr;
  }
  return &r->result.replicates[static_cast<std::size_t>(i)];
}

}  // namespace

int rlmh_result_catastrophic(const rlmh_result* r, int replicate) {
  const auto* rep = replicate_at(r, replicate);
  return rep == nullptr ? -1 : (rep->catastrophic ? 1 : 0);
}

const char* rlmh_result_failure_reason(const rlmh_result* r, int replicate) {
  const auto* rep = replicate_at(r, replicate);
  return rep == nullptr ? nullptr : rep->failure_reason.c_str();
}

double rlmh_result_mmd(const rlmh_result* r, int replicate) {
  const auto* rep = replicate_at(r, replicate);
  return rep == nullptr ? std::nan("") : rep->summary.mmd;
}

double rlmh_result_aar(const rlmh_result* r, int replicate) {
  const auto* rep = replicate_at(r, replicate);
  return rep == nullptr ? std::nan("") : rep->summary.aar;
}

double rlmh_result_mean_esjd(const rlmh_result* r, int replicate) {
  const auto* rep = replicate_at(r, replicate);
  return rep == nullptr ? std::nan("") : rep->summary.mean_esjd;
}

double rlmh_result_eps_final(const rlmh_result* r, int replicate) {
  const auto* rep = replicate_at(r, replicate);
  return rep == nullptr ? std::nan("") : rep->eps_final;
}

int64_t rlmh_result_logp_evals(const rlmh_result* r, int replicate) {
  const auto* rep = replicate_at(r, replicate);
  return rep == nullptr ? -1 : rep->n_logp_evals;
}

int64_t rlmh_result_grad_evals(const rlmh_result* r, int replicate) {
  const auto* rep = replicate_at(r, replicate);
  return rep == nullptr ? -1 : rep->n_grad_evals;
}

rlmh_status rlmh_sweep(const rlmh_config* cfg, const double* grid, size_t n_grid) {
  if (cfg == nullptr || (grid == nullptr && n_grid > 0)) {
    set_error("null argument");
    return RLMH_ERR_CONFIG;
  }
  try {
    std::vector<double> g(grid, grid + n_grid);
    rlmh::sweep(cfg->cfg, g);
    set_error("");
    return RLMH_OK;
  } catch (const rlmh::Error& e) {
    set_error(e.what());
    return status_for(e);
  } catch (const std::exception& e) {
    set_error(e.what());
    return RLMH_ERR_RUNTIME;
  }
}

rlmh_status rlmh_export_policy(const char* actor_checkpoint, double x1_min,
                               double x1_max, double x2_min, double x2_max,
                               int resolution, const char* out_path) {
  if (actor_checkpoint == nullptr || out_path == nullptr) {
    set_error("null argument");
    return RLMH_ERR_CONFIG;
  }
  try {
    rlmh::GridBounds bounds{x1_min, x1_max, x2_min, x2_max};
    rlmh::policy_grid_export_checkpoint(actor_checkpoint, bounds, resolution,
                                        out_path);
    set_error("");
    return RLMH_OK;
  } catch (const rlmh::Error& e) {
    set_error(e.what());
    return status_for(e);
  } catch (const std::exception& e) {
    set_error(e.what());
    return RLMH_ERR_RUNTIME;
  }
}

}  // extern "C"
