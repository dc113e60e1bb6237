#include "varint/varint.h"

#include "varint/experiment.hpp"
#include "varint/models.hpp"

#include <algorithm>
#include <cstring>
#include <new>
#include <string>

struct varint_config {
  varint::ExperimentConfig cfg;
};

struct varint_result {
  varint::RunOutcome outcome;
};

struct varint_suite_result {
  varint::SuiteOutcome outcome;
};

struct varint_bea_result {
  varint::BeaOutcome outcome;
};

namespace {

thread_local std::string last_error;

varint_status status_of(varint::ErrorCode code) {
  switch (code) {
    case varint::ErrorCode::Config: return VARINT_ERR_CONFIG;
    case varint::ErrorCode::Domain: return VARINT_ERR_DOMAIN;
    case varint::ErrorCode::NonMonotoneTime: return VARINT_ERR_NONMONOTONE_TIME;
    case varint::ErrorCode::NonConvergence: return VARINT_ERR_NONCONVERGENCE;
    case varint::ErrorCode::IllPosed: return VARINT_ERR_ILL_POSED;
    case varint::ErrorCode::UnsupportedOrder: return VARINT_ERR_UNSUPPORTED_ORDER;
    case varint::ErrorCode::Io: return VARINT_ERR_IO;
  }
  return VARINT_ERR_INTERNAL;
}

varint_status fail(varint_status s, const std::string& message) {
  last_error = message;
  return s;
}

template <class Fn>
varint_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const varint::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VARINT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VARINT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VARINT_ERR_INTERNAL, "unknown failure");
  }
}

const char* name_at(const std::vector<std::string>& names, size_t i) {
  return i < names.size() ? names[i].c_str() : nullptr;
}

}  // namespace

extern "C" {

const char* varint_last_error(void) { return last_error.c_str(); }

const char* varint_status_string(varint_status status) {
  switch (status) {
    case VARINT_OK: return "ok";
    case VARINT_ERR_CONFIG: return "config";
    case VARINT_ERR_DOMAIN: return "domain";
    case VARINT_ERR_NONMONOTONE_TIME: return "non_monotone_time";
    case VARINT_ERR_NONCONVERGENCE: return "non_convergence";
    case VARINT_ERR_ILL_POSED: return "ill_posed";
    case VARINT_ERR_UNSUPPORTED_ORDER: return "unsupported_order";
    case VARINT_ERR_IO: return "io";
    case VARINT_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case VARINT_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

varint_status varint_config_create(varint_config** out) {
  if (!out) return fail(VARINT_ERR_INVALID_ARGUMENT, "null output handle");
  return guarded([&] {
    *out = new varint_config{};
    return VARINT_OK;
  });
}

varint_status varint_config_load_file(const char* path, varint_config** out) {
  if (!path || !out) return fail(VARINT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new varint_config{varint::load_config_file(path)};
    return VARINT_OK;
  });
}

void varint_config_destroy(varint_config* cfg) { delete cfg; }

varint_status varint_config_set(varint_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(VARINT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    cfg->cfg.set(key, value);
    return VARINT_OK;
  });
}

varint_status varint_config_assign(varint_config* cfg, const char* assignment) {
  if (!cfg || !assignment) return fail(VARINT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    cfg->cfg.assign(assignment);
    return VARINT_OK;
  });
}

varint_status varint_config_get(const varint_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  if (!cfg || !key || (!buf && cap > 0)) return fail(VARINT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string& v = cfg->cfg.get(key);
    if (needed) *needed = v.size() + 1;
    if (cap > 0) {
      const size_t n = std::min(v.size(), cap - 1);
      std::memcpy(buf, v.data(), n);
      buf[n] = '\0';
    }
    return VARINT_OK;
  });
}

varint_status varint_config_validate(const varint_config* cfg) {
  if (!cfg) return fail(VARINT_ERR_INVALID_ARGUMENT, "null config");
  return guarded([&] {
    varint::validate_config(cfg->cfg);
    return VARINT_OK;
  });
}

size_t varint_config_key_count(void) { return varint::ExperimentConfig::keys().size(); }

const char* varint_config_key_name(size_t i) { return name_at(varint::ExperimentConfig::keys(), i); }

varint_status varint_run(const varint_config* cfg, varint_result** out) {
  if (!cfg || !out) return fail(VARINT_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new varint_result{varint::run_experiment(cfg->cfg)};
    if ((*out)->outcome.error) last_error = (*out)->outcome.diagnosis;
    return VARINT_OK;
  });
}

void varint_result_destroy(varint_result* r) { delete r; }

int varint_result_complete(const varint_result* r) { return r && r->outcome.complete ? 1 : 0; }

int varint_result_met_tolerance(const varint_result* r) { return r && r->outcome.met_tolerance ? 1 : 0; }

varint_status varint_result_error(const varint_result* r) {
  if (!r) return VARINT_ERR_INVALID_ARGUMENT;
  return r->outcome.error ? status_of(*r->outcome.error) : VARINT_OK;
}

const char* varint_result_diagnosis(const varint_result* r) { return r ? r->outcome.diagnosis.c_str() : nullptr; }

size_t varint_result_num_states(const varint_result* r) { return r ? r->outcome.t.size() : 0; }

int varint_result_dim(const varint_result* r) { return r ? r->outcome.dim : 0; }

varint_status varint_result_state(const varint_result* r, size_t k, double* t, double* q, double* p, double* E) {
  if (!r) return fail(VARINT_ERR_INVALID_ARGUMENT, "null result");
  if (k >= r->outcome.t.size()) return fail(VARINT_ERR_INVALID_ARGUMENT, "state index out of range");
  if (t) *t = r->outcome.t[k];
  if (E) *E = r->outcome.E[k];
  for (int i = 0; i < r->outcome.dim; ++i) {
    if (q) q[i] = r->outcome.q[k][static_cast<size_t>(i)];
    if (p) p[i] = r->outcome.p[k][static_cast<size_t>(i)];
  }
  return VARINT_OK;
}

size_t varint_result_summary_count(const varint_result* r) { return r ? r->outcome.summary.size() : 0; }

const char* varint_result_summary_key(const varint_result* r, size_t i) {
  return r && i < r->outcome.summary.size() ? r->outcome.summary[i].first.c_str() : nullptr;
}

const char* varint_result_summary_value(const varint_result* r, size_t i) {
  return r && i < r->outcome.summary.size() ? r->outcome.summary[i].second.c_str() : nullptr;
}

varint_status varint_result_summary_get(const varint_result* r, const char* key, const char** value) {
  if (!r || !key || !value) return fail(VARINT_ERR_INVALID_ARGUMENT, "null argument");
  *value = nullptr;
  for (const auto& kv : r->outcome.summary)
    if (kv.first == key) *value = kv.second.c_str();
  return VARINT_OK;
}

varint_status varint_suite_run(const char* name, const char* output_root, int workers, const char* const* overrides,
                               size_t num_overrides, varint_suite_result** out) {
  if (!name || !output_root || !out || (num_overrides > 0 && !overrides))
    return fail(VARINT_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    std::vector<std::string> ov;
    for (size_t i = 0; i < num_overrides; ++i) {
      if (!overrides[i]) return fail(VARINT_ERR_INVALID_ARGUMENT, "null override");
      ov.emplace_back(overrides[i]);
    }
    *out = new varint_suite_result{varint::run_suite(name, output_root, workers, ov)};
    return VARINT_OK;
  });
}

void varint_suite_destroy(varint_suite_result* s) { delete s; }

size_t varint_suite_count(const varint_suite_result* s) { return s ? s->outcome.members.size() : 0; }

int varint_suite_failed(const varint_suite_result* s) { return s ? s->outcome.failed : 0; }

const char* varint_suite_member_name(const varint_suite_result* s, size_t i) {
  return s && i < s->outcome.members.size() ? s->outcome.members[i].name.c_str() : nullptr;
}

int varint_suite_member_ok(const varint_suite_result* s, size_t i) {
  return s && i < s->outcome.members.size() && s->outcome.members[i].ok() ? 1 : 0;
}

const char* varint_suite_member_failure(const varint_suite_result* s, size_t i) {
  if (!s || i >= s->outcome.members.size()) return nullptr;
  const auto& m = s->outcome.members[i];
  return m.failure.empty() ? m.outcome.diagnosis.c_str() : m.failure.c_str();
}

size_t varint_problem_count(void) { return varint::problem_names().size(); }
const char* varint_problem_name(size_t i) { return name_at(varint::problem_names(), i); }
size_t varint_integrator_count(void) { return varint::integrator_names().size(); }
const char* varint_integrator_name(size_t i) { return name_at(varint::integrator_names(), i); }
size_t varint_suite_name_count(void) { return varint::suite_names().size(); }
const char* varint_suite_name(size_t i) { return name_at(varint::suite_names(), i); }

varint_status varint_bea_run(const varint_config* cfg, varint_bea_result** out) {
  if (!cfg || !out) return fail(VARINT_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new varint_bea_result{varint::run_bea(cfg->cfg)};
    return VARINT_OK;
  });
}

void varint_bea_destroy(varint_bea_result* r) { delete r; }

size_t varint_bea_count(const varint_bea_result* r) { return r ? r->outcome.delta_a.size() : 0; }

varint_status varint_bea_point(const varint_bea_result* r, size_t i, double* delta_a, double* residual_off,
                               double* residual_on) {
  if (!r) return fail(VARINT_ERR_INVALID_ARGUMENT, "null result");
  if (i >= r->outcome.delta_a.size()) return fail(VARINT_ERR_INVALID_ARGUMENT, "point index out of range");
  if (delta_a) *delta_a = r->outcome.delta_a[i];
  if (residual_off) *residual_off = r->outcome.residual_off[i];
  if (residual_on) *residual_on = r->outcome.residual_on[i];
  return VARINT_OK;
}

varint_status varint_bea_slopes(const varint_bea_result* r, double* slope_off, double* slope_on, double* slope_E_off,
                                double* slope_E_on, double* psi_ratio_off) {
  if (!r) return fail(VARINT_ERR_INVALID_ARGUMENT, "null result");
  if (slope_off) *slope_off = r->outcome.slope_off;
  if (slope_on) *slope_on = r->outcome.slope_on;
  if (slope_E_off) *slope_E_off = r->outcome.slope_E_off;
  if (slope_E_on) *slope_E_on = r->outcome.slope_E_on;
  if (psi_ratio_off) *psi_ratio_off = r->outcome.psi_ratio_off;
  return VARINT_OK;
}

varint_status varint_kepler_initial_state(double e, double q[2], double p[2], double* H) {
  if (!q || !p) return fail(VARINT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto s = varint::kepler_initial_state<double>(e);
    q[0] = s.q[0];
    q[1] = s.q[1];
    p[0] = s.p[0];
    p[1] = s.p[1];
    if (H) *H = s.E;
    return VARINT_OK;
  });
}

varint_status varint_kepler_hamiltonian(const double q[2], const double p[2], double* H) {
  if (!q || !p || !H) return fail(VARINT_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    varint::Vec<double> qv(2), pv(2);
    qv << q[0], q[1];
    pv << p[0], p[1];
    *H = varint::kepler_hamiltonian<double>(qv, pv);
    return VARINT_OK;
  });
}

}  // extern "C"
