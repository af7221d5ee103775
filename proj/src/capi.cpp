#include "qst/qst.h"

#include <cstdlib>
#include <cstring>
#include <algorithm>
#include <memory>
#include <new>
#include <string>

#include "driver.hpp"
#include "qst/analysis.hpp"
#include "qst/config.hpp"
#include "qst/error.hpp"
#include "qst/parametrix.hpp"

struct qst_session {
  qst::ExperimentConfig cfg;
};

struct qst_mode {
  qst::Families fam;
  qst::KernelSolution sol;
};

namespace {

thread_local std::string g_last_error;

qst_status status_of(qst::ErrorCode c) {
  using qst::ErrorCode;
  switch (c) {
    case ErrorCode::HypothesisViolation: return QST_ERR_HYPOTHESIS;
    case ErrorCode::Convergence: return QST_ERR_CONVERGENCE;
    case ErrorCode::Singular: return QST_ERR_SINGULAR;
    case ErrorCode::DegeneratePairing: return QST_ERR_DEGENERATE_PAIRING;
    case ErrorCode::TagMismatch: return QST_ERR_TAG_MISMATCH;
    case ErrorCode::Range: return QST_ERR_RANGE;
    case ErrorCode::BoundaryRule: return QST_ERR_BOUNDARY_RULE;
    case ErrorCode::Config: return QST_ERR_CONFIG;
    case ErrorCode::Io: return QST_ERR_IO;
    case ErrorCode::Argument: return QST_ERR_ARGUMENT;
  }
  return QST_ERR_INTERNAL;
}

template <class F>
qst_status guard(F&& body) {
  try {
    g_last_error.clear();
    body();
    return QST_OK;
  } catch (const qst::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return QST_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return QST_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) qst::fail(qst::ErrorCode::Argument, std::string(what) + " is NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* qst_version(void) { return "0.1.0"; }

const char* qst_last_error(void) { return g_last_error.c_str(); }

void qst_string_free(char* s) { std::free(s); }

qst_status qst_session_from_json(const char* config_json, qst_session** out) {
  return guard([&] {
    need(out, "out");
    *out = nullptr;
    auto s = std::make_unique<qst_session>();
    if (config_json && *config_json) s->cfg = qst::parse_config(config_json);
    *out = s.release();
  });
}

qst_status qst_session_from_file(const char* path, qst_session** out) {
  return guard([&] {
    need(out, "out");
    need(path, "path");
    *out = nullptr;
    auto s = std::make_unique<qst_session>();
    s->cfg = qst::load_config(path);
    *out = s.release();
  });
}

void qst_session_free(qst_session* s) { delete s; }

qst_status qst_weight(const qst_session* s, int n, long long k, double* out) {
  return guard([&] {
    need(s, "session");
    need(out, "out");
    if (n < 0 || k < 0) qst::fail(qst::ErrorCode::Argument, "n and k must be >= 0");
    *out = s->cfg.families.w(n, k);
  });
}

qst_status qst_s(const qst_session* s, int n, double* out) {
  return guard([&] {
    need(s, "session");
    need(out, "out");
    *out = qst::eval_s(s->cfg.families.w, n, s->cfg.truncation.tol_tail).value;
  });
}

qst_status qst_mode_solve(const qst_session* s, int m, int n, long long k_max, qst_mode** out) {
  return guard([&] {
    need(s, "session");
    need(out, "out");
    *out = nullptr;
    if (n < 0) qst::fail(qst::ErrorCode::Argument, "n must be >= 0");
    if (k_max < 1) qst::fail(qst::ErrorCode::Argument, "k_max must be >= 1");
    qst::SolveOptions so;
    so.tail.tol = s->cfg.truncation.tol_prod;
    auto h = std::make_unique<qst_mode>();
    h->fam = s->cfg.families;
    h->sol = qst::solve_kernel({m, n}, h->fam, k_max, s->cfg.rule, so);
    *out = h.release();
  });
}

void qst_mode_free(qst_mode* mode) { delete mode; }

long long qst_mode_k_max(const qst_mode* mode) { return mode ? mode->sol.k_max : -1; }

qst_status qst_mode_tau(const qst_mode* mode, double* out) {
  return guard([&] {
    need(mode, "mode");
    need(out, "out");
    *out = mode->sol.tau;
  });
}

qst_status qst_mode_epsilon(const qst_mode* mode, double* out) {
  return guard([&] {
    need(mode, "mode");
    need(out, "out");
    *out = mode->sol.epsilon.value;
  });
}

qst_status qst_mode_kernel(const qst_mode* mode, double* I1, double* I2, double* K1, double* K2) {
  return guard([&] {
    need(mode, "mode");
    const auto& sol = mode->sol;
    for (std::size_t k = 0; k < sol.I.size(); ++k) {
      if (I1) I1[k] = sol.I[k].x;
      if (I2) I2[k] = sol.I[k].y;
      if (K1) K1[k] = sol.K[k].x;
      if (K2) K2[k] = sol.K[k].y;
    }
  });
}

qst_status qst_apply_A(const qst_mode* mode, const double* g, const double* f, size_t len,
                       double* r1, double* r2, double* q0) {
  return guard([&] {
    need(mode, "mode");
    need(g, "g");
    need(f, "f");
    need(r1, "r1");
    need(r2, "r2");
    need(q0, "q0");
    const qst::ModeIndex mi = mode->sol.mode;
    const qst::ModePair h = qst::make_pair(mi, std::vector<double>(g, g + len + 1),
                                           std::vector<double>(f, f + len + 1));
    const qst::RhsPair r = qst::apply_A(mi, mode->fam, h);
    std::copy(r.r1.values.begin(), r.r1.values.end(), r1);
    std::copy(r.r2.values.begin(), r.r2.values.end(), r2);
    *q0 = r.q0;
  });
}

qst_status qst_apply_Q(const qst_mode* mode, const double* r1, const double* r2, size_t len,
                       double q0, double* g, double* f, double* beta, double* boundary_residual) {
  return guard([&] {
    need(mode, "mode");
    need(g, "g");
    need(f, "f");
    if (len > 0) {
      need(r1, "r1");
      need(r2, "r2");
    }
    const qst::ModeIndex mi = mode->sol.mode;
    const qst::RhsPair r = qst::make_rhs(mi, std::vector<double>(r1, r1 + len),
                                         std::vector<double>(r2, r2 + len), q0);
    const qst::ParametrixResult res = qst::apply_Q(mode->sol, mode->fam, r);
    std::copy(res.h.g.values.begin(), res.h.g.values.end(), g);
    std::copy(res.h.f.values.begin(), res.h.f.values.end(), f);
    if (beta) *beta = res.beta;
    if (boundary_residual) *boundary_residual = res.boundary_residual;
  });
}

qst_status qst_mode_hs_json(const qst_mode* mode, char** out) {
  return guard([&] {
    need(mode, "mode");
    need(out, "out");
    *out = nullptr;
    *out = dup(qst::hs_json(qst::hs_norms(mode->sol, mode->fam)).dump(2));
  });
}

qst_status qst_command(const char* command, const char* options_json, int* exit_code,
                       char** report_json) {
  return guard([&] {
    need(command, "command");
    need(exit_code, "exit_code");
    if (report_json) *report_json = nullptr;
    qst::CommandOutcome o;
    try {
      const nlohmann::json j = options_json && *options_json ? nlohmann::json::parse(options_json)
                                                             : nlohmann::json();
      o = qst::run_command(command, qst::options_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      qst::fail(qst::ErrorCode::Argument, std::string("options are not valid JSON: ") + e.what());
    }
    *exit_code = o.exit_code;
    if (!o.message.empty()) g_last_error = o.message;
    if (report_json) {
      nlohmann::json r = o.report;
      if (!o.message.empty()) r["message"] = o.message;
      r["files"] = o.files;
      *report_json = dup(r.dump(2));
    }
  });
}

}  // extern "C"
