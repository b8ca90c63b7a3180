#include "hopfmean/hopfmean.h"

#include <cstring>
#include <string>

#include "json.hpp"
#include "models.hpp"
#include "normalform.hpp"
#include "simulate.hpp"

using json = nlohmann::ordered_json;
using namespace hopfmean;

struct hm_model {
  Builtin builtin;
};

struct hm_result {
  json doc;
  std::string text;
};

namespace {

thread_local std::string g_error;
thread_local int g_error_code = HM_OK;

void set_error(const std::string& msg, int code = HM_ERR_INVALID) {
  g_error = msg;
  g_error_code = code;
}

void clear_error() {
  g_error.clear();
  g_error_code = HM_OK;
}

/// Run `fn`, translating exceptions into error codes.
template <class Fn>
hm_result* guarded(Fn&& fn) {
  try {
    json doc = fn();
    auto* r = new hm_result;
    r->doc = std::move(doc);
    r->text = r->doc.dump(2);
    clear_error();
    return r;
  } catch (const BracketError& e) {
    set_error(e.what(), HM_ERR_BRACKET);
  } catch (const DegenerateError& e) {
    set_error(e.what(), HM_ERR_DEGENERATE);
  } catch (const SimulateError& e) {
    set_error(e.what(), HM_ERR_NUMERIC);
  } catch (const EvalError& e) {
    set_error(e.what(), HM_ERR_INVALID);
  } catch (const std::invalid_argument& e) {
    set_error(e.what(), HM_ERR_INVALID);
  } catch (const std::exception& e) {
    set_error(e.what(), HM_ERR_SOLVE);
  }
  return nullptr;
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json cplx_json(Cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json cvec_json(const CVec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(cplx_json(v[i]));
  return a;
}

Vec guess_or_default(const hm_model* m, double alpha, const double* guess) {
  int n = m->builtin.model.dimension();
  Vec g(n);
  if (guess) {
    for (int i = 0; i < n; ++i) g[i] = guess[i];
  } else if (m->builtin.default_guess) {
    g = m->builtin.default_guess(m->builtin.model.params_with_alpha(alpha));
  } else {
    g.setZero();
  }
  return g;
}

json analysis_json(const VectorFieldModel& model, const Analysis& a) {
  json j;
  j["alpha"] = a.eq.alpha;
  j["x0"] = vec_json(a.eq.x0);
  j["residual"] = a.eq.residual;
  j["stability"] = to_string(a.eq.stability);
  j["lambda"] = cplx_json(a.eq.hopf.lambda);
  j["mu"] = a.eq.hopf.lambda.real();
  j["omega"] = a.eq.hopf.lambda.imag();
  j["q"] = cvec_json(a.eq.hopf.q);
  j["p"] = cvec_json(a.eq.hopf.p);
  j["g20"] = cplx_json(a.nf.g20);
  j["g11"] = cplx_json(a.nf.g11);
  j["g02"] = cplx_json(a.nf.g02);
  j["g21"] = cplx_json(a.nf.g21);
  j["g21_tilde"] = cplx_json(a.nf.g21_tilde);
  j["eta11"] = vec_json(a.nf.eta11_real);
  j["c1"] = cplx_json(a.nf.c1);
  j["re_c1"] = a.nf.ell1;
  j["K"] = vec_json(a.pred.K);
  j["cycle_predicted"] = a.pred.cycle_predicted;
  if (a.pred.r_w) j["r_w"] = *a.pred.r_w;
  j["omega_w"] = a.pred.omega_w;
  j["predicted_mean"] = vec_json(a.pred.predicted_mean);
  j["criticality"] = to_string(a.pred.criticality);
  j["residuals"] = json{{"pq_minus_1", a.nf.res_pq},
                        {"p_qbar", a.nf.res_pqbar},
                        {"im_H11", a.nf.res_im_H11},
                        {"im_eta11", a.nf.res_im_eta11},
                        {"p_eta", a.nf.res_p_eta}};
  (void)model;
  return j;
}

}  // namespace

extern "C" {

const char* hm_version(void) { return "1.0.0"; }

const char* hm_last_error(void) { return g_error.c_str(); }

int hm_last_error_code(void) { return g_error_code; }

hm_model* hm_model_builtin(const char* name) {
  if (!name) {
    set_error("name is NULL");
    return nullptr;
  }
  auto b = make_builtin(name);
  if (!b) {
    set_error(std::string("unknown built-in model: ") + name);
    return nullptr;
  }
  clear_error();
  return new hm_model{std::move(*b)};
}

hm_model* hm_model_from_json(const char* json_text) {
  if (!json_text) {
    set_error("json_text is NULL");
    return nullptr;
  }
  try {
    Builtin b{VectorFieldModel::from_json(json_text)};
    clear_error();
    return new hm_model{std::move(b)};
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

hm_model* hm_model_from_file(const char* path) {
  if (!path) {
    set_error("path is NULL");
    return nullptr;
  }
  try {
    Builtin b{VectorFieldModel::from_file(path)};
    clear_error();
    return new hm_model{std::move(b)};
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

void hm_model_free(hm_model* m) { delete m; }

int hm_model_dimension(const hm_model* m) {
  return m ? m->builtin.model.dimension() : HM_ERR_INVALID;
}

const char* hm_model_name(const hm_model* m) {
  return m ? m->builtin.model.name().c_str() : nullptr;
}

const char* hm_model_bifurcation_parameter(const hm_model* m) {
  return m ? m->builtin.model.bifurcation_parameter().c_str() : nullptr;
}

int hm_model_set_param(hm_model* m, const char* name, double value) {
  if (!m || !name) {
    set_error("NULL argument");
    return HM_ERR_INVALID;
  }
  try {
    m->builtin.model.set_param(name, value);
    clear_error();
    return HM_OK;
  } catch (const std::exception& e) {
    set_error(e.what());
    return HM_ERR_INVALID;
  }
}

int hm_model_default_guess(const hm_model* m, double alpha, double* out) {
  if (!m || !out) {
    set_error("NULL argument");
    return HM_ERR_INVALID;
  }
  Vec g = guess_or_default(m, alpha, nullptr);
  for (int i = 0; i < g.size(); ++i) out[i] = g[i];
  clear_error();
  return HM_OK;
}

hm_result* hm_analyze(const hm_model* m, double alpha, const double* guess) {
  if (!m) {
    set_error("model is NULL");
    return nullptr;
  }
  return guarded([&] {
    Analysis a = analyze(m->builtin.model, alpha, guess_or_default(m, alpha, guess));
    return analysis_json(m->builtin.model, a);
  });
}

hm_result* hm_locate(const hm_model* m, double alpha_lo, double alpha_hi, const double* guess) {
  if (!m) {
    set_error("model is NULL");
    return nullptr;
  }
  return guarded([&] {
    const VectorFieldModel& model = m->builtin.model;
    Vec g = guess_or_default(m, alpha_lo, guess);
    BifurcationPoint bp = locate_bifurcation(model, alpha_lo, alpha_hi, g);
    Equilibrium eq = solve_equilibrium(model, bp.alpha_star, bp.x0_star);
    NormalFormData nf = compute_normal_form(model, eq);
    json j;
    j["alpha_star"] = bp.alpha_star;
    j["omega0"] = bp.omega0;
    j["mu_prime"] = bp.mu_prime;
    j["re_c1"] = bp.lyapunov_re_c1;
    j["criticality"] = to_string(bp.criticality);
    j["x0_star"] = vec_json(bp.x0_star);
    if (bp.criticality != Criticality::Degenerate) {
      j["K_at_star"] = vec_json(compute_K(nf));
      j["oigm_gain_jump"] = vec_json(oigm_gain_jump(bp, nf));
    }
    return j;
  });
}

hm_result* hm_observe(const hm_model* m, double alpha, const double* guess, double rtol,
                      double atol) {
  if (!m) {
    set_error("model is NULL");
    return nullptr;
  }
  return guarded([&] {
    const VectorFieldModel& model = m->builtin.model;
    Analysis a = analyze(model, alpha, guess_or_default(m, alpha, guess));
    IntegratorConfig cfg;
    if (rtol > 0) cfg.rtol = rtol;
    if (atol > 0) cfg.atol = atol;
    DeviationRecord rec = measure_deviation(model, alpha, a.eq, a.pred, cfg);
    json j;
    j["alpha"] = alpha;
    j["converged"] = rec.obs.converged;
    j["period"] = rec.obs.period;
    j["mean"] = vec_json(rec.obs.mean);
    j["amplitude"] = vec_json(rec.obs.amplitude);
    j["periods_averaged"] = rec.obs.periods_averaged;
    j["settle_time"] = rec.obs.settle_time;
    j["section_coordinate"] = rec.obs.section_coordinate;
    j["d_num"] = vec_json(rec.d_num);
    j["d_pred"] = vec_json(rec.d_pred);
    j["err_norm"] = rec.err_norm;
    j["cosine"] = rec.cosine;
    j["amplitude_ratio"] = rec.amplitude_ratio;
    j["predicted_mean"] = vec_json(a.pred.predicted_mean);
    j["mu"] = a.eq.hopf.lambda.real();
    if (a.pred.r_w) j["r_w"] = *a.pred.r_w;
    j["omega_w"] = a.pred.omega_w;
    return j;
  });
}

const char* hm_result_json(const hm_result* r) { return r ? r->text.c_str() : nullptr; }

int hm_result_scalar(const hm_result* r, const char* key, double* out) {
  if (!r || !key || !out) {
    set_error("NULL argument");
    return HM_ERR_INVALID;
  }
  auto it = r->doc.find(key);
  if (it == r->doc.end() || !(it->is_number() || it->is_boolean())) {
    set_error(std::string("no scalar field '") + key + "'");
    return HM_ERR_INVALID;
  }
  *out = it->is_boolean() ? (it->get<bool>() ? 1.0 : 0.0) : it->get<double>();
  clear_error();
  return HM_OK;
}

int hm_result_vector(const hm_result* r, const char* key, double* out, int cap) {
  if (!r || !key || (!out && cap > 0)) {
    set_error("NULL argument");
    return HM_ERR_INVALID;
  }
  auto it = r->doc.find(key);
  if (it == r->doc.end() || !it->is_array()) {
    set_error(std::string("no vector field '") + key + "'");
    return HM_ERR_INVALID;
  }
  int n = static_cast<int>(it->size());
  for (int i = 0; i < std::min(n, cap); ++i) {
    if (!(*it)[i].is_number()) {
      set_error(std::string("field '") + key + "' is not a numeric vector");
      return HM_ERR_INVALID;
    }
    out[i] = (*it)[i].get<double>();
  }
  clear_error();
  return n;
}

void hm_result_free(hm_result* r) { delete r; }

}  // extern "C"
