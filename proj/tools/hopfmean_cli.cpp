// Command-line front end over the hopfmean C API: locate bifurcation
// points, print normal-form coefficient reports, sweep a parameter range
// comparing analytic and numerical cycle means, and verify the O(mu)
// tangency of the prediction.
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "hopfmean/hopfmean.h"
#include "json.hpp"

using json = nlohmann::ordered_json;

namespace {

struct ModelOpts {
  std::string name;
  std::string field_file;
  std::vector<std::string> params;
  std::string guess_csv;
};

struct ModelHandle {
  hm_model* m = nullptr;
  ~ModelHandle() { hm_model_free(m); }
};

struct ResultHandle {
  hm_result* r = nullptr;
  explicit ResultHandle(hm_result* h = nullptr) : r(h) {}
  ~ResultHandle() { hm_result_free(r); }
  explicit operator bool() const { return r != nullptr; }
};

[[noreturn]] void die(const std::string& msg, int code = 1) {
  std::cerr << "error: " << msg << "\n";
  std::exit(code);
}

int exit_code_for_last_error() {
  return hm_last_error_code() == HM_ERR_BRACKET ? 2 : 1;
}

std::vector<double> parse_csv_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      die("malformed number in list: '" + tok + "'");
    }
  }
  return out;
}

hm_model* open_model(const ModelOpts& o) {
  hm_model* m = nullptr;
  if (!o.field_file.empty())
    m = hm_model_from_file(o.field_file.c_str());
  else if (!o.name.empty())
    m = hm_model_builtin(o.name.c_str());
  else
    die("no model given (positional name or --field-file)");
  if (!m) die(hm_last_error());
  for (const std::string& kv : o.params) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) die("--param expects key=value, got '" + kv + "'");
    std::string key = kv.substr(0, eq);
    double val = 0;
    try {
      val = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      die("malformed value in --param " + kv);
    }
    if (hm_model_set_param(m, key.c_str(), val) != HM_OK) die(hm_last_error());
  }
  return m;
}

std::optional<std::vector<double>> guess_of(const ModelOpts& o, const hm_model* m) {
  if (o.guess_csv.empty()) return std::nullopt;
  std::vector<double> g = parse_csv_doubles(o.guess_csv);
  if (static_cast<int>(g.size()) != hm_model_dimension(m))
    die("--guess has " + std::to_string(g.size()) + " entries, model dimension is " +
        std::to_string(hm_model_dimension(m)));
  return g;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void add_model_options(CLI::App* cmd, ModelOpts& o) {
  cmd->add_option("model", o.name, "built-in model name");
  cmd->add_option("--field-file", o.field_file, "custom model JSON file");
  cmd->add_option("--param", o.params, "parameter override key=value")->take_all();
  cmd->add_option("--guess", o.guess_csv, "equilibrium guess x1,..,xn");
}

double scalar_or(const hm_result* r, const char* key, double fallback) {
  double v = fallback;
  hm_result_scalar(r, key, &v);
  return v;
}

std::vector<double> vector_of(const hm_result* r, const char* key, int n) {
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  if (hm_result_vector(r, key, v.data(), n) != n) v.clear();
  return v;
}

// ---- sweep ----

struct SweepRow {
  double alpha = 0;
  bool ok = false;          // analytic pipeline succeeded
  bool numeric_ok = false;  // numeric observation succeeded (when requested)
  double mu = 0, omega = 0, r_w = 0, omega_w = 0, re_c1 = 0, period = 0;
  bool has_rw = false;
  std::vector<double> x0, pred, num, K;
  double residual = 0;  // ||d_num - K mu|| when numeric
};

int cmd_sweep(const ModelOpts& mo, double amin, double amax, int steps, bool numeric, int jobs,
              const std::string& out_path) {
  if (steps < 1) die("--steps must be >= 1");
  if (out_path.empty()) die("--out is required for sweep");
  ModelHandle mh{open_model(mo)};
  const int n = hm_model_dimension(mh.m);
  auto g0 = guess_of(mo, mh.m);

  std::vector<SweepRow> rows(static_cast<std::size_t>(steps));
  // sequential analytic pre-pass with continuation seeding
  std::vector<double> seed;
  if (g0) seed = *g0;
  for (int i = 0; i < steps; ++i) {
    SweepRow& row = rows[static_cast<std::size_t>(i)];
    row.alpha = steps == 1 ? amin : amin + (amax - amin) * i / (steps - 1);
    ResultHandle res(hm_analyze(mh.m, row.alpha, seed.empty() ? nullptr : seed.data()));
    if (!res) continue;
    row.ok = true;
    row.mu = scalar_or(res.r, "mu", 0);
    row.omega = scalar_or(res.r, "omega", 0);
    row.re_c1 = scalar_or(res.r, "re_c1", 0);
    row.omega_w = scalar_or(res.r, "omega_w", 0);
    double rw = -1;
    if (hm_result_scalar(res.r, "r_w", &rw) == HM_OK) {
      row.r_w = rw;
      row.has_rw = true;
    }
    row.x0 = vector_of(res.r, "x0", n);
    row.pred = vector_of(res.r, "predicted_mean", n);
    row.K = vector_of(res.r, "K", n);
    seed = row.x0;  // seed the next point
  }

  if (numeric) {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= steps) return;
        SweepRow& row = rows[static_cast<std::size_t>(i)];
        if (!row.ok) continue;
        ResultHandle res(hm_observe(mh.m, row.alpha, row.x0.data(), 0, 0));
        if (!res) continue;
        row.numeric_ok = true;
        row.num = vector_of(res.r, "mean", n);
        row.period = scalar_or(res.r, "period", 0);
        std::vector<double> dn = vector_of(res.r, "d_num", n);
        std::vector<double> dp = vector_of(res.r, "d_pred", n);
        double s = 0;
        for (int k = 0; k < n; ++k) s += (dn[k] - dp[k]) * (dn[k] - dp[k]);
        row.residual = std::sqrt(s);
      }
    };
    int nw = jobs > 0 ? jobs : 1;
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::ofstream out(out_path);
  if (!out) die("cannot open output file: " + out_path);
  out << "alpha,mu,omega";
  for (int k = 1; k <= n; ++k) out << ",x0_" << k;
  for (int k = 1; k <= n; ++k) out << ",predicted_mean_" << k;
  for (int k = 1; k <= n; ++k) out << ",numeric_mean_" << k;
  for (int k = 1; k <= n; ++k) out << ",K_" << k;
  out << ",r_w,omega_w,re_c1,period_numeric,converged\n";
  int failures = 0;
  for (const SweepRow& row : rows) {
    bool converged = row.ok && (!numeric || row.numeric_ok || row.mu <= 0);
    if (!converged) ++failures;
    out << fmt(row.alpha);
    if (!row.ok) {
      for (int k = 0; k < 4 * n + 6; ++k) out << ",";
      out << ",0\n";
      continue;
    }
    out << "," << fmt(row.mu) << "," << fmt(row.omega);
    for (int k = 0; k < n; ++k) out << "," << fmt(row.x0[static_cast<std::size_t>(k)]);
    for (int k = 0; k < n; ++k) out << "," << fmt(row.pred[static_cast<std::size_t>(k)]);
    for (int k = 0; k < n; ++k)
      out << "," << (row.numeric_ok ? fmt(row.num[static_cast<std::size_t>(k)]) : "");
    for (int k = 0; k < n; ++k) out << "," << fmt(row.K[static_cast<std::size_t>(k)]);
    out << "," << (row.has_rw ? fmt(row.r_w) : "") << "," << fmt(row.omega_w) << ","
        << fmt(row.re_c1) << "," << (row.numeric_ok ? fmt(row.period) : "") << ","
        << (converged ? 1 : 0) << "\n";
  }
  out.close();

  // summary: bifurcation bracket from the sign change of mu across the grid
  json summary;
  summary["rows"] = steps;
  summary["failures"] = failures;
  summary["alpha_star"] = nullptr;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i - 1].ok && rows[i].ok && rows[i - 1].mu < 0 && rows[i].mu >= 0) {
      ResultHandle loc(hm_locate(mh.m, rows[i - 1].alpha, rows[i].alpha,
                                 rows[i - 1].x0.empty() ? nullptr : rows[i - 1].x0.data()));
      if (loc) summary["alpha_star"] = scalar_or(loc.r, "alpha_star", 0);
      break;
    }
  }
  double max_res = 0;
  const SweepRow* lo = nullptr;
  const SweepRow* hi = nullptr;
  for (const SweepRow& row : rows) {
    if (!row.numeric_ok || row.mu <= 0) continue;
    max_res = std::max(max_res, row.residual);
    if (!lo || row.mu < lo->mu) lo = &row;
    if (!hi || row.mu > hi->mu) hi = &row;
  }
  if (numeric) {
    summary["max_residual"] = max_res;
    if (lo && hi && hi->mu > lo->mu && lo->residual > 0) {
      // ~1 when the residual scales quadratically in mu (tangency)
      summary["tangency_ratio"] =
          (hi->residual / lo->residual) / ((hi->mu / lo->mu) * (hi->mu / lo->mu));
    } else {
      summary["tangency_ratio"] = nullptr;
    }
  }
  std::cout << summary.dump(2) << "\n";
  return 2 * failures > steps ? 1 : 0;
}

// ---- verify ----

int cmd_verify(const ModelOpts& mo, std::string mu_list, double alo, double ahi) {
  std::vector<double> mus = parse_csv_doubles(mu_list);
  if (mus.empty()) die("--mu-list is empty");
  ModelHandle mh{open_model(mo)};
  const int n = hm_model_dimension(mh.m);
  auto g0 = guess_of(mo, mh.m);

  ResultHandle loc(hm_locate(mh.m, alo, ahi, g0 ? g0->data() : nullptr));
  if (!loc) die(hm_last_error(), exit_code_for_last_error());
  double astar = scalar_or(loc.r, "alpha_star", 0);
  double mu_prime = scalar_or(loc.r, "mu_prime", 0);
  std::vector<double> x0_star = vector_of(loc.r, "x0_star", n);

  json report;
  report["alpha_star"] = astar;
  json entries = json::array();
  std::vector<double> residuals, amps, alphas_found;
  bool all_ok = true;
  double worst_period_err = 0;

  for (double target : mus) {
    // secant refinement of alpha with mu(alpha) = target, seeded by mu'
    double a = astar + target / mu_prime;
    double a_prev = astar;
    double mu_prev = 0;
    std::vector<double> seed = x0_star;
    double mu_here = 0;
    for (int it = 0; it < 60; ++it) {
      ResultHandle res(hm_analyze(mh.m, a, seed.data()));
      if (!res) die(hm_last_error(), 1);
      mu_here = scalar_or(res.r, "mu", 0);
      seed = vector_of(res.r, "x0", n);
      if (std::abs(mu_here - target) <= 1e-13 * std::max(1.0, std::abs(target))) break;
      double denom = (mu_here - mu_prev);
      double a_next = std::abs(denom) > 0 ? a - (mu_here - target) * (a - a_prev) / denom
                                          : a + 1e-6;
      a_prev = a;
      mu_prev = mu_here;
      a = a_next;
    }
    ResultHandle obs(hm_observe(mh.m, a, seed.data(), 0, 0));
    json e;
    e["mu"] = target;
    e["alpha"] = a;
    if (!obs) {
      e["converged"] = false;
      e["error"] = hm_last_error();
      all_ok = false;
      entries.push_back(e);
      continue;
    }
    bool conv = scalar_or(obs.r, "converged", 0) != 0;
    if (!conv) all_ok = false;
    double err = scalar_or(obs.r, "err_norm", 0);
    double period = scalar_or(obs.r, "period", 0);
    double omega_w = scalar_or(obs.r, "omega_w", 0);
    int k = static_cast<int>(scalar_or(obs.r, "section_coordinate", 0));
    std::vector<double> amp = vector_of(obs.r, "amplitude", n);
    double period_pred = 2 * std::acos(-1.0) / omega_w;
    double period_err = std::abs(period - period_pred) / period;
    worst_period_err = std::max(worst_period_err, period_err);
    e["converged"] = conv;
    e["residual"] = err;
    e["cosine"] = scalar_or(obs.r, "cosine", 0);
    e["amplitude_ratio"] = scalar_or(obs.r, "amplitude_ratio", 0);
    e["period"] = period;
    e["period_predicted"] = period_pred;
    e["period_rel_err"] = period_err;
    entries.push_back(e);
    residuals.push_back(err);
    amps.push_back(amp[static_cast<std::size_t>(k)]);
    alphas_found.push_back(a);
  }
  report["points"] = entries;

  json orders = json::array();
  for (std::size_t i = 1; i < residuals.size(); ++i)
    if (residuals[i - 1] > 0 && residuals[i] > 0)
      orders.push_back(std::log(residuals[i] / residuals[i - 1]) /
                       std::log(mus[i] / mus[i - 1]));
  report["residual_order"] = orders;
  if (amps.size() >= 2 && amps.front() > 0 && amps.back() > 0)
    report["amplitude_exponent"] =
        std::log(amps.back() / amps.front()) / std::log(mus.back() / mus.front());
  report["max_period_rel_err"] = worst_period_err;
  std::cout << report.dump(2) << "\n";
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hopf-bifurcation cycle-mean analysis"};
  app.require_subcommand(1);

  ModelOpts mo_locate, mo_coeffs, mo_sweep, mo_verify;

  auto* locate = app.add_subcommand("locate", "locate the bifurcation point on an interval");
  add_model_options(locate, mo_locate);
  double alo = 0, ahi = 0;
  locate->add_option("--alpha-lo", alo, "lower bracket")->required();
  locate->add_option("--alpha-hi", ahi, "upper bracket")->required();

  auto* coeffs = app.add_subcommand("coeffs", "normal-form coefficient report at one alpha");
  add_model_options(coeffs, mo_coeffs);
  double alpha_c = 0;
  coeffs->add_option("--alpha", alpha_c, "parameter value")->required();

  auto* sweep = app.add_subcommand("sweep", "CSV sweep across a parameter range");
  add_model_options(sweep, mo_sweep);
  double amin = 0, amax = 0;
  int steps = 0, jobs = 1;
  bool numeric = false;
  std::string out_path;
  sweep->add_option("--alpha-min", amin, "range start")->required();
  sweep->add_option("--alpha-max", amax, "range end")->required();
  sweep->add_option("--steps", steps, "grid size")->required();
  sweep->add_flag("--numeric", numeric, "measure numerical cycle means");
  sweep->add_option("--jobs", jobs, "worker threads for numeric observations");
  sweep->add_option("--out", out_path, "CSV output path")->required();

  auto* verify = app.add_subcommand("verify", "tangency/amplitude/period verification");
  add_model_options(verify, mo_verify);
  std::string mu_list;
  double valo = 0, vahi = 0;
  verify->add_option("--mu-list", mu_list, "target mu values, comma separated")->required();
  verify->add_option("--alpha-lo", valo, "lower bracket for the bifurcation")->required();
  verify->add_option("--alpha-hi", vahi, "upper bracket for the bifurcation")->required();

  CLI11_PARSE(app, argc, argv);

  if (locate->parsed()) {
    ModelHandle mh{open_model(mo_locate)};
    auto g = guess_of(mo_locate, mh.m);
    ResultHandle res(hm_locate(mh.m, alo, ahi, g ? g->data() : nullptr));
    if (!res) die(hm_last_error(), exit_code_for_last_error());
    std::cout << hm_result_json(res.r) << "\n";
    return 0;
  }
  if (coeffs->parsed()) {
    ModelHandle mh{open_model(mo_coeffs)};
    auto g = guess_of(mo_coeffs, mh.m);
    ResultHandle res(hm_analyze(mh.m, alpha_c, g ? g->data() : nullptr));
    if (!res) die(hm_last_error(), hm_last_error_code() == HM_ERR_BRACKET ? 2 : 1);
    std::cout << hm_result_json(res.r) << "\n";
    return 0;
  }
  if (sweep->parsed()) return cmd_sweep(mo_sweep, amin, amax, steps, numeric, jobs, out_path);
  if (verify->parsed()) return cmd_verify(mo_verify, mu_list, valo, vahi);
  return 0;
}
