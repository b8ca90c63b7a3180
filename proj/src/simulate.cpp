#include "simulate.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace hopfmean {

namespace {

// Dormand-Prince 5(4) tableau (FSAL)
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

/// One accepted step and its Hermite dense-output data.
struct Step {
  double t0 = 0, t1 = 0;
  Vec y0, y1, f0, f1;

  double h() const { return t1 - t0; }

  Vec eval(double t) const {
    double th = (t - t0) / h();
    double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
    double h10 = th * (1 - th) * (1 - th);
    double h01 = th * th * (3 - 2 * th);
    double h11 = th * th * (th - 1);
    return h00 * y0 + (h10 * h()) * f0 + h01 * y1 + (h11 * h()) * f1;
  }

  double eval1(double t, int k) const {
    double th = (t - t0) / h();
    double h00 = (1 + 2 * th) * (1 - th) * (1 - th);
    double h10 = th * (1 - th) * (1 - th);
    double h01 = th * th * (3 - 2 * th);
    double h11 = th * th * (th - 1);
    return h00 * y0[k] + h10 * h() * f0[k] + h01 * y1[k] + h11 * h() * f1[k];
  }

  /// Exact integral of the Hermite cubic over [t0, t].
  Vec integral_to(double t) const {
    double th = (t - t0) / h();
    double t2 = th * th, t3 = t2 * th, t4 = t3 * th;
    double i00 = t4 / 2 - t3 + th;
    double i10 = t4 / 4 - 2 * t3 / 3 + t2 / 2;
    double i01 = -t4 / 2 + t3;
    double i11 = t4 / 4 - t3 / 3;
    return h() * (i00 * y0 + (i10 * h()) * f0 + i01 * y1 + (i11 * h()) * f1);
  }

  Vec integral() const { return (h() / 2) * (y0 + y1) + (h() * h() / 12) * (f0 - f1); }
};

class Dopri5 {
public:
  Dopri5(const VectorFieldModel& model, double alpha, const IntegratorConfig& cfg, double t0,
         Vec y_init, double h_init)
      : model_(model), alpha_(alpha), cfg_(cfg), t_(t0), y_(std::move(y_init)), h_(h_init) {
    f_ = model_.rhs(y_, alpha_);
    escape_ = 1e6 * model_.scale_norm();
  }

  double t() const { return t_; }
  const Vec& y() const { return y_; }
  int accepted() const { return accepted_; }
  int rejected() const { return rejected_; }

  /// Advance one accepted step, not past t_limit; fills `out`.
  void step(double t_limit, Step& out) {
    const int n = static_cast<int>(y_.size());
    for (int attempt = 0; attempt < 200; ++attempt) {
      double h = std::min({h_, cfg_.max_step, t_limit - t_});
      if (!(h > 0)) throw SimulateError("step underflow at t=" + std::to_string(t_));
      Vec k1 = f_;
      Vec k2 = model_.rhs(y_ + h * (a21 * k1), alpha_);
      Vec k3 = model_.rhs(y_ + h * (a31 * k1 + a32 * k2), alpha_);
      Vec k4 = model_.rhs(y_ + h * (a41 * k1 + a42 * k2 + a43 * k3), alpha_);
      Vec k5 = model_.rhs(y_ + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), alpha_);
      Vec k6 = model_.rhs(y_ + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5),
                          alpha_);
      Vec ynew = y_ + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      Vec k7 = model_.rhs(ynew, alpha_);
      Vec ev = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      double err = 0;
      for (int i = 0; i < n; ++i) {
        double sk = cfg_.atol + cfg_.rtol * std::max(std::abs(y_[i]), std::abs(ynew[i]));
        double r = ev[i] / sk;
        err += r * r;
      }
      err = std::sqrt(err / n);

      // PI controller (Hairer's constants)
      constexpr double safe = 0.9, beta = 0.04, expo1 = 0.2 - beta * 0.75;
      double fac11 = std::pow(std::max(err, 1e-32), expo1);
      if (err <= 1.0) {
        double fac = fac11 / std::pow(facold_, beta);
        fac = std::max(0.1, std::min(5.0, fac / safe));
        double hnew = h / fac;
        if (rejected_last_) hnew = std::min(hnew, h);
        facold_ = std::max(err, 1e-4);
        rejected_last_ = false;
        if (!ynew.allFinite())
          throw SimulateError("non-finite state at t=" + std::to_string(t_ + h));
        if (ynew.norm() > escape_)
          throw SimulateError("trajectory escaped at t=" + std::to_string(t_ + h));
        out.t0 = t_;
        out.t1 = t_ + h;
        out.y0 = y_;
        out.y1 = ynew;
        out.f0 = f_;
        out.f1 = k7;
        t_ += h;
        y_ = std::move(ynew);
        f_ = std::move(k7);
        h_ = hnew;
        ++accepted_;
        return;
      }
      h_ = h / std::min(5.0, fac11 / safe);
      rejected_last_ = true;
      ++rejected_;
      if (!std::isfinite(err)) h_ = h / 5;
    }
    throw SimulateError("too many step rejections at t=" + std::to_string(t_));
  }

private:
  const VectorFieldModel& model_;
  double alpha_;
  const IntegratorConfig& cfg_;
  double t_;
  Vec y_, f_;
  double h_;
  double facold_ = 1e-4;
  bool rejected_last_ = false;
  double escape_ = 1e6;
  int accepted_ = 0, rejected_ = 0;
};

/// Upward-crossing time of y_k(t) = level inside a step, by bisection on
/// the dense output. Caller guarantees a sign change.
double refine_crossing(const Step& s, int k, double level) {
  double lo = s.t0, hi = s.t1;
  for (int i = 0; i < 100 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
    double mid = (lo + hi) / 2;
    if (s.eval1(mid, k) - level < 0)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace

Trajectory integrate(const VectorFieldModel& model, double alpha, const Vec& x_init, double t0,
                     double t1, const IntegratorConfig& config) {
  if (!x_init.allFinite()) throw SimulateError("initial state is not finite");
  if (!(t1 > t0)) throw SimulateError("empty time span");
  Trajectory traj;
  double h0 = std::min((t1 - t0) / 100, config.max_step);
  Dopri5 stepper(model, alpha, config, t0, x_init, h0);
  traj.t.push_back(t0);
  traj.x.push_back(x_init);
  std::ofstream dump;
  if (!config.dump_path.empty()) {
    dump.open(config.dump_path);
    if (!dump) throw SimulateError("cannot open dump file: " + config.dump_path);
    dump.precision(17);
  }
  Step s;
  while (stepper.t() < t1) {
    stepper.step(t1, s);
    traj.t.push_back(stepper.t());
    traj.x.push_back(stepper.y());
    if (dump.is_open()) {
      dump << stepper.t();
      for (int i = 0; i < model.dimension(); ++i) dump << "," << stepper.y()[i];
      dump << "\n";
    }
  }
  traj.steps_accepted = stepper.accepted();
  traj.steps_rejected = stepper.rejected();
  return traj;
}

CycleObservation observe_cycle(const VectorFieldModel& model, double alpha,
                               const Equilibrium& eq, const IntegratorConfig& config) {
  const int n = model.dimension();
  CycleObservation obs;
  obs.mean = eq.x0;
  obs.amplitude = Vec::Zero(n);
  if (eq.stability != Stability::HopfUnstable) return obs;

  const CVec& q = eq.hopf.q;
  int k = config.section_coordinate;
  if (k < 0) {
    k = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(q[i].real()) > std::abs(q[k].real())) k = i;
  }
  obs.section_coordinate = k;
  const double level = eq.x0[k];
  const double T_guess = 2 * std::numbers::pi / std::abs(eq.hopf.lambda.imag());

  IntegratorConfig cfg = config;
  cfg.max_step = std::min(config.max_step, T_guess / 16);

  Vec re_q = q.real();
  Vec x_init = eq.x0 + (1e-3 * model.scale_norm() / re_q.norm()) * re_q;
  Dopri5 stepper(model, alpha, cfg, 0.0, x_init, T_guess / 200);

  std::ofstream dump;
  if (!config.dump_path.empty()) {
    dump.open(config.dump_path);
    if (!dump) throw SimulateError("cannot open dump file: " + config.dump_path);
    dump.precision(17);
  }

  const int m = config.averaging_periods;
  std::vector<double> tc;            // crossing times
  std::vector<Vec> I_at_tc;          // cumulative integral of x at each crossing
  std::vector<Vec> period_mean;      // mean over each completed period
  Vec I_acc = Vec::Zero(n);          // cumulative integral of x since t=0
  Vec cur_min = Vec::Constant(n, std::numeric_limits<double>::infinity());
  Vec cur_max = Vec::Constant(n, -std::numeric_limits<double>::infinity());
  Vec last_period_min, last_period_max;
  bool have_amp = false;
  bool period_ok = false, mean_ok = false;

  Step s;
  while (stepper.t() < cfg.max_time) {
    double prev_sk = stepper.y()[k] - level;
    stepper.step(cfg.max_time, s);
    if (dump.is_open()) {
      dump << s.t1;
      for (int i = 0; i < n; ++i) dump << "," << s.y1[i];
      dump << "\n";
    }
    // extrema tracking on dense samples
    for (int j = 0; j <= 4; ++j) {
      Vec xs = j == 4 ? s.y1 : s.eval(s.t0 + s.h() * j / 4);
      cur_min = cur_min.cwiseMin(xs);
      cur_max = cur_max.cwiseMax(xs);
    }

    double new_sk = s.y1[k] - level;
    bool crossed = prev_sk < 0 && new_sk >= 0 && s.f1[k] > 0;
    if (!crossed) {
      I_acc += s.integral();
      continue;
    }

    double t_cross = refine_crossing(s, k, level);
    Vec I_here = I_acc + s.integral_to(t_cross);
    I_acc += s.integral();
    tc.push_back(t_cross);
    I_at_tc.push_back(I_here);
    last_period_min = cur_min;
    last_period_max = cur_max;
    have_amp = true;
    cur_min = Vec::Constant(n, std::numeric_limits<double>::infinity());
    cur_max = Vec::Constant(n, -std::numeric_limits<double>::infinity());

    std::size_t c = tc.size();
    if (c >= 2) {
      period_mean.push_back((I_at_tc[c - 1] - I_at_tc[c - 2]) / (tc[c - 1] - tc[c - 2]));
    }
    if (c >= 4) {
      double T1 = tc[c - 1] - tc[c - 2];
      double T2 = tc[c - 2] - tc[c - 3];
      double T3 = tc[c - 3] - tc[c - 4];
      period_ok = std::abs(T1 - T2) <= cfg.period_rtol * T1 &&
                  std::abs(T2 - T3) <= cfg.period_rtol * T1;
    }
    if (period_mean.size() >= 2) {
      const Vec& m1 = period_mean[period_mean.size() - 1];
      const Vec& m2 = period_mean[period_mean.size() - 2];
      double dm = (m1 - m2).norm();
      mean_ok = dm <= cfg.mean_rtol * std::max(m1.norm(), model.scale_norm());
      // during the slow spiral-out the mean moves little in absolute terms
      // while the deviation from the equilibrium is still growing; gate on
      // the change relative to the deviation itself so we only accept a
      // saturated cycle
      double dev = (m1 - eq.x0).norm();
      mean_ok = mean_ok && dm <= cfg.dev_rtol * dev + 1e-13 * model.scale_norm();
    }
    if (period_ok && mean_ok && c >= static_cast<std::size_t>(m + 1)) {
      double t_lo = tc[c - 1 - m], t_hi = tc[c - 1];
      obs.mean = (I_at_tc[c - 1] - I_at_tc[c - 1 - m]) / (t_hi - t_lo);
      obs.period = (t_hi - t_lo) / m;
      obs.periods_averaged = m;
      obs.settle_time = t_lo;
      obs.converged = true;
      obs.amplitude = (last_period_max - last_period_min) / 2;
      (void)have_amp;
      return obs;
    }
  }
  throw SimulateError("no cycle found within max time " + std::to_string(cfg.max_time) +
                      " (crossings: " + std::to_string(tc.size()) + ")");
}

DeviationRecord measure_deviation(const VectorFieldModel& model, double alpha,
                                  const Equilibrium& eq, const MeanPrediction& pred,
                                  const IntegratorConfig& config) {
  DeviationRecord rec;
  rec.obs = observe_cycle(model, alpha, eq, config);
  rec.d_pred = pred.K * pred.mu;
  if (!rec.obs.converged) {
    rec.d_num = Vec::Zero(model.dimension());
    rec.err_norm = rec.d_pred.norm();
    return rec;
  }
  rec.d_num = rec.obs.mean - eq.x0;
  rec.err_norm = (rec.d_num - rec.d_pred).norm();
  double dn = rec.d_num.norm(), dp = rec.d_pred.norm();
  rec.cosine = (dn > 0 && dp > 0) ? rec.d_num.dot(rec.d_pred) / (dn * dp) : 0;
  if (pred.cycle_predicted && pred.r_w) {
    int k = rec.obs.section_coordinate;
    double amp_pred = 2 * (*pred.r_w) * std::abs(eq.hopf.q[k]);
    if (amp_pred > 0) rec.amplitude_ratio = rec.obs.amplitude[k] / amp_pred;
  }
  return rec;
}

}  // namespace hopfmean
