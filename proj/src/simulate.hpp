#pragma once

#include "equilibria.hpp"
#include "normalform.hpp"

namespace hopfmean {

struct SimulateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegratorConfig {
  double rtol = 1e-9;
  double atol = 1e-11;
  double max_step = std::numeric_limits<double>::infinity();
  double max_time = 1e6;
  // cycle-observation gates
  double period_rtol = 1e-6;
  double mean_rtol = 1e-7;
  // successive per-period means must also agree relative to the mean's
  // deviation from the equilibrium; this is what rejects the slow
  // spiral-out transient at small mu
  double dev_rtol = 1e-5;
  int averaging_periods = 8;
  int section_coordinate = -1;  // -1: pick argmax |Re q_k|
  std::string dump_path;        // optional CSV (t, x1..xn) trajectory dump
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec> x;
  int steps_accepted = 0;
  int steps_rejected = 0;
};

struct CycleObservation {
  double period = 0;
  Vec mean;
  Vec amplitude;
  int periods_averaged = 0;
  double settle_time = 0;
  bool converged = false;
  int section_coordinate = -1;
};

struct DeviationRecord {
  CycleObservation obs;
  Vec d_num;       // measured mean - x0
  Vec d_pred;      // K * mu
  double err_norm = 0;
  double cosine = 0;
  double amplitude_ratio = 0;  // measured / predicted at the section coordinate
};

/// Adaptive Dormand-Prince 5(4) with PI step-size control.
Trajectory integrate(const VectorFieldModel& model, double alpha, const Vec& x_init, double t0,
                     double t1, const IntegratorConfig& config = {});

/// Settle onto the limit cycle surrounding a Hopf-unstable equilibrium
/// and measure its period, mean (dense-output quadrature over the final
/// full periods), and per-coordinate amplitude.
CycleObservation observe_cycle(const VectorFieldModel& model, double alpha,
                               const Equilibrium& eq, const IntegratorConfig& config = {});

/// Compare the analytic prediction with the measured cycle mean.
DeviationRecord measure_deviation(const VectorFieldModel& model, double alpha,
                                  const Equilibrium& eq, const MeanPrediction& pred,
                                  const IntegratorConfig& config = {});

}  // namespace hopfmean
