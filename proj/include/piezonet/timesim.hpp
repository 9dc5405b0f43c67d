#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "piezonet/coupled.hpp"
#include "piezonet/errors.hpp"

namespace piezonet {

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  Eigen::MatrixXd states;  // one column per sample

  std::size_t samples() const { return times.size(); }
};

using Forcing = std::function<double(double)>;

/// Largest step the integrator accepts: 5% of the fastest period.
inline double max_time_step(const CoupledSystem& sys) {
  const double fastest = eigen(sys).max_modulus;
  return 0.05 * 2.0 * std::numbers::pi / fastest;
}

/// Classical fourth-order Runge-Kutta on x_dot = A x + b f(t), fixed step.
inline Trajectory integrate(const CoupledSystem& sys, const Eigen::VectorXd& x0,
                            const Forcing& forcing, double dt, double duration) {
  if (x0.size() != sys.size()) throw ParameterError("initial state has the wrong dimension");
  if (!(duration > 0.0)) throw ParameterError("simulation time must be positive");
  const double limit = max_time_step(sys);
  if (!(dt > 0.0 && dt <= limit)) {
    throw ParameterError("time step " + std::to_string(dt) +
                         " violates dt <= 0.05 * 2 pi / max|lambda| = " + std::to_string(limit));
  }
  const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  const Eigen::MatrixXd a = sys.state_matrix();
  const Eigen::VectorXd b = sys.input_vector();
  auto rhs = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    if (forcing) return a * x + b * forcing(t);
    return a * x;
  };

  Trajectory out;
  out.dt = dt;
  out.times.resize(steps + 1);
  out.states.resize(sys.size(), static_cast<Eigen::Index>(steps + 1));
  Eigen::VectorXd x = x0;
  out.times[0] = 0.0;
  out.states.col(0) = x;
  for (std::size_t s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s - 1) * dt;
    const Eigen::VectorXd k1 = rhs(t, x);
    const Eigen::VectorXd k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = rhs(t + dt, x + dt * k3);
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) {
      throw NumericalError("integration diverged at sample " + std::to_string(s));
    }
    out.times[s] = static_cast<double>(s) * dt;
    out.states.col(static_cast<Eigen::Index>(s)) = x;
  }
  return out;
}

inline Trajectory integrate(const CoupledSystem& sys, const Eigen::VectorXd& x0, double dt,
                            double duration) {
  return integrate(sys, x0, Forcing{}, dt, duration);
}

/// max |dH/dt + P_diss| / max(H(0), eps), dH/dt by centred differences.
inline double energy_residual(const CoupledSystem& sys, const Trajectory& traj) {
  if (traj.samples() < 3) throw ParameterError("energy residual needs at least 3 samples");
  std::vector<EnergyBalance> eb;
  eb.reserve(traj.samples());
  for (std::size_t s = 0; s < traj.samples(); ++s) {
    eb.push_back(total_energy(sys, traj.states.col(static_cast<Eigen::Index>(s))));
  }
  const double scale = std::max(eb.front().energy, std::numeric_limits<double>::min());
  double worst = 0.0;
  for (std::size_t s = 1; s + 1 < eb.size(); ++s) {
    const double rate = (eb[s + 1].energy - eb[s - 1].energy) / (2.0 * traj.dt);
    worst = std::max(worst, std::abs(rate + eb[s].dissipation));
  }
  return worst / scale;
}

/// Output signal c x at every sample.
inline std::vector<double> output_history(const CoupledSystem& sys, const Trajectory& traj) {
  const Eigen::RowVectorXd c = sys.output_vector();
  const Eigen::RowVectorXd y = c * traj.states;
  return {y.data(), y.data() + y.size()};
}

/// Exponential decay rate from the local maxima of |signal|, fitted by least
/// squares on their logarithms. Peaks below `floor` times the first are ignored.
inline double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& signal,
                             double floor = 1e-8) {
  std::vector<double> pt, pl;
  double first = 0.0;
  for (std::size_t s = 1; s + 1 < signal.size(); ++s) {
    const double v = std::abs(signal[s]);
    if (v >= std::abs(signal[s - 1]) && v > std::abs(signal[s + 1])) {
      if (pt.empty()) first = v;
      if (v < floor * first) break;
      pt.push_back(times[s]);
      pl.push_back(std::log(v));
    }
  }
  if (pt.size() < 3) throw NumericalError("too few envelope peaks to fit a decay rate");
  const auto n = static_cast<double>(pt.size());
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  for (std::size_t i = 0; i < pt.size(); ++i) {
    st += pt[i];
    sl += pl[i];
    stt += pt[i] * pt[i];
    stl += pt[i] * pl[i];
  }
  const double slope = (n * stl - st * sl) / (n * stt - st * st);
  return -slope;
}

}  // namespace piezonet
