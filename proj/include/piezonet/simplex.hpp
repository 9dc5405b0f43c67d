#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

namespace piezonet {

struct SimplexOptions {
  double initial_step = 0.5;      // edge length of the starting simplex
  double tolerance = 1e-6;        // stop when every vertex is this close to the best
  std::size_t max_iterations = 500;
};

struct SimplexResult {
  Eigen::VectorXd point;
  double value = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead minimization with the standard coefficients
/// (reflect 1, expand 2, contract 1/2, shrink 1/2).
template <typename Fn>
SimplexResult nelder_mead(Fn&& fn, const Eigen::VectorXd& start, const SimplexOptions& opts = {}) {
  const Eigen::Index n = start.size();
  std::vector<Eigen::VectorXd> x(static_cast<std::size_t>(n + 1), start);
  std::vector<double> f(static_cast<std::size_t>(n + 1));
  SimplexResult out;
  auto eval = [&](const Eigen::VectorXd& p) {
    ++out.evaluations;
    const double v = fn(p);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  for (Eigen::Index i = 0; i < n; ++i) x[static_cast<std::size_t>(i + 1)](i) += opts.initial_step;
  for (std::size_t i = 0; i < x.size(); ++i) f[i] = eval(x[i]);

  std::vector<std::size_t> idx(x.size());
  auto sort = [&] {
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    std::vector<Eigen::VectorXd> xs;
    std::vector<double> fs;
    for (std::size_t i : idx) {
      xs.push_back(x[i]);
      fs.push_back(f[i]);
    }
    x.swap(xs);
    f.swap(fs);
  };
  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) d = std::max(d, (x[i] - x[0]).cwiseAbs().maxCoeff());
    return d;
  };

  const std::size_t worst = static_cast<std::size_t>(n);
  for (; out.iterations < opts.max_iterations; ++out.iterations) {
    sort();
    if (diameter() < opts.tolerance) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < worst; ++i) centroid += x[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - x[worst]);
    const double fr = eval(reflected);
    if (fr < f[0]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - x[worst]);
      const double fe = eval(expanded);
      if (fe < fr) {
        x[worst] = expanded;
        f[worst] = fe;
      } else {
        x[worst] = reflected;
        f[worst] = fr;
      }
      continue;
    }
    if (fr < f[worst - 1]) {
      x[worst] = reflected;
      f[worst] = fr;
      continue;
    }
    const bool outside = fr < f[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (x[worst] - centroid));
    const double fc = eval(contracted);
    if (fc < (outside ? fr : f[worst])) {
      x[worst] = contracted;
      f[worst] = fc;
      continue;
    }
    for (std::size_t i = 1; i < x.size(); ++i) {
      x[i] = x[0] + 0.5 * (x[i] - x[0]);
      f[i] = eval(x[i]);
    }
  }
  sort();
  if (!out.converged && diameter() < opts.tolerance) out.converged = true;
  out.point = x[0];
  out.value = f[0];
  return out;
}

}  // namespace piezonet
