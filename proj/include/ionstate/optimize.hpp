#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ionstate::optimize {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  int max_evaluations = 20000;
  double x_tolerance = 1e-10;
  double f_tolerance = 1e-12;
  double initial_step = 0.1;
};

struct Minimum {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Downhill simplex minimization. Non-finite objective values are treated as +inf.
Minimum nelder_mead(const Objective& f, std::vector<double> start, const NelderMeadOptions& options = {});

/// Golden-section search for a minimum of a unimodal function on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi, double tolerance = 1e-10);

/// Coordinate-wise golden-section polish around `x` within +/- `radius` per coordinate.
Minimum coordinate_polish(const Objective& f, Minimum start, std::span<const double> radius, int sweeps = 3);

/// Central finite-difference Hessian with per-coordinate steps.
Eigen::MatrixXd hessian(const Objective& f, std::span<const double> x, std::span<const double> steps);

}  // namespace ionstate::optimize
