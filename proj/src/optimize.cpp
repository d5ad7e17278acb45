#include "ionstate/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ionstate::optimize {

namespace {

double safe_eval(const Objective& f, std::span<const double> x) {
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

Minimum nelder_mead(const Objective& f, std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  for (std::size_t i = 0; i < n; ++i) {
    const double step = start[i] != 0.0 ? options.initial_step * std::abs(start[i]) : options.initial_step;
    simplex[i + 1][i] += step;
  }
  std::vector<double> values(n + 1);
  int evals = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    values[i] = safe_eval(f, simplex[i]);
    ++evals;
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  bool converged = false;
  while (evals < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t d = 0; d < n; ++d) {
        spread = std::max(spread, std::abs(simplex[i][d] - simplex[best][d]));
      }
    }
    if (spread < options.x_tolerance ||
        (std::isfinite(values[worst]) &&
         std::abs(values[worst] - values[best]) <= options.f_tolerance * (1.0 + std::abs(values[best])) &&
         spread < std::sqrt(options.x_tolerance))) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[i][d] / n;
    }
    auto blend = [&](double t, std::vector<double>& out) {
      for (std::size_t d = 0; d < n; ++d) out[d] = centroid[d] + t * (simplex[worst][d] - centroid[d]);
    };

    blend(-1.0, trial);
    const double fr = safe_eval(f, trial);
    ++evals;
    if (fr < values[best]) {
      blend(-2.0, trial2);
      const double fe = safe_eval(f, trial2);
      ++evals;
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    blend(outside ? -0.5 : 0.5, trial2);
    const double fc = safe_eval(f, trial2);
    ++evals;
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d) simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
      values[i] = safe_eval(f, simplex[i]);
      ++evals;
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return {simplex[best], values[best], evals, converged};
}

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tolerance) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > tolerance * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Minimum coordinate_polish(const Objective& f, Minimum start, std::span<const double> radius, int sweeps) {
  Minimum cur = std::move(start);
  std::vector<double> x = cur.x;
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t d = 0; d < x.size(); ++d) {
      auto line = [&](double v) {
        std::vector<double> y = x;
        y[d] = v;
        ++cur.evaluations;
        return safe_eval(f, y);
      };
      const double v = golden_section(line, x[d] - radius[d], x[d] + radius[d], 1e-12);
      const double fv = line(v);
      if (fv < cur.value) {
        x[d] = v;
        cur.value = fv;
      }
    }
  }
  cur.x = x;
  return cur;
}

Eigen::MatrixXd hessian(const Objective& f, std::span<const double> x, std::span<const double> steps) {
  const std::size_t n = x.size();
  Eigen::MatrixXd h(n, n);
  std::vector<double> y(x.begin(), x.end());
  const double f0 = f(y);
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = steps[i];
    y[i] = x[i] + hi;
    const double fp = f(y);
    y[i] = x[i] - hi;
    const double fm = f(y);
    y[i] = x[i];
    h(i, i) = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double hj = steps[j];
      double acc = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          y[i] = x[i] + si * hi;
          y[j] = x[j] + sj * hj;
          acc += si * sj * f(y);
        }
      }
      y[i] = x[i];
      y[j] = x[j];
      h(i, j) = h(j, i) = acc / (4.0 * hi * hj);
    }
  }
  return h;
}

}  // namespace ionstate::optimize
