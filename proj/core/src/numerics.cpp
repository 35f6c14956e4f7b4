#include "slipform/numerics.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_fit.h>
#include <gsl/gsl_min.h>
#include <gsl/gsl_roots.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "slipform/error.hpp"

namespace slipform::numerics {

namespace {

// GSL's default handler aborts; every status is checked here instead.
void silence_gsl() {
  static std::once_flag flag;
  std::call_once(flag, [] { gsl_set_error_handler_off(); });
}

struct ScalarContext {
  const std::function<double(double)> *f;
  double target;
};

double scalar_trampoline(double x, void *params) {
  auto *ctx = static_cast<ScalarContext *>(params);
  return (*ctx->f)(x) - ctx->target;
}

}  // namespace

Minimum golden_section(const std::function<double(double)> &f, double lo, double guess,
                       double hi, double tol) {
  const double f_lo = f(lo);
  const double f_guess = f(guess);
  const double f_hi = f(hi);
  Minimum best{guess, f_guess};
  if (f_lo < best.value) best = {lo, f_lo};
  if (f_hi < best.value) best = {hi, f_hi};
  if (!(f_guess < f_lo && f_guess < f_hi)) return best;
  silence_gsl();

  ScalarContext ctx{&f, 0.0};
  gsl_function fn{&scalar_trampoline, &ctx};
  const auto deleter = [](gsl_min_fminimizer *m) { gsl_min_fminimizer_free(m); };
  std::unique_ptr<gsl_min_fminimizer, decltype(deleter)> solver(
      gsl_min_fminimizer_alloc(gsl_min_fminimizer_goldensection), deleter);
  if (gsl_min_fminimizer_set_with_values(solver.get(), &fn, guess, f_guess, lo, f_lo, hi, f_hi) !=
      GSL_SUCCESS) {
    return best;
  }
  for (int iter = 0; iter < 500; ++iter) {
    if (gsl_min_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
    const double a = gsl_min_fminimizer_x_lower(solver.get());
    const double b = gsl_min_fminimizer_x_upper(solver.get());
    if (b - a <= tol) break;
  }
  const double x = gsl_min_fminimizer_x_minimum(solver.get());
  const double fx = gsl_min_fminimizer_f_minimum(solver.get());
  if (fx < best.value) best = {x, fx};
  return best;
}

double bisect_increasing(const std::function<double(double)> &f, double target, double lo,
                         double hi, double tol) {
  silence_gsl();
  ScalarContext ctx{&f, target};
  gsl_function fn{&scalar_trampoline, &ctx};
  const double f_lo = scalar_trampoline(lo, &ctx);
  const double f_hi = scalar_trampoline(hi, &ctx);
  if (f_lo >= 0.0) return lo;
  if (f_hi <= 0.0) return hi;
  const auto deleter = [](gsl_root_fsolver *s) { gsl_root_fsolver_free(s); };
  std::unique_ptr<gsl_root_fsolver, decltype(deleter)> solver(
      gsl_root_fsolver_alloc(gsl_root_fsolver_bisection), deleter);
  gsl_root_fsolver_set(solver.get(), &fn, lo, hi);
  for (int iter = 0; iter < 400; ++iter) {
    if (gsl_root_fsolver_iterate(solver.get()) != GSL_SUCCESS) break;
    const double a = gsl_root_fsolver_x_lower(solver.get());
    const double b = gsl_root_fsolver_x_upper(solver.get());
    if (b - a <= tol) break;
  }
  return gsl_root_fsolver_root(solver.get());
}

std::vector<Vec2> lower_convex_hull(const std::vector<Vec2> &pts) {
  std::vector<Vec2> hull;
  hull.reserve(pts.size());
  for (const Vec2 &p : pts) {
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 1] - hull[hull.size() - 2], p - hull[hull.size() - 2]) <= 0.0) {
      hull.pop_back();
    }
    hull.push_back(p);
  }
  return hull;
}

double interpolate(const std::vector<Vec2> &poly, double x) {
  if (poly.empty()) throw Error(Errc::InvalidRange, "empty polyline");
  if (x <= poly.front().x) return poly.front().y;
  if (x >= poly.back().x) return poly.back().y;
  const auto it = std::lower_bound(poly.begin(), poly.end(), x,
                                   [](const Vec2 &p, double v) { return p.x < v; });
  const Vec2 q = *it;
  const Vec2 p = *(it - 1);
  const double t = (x - p.x) / (q.x - p.x);
  return p.y + t * (q.y - p.y);
}

const QuadratureRule &gauss_legendre(unsigned n) {
  static std::mutex mutex;
  static std::map<unsigned, std::unique_ptr<QuadratureRule>> cache;
  const std::lock_guard<std::mutex> lock(mutex);
  auto &slot = cache[n];
  if (!slot) {
    if (n == 0) throw Error(Errc::InvalidRange, "quadrature needs at least one node");
    // legendre_p_zeros returns the nonnegative zeros in increasing order.
    const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
    auto rule = std::make_unique<QuadratureRule>();
    const auto add = [&](double x) {
      const double dp = boost::math::legendre_p_prime<double>(static_cast<int>(n), x);
      rule->nodes.push_back(x);
      rule->weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
    };
    for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
      if (*it != 0.0) add(-*it);
    }
    for (double z : zeros) add(z);
    slot = std::move(rule);
  }
  return *slot;
}

namespace {

struct SimplexContext {
  const std::function<double(const std::vector<double> &)> *f;
  std::vector<double> scratch;
};

double simplex_trampoline(const gsl_vector *v, void *params) {
  auto *ctx = static_cast<SimplexContext *>(params);
  for (std::size_t i = 0; i < ctx->scratch.size(); ++i) ctx->scratch[i] = gsl_vector_get(v, i);
  const double value = (*ctx->f)(ctx->scratch);
  return std::isfinite(value) ? value : GSL_POSINF;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double> &)> &f,
                          const std::vector<double> &x0, const std::vector<double> &step,
                          double size_tol, std::size_t max_iter) {
  const std::size_t n = x0.size();
  if (n == 0 || step.size() != n) throw Error(Errc::InvalidRange, "simplex dimension mismatch");
  silence_gsl();
  SimplexContext ctx{&f, std::vector<double>(n)};
  gsl_multimin_function fn{&simplex_trampoline, n, &ctx};

  const auto vec_deleter = [](gsl_vector *v) { gsl_vector_free(v); };
  std::unique_ptr<gsl_vector, decltype(vec_deleter)> x(gsl_vector_alloc(n), vec_deleter);
  std::unique_ptr<gsl_vector, decltype(vec_deleter)> ss(gsl_vector_alloc(n), vec_deleter);
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, x0[i]);
    gsl_vector_set(ss.get(), i, step[i]);
  }
  const auto min_deleter = [](gsl_multimin_fminimizer *m) { gsl_multimin_fminimizer_free(m); };
  std::unique_ptr<gsl_multimin_fminimizer, decltype(min_deleter)> solver(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), min_deleter);
  gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), ss.get());

  SimplexResult out{{}, 0.0, 0, false};
  for (; out.iterations < max_iter; ++out.iterations) {
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(solver.get());
    if (gsl_multimin_test_size(size, size_tol) == GSL_SUCCESS) {
      out.converged = true;
      break;
    }
  }
  out.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.x[i] = gsl_vector_get(solver->x, i);
  out.value = solver->fval;
  return out;
}

LineFit least_squares(const std::vector<double> &x, const std::vector<double> &y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(Errc::InvalidRange, "least squares needs >= 2 points");
  silence_gsl();
  double c0 = 0.0, c1 = 0.0, cov00 = 0.0, cov01 = 0.0, cov11 = 0.0, sumsq = 0.0;
  gsl_fit_linear(x.data(), 1, y.data(), 1, n, &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
  if (!std::isfinite(c1)) throw Error(Errc::InvalidRange, "least squares needs distinct abscissae");
  return {c1, c0};
}

double log_log_slope(const std::vector<double> &x, const std::vector<double> &y) {
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw Error(Errc::InvalidRange, "log-log fit needs positive data");
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return least_squares(lx, ly).slope;
}

}  // namespace slipform::numerics
