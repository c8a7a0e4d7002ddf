#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "nonstat/error.hpp"

namespace nonstat {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  long evals = 0;
  bool at_floor = false;  // error estimate limited by rounding, not truncation
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1] (QUADPACK dqk15).
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kGk15WK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kG7W[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
QuadResult gk15_panel(const F& f, double a, double b) {
  const double hlgth = 0.5 * (b - a);
  const double centr = 0.5 * (a + b);
  double fv[15];
  for (int j = 0; j < 7; ++j) {
    fv[j] = f(centr - hlgth * kGk15Nodes[j]);
    fv[14 - j] = f(centr + hlgth * kGk15Nodes[j]);
  }
  fv[7] = f(centr);
  double resk = kGk15WK[7] * fv[7];
  double resg = kG7W[3] * fv[7];
  double resabs = std::abs(resk);
  for (int j = 0; j < 7; ++j) {
    resk += kGk15WK[j] * (fv[j] + fv[14 - j]);
    resabs += kGk15WK[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
  }
  for (int j = 0; j < 3; ++j) {
    // Gauss points are the odd-index Kronrod nodes.
    resg += kG7W[j] * (fv[2 * j + 1] + fv[13 - 2 * j]);
  }
  const double reskh = resk * 0.5;
  double resasc = kGk15WK[7] * std::abs(fv[7] - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kGk15WK[j] * (std::abs(fv[j] - reskh) + std::abs(fv[14 - j] - reskh));
  }
  QuadResult r;
  r.value = resk * hlgth;
  resabs *= std::abs(hlgth);
  resasc *= std::abs(hlgth);
  double err = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  r.error = std::max(err, 50.0 * eps * resabs);
  r.evals = 15;
  return r;
}

template <class F>
void adapt_rec(const F& f, double a, double b, double tol, int depth, int max_depth,
               QuadResult& total) {
  QuadResult r = gk15_panel(f, a, b);
  total.evals += r.evals;
  if (r.error <= tol || depth >= max_depth || (b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(a) + std::abs(b))) {
    total.value += r.value;
    total.error += r.error;
    return;
  }
  double m = 0.5 * (a + b);
  adapt_rec(f, a, m, 0.5 * tol, depth + 1, max_depth, total);
  adapt_rec(f, m, b, 0.5 * tol, depth + 1, max_depth, total);
}

}  // namespace detail

// Adaptive Gauss-Kronrod on a finite interval.
template <class F>
QuadResult integrate(const F& f, double a, double b, double rel_tol = 1e-11,
                     double abs_tol = 0.0, int max_depth = 55) {
  if (a == b) return {};
  QuadResult first = detail::gk15_panel(f, a, b);
  double target = std::max(abs_tol, rel_tol * std::max(std::abs(first.value), 1e-300));
  QuadResult total;
  detail::adapt_rec(f, a, b, target, 0, max_depth, total);
  // If the first-pass magnitude badly overestimated the result, refine once
  // against the actual value.
  double want = std::max(abs_tol, rel_tol * std::max(std::abs(total.value), 1e-300));
  if (total.error > want && want < 0.5 * target) {
    QuadResult redo;
    detail::adapt_rec(f, a, b, want, 0, max_depth, redo);
    redo.evals += total.evals;
    total = redo;
  }
  return total;
}

// Adaptive integral over [a, inf) via u = a + t/(1-t).
template <class F>
QuadResult integrate_semi_inf(const F& f, double a, double rel_tol = 1e-11,
                              double abs_tol = 0.0, int max_depth = 55) {
  auto g = [&](double t) {
    double om = 1.0 - t;
    double u = a + t / om;
    double v = f(u);
    return v / (om * om);
  };
  return integrate(g, 0.0, 1.0, rel_tol, abs_tol, max_depth);
}

struct LogQuadResult {
  double log_value = -std::numeric_limits<double>::infinity();
  double rel_err = 0.0;
  long evals = 0;
};

// Walk from s0 in direction dir (+1/-1) until g drops by `drop` below ref.
template <class G>
double find_drop_point(const G& g, double s0, double dir, double ref, double drop,
                       double step0 = 0.25, int max_steps = 400) {
  double step = step0;
  double s = s0;
  for (int i = 0; i < max_steps; ++i) {
    double snew = s + dir * step;
    double v = g(snew);
    if (!std::isfinite(v) || v < ref - drop) return snew;
    s = snew;
    step *= 1.6;
  }
  return s;
}

// log of the integral of exp(g(s)) over [lo, hi]. The integrand may span many
// orders of magnitude; a scan plus local refinement locates the peak and the
// integral is computed relative to it.
template <class G>
LogQuadResult integrate_exp_log(const G& g, double lo, double hi,
                                double rel_tol = 1e-11, int scan_points = 257) {
  LogQuadResult out;
  if (!(hi > lo)) return out;
  double smax = lo, gmax = -std::numeric_limits<double>::infinity();
  const double h = (hi - lo) / (scan_points - 1);
  for (int i = 0; i < scan_points; ++i) {
    double s = lo + h * i;
    double v = g(s);
    if (v > gmax) {
      gmax = v;
      smax = s;
    }
  }
  if (!std::isfinite(gmax)) return out;
  // Golden-section refinement around the scanned maximum.
  double a = std::max(lo, smax - h), b = std::min(hi, smax + h);
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-14 * (1.0 + std::abs(a)); ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = g(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = g(x1);
    }
  }
  double speak = 0.5 * (a + b);
  double gpk = g(speak);
  if (gpk < gmax) { gpk = gmax; speak = smax; }
  auto f = [&](double s) {
    double v = g(s) - gpk;
    return v < -746.0 ? 0.0 : std::exp(v);
  };
  QuadResult r1, r2;
  if (speak > lo) r1 = integrate(f, lo, speak, 0.5 * rel_tol);
  if (speak < hi) r2 = integrate(f, speak, hi, 0.5 * rel_tol);
  double total = r1.value + r2.value;
  out.evals = r1.evals + r2.evals;
  if (total <= 0.0) return out;
  out.log_value = gpk + std::log(total);
  out.rel_err = (r1.error + r2.error) / total;
  return out;
}

}  // namespace nonstat
