#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <vector>

#include "cpforce/errors.hpp"

namespace cpforce::quad {

// Gauss 7 / Kronrod 15 node pair on [-1, 1]. Kronrod abscissae with the
// embedded Gauss weights in g (zero where the node is Kronrod-only).
struct GK15 {
  static constexpr int n = 15;
  // clang-format off
  static constexpr std::array<double, 15> x = {
      -0.991455371120812639206854697526329,
      -0.949107912342758524526189684047851,
      -0.864864423359769072789712788640926,
      -0.741531185599394439863864773280788,
      -0.586087235467691130294144838258730,
      -0.405845151377397166906606412076961,
      -0.207784955007898467600689403773245,
       0.0,
       0.207784955007898467600689403773245,
       0.405845151377397166906606412076961,
       0.586087235467691130294144838258730,
       0.741531185599394439863864773280788,
       0.864864423359769072789712788640926,
       0.949107912342758524526189684047851,
       0.991455371120812639206854697526329};
  static constexpr std::array<double, 15> wk = {
      0.022935322010529224963732008058970,
      0.063092092629978553290700663189204,
      0.104790010322250183839876322541518,
      0.140653259715525918745189590510238,
      0.169004726639267902826583426598550,
      0.190350578064785409913256402421014,
      0.204432940075298892414161999234649,
      0.209482141084727828012999174891714,
      0.204432940075298892414161999234649,
      0.190350578064785409913256402421014,
      0.169004726639267902826583426598550,
      0.140653259715525918745189590510238,
      0.104790010322250183839876322541518,
      0.063092092629978553290700663189204,
      0.022935322010529224963732008058970};
  static constexpr std::array<double, 15> wg = {
      0.0,
      0.129484966168869693270611432679082,
      0.0,
      0.279705391489276667901467771423780,
      0.0,
      0.381830050505118944950369775488975,
      0.0,
      0.417959183673469387755102040816327,
      0.0,
      0.381830050505118944950369775488975,
      0.0,
      0.279705391489276667901467771423780,
      0.0,
      0.129484966168869693270611432679082};
  // clang-format on
};

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;      // absolute floor; 0 means pure relative control
  std::size_t max_panels = 20000;
};

/// Compensated (Neumaier) accumulator; summation order fixed by the caller.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <std::size_t K>
using VecC = std::array<std::complex<double>, K>;

namespace detail {

template <std::size_t K>
struct PanelResult {
  VecC<K> integral{};
  double error = 0.0;  // max over components of |K15 - G7|-based estimate
};

template <std::size_t K, typename F>
PanelResult<K> gk15_panel(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  VecC<K> acc_k{}, acc_g{};
  for (int i = 0; i < GK15::n; ++i) {
    const VecC<K> y = f(mid + half * GK15::x[i]);
    for (std::size_t c = 0; c < K; ++c) {
      acc_k[c] += GK15::wk[i] * y[c];
      acc_g[c] += GK15::wg[i] * y[c];
    }
  }
  PanelResult<K> r;
  double err = 0.0;
  for (std::size_t c = 0; c < K; ++c) {
    r.integral[c] = half * acc_k[c];
    // raw |K15 - G7| difference; conservative but reliable
    err = std::max(err, std::abs(half * (acc_k[c] - acc_g[c])));
  }
  r.error = err;
  return r;
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of a K-component complex integrand
/// over [a, b]. The initial panel list may pre-split the interval (used for
/// oscillation-aware subdivision); panels are then refined worst-first until
/// every component meets rel_tol (or abs_tol where the component is tiny).
template <std::size_t K, typename F>
VecC<K> integrate(const F& f, const std::vector<double>& breakpoints,
                  const Options& opt, double* error_out = nullptr) {
  struct Node {
    double a, b;
    detail::PanelResult<K> r;
    bool operator<(const Node& o) const { return r.error < o.r.error; }
  };
  if (breakpoints.size() < 2)
    throw std::invalid_argument("integrate: need at least one interval");

  std::priority_queue<Node> heap;
  VecC<K> total{};
  double total_err = 0.0;
  std::size_t panels = 0;

  auto push = [&](double a, double b) {
    Node n{a, b, detail::gk15_panel<K>(f, a, b)};
    total_err += n.r.error;
    for (std::size_t c = 0; c < K; ++c) total[c] += n.r.integral[c];
    heap.push(std::move(n));
    ++panels;
  };

  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    push(breakpoints[i], breakpoints[i + 1]);

  auto converged = [&]() {
    double scale = opt.abs_tol;
    for (std::size_t c = 0; c < K; ++c)
      scale = std::max(scale, opt.rel_tol * std::abs(total[c]));
    return total_err <= std::max(scale, 1e-300);
  };

  while (!converged()) {
    if (panels >= opt.max_panels) {
      double worst = 0.0;
      for (std::size_t c = 0; c < K; ++c)
        worst = std::max(worst, std::abs(total[c]));
      throw QuadratureError("adaptive quadrature: panel budget exhausted",
                            worst, total_err);
    }
    Node n = heap.top();
    heap.pop();
    total_err -= n.r.error;
    for (std::size_t c = 0; c < K; ++c) total[c] -= n.r.integral[c];
    const double mid = 0.5 * (n.a + n.b);
    push(n.a, mid);
    push(mid, n.b);
    --panels;  // replaced one panel by two
  }
  if (error_out) *error_out = total_err;
  return total;
}

template <std::size_t K, typename F>
VecC<K> integrate(const F& f, double a, double b, const Options& opt,
                  double* error_out = nullptr) {
  return integrate<K>(f, std::vector<double>{a, b}, opt, error_out);
}

/// Scalar real-valued convenience wrapper.
template <typename F>
double integrate_real(const F& f, double a, double b, const Options& opt,
                      double* error_out = nullptr) {
  auto g = [&f](double x) -> VecC<1> { return {std::complex<double>(f(x), 0.0)}; };
  return integrate<1>(g, a, b, opt, error_out)[0].real();
}

/// Integral over [a, ∞) of an exponentially decaying integrand with decay
/// scale `scale` (e^{-x/scale} envelope): fixed-length windows of growing
/// size are summed until three consecutive windows are negligible.
template <std::size_t K, typename F>
VecC<K> integrate_decaying_tail(const F& f, double a, double scale,
                                const Options& opt, double* error_out = nullptr) {
  VecC<K> total{};
  double err_acc = 0.0;
  double lo = a;
  double len = 10.0 * scale;
  int quiet = 0;
  for (int seg = 0; seg < 64; ++seg) {
    double e = 0.0;
    const VecC<K> part = integrate<K>(f, lo, lo + len, opt, &e);
    err_acc += e;
    double rel = 0.0;
    for (std::size_t c = 0; c < K; ++c) {
      total[c] += part[c];
      const double t = std::abs(total[c]);
      if (t > 0.0) rel = std::max(rel, std::abs(part[c]) / t);
    }
    lo += len;
    len *= 2.0;
    quiet = (rel < opt.rel_tol) ? quiet + 1 : 0;
    if (quiet >= 3) {
      if (error_out) *error_out = err_acc;
      return total;
    }
  }
  double worst = 0.0;
  for (std::size_t c = 0; c < K; ++c) worst = std::max(worst, std::abs(total[c]));
  throw QuadratureError("semi-infinite quadrature: tail did not settle", worst,
                        err_acc);
}

}  // namespace cpforce::quad
