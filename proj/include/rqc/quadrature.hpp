#pragma once

// Quadrature primitives: globally adaptive Gauss-Kronrod (7/15) for smooth,
// possibly complex integrands, and composite Simpson with a Richardson error
// estimate on uniform grids.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <span>
#include <type_traits>
#include <vector>

namespace rqc::quad {

template <typename T> struct Estimate {
  T value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

// Abscissae of the 15-point Kronrod rule on [0, 1] (symmetric half); odd
// indices are the 7-point Gauss nodes.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T> double magnitude(const T &v) { return std::abs(v); }

template <typename T, typename F>
std::pair<T, double> gk15(F &f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(centre);
  T kronrod = fc * wgk[7];
  T gauss = fc * wg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    const T sum = f(centre - dx) + f(centre + dx);
    kronrod += sum * wgk[j];
    if (j % 2 == 1)
      gauss += sum * wg[j / 2];
  }
  return {kronrod * half, magnitude((kronrod - gauss) * half)};
}

} // namespace detail

/// Globally adaptive G7/K15 on [a, b]. Stops when the summed error estimate
/// drops below max(abs_tol, rel_tol * |I|) or after max_intervals bisections.
/// Intervals are summed in left-to-right order so the result is independent
/// of the refinement history.
template <typename F>
auto integrate_adaptive(F &&f, double a, double b, double abs_tol,
                        double rel_tol = 0.0, std::size_t initial_intervals = 1,
                        std::size_t max_intervals = 2000) {
  using T = std::decay_t<decltype(f(a))>;
  struct Piece {
    double lo, hi;
    T value;
    double error;
  };
  struct ByError {
    bool operator()(const Piece &l, const Piece &r) const {
      return l.error < r.error;
    }
  };

  Estimate<T> out;
  if (a == b)
    return Estimate<T>{T{}, 0.0, 0, true};

  std::priority_queue<Piece, std::vector<Piece>, ByError> heap;
  T total{};
  double total_err = 0.0;
  initial_intervals = std::max<std::size_t>(1, initial_intervals);
  const double step = (b - a) / static_cast<double>(initial_intervals);
  for (std::size_t i = 0; i < initial_intervals; ++i) {
    const double lo = a + step * static_cast<double>(i);
    const double hi = (i + 1 == initial_intervals) ? b : lo + step;
    auto [v, e] = detail::gk15<T>(f, lo, hi);
    out.evaluations += 15;
    heap.push({lo, hi, v, e});
    total += v;
    total_err += e;
  }

  while (total_err > std::max(abs_tol, rel_tol * detail::magnitude(total)) &&
         heap.size() < max_intervals) {
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    auto [vl, el] = detail::gk15<T>(f, worst.lo, mid);
    auto [vr, er] = detail::gk15<T>(f, mid, worst.hi);
    out.evaluations += 30;
    heap.push({worst.lo, mid, vl, el});
    heap.push({mid, worst.hi, vr, er});
    total += vl + vr - worst.value;
    total_err += el + er - worst.error;
  }

  std::vector<Piece> pieces;
  pieces.reserve(heap.size());
  while (!heap.empty()) {
    pieces.push_back(heap.top());
    heap.pop();
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece &l, const Piece &r) { return l.lo < r.lo; });
  out.value = T{};
  out.error = 0.0;
  for (const auto &p : pieces) {
    out.value += p.value;
    out.error += p.error;
  }
  out.converged =
      out.error <= std::max(abs_tol, rel_tol * detail::magnitude(out.value));
  return out;
}

/// Composite Simpson over uniformly spaced samples (odd count >= 3).
template <typename T> T simpson(std::span<const T> samples, double h) {
  const std::size_t n = samples.size();
  T acc = samples.front() + samples.back();
  for (std::size_t i = 1; i + 1 < n; ++i)
    acc += samples[i] * ((i % 2 == 1) ? 4.0 : 2.0);
  return acc * (h / 3.0);
}

/// Simpson on the full grid and on every second sample; the Richardson
/// combination is returned with |fine - coarse| / 15 as its error estimate.
/// Requires (samples.size() - 1) divisible by 4.
template <typename T>
Estimate<T> simpson_richardson(std::span<const T> samples, double h) {
  const std::size_t n = samples.size();
  std::vector<T> coarse;
  coarse.reserve(n / 2 + 1);
  for (std::size_t i = 0; i < n; i += 2)
    coarse.push_back(samples[i]);
  const T fine = simpson<T>(samples, h);
  const T rough = simpson<T>(std::span<const T>(coarse), 2.0 * h);
  const T diff = (fine - rough) / 15.0;
  return {fine + diff, detail::magnitude(diff), n, true};
}

} // namespace rqc::quad
