#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "granular/error.hpp"
#include "granular/grid.hpp"
#include "granular/physics.hpp"
#include "granular/quadrature.hpp"

namespace granular {

struct Moments {
  double rho = 0.0;
  std::array<double, 3> u{0.0, 0.0, 0.0};
  double energy = 0.0;  ///< int |v|^2/2 f dv
  double temperature = 0.0;
};

/// Rectangle-rule moments over the periodic grid; T = (2E/rho - |u|^2)/d.
inline Moments moments(std::span<const double> values, const GridSpec& g) {
  if (values.size() != g.size()) throw Error(Errc::GridMismatch, "value count does not match the grid");
  double mass = 0.0;
  std::array<double, 3> mom{0.0, 0.0, 0.0};
  double en = 0.0;
  for (std::size_t f = 0; f < values.size(); ++f) {
    const auto idx = unflatten(f, g.d, g.n);
    const double fv = values[f];
    double v2 = 0.0;
    for (int a = 0; a < g.d; ++a) {
      const double v = g.node(idx[a]);
      mom[a] += v * fv;
      v2 += v * v;
    }
    mass += fv;
    en += 0.5 * v2 * fv;
  }
  const double dv = g.cell_volume();
  Moments m;
  m.rho = mass * dv;
  if (!(std::abs(m.rho) > 1e-14)) throw Error(Errc::DegenerateDensity, "density is zero; temperature undefined");
  double u2 = 0.0;
  for (int a = 0; a < g.d; ++a) {
    m.u[a] = mom[a] * dv / m.rho;
    u2 += m.u[a] * m.u[a];
  }
  m.energy = en * dv;
  m.temperature = (2.0 * m.energy / m.rho - u2) / g.d;
  return m;
}

inline Moments moments(const DistributionField& field) {
  if (!field.values_fresh()) throw Error(Errc::InvalidParameter, "field values are stale; call from_spectral first");
  return moments(field.values(), field.grid());
}

/// Kinetic energy int |v|^2/2 f dv straight from coefficients.
inline double energy_from_coeffs(const GridSpec& g, std::span<const cplx> fhat) {
  const SpectralTransform transform(g);
  AlignedVector<cplx> work(fhat.begin(), fhat.end());
  transform.backward_in_place(work);
  double en = 0.0;
  for (std::size_t f = 0; f < work.size(); ++f) {
    const auto idx = unflatten(f, g.d, g.n);
    double v2 = 0.0;
    for (int a = 0; a < g.d; ++a) v2 += g.node(idx[a]) * g.node(idx[a]);
    en += 0.5 * v2 * work[f].real();
  }
  return en * g.cell_volume();
}

/// Temperature of the heated Maxwell-molecule gas:
///   T(t) = (T0 - 8 tau/(1-e^2)) exp(-rho0 (1-e^2) t / 4) + 8 tau/(1-e^2).
inline double analytic_temperature(double t, double rho0, double t0, double e, double tau) {
  if (!(e > 0.0 && e <= 1.0)) throw Error(Errc::InvalidParameter, "restitution must lie in (0, 1]");
  if (e == 1.0) {
    if (tau > 0.0) throw Error(Errc::ElasticWithBath, "elastic gas with a heat bath has no bounded temperature law");
    return t0;
  }
  const double c = 1.0 - e * e;
  const double t_inf = 8.0 * tau / c;
  return (t0 - t_inf) * std::exp(-rho0 * c * t / 4.0) + t_inf;
}

inline constexpr double kEntropyFloor = 1e-16;

struct EntropyResult {
  double value = 0.0;
  std::size_t skipped = 0;  ///< cells where f or g was at or below the floor
};

/// H(f|g) = int f ln(f/g) dv over cells where both exceed the floor.
inline EntropyResult relative_entropy(std::span<const double> f, std::span<const double> g, const GridSpec& grid) {
  if (f.size() != grid.size() || g.size() != grid.size()) {
    throw Error(Errc::GridMismatch, "entropy arguments do not match the grid");
  }
  EntropyResult r;
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] <= kEntropyFloor || g[i] <= kEntropyFloor) {
      ++r.skipped;
      continue;
    }
    sum += f[i] * std::log(f[i] / g[i]);
  }
  r.value = sum * grid.cell_volume();
  return r;
}

inline EntropyResult relative_entropy(const DistributionField& f, const DistributionField& g) {
  if (!(f.grid() == g.grid())) throw Error(Errc::GridMismatch, "entropy arguments live on different grids");
  return relative_entropy(f.values(), g.values(), f.grid());
}

/// Boltzmann entropy int f ln f dv with the same floor rule.
inline EntropyResult entropy(std::span<const double> f, const GridSpec& grid) {
  EntropyResult r;
  double sum = 0.0;
  for (double x : f) {
    if (x <= kEntropyFloor) {
      ++r.skipped;
      continue;
    }
    sum += x * std::log(x);
  }
  r.value = sum * grid.cell_volume();
  return r;
}

/// b1 = int_{S^{d-1}} b (1 - sigma.u_hat)/2 dsigma for constant b = C_lambda,
/// C_e = b1 rho (1-e^2)/4, alpha = gamma + 1/2.
struct HaffParams {
  double b1 = 0.0;
  double c_e = 0.0;
  double alpha = 0.5;
};

inline double angular_moment_b1(const KernelSpec& k, int d) { return k.c_lambda * sphere_area(d) / 2.0; }

inline HaffParams haff_params(const KernelSpec& k, int d, double rho, double e) {
  const double b1 = angular_moment_b1(k, d);
  return {b1, b1 * rho * (1.0 - e * e) / 4.0, k.gamma + 0.5};
}

/// D(f) = int int f f_* b1 (1-e^2)/4 |v - v_*|^{lambda+2} E^gamma dv dv_*,
/// the rate at which collisions remove int |v|^2 f dv (twice the kinetic
/// energy).
inline double dissipation_functional(std::span<const double> values, const GridSpec& g, const KernelSpec& k,
                                     double e) {
  if ((g.d == 2 && g.n > 32) || (g.d == 3 && g.n > 16)) {
    throw Error(Errc::TooLargeForPairwiseSum, "pairwise dissipation sum is limited to N <= 32 (2D) / 16 (3D)");
  }
  if (values.size() != g.size()) throw Error(Errc::GridMismatch, "value count does not match the grid");
  if (!(e >= 0.0 && e <= 1.0)) throw Error(Errc::InvalidParameter, "restitution must lie in [0, 1]");
  std::vector<std::array<double, 3>> v(values.size());
  double en = 0.0;
  for (std::size_t f = 0; f < values.size(); ++f) {
    const auto idx = unflatten(f, g.d, g.n);
    for (int a = 0; a < g.d; ++a) v[f][a] = g.node(idx[a]);
    en += 0.5 * (v[f][0] * v[f][0] + v[f][1] * v[f][1] + v[f][2] * v[f][2]) * values[f];
  }
  en *= g.cell_volume();
  const double power = k.lambda + 2.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double dx = v[i][0] - v[j][0];
      const double dy = v[i][1] - v[j][1];
      const double dz = v[i][2] - v[j][2];
      const double r2 = dx * dx + dy * dy + dz * dz;
      row += values[j] * (power == 2.0 ? r2 : std::pow(r2, power / 2.0));
    }
    sum += values[i] * row;
  }
  const double dv = g.cell_volume();
  const double energy_factor = k.gamma != 0.0 ? std::pow(en, k.gamma) : 1.0;
  return angular_moment_b1(k, g.d) * (1.0 - e * e) / 4.0 * energy_factor * sum * dv * dv;
}

struct TimeSeriesRecord {
  double t = 0.0;
  Moments m;
  double entropy = 0.0;
  std::size_t entropy_skipped = 0;
  /// ||f^{n+1} - f^n|| / ||f^{n+1}|| over coefficients; NaN before the first step.
  double step_l2_diff = std::numeric_limits<double>::quiet_NaN();
  double min_f = 0.0;
};

/// Least-squares slope of log T against log t for samples with t in
/// [t_lo, t_hi].
inline double haff_slope(std::span<const double> t, std::span<const double> temperature, double t_lo, double t_hi) {
  if (t.size() != temperature.size()) throw Error(Errc::InvalidParameter, "time and temperature lengths differ");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(t[i] > 0.0) || !(temperature[i] > 0.0)) {
      throw Error(Errc::InvalidParameter, "Haff fit needs t > 0 and T > 0 in the window");
    }
    const double x = std::log(t[i]);
    const double y = std::log(temperature[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 10) throw Error(Errc::InsufficientSamples, "Haff fit needs at least 10 samples, window has " + std::to_string(n));
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

inline double haff_slope(std::span<const TimeSeriesRecord> series, double t_lo, double t_hi) {
  std::vector<double> t, temp;
  for (const auto& r : series) {
    t.push_back(r.t);
    temp.push_back(r.m.temperature);
  }
  return haff_slope(t, temp, t_lo, t_hi);
}

struct TailCandidate {
  double alpha = 0.0;
  double residual = 0.0;  ///< sum of squared residuals of log f
  double slope = 0.0;     ///< fitted b in log f = a - b |v|^alpha
};

struct TailFit {
  double best_alpha = 0.0;
  std::vector<TailCandidate> candidates;  ///< in the order given
  std::size_t samples = 0;
  double v2 = 0.0;  ///< slice coordinate actually used
};

/// Fits log f = a - b |v|^alpha for each candidate alpha over the samples
/// with |v| >= v_min and f > 1e-12, and picks the smallest residual.
inline TailFit tail_fit(std::span<const double> v, std::span<const double> f, double v_min,
                        std::span<const double> candidates) {
  std::vector<double> av, lf;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= v_min && f[i] > 1e-12) {
      av.push_back(std::abs(v[i]));
      lf.push_back(std::log(f[i]));
    }
  }
  if (av.size() < 3) throw Error(Errc::EmptyWindow, "tail window holds fewer than 3 usable samples");
  TailFit fit;
  fit.samples = av.size();
  const double n = static_cast<double>(av.size());
  double best = std::numeric_limits<double>::infinity();
  for (double alpha : candidates) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> x(av.size());
    for (std::size_t i = 0; i < av.size(); ++i) {
      x[i] = std::pow(av[i], alpha);
      sx += x[i];
      sy += lf[i];
      sxx += x[i] * x[i];
      sxy += x[i] * lf[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    double res = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) {
      const double r = lf[i] - (icpt + slope * x[i]);
      res += r * r;
    }
    fit.candidates.push_back({alpha, res, -slope});
    if (res < best) {
      best = res;
      fit.best_alpha = alpha;
    }
  }
  return fit;
}

inline constexpr std::array<double, 3> kTailCandidates{1.0, 1.5, 2.0};

/// Tail exponent along v1 on the 2D slice with v2 at the node nearest
/// `v2_target`, keeping |v1| >= 2 sqrt(T).
inline TailFit tail_exponent(const DistributionField& field, double v2_target = 0.17,
                             std::span<const double> candidates = kTailCandidates) {
  const GridSpec& g = field.grid();
  if (g.d != 2) throw Error(Errc::InvalidDimension, "tail slices are defined for 2D fields");
  const Moments m = moments(field);
  int j2 = 0;
  for (int j = 1; j < g.n; ++j)
    if (std::abs(g.node(j) - v2_target) < std::abs(g.node(j2) - v2_target)) j2 = j;
  std::vector<double> v(g.n), f(g.n);
  const auto values = field.values();
  for (int i = 0; i < g.n; ++i) {
    v[i] = g.node(i);
    f[i] = values[static_cast<std::size_t>(i) * g.n + j2];
  }
  TailFit fit = tail_fit(v, f, 2.0 * std::sqrt(std::max(m.temperature, 0.0)), candidates);
  fit.v2 = g.node(j2);
  return fit;
}

}  // namespace granular
