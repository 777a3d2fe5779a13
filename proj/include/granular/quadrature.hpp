#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "granular/detail/spherical_design_data.hpp"
#include "granular/error.hpp"

namespace granular {

struct Quadrature1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// Points on the unit sphere S^{d-1} (stored as 3-vectors; z = 0 in 2D) with
/// weights summing to the sphere's measure.
struct SphereQuadrature {
  int d = 2;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Measure of the unit sphere S^{d-1}: 2 pi in 2D, 4 pi in 3D.
inline double sphere_area(int d) { return d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi; }

/// n-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree
/// up to 2n - 1. Nodes are Newton-refined roots of P_n.
inline Quadrature1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw Error(Errc::InvalidOrder, "Gauss-Legendre order must be at least 1");
  if (!(a < b)) throw Error(Errc::InvalidParameter, "Gauss-Legendre interval needs a < b");
  std::vector<double> x(n);
  std::vector<double> w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on the three-term recurrence.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? z : p1;
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (z * pn - pn1) / (z * z - 1.0);
      const double step = pn / dp;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  Quadrature1D q;
  q.nodes.resize(n);
  q.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    q.nodes[i] = mid + half * x[i];
    q.weights[i] = half * w[i];
  }
  return q;
}

/// Equispaced rule on the unit circle, spectrally accurate for smooth
/// periodic integrands.
inline SphereQuadrature circle_rule(int m) {
  if (m < 4) throw Error(Errc::InvalidOrder, "circle rule needs at least 4 points");
  SphereQuadrature q;
  q.d = 2;
  q.points.resize(m);
  q.weights.assign(m, 2.0 * std::numbers::pi / m);
  for (int i = 0; i < m; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / m;
    q.points[i] = {std::cos(angle), std::sin(angle), 0.0};
  }
  return q;
}

/// Strength t of the shipped equal-weight spherical design with m points, or
/// 0 when no design of that size ships.
inline int spherical_design_strength(int m) {
  switch (m) {
    case 12: return 5;
    case 32: return 7;
    case 48: return 9;
    default: return 0;
  }
}

namespace detail {

template <std::size_t M>
SphereQuadrature design_from(const std::array<std::array<double, 3>, M>& table) {
  SphereQuadrature q;
  q.d = 3;
  q.points.assign(table.begin(), table.end());
  q.weights.assign(M, 4.0 * std::numbers::pi / static_cast<double>(M));
  return q;
}

}  // namespace detail

/// Antipodally symmetric equal-weight spherical t-designs on S^2 for
/// m in {12, 32, 48} (strengths 5, 7 and 9). The tables are embedded; the
/// same numbers ship as text under data/spherical_designs/.
inline SphereQuadrature spherical_design(int m) {
  switch (m) {
    case 12: return detail::design_from(detail::kSphericalDesign12);
    case 32: return detail::design_from(detail::kSphericalDesign32);
    case 48: return detail::design_from(detail::kSphericalDesign48);
    default:
      throw Error(Errc::UnsupportedDesignSize,
                  "no spherical design with " + std::to_string(m) + " points (shipped sizes: 12, 32, 48)");
  }
}

/// Reads a design file: whitespace-separated unit vectors, one per line, no
/// header. Weights are set to 4 pi / M.
inline SphereQuadrature read_sphere_design(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open spherical design file " + path);
  SphereQuadrature q;
  q.d = 3;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::array<double, 3> p{};
    if (!(ls >> p[0])) continue;
    if (!(ls >> p[1] >> p[2])) throw Error(Errc::IoError, "malformed design line in " + path + ": " + line);
    const double norm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    if (std::abs(norm - 1.0) > 1e-12) throw Error(Errc::IoError, "non-unit design point in " + path);
    q.points.push_back(p);
  }
  if (q.points.empty()) throw Error(Errc::IoError, "empty spherical design file " + path);
  q.weights.assign(q.points.size(), 4.0 * std::numbers::pi / static_cast<double>(q.points.size()));
  return q;
}

/// The default angular rule for a dimension: circle_rule(m) in 2D,
/// spherical_design(m) in 3D.
inline SphereQuadrature sphere_rule(int d, int m) { return d == 2 ? circle_rule(m) : spherical_design(m); }

}  // namespace granular
