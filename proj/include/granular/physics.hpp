#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "granular/error.hpp"
#include "granular/grid.hpp"

namespace granular {

/// Variable-hard-sphere kernel B = C_lambda |g|^lambda E^gamma with a
/// constant angular part.
struct KernelSpec {
  double lambda = 0.0;
  double c_lambda = 1.0;
  double gamma = 0.0;

  static KernelSpec maxwell_2d() { return {0.0, 1.0 / (2.0 * std::numbers::pi), 0.0}; }
  static KernelSpec hard_spheres_2d() { return {1.0, 1.0 / (2.0 * std::numbers::pi), 0.0}; }
  static KernelSpec hard_spheres_3d() { return {1.0, 1.0 / (4.0 * std::numbers::pi), 0.0}; }

  bool operator==(const KernelSpec&) const = default;
};

inline void validate(const KernelSpec& k) {
  if (!(k.lambda >= 0.0 && k.lambda <= 1.0)) throw Error(Errc::InvalidParameter, "kernel lambda must lie in [0, 1]");
  if (!(k.c_lambda > 0.0)) throw Error(Errc::InvalidParameter, "kernel prefactor must be positive");
  if (!std::isfinite(k.gamma)) throw Error(Errc::InvalidParameter, "kernel gamma must be finite");
}

/// C_lambda rho^lambda. The energy factor E^gamma is applied by the collision
/// operator, not here.
inline double kernel_amplitude(const KernelSpec& k, double rho) {
  if (k.lambda == 0.0) return k.c_lambda;
  return k.c_lambda * std::pow(rho, k.lambda);
}

struct ConstantRestitution {
  double e = 1.0;
  bool operator==(const ConstantRestitution&) const = default;
};

/// e(rho) = (e0 - 1)/2 tanh(rho - 4) + (e0 + 1)/2: near elastic for slow
/// collisions, tending to e0 for fast ones.
struct TanhRestitution {
  double e0 = 0.5;
  bool operator==(const TanhRestitution&) const = default;
};

/// e(rho) = 1 / (1 + c rho^gamma_t).
struct ToscaniRestitution {
  double c = 0.0;
  double gamma_t = 1.0;
  bool operator==(const ToscaniRestitution&) const = default;
};

/// e(rho) solves e + a rho^{1/5} e^{3/5} = 1.
struct ViscoelasticRestitution {
  double a = 0.0;
  bool operator==(const ViscoelasticRestitution&) const = default;
};

using RestitutionModel =
    std::variant<ConstantRestitution, TanhRestitution, ToscaniRestitution, ViscoelasticRestitution>;

inline void validate(const RestitutionModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantRestitution>) {
          if (!(m.e > 0.0 && m.e <= 1.0)) throw Error(Errc::InvalidParameter, "constant restitution must lie in (0, 1]");
        } else if constexpr (std::is_same_v<T, TanhRestitution>) {
          if (!(m.e0 > 0.0 && m.e0 < 1.0)) throw Error(Errc::InvalidParameter, "tanh restitution e0 must lie in (0, 1)");
        } else if constexpr (std::is_same_v<T, ToscaniRestitution>) {
          if (!(m.c >= 0.0)) throw Error(Errc::InvalidParameter, "Toscani restitution needs c >= 0");
          if (!std::isfinite(m.gamma_t)) throw Error(Errc::InvalidParameter, "Toscani exponent must be finite");
        } else {
          if (!(m.a >= 0.0)) throw Error(Errc::InvalidParameter, "viscoelastic restitution needs a >= 0");
        }
      },
      model);
}

namespace detail {

// Bisection on the increasing map e -> e + a rho^{1/5} e^{3/5} - 1 over (0, 1].
inline double viscoelastic_root(double a, double rho) {
  const double k = a * std::pow(rho, 0.2);
  if (k == 0.0) return 1.0;
  auto residual = [k](double e) { return e + k * std::pow(e, 0.6) - 1.0; };
  double lo = 0.0;
  double hi = 1.0;
  if (!(residual(lo) < 0.0 && residual(hi) >= 0.0)) {
    throw Error(Errc::RootNotBracketed, "viscoelastic restitution root is not bracketed by (0, 1]");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace detail

inline double restitution(const RestitutionModel& model, double rho) {
  return std::visit(
      [rho](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantRestitution>) {
          return m.e;
        } else if constexpr (std::is_same_v<T, TanhRestitution>) {
          return 0.5 * (m.e0 - 1.0) * std::tanh(rho - 4.0) + 0.5 * (m.e0 + 1.0);
        } else if constexpr (std::is_same_v<T, ToscaniRestitution>) {
          return 1.0 / (1.0 + m.c * std::pow(rho, m.gamma_t));
        } else {
          return detail::viscoelastic_root(m.a, rho);
        }
      },
      model);
}

struct Maxwellian2D {
  double rho0 = 1.0;
  std::array<double, 2> u0{0.0, 0.0};
  double t0 = 1.0;
};

/// Uniform density 1/(4 w0^2) on the square [-w0, w0]^2.
struct Flat2D {
  double w0 = 1.0;
};

struct Maxwellian3D {
  double rho0 = 1.0;
  std::array<double, 3> u0{0.0, 0.0, 0.0};
  double t0 = 1.0;
};

using InitialCondition = std::variant<Maxwellian2D, Flat2D, Maxwellian3D>;

inline int dimension_of(const InitialCondition& ic) { return std::holds_alternative<Maxwellian3D>(ic) ? 3 : 2; }

namespace detail {

template <std::size_t D>
void fill_maxwellian(DistributionField& field, double rho0, const std::array<double, D>& u0, double t0) {
  if (!(rho0 > 0.0) || !(t0 > 0.0)) throw Error(Errc::InvalidParameter, "Maxwellian needs rho0 > 0 and T0 > 0");
  const GridSpec& g = field.grid();
  const double norm = rho0 / std::pow(2.0 * std::numbers::pi * t0, static_cast<double>(D) / 2.0);
  auto values = field.values();
  for (std::size_t f = 0; f < values.size(); ++f) {
    const auto idx = unflatten(f, g.d, g.n);
    double r2 = 0.0;
    for (std::size_t a = 0; a < D; ++a) {
      const double dv = g.node(idx[a]) - u0[a];
      r2 += dv * dv;
    }
    values[f] = norm * std::exp(-r2 / (2.0 * t0));
  }
}

}  // namespace detail

/// Samples the initial condition pointwise at the grid nodes. For the flat
/// profile a node lying exactly on the edge +-w0 counts as inside.
inline DistributionField build_initial(const InitialCondition& ic, const GridSpec& grid) {
  if (dimension_of(ic) != grid.d) {
    throw Error(Errc::DimensionMismatch, "initial condition is " + std::to_string(dimension_of(ic)) +
                                             "D but the grid is " + std::to_string(grid.d) + "D");
  }
  DistributionField field(grid);
  if (const auto* m2 = std::get_if<Maxwellian2D>(&ic)) {
    detail::fill_maxwellian<2>(field, m2->rho0, m2->u0, m2->t0);
  } else if (const auto* m3 = std::get_if<Maxwellian3D>(&ic)) {
    detail::fill_maxwellian<3>(field, m3->rho0, m3->u0, m3->t0);
  } else {
    const double w0 = std::get<Flat2D>(ic).w0;
    if (!(w0 > 0.0)) throw Error(Errc::InvalidParameter, "flat profile needs w0 > 0");
    const double height = 1.0 / (4.0 * w0 * w0);
    auto values = field.values();
    for (std::size_t f = 0; f < values.size(); ++f) {
      const auto idx = unflatten(f, grid.d, grid.n);
      const bool inside = std::abs(grid.node(idx[0])) <= w0 && std::abs(grid.node(idx[1])) <= w0;
      values[f] = inside ? height : 0.0;
    }
  }
  to_spectral(field);
  return field;
}

}  // namespace granular
