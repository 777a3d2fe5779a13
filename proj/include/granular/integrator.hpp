#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "granular/collision.hpp"
#include "granular/diagnostics.hpp"
#include "granular/error.hpp"
#include "granular/grid.hpp"
#include "granular/physics.hpp"

namespace granular {

enum class Method { Direct, Fast };

struct SolverConfig {
  double tau = 0.0;
  double dt = 0.01;
  double t_final = 1.0;
  Method method = Method::Fast;
  int output_every = 1;
  int snapshot_every = 0;  ///< 0 keeps no intermediate snapshots
  bool stop_at_steady = false;
};

inline constexpr double kSteadyThreshold = 1e-12;

inline void validate(const SolverConfig& c) {
  if (!(c.tau >= 0.0)) throw Error(Errc::InvalidParameter, "tau must be non-negative");
  if (!(c.dt > 0.0)) throw Error(Errc::InvalidParameter, "dt must be positive");
  if (!(c.t_final >= c.dt)) throw Error(Errc::InvalidParameter, "t_final must be at least dt");
  if (c.output_every < 1) throw Error(Errc::InvalidParameter, "output_every must be at least 1");
  if (c.snapshot_every < 0) throw Error(Errc::InvalidParameter, "snapshot_every must be non-negative");
}

/// (pi/L)^2 |k|^2 per mode, in storage order.
inline std::vector<double> laplacian_symbol(const GridSpec& g) {
  std::vector<double> s(g.size());
  const double kappa2 = g.wavenumber() * g.wavenumber();
  for (std::size_t f = 0; f < s.size(); ++f) {
    const auto idx = unflatten(f, g.d, g.n);
    double k2 = 0.0;
    for (int a = 0; a < g.d; ++a) k2 += static_cast<double>(mode_of(idx[a], g.n)) * mode_of(idx[a], g.n);
    s[f] = kappa2 * k2;
  }
  return s;
}

/// out_k = -tau (pi/L)^2 |k|^2 f_k.
inline void heat_bath_rhs(std::span<const cplx> fhat, const GridSpec& g, double tau, std::span<cplx> out) {
  const auto symbol = laplacian_symbol(g);
  for (std::size_t k = 0; k < fhat.size(); ++k) out[k] = -tau * symbol[k] * fhat[k];
}

using Rhs = std::function<void(std::span<const cplx>, std::span<cplx>)>;

struct Rk4Workspace {
  AlignedVector<cplx> k1, k2, k3, k4, stage;
  void resize(std::size_t n) {
    for (auto* v : {&k1, &k2, &k3, &k4, &stage}) v->assign(n, cplx{});
  }
};

/// Classical RK4 on a coefficient vector, in place. `step` only labels the
/// NonFiniteState error.
inline void rk4_step(std::span<cplx> y, const Rhs& rhs, double dt, Rk4Workspace& w, long step = 0) {
  const std::size_t n = y.size();
  if (w.k1.size() != n) w.resize(n);
  rhs(y, w.k1);
  for (std::size_t i = 0; i < n; ++i) w.stage[i] = y[i] + 0.5 * dt * w.k1[i];
  rhs(w.stage, w.k2);
  for (std::size_t i = 0; i < n; ++i) w.stage[i] = y[i] + 0.5 * dt * w.k2[i];
  rhs(w.stage, w.k3);
  for (std::size_t i = 0; i < n; ++i) w.stage[i] = y[i] + dt * w.k3[i];
  rhs(w.stage, w.k4);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += dt / 6.0 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
    if (!std::isfinite(y[i].real()) || !std::isfinite(y[i].imag())) {
      throw Error(Errc::NonFiniteState, "non-finite coefficient after step " + std::to_string(step));
    }
  }
}

inline DistributionField rk4_step(DistributionField state, const Rhs& rhs, double dt) {
  Rk4Workspace w;
  rk4_step(state.coeffs(), rhs, dt, w);
  from_spectral(state);
  return state;
}

/// Right-hand side of d/dt f = Q(f, f) + tau Laplacian f in coefficient space.
///
/// The collision part is projected onto its Hermitian component
/// (Q_k + conj Q_{-k})/2. The mode set {-N/2..N/2-1} is not symmetric, so the
/// FFT-based operator leaves a roundoff-to-truncation sized anti-Hermitian
/// part in the Nyquist planes that would otherwise make f complex over long
/// runs. Tracks max |Q_0| over all evaluations.
class EquationRhs {
 public:
  /// collide(fhat, out, energy) writes Q into out.
  using Collide = std::function<void(std::span<const cplx>, std::span<cplx>, std::optional<double>)>;

  EquationRhs(const GridSpec& grid, double tau, Collide collide = {}, double gamma = 0.0)
      : grid_(grid), tau_(tau), collide_(std::move(collide)), gamma_(gamma), symbol_(laplacian_symbol(grid)),
        partner_(grid.size()), q_(grid.size()) {
    for (std::size_t f = 0; f < partner_.size(); ++f) partner_[f] = conjugate_index(f, grid.d, grid.n);
  }

  void operator()(std::span<const cplx> fhat, std::span<cplx> out) {
    const std::size_t n = fhat.size();
    if (collide_) {
      std::optional<double> energy;
      if (gamma_ != 0.0) energy = energy_from_coeffs(grid_, fhat);
      collide_(fhat, q_, energy);
      max_q0_ = std::max(max_q0_, std::abs(q_[0]));
      ++evaluations_;
      for (std::size_t k = 0; k < n; ++k) out[k] = 0.5 * (q_[k] + std::conj(q_[partner_[k]]));
    } else {
      for (std::size_t k = 0; k < n; ++k) out[k] = cplx{};
    }
    if (tau_ != 0.0)
      for (std::size_t k = 0; k < n; ++k) out[k] -= tau_ * symbol_[k] * fhat[k];
  }

  double max_q0() const { return max_q0_; }
  long evaluations() const { return evaluations_; }

 private:
  GridSpec grid_;
  double tau_;
  Collide collide_;
  double gamma_;
  std::vector<double> symbol_;
  std::vector<std::size_t> partner_;
  AlignedVector<cplx> q_;
  double max_q0_ = 0.0;
  long evaluations_ = 0;
};

inline EquationRhs::Collide fast_collide(std::shared_ptr<const FastCollisionOperator> op) {
  return [op](std::span<const cplx> f, std::span<cplx> out, std::optional<double> energy) { op->apply(f, out, energy); };
}

inline EquationRhs::Collide direct_collide(std::shared_ptr<const DirectWeights> w) {
  return [w](std::span<const cplx> f, std::span<cplx> out, std::optional<double> energy) {
    const auto q = eval_direct(*w, f);
    const double gamma = w->model.kernel.gamma;
    if (gamma != 0.0 && !energy) throw Error(Errc::MissingEnergy, "kernel has gamma != 0 but no energy was supplied");
    const double scale = gamma != 0.0 ? std::pow(*energy, gamma) : 1.0;
    for (std::size_t k = 0; k < q.size(); ++k) out[k] = q[k] * scale;
  };
}

struct Snapshot {
  double t = 0.0;
  std::vector<double> values;
};

struct RunResult {
  std::vector<TimeSeriesRecord> series;
  DistributionField final_state;
  std::vector<Snapshot> snapshots;
  double max_q0 = 0.0;
  long steps = 0;
  std::optional<double> steady_time;  ///< first t with step difference below 1e-12
};

/// Called after each recorded output with the record and the refreshed field.
using RunObserver = std::function<void(const TimeSeriesRecord&, const DistributionField&)>;

inline TimeSeriesRecord make_record(double t, const DistributionField& field, double step_diff) {
  TimeSeriesRecord r;
  r.t = t;
  r.m = moments(field);
  const auto h = entropy(field.values(), field.grid());
  r.entropy = h.value;
  r.entropy_skipped = h.skipped;
  r.step_l2_diff = step_diff;
  r.min_f = *std::min_element(field.values().begin(), field.values().end());
  return r;
}

/// Marches `state` to t_final with the given right-hand side, recording
/// diagnostics at t = 0, every output_every steps, and at the last step.
inline RunResult march(DistributionField state, EquationRhs& rhs, const SolverConfig& config,
                       const RunObserver& observer = {}) {
  validate(config);
  if (!state.coeffs_fresh()) to_spectral(state);
  if (!state.values_fresh()) from_spectral(state);
  RunResult result;
  const long total = std::lround(config.t_final / config.dt);
  auto record = [&](double t, double diff) {
    from_spectral(state);
    result.series.push_back(make_record(t, state, diff));
    if (observer) observer(result.series.back(), state);
  };
  record(0.0, std::numeric_limits<double>::quiet_NaN());

  Rk4Workspace w;
  AlignedVector<cplx> previous(state.grid().size());
  Rhs f = [&rhs](std::span<const cplx> y, std::span<cplx> out) { rhs(y, out); };
  for (long step = 1; step <= total; ++step) {
    auto y = state.coeffs();
    std::copy(y.begin(), y.end(), previous.begin());
    rk4_step(y, f, config.dt, w, step);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      num += std::norm(y[k] - previous[k]);
      den += std::norm(y[k]);
    }
    const double diff = std::sqrt(num / den);
    const double t = step * config.dt;
    const bool steady = diff < kSteadyThreshold;
    if (steady && !result.steady_time) result.steady_time = t;
    const bool last = step == total || (steady && config.stop_at_steady);
    result.steps = step;
    if (step % config.output_every == 0 || last) record(t, diff);
    if (config.snapshot_every > 0 && step % config.snapshot_every == 0) {
      from_spectral(state);
      result.snapshots.push_back({t, std::vector<double>(state.values().begin(), state.values().end())});
    }
    if (last) break;
  }
  from_spectral(state);
  result.final_state = std::move(state);
  result.max_q0 = rhs.max_q0();
  return result;
}

/// Everything a run needs besides the solver settings.
struct Problem {
  GridSpec grid;
  KernelSpec kernel;
  RestitutionModel restitution = ConstantRestitution{1.0};
  InitialCondition ic;
  int n_rho = 0;      ///< 0: N
  int m_angular = 0;  ///< 0: 16 in 2D, 32 in 3D
  bool collisions = true;
};

inline CollisionModel collision_model(const Problem& p) {
  const int n_rho = p.n_rho > 0 ? p.n_rho : p.grid.n;
  const int m = p.m_angular > 0 ? p.m_angular : (p.grid.d == 2 ? 16 : 32);
  return make_collision_model(p.grid, p.kernel, p.restitution, n_rho, m);
}

struct RunOptions {
  PrecomputeOptions precompute;
  std::optional<std::filesystem::path> cache;  ///< table cache file for the fast method
  RunObserver observer;
};

/// Builds the initial field and the collision tables, then marches.
inline RunResult run(const Problem& p, const SolverConfig& config, const RunOptions& opts = {}) {
  validate(config);
  DistributionField f0 = build_initial(p.ic, p.grid);
  EquationRhs::Collide collide;
  if (p.collisions) {
    const CollisionModel model = collision_model(p);
    if (config.method == Method::Direct) {
      collide = direct_collide(std::make_shared<const DirectWeights>(precompute_direct(model, opts.precompute)));
    } else {
      std::optional<CollisionTables> tables;
      if (opts.cache) tables = load_tables(*opts.cache, model, opts.precompute);
      if (!tables) {
        tables = CollisionTables{precompute_loss(model, opts.precompute), precompute_gain(model, opts.precompute)};
        if (opts.cache) save_tables(*opts.cache, tables->loss, tables->gain);
      }
      auto op = std::make_shared<const FastCollisionOperator>(
          std::make_shared<const GainTensor>(std::move(tables->gain)),
          std::make_shared<const LossTable>(std::move(tables->loss)), opts.precompute.workers);
      collide = fast_collide(std::move(op));
    }
  }
  EquationRhs rhs(p.grid, config.tau, std::move(collide), p.kernel.gamma);
  return march(std::move(f0), rhs, config, opts.observer);
}

}  // namespace granular
