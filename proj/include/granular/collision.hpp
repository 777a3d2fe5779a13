#pragma once

#include <cmath>
#include <complex>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "granular/error.hpp"
#include "granular/fft.hpp"
#include "granular/grid.hpp"
#include "granular/parallel.hpp"
#include "granular/physics.hpp"
#include "granular/quadrature.hpp"
#include "granular/tensor_storage.hpp"

namespace granular {

// Spectral discretization of the inelastic collision operator in weak form.
//
// With f(v) = sum_k f_k exp(i (pi/L) k.v) the operator's modes are
//
//   Q_k = sum_{l+m=k} G(l,m) f_l f_m,
//   G(l,m) = int_{B_R} e^{-i (pi/L) m.g} int_{S^{d-1}} B (e^{i (pi/L) (1+e)/4 (l+m).(g-|g|sigma)} - 1) dsigma dg.
//
// Both routes below discretize g = rho * ghat with the same Gauss-Legendre
// (radial) x sphere (angular) product rule, and the sigma integral with the
// same sphere rule, so they differ only by roundoff. Index sums are taken
// modulo N: l + m = k is read as l + m = k (mod N) and the weight is
// evaluated at the reduced index, which is exactly what an unpadded FFT
// convolution computes.

/// Everything the precomputed tables depend on.
struct CollisionModel {
  GridSpec grid;
  KernelSpec kernel;
  RestitutionModel restitution = ConstantRestitution{1.0};
  Quadrature1D radial;      ///< on [0, R]
  SphereQuadrature sphere;  ///< used for both ghat and sigma

  std::size_t pair_count() const { return radial.size() * sphere.size(); }
};

inline CollisionModel make_collision_model(const GridSpec& grid, const KernelSpec& kernel,
                                           const RestitutionModel& restitution, int n_rho, int m_angular) {
  validate(grid);
  validate(kernel);
  validate(restitution);
  return {grid, kernel, restitution, gauss_legendre(n_rho, 0.0, grid.r), sphere_rule(grid.d, m_angular)};
}

struct PrecomputeOptions {
  double memory_budget_bytes = 8e9;
  /// Where the gain tensor spills when it does not fit the budget.
  std::filesystem::path spill_dir = std::filesystem::temp_directory_path();
  /// Receives human-readable progress such as the memory estimate.
  std::function<void(const std::string&)> report;
  int workers = worker_count();
};

namespace detail {

// out[i] = exp(i * theta * mode(i)) along one axis.
inline void axis_phases(int n, double theta, std::span<cplx> out) {
  for (int i = 0; i < n; ++i) {
    const double a = theta * mode_of(i, n);
    out[i] = {std::cos(a), std::sin(a)};
  }
}

// out[f] = in[f] * t0[i0] * t1[i1] (* t2[i2]) for a separable phase.
inline void multiply_separable(int d, int n, std::span<const cplx> t, std::span<const cplx> in,
                               std::span<cplx> out) {
  const std::size_t nn = static_cast<std::size_t>(n);
  if (d == 2) {
    for (std::size_t i0 = 0; i0 < nn; ++i0) {
      const cplx c0 = t[i0];
      const cplx* t1 = t.data() + nn;
      const cplx* src = in.data() + i0 * nn;
      cplx* dst = out.data() + i0 * nn;
      for (std::size_t i1 = 0; i1 < nn; ++i1) dst[i1] = src[i1] * (c0 * t1[i1]);
    }
  } else {
    for (std::size_t i0 = 0; i0 < nn; ++i0) {
      for (std::size_t i1 = 0; i1 < nn; ++i1) {
        const cplx c01 = t[i0] * t[nn + i1];
        const cplx* t2 = t.data() + 2 * nn;
        const std::size_t base = (i0 * nn + i1) * nn;
        const cplx* src = in.data() + base;
        cplx* dst = out.data() + base;
        for (std::size_t i2 = 0; i2 < nn; ++i2) dst[i2] = src[i2] * (c01 * t2[i2]);
      }
    }
  }
}

// Per-axis phase tables for exp(i * scale * k.dir), packed [axis][n].
inline void direction_phases(int d, int n, double scale, const std::array<double, 3>& dir, std::span<cplx> t) {
  for (int a = 0; a < d; ++a) axis_phases(n, scale * dir[a], t.subspan(static_cast<std::size_t>(a) * n, n));
}

inline double dot_modes(const std::array<int, 3>& idx, int d, int n, const std::array<double, 3>& dir) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += mode_of(idx[a], n) * dir[a];
  return s;
}

// Flat index of (a + b) mod N, axis by axis.
inline std::size_t wrap_add(const std::array<int, 3>& a, const std::array<int, 3>& b, int d, int n) {
  std::size_t f = 0;
  for (int ax = 0; ax < d; ++ax) f = f * n + static_cast<std::size_t>((a[ax] + b[ax]) % n);
  return f;
}

}  // namespace detail

/// G_loss(m) = int_{B_R} e^{-i (pi/L) m.g} [int B dsigma] dg on the mode set.
struct LossTable {
  GridSpec grid;
  AlignedVector<cplx> values;
};

/// F(k, rho_j, ghat_m) = int_{S^{d-1}} B(rho) e^{i (pi/L) rho (1+e(rho))/4 k.(ghat - sigma)} dsigma
/// for every mode k and quadrature pair (j, m). Stored pair-major: the N^d
/// modes of one pair are contiguous.
class GainTensor {
 public:
  GainTensor() = default;
  GainTensor(CollisionModel model, TensorStorage storage) : model_(std::move(model)), storage_(std::move(storage)) {}

  const CollisionModel& model() const { return model_; }
  const GridSpec& grid() const { return model_.grid; }
  std::size_t radial_size() const { return model_.radial.size(); }
  std::size_t angular_size() const { return model_.sphere.size(); }
  bool is_mapped() const { return storage_.is_mapped(); }

  std::span<const cplx> slice(std::size_t j, std::size_t m) const {
    const std::size_t modes = grid().size();
    return storage_.data().subspan((j * angular_size() + m) * modes, modes);
  }
  std::span<cplx> slice(std::size_t j, std::size_t m) {
    const std::size_t modes = grid().size();
    return storage_.data().subspan((j * angular_size() + m) * modes, modes);
  }
  std::span<const cplx> data() const { return storage_.data(); }
  std::span<cplx> data() { return storage_.data(); }

  const cplx& at(std::size_t k, std::size_t j, std::size_t m) const { return slice(j, m)[k]; }

  /// w_rho w_ghat rho^{d-1} for the pair (j, m).
  double pair_weight(std::size_t j, std::size_t m) const {
    const double rho = model_.radial.nodes[j];
    return model_.radial.weights[j] * model_.sphere.weights[m] * std::pow(rho, model_.grid.d - 1);
  }

 private:
  CollisionModel model_;
  TensorStorage storage_;
};

/// Full G(l, m) table for the direct method, indexed [l][m] by flat storage
/// indices.
struct DirectWeights {
  CollisionModel model;
  std::vector<cplx> values;

  const cplx& at(std::size_t l, std::size_t m) const { return values[l * model.grid.size() + m]; }
};

inline std::size_t gain_tensor_entries(const GridSpec& grid, std::size_t n_rho, std::size_t m_angular) {
  return grid.size() * n_rho * m_angular;
}

inline double gain_tensor_bytes(const GridSpec& grid, std::size_t n_rho, std::size_t m_angular) {
  return static_cast<double>(gain_tensor_entries(grid, n_rho, m_angular)) * sizeof(cplx);
}

inline double direct_weights_bytes(const GridSpec& grid) {
  const double modes = static_cast<double>(grid.size());
  return modes * modes * sizeof(cplx);
}

/// Radial-by-angular product rule for G_loss. For the VHS kernel the sigma
/// integral is C_lambda rho^lambda times the measure of the sphere.
inline LossTable precompute_loss(const CollisionModel& model, const PrecomputeOptions& opts = {}) {
  const GridSpec& g = model.grid;
  const std::size_t modes = g.size();
  const std::size_t n_rho = model.radial.size();
  const double area = sphere_area(g.d);
  std::vector<AlignedVector<cplx>> partial(n_rho);
  parallel_for(
      n_rho,
      [&](std::size_t j) {
        const double rho = model.radial.nodes[j];
        const double radial_w = model.radial.weights[j] * std::pow(rho, g.d - 1) * kernel_amplitude(model.kernel, rho) * area;
        AlignedVector<cplx> acc(modes);
        AlignedVector<cplx> ones(modes, cplx{1.0, 0.0});
        AlignedVector<cplx> phase(modes);
        std::vector<cplx> t(static_cast<std::size_t>(g.d) * g.n);
        for (std::size_t m = 0; m < model.sphere.size(); ++m) {
          detail::direction_phases(g.d, g.n, -g.wavenumber() * rho, model.sphere.points[m], t);
          detail::multiply_separable(g.d, g.n, t, ones, phase);
          const double w = radial_w * model.sphere.weights[m];
          for (std::size_t k = 0; k < modes; ++k) acc[k] += w * phase[k];
        }
        partial[j] = std::move(acc);
      },
      opts.workers);
  LossTable table{g, AlignedVector<cplx>(modes)};
  for (std::size_t j = 0; j < n_rho; ++j)
    for (std::size_t k = 0; k < modes; ++k) table.values[k] += partial[j][k];
  return table;
}

/// Gain tensor via the factorization
///   F(k, rho, ghat) = B(rho) e^{i a k.ghat} sum_s w_s e^{-i a k.sigma_s},  a = (pi/L) rho (1+e(rho))/4,
/// which is the sphere-rule sigma integral reordered. Work is split by radial
/// node. Above the memory budget the tensor lives in a mapped scratch file.
inline GainTensor precompute_gain(const CollisionModel& model, const PrecomputeOptions& opts = {}) {
  const GridSpec& g = model.grid;
  const std::size_t modes = g.size();
  const std::size_t n_rho = model.radial.size();
  const std::size_t n_ang = model.sphere.size();
  const std::size_t entries = gain_tensor_entries(g, n_rho, n_ang);
  const double bytes = gain_tensor_bytes(g, n_rho, n_ang);
  const bool spill = bytes > opts.memory_budget_bytes;
  if (opts.report) {
    std::ostringstream msg;
    msg << "gain tensor: " << entries << " complex entries (" << g.size() << " modes x " << n_rho << " radial x "
        << n_ang << " angular), " << bytes / 1e6 << " MB" << (spill ? ", spilling to a mapped file" : ", in memory");
    opts.report(msg.str());
  }
  GainTensor tensor(model, spill ? TensorStorage::mapped(entries, opts.spill_dir) : TensorStorage::heap(entries));
  parallel_for(
      n_rho,
      [&](std::size_t j) {
        const double rho = model.radial.nodes[j];
        const double e = restitution(model.restitution, rho);
        const double a = g.wavenumber() * rho * (1.0 + e) / 4.0;
        const double amp = kernel_amplitude(model.kernel, rho);
        AlignedVector<cplx> sigma_sum(modes);
        AlignedVector<cplx> ones(modes, cplx{1.0, 0.0});
        AlignedVector<cplx> phase(modes);
        std::vector<cplx> t(static_cast<std::size_t>(g.d) * g.n);
        for (std::size_t s = 0; s < n_ang; ++s) {
          detail::direction_phases(g.d, g.n, -a, model.sphere.points[s], t);
          detail::multiply_separable(g.d, g.n, t, ones, phase);
          const double w = model.sphere.weights[s];
          for (std::size_t k = 0; k < modes; ++k) sigma_sum[k] += w * phase[k];
        }
        for (std::size_t k = 0; k < modes; ++k) sigma_sum[k] *= amp;
        for (std::size_t m = 0; m < n_ang; ++m) {
          detail::direction_phases(g.d, g.n, a, model.sphere.points[m], t);
          detail::multiply_separable(g.d, g.n, t, sigma_sum, tensor.slice(j, m));
        }
      },
      opts.workers);
  return tensor;
}

/// G(l, m) evaluated straight from its double-integral definition on the
/// shared quadrature. Refuses when the N^{2d} table exceeds the budget.
inline DirectWeights precompute_direct(const CollisionModel& model, const PrecomputeOptions& opts = {}) {
  const GridSpec& g = model.grid;
  const double bytes = direct_weights_bytes(g);
  if (bytes > opts.memory_budget_bytes) {
    std::ostringstream msg;
    msg << "direct weights need " << bytes / 1e9 << " GB (N^{2d} = " << static_cast<double>(g.size()) * g.size()
        << " entries), budget is " << opts.memory_budget_bytes / 1e9 << " GB";
    throw Error(Errc::MemoryBudgetExceeded, msg.str());
  }
  const std::size_t modes = g.size();
  const std::size_t n_rho = model.radial.size();
  const std::size_t n_ang = model.sphere.size();
  const std::size_t pairs = n_rho * n_ang;
  const double kappa = g.wavenumber();

  std::vector<double> pair_w(pairs), pair_rho(pairs), pair_a(pairs), pair_amp(pairs);
  std::vector<std::array<double, 3>> pair_dir(pairs);
  for (std::size_t j = 0; j < n_rho; ++j) {
    const double rho = model.radial.nodes[j];
    const double e = restitution(model.restitution, rho);
    for (std::size_t m = 0; m < n_ang; ++m) {
      const std::size_t p = j * n_ang + m;
      pair_w[p] = model.radial.weights[j] * model.sphere.weights[m] * std::pow(rho, g.d - 1);
      pair_rho[p] = rho;
      pair_a[p] = kappa * rho * (1.0 + e) / 4.0;
      pair_amp[p] = kernel_amplitude(model.kernel, rho);
      pair_dir[p] = model.sphere.points[m];
    }
  }

  // outer[m][p] = w_p exp(-i (pi/L) rho m.ghat)
  // inner[K][p] = sum_s w_s B (exp(i a K.(ghat - sigma_s)) - 1)
  std::vector<cplx> outer(modes * pairs);
  std::vector<cplx> inner(modes * pairs);
  parallel_for(
      modes,
      [&](std::size_t f) {
        const auto idx = unflatten(f, g.d, g.n);
        for (std::size_t p = 0; p < pairs; ++p) {
          const double phase = -kappa * pair_rho[p] * detail::dot_modes(idx, g.d, g.n, pair_dir[p]);
          outer[f * pairs + p] = pair_w[p] * cplx{std::cos(phase), std::sin(phase)};
          const double kg = detail::dot_modes(idx, g.d, g.n, pair_dir[p]);
          cplx sum{};
          for (std::size_t s = 0; s < n_ang; ++s) {
            const double arg = pair_a[p] * (kg - detail::dot_modes(idx, g.d, g.n, model.sphere.points[s]));
            sum += model.sphere.weights[s] * (cplx{std::cos(arg), std::sin(arg)} - 1.0);
          }
          inner[f * pairs + p] = pair_amp[p] * sum;
        }
      },
      opts.workers);

  DirectWeights weights{model, std::vector<cplx>(modes * modes)};
  parallel_for(
      modes,
      [&](std::size_t l) {
        const auto li = unflatten(l, g.d, g.n);
        for (std::size_t m = 0; m < modes; ++m) {
          const auto mi = unflatten(m, g.d, g.n);
          const std::size_t k = detail::wrap_add(li, mi, g.d, g.n);
          if (k == 0) continue;  // integrand vanishes identically
          const cplx* o = outer.data() + m * pairs;
          const cplx* in = inner.data() + k * pairs;
          cplx sum{};
          for (std::size_t p = 0; p < pairs; ++p) sum += o[p] * in[p];
          weights.values[l * modes + m] = sum;
        }
      },
      opts.workers);
  return weights;
}

/// Q_k = sum_{l+m=k mod N} G(l,m) f_l f_m by explicit double loop.
inline std::vector<cplx> eval_direct(const DirectWeights& weights, std::span<const cplx> fhat) {
  const GridSpec& g = weights.model.grid;
  const std::size_t modes = g.size();
  if (fhat.size() != modes) throw Error(Errc::GridMismatch, "coefficient count does not match the weight table");
  std::vector<std::array<int, 3>> idx(modes);
  for (std::size_t f = 0; f < modes; ++f) idx[f] = unflatten(f, g.d, g.n);
  std::vector<cplx> q(modes);
  for (std::size_t l = 0; l < modes; ++l) {
    const cplx fl = fhat[l];
    if (fl == cplx{}) continue;
    const cplx* row = weights.values.data() + l * modes;
    for (std::size_t m = 0; m < modes; ++m) q[detail::wrap_add(idx[l], idx[m], g.d, g.n)] += row[m] * fl * fhat[m];
  }
  return q;
}

/// G(l, m) rebuilt from the fast-method tables:
///   sum_{j,m'} w_j w_m' rho_j^{d-1} e^{-i (pi/L) rho_j m.ghat_m'} F(l+m, j, m') - G_loss(m).
inline cplx reconstruct_weight(const GainTensor& gain, const LossTable& loss, std::size_t l, std::size_t m) {
  const GridSpec& g = gain.grid();
  const auto li = unflatten(l, g.d, g.n);
  const auto mi = unflatten(m, g.d, g.n);
  const std::size_t k = detail::wrap_add(li, mi, g.d, g.n);
  const auto& model = gain.model();
  cplx sum{};
  for (std::size_t j = 0; j < gain.radial_size(); ++j) {
    for (std::size_t a = 0; a < gain.angular_size(); ++a) {
      const double phase = -g.wavenumber() * model.radial.nodes[j] * detail::dot_modes(mi, g.d, g.n, model.sphere.points[a]);
      sum += gain.pair_weight(j, a) * cplx{std::cos(phase), std::sin(phase)} * gain.at(k, j, a);
    }
  }
  return sum - loss.values[m];
}

/// FFT evaluation of the collision operator from precomputed tables.
///
/// Loss: one convolution of f with G_loss f. Gain: for each quadrature pair
/// one convolution of f with the translate e^{-i (pi/L) rho m.ghat} f_m,
/// weighted by F(k, rho, ghat). Every convolution is a pointwise product on
/// the grid between two inverse FFTs and one forward FFT. Pairs are grouped
/// by radial node; each group's partial sum has its own slot and the groups
/// are added in order, so the result does not depend on the worker count.
class FastCollisionOperator {
 public:
  FastCollisionOperator(std::shared_ptr<const GainTensor> gain, std::shared_ptr<const LossTable> loss,
                        int workers = worker_count())
      : gain_(std::move(gain)), loss_(std::move(loss)), transform_(gain_->grid()), workers_(workers) {
    if (!(loss_->grid == gain_->grid())) throw Error(Errc::GridMismatch, "gain and loss tables use different grids");
  }

  const GridSpec& grid() const { return gain_->grid(); }
  const KernelSpec& kernel() const { return gain_->model().kernel; }
  const SpectralTransform& transform() const { return transform_; }

  void apply(std::span<const cplx> fhat, std::span<cplx> out, std::optional<double> energy = {}) const {
    const GridSpec& g = grid();
    const std::size_t modes = g.size();
    if (fhat.size() != modes || out.size() != modes) {
      throw Error(Errc::GridMismatch, "coefficient count does not match the collision tables");
    }
    const double gamma = kernel().gamma;
    if (gamma != 0.0 && !energy) throw Error(Errc::MissingEnergy, "kernel has gamma != 0 but no energy was supplied");

    const auto sign = transform_.sign();
    // Coefficients pre-signed for the raw inverse FFT, and f on the grid.
    AlignedVector<cplx> fs(modes);
    for (std::size_t k = 0; k < modes; ++k) fs[k] = fhat[k] * sign[k];
    AlignedVector<cplx> fv(fs);
    transform_.raw_backward(fv);

    // Loss term.
    AlignedVector<cplx> loss(modes);
    for (std::size_t k = 0; k < modes; ++k) loss[k] = fs[k] * loss_->values[k];
    transform_.raw_backward(loss);
    for (std::size_t k = 0; k < modes; ++k) loss[k] *= fv[k];
    transform_.raw_forward(loss);

    // Gain term, one slot per radial node.
    const auto& model = gain_->model();
    const std::size_t n_rho = gain_->radial_size();
    const std::size_t n_ang = gain_->angular_size();
    std::vector<AlignedVector<cplx>> partial(n_rho);
    parallel_for(
        n_rho,
        [&](std::size_t j) {
          AlignedVector<cplx> acc(modes);
          AlignedVector<cplx> work(modes);
          std::vector<cplx> t(static_cast<std::size_t>(g.d) * g.n);
          const double rho = model.radial.nodes[j];
          for (std::size_t m = 0; m < n_ang; ++m) {
            detail::direction_phases(g.d, g.n, -g.wavenumber() * rho, model.sphere.points[m], t);
            detail::multiply_separable(g.d, g.n, t, fs, work);
            transform_.raw_backward(work);
            for (std::size_t k = 0; k < modes; ++k) work[k] *= fv[k];
            transform_.raw_forward(work);
            const double w = model.sphere.weights[m];
            const cplx* f = gain_->slice(j, m).data();
            for (std::size_t k = 0; k < modes; ++k) acc[k] += w * (f[k] * work[k]);
          }
          partial[j] = std::move(acc);
        },
        workers_);

    AlignedVector<cplx> gain(modes);
    for (std::size_t j = 0; j < n_rho; ++j) {
      const double rho = model.radial.nodes[j];
      const double wj = model.radial.weights[j] * std::pow(rho, g.d - 1);
      for (std::size_t k = 0; k < modes; ++k) gain[k] += wj * partial[j][k];
    }

    const double scale = (gamma != 0.0 ? std::pow(*energy, gamma) : 1.0) / static_cast<double>(modes);
    for (std::size_t k = 0; k < modes; ++k) out[k] = (gain[k] - loss[k]) * (sign[k] * scale);
  }

  std::vector<cplx> operator()(std::span<const cplx> fhat, std::optional<double> energy = {}) const {
    std::vector<cplx> out(fhat.size());
    apply(fhat, out, energy);
    return out;
  }

 private:
  std::shared_ptr<const GainTensor> gain_;
  std::shared_ptr<const LossTable> loss_;
  SpectralTransform transform_;
  int workers_;
};

/// Non-owning convenience wrapper around FastCollisionOperator.
inline std::vector<cplx> eval_fast(const GainTensor& gain, const LossTable& loss, std::span<const cplx> fhat,
                                   std::optional<double> energy = {}) {
  auto no_delete = [](const auto*) {};
  FastCollisionOperator op(std::shared_ptr<const GainTensor>(&gain, no_delete),
                           std::shared_ptr<const LossTable>(&loss, no_delete));
  return op(fhat, energy);
}

// Table cache: "GGW1", a 64-bit fingerprint of everything the tables depend
// on, then raw little-endian complex doubles (loss table, then gain tensor).

namespace detail {

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ull;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 0x100000001b3ull;
    }
  }
  void f64(double v) { bytes(&v, sizeof v); }
  void i64(std::int64_t v) { bytes(&v, sizeof v); }
};

}  // namespace detail

inline std::uint64_t table_fingerprint(const CollisionModel& model) {
  static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");
  detail::Fnv1a h;
  const GridSpec& g = model.grid;
  h.i64(g.d);
  h.i64(g.n);
  h.f64(g.s);
  h.f64(g.r);
  h.f64(g.l);
  h.f64(model.kernel.lambda);
  h.f64(model.kernel.c_lambda);
  h.f64(model.kernel.gamma);
  h.i64(static_cast<std::int64_t>(model.restitution.index()));
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRestitution>) {
          h.f64(r.e);
        } else if constexpr (std::is_same_v<T, TanhRestitution>) {
          h.f64(r.e0);
        } else if constexpr (std::is_same_v<T, ToscaniRestitution>) {
          h.f64(r.c);
          h.f64(r.gamma_t);
        } else {
          h.f64(r.a);
        }
      },
      model.restitution);
  for (double x : model.radial.nodes) h.f64(x);
  for (double x : model.radial.weights) h.f64(x);
  for (const auto& p : model.sphere.points) h.bytes(p.data(), sizeof p);
  for (double x : model.sphere.weights) h.f64(x);
  return h.h;
}

inline constexpr char kTableMagic[4] = {'G', 'G', 'W', '1'};

inline void save_tables(const std::filesystem::path& path, const LossTable& loss, const GainTensor& gain) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot write table cache " + tmp.string());
    const std::uint64_t fp = table_fingerprint(gain.model());
    out.write(kTableMagic, 4);
    out.write(reinterpret_cast<const char*>(&fp), sizeof fp);
    out.write(reinterpret_cast<const char*>(loss.values.data()),
              static_cast<std::streamsize>(loss.values.size() * sizeof(cplx)));
    const auto data = gain.data();
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(cplx)));
    if (!out) throw Error(Errc::IoError, "short write to table cache " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct CollisionTables {
  LossTable loss;
  GainTensor gain;
};

/// Loads cached tables when the file exists and its fingerprint matches the
/// model; returns nothing otherwise. A matching file of the wrong length is
/// an error.
inline std::optional<CollisionTables> load_tables(const std::filesystem::path& path, const CollisionModel& model,
                                                  const PrecomputeOptions& opts = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[4];
  std::uint64_t fp = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&fp), sizeof fp);
  if (!in || std::memcmp(magic, kTableMagic, 4) != 0 || fp != table_fingerprint(model)) return std::nullopt;

  const std::size_t modes = model.grid.size();
  const std::size_t entries = gain_tensor_entries(model.grid, model.radial.size(), model.sphere.size());
  const auto expected = 12 + (modes + entries) * sizeof(cplx);
  if (std::filesystem::file_size(path) != expected) {
    throw Error(Errc::IoError, "table cache " + path.string() + " has the right fingerprint but the wrong length");
  }
  LossTable loss{model.grid, AlignedVector<cplx>(modes)};
  in.read(reinterpret_cast<char*>(loss.values.data()), static_cast<std::streamsize>(modes * sizeof(cplx)));
  const bool spill = gain_tensor_bytes(model.grid, model.radial.size(), model.sphere.size()) > opts.memory_budget_bytes;
  GainTensor gain(model, spill ? TensorStorage::mapped(entries, opts.spill_dir) : TensorStorage::heap(entries));
  auto data = gain.data();
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(entries * sizeof(cplx)));
  if (!in) throw Error(Errc::IoError, "short read from table cache " + path.string());
  return CollisionTables{std::move(loss), std::move(gain)};
}

}  // namespace granular
