#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "granular/error.hpp"
#include "granular/fft.hpp"

namespace granular {

/// Smallest admissible box half-width for a distribution supported in B_S:
/// (3 + sqrt 2) S / 2. Below it periodic images of the support interact.
inline double aliasing_bound(double support) { return (3.0 + std::numbers::sqrt2) * support / 2.0; }

/// Truncated, periodized velocity box [-L, L]^d sampled with N nodes per axis.
///
/// Nodes follow the cell-left convention v_j = -L + (2L/N) j, j = 0..N-1.
/// Spectral coefficients are stored in FFT order: storage index i along an
/// axis holds mode k = i for i < N/2 and k = i - N otherwise, so the mode set
/// is {-N/2, ..., N/2 - 1}. Multi-dimensional arrays are row-major with the
/// last axis fastest, for physical values and coefficients alike.
struct GridSpec {
  int d = 2;
  int n = 0;
  double s = 0.0;  ///< support radius of f
  double r = 0.0;  ///< relative-velocity truncation radius
  double l = 0.0;  ///< box half-width

  std::size_t size() const {
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(n);
    return total;
  }
  double spacing() const { return 2.0 * l / n; }
  double cell_volume() const { return std::pow(spacing(), d); }
  double node(int j) const { return -l + spacing() * j; }
  /// Angular frequency pi/L of the unit mode.
  double wavenumber() const { return std::numbers::pi / l; }

  bool operator==(const GridSpec&) const = default;
};

struct GridOverrides {
  std::optional<double> r;
  std::optional<double> l;
};

inline void validate(const GridSpec& g) {
  if (g.d != 2 && g.d != 3) throw Error(Errc::InvalidDimension, "d must be 2 or 3, got " + std::to_string(g.d));
  if (g.n < 8) throw Error(Errc::InvalidParameter, "N must be at least 8, got " + std::to_string(g.n));
  if (g.n % 2 != 0) throw Error(Errc::OddResolution, "N must be even, got " + std::to_string(g.n));
  if (!(g.s > 0.0)) throw Error(Errc::InvalidParameter, "S must be positive");
  if (!(g.r > 0.0)) throw Error(Errc::InvalidParameter, "R must be positive");
  // A hair of slack so that L = bound written with 17 digits round-trips.
  if (g.l < aliasing_bound(g.s) * (1.0 - 1e-14)) {
    throw Error(Errc::AliasingViolation, "L = " + std::to_string(g.l) + " is below (3+sqrt2)S/2 = " +
                                             std::to_string(aliasing_bound(g.s)));
  }
  if (g.r > 2.0 * g.l) throw Error(Errc::InvalidParameter, "R must not exceed 2L");
}

/// Builds a grid with R = 2S and L = (3 + sqrt 2) S / 2 unless overridden.
inline GridSpec make_grid(int d, int n, double s, GridOverrides overrides = {}) {
  GridSpec g{d, n, s, overrides.r.value_or(2.0 * s), overrides.l.value_or(aliasing_bound(s))};
  validate(g);
  return g;
}

/// Signed mode of storage index i along an axis of length n.
constexpr int mode_of(int i, int n) { return i < n / 2 ? i : i - n; }
/// Storage index of mode k (any integer, reduced modulo n).
constexpr int index_of(int k, int n) { return ((k % n) + n) % n; }

/// Flat storage index of the mode -k, i.e. the Hermitian partner of `flat`.
inline std::size_t conjugate_index(std::size_t flat, int d, int n) {
  std::size_t out = 0;
  std::size_t stride = 1;
  for (int a = 0; a < d; ++a) {
    const int i = static_cast<int>(flat % n);
    flat /= n;
    out += static_cast<std::size_t>(index_of(-i, n)) * stride;
    stride *= n;
  }
  return out;
}

/// Per-axis storage indices of a flat index (row-major, last axis fastest).
inline std::array<int, 3> unflatten(std::size_t flat, int d, int n) {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = d - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

/// Solution on the velocity grid plus its Fourier coefficients.
///
/// Physical values are the source of truth. Writing through values() marks
/// the coefficients stale; to_spectral refreshes them. The integrator works
/// on coefficients and refreshes values with from_spectral.
class DistributionField {
 public:
  DistributionField() = default;
  explicit DistributionField(const GridSpec& grid) : grid_(grid), values_(grid.size(), 0.0), coeffs_(grid.size()) {}

  const GridSpec& grid() const { return grid_; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() {
    coeffs_fresh_ = false;
    return values_;
  }

  std::span<const cplx> coeffs() const { return coeffs_; }
  std::span<cplx> coeffs() {
    values_fresh_ = false;
    return coeffs_;
  }

  bool coeffs_fresh() const { return coeffs_fresh_; }
  bool values_fresh() const { return values_fresh_; }

  /// Largest discarded imaginary part seen by the last from_spectral.
  double imag_residue() const { return imag_residue_; }

 private:
  friend DistributionField& to_spectral(DistributionField& field);
  friend DistributionField& from_spectral(DistributionField& field);

  GridSpec grid_;
  std::vector<double> values_;
  AlignedVector<cplx> coeffs_;
  bool coeffs_fresh_ = false;
  bool values_fresh_ = true;
  double imag_residue_ = 0.0;
};

/// Forward/inverse transforms between grid values and the coefficients f_k of
/// the truncated series f(v) = sum_k f_k exp(i (pi/L) k.v).
///
/// With cell-left nodes the series phase at v_j is (-1)^{k_1+...+k_d} times
/// the plain DFT kernel, so both directions reduce to one FFT plus a sign
/// flip. The object is cheap to copy and safe to share across threads.
class SpectralTransform {
 public:
  explicit SpectralTransform(const GridSpec& grid)
      : d_(grid.d), n_(grid.n), forward_(grid.d, grid.n, FftDirection::Forward),
        backward_(grid.d, grid.n, FftDirection::Backward), sign_(grid.size()) {
    for (std::size_t f = 0; f < sign_.size(); ++f) {
      const auto idx = unflatten(f, d_, n_);
      sign_[f] = ((idx[0] + idx[1] + idx[2]) % 2 == 0) ? 1.0 : -1.0;
    }
  }

  std::size_t size() const { return sign_.size(); }
  std::span<const double> sign() const { return sign_; }

  /// data <- coefficients of the grid samples held in data.
  void forward_in_place(std::span<cplx> data) const {
    forward_.execute(data);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (std::size_t f = 0; f < data.size(); ++f) data[f] *= sign_[f] * scale;
  }

  /// data <- grid samples of the series whose coefficients are held in data.
  void backward_in_place(std::span<cplx> data) const {
    for (std::size_t f = 0; f < data.size(); ++f) data[f] *= sign_[f];
    backward_.execute(data);
  }

  /// Raw (unscaled, unsigned) FFTs for hot loops that fold the sign and
  /// scale into their own passes.
  void raw_forward(std::span<cplx> data) const { forward_.execute(data); }
  void raw_backward(std::span<cplx> data) const { backward_.execute(data); }

 private:
  int d_;
  int n_;
  FftPlan forward_;
  FftPlan backward_;
  std::vector<double> sign_;
};

/// Threshold on the imaginary residue of an inverse transform, relative to
/// the largest real value.
inline constexpr double kImagResidueTolerance = 1e-10;

inline DistributionField& to_spectral(DistributionField& field) {
  SpectralTransform transform(field.grid_);
  for (std::size_t f = 0; f < field.values_.size(); ++f) field.coeffs_[f] = field.values_[f];
  transform.forward_in_place(field.coeffs_);
  field.coeffs_fresh_ = true;
  return field;
}

inline DistributionField to_spectral(DistributionField&& field) {
  to_spectral(field);
  return std::move(field);
}

/// Refreshes values from coefficients, keeping the real part. Throws
/// SymmetryViolation when the discarded imaginary part exceeds 1e-10 times
/// the largest value, which signals coefficients without Hermitian symmetry.
inline DistributionField& from_spectral(DistributionField& field) {
  SpectralTransform transform(field.grid_);
  AlignedVector<cplx> work(field.coeffs_.begin(), field.coeffs_.end());
  transform.backward_in_place(work);
  double max_real = 0.0;
  double max_imag = 0.0;
  for (std::size_t f = 0; f < work.size(); ++f) {
    field.values_[f] = work[f].real();
    max_real = std::max(max_real, std::abs(work[f].real()));
    max_imag = std::max(max_imag, std::abs(work[f].imag()));
  }
  field.imag_residue_ = max_imag;
  field.values_fresh_ = true;
  if (max_imag > kImagResidueTolerance * max_real && max_imag > 0.0) {
    throw Error(Errc::SymmetryViolation, "imaginary residue " + std::to_string(max_imag) +
                                             " exceeds tolerance relative to max value " +
                                             std::to_string(max_real));
  }
  return field;
}

inline DistributionField from_spectral(DistributionField&& field) {
  from_spectral(field);
  return std::move(field);
}

}  // namespace granular
