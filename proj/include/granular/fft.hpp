#pragma once

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <new>
#include <span>
#include <vector>

namespace granular {

using cplx = std::complex<double>;

/// Allocator backed by fftw_malloc so every buffer shares the SIMD alignment
/// the cached plans were created with.
template <class T>
struct FftwAllocator {
  using value_type = T;

  FftwAllocator() = default;
  template <class U>
  FftwAllocator(const FftwAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    void* p = fftw_malloc(n * sizeof(T));
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { fftw_free(p); }

  template <class U>
  bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

template <class T>
using AlignedVector = std::vector<T, FftwAllocator<T>>;

enum class FftDirection { Forward = FFTW_FORWARD, Backward = FFTW_BACKWARD };

/// In-place complex FFT on an N^d cube. Plans are created once per
/// (d, N, direction) and shared; execution on caller-owned aligned buffers is
/// thread-safe. FFTW_ESTIMATE keeps the chosen algorithm, and therefore every
/// roundoff bit, identical from run to run.
class FftPlan {
 public:
  FftPlan(int d, int n, FftDirection dir) : plan_(lookup(d, n, dir)), size_(cube(d, n)) {}

  void execute(std::span<cplx> data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan_, p, p);
  }

  std::size_t size() const { return size_; }

 private:
  static std::size_t cube(int d, int n) {
    std::size_t s = 1;
    for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
    return s;
  }

  static fftw_plan lookup(int d, int n, FftDirection dir) {
    static std::mutex mutex;
    static std::map<std::array<int, 3>, fftw_plan> cache;
    std::lock_guard lock(mutex);
    const std::array<int, 3> key{d, n, static_cast<int>(dir)};
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    AlignedVector<cplx> scratch(cube(d, n));
    std::array<int, 3> dims{n, n, n};
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft(d, dims.data(), p, p, static_cast<int>(dir), FFTW_ESTIMATE);
    cache.emplace(key, plan);
    return plan;
  }

  fftw_plan plan_;
  std::size_t size_;
};

}  // namespace granular
