#pragma once

#include <fcntl.h>
#include <sys/mman.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <utility>

#include "granular/error.hpp"
#include "granular/fft.hpp"

namespace granular {

/// Owning buffer of complex doubles that lives either on the heap or in a
/// memory-mapped scratch file. The file is unlinked as soon as it is mapped,
/// so the pages disappear with the mapping.
class TensorStorage {
 public:
  TensorStorage() = default;

  static TensorStorage heap(std::size_t count) {
    TensorStorage s;
    s.heap_.assign(count, cplx{});
    s.count_ = count;
    return s;
  }

  static TensorStorage mapped(std::size_t count, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::string tmpl = (dir / "granular-spill-XXXXXX").string();
    const int fd = ::mkstemp(tmpl.data());
    if (fd < 0) throw Error(Errc::IoError, "cannot create spill file in " + dir.string() + ": " + std::strerror(errno));
    ::unlink(tmpl.c_str());
    const std::size_t bytes = count * sizeof(cplx);
    if (::ftruncate(fd, static_cast<off_t>(bytes)) != 0) {
      ::close(fd);
      throw Error(Errc::IoError, "cannot size spill file: " + std::string(std::strerror(errno)));
    }
    void* p = ::mmap(nullptr, bytes, PROT_READ | PROT_WRITE, MAP_SHARED, fd, 0);
    ::close(fd);
    if (p == MAP_FAILED) throw Error(Errc::IoError, "cannot map spill file: " + std::string(std::strerror(errno)));
    TensorStorage s;
    s.map_ = p;
    s.count_ = count;
    return s;
  }

  TensorStorage(TensorStorage&& other) noexcept { swap(other); }
  TensorStorage& operator=(TensorStorage&& other) noexcept {
    TensorStorage tmp(std::move(other));
    swap(tmp);
    return *this;
  }
  TensorStorage(const TensorStorage&) = delete;
  TensorStorage& operator=(const TensorStorage&) = delete;

  ~TensorStorage() {
    if (map_ != nullptr) ::munmap(map_, count_ * sizeof(cplx));
  }

  bool is_mapped() const { return map_ != nullptr; }
  std::size_t size() const { return count_; }

  std::span<cplx> data() { return {map_ ? static_cast<cplx*>(map_) : heap_.data(), count_}; }
  std::span<const cplx> data() const { return {map_ ? static_cast<const cplx*>(map_) : heap_.data(), count_}; }

 private:
  void swap(TensorStorage& other) noexcept {
    std::swap(heap_, other.heap_);
    std::swap(map_, other.map_);
    std::swap(count_, other.count_);
  }

  AlignedVector<cplx> heap_;
  void* map_ = nullptr;
  std::size_t count_ = 0;
};

}  // namespace granular
