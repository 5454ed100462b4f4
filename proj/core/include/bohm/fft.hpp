#pragma once

#include "bohm/grid.hpp"

#include <memory>

namespace bohm {

// In-place multidimensional FFT over a grid with k interleaved components.
// Forward is unnormalized; backward divides by the number of grid points.
class Fft {
 public:
  Fft(const GridSpec& grid, int components);
  ~Fft();
  Fft(Fft&&) noexcept;
  Fft& operator=(Fft&&) noexcept;
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  void forward(Complex* data) const;
  void backward(Complex* data) const;

  const GridSpec& grid() const;
  int components() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Version string of the FFT backend, e.g. "fftw-3.3.8".
const char* fft_backend_version() noexcept;

}  // namespace bohm
