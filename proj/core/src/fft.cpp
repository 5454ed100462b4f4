#include "bohm/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

namespace bohm {

namespace {
// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft::Impl {
  GridSpec grid;
  int k = 1;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  double scale = 1.0;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

Fft::Fft(const GridSpec& grid, int components) : impl_(std::make_unique<Impl>()) {
  grid.validate();
  require(components >= 1, Errc::invalid_argument, "component count");
  impl_->grid = grid;
  impl_->k = components;
  impl_->scale = 1.0 / static_cast<double>(grid.size());

  std::vector<int> n(grid.points.begin(), grid.points.end());
  // Plans are built on a scratch buffer and executed with new-array execute.
  std::vector<fftw_complex> scratch(grid.size() * static_cast<std::size_t>(components));
  std::lock_guard lock(planner_mutex());
  impl_->fwd = fftw_plan_many_dft(grid.dim, n.data(), components, scratch.data(), nullptr, components,
                                  1, scratch.data(), nullptr, components, 1, FFTW_FORWARD,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
  impl_->bwd = fftw_plan_many_dft(grid.dim, n.data(), components, scratch.data(), nullptr, components,
                                  1, scratch.data(), nullptr, components, 1, FFTW_BACKWARD,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED);
  require(impl_->fwd && impl_->bwd, Errc::invalid_argument, "FFTW planning failed");
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(Complex* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(impl_->fwd, p, p);
}

void Fft::backward(Complex* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(impl_->bwd, p, p);
  const std::size_t n = impl_->grid.size() * static_cast<std::size_t>(impl_->k);
  for (std::size_t i = 0; i < n; ++i) data[i] *= impl_->scale;
}

const GridSpec& Fft::grid() const { return impl_->grid; }
int Fft::components() const { return impl_->k; }

const char* fft_backend_version() noexcept { return fftw_version; }

}  // namespace bohm
