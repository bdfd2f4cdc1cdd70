#include "fracvortex/cosine_transform.hpp"

#include "fftw_plan.hpp"

#include <algorithm>
#include <stdexcept>

namespace fracvortex {
namespace {

struct Buffer {
  explicit Buffer(std::size_t n) : data(static_cast<double*>(fftw_malloc(n * sizeof(double)))), size(n) {
    if (data == nullptr) throw std::bad_alloc();
    std::fill(data, data + n, 0.0);
  }
  ~Buffer() { fftw_free(data); }
  Buffer(const Buffer&) = delete;
  Buffer& operator=(const Buffer&) = delete;
  double* data;
  std::size_t size;
};

// Two interleaved real arrays (stride 2), as in std::complex storage.
detail::Plan plan_pair(int nx, int ny, double* data, fftw_r2r_kind kind) {
  const int n[2] = {ny, nx};
  const fftw_r2r_kind kinds[2] = {kind, kind};
  std::lock_guard lock(detail::fftw_planner_mutex());
  return detail::Plan(fftw_plan_many_r2r(2, n, 2, data, nullptr, 2, 1, data, nullptr, 2, 1, kinds, FFTW_ESTIMATE));
}

}  // namespace

struct CosineTransform2D::Plans {
  Plans(int nx, int ny)
      : pair_buffer(2 * static_cast<std::size_t>(nx) * ny),
        real_buffer(static_cast<std::size_t>(nx) * ny),
        pair_forward(plan_pair(nx, ny, pair_buffer.data, FFTW_REDFT10)),
        pair_inverse(plan_pair(nx, ny, pair_buffer.data, FFTW_REDFT01)),
        real_forward(detail::plan_r2r_2d(nx, ny, real_buffer.data, FFTW_REDFT10)),
        real_inverse(detail::plan_r2r_2d(nx, ny, real_buffer.data, FFTW_REDFT01)) {
    if (!pair_forward || !pair_inverse || !real_forward || !real_inverse) {
      throw std::runtime_error("FFTW could not plan a cosine transform");
    }
  }
  Buffer pair_buffer;
  Buffer real_buffer;
  detail::Plan pair_forward;
  detail::Plan pair_inverse;
  detail::Plan real_forward;
  detail::Plan real_inverse;
};

CosineTransform2D::CosineTransform2D(int nx, int ny) : nx_(nx), ny_(ny) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("cosine transform needs at least 2 samples per axis");
  plans_ = std::make_unique<Plans>(nx, ny);
}

CosineTransform2D::~CosineTransform2D() = default;

namespace {

template <typename Array>
void run(Array& data, double* buffer, std::size_t doubles, const detail::Plan& plan, int nx, int ny) {
  if (data.rows() != nx || data.cols() != ny) throw std::invalid_argument("cosine transform shape mismatch");
  const double* src = reinterpret_cast<const double*>(data.data());
  std::copy(src, src + doubles, buffer);
  fftw_execute(plan.get());
  std::copy(buffer, buffer + doubles, reinterpret_cast<double*>(data.data()));
}

}  // namespace

void CosineTransform2D::forward(ComplexArray& data) {
  run(data, plans_->pair_buffer.data, plans_->pair_buffer.size, plans_->pair_forward, nx_, ny_);
}

void CosineTransform2D::inverse(ComplexArray& data) {
  run(data, plans_->pair_buffer.data, plans_->pair_buffer.size, plans_->pair_inverse, nx_, ny_);
}

void CosineTransform2D::forward(RealField& data) {
  run(data, plans_->real_buffer.data, plans_->real_buffer.size, plans_->real_forward, nx_, ny_);
}

void CosineTransform2D::inverse(RealField& data) {
  run(data, plans_->real_buffer.data, plans_->real_buffer.size, plans_->real_inverse, nx_, ny_);
}

}  // namespace fracvortex
