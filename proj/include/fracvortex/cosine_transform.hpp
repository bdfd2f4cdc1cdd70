#pragma once

#include "fracvortex/types.hpp"

#include <memory>

namespace fracvortex {

/// Unnormalized 2D cosine transforms of x-fastest nx-by-ny arrays, matching the
/// even reflection of cell-centered samples:
///
///   forward (DCT-II):  X[k,l] = 4 sum_{i,j} x[i,j] cos(pi k (i+1/2)/nx) cos(pi l (j+1/2)/ny)
///   inverse (DCT-III): undoes forward up to the factor 4 nx ny.
///
/// Complex arrays are transformed as two real arrays (real and imaginary parts).
class CosineTransform2D {
 public:
  CosineTransform2D(int nx, int ny);
  ~CosineTransform2D();
  CosineTransform2D(const CosineTransform2D&) = delete;
  CosineTransform2D& operator=(const CosineTransform2D&) = delete;

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double normalization() const { return 4.0 * nx_ * ny_; }

  void forward(ComplexArray& data);
  void inverse(ComplexArray& data);
  void forward(RealField& data);
  void inverse(RealField& data);

 private:
  struct Plans;
  int nx_;
  int ny_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace fracvortex
