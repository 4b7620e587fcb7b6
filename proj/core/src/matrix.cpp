#include "fluxrnn/matrix.hpp"

#include <utility>

#include "fluxrnn/errors.hpp"

namespace fluxrnn {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeMismatch("matrix payload of " + std::to_string(data_.size()) + " values for " +
                        std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

}  // namespace fluxrnn
