#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fluxrnn/matrix.hpp"

namespace fluxrnn {

inline constexpr std::size_t kDefaultMaxComponents = 18;
inline constexpr double kDefaultVarianceTarget = 0.99;

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // row i is the unit eigenvector of values[i]
};

// Cyclic Jacobi eigensolver for a dense symmetric matrix.
SymmetricEigen symmetric_eigen(const Matrix& a);

struct PcaOptions {
  bool standardize = true;
  std::optional<std::size_t> k;  // unset: chosen from variance_target
  double variance_target = kDefaultVarianceTarget;
  std::size_t max_components = kDefaultMaxComponents;
};

struct PcaModel {
  std::vector<double> means;
  std::vector<double> scales;  // all 1 when not standardized
  Matrix components;           // k x p, orthonormal rows
  std::vector<double> eigenvalues;
  std::vector<double> explained_variance_ratio;
  bool standardized = true;

  std::size_t n_inputs() const noexcept { return means.size(); }
  std::size_t n_components() const noexcept { return components.rows(); }

  friend bool operator==(const PcaModel&, const PcaModel&) = default;
};

// Fits on a rows x p matrix without missing values. Components follow the
// eigenvectors of the (correlation or covariance) matrix in decreasing
// eigenvalue order; each is signed so its largest-magnitude coordinate is
// positive. Throws DegenerateMatrix for a zero-variance column.
PcaModel pca_fit(const Matrix& data, const PcaOptions& options = {});

// Projects rows onto the components. Throws ShapeMismatch.
Matrix pca_transform(const PcaModel& model, const Matrix& rows);

// Maps component scores back to the input space.
Matrix pca_inverse_transform(const PcaModel& model, const Matrix& scores);

}  // namespace fluxrnn
