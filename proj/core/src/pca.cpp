#include "fluxrnn/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fluxrnn/errors.hpp"

namespace fluxrnn {

SymmetricEigen symmetric_eigen(const Matrix& input) {
  const std::size_t n = input.rows();
  if (input.cols() != n) throw ShapeMismatch("eigensolver needs a square matrix");
  Matrix a = input;
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double frob = 0.0;
  for (double x : a.data()) frob += x * x;
  const double threshold = 1e-34 * std::max(frob, 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off <= threshold) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = a(p, r) = c * arp - s * arq;
          a(r, q) = a(q, r) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(k, r) = v(r, order[k]);
  }
  return out;
}

PcaModel pca_fit(const Matrix& data, const PcaOptions& options) {
  const std::size_t n = data.rows();
  const std::size_t p = data.cols();
  if (n < 2) throw PreconditionViolation("PCA needs at least two rows");
  if (p == 0) throw PreconditionViolation("PCA needs at least one column");
  if (options.k && (*options.k < 1 || *options.k > p)) {
    throw PreconditionViolation("requested component count outside [1, p]");
  }
  for (double x : data.data()) {
    if (!std::isfinite(x)) throw PreconditionViolation("PCA input must be finite");
  }

  PcaModel model;
  model.standardized = options.standardize;
  model.means.assign(p, 0.0);
  model.scales.assign(p, 1.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c) model.means[c] += data(r, c);
  }
  for (double& m : model.means) m /= static_cast<double>(n);

  Matrix centered(n, p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c) centered(r, c) = data(r, c) - model.means[c];
  }
  for (std::size_t c = 0; c < p; ++c) {
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) ss += centered(r, c) * centered(r, c);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) throw DegenerateMatrix("column " + std::to_string(c) + " has zero variance");
    if (options.standardize) {
      model.scales[c] = sd;
      for (std::size_t r = 0; r < n; ++r) centered(r, c) /= sd;
    }
  }

  Matrix cov(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i; j < p; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += centered(r, i) * centered(r, j);
      cov(i, j) = cov(j, i) = s / static_cast<double>(n - 1);
    }
  }

  const SymmetricEigen eig = symmetric_eigen(cov);
  double total = 0.0;
  for (double lambda : eig.values) total += std::max(lambda, 0.0);

  std::vector<double> ratio(p);
  for (std::size_t i = 0; i < p; ++i) ratio[i] = std::max(eig.values[i], 0.0) / total;

  std::size_t k = 0;
  if (options.k) {
    k = *options.k;
  } else {
    const std::size_t cap = std::min(p, std::max<std::size_t>(options.max_components, 1));
    double cumulative = 0.0;
    k = cap;
    for (std::size_t i = 0; i < cap; ++i) {
      cumulative += ratio[i];
      if (cumulative > options.variance_target) {
        k = i + 1;
        break;
      }
    }
  }

  model.components = Matrix(k, p);
  for (std::size_t i = 0; i < k; ++i) {
    auto vec = eig.vectors.row(i);
    std::size_t arg = 0;
    for (std::size_t c = 1; c < p; ++c) {
      if (std::abs(vec[c]) > std::abs(vec[arg])) arg = c;
    }
    const double sign = vec[arg] < 0.0 ? -1.0 : 1.0;
    for (std::size_t c = 0; c < p; ++c) model.components(i, c) = sign * vec[c];
    model.eigenvalues.push_back(eig.values[i]);
    model.explained_variance_ratio.push_back(ratio[i]);
  }
  return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& rows) {
  const std::size_t p = model.n_inputs();
  if (rows.cols() != p) {
    throw ShapeMismatch("PCA model expects " + std::to_string(p) + " columns, got " +
                        std::to_string(rows.cols()));
  }
  const std::size_t k = model.n_components();
  Matrix out(rows.rows(), k);
  std::vector<double> z(p);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (std::size_t c = 0; c < p; ++c) z[c] = (rows(r, c) - model.means[c]) / model.scales[c];
    for (std::size_t i = 0; i < k; ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < p; ++c) s += model.components(i, c) * z[c];
      out(r, i) = s;
    }
  }
  return out;
}

Matrix pca_inverse_transform(const PcaModel& model, const Matrix& scores) {
  const std::size_t k = model.n_components();
  const std::size_t p = model.n_inputs();
  if (scores.cols() != k) throw ShapeMismatch("score matrix width differs from component count");
  Matrix out(scores.rows(), p);
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    for (std::size_t c = 0; c < p; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < k; ++i) s += scores(r, i) * model.components(i, c);
      out(r, c) = s * model.scales[c] + model.means[c];
    }
  }
  return out;
}

}  // namespace fluxrnn
