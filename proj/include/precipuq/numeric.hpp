#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace precipuq {

// Dense row-major matrix of doubles. Small by design; the project's linear
// algebra is elementwise and sorting-dominated, so no external library.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Pairwise summation with a wide-precision base case. Deterministic: the
// split points depend only on the length.
double pairwise_sum(std::span<const double> values);

inline double pairwise_mean(std::span<const double> values) {
  return pairwise_sum(values) / static_cast<double>(values.size());
}

// Empirical alpha-quantile, always a minimizer of the empirical pinball sum:
// the ceil(alpha*n)-th order statistic, except that an integer alpha*n yields
// the midpoint of the minimizing interval [y_(k), y_(k+1)].
double empirical_quantile(std::span<const double> values, double alpha);

// Same inverse over a weighted ECDF. `values` need not be sorted; weights
// must be nonnegative with a positive total. Returns one of the atoms.
double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double alpha);

struct Standardization {
  std::vector<double> mean;
  std::vector<double> scale;          // > 0 always; floored for constant columns
  std::vector<bool> excluded;         // constant columns, coefficient pinned to 0
};

// Per-column mean/std of X; columns with vanishing spread get scale 1 and an
// exclusion flag.
Standardization standardize_columns(const Matrix& x);

struct MeanScale {
  double mean = 0.0;
  double scale = 1.0;
};

MeanScale mean_scale(std::span<const double> values);

}  // namespace precipuq
