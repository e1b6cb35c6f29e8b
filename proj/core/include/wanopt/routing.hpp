// Sparse binary link-path incidence matrix with per-flow column blocks.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wanopt {

/// L x P binary matrix in compressed-row form. Entry (l, i) is 1 iff global
/// path i traverses link l. Columns of one flow occupy a contiguous block;
/// the block layout itself lives with the owning instance.
class RoutingMatrix {
 public:
  RoutingMatrix() = default;

  /// Builds from per-flow path link-lists: paths[k][i] is the list of link
  /// indices (0-based, strictly ascending not required) used by path i of
  /// flow k. Global column order is flow-major.
  static RoutingMatrix from_paths(
      std::size_t num_links,
      const std::vector<std::vector<std::vector<std::size_t>>>& paths);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return col_idx_.size(); }

  /// out = R * x, out has length rows().
  void multiply(std::span<const double> x, std::span<double> out) const;

  /// out = R^T * v, out has length cols().
  void multiply_transpose(std::span<const double> v,
                          std::span<double> out) const;

  /// Dot product of row l with x.
  double row_dot(std::size_t l, std::span<const double> x) const;

  /// Column indices with a 1 in row l.
  std::span<const std::uint32_t> row_cols(std::size_t l) const {
    return {col_idx_.data() + row_ptr_[l], col_idx_.data() + row_ptr_[l + 1]};
  }

  /// Number of nonzeros in each column (paths with no link have count 0).
  std::vector<std::size_t> column_counts() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint32_t> row_ptr_;  // rows_ + 1
  std::vector<std::uint32_t> col_idx_;  // nnz, ascending within each row
};

struct SpectralNormEstimate {
  double value = 0.0;          ///< ||R||_2^2 (or the Frobenius fallback bound)
  bool via_power_iteration = true;
  int iterations = 0;
};

/// Squared spectral norm via power iteration on the smaller Gram matrix with
/// a deterministic start vector; relative accuracy 1e-8 for well-separated
/// spectra. Falls back to the Frobenius upper bound (= nnz for a binary
/// matrix) when the iteration cap is hit, flagged via via_power_iteration.
SpectralNormEstimate spectral_norm_sq(const RoutingMatrix& m);

}  // namespace wanopt
