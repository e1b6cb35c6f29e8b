#include "wanopt/routing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wanopt {

RoutingMatrix RoutingMatrix::from_paths(
    std::size_t num_links,
    const std::vector<std::vector<std::vector<std::size_t>>>& paths) {
  RoutingMatrix m;
  m.rows_ = num_links;
  std::size_t total_paths = 0;
  for (const auto& flow : paths) total_paths += flow.size();
  m.cols_ = total_paths;

  std::vector<std::uint32_t> counts(num_links, 0);
  std::size_t nnz = 0;
  for (const auto& flow : paths) {
    for (const auto& path : flow) {
      for (std::size_t link : path) {
        if (link >= num_links) {
          throw std::out_of_range("routing: link index out of range");
        }
        ++counts[link];
        ++nnz;
      }
    }
  }

  m.row_ptr_.assign(num_links + 1, 0);
  for (std::size_t l = 0; l < num_links; ++l) {
    m.row_ptr_[l + 1] = m.row_ptr_[l] + counts[l];
  }
  m.col_idx_.resize(nnz);
  std::vector<std::uint32_t> fill(m.row_ptr_.begin(), m.row_ptr_.end() - 1);
  std::uint32_t col = 0;
  for (const auto& flow : paths) {
    for (const auto& path : flow) {
      for (std::size_t link : path) {
        m.col_idx_[fill[link]++] = col;
      }
      ++col;
    }
  }
  for (std::size_t l = 0; l < num_links; ++l) {
    std::sort(m.col_idx_.begin() + m.row_ptr_[l],
              m.col_idx_.begin() + m.row_ptr_[l + 1]);
  }
  return m;
}

void RoutingMatrix::multiply(std::span<const double> x,
                             std::span<double> out) const {
  for (std::size_t l = 0; l < rows_; ++l) {
    double acc = 0.0;
    for (std::uint32_t k = row_ptr_[l]; k < row_ptr_[l + 1]; ++k) {
      acc += x[col_idx_[k]];
    }
    out[l] = acc;
  }
}

void RoutingMatrix::multiply_transpose(std::span<const double> v,
                                       std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t l = 0; l < rows_; ++l) {
    const double vl = v[l];
    if (vl == 0.0) continue;
    for (std::uint32_t k = row_ptr_[l]; k < row_ptr_[l + 1]; ++k) {
      out[col_idx_[k]] += vl;
    }
  }
}

double RoutingMatrix::row_dot(std::size_t l, std::span<const double> x) const {
  double acc = 0.0;
  for (std::uint32_t k = row_ptr_[l]; k < row_ptr_[l + 1]; ++k) {
    acc += x[col_idx_[k]];
  }
  return acc;
}

std::vector<std::size_t> RoutingMatrix::column_counts() const {
  std::vector<std::size_t> counts(cols_, 0);
  for (std::uint32_t c : col_idx_) ++counts[c];
  return counts;
}

namespace {

constexpr int kPowerIterationCap = 10000;
constexpr double kPowerRelTol = 1e-10;

// Deterministic pseudo-random start vector (splitmix64 stream), strictly
// positive so it cannot be orthogonal to the Perron direction of the
// nonnegative Gram matrix.
std::vector<double> start_vector(std::size_t n) {
  std::vector<double> v(n);
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  for (std::size_t i = 0; i < n; ++i) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    v[i] = 0.5 + static_cast<double>(z >> 11) * 0x1.0p-53;
  }
  return v;
}

double norm2(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

SpectralNormEstimate spectral_norm_sq(const RoutingMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw std::invalid_argument("spectral_norm_sq: empty matrix");
  }
  // Iterate on the smaller Gram side: R R^T (L x L) or R^T R (P x P).
  const bool row_side = m.rows() <= m.cols();
  const std::size_t n = row_side ? m.rows() : m.cols();
  const std::size_t other = row_side ? m.cols() : m.rows();

  std::vector<double> v = start_vector(n);
  std::vector<double> tmp(other, 0.0);
  std::vector<double> w(n, 0.0);

  const double nv0 = norm2(v);
  for (double& x : v) x /= nv0;

  double lambda = 0.0;
  for (int iter = 1; iter <= kPowerIterationCap; ++iter) {
    if (row_side) {
      m.multiply_transpose(v, tmp);
      m.multiply(tmp, w);
    } else {
      m.multiply(v, tmp);
      m.multiply_transpose(tmp, w);
    }
    // Rayleigh quotient with the normalized v: lambda = v^T (Gram v).
    double next = 0.0;
    for (std::size_t i = 0; i < n; ++i) next += v[i] * w[i];
    const double wn = norm2(w);
    if (wn == 0.0) return {0.0, true, iter};  // zero matrix
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    if (iter > 1 && std::fabs(next - lambda) <= kPowerRelTol * next) {
      return {next, true, iter};
    }
    lambda = next;
  }
  // Ill-separated spectrum: return the Frobenius upper bound, flagged.
  return {static_cast<double>(m.nnz()), false, kPowerIterationCap};
}

}  // namespace wanopt
