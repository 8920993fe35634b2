#include "dualocp/la/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dualocp::la {

SparseMat::SparseMat(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                     std::vector<std::size_t> col_indices, std::vector<double> values, bool symmetric)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)),
      symmetric_(symmetric)
{
    if (row_offsets_.size() != rows_ + 1 || row_offsets_.back() != col_indices_.size() ||
        col_indices_.size() != values_.size()) {
        throw std::invalid_argument("SparseMat: inconsistent CSR arrays");
    }
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            if (col_indices_[k] >= cols_) throw std::invalid_argument("SparseMat: column index out of range");
            if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1]) {
                throw std::invalid_argument("SparseMat: columns must be sorted and unique in row " +
                                            std::to_string(i));
            }
        }
    }
    if (symmetric_ && rows_ != cols_) throw std::invalid_argument("SparseMat: symmetric flag on non-square matrix");
}

SparseMat SparseMat::identity(std::size_t n)
{
    Vec ones(n, 1.0);
    return diagonal(ones);
}

SparseMat SparseMat::diagonal(std::span<const double> d)
{
    const std::size_t n = d.size();
    std::vector<std::size_t> offsets(n + 1);
    std::vector<std::size_t> cols(n);
    for (std::size_t i = 0; i < n; ++i) {
        offsets[i + 1] = i + 1;
        cols[i] = i;
    }
    return {n, n, std::move(offsets), std::move(cols), Vec(d.begin(), d.end()), true};
}

double SparseMat::at(std::size_t i, std::size_t j) const
{
    const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
    const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

Vec SparseMat::diag() const
{
    Vec d(std::min(rows_, cols_), 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
    return d;
}

void SparseMat::multiply(std::span<const double> x, std::span<double> y) const
{
    require_same_size(cols_, x.size(), "spmv");
    require_same_size(rows_, y.size(), "spmv output");
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) s += values_[k] * x[col_indices_[k]];
        y[i] = s;
    }
}

void SparseMat::multiply_transpose(std::span<const double> x, std::span<double> y) const
{
    require_same_size(rows_, x.size(), "spmv transpose");
    require_same_size(cols_, y.size(), "spmv transpose output");
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) y[col_indices_[k]] += values_[k] * x[i];
    }
}

SparseMat SparseMat::transpose() const
{
    TripletBuilder tb(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) tb.add(col_indices_[k], i, values_[k]);
    }
    return tb.build(symmetric_);
}

bool SparseMat::is_symmetric(double tol) const
{
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
            if (std::abs(values_[k] - at(col_indices_[k], i)) > tol) return false;
        }
    }
    return true;
}

void TripletBuilder::add(std::size_t i, std::size_t j, double v)
{
    if (i >= rows_ || j >= cols_) throw std::out_of_range("TripletBuilder: index out of range");
    entries_.push_back({i, j, v});
}

SparseMat TripletBuilder::build(bool symmetric) const
{
    auto sorted = entries_;
    std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<std::size_t> offsets(rows_ + 1, 0);
    std::vector<std::size_t> cols;
    Vec vals;
    cols.reserve(sorted.size());
    vals.reserve(sorted.size());
    for (std::size_t k = 0; k < sorted.size();) {
        const auto row = sorted[k].row;
        const auto col = sorted[k].col;
        double sum = 0.0;
        while (k < sorted.size() && sorted[k].row == row && sorted[k].col == col) sum += sorted[k++].value;
        cols.push_back(col);
        vals.push_back(sum);
        ++offsets[row + 1];
    }
    for (std::size_t i = 0; i < rows_; ++i) offsets[i + 1] += offsets[i];
    return {rows_, cols_, std::move(offsets), std::move(cols), std::move(vals), symmetric};
}

Vec spmv(const SparseMat& a, std::span<const double> x)
{
    Vec y(a.rows());
    a.multiply(x, y);
    return y;
}

SparseMat add(double alpha, const SparseMat& a, double beta, const SparseMat& b)
{
    require_same_size(a.rows(), b.rows(), "sparse add rows");
    require_same_size(a.cols(), b.cols(), "sparse add cols");
    TripletBuilder tb(a.rows(), a.cols());
    auto append = [&tb](const SparseMat& m, double s) {
        const auto off = m.row_offsets();
        const auto ci = m.col_indices();
        const auto v = m.values();
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t k = off[i]; k < off[i + 1]; ++k) tb.add(i, ci[k], s * v[k]);
        }
    };
    append(a, alpha);
    append(b, beta);
    return tb.build(a.symmetric_flag() && b.symmetric_flag());
}

}  // namespace dualocp::la
