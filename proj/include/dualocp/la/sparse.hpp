#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dualocp/la/vec.hpp"

namespace dualocp::la {

/// Compressed-row sparse matrix. Column indices are sorted and unique within
/// every row; `symmetric` records that A(i,j) == A(j,i) holds for the stored
/// values (set by the producer, checked by `is_symmetric`).
class SparseMat {
public:
    SparseMat() = default;
    SparseMat(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
              std::vector<std::size_t> col_indices, std::vector<double> values, bool symmetric = false);

    static SparseMat identity(std::size_t n);
    static SparseMat diagonal(std::span<const double> d);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] std::size_t nnz() const { return values_.size(); }
    [[nodiscard]] bool symmetric_flag() const { return symmetric_; }

    [[nodiscard]] std::span<const std::size_t> row_offsets() const { return row_offsets_; }
    [[nodiscard]] std::span<const std::size_t> col_indices() const { return col_indices_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    /// Entry lookup by binary search; zero when not stored.
    [[nodiscard]] double at(std::size_t i, std::size_t j) const;
    [[nodiscard]] Vec diag() const;

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    /// y = A^T x
    void multiply_transpose(std::span<const double> x, std::span<double> y) const;

    [[nodiscard]] SparseMat transpose() const;
    [[nodiscard]] bool is_symmetric(double tol = 0.0) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_offsets_{0};
    std::vector<std::size_t> col_indices_;
    std::vector<double> values_;
    bool symmetric_ = false;
};

/// Coordinate-triplet accumulator; duplicates are summed on `build`, so the
/// result does not depend on insertion order.
class TripletBuilder {
public:
    TripletBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    void add(std::size_t i, std::size_t j, double v);
    [[nodiscard]] SparseMat build(bool symmetric = false) const;

private:
    struct Triplet {
        std::size_t row;
        std::size_t col;
        double value;
    };
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Triplet> entries_;
};

Vec spmv(const SparseMat& a, std::span<const double> x);

/// alpha*A + beta*B on the union pattern (A and B must have the same shape).
SparseMat add(double alpha, const SparseMat& a, double beta, const SparseMat& b);

}  // namespace dualocp::la
