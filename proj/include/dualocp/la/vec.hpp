#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dualocp::la {

using Vec = std::vector<double>;

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// y = x + beta * y
void xpby(std::span<const double> x, double beta, std::span<double> y);

void scale(double alpha, std::span<double> x);

/// Diagonal-weighted inner product sum_i w_i x_i y_i.
double weighted_dot(std::span<const double> w, std::span<const double> x, std::span<const double> y);

bool all_finite(std::span<const double> x);

/// Throws std::invalid_argument when the two lengths differ.
void require_same_size(std::size_t a, std::size_t b, const char* what);

}  // namespace dualocp::la
