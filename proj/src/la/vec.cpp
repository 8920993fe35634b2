#include "dualocp/la/vec.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dualocp::la {

void require_same_size(std::size_t a, std::size_t b, const char* what)
{
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                                    " vs " + std::to_string(b) + ")");
    }
}

double dot(std::span<const double> x, std::span<const double> y)
{
    require_same_size(x.size(), y.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    require_same_size(x.size(), y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y)
{
    require_same_size(x.size(), y.size(), "xpby");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + beta * y[i];
}

void scale(double alpha, std::span<double> x)
{
    for (double& v : x) v *= alpha;
}

double weighted_dot(std::span<const double> w, std::span<const double> x, std::span<const double> y)
{
    require_same_size(w.size(), x.size(), "weighted_dot");
    require_same_size(x.size(), y.size(), "weighted_dot");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * x[i] * y[i];
    return s;
}

bool all_finite(std::span<const double> x)
{
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace dualocp::la
