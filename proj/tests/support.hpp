#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "aqt/numerics.hpp"

namespace aqt::test {

inline ComplexMatrix random_hermitian(std::size_t d, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    ComplexMatrix a(d);
    for (std::size_t r = 0; r < d; ++r) {
        a(r, r) = g(rng);
        for (std::size_t c = r + 1; c < d; ++c) {
            a(r, c) = {g(rng), g(rng)};
            a(c, r) = std::conj(a(r, c));
        }
    }
    return a;
}

/// Plain triple loop, independent of the library's matmul.
inline ComplexMatrix naive_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t d = a.dim();
    ComplexMatrix c(d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            Complex acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += a(i, k) * b(k, j);
            c(i, j) = acc;
        }
    return c;
}

inline double naive_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) s += std::norm(a(i, j) - b(i, j));
    return std::sqrt(s);
}

}  // namespace aqt::test
