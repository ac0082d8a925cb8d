#include "aqt/quadrature.hpp"

#include <array>

#include "aqt/errors.hpp"

namespace aqt {

namespace {

template <class T>
std::vector<T> cumulative_simpson_impl(std::span<const T> f, double h, T zero) {
    const std::size_t n = f.size();
    if (n < 3) throw Error(ErrorKind::GridMismatch, "cumulative_simpson needs at least 3 nodes");
    std::vector<T> out(n, zero);
    const std::size_t last = n - 1;
    for (std::size_t i = 1; i < n; ++i) {
        if (i % 2 == 0) {
            T panel = f[i - 2] + 4.0 * f[i - 1] + f[i];
            panel *= h / 3.0;
            out[i] = out[i - 2] + panel;
        } else if (i + 1 <= last) {
            T panel = 5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1];
            panel *= h / 12.0;
            out[i] = out[i - 1] + panel;
        } else {
            T panel = 8.0 * f[i - 1] + 5.0 * f[i] - f[i - 2];
            panel *= h / 12.0;
            out[i] = out[i - 1] + panel;
        }
    }
    return out;
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 4> kNodes = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                          0.9602898564975363};
constexpr std::array<double, 4> kWeights = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                            0.1012285362903763};

Complex panel_integral(const std::function<Complex(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Complex acc = 0.0;
    for (std::size_t k = 0; k < kNodes.size(); ++k) {
        acc += kWeights[k] * (f(mid - half * kNodes[k]) + f(mid + half * kNodes[k]));
    }
    return half * acc;
}

}  // namespace

std::vector<double> cumulative_simpson(std::span<const double> f, double h) {
    return cumulative_simpson_impl<double>(f, h, 0.0);
}

std::vector<Complex> cumulative_simpson(std::span<const Complex> f, double h) {
    return cumulative_simpson_impl<Complex>(f, h, Complex(0.0));
}

std::vector<ComplexMatrix> cumulative_simpson(std::span<const ComplexMatrix> f, double h) {
    if (f.empty()) throw Error(ErrorKind::GridMismatch, "cumulative_simpson needs at least 3 nodes");
    return cumulative_simpson_impl<ComplexMatrix>(f, h, ComplexMatrix(f.front().dim()));
}

Complex gauss_legendre(const std::function<Complex(double)>& f, double a, double b, std::size_t panels) {
    if (panels == 0) panels = 1;
    const double w = (b - a) / static_cast<double>(panels);
    Complex acc = 0.0;
    for (std::size_t p = 0; p < panels; ++p) acc += panel_integral(f, a + p * w, a + (p + 1) * w);
    return acc;
}

std::vector<Complex> gauss_legendre_cumulative(const std::function<Complex(double)>& f, std::size_t panels) {
    if (panels == 0) panels = 1;
    std::vector<Complex> out(panels + 1, Complex(0.0));
    const double w = 1.0 / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double b = (p + 1 == panels) ? 1.0 : (p + 1) * w;
        out[p + 1] = out[p] + panel_integral(f, p * w, b);
    }
    return out;
}

}  // namespace aqt
