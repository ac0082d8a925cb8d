#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "aqt/numerics.hpp"

namespace aqt {

/// Running integral F[i] = int_0^{s_i} f on a uniform grid with spacing h.
/// Even nodes use composite Simpson; odd nodes add a three-point
/// quadratic panel so every node is third-order accurate or better.
/// Requires f.size() >= 3.
std::vector<double> cumulative_simpson(std::span<const double> f, double h);
std::vector<Complex> cumulative_simpson(std::span<const Complex> f, double h);
std::vector<ComplexMatrix> cumulative_simpson(std::span<const ComplexMatrix> f, double h);

/// int_a^b f by composite 8-point Gauss-Legendre on `panels` equal panels.
Complex gauss_legendre(const std::function<Complex(double)>& f, double a, double b, std::size_t panels);

/// Running integrals int_0^{c_p} f at the panel edges c_p = p / panels on [0, 1]
/// (panels + 1 values, the first is zero).
std::vector<Complex> gauss_legendre_cumulative(const std::function<Complex(double)>& f, std::size_t panels);

}  // namespace aqt
