#pragma once

// Dense complex linear algebra for the small systems handled here (d <= 16).

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace aqt {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxDim = 16;

class ComplexVector {
public:
    ComplexVector() = default;
    explicit ComplexVector(std::size_t dim);
    ComplexVector(std::initializer_list<Complex> entries);

    static ComplexVector basis(std::size_t dim, std::size_t k);

    std::size_t dim() const noexcept { return data_.size(); }
    Complex& operator[](std::size_t i) { return data_[i]; }
    const Complex& operator[](std::size_t i) const { return data_[i]; }
    std::span<const Complex> entries() const noexcept { return data_; }

    ComplexVector& operator+=(const ComplexVector& other);
    ComplexVector& operator-=(const ComplexVector& other);
    ComplexVector& operator*=(Complex factor);

    friend bool operator==(const ComplexVector&, const ComplexVector&) = default;

private:
    std::vector<Complex> data_;
};

ComplexVector operator+(ComplexVector a, const ComplexVector& b);
ComplexVector operator-(ComplexVector a, const ComplexVector& b);
ComplexVector operator*(Complex factor, ComplexVector v);

/// Row-major dense square matrix.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim);
    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

    static ComplexMatrix identity(std::size_t dim);
    static ComplexMatrix diagonal(std::span<const Complex> diag);
    static ComplexMatrix diagonal(std::span<const double> diag);
    /// Matrix whose k-th column is columns[k].
    static ComplexMatrix from_columns(std::span<const ComplexVector> columns);

    std::size_t dim() const noexcept { return dim_; }
    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
    std::span<const Complex> entries() const noexcept { return data_; }

    ComplexVector column(std::size_t c) const;

    ComplexMatrix& operator+=(const ComplexMatrix& other);
    ComplexMatrix& operator-=(const ComplexMatrix& other);
    ComplexMatrix& operator*=(Complex factor);

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a);
ComplexMatrix operator*(Complex factor, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& v);

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& v);
ComplexMatrix adjoint(const ComplexMatrix& a);
/// |a><b|
ComplexMatrix outer(const ComplexVector& a, const ComplexVector& b);

/// <a|b>, conjugate-linear in the first argument.
Complex inner(const ComplexVector& a, const ComplexVector& b);
double norm(const ComplexVector& v);
ComplexVector normalized(const ComplexVector& v);
bool is_normalized(const ComplexVector& v, double tol = 1e-10);

double frobenius_norm(const ComplexMatrix& a);
/// max_{jk} |a_jk|
double max_abs(const ComplexMatrix& a);
/// ||a^dagger a - I||_F
double unitarity_defect(const ComplexMatrix& a);
bool all_finite(const ComplexMatrix& a);
bool all_finite(const ComplexVector& v);

/// max_{jk} |A_jk - conj(A_kj)| <= rel_tol * ||A||_F
bool is_hermitian(const ComplexMatrix& a, double rel_tol = 1e-12);

/// Solves A X = B by LU with partial pivoting.
ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b);
Complex determinant(const ComplexMatrix& a);

struct EigenSystem {
    std::vector<double> values;           ///< ascending
    std::vector<ComplexVector> vectors;   ///< orthonormal, vectors[k] pairs with values[k]
};

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
/// Throws NotHermitian, NoConvergence, DimensionMismatch (dim > 16).
EigenSystem hermitian_eig(const ComplexMatrix& a);

/// exp(A) by scaling and squaring around a truncated Taylor core.
/// Throws Overflow when ||A||_F exceeds the range where the result is representable.
ComplexMatrix matrix_exp(const ComplexMatrix& a);

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

}  // namespace aqt
