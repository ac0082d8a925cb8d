#include "aqt/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aqt/errors.hpp"

namespace aqt {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* where) {
    if (a != b) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(where) + ": " + std::to_string(a) + " vs " + std::to_string(b));
    }
}

}  // namespace

// ---------------------------------------------------------------- vectors

ComplexVector::ComplexVector(std::size_t dim) : data_(dim) {}

ComplexVector::ComplexVector(std::initializer_list<Complex> entries) : data_(entries) {}

ComplexVector ComplexVector::basis(std::size_t dim, std::size_t k) {
    ComplexVector v(dim);
    v.data_.at(k) = 1.0;
    return v;
}

ComplexVector& ComplexVector::operator+=(const ComplexVector& other) {
    require_same_dim(dim(), other.dim(), "vector +");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexVector& ComplexVector::operator-=(const ComplexVector& other) {
    require_same_dim(dim(), other.dim(), "vector -");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexVector& ComplexVector::operator*=(Complex factor) {
    for (auto& x : data_) x *= factor;
    return *this;
}

ComplexVector operator+(ComplexVector a, const ComplexVector& b) { return a += b; }
ComplexVector operator-(ComplexVector a, const ComplexVector& b) { return a -= b; }
ComplexVector operator*(Complex factor, ComplexVector v) { return v *= factor; }

Complex inner(const ComplexVector& a, const ComplexVector& b) {
    require_same_dim(a.dim(), b.dim(), "inner");
    Complex acc = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

double norm(const ComplexVector& v) {
    double acc = 0.0;
    for (const auto& x : v.entries()) acc += std::norm(x);
    return std::sqrt(acc);
}

ComplexVector normalized(const ComplexVector& v) {
    const double n = norm(v);
    if (n == 0.0) throw Error(ErrorKind::NotNormalized, "cannot normalize the zero vector");
    return Complex(1.0 / n) * v;
}

bool is_normalized(const ComplexVector& v, double tol) { return std::abs(norm(v) - 1.0) <= tol; }

bool all_finite(const ComplexVector& v) {
    return std::all_of(v.entries().begin(), v.entries().end(),
                       [](Complex x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

// ---------------------------------------------------------------- matrices

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : dim_(rows.size()), data_() {
    data_.reserve(dim_ * dim_);
    for (const auto& row : rows) {
        require_same_dim(row.size(), dim_, "matrix literal");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
    ComplexMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
    ComplexMatrix m(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

ComplexMatrix ComplexMatrix::from_columns(std::span<const ComplexVector> columns) {
    ComplexMatrix m(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        require_same_dim(columns[c].dim(), columns.size(), "from_columns");
        for (std::size_t r = 0; r < columns.size(); ++r) m(r, c) = columns[c][r];
    }
    return m;
}

ComplexVector ComplexMatrix::column(std::size_t c) const {
    ComplexVector v(dim_);
    for (std::size_t r = 0; r < dim_; ++r) v[r] = (*this)(r, c);
    return v;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
    require_same_dim(dim_, other.dim_, "matrix +");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
    require_same_dim(dim_, other.dim_, "matrix -");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex factor) {
    for (auto& x : data_) x *= factor;
    return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }
ComplexMatrix operator*(Complex factor, ComplexMatrix a) { return a *= factor; }
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) { return matmul(a, b); }
ComplexVector operator*(const ComplexMatrix& a, const ComplexVector& v) { return matvec(a, v); }

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a.dim(), b.dim(), "matmul");
    const std::size_t n = a.dim();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& v) {
    require_same_dim(a.dim(), v.dim(), "matvec");
    const std::size_t n = a.dim();
    ComplexVector out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += a(i, j) * v[j];
        out[i] = acc;
    }
    return out;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
    const std::size_t n = a.dim();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(j, i) = std::conj(a(i, j));
    return out;
}

ComplexMatrix outer(const ComplexVector& a, const ComplexVector& b) {
    require_same_dim(a.dim(), b.dim(), "outer");
    const std::size_t n = a.dim();
    ComplexMatrix out(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = a[i] * std::conj(b[j]);
    return out;
}

double frobenius_norm(const ComplexMatrix& a) {
    double acc = 0.0;
    for (const auto& x : a.entries()) acc += std::norm(x);
    return std::sqrt(acc);
}

double max_abs(const ComplexMatrix& a) {
    double m = 0.0;
    for (const auto& x : a.entries()) m = std::max(m, std::abs(x));
    return m;
}

double unitarity_defect(const ComplexMatrix& a) {
    return frobenius_norm(adjoint(a) * a - ComplexMatrix::identity(a.dim()));
}

bool all_finite(const ComplexMatrix& a) {
    return std::all_of(a.entries().begin(), a.entries().end(),
                       [](Complex x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
    const std::size_t n = a.dim();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
    return worst <= rel_tol * frobenius_norm(a);
}

// ---------------------------------------------------------------- LU

namespace {

struct LU {
    ComplexMatrix lu;
    std::vector<std::size_t> perm;
    int sign = 1;
    bool singular = false;
};

LU lu_decompose(const ComplexMatrix& a) {
    LU f{a, std::vector<std::size_t>(a.dim()), 1, false};
    std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
    const std::size_t n = a.dim();
    auto& m = f.lu;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double best = std::abs(m(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            if (std::abs(m(r, k)) > best) {
                best = std::abs(m(r, k));
                pivot = r;
            }
        }
        if (best == 0.0) {
            f.singular = true;
            continue;
        }
        if (pivot != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(m(k, c), m(pivot, c));
            std::swap(f.perm[k], f.perm[pivot]);
            f.sign = -f.sign;
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            m(r, k) /= m(k, k);
            const Complex l = m(r, k);
            for (std::size_t c = k + 1; c < n; ++c) m(r, c) -= l * m(k, c);
        }
    }
    return f;
}

}  // namespace

ComplexMatrix solve(const ComplexMatrix& a, const ComplexMatrix& b) {
    require_same_dim(a.dim(), b.dim(), "solve");
    const LU f = lu_decompose(a);
    if (f.singular) throw Error(ErrorKind::SolverDivergence, "singular linear system");
    const std::size_t n = a.dim();
    ComplexMatrix x(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::vector<Complex> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            Complex acc = b(f.perm[i], col);
            for (std::size_t j = 0; j < i; ++j) acc -= f.lu(i, j) * y[j];
            y[i] = acc;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            Complex acc = y[ii];
            for (std::size_t j = ii + 1; j < n; ++j) acc -= f.lu(ii, j) * x(j, col);
            x(ii, col) = acc / f.lu(ii, ii);
        }
    }
    return x;
}

Complex determinant(const ComplexMatrix& a) {
    const LU f = lu_decompose(a);
    if (f.singular) return 0.0;
    Complex det = static_cast<double>(f.sign);
    for (std::size_t i = 0; i < a.dim(); ++i) det *= f.lu(i, i);
    return det;
}

// ---------------------------------------------------------------- eigensolver

EigenSystem hermitian_eig(const ComplexMatrix& input) {
    const std::size_t n = input.dim();
    if (n == 0 || n > kMaxDim)
        throw Error(ErrorKind::DimensionMismatch, "hermitian_eig supports 1 <= dim <= 16, got " + std::to_string(n));
    if (!all_finite(input)) throw Error(ErrorKind::NotHermitian, "matrix has non-finite entries");
    if (!is_hermitian(input)) throw Error(ErrorKind::NotHermitian, "matrix fails the Hermiticity check");

    ComplexMatrix a = 0.5 * (input + adjoint(input));
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = frobenius_norm(a);

    constexpr int kMaxSweeps = 100;
    bool converged = (scale == 0.0);
    for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = 0; q < n; ++q)
                if (p != q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= 4e-16 * scale) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex b = a(p, q);
                const double ab = std::abs(b);
                if (ab <= 1e-300) continue;
                const Complex phase = b / ab;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // real rotation annihilating [[app, ab], [ab, aqq]], |theta| <= pi/4
                const double two_theta = (aqq - app >= 0.0) ? std::atan2(2.0 * ab, aqq - app)
                                                            : std::atan2(-2.0 * ab, app - aqq);
                const double c = std::cos(0.5 * two_theta);
                const double s = std::sin(0.5 * two_theta);
                const Complex gpp = c, gpq = s;
                const Complex gqp = -s * std::conj(phase), gqq = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * gpp + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * gqq;
                }
            }
        }
    }
    if (!converged) throw Error(ErrorKind::NoConvergence, "Jacobi sweeps exceeded the iteration cap");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenSystem out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (std::size_t k : order) {
        out.values.push_back(a(k, k).real());
        out.vectors.push_back(v.column(k));
    }
    return out;
}

// ---------------------------------------------------------------- exponential

ComplexMatrix matrix_exp(const ComplexMatrix& a) {
    const std::size_t n = a.dim();
    const double nrm = frobenius_norm(a);
    if (!std::isfinite(nrm) || nrm > 700.0)
        throw Error(ErrorKind::Overflow, "matrix_exp argument norm " + std::to_string(nrm) + " exceeds 700");

    int squarings = 0;
    if (nrm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
    const ComplexMatrix b = std::ldexp(1.0, -squarings) * a;

    ComplexMatrix result = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    for (int k = 1; k <= 40; ++k) {
        term = (1.0 / k) * (term * b);
        result += term;
        if (frobenius_norm(term) <= 1e-18 * frobenius_norm(result)) break;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

ComplexMatrix pauli_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix pauli_y() { return {{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}}; }
ComplexMatrix pauli_z() { return {{1.0, 0.0}, {0.0, -1.0}}; }

}  // namespace aqt
