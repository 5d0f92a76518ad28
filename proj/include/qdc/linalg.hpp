#pragma once

// Dense complex linear algebra for small multi-qubit density matrices.
//
// Basis convention shared by every module: index 0 is the excited state |e>,
// index 1 the ground state |g>. Multi-qubit states are ordered with the first
// tensor factor as the most significant index (target first, then ancillas).

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdc/errors.hpp"

namespace qdc {

using Complex = std::complex<double>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityTol = 1e-10;

class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, Complex{0.0, 0.0}) {
        if (rows == 0 || cols == 0) {
            throw ConfigError("ComplexMatrix: dimensions must be positive");
        }
    }

    // Row-major entries.
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (rows == 0 || cols == 0) {
            throw ConfigError("ComplexMatrix: dimensions must be positive");
        }
        if (data_.size() != rows * cols) {
            throw ConfigError("ComplexMatrix: entry count " + std::to_string(data_.size()) +
                              " does not match " + std::to_string(rows) + "x" +
                              std::to_string(cols));
        }
    }

    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        if (rows_ == 0 || cols_ == 0) {
            throw ConfigError("ComplexMatrix: dimensions must be positive");
        }
        data_.reserve(rows_ * cols_);
        for (const auto& row : rows) {
            if (row.size() != cols_) {
                throw ConfigError("ComplexMatrix: ragged initializer");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

    static ComplexMatrix diagonal(std::span<const Complex> d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) noexcept {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    const Complex& operator()(std::size_t i, std::size_t j) const noexcept {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    std::span<const Complex> entries() const noexcept { return data_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    Complex trace() const {
        Complex t{0.0, 0.0};
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    bool all_finite() const {
        for (const auto& z : data_) {
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        }
        return true;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_shape(o, "+=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_shape(o, "-=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    ComplexMatrix& operator*=(Complex s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
    friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_) {
            throw ConfigError("matrix product: inner dimensions differ (" +
                              std::to_string(a.cols_) + " vs " + std::to_string(b.rows_) + ")");
        }
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) continue;
                const Complex* brow = &b.data_[k * b.cols_];
                Complex* orow = &out.data_[i * out.cols_];
                for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += aik * brow[j];
            }
        }
        return out;
    }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    void require_same_shape(const ComplexMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw ConfigError(std::string("matrix ") + op + ": shape mismatch");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ConfigError("max_abs_diff: shape mismatch");
    }
    double m = 0.0;
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t k = 0; k < ea.size(); ++k) m = std::max(m, std::abs(ea[k] - eb[k]));
    return m;
}

// max |a_ij - conj(a_ji)|
inline double hermiticity_defect(const ComplexMatrix& a) {
    if (!a.is_square()) return INFINITY;
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i; j < a.cols(); ++j)
            m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
    return m;
}

inline bool is_hermitian(const ComplexMatrix& a, double tol = kHermitianTol) {
    return hermiticity_defect(a) <= tol;
}

// Result index (i*b.rows + k, j*b.cols + l) holds a(i,j)*b(k,l). Each entry is
// a single product, so kron(kron(a,b),c) and kron(a,kron(b,c)) agree bitwise
// whenever the three-way entry products are exact (e.g. small integers), and
// to one rounding otherwise.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Complex aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return out;
}

inline ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
    if (factors.empty()) throw ConfigError("kron_all: no factors");
    ComplexMatrix out = factors.front();
    for (std::size_t n = 1; n < factors.size(); ++n) out = kron(out, factors[n]);
    return out;
}

// Eigen views of the row-major storage.
namespace detail {
using RowMajorXcd = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline RowMajorXcd to_eigen(const ComplexMatrix& m) {
    RowMajorXcd out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}

inline ComplexMatrix from_eigen(const RowMajorXcd& m) {
    ComplexMatrix out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
    return out;
}
}  // namespace detail

// Ascending eigenvalues of a Hermitian matrix.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
    if (!h.is_square()) throw ConfigError("hermitian_eigenvalues: matrix is not square");
    Eigen::SelfAdjointEigenSolver<detail::RowMajorXcd> solver(detail::to_eigen(h),
                                                              Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

inline double min_eigenvalue(const ComplexMatrix& h) { return hermitian_eigenvalues(h).front(); }

// exp(-i h t) through the spectral decomposition h = V diag(lambda) V^dagger.
inline ComplexMatrix herm_expm(const ComplexMatrix& h, double t) {
    if (!h.is_square()) throw ContractError("herm_expm: matrix is not square");
    if (const double defect = hermiticity_defect(h); defect > kHermitianTol) {
        throw ContractError("herm_expm: input is not Hermitian (defect " +
                            std::to_string(defect) + ")");
    }
    Eigen::SelfAdjointEigenSolver<detail::RowMajorXcd> solver(detail::to_eigen(h));
    if (solver.info() != Eigen::Success) {
        throw NumericalError("herm_expm: eigendecomposition failed");
    }
    const auto& v = solver.eigenvectors();
    Eigen::VectorXcd phases(v.cols());
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        phases(k) = std::exp(Complex{0.0, -solver.eigenvalues()(k) * t});
    }
    detail::RowMajorXcd u = v * phases.asDiagonal() * v.adjoint();
    return detail::from_eigen(u);
}

class DensityMatrix {
public:
    // Checks every invariant; throws ContractError on violation.
    static DensityMatrix validated(ComplexMatrix m) {
        DensityMatrix d(std::move(m));
        d.validate();
        return d;
    }

    // No invariant checks beyond shape. Used inside hot loops.
    static DensityMatrix unchecked(ComplexMatrix m) {
        DensityMatrix d(std::move(m));
        assert(d.m_.all_finite());
        return d;
    }

    static DensityMatrix maximally_mixed(std::size_t dim) {
        return validated(ComplexMatrix::identity(dim) * Complex{1.0 / static_cast<double>(dim)});
    }

    std::size_t dim() const noexcept { return m_.rows(); }
    const ComplexMatrix& matrix() const noexcept { return m_; }
    Complex operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }

    void validate() const {
        if (!m_.all_finite()) throw ContractError("density matrix has non-finite entries");
        if (const double d = hermiticity_defect(m_); d > kHermitianTol) {
            throw ContractError("density matrix is not Hermitian (defect " + std::to_string(d) +
                                ")");
        }
        if (const double t = std::abs(m_.trace() - Complex{1.0, 0.0}); t > kTraceTol) {
            throw ContractError("density matrix trace differs from 1 by " + std::to_string(t));
        }
        if (const double e = min_eigenvalue(m_); e < -kPositivityTol) {
            throw ContractError("density matrix is not positive semidefinite (min eigenvalue " +
                                std::to_string(e) + ")");
        }
    }

    double purity() const { return (m_ * m_).trace().real(); }

private:
    explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
        if (!m_.is_square()) throw ConfigError("density matrix must be square");
        const std::size_t n = m_.rows();
        if ((n & (n - 1)) != 0) {
            throw ConfigError("density matrix dimension " + std::to_string(n) +
                              " is not a power of two");
        }
    }

    ComplexMatrix m_;
};

// Reduced state of subsystem `keep` in a register with the given subsystem
// dimensions (first subsystem most significant).
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> dims,
                                   std::size_t keep) {
    if (dims.empty() || keep >= dims.size()) {
        throw ConfigError("partial_trace: kept subsystem index out of range");
    }
    const std::size_t total =
        std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
    if (total != rho.dim()) {
        throw ConfigError("partial_trace: subsystem dimensions multiply to " +
                          std::to_string(total) + " but state has dimension " +
                          std::to_string(rho.dim()));
    }
    const std::size_t d = dims[keep];
    const std::size_t left = std::accumulate(dims.begin(), dims.begin() + keep, std::size_t{1},
                                             std::multiplies<>{});
    const std::size_t right = total / (left * d);

    ComplexMatrix out(d, d);
    const ComplexMatrix& m = rho.matrix();
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            Complex s{0.0, 0.0};
            for (std::size_t l = 0; l < left; ++l)
                for (std::size_t r = 0; r < right; ++r)
                    s += m((l * d + a) * right + r, (l * d + b) * right + r);
            out(a, b) = s;
        }
    return DensityMatrix::unchecked(std::move(out));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<std::size_t> dims,
                                   std::size_t keep) {
    return partial_trace(rho, std::span<const std::size_t>(dims.begin(), dims.size()), keep);
}

// Re Tr(rho * obs).
inline double expect(const DensityMatrix& rho, const ComplexMatrix& obs) {
    const ComplexMatrix& m = rho.matrix();
    if (obs.rows() != m.rows() || obs.cols() != m.cols()) {
        throw ConfigError("expect: observable dimension does not match state");
    }
    Complex t{0.0, 0.0};
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t k = 0; k < m.cols(); ++k) t += m(i, k) * obs(k, i);
    if (std::abs(t.imag()) > kTraceTol) {
        throw ContractError("expect: complex expectation value (imaginary part " +
                            std::to_string(t.imag()) + "); observable not Hermitian?");
    }
    return t.real();
}

// Trace distance 1/2 ||a - b||_1.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw ConfigError("trace_distance: dimension mismatch");
    const ComplexMatrix diff = a.matrix() - b.matrix();
    if (diff.rows() == 2) {
        // Closed form for 2x2 Hermitian matrices.
        const double p = diff(0, 0).real();
        const double q = diff(1, 1).real();
        const double mean = 0.5 * (p + q);
        const double radius = std::hypot(0.5 * (p - q), std::abs(diff(0, 1)));
        return 0.5 * (std::abs(mean + radius) + std::abs(mean - radius));
    }
    double s = 0.0;
    for (double e : hermitian_eigenvalues(diff)) s += std::abs(e);
    return 0.5 * s;
}

namespace pauli {

inline ComplexMatrix identity() { return ComplexMatrix::identity(2); }
inline ComplexMatrix x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline ComplexMatrix y() { return {{0.0, Complex{0.0, -1.0}}, {Complex{0.0, 1.0}, 0.0}}; }
inline ComplexMatrix z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
// sigma+ = |e><g| raises g -> e.
inline ComplexMatrix plus() { return {{0.0, 1.0}, {0.0, 0.0}}; }
// sigma- = |g><e|.
inline ComplexMatrix minus() { return {{0.0, 0.0}, {1.0, 0.0}}; }

}  // namespace pauli

}  // namespace qdc
