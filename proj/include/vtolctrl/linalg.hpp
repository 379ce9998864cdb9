// Dense real linear algebra for small control problems (n <= ~60).
#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "vtolctrl/error.hpp"

namespace vtolctrl {

/// Numerical tolerances threaded through the kernels. No hidden globals.
struct Tolerances {
    double residual_tol = 1e-10;      ///< relative residual / pivot bound
    double definiteness_slack = 1e-8; ///< eigenvalue slack for sign tests
    int max_iter = 200;               ///< iteration cap (per eigenvalue for QR)

    void validate() const;
};

/// Row-major dense matrix of doubles.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix diag(std::span<const double> d);
    static Matrix column(std::span<const double> v);
    static Matrix from_rows(const std::vector<std::vector<double>> &rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    bool is_square() const noexcept { return rows_ == cols_; }

    double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::vector<double> col(std::size_t c) const;
    std::vector<std::vector<double>> to_rows() const;

    Matrix transpose() const;
    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
    void set_block(std::size_t r0, std::size_t c0, const Matrix &b);

    double trace() const;
    double norm() const;     ///< Frobenius norm
    double max_abs() const;  ///< max |entry|
    bool all_finite() const;

    Matrix &operator+=(const Matrix &o);
    Matrix &operator-=(const Matrix &o);
    Matrix &operator*=(double s);

    friend bool operator==(const Matrix &, const Matrix &) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix &b);
Matrix operator-(Matrix a, const Matrix &b);
Matrix operator-(Matrix a);
Matrix operator*(const Matrix &a, const Matrix &b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);

/// y = A x for a plain vector x.
std::vector<double> mat_vec(const Matrix &a, std::span<const double> x);

/// Symmetric part (A + A^T)/2.
Matrix symmetrize(const Matrix &a);

/// Solves A X = B with a partial-pivoted LU factorization.
/// Throws SingularMatrix when a pivot falls below residual_tol * max|A|.
Matrix solve_linear(const Matrix &a, const Matrix &b, const Tolerances &tol = {});

Matrix inverse(const Matrix &a, const Tolerances &tol = {});

/// Determinant via partial-pivoted LU (no singularity check).
double determinant(const Matrix &a);

/// Numerical rank by fully pivoted elimination; pivots below
/// rel_tol * ||A||_F count as zero.
std::size_t rank(const Matrix &a, double rel_tol = 1e-8);

/// Eigenvalues of a general real matrix: Householder reduction to upper
/// Hessenberg form followed by the Francis double-shift QR iteration.
/// Order is unspecified. Throws NoConvergence after tol.max_iter sweeps on
/// a single eigenvalue.
std::vector<std::complex<double>> eig_general(const Matrix &a, const Tolerances &tol = {});

/// max Re(lambda).
double spectral_abscissa(const Matrix &a, const Tolerances &tol = {});

struct SymEig {
    std::vector<double> values; ///< ascending
    Matrix vectors;             ///< columns are the matching unit eigenvectors
};

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix. The input is
/// symmetrized first; throws NotSymmetric when ||S - S^T|| > 1e-8 ||S||.
SymEig sym_eig(const Matrix &s, const Tolerances &tol = {});

double max_eigenvalue_sym(const Matrix &s, const Tolerances &tol = {});
double min_eigenvalue_sym(const Matrix &s, const Tolerances &tol = {});

/// Principal square root of a symmetric PSD matrix (negative eigenvalues
/// within round-off are clipped to zero).
Matrix sqrt_psd(const Matrix &s, const Tolerances &tol = {});

/// e^{A t} by scaling and squaring with a [6/6] Pade approximant.
Matrix mat_exp(const Matrix &a, double t = 1.0);

Matrix kron(const Matrix &a, const Matrix &b);

/// Right pseudo-inverse B^T (B B^T)^{-1} of a full-row-rank matrix.
Matrix right_pseudo_inverse(const Matrix &b, const Tolerances &tol = {});

/// [B, AB, ..., A^{n-1} B]
Matrix controllability_matrix(const Matrix &a, const Matrix &b);

} // namespace vtolctrl
