#include "vtolctrl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace vtolctrl {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::NotStabilizable: return "NotStabilizable";
    case ErrorCode::SingularFeedthrough: return "SingularFeedthrough";
    case ErrorCode::UnstableSystem: return "UnstableSystem";
    case ErrorCode::SingularP: return "SingularP";
    case ErrorCode::SingularX: return "SingularX";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::Diverged: return "Diverged";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::SingularAIC: return "SingularAIC";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

namespace {

void require_square(const Matrix &a, const char *what) {
    if (!a.is_square())
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + ": expected a square matrix, got " +
                        std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
}

void require_same_shape(const Matrix &a, const Matrix &b, const char *what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": shape mismatch");
}

} // namespace

void Tolerances::validate() const {
    if (!(residual_tol > 0.0) || !(definiteness_slack > 0.0) || max_iter < 1)
        throw Error(ErrorCode::InvalidArgument, "tolerances must be positive, max_iter >= 1");
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto &r : rows) {
        if (r.size() != cols_)
            throw Error(ErrorCode::DimensionMismatch, "ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diag(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        m(i, i) = d[i];
    return m;
}

Matrix Matrix::column(std::span<const double> v) {
    Matrix m(v.size(), 1);
    std::copy(v.begin(), v.end(), m.data_.begin());
    return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>> &rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols_)
            throw Error(ErrorCode::DimensionMismatch,
                        "ragged matrix: row " + std::to_string(i) + " has " +
                            std::to_string(rows[i].size()) + " entries, expected " +
                            std::to_string(m.cols_));
        std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
}

std::vector<double> Matrix::col(std::size_t c) const {
    std::vector<double> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        v[i] = (*this)(i, c);
    return v;
}

std::vector<std::vector<double>> Matrix::to_rows() const {
    std::vector<std::vector<double>> out(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        out[i].assign(row(i).begin(), row(i).end());
    return out;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_)
        throw Error(ErrorCode::DimensionMismatch, "block out of range");
    Matrix b(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j)
            b(i, j) = (*this)(r0 + i, c0 + j);
    return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix &b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_)
        throw Error(ErrorCode::DimensionMismatch, "set_block out of range");
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
            (*this)(r0 + i, c0 + j) = b(i, j);
}

double Matrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i)
        t += (*this)(i, i);
    return t;
}

double Matrix::norm() const {
    double s = 0.0;
    for (double v : data_)
        s += v * v;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_)
        m = std::max(m, std::abs(v));
    return m;
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix &Matrix::operator+=(const Matrix &o) {
    require_same_shape(*this, o, "operator+");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] += o.data_[i];
    return *this;
}

Matrix &Matrix::operator-=(const Matrix &o) {
    require_same_shape(*this, o, "operator-");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] -= o.data_[i];
    return *this;
}

Matrix &Matrix::operator*=(double s) {
    for (double &v : data_)
        v *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix &b) { return a += b; }
Matrix operator-(Matrix a, const Matrix &b) { return a -= b; }
Matrix operator-(Matrix a) { return a *= -1.0; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix &a, const Matrix &b) {
    if (a.cols() != b.rows())
        throw Error(ErrorCode::DimensionMismatch,
                    "matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                        " * " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0)
                continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

std::vector<double> mat_vec(const Matrix &a, std::span<const double> x) {
    if (a.cols() != x.size())
        throw Error(ErrorCode::DimensionMismatch, "mat_vec: size mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        const auto r = a.row(i);
        for (std::size_t j = 0; j < r.size(); ++j)
            s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

Matrix symmetrize(const Matrix &a) {
    require_square(a, "symmetrize");
    Matrix s = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            s(i, j) = s(j, i) = 0.5 * (a(i, j) + a(j, i));
    return s;
}

// ---------------------------------------------------------------------------
// LU

namespace {

struct LU {
    Matrix lu;
    std::vector<std::size_t> perm;
    int sign = 1;
    double min_pivot = std::numeric_limits<double>::infinity();
};

LU lu_factor(const Matrix &a) {
    LU f{a, std::vector<std::size_t>(a.rows())};
    std::iota(f.perm.begin(), f.perm.end(), 0);
    const std::size_t n = a.rows();
    Matrix &m = f.lu;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(p, k)))
                p = i;
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(m(k, j), m(p, j));
            std::swap(f.perm[k], f.perm[p]);
            f.sign = -f.sign;
        }
        const double piv = m(k, k);
        f.min_pivot = std::min(f.min_pivot, std::abs(piv));
        if (piv == 0.0)
            continue;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double l = m(i, k) / piv;
            m(i, k) = l;
            if (l == 0.0)
                continue;
            for (std::size_t j = k + 1; j < n; ++j)
                m(i, j) -= l * m(k, j);
        }
    }
    return f;
}

} // namespace

Matrix solve_linear(const Matrix &a, const Matrix &b, const Tolerances &tol) {
    require_square(a, "solve_linear");
    if (b.rows() != a.rows())
        throw Error(ErrorCode::DimensionMismatch, "solve_linear: rhs row count mismatch");
    const std::size_t n = a.rows();
    const LU f = lu_factor(a);
    const double scale = a.max_abs();
    if (n > 0 && !(f.min_pivot > tol.residual_tol * scale))
        throw Error(ErrorCode::SingularMatrix,
                    "pivot " + std::to_string(f.min_pivot) + " below tolerance (|A|max=" +
                        std::to_string(scale) + ")");
    Matrix x(n, b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = b(f.perm[i], c);
            for (std::size_t j = 0; j < i; ++j)
                s -= f.lu(i, j) * y[j];
            y[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = y[i];
            for (std::size_t j = i + 1; j < n; ++j)
                s -= f.lu(i, j) * x(j, c);
            x(i, c) = s / f.lu(i, i);
        }
    }
    return x;
}

Matrix inverse(const Matrix &a, const Tolerances &tol) {
    require_square(a, "inverse");
    return solve_linear(a, Matrix::identity(a.rows()), tol);
}

double determinant(const Matrix &a) {
    require_square(a, "determinant");
    const LU f = lu_factor(a);
    double d = f.sign;
    for (std::size_t i = 0; i < a.rows(); ++i)
        d *= f.lu(i, i);
    return d;
}

std::size_t rank(const Matrix &a, double rel_tol) {
    Matrix m = a;
    const double thresh = rel_tol * a.norm();
    const std::size_t nr = m.rows(), nc = m.cols();
    std::size_t r = 0;
    for (std::size_t k = 0; k < std::min(nr, nc); ++k) {
        std::size_t pi = k, pj = k;
        double best = 0.0;
        for (std::size_t i = k; i < nr; ++i)
            for (std::size_t j = k; j < nc; ++j)
                if (std::abs(m(i, j)) > best) {
                    best = std::abs(m(i, j));
                    pi = i;
                    pj = j;
                }
        if (best <= thresh)
            break;
        for (std::size_t j = 0; j < nc; ++j)
            std::swap(m(k, j), m(pi, j));
        for (std::size_t i = 0; i < nr; ++i)
            std::swap(m(i, k), m(i, pj));
        for (std::size_t i = k + 1; i < nr; ++i) {
            const double l = m(i, k) / m(k, k);
            for (std::size_t j = k; j < nc; ++j)
                m(i, j) -= l * m(k, j);
        }
        ++r;
    }
    return r;
}

// ---------------------------------------------------------------------------
// General eigenvalues: orthes + hqr (EISPACK lineage)

namespace {

void reduce_to_hessenberg(Matrix &h) {
    const std::size_t n = h.rows();
    if (n < 3)
        return;
    std::vector<double> ort(n, 0.0);
    const std::size_t high = n - 1;
    for (std::size_t m = 1; m < high; ++m) {
        double scale = 0.0;
        for (std::size_t i = m; i <= high; ++i)
            scale += std::abs(h(i, m - 1));
        if (scale == 0.0)
            continue;
        double hh = 0.0;
        for (std::size_t i = high + 1; i-- > m;) {
            ort[i] = h(i, m - 1) / scale;
            hh += ort[i] * ort[i];
        }
        double g = std::sqrt(hh);
        if (ort[m] > 0)
            g = -g;
        hh -= ort[m] * g;
        ort[m] -= g;
        for (std::size_t j = m; j < n; ++j) {
            double f = 0.0;
            for (std::size_t i = high + 1; i-- > m;)
                f += ort[i] * h(i, j);
            f /= hh;
            for (std::size_t i = m; i <= high; ++i)
                h(i, j) -= f * ort[i];
        }
        for (std::size_t i = 0; i <= high; ++i) {
            double f = 0.0;
            for (std::size_t j = high + 1; j-- > m;)
                f += ort[j] * h(i, j);
            f /= hh;
            for (std::size_t j = m; j <= high; ++j)
                h(i, j) -= f * ort[j];
        }
        ort[m] *= scale;
        h(m, m - 1) = scale * g;
    }
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
std::vector<std::complex<double>> hessenberg_qr(Matrix h, int max_iter) {
    const int nn = static_cast<int>(h.rows());
    std::vector<double> d(nn, 0.0), e(nn, 0.0);
    const double eps = std::numeric_limits<double>::epsilon();
    double exshift = 0.0;
    double p = 0, q = 0, r = 0, s = 0, z = 0, t, w, x, y;

    double norm = 0.0;
    for (int i = 0; i < nn; ++i)
        for (int j = std::max(i - 1, 0); j < nn; ++j)
            norm += std::abs(h(i, j));

    auto H = [&h](int i, int j) -> double & { return h(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); };

    int n = nn - 1;
    const int low = 0;
    int iter = 0;
    while (n >= low) {
        int l = n;
        while (l > low) {
            s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
            if (s == 0.0)
                s = norm;
            if (std::abs(H(l, l - 1)) < eps * s)
                break;
            --l;
        }

        if (l == n) {
            H(n, n) += exshift;
            d[n] = H(n, n);
            e[n] = 0.0;
            --n;
            iter = 0;
        } else if (l == n - 1) {
            w = H(n, n - 1) * H(n - 1, n);
            p = (H(n - 1, n - 1) - H(n, n)) / 2.0;
            q = p * p + w;
            z = std::sqrt(std::abs(q));
            H(n, n) += exshift;
            H(n - 1, n - 1) += exshift;
            x = H(n, n);
            if (q >= 0) {
                z = (p >= 0) ? p + z : p - z;
                d[n - 1] = x + z;
                d[n] = d[n - 1];
                if (z != 0.0)
                    d[n] = x - w / z;
                e[n - 1] = 0.0;
                e[n] = 0.0;
            } else {
                d[n - 1] = x + p;
                d[n] = x + p;
                e[n - 1] = z;
                e[n] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = H(n, n);
            y = 0.0;
            w = 0.0;
            if (l < n) {
                y = H(n - 1, n - 1);
                w = H(n, n - 1) * H(n - 1, n);
            }
            // exceptional shifts
            if (iter == 10) {
                exshift += x;
                for (int i = low; i <= n; ++i)
                    H(i, i) -= x;
                s = std::abs(H(n, n - 1)) + std::abs(H(n - 1, n - 2));
                x = y = 0.75 * s;
                w = -0.4375 * s * s;
            }
            if (iter == 30) {
                s = (y - x) / 2.0;
                s = s * s + w;
                if (s > 0) {
                    s = std::sqrt(s);
                    if (y < x)
                        s = -s;
                    s = x - w / ((y - x) / 2.0 + s);
                    for (int i = low; i <= n; ++i)
                        H(i, i) -= s;
                    exshift += s;
                    x = y = w = 0.964;
                }
            }
            if (++iter > max_iter)
                throw Error(ErrorCode::NoConvergence,
                            "QR iteration did not converge for eigenvalue " + std::to_string(n));

            int m = n - 2;
            while (m >= l) {
                z = H(m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / H(m + 1, m) + H(m, m + 1);
                q = H(m + 1, m + 1) - z - r - s;
                r = H(m + 2, m + 1);
                s = std::abs(p) + std::abs(q) + std::abs(r);
                p /= s;
                q /= s;
                r /= s;
                if (m == l)
                    break;
                if (std::abs(H(m, m - 1)) * (std::abs(q) + std::abs(r)) <
                    eps * (std::abs(p) * (std::abs(H(m - 1, m - 1)) + std::abs(z) +
                                          std::abs(H(m + 1, m + 1)))))
                    break;
                --m;
            }
            for (int i = m + 2; i <= n; ++i) {
                H(i, i - 2) = 0.0;
                if (i > m + 2)
                    H(i, i - 3) = 0.0;
            }

            for (int k = m; k <= n - 1; ++k) {
                const bool notlast = (k != n - 1);
                if (k != m) {
                    p = H(k, k - 1);
                    q = H(k + 1, k - 1);
                    r = notlast ? H(k + 2, k - 1) : 0.0;
                    x = std::abs(p) + std::abs(q) + std::abs(r);
                    if (x == 0.0)
                        continue;
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = std::sqrt(p * p + q * q + r * r);
                if (p < 0)
                    s = -s;
                if (s != 0) {
                    if (k != m)
                        H(k, k - 1) = -s * x;
                    else if (l != m)
                        H(k, k - 1) = -H(k, k - 1);
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for (int j = k; j < nn; ++j) {
                        p = H(k, j) + q * H(k + 1, j);
                        if (notlast) {
                            p += r * H(k + 2, j);
                            H(k + 2, j) -= p * z;
                        }
                        H(k, j) -= p * x;
                        H(k + 1, j) -= p * y;
                    }
                    for (int i = 0; i <= std::min(n, k + 3); ++i) {
                        p = x * H(i, k) + y * H(i, k + 1);
                        if (notlast) {
                            p += z * H(i, k + 2);
                            H(i, k + 2) -= p * r;
                        }
                        H(i, k) -= p;
                        H(i, k + 1) -= p * q;
                    }
                }
            }
        }
    }
    (void)t;
    std::vector<std::complex<double>> out(nn);
    for (int i = 0; i < nn; ++i)
        out[i] = {d[i], e[i]};
    return out;
}

} // namespace

std::vector<std::complex<double>> eig_general(const Matrix &a, const Tolerances &tol) {
    require_square(a, "eig_general");
    if (!a.all_finite())
        throw Error(ErrorCode::NonFinite, "eig_general: non-finite input");
    if (a.rows() == 0)
        return {};
    Matrix h = a;
    reduce_to_hessenberg(h);
    return hessenberg_qr(std::move(h), tol.max_iter);
}

double spectral_abscissa(const Matrix &a, const Tolerances &tol) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto &l : eig_general(a, tol))
        m = std::max(m, l.real());
    return m;
}

// ---------------------------------------------------------------------------
// Symmetric eigenproblem: cyclic Jacobi

SymEig sym_eig(const Matrix &s_in, const Tolerances &tol) {
    require_square(s_in, "sym_eig");
    const std::size_t n = s_in.rows();
    const double snorm = s_in.norm();
    if ((s_in - s_in.transpose()).norm() > 1e-8 * std::max(snorm, std::numeric_limits<double>::min()))
        throw Error(ErrorCode::NotSymmetric, "sym_eig: input is not symmetric");
    Matrix a = symmetrize(s_in);
    Matrix v = Matrix::identity(n);

    auto off_norm = [&a, n] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    const double target = tol.residual_tol * snorm;
    int sweep = 0;
    while (off_norm() > target) {
        if (++sweep > tol.max_iter)
            throw Error(ErrorCode::NoConvergence, "Jacobi sweeps exceeded max_iter");
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0)
                    continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&a](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    SymEig out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i)
            out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

double max_eigenvalue_sym(const Matrix &s, const Tolerances &tol) {
    const auto e = sym_eig(s, tol);
    return e.values.empty() ? 0.0 : e.values.back();
}

double min_eigenvalue_sym(const Matrix &s, const Tolerances &tol) {
    const auto e = sym_eig(s, tol);
    return e.values.empty() ? 0.0 : e.values.front();
}

Matrix sqrt_psd(const Matrix &s, const Tolerances &tol) {
    const auto e = sym_eig(s, tol);
    const std::size_t n = s.rows();
    Matrix r(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double l = e.values[k];
        if (l < -tol.definiteness_slack * std::max(1.0, s.norm()))
            throw Error(ErrorCode::InvalidArgument, "sqrt_psd: matrix is not positive semidefinite");
        const double sl = std::sqrt(std::max(l, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                r(i, j) += sl * e.vectors(i, k) * e.vectors(j, k);
    }
    return symmetrize(r);
}

// ---------------------------------------------------------------------------

Matrix mat_exp(const Matrix &a, double t) {
    require_square(a, "mat_exp");
    if (!std::isfinite(t) || !a.all_finite())
        throw Error(ErrorCode::NonFinite, "mat_exp: non-finite input");
    const std::size_t n = a.rows();
    Matrix x = a * t;

    double inf_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (double v : x.row(i))
            s += std::abs(v);
        inf_norm = std::max(inf_norm, s);
    }
    int squarings = 0;
    if (inf_norm > 0.5)
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(inf_norm / 0.5))));
    x *= std::ldexp(1.0, -squarings);

    constexpr int q = 6;
    double c = 1.0;
    Matrix num = Matrix::identity(n), den = Matrix::identity(n), power = Matrix::identity(n);
    for (int k = 1; k <= q; ++k) {
        c *= static_cast<double>(q - k + 1) / static_cast<double>(k * (2 * q - k + 1));
        power = power * x;
        num += c * power;
        den += ((k % 2) ? -c : c) * power;
    }
    Tolerances loose;
    loose.residual_tol = 1e-300;
    Matrix e = solve_linear(den, num, loose);
    for (int k = 0; k < squarings; ++k)
        e = e * e;
    return e;
}

Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const double aij = a(i, j);
            for (std::size_t p = 0; p < b.rows(); ++p)
                for (std::size_t q = 0; q < b.cols(); ++q)
                    k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
        }
    return k;
}

Matrix right_pseudo_inverse(const Matrix &b, const Tolerances &tol) {
    if (rank(b) < b.rows())
        throw Error(ErrorCode::RankDeficient, "right_pseudo_inverse: matrix lacks full row rank");
    const Matrix bt = b.transpose();
    // (B B^T)^{-1} is symmetric, so B^T (B B^T)^{-1} = ((B B^T)^{-1} B)^T
    return solve_linear(b * bt, b, tol).transpose();
}

Matrix controllability_matrix(const Matrix &a, const Matrix &b) {
    require_square(a, "controllability_matrix");
    const std::size_t n = a.rows(), m = b.cols();
    Matrix c(n, n * m);
    Matrix blk = b;
    for (std::size_t k = 0; k < n; ++k) {
        c.set_block(0, k * m, blk);
        blk = a * blk;
    }
    return c;
}

} // namespace vtolctrl
