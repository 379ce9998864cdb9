#include "vtolctrl/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vtolctrl {

Matrix solve_lyapunov(const Matrix &a, const Matrix &q, const Tolerances &tol) {
    if (!a.is_square() || q.rows() != a.rows() || q.cols() != a.cols())
        throw Error(ErrorCode::DimensionMismatch, "solve_lyapunov: A and Q must be n x n");
    const std::size_t n = a.rows();
    const auto lambda = eig_general(a, tol);
    const double gap_tol = tol.residual_tol * std::max(1.0, a.norm());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            if (std::abs(lambda[i] + lambda[j]) <= gap_tol)
                throw Error(ErrorCode::DegenerateSpectrum,
                            "eigenvalues of A sum to ~0; Lyapunov operator is singular");

    // column-major vec: vec(A^T X + X A) = (I (x) A^T + A^T (x) I) vec(X)
    const Matrix at = a.transpose();
    const Matrix eye = Matrix::identity(n);
    const Matrix op = kron(eye, at) + kron(at, eye);
    Matrix rhs(n * n, 1);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            rhs(i + j * n, 0) = -q(i, j);
    Tolerances solve_tol = tol;
    solve_tol.residual_tol = std::min(tol.residual_tol, 1e-14);
    const Matrix v = solve_linear(op, rhs, solve_tol);
    Matrix x(n, n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            x(i, j) = v(i + j * n, 0);
    return symmetrize(x);
}

namespace {

// PBH rank of [A - lambda I, B] for one eigenvalue, complex pairs through the
// real embedding [[X, -Y], [Y, X]] of X + iY.
bool pbh_full_rank(const Matrix &a, const Matrix &b, std::complex<double> lambda, double rel_tol) {
    const std::size_t n = a.rows(), m = b.cols();
    const Matrix shifted = a - lambda.real() * Matrix::identity(n);
    if (lambda.imag() == 0.0) {
        Matrix blk(n, n + m);
        blk.set_block(0, 0, shifted);
        blk.set_block(0, n, b);
        return rank(blk, rel_tol) == n;
    }
    const Matrix im = lambda.imag() * Matrix::identity(n);
    Matrix blk(2 * n, 2 * (n + m));
    blk.set_block(0, 0, shifted);
    blk.set_block(0, n, im);
    blk.set_block(n, 0, -im);
    blk.set_block(n, n, shifted);
    blk.set_block(0, 2 * n, b);
    blk.set_block(n, 2 * n + m, b);
    return rank(blk, rel_tol) == 2 * n;
}

} // namespace

bool is_controllable(const Matrix &a, const Matrix &b, double rel_tol, const Tolerances &tol) {
    for (const auto &l : eig_general(a, tol))
        if (!pbh_full_rank(a, b, l, rel_tol))
            return false;
    return true;
}

bool is_stabilizable(const Matrix &a, const Matrix &b, double rel_tol, const Tolerances &tol) {
    for (const auto &l : eig_general(a, tol))
        if (l.real() >= 0.0 && !pbh_full_rank(a, b, l, rel_tol))
            return false;
    return true;
}

Matrix bass_initial_gain(const Matrix &a, const Matrix &bu, const Tolerances &tol) {
    if (!a.is_square() || bu.rows() != a.rows())
        throw Error(ErrorCode::DimensionMismatch, "bass_initial_gain: shape mismatch");
    const std::size_t n = a.rows();
    // beta must exceed |Re lambda| on both sides so that -(A + beta I) is
    // Hurwitz and the Gramian below is positive definite.
    double reach = 0.0;
    for (const auto &l : eig_general(a, tol))
        reach = std::max(reach, std::abs(l.real()));
    const double beta = 1.0 + reach;

    // (A + beta I) P + P (A + beta I)^T = 2 Bu Bu^T
    const Matrix shifted = a + beta * Matrix::identity(n);
    const Matrix p = solve_lyapunov(-shifted.transpose(), 2.0 * (bu * bu.transpose()), tol);
    const auto e = sym_eig(p, tol);
    if (!(e.values.front() > tol.residual_tol * std::max(e.values.back(), 0.0)))
        throw Error(ErrorCode::NotStabilizable,
                    "Bass Gramian is singular; (A, Bu) is not controllable");
    return -(bu.transpose() * inverse(p, {1e-300, tol.definiteness_slack, tol.max_iter}));
}

namespace {

Matrix cross_or_zero(const Matrix &s, std::size_t n, std::size_t m) {
    if (s.empty())
        return Matrix(n, m);
    if (s.rows() != n || s.cols() != m)
        throw Error(ErrorCode::DimensionMismatch, "cross term S must be n x m");
    return s;
}

Matrix gain_from_p(const Matrix &bu, const Matrix &r, const Matrix &s, const Matrix &p) {
    return -solve_linear(r, bu.transpose() * p + s.transpose());
}

} // namespace

double care_residual(const Matrix &a, const Matrix &bu, const Matrix &q, const Matrix &r,
                     const Matrix &s_in, const Matrix &p) {
    const Matrix s = cross_or_zero(s_in, a.rows(), bu.cols());
    const Matrix pbs = p * bu + s;
    const Matrix res = a.transpose() * p + p * a - pbs * solve_linear(r, pbs.transpose()) + q;
    const double pn = p.norm(), bn = bu.norm();
    const double scale = q.norm() + pn * pn * bn * bn / r.norm();
    return res.norm() / (scale > 0.0 ? scale : 1.0);
}

namespace {

double log_abs_det(const Matrix &z) {
    // determinant() would overflow for 2n x 2n Hamiltonians; accumulate logs
    Matrix m = z;
    const std::size_t n = m.rows();
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(p, k)))
                p = i;
        for (std::size_t j = 0; j < n; ++j)
            std::swap(m(k, j), m(p, j));
        const double piv = m(k, k);
        if (piv == 0.0)
            return -std::numeric_limits<double>::infinity();
        acc += std::log(std::abs(piv));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double l = m(i, k) / piv;
            for (std::size_t j = k + 1; j < n; ++j)
                m(i, j) -= l * m(k, j);
        }
    }
    return acc;
}

} // namespace

Matrix sign_function_gain(const Matrix &a, const Matrix &bu, const Matrix &q, const Matrix &r,
                          const Matrix &s_in, const Tolerances &tol) {
    const std::size_t n = a.rows(), m = bu.cols();
    const Matrix s = cross_or_zero(s_in, n, m);
    const Matrix rinv_st = solve_linear(r, s.transpose());
    const Matrix at = a - bu * rinv_st;
    const Matrix g = bu * solve_linear(r, bu.transpose());
    const Matrix qt = q - s * rinv_st;

    Matrix z(2 * n, 2 * n);
    z.set_block(0, 0, at);
    z.set_block(0, n, -g);
    z.set_block(n, 0, -qt);
    z.set_block(n, n, -at.transpose());

    const Tolerances inv_tol{1e-300, tol.definiteness_slack, tol.max_iter};
    bool converged = false;
    for (int it = 0; it < 100 && !converged; ++it) {
        const double c = std::exp(-log_abs_det(z) / static_cast<double>(2 * n));
        const double cz = std::isfinite(c) && c > 0.0 ? c : 1.0;
        Matrix next = 0.5 * (cz * z + inverse(cz * z, inv_tol));
        converged = (next - z).norm() <= 1e-13 * next.norm();
        z = std::move(next);
    }
    if (!converged)
        throw Error(ErrorCode::NoConvergence, "Hamiltonian sign iteration did not converge");

    // stable subspace [I; P] is the null space of sign(H) + I
    const Matrix eye = Matrix::identity(n);
    Matrix lhs(2 * n, n), rhs(2 * n, n);
    lhs.set_block(0, 0, z.block(0, n, n, n));
    lhs.set_block(n, 0, z.block(n, n, n, n) + eye);
    rhs.set_block(0, 0, -(z.block(0, 0, n, n) + eye));
    rhs.set_block(n, 0, -z.block(n, 0, n, n));
    const Matrix lt = lhs.transpose();
    const Matrix p = symmetrize(solve_linear(lt * lhs, lt * rhs, inv_tol));
    return gain_from_p(bu, r, s, p);
}

CareSolution solve_care(const Matrix &a, const Matrix &bu, const Matrix &q, const Matrix &r,
                        const Matrix &s_in, const CareOptions &opts, const Tolerances &tol) {
    const std::size_t n = a.rows(), m = bu.cols();
    if (!a.is_square() || bu.rows() != n || q.rows() != n || q.cols() != n || r.rows() != m ||
        r.cols() != m)
        throw Error(ErrorCode::DimensionMismatch, "solve_care: inconsistent dimensions");
    const Matrix s = cross_or_zero(s_in, n, m);
    if (!is_stabilizable(a, bu, 1e-8, tol))
        throw Error(ErrorCode::NotStabilizable, "(A, Bu) has an uncontrollable mode with Re >= 0");

    CareSolution sol;
    Matrix k;
    try {
        k = bass_initial_gain(a, bu, tol);
        sol.initialization = CareInit::Bass;
    } catch (const Error &e) {
        if (e.code() != ErrorCode::NotStabilizable)
            throw;
        // Bass needs a well-conditioned Gramian; weakly controllable modes
        // (e.g. the level-flight phugoid/pitch pair) make it numerically singular.
        k = sign_function_gain(a, bu, q, r, s, tol);
        sol.initialization = CareInit::SignFunction;
    }
    if (!(spectral_abscissa(a + bu * k, tol) < 0.0))
        throw Error(ErrorCode::NotStabilizable, "initial gain does not stabilize (A, Bu)");

    Matrix p_prev;
    double prev_step = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        const Matrix acl = a + bu * k;
        const Matrix sk = s * k;
        const Matrix qk = q + k.transpose() * r * k + sk + sk.transpose();
        Matrix p = solve_lyapunov(acl, symmetrize(qk), tol);
        sol.trace_history.push_back(p.trace());
        sol.iterations = it;
        k = gain_from_p(bu, r, s, p);
        if (!p_prev.empty()) {
            const double step = (p - p_prev).norm() / std::max(p.norm(), 1e-300);
            // quadratic convergence ends at round-off; a growing step means we are there
            if (step <= opts.step_tol || (it > 3 && step >= prev_step && step < 1e-9)) {
                p_prev = std::move(p);
                converged = true;
                break;
            }
            prev_step = step;
        }
        p_prev = std::move(p);
    }
    sol.P = p_prev;
    sol.K = gain_from_p(bu, r, s, sol.P);
    sol.residual = care_residual(a, bu, q, r, s, sol.P);
    if (!converged || !(sol.residual <= opts.residual_bound))
        throw Error(ErrorCode::NoConvergence,
                    "Kleinman-Newton stopped after " + std::to_string(sol.iterations) +
                        " iterations with residual " + std::to_string(sol.residual));
    return sol;
}

double h2_norm(const Matrix &a_cl, const Matrix &b_w, const Matrix &c_cl, const Tolerances &tol) {
    if (!(spectral_abscissa(a_cl, tol) < 0.0))
        throw Error(ErrorCode::UnstableSystem, "h2_norm requires a Hurwitz state matrix");
    const Matrix x = solve_lyapunov(a_cl, c_cl.transpose() * c_cl, tol);
    const double t = (b_w.transpose() * x * b_w).trace();
    return std::sqrt(std::max(t, 0.0));
}

double closed_loop_h2_norm(const LinearModel &model, const Matrix &k, const Tolerances &tol) {
    return h2_norm(model.A + model.Bu * k, model.Bw, model.Cz + model.Du * k, tol);
}

GainMatrix lqr_synthesize(const LinearModel &model, const WeightSpec &weights, const Tolerances &tol) {
    model.validate();
    weights.validate(model.states(), model.inputs(), tol);
    const CareSolution care = solve_care(model.A, model.Bu, weights.Q, weights.R, {}, {}, tol);
    GainMatrix g;
    g.K = care.K;
    g.P = care.P;
    g.iterations = care.iterations;
    g.residual = care.residual;
    g.spectral_abscissa = spectral_abscissa(model.A + model.Bu * care.K, tol);
    g.h2_norm = closed_loop_h2_norm(model.with_weights(weights), care.K, tol);
    return g;
}

H2Result h2_synthesize(const LinearModel &model, const Tolerances &tol) {
    model.validate();
    const Matrix r = symmetrize(model.Du.transpose() * model.Du);
    const double du2 = std::max(model.Du.norm() * model.Du.norm(), 1e-300);
    if (r.rows() == 0 || !(min_eigenvalue_sym(r, tol) > tol.residual_tol * du2))
        throw Error(ErrorCode::SingularFeedthrough, "Du^T Du is singular; every input needs a cost");
    const Matrix q = symmetrize(model.Cz.transpose() * model.Cz);
    const Matrix s = model.Cz.transpose() * model.Du;

    const CareSolution care = solve_care(model.A, model.Bu, q, r, s, {}, tol);
    H2Result h;
    h.K = care.K;
    h.X = care.P;
    h.iterations = care.iterations;
    h.residual = care.residual;
    const Matrix acl = model.A + model.Bu * h.K;
    h.spectral_abscissa = spectral_abscissa(acl, tol);
    h.gamma = std::sqrt(std::max((model.Bw.transpose() * h.X * model.Bw).trace(), 0.0));

    h.gramian = certificate_gramian(model, h.K, h.gamma, tol);
    return h;
}

Matrix certificate_gramian(const LinearModel &model, const Matrix &k, double gamma, const Tolerances &tol) {
    // Bw may not excite every mode, so a small multiple of the Gramian driven
    // by I is added to make X strictly positive definite; trace(Z) grows by
    // 1e-8 gamma^2.
    const std::size_t n = model.states();
    const Matrix acl = model.A + model.Bu * k;
    const Matrix ccl = model.Cz + model.Du * k;
    const Matrix g0 = solve_lyapunov(acl.transpose(), model.Bw * model.Bw.transpose(), tol);
    const Matrix g1 = solve_lyapunov(acl.transpose(), Matrix::identity(n), tol);
    const double t1 = (ccl * g1 * ccl.transpose()).trace();
    const double delta = (t1 > 0.0 && gamma > 0.0) ? 1e-8 * gamma * gamma / t1 : 1e-12;
    return symmetrize(g0 + delta * g1);
}

double certificate_slack(const LinearModel &model) { return 1e-6 * (1.0 + model.A.norm()); }

CertificateReport lqr_certificate(const LinearModel &model, const WeightSpec &weights, const Matrix &k,
                                  const Matrix &p, std::optional<double> slack, const Tolerances &tol) {
    const std::size_t n = model.states();
    if (p.rows() != n || p.cols() != n || k.rows() != model.inputs() || k.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "lqr_certificate: K or P has the wrong shape");
    const auto pe = sym_eig(p, tol);
    if (!(pe.values.front() > tol.residual_tol * std::max(pe.values.back(), 0.0)))
        throw Error(ErrorCode::SingularP, "P must be positive definite");

    const Matrix y = symmetrize(inverse(p, {1e-300, tol.definiteness_slack, tol.max_iter}));
    const Matrix w = k * y;
    const Matrix bw = model.Bu * w;
    const Matrix lmi = model.A * y + y * model.A.transpose() + bw.transpose() + bw + y * weights.Q * y +
                       w.transpose() * weights.R * w;
    CertificateReport rep;
    rep.slack_used = slack.value_or(certificate_slack(model));
    rep.worst_eigenvalue = max_eigenvalue_sym(symmetrize(lmi), tol);
    rep.satisfied = rep.worst_eigenvalue <= rep.slack_used;
    return rep;
}

CertificateReport h2_certificate(const LinearModel &model, const Matrix &k, const Matrix &x, double gamma,
                                 std::optional<double> slack, const Tolerances &tol) {
    const std::size_t n = model.states();
    if (x.rows() != n || x.cols() != n || k.rows() != model.inputs() || k.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "h2_certificate: K or X has the wrong shape");
    const auto xe = sym_eig(x, tol);
    if (!(xe.values.front() > 0.0))
        throw Error(ErrorCode::SingularX, "X must be positive definite");

    const Matrix w = k * x;
    const Matrix axbw = model.A * x + model.Bu * w;
    const Matrix first = axbw + axbw.transpose() + model.Bw * model.Bw.transpose();

    const Matrix g = model.Cz * x + model.Du * w;
    const Matrix z = symmetrize(g * solve_linear(x, g.transpose(), {1e-300, tol.definiteness_slack, tol.max_iter}));
    const std::size_t nz = z.rows();
    Matrix schur(nz + n, nz + n);
    schur.set_block(0, 0, -z);
    schur.set_block(0, nz, g);
    schur.set_block(nz, 0, g.transpose());
    schur.set_block(nz, nz, -x);

    const double inflated = gamma * (1.0 + 1e-6);
    const double trace_gap = z.trace() - inflated * inflated;

    CertificateReport rep;
    rep.slack_used = slack.value_or(certificate_slack(model));
    rep.worst_eigenvalue = std::max({max_eigenvalue_sym(symmetrize(first), tol),
                                     max_eigenvalue_sym(symmetrize(schur), tol), trace_gap});
    rep.satisfied = rep.worst_eigenvalue <= rep.slack_used;
    return rep;
}

} // namespace vtolctrl
