// LQR / H2 state-feedback synthesis through the continuous algebraic Riccati
// equation, with the LMI conditions evaluated afterwards as certificates.
//
// Sign convention throughout: u = K x.
#pragma once

#include <optional>

#include "vtolctrl/linalg.hpp"
#include "vtolctrl/models.hpp"

namespace vtolctrl {

/// Solves A^T X + X A + Q = 0 through the n^2 Kronecker-vectorized system.
/// Throws DegenerateSpectrum when some lambda_i + lambda_j of A is ~0.
Matrix solve_lyapunov(const Matrix &a, const Matrix &q, const Tolerances &tol = {});

/// Popov-Belevitch-Hautus test: rank [A - lambda I, B] = n for every
/// eigenvalue (pivoted elimination, tolerance rel_tol * ||.||_F). Better
/// conditioned than the rank of the Krylov matrix [B, AB, ...].
bool is_controllable(const Matrix &a, const Matrix &b, double rel_tol = 1e-8, const Tolerances &tol = {});
/// PBH restricted to eigenvalues with Re >= 0.
bool is_stabilizable(const Matrix &a, const Matrix &b, double rel_tol = 1e-8, const Tolerances &tol = {});

/// Bass' construction of a stabilizing gain for a controllable pair.
/// A + Bu K0 has spectral abscissa <= -beta.
Matrix bass_initial_gain(const Matrix &a, const Matrix &bu, const Tolerances &tol = {});

/// Stabilizing gain from the stable invariant subspace of the Hamiltonian,
/// computed with the scaled Newton iteration for the matrix sign function.
Matrix sign_function_gain(const Matrix &a, const Matrix &bu, const Matrix &q, const Matrix &r,
                          const Matrix &s = {}, const Tolerances &tol = {});

enum class CareInit { Bass, SignFunction };

struct CareSolution {
    Matrix P;           ///< stabilizing solution, symmetric PSD
    Matrix K;           ///< -R^{-1}(Bu^T P + S^T)
    int iterations = 0; ///< Newton steps taken
    double residual = 0.0;
    std::vector<double> trace_history; ///< trace(P_k) per Newton step
    CareInit initialization = CareInit::Bass;
};

struct CareOptions {
    double step_tol = 1e-13; ///< stop when ||P_{k+1}-P_k|| <= step_tol ||P_k||
    int max_iterations = 100;
    double residual_bound = 1e-9;
};

/// Kleinman-Newton iteration for
///   A^T P + P A - (P Bu + S) R^{-1} (Bu^T P + S^T) + Q = 0
/// started from bass_initial_gain, or from sign_function_gain when the Bass
/// Gramian is numerically singular. S may be empty (no cross term).
CareSolution solve_care(const Matrix &a, const Matrix &bu, const Matrix &q, const Matrix &r,
                        const Matrix &s = {}, const CareOptions &opts = {},
                        const Tolerances &tol = {});

/// Relative Riccati residual normalized by ||Q|| + ||P||^2 ||Bu||^2 / ||R||.
double care_residual(const Matrix &a, const Matrix &bu, const Matrix &q, const Matrix &r,
                     const Matrix &s, const Matrix &p);

/// Full-state feedback gain with closed-loop diagnostics.
struct GainMatrix {
    Matrix K;
    Matrix P;                   ///< Riccati solution the gain came from
    double spectral_abscissa = 0.0;
    std::optional<double> h2_norm; ///< ||G_zw||_2 under the cost-equivalent output
    int iterations = 0;
    double residual = 0.0;
};

GainMatrix lqr_synthesize(const LinearModel &model, const WeightSpec &weights,
                          const Tolerances &tol = {});

struct H2Result {
    Matrix K;
    double gamma = 0.0;          ///< attained ||G_zw||_2
    Matrix X;                    ///< stabilizing CARE solution (observability side)
    Matrix gramian;              ///< closed-loop controllability Gramian, the LMI variable
    double spectral_abscissa = 0.0;
    int iterations = 0;
    double residual = 0.0;
};

/// Optimal H2 state feedback for the model's (Cz, Du). The gain does not
/// depend on Bw; only gamma does.
H2Result h2_synthesize(const LinearModel &model, const Tolerances &tol = {});

/// ||C (sI - A)^{-1} B||_2 for a stable A.
double h2_norm(const Matrix &a_cl, const Matrix &b_w, const Matrix &c_cl, const Tolerances &tol = {});

/// H2 norm of the loop closed by K, from Bw to z = (Cz + Du K) x.
double closed_loop_h2_norm(const LinearModel &model, const Matrix &k, const Tolerances &tol = {});

struct CertificateReport {
    bool satisfied = false;
    double worst_eigenvalue = 0.0; ///< most positive eigenvalue over all blocks
    double slack_used = 0.0;
};

/// H2 certificate variable for a stabilizing K: controllability Gramian of
/// (A + Bu K, Bw), regularized to be positive definite. gamma is the
/// closed-loop H2 norm of K.
Matrix certificate_gramian(const LinearModel &model, const Matrix &k, double gamma, const Tolerances &tol = {});

/// Default certificate slack: 1e-6 (1 + ||A||).
double certificate_slack(const LinearModel &model);

/// Evaluates A Y + Y A^T + W^T Bu^T + Bu W + Y Q Y + W^T R W with Y = P^{-1},
/// W = K Y. The Riccati optimum makes this exactly zero, so acceptance is
/// worst eigenvalue <= slack.
CertificateReport lqr_certificate(const LinearModel &model, const WeightSpec &weights, const Matrix &k,
                                  const Matrix &p, std::optional<double> slack = std::nullopt,
                                  const Tolerances &tol = {});

/// Checks the three H2 blocks with W = K X and
/// Z = (Cz X + Du W) X^{-1} (Cz X + Du W)^T:
///   A X + Bu W + (A X + Bu W)^T + Bw Bw^T <= slack
///   [[-Z, Cz X + Du W], [*, -X]]            <= slack
///   trace(Z) - (gamma (1 + 1e-6))^2         <= slack
CertificateReport h2_certificate(const LinearModel &model, const Matrix &k, const Matrix &x, double gamma,
                                 std::optional<double> slack = std::nullopt, const Tolerances &tol = {});

} // namespace vtolctrl
