# stefanctl/core/analysis/lyapunov.py
import logging
import numpy as np
from scipy import linalg
from typing import List, Optional, Sequence
from stefanctl.config.settings import settings
from stefanctl.core.controller.kernels import closed_loop_matrix, system_matrices
from stefanctl.core.model.quadrature import trapezoid
from stefanctl.models.gains import ControlGains
from stefanctl.models.physical import PhysicalParams
from stefanctl.models.reports import (
    CertificateReport,
    DecaySummary,
    KappaSample,
    LyapunovCert,
    LyapunovValues,
    TransformedState,
)
from stefanctl.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10


def weight_matrix(order: int, lambda1: float, kappa2: float) -> np.ndarray:
    """Q = diag(lambda1, kappa2 lambda1[, kappa2 lambda1])."""
    return np.diag([lambda1] + [kappa2 * lambda1] * (order - 1))


def solve_P(
    gains: ControlGains,
    params: PhysicalParams,
    lambda1: float = 1.0,
    kappa2: float = 1.0,
) -> LyapunovCert:
    """Solve P (A + BK) + (A + BK)^T P = -Q.

    Second order uses the closed form in d1 = c1/eps and d2 = 1/eps + c2; third order
    solves the continuous Lyapunov equation numerically.
    """
    if lambda1 < 0.0 or kappa2 < 0.0:
        raise ValidationError("BAD_WEIGHTS", f"Need lambda1 >= 0 and kappa2 >= 0, got {lambda1}, {kappa2}")
    order = params.order
    Q = weight_matrix(order, lambda1, kappa2)
    closed_loop = closed_loop_matrix(gains, params)

    if order == 2:
        d1 = gains.c1 / params.epsilon
        d2 = 1.0 / params.epsilon + gains.c2
        if d1 == 0.0 or d2 == 0.0:
            raise ValidationError("DEGENERATE_GAINS", f"d1={d1}, d2={d2}: closed form undefined")
        l1, l2 = lambda1, kappa2 * lambda1
        P = 0.5 * np.array([
            [l1 / d2 + d1 * l2 / d2 + d2 * l1 / d1, l1 / d1],
            [l1 / d1, l1 / (d1 * d2) + l2 / d2],
        ])
    else:
        if not np.all(linalg.eigvals(closed_loop).real < 0.0):
            raise ValidationError("DEGENERATE_GAINS", "A + BK is not Hurwitz; no Lyapunov solution")
        P = linalg.solve_continuous_lyapunov(closed_loop.T, -Q)
        P = 0.5 * (P + P.T)

    residual = P @ closed_loop + closed_loop.T @ P + Q
    residual_max = float(linalg.eigvalsh(0.5 * (residual + residual.T)).max())
    p_min = float(linalg.eigvalsh(P).min())
    return LyapunovCert(
        order=order,
        lambda1=lambda1,
        kappa2=kappa2,
        P=P,
        Q=Q,
        residual_max_eig=residual_max,
        p_min_eig=p_min,
        lyap_ineq_ok=p_min > 0.0 and residual_max <= RESIDUAL_TOL * max(1.0, float(np.abs(P).max())),
    )


def positivity_sides(gains: ControlGains, params: PhysicalParams, kappa2: float):
    """Both sides of the Lambda(2,2) positivity condition for second order."""
    eps, alpha, s_r = params.epsilon, params.alpha, gains.s_r
    d1 = gains.c1 / eps
    d2 = 1.0 / eps + gains.c2
    lhs = d1 ** 2 * d2 ** 2 / ((d2 ** 2 + 2.0 * d1) / kappa2 + 1.0 / kappa2 ** 2 + d1 ** 2)
    rhs = 144.0 * s_r ** 4 * (gains.c1 - gains.c2) ** 2 / (alpha ** 2 * eps ** 2)
    return lhs, rhs


def lambda_certificate(cert: LyapunovCert, gains: ControlGains, params: PhysicalParams) -> LyapunovCert:
    """Build S = A^T K K^T A and Lambda = alpha/(64 s_r |Q^-1/2 P B|^2) Q - (9 s_r^3/alpha) S."""
    if cert.lambda1 == 0.0 or cert.kappa2 == 0.0:
        raise ValidationError("SINGULAR_Q", "Lambda needs an invertible Q (lambda1 > 0 and kappa2 > 0)")
    matrices = system_matrices(params)
    K = gains.gain_vector(params)
    s_r, alpha = gains.s_r, params.alpha

    AK = matrices.A.T @ K
    S = np.outer(AK, AK)
    weighted = (cert.P @ matrices.B) / np.sqrt(np.diag(cert.Q))
    Lambda = alpha / (64.0 * s_r * float(weighted @ weighted)) * cert.Q - 9.0 * s_r ** 3 / alpha * S
    lambda_min = float(linalg.eigvalsh(Lambda).min())

    update = dict(S=S, Lambda=Lambda, lambda_min_eig=lambda_min, lambda_pd_ok=lambda_min > 0.0)
    if cert.order == 2:
        lhs, rhs = positivity_sides(gains, params, cert.kappa2)
        d2 = 1.0 / params.epsilon + gains.c2
        update.update(positivity_lhs=lhs, positivity_rhs=rhs, positivity_limit_ok=d2 ** 2 > rhs)
    return cert.model_copy(update=update)


def certify(
    gains: ControlGains,
    params: PhysicalParams,
    lambda1: Optional[float] = None,
    kappa2_grid: Optional[Sequence[float]] = None,
) -> CertificateReport:
    """Sweep kappa2 and keep the certificate whose Lambda has the largest minimum
    eigenvalue, preferring positive definite ones."""
    lambda1 = settings.lambda1 if lambda1 is None else lambda1
    grid = list(settings.kappa2_grid if kappa2_grid is None else kappa2_grid)
    certs: List[LyapunovCert] = [
        lambda_certificate(solve_P(gains, params, lambda1, kappa2), gains, params) for kappa2 in grid
    ]
    best = max(certs, key=lambda c: (c.lambda_pd_ok, c.lambda_min_eig))
    sufficient = None
    if params.order == 3:
        sufficient = gains.c1 == gains.c2 == gains.c3
    report = CertificateReport(
        best=best,
        sweep=[
            KappaSample(kappa2=c.kappa2, lambda_min_eig=c.lambda_min_eig, positivity_lhs=c.positivity_lhs)
            for c in certs
        ],
        lambda_pd_found=any(c.lambda_pd_ok for c in certs),
        positivity_limit_ok=best.positivity_limit_ok,
        sufficient_case=sufficient,
    )
    logger.debug(f"Certificate sweep: best kappa2={best.kappa2}, Lambda PD found={report.lambda_pd_found}")
    return report


def lyapunov_values(transformed: TransformedState, cert: Optional[LyapunovCert], s_r: float) -> LyapunovValues:
    """V = 3/(4 s_r^2)||w||^2 + 1/2 ||w_x||^2 + X^T P X and Phi = ||w||^2 + ||w_x||^2 + X^T X.

    V is NaN when no certificate is supplied.
    """
    x, X = transformed.x, transformed.X
    w_sq = trapezoid(transformed.w ** 2, x)
    wx_sq = trapezoid(transformed.w_x ** 2, x)
    phi = w_sq + wx_sq + float(X @ X)
    if cert is None:
        return LyapunovValues(V=float("nan"), Phi=phi)
    V = 3.0 / (4.0 * s_r ** 2) * w_sq + 0.5 * wx_sq + float(X @ cert.P @ X)
    return LyapunovValues(V=V, Phi=phi)


def lyapunov_decay(t: np.ndarray, phi: np.ndarray, tol: Optional[float] = None) -> DecaySummary:
    """Log-linear decay rate of Phi and its largest relative step increase after the first step."""
    tol = settings.tol_lyap if tol is None else tol
    t, phi = np.asarray(t, dtype=float), np.asarray(phi, dtype=float)
    keep = np.isfinite(phi) & (phi > 0.0)
    if keep.sum() < 2:
        return DecaySummary()
    rate = float(np.polyfit(t[keep], np.log(phi[keep]), 1)[0])
    if phi.size < 3:
        return DecaySummary(rate=rate)
    previous, following = phi[1:-1], phi[2:]
    with np.errstate(divide="ignore", invalid="ignore"):
        growth = np.where(previous > 0.0, (following - previous) / previous, 0.0)
    max_increase = float(np.max(growth))
    return DecaySummary(rate=rate, max_relative_increase=max_increase, monotone=max_increase <= tol)
