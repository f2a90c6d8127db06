"""Compiled inner loops for the time integrator.

The public operators in stencil.py and reaction.py define the semantics;
these kernels fuse them into one pass per RK stage so a full-resolution
run stays cheap. Strict IEEE arithmetic (no fastmath), fixed loop order:
results are bit-reproducible run to run.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _rhs(y, out, dx, neumann,
         r_N, mu_N, beta_1, beta_3, aHgH,
         r_A, k_A, mu_AE, nu, tau_H, gamma_H, xi_A, xi_H):
    n = y.shape[1]
    inv_dx2 = 1.0 / (dx * dx)
    N, A, H = y[0], y[1], y[2]
    dN, dA, dH = out[0], out[1], out[2]
    for i in range(n):
        for j in range(n):
            nv = N[i, j]
            av = A[i, j]
            hv = H[i, j]
            na = nv * av
            nh = nv * hv
            dN[i, j] = r_N - mu_N * nv - beta_1 * na - aHgH * nh
            boundary = i == 0 or i == n - 1 or j == 0 or j == n - 1
            if not neumann and boundary:
                dA[i, j] = 0.0
                dH[i, j] = 0.0
                continue
            im = 1 if i == 0 else i - 1
            ip = n - 2 if i == n - 1 else i + 1
            jm = 1 if j == 0 else j - 1
            jp = n - 2 if j == n - 1 else j + 1
            lap_a = ((A[im, j] + A[ip, j]) + (A[i, jm] + A[i, jp]) - 4.0 * av) * inv_dx2
            lap_h = ((H[im, j] + H[ip, j]) + (H[i, jm] + H[i, jp]) - 4.0 * hv) * inv_dx2
            dA[i, j] = (
                xi_A * lap_a
                + r_A * av * (1.0 - av / k_A)
                - mu_AE * av
                - beta_3 * na
            )
            dH[i, j] = xi_H * lap_h + nu * av - tau_H * hv - gamma_H * nh


@njit(cache=True)
def _rk4_step(y, k1, k2, k3, k4, yt, h, dx, neumann,
              r_N, mu_N, beta_1, beta_3, aHgH,
              r_A, k_A, mu_AE, nu, tau_H, gamma_H, xi_A, xi_H):
    args = (dx, neumann, r_N, mu_N, beta_1, beta_3, aHgH,
            r_A, k_A, mu_AE, nu, tau_H, gamma_H, xi_A, xi_H)
    _rhs(y, k1, *args)
    half = 0.5 * h
    for c in range(3):
        for i in range(y.shape[1]):
            for j in range(y.shape[2]):
                yt[c, i, j] = y[c, i, j] + half * k1[c, i, j]
    _rhs(yt, k2, *args)
    for c in range(3):
        for i in range(y.shape[1]):
            for j in range(y.shape[2]):
                yt[c, i, j] = y[c, i, j] + half * k2[c, i, j]
    _rhs(yt, k3, *args)
    for c in range(3):
        for i in range(y.shape[1]):
            for j in range(y.shape[2]):
                yt[c, i, j] = y[c, i, j] + h * k3[c, i, j]
    _rhs(yt, k4, *args)
    w = h / 6.0
    for c in range(3):
        for i in range(y.shape[1]):
            for j in range(y.shape[2]):
                y[c, i, j] += w * (
                    k1[c, i, j]
                    + 2.0 * k2[c, i, j]
                    + 2.0 * k3[c, i, j]
                    + k4[c, i, j]
                )


def rhs_params(p) -> tuple:
    """Flatten ModelParams into the scalar tuple the kernels take."""
    return (
        p.r_N, p.mu_N, p.beta_1, p.beta_3, p.alpha_H * p.gamma_H,
        p.r_A, p.k_A, p.mu_A + p.eps_A, p.nu, p.tau_H, p.gamma_H,
        p.xi_A, p.xi_H,
    )


def rhs_into(y: np.ndarray, out: np.ndarray, p, grid, neumann: bool) -> None:
    _rhs(y, out, grid.dx, neumann, *rhs_params(p))


def rk4_step_into(y, scratch, h: float, p, grid, neumann: bool) -> None:
    _rk4_step(
        y, scratch.k1, scratch.k2, scratch.k3, scratch.k4, scratch.yt,
        h, grid.dx, neumann, *rhs_params(p),
    )
