#!/usr/bin/env python3
"""Dense reference values for the golden regression test.

Works on the 4x grid (n_x = 4096, s_oct = 32) with closed forms where they exist:
the heat extension of a Gaussian is a wider Gaussian, box sums are direct sums over
the node set, and block norms come from Parseval on the exact spectrum.

    python3 tests/oracle/golden_oracle.py > tests/golden/golden_values.txt
"""
import math
import sys

import numpy as np

D, L, NX, TMIN, TMAX, SOCT = 1, 64.0, 4096, 0.0625, 8.0, 32
H = L / NX
J = round(SOCT * math.log2(TMAX / TMIN))
T = TMIN * 2.0 ** (np.arange(J + 1) / SOCT)
WLOG = math.log(2.0) / SOCT
X = np.arange(NX) * H

# g0: exp(-|x - c|^2 / (2 w^2)), mean removed.
C0, W0 = 32.0, 4.0


def heat_gaussian():
    """Periodized (e^{t^2 Delta} g)(x) - mean; the symbol e^{-t^2 xi^2} is a Gaussian of variance 2 t^2."""
    F = np.zeros((J + 1, NX))
    for j, t in enumerate(T):
        v = W0 * W0 + 2.0 * t * t
        for image in range(-6, 7):
            disp = X - C0 - image * L
            F[j] += W0 / math.sqrt(v) * np.exp(-disp**2 / (2.0 * v))
    return F - W0 * math.sqrt(2.0 * math.pi) / L


def ball_half(radius):
    """Largest integer offset with |o| h < radius; a node exactly on the sphere is outside."""
    x = radius / H
    m = math.ceil(x - 1e-9) - 1
    return max(m, 0)


def window():
    """s-offsets m with a < 2^{m/s} < b for (a, b, c) = (1/2, 1, 1); rows whose boxes stay on the grid."""
    m_lo, m_hi = -SOCT + 1, -1
    rows = [j for j in range(J + 1) if j + m_lo >= 0 and j + m_hi <= J]
    return m_lo, m_hi, rows


def box_average(F, r, beta):
    m_lo, m_hi, rows = window()
    G = np.abs(T[:, None] ** (-beta) * F)
    if math.isfinite(r):
        G = G**r
    A = {}
    for j in rows:
        block = G[j + m_lo : j + m_hi + 1]
        M = ball_half(T[j])
        idx = (np.arange(NX)[:, None] + np.arange(-M, M + 1)[None, :]) % NX
        if math.isfinite(r):
            s = block.sum(axis=0)
            acc = s[idx].sum(axis=1)
            A[j] = (acc / (block.shape[0] * (2 * M + 1))) ** (1.0 / r)
        else:
            s = block.max(axis=0)
            A[j] = s[idx].max(axis=1)
    return A


def lp(values, weight, p):
    values = np.abs(np.asarray(values, dtype=float))
    if math.isinf(p):
        return float(values.max())
    return float((weight * (values**p)).sum() ** (1.0 / p))


def z_norm(F, p, q, r, beta):
    A = box_average(F, r, beta)
    return lp([lp(A[j], H, p) for j in sorted(A)], WLOG, q)


def t_norm(F, p, q, r, beta):
    A = box_average(F, r, beta)
    stack = np.array([A[j] for j in sorted(A)])
    if math.isinf(q):
        inner = stack.max(axis=0)
    else:
        inner = (WLOG * stack**q).sum(axis=0) ** (1.0 / q)
    return lp(inner, H, p)


def dyadic_norm(F, p, q, r, beta):
    e0 = round(SOCT * math.log2(TMIN))
    terms = []
    for k in range(-10, 10):
        j0, j1 = SOCT * (k - 1) - e0, SOCT * k - e0 - 1
        side = 2.0**k
        per, cubes = side / H, L / side
        if j0 < 0 or j1 > J or per < 1 or cubes < 1:
            continue
        per, cubes = int(round(per)), int(round(cubes))
        wgt = (WLOG * H * T[j0 : j1 + 1] ** (-D))[:, None]
        slab = np.abs(F[j0 : j1 + 1])
        blocks = []
        for c in range(cubes):
            v = slab[:, c * per : (c + 1) * per]
            blocks.append(float(((wgt * v**r).sum()) ** (1.0 / r)))
        terms.append(2.0 ** (-k * beta) * lp(blocks, side**D, p))
    return lp(terms, 1.0, q)


def chi(a):
    a = np.abs(a)
    out = np.zeros_like(a)
    out[a <= 1] = 1.0
    mid = (a > 1) & (a < 2)
    u = a[mid] - 1.0
    up = np.exp(-1.0 / (1.0 - u))
    dn = np.exp(-1.0 / u)
    out[mid] = up / (up + dn)
    return out


def boundary_g0():
    disp = (X - C0 + L / 2) % L - L / 2
    f = np.exp(-disp**2 / (2 * W0 * W0))
    return f - f.mean()


def lp_family():
    lowest = 2 * math.pi / L
    nyq = math.pi * NX / L
    return range(math.floor(math.log2(lowest)), math.ceil(math.log2(nyq)) + 1)


def blocks_spectrum(f):
    c = np.fft.fft(f) / NX
    xi = np.abs(np.fft.fftfreq(NX, d=H)) * 2 * math.pi
    return {k: c * (chi(xi / 2.0**k) - chi(xi / 2.0 ** (k - 1))) for k in lp_family()}


def besov(f, p, q, beta):
    assert p == 2, "Parseval evaluation needs p = 2"
    norms = [2.0 ** (k * beta) * math.sqrt(L * float(np.sum(np.abs(b) ** 2))) for k, b in blocks_spectrum(f).items()]
    return lp(norms, 1.0, q)


def triebel(f, p, q, beta):
    rows = [2.0 ** (k * beta) * np.abs(np.fft.ifft(b * NX).real) for k, b in blocks_spectrum(f).items()]
    inner = (np.array(rows) ** q).sum(axis=0) ** (1.0 / q)
    return lp(inner, H, p)


def main():
    F = heat_gaussian()
    f = boundary_g0()
    inf = math.inf
    rows = [
        ("z_g0", "Z", 2, 2, 2, -0.5, z_norm(F, 2, 2, 2, -0.5)),
        ("t_g0", "T", 2, 3, 2, -0.5, t_norm(F, 2, 3, 2, -0.5)),
        ("zmax_g0", "Z", 1, 2, inf, -1.0, z_norm(F, 1, 2, inf, -1.0)),
        ("dyadic_g0", "dyadic", 2, 2, 2, -0.5, dyadic_norm(F, 2, 2, 2, -0.5)),
        ("besov_g0", "besov", 2, 2, 0, -0.5, besov(f, 2, 2, -0.5)),
        ("triebel_g0", "triebel", 2, 3, 0, -0.5, triebel(f, 2, 3, -0.5)),
    ]
    out = sys.stdout
    out.write("# Written by tests/oracle/golden_oracle.py; field g0 of corpus/manifest.txt.\n")
    out.write("# name space p q r beta value (r unused for boundary norms)\n")
    out.write(f"grid {D} {L:g} {NX} {TMIN:g} {TMAX:g} {SOCT}\n")
    for name, space, p, q, r, beta, v in rows:
        fmt = lambda e: "inf" if math.isinf(e) else f"{e:g}"
        out.write(f"{name} {space} {fmt(p)} {fmt(q)} {fmt(r)} {beta:g} {v:.17g}\n")


if __name__ == "__main__":
    main()
