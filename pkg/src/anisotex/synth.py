"""FFT synthesis of operator scaling Gaussian random fields, plus an
independent frequency-domain quadrature oracle for second-order statistics.

The field is the real harmonizable model

    X(x) = Re  sum_k  c_k (e^{i <x, xi_k>} - 1),        xi_k = 2 pi k,

with Hermitian complex Gaussian coefficients c_k whose variances are the
spectral masses of the weight rho^{-2(H+1)}. Masses are *alias folded*:
each lattice mode carries the integral of the spectral density over its
frequency cell plus all copies shifted by the sampling lattice 2 pi n Z^2.
Folding makes the lattice field second-order equivalent to exact sampling
of the continuum model, so directional increment statistics follow the
continuum scaling laws down to fine lags. Without it, the steep-exponent
axis of an anisotropic weight loses its sub-grid spectral ridge and the
sampled field is measurably too smooth along that axis.

Remaining known bias: the zero-frequency cell (|xi| < pi) cannot be
represented by a periodic model, so variances at large lags (|x| beyond
roughly 0.3) fall below the continuum oracle. Estimation uses small and
mid lags where the deficit is negligible.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import beta as beta_fn, gamma as gamma_fn

from .core import FieldSpec, SampledField, matrix_power

TWO_PI = 2.0 * math.pi

_GAUSS_CACHE = {}


def _gauss(n):
    if n not in _GAUSS_CACHE:
        _GAUSS_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GAUSS_CACHE[n]


_NODE_LADDER = (20, 32, 48, 64, 96, 128, 192, 256, 384, 512, 768)


def _pick_nodes(need):
    for n in _NODE_LADDER:
        if n >= need:
            return n
    return _NODE_LADDER[-1]


def worker_count(default=4):
    """Worker cap from the ANISOTEX_THREADS environment variable."""
    cap = os.environ.get("ANISOTEX_THREADS")
    n = min(default, os.cpu_count() or 1)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, n)


# ---------------------------------------------------------------------------
# spectral masses
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Per-mode amplitudes for the synthesis lattice xi_k = 2 pi k.

    ``amplitudes[k1, k2]`` (FFT index order) is the standard deviation of
    mode k; its square is the alias-folded cell mass of rho^{-2(H+1)}.
    The zero mode and the Nyquist row/column are zero.
    """

    n: int
    freq_index: np.ndarray = field(repr=False)  # integer frequencies, FFT order
    amplitudes: np.ndarray = field(repr=False)

    @property
    def frequencies(self) -> np.ndarray:
        """Per-axis frequencies xi = 2 pi k, FFT index order."""
        return TWO_PI * self.freq_index


_MASS_CACHE = {}

_M_BOX = 3       # full alias box |m| <= 3
_M_STRIP = 8     # axis-aligned strips out to |m| = 8, integral tails beyond
_AXIS_BAND = 4   # base cells within 4 of an axis get tensor Gauss integrals
_CORE = 8        # base cells within 8 of the origin get 4x4 subdivision


def _folded_mass(alpha0, hurst, n):
    """Alias-folded spectral masses for the power-sum weight (cached)."""
    key = (float(alpha0), float(hurst), int(n))
    if key in _MASS_CACHE:
        return _MASS_CACHE[key]

    lam1, lam2 = alpha0, 2.0 - alpha0
    qq = 2.0 * (hurst + 1.0)
    L = TWO_PI * n
    k = np.fft.fftfreq(n, d=1.0 / n)
    xi = TWO_PI * k

    ms = np.arange(-_M_STRIP, _M_STRIP + 1)
    P1 = np.abs(xi[:, None] + L * ms[None, :]) ** (1.0 / lam1)
    P2 = np.abs(xi[:, None] + L * ms[None, :]) ** (1.0 / lam2)
    o = _M_STRIP  # index offset: column o + m holds shift m

    mass = np.zeros((n, n))
    for m1 in range(-_M_STRIP, _M_STRIP + 1):
        for m2 in range(-_M_STRIP, _M_STRIP + 1):
            if m1 == 0 and m2 == 0:
                continue
            if abs(m1) > _M_BOX and abs(m2) > _M_BOX:
                continue  # far corners are negligible
            mass += (P1[:, o + m1][:, None] + P2[:, o + m2][None, :]) ** (-qq)
    mass *= TWO_PI ** 2

    # base cell, midpoint far from the axes
    with np.errstate(divide="ignore"):
        base = TWO_PI ** 2 * (P1[:, o][:, None] + P2[:, o][None, :]) ** (-qq)
    base[0, 0] = 0.0

    xg, wg = _gauss(10)

    def cell_integral(c1, c2, sub):
        e1 = c1 - math.pi + TWO_PI * np.arange(sub + 1) / sub
        e2 = c2 - math.pi + TWO_PI * np.arange(sub + 1) / sub
        tot = 0.0
        for i in range(sub):
            t1 = 0.5 * (e1[i + 1] - e1[i]) * xg + 0.5 * (e1[i] + e1[i + 1])
            w1 = 0.5 * (e1[i + 1] - e1[i]) * wg
            for jj in range(sub):
                t2 = 0.5 * (e2[jj + 1] - e2[jj]) * xg + 0.5 * (e2[jj] + e2[jj + 1])
                w2 = 0.5 * (e2[jj + 1] - e2[jj]) * wg
                r = np.abs(t1[:, None]) ** (1.0 / lam1) + np.abs(t2[None, :]) ** (1.0 / lam2)
                tot += float((w1[:, None] * w2[None, :] * r ** (-qq)).sum())
        return tot

    half = n // 2
    for k1 in range(-half + 1, half):
        for k2 in range(-half + 1, half):
            if k1 == 0 and k2 == 0:
                continue
            if abs(k1) <= _AXIS_BAND or abs(k2) <= _AXIS_BAND:
                sub = 4 if (abs(k1) <= _CORE and abs(k2) <= _CORE) else 1
                base[k1 % n, k2 % n] = cell_integral(TWO_PI * k1, TWO_PI * k2, sub)
    mass += base

    def tail_int(c_vals, lam):
        """2/L * integral over u > (m_strip + 1/2) L of (c + u^{1/lam})^{-qq}."""
        xg8, wg8 = _gauss(8)
        tot = np.zeros_like(c_vals)
        lo = (_M_STRIP + 0.5) * L
        for _ in range(60):
            hi = 2.0 * lo
            u = 0.5 * (hi - lo) * xg8 + 0.5 * (hi + lo)
            w = 0.5 * (hi - lo) * wg8
            seg = ((c_vals[:, None] + u[None, :] ** (1.0 / lam)) ** (-qq)) @ w
            tot += seg
            lo = hi
            if float(seg.max()) < 1e-16 * float(tot.max() + 1e-300):
                break
        return 2.0 * tot / L

    col_tail = np.zeros(n)
    row_tail = np.zeros(n)
    for m in range(-_M_BOX, _M_BOX + 1):
        col_tail += tail_int(P1[:, o + m], lam2)
        row_tail += tail_int(P2[:, o + m], lam1)
    mass += TWO_PI ** 2 * col_tail[:, None]
    mass += TWO_PI ** 2 * row_tail[None, :]

    mass[0, 0] = 0.0
    mass[half, :] = 0.0
    mass[:, half] = 0.0
    _MASS_CACHE[key] = mass
    return mass


def spectral_grid(spec: FieldSpec) -> SpectralGrid:
    """Amplitude grid for a field specification."""
    if spec.rho != "power_sum":
        raise ValueError(f"synthesis supports the power_sum weight only, got {spec.rho!r}")
    mass = _folded_mass(spec.alpha0, spec.hurst, spec.grid_n)
    k = np.fft.fftfreq(spec.grid_n, d=1.0 / spec.grid_n)
    return SpectralGrid(n=spec.grid_n, freq_index=k, amplitudes=np.sqrt(mass))


# ---------------------------------------------------------------------------
# synthesis
# ---------------------------------------------------------------------------

_HALF_CACHE = {}


def _half_plane(n):
    """Mode list of the half plane {k2 > 0} u {k2 = 0, k1 > 0}, row-major in k1."""
    if n not in _HALF_CACHE:
        half = n // 2
        rng = np.arange(-half + 1, half)
        K1, K2 = np.meshgrid(rng, rng, indexing="ij")
        sel = (K2 > 0) | ((K2 == 0) & (K1 > 0))
        _HALF_CACHE[n] = (K1[sel], K2[sel])
    return _HALF_CACHE[n]


def spectral_coefficients(spec: FieldSpec) -> np.ndarray:
    """Hermitian complex Gaussian coefficient grid for one realization.

    The Gaussian stream is drawn from a Philox generator keyed by
    ``spec.seed``: two standard normals per half-plane mode, enumerated
    row-major over {k2 > 0} plus {k2 = 0, k1 > 0}, even draws real parts.
    """
    n = spec.grid_n
    amp = spectral_grid(spec).amplitudes
    k1s, k2s = _half_plane(n)
    rng = np.random.Generator(np.random.Philox(key=spec.seed))
    z = rng.standard_normal((k1s.size, 2))
    g = (z[:, 0] + 1j * z[:, 1]) / math.sqrt(2.0)
    C = np.zeros((n, n), dtype=complex)
    a = amp[k1s % n, k2s % n]
    C[k1s % n, k2s % n] = a * g
    C[(-k1s) % n, (-k2s) % n] = a * np.conj(g)
    return C


def synthesize(spec: FieldSpec) -> SampledField:
    """Draw one field realization on the n x n grid over [0,1]^2.

    Deterministic given the spec (seed included); the origin sample is
    exactly zero by the spectral subtraction of the value at x = 0.
    """
    n = spec.grid_n
    C = spectral_coefficients(spec)
    Y = np.fft.ifft2(C) * (n * n)
    X = Y.real
    X = X - X[0, 0]
    X[0, 0] = 0.0
    return SampledField(values=X, spec=spec)


def synthesize_ensemble(spec: FieldSpec, reps: int, workers: int | None = None):
    """Independent realizations with seeds spec.seed + i, i = 0..reps-1."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    specs = [spec.with_seed((spec.seed + i) % 2 ** 64) for i in range(reps)]
    spectral_grid(spec)  # build the shared mass grid once, outside the pool
    w = worker_count() if workers is None else max(1, workers)
    if w == 1 or reps == 1:
        return [synthesize(s) for s in specs]
    with ThreadPoolExecutor(max_workers=w) as pool:
        return list(pool.map(synthesize, specs))


def evaluate_at_points(spec: FieldSpec, points) -> np.ndarray:
    """Evaluate one realization at arbitrary points of [0,1]^2.

    Direct trigonometric summation of the same spectral coefficients the
    FFT path uses, so lattice points reproduce ``synthesize`` values
    and off-lattice points are exact for the lattice model (no
    interpolation bias).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = spec.grid_n
    C = spectral_coefficients(spec)
    k = np.fft.fftfreq(n, d=1.0 / n)
    y0 = C.sum()
    out = np.empty(pts.shape[0])
    for i, (x1, x2) in enumerate(pts):
        row = np.exp(1j * TWO_PI * k * x1)
        col = np.exp(1j * TWO_PI * k * x2)
        out[i] = (row @ C @ col - y0).real
    return out


# ---------------------------------------------------------------------------
# variogram oracle
# ---------------------------------------------------------------------------

def _cosine_moment(s: float) -> float:
    """int_0^inf (1 - cos u) u^{-1-s} du for s in (0, 2)."""
    if abs(s - 1.0) < 1e-9:
        return math.pi / 2.0
    return gamma_fn(2.0 - s) * math.cos(math.pi * s / 2.0) / (s * (1.0 - s))


def _axis_variogram(alpha0, hurst, axis, r):
    """Closed-form variogram on a coordinate axis (power-sum weight)."""
    lam1, lam2 = alpha0, 2.0 - alpha0
    if axis == 0:
        s = 2.0 * hurst / lam1
        return 8.0 * lam2 * _cosine_moment(s) * beta_fn(lam1 + 2.0 * hurst, lam2) * abs(r) ** s
    s = 2.0 * hurst / lam2
    return 8.0 * lam1 * _cosine_moment(s) * beta_fn(lam2 + 2.0 * hurst, lam1) * abs(r) ** s


def _one_minus_coscos(A, B):
    # stable for small phases: 1 - cosA cosB = pA + pB - pA pB, p = 2 sin^2(./2)
    pa = 2.0 * np.sin(0.5 * A) ** 2
    pb = 2.0 * np.sin(0.5 * B) ** 2
    return pa + pb - pa * pb


_J_MIN = -40


def _radial_integral(a_arr, b_arr, alpha0, hurst, jmax):
    """I(a,b) = int_0^inf r^{-2H-1} (1 - cos(a r^l1) cos(b r^l2)) dr,
    vectorized over (a, b) pairs. Dyadic panels plus analytic head/tail."""
    a_arr = np.asarray(a_arr, dtype=float)
    b_arr = np.asarray(b_arr, dtype=float)
    lam1, lam2 = alpha0, 2.0 - alpha0
    H2 = 2.0 * hurst
    total = np.zeros_like(a_arr)
    T = 2.0 ** _J_MIN
    total += 0.5 * a_arr ** 2 * T ** (2 * lam1 - H2) / (2 * lam1 - H2)
    total += 0.5 * b_arr ** 2 * T ** (2 * lam2 - H2) / (2 * lam2 - H2)
    amax = float(a_arr.max())
    bmax = float(b_arr.max())
    for j in range(_J_MIN, jmax + 1):
        lo, hi = 2.0 ** j, 2.0 ** (j + 1)
        osc = (amax * (hi ** lam1 - lo ** lam1) + bmax * (hi ** lam2 - lo ** lam2)) / TWO_PI
        nn = _pick_nodes(int(20 + math.ceil(2.5 * min(osc, 1e6))))
        xg, wg = _gauss(nn)
        r = 0.5 * (hi - lo) * xg + 0.5 * (hi + lo)
        w = 0.5 * (hi - lo) * wg
        ra = r ** lam1
        rb = r ** lam2
        f = r ** (-H2 - 1.0) * _one_minus_coscos(np.outer(a_arr, ra), np.outer(b_arr, rb))
        total += f @ w
    R = 2.0 ** (jmax + 1)
    total += R ** (-H2) / H2  # exact mean tail; oscillatory remainder decays faster
    return total


_C_PANELS = 30
_C_NODES = 12


def _c_grid(alpha0):
    """Graded Gauss grid on (0,1) with the Jacobi-type endpoint weight folded in."""
    lam2 = 2.0 - alpha0
    xg, wg = _gauss(_C_NODES)
    cs, ws = [], []
    for m in range(1, _C_PANELS + 1):
        hi = 2.0 ** (-m)
        lo = hi / 2.0
        c = 0.5 * (hi - lo) * xg + 0.5 * (hi + lo)
        w = 0.5 * (hi - lo) * wg
        cs.extend([c, 1.0 - c])
        ws.extend([w, w])
    c = np.concatenate(cs)
    w = np.concatenate(ws)
    wt = c ** (alpha0 - 1.0) * (1.0 - c) ** (1.0 - alpha0) * w
    return c, wt


def _tail_bound_constant(alpha0, hurst):
    """int over rho > R of rho^{-2(H+1)} equals this constant times R^{-2H}."""
    lam1, lam2 = alpha0, 2.0 - alpha0
    return 4.0 * lam1 * lam2 * beta_fn(lam1, lam2) / (2.0 * hurst)


def variogram_oracle(spec: FieldSpec, x) -> float:
    """Var X(x) for the continuum model, by frequency-domain quadrature.

    The integral of 2 (1 - cos <x, xi>) rho(xi)^{-2(H+1)} is reduced to
    anisotropic polar coordinates (exact for the power-sum weight) and
    integrated over dyadic radial shells with oscillation-adapted Gauss
    panels; the radial head and mean tail are added in closed form. On
    the coordinate axes the exact closed form is returned directly. The
    shell ladder is extended until the crude tail bound
    4 int_{rho > R} rho^{-2(H+1)} falls below 1e-4 of the accumulated
    head (usually far below; non-convergence raises).

    Relative accuracy is ~1e-6 for moderate anisotropy, degrading toward
    ~1e-3 for min(alpha0, 2 - alpha0) near 0.2.
    """
    if spec.rho != "power_sum":
        raise ValueError(f"variogram oracle supports the power_sum weight only, got {spec.rho!r}")
    x1, x2 = float(x[0]), float(x[1])
    alpha0, hurst = spec.alpha0, spec.hurst
    if x1 == 0.0 and x2 == 0.0:
        return 0.0
    if x2 == 0.0:
        return _axis_variogram(alpha0, hurst, 0, x1)
    if x1 == 0.0:
        return _axis_variogram(alpha0, hurst, 1, x2)

    lam1, lam2 = alpha0, 2.0 - alpha0
    c, wt = _c_grid(alpha0)
    a = abs(x1) * c ** lam1
    b = abs(x2) * (1.0 - c) ** lam2

    jmax = 17
    vals = _radial_integral(a, b, alpha0, hurst, jmax)
    pref = 8.0 * lam1 * lam2
    head = pref * float(np.sum(wt * vals))
    # endpoint stubs of the graded c grid
    eps = 2.0 ** (-_C_PANELS - 1)
    head += pref * (eps ** lam1 / lam1) * _radial_integral([0.0], [abs(x2)], alpha0, hurst, jmax)[0]
    head += pref * (eps ** lam2 / lam2) * _radial_integral([abs(x1)], [0.0], alpha0, hurst, jmax)[0]

    # extend the shell ladder until the crude tail bound meets the target;
    # the mean tail is already added in closed form, so extension panels
    # only refine the (fast-decaying) oscillatory remainder
    tail_c = _tail_bound_constant(alpha0, hurst)
    while 4.0 * tail_c * (2.0 ** (jmax + 1)) ** (-2.0 * hurst) > 1e-4 * abs(head):
        new_jmax = jmax + 8
        if new_jmax > 53:
            raise RuntimeError(
                "variogram quadrature did not converge (tail bound decays as "
                f"R^(-2*hurst)): x={x}, alpha0={alpha0}, hurst={hurst}, "
                f"head={head}, jmax={jmax}"
            )
        ext = _radial_integral_extension(a, b, alpha0, hurst, jmax, new_jmax)
        head += pref * float(np.sum(wt * ext))
        jmax = new_jmax
    return head


def _radial_integral_extension(a_arr, b_arr, alpha0, hurst, old_jmax, new_jmax):
    """Panels (old_jmax, new_jmax] plus the mean-tail adjustment."""
    a_arr = np.asarray(a_arr, dtype=float)
    b_arr = np.asarray(b_arr, dtype=float)
    lam1, lam2 = alpha0, 2.0 - alpha0
    H2 = 2.0 * hurst
    total = np.zeros_like(a_arr)
    amax = float(a_arr.max())
    bmax = float(b_arr.max())
    for j in range(old_jmax + 1, new_jmax + 1):
        lo, hi = 2.0 ** j, 2.0 ** (j + 1)
        osc = (amax * (hi ** lam1 - lo ** lam1) + bmax * (hi ** lam2 - lo ** lam2)) / TWO_PI
        nn = _pick_nodes(int(20 + math.ceil(2.5 * min(osc, 1e6))))
        xg, wg = _gauss(nn)
        r = 0.5 * (hi - lo) * xg + 0.5 * (hi + lo)
        w = 0.5 * (hi - lo) * wg
        f = r ** (-H2 - 1.0) * _one_minus_coscos(np.outer(a_arr, r ** lam1),
                                                 np.outer(b_arr, r ** lam2))
        total += f @ w
    total += (2.0 ** (new_jmax + 1)) ** (-H2) / H2
    total -= (2.0 ** (old_jmax + 1)) ** (-H2) / H2
    return total


# ---------------------------------------------------------------------------
# Monte Carlo scaling check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingCheckResult:
    ratio: float
    ci_halfwidth: float
    target: float


def monte_carlo_scaling_check(spec: FieldSpec, a: float, x, reps: int,
                              translates: int = 16) -> ScalingCheckResult:
    """Estimate Var X(a^E x) / Var X(x) over independent realizations.

    Under the model the ratio targets a^{2 H}. The model has exactly
    stationary increments (true for the lattice field as well), so each
    realization's variance estimate averages squared increments
    (X(tau + y) - X(tau))^2 over ``translates`` base points tau, with
    tau = 0 always included; this cuts the estimator noise several-fold
    without changing its target. Points are evaluated by direct mode
    summation (no interpolation). Returns a 95% confidence half-width
    from the delta method on the per-realization pair statistics.
    """
    if reps < 50:
        raise ValueError("reps must be >= 50")
    if not a > 0:
        raise ValueError(f"scale a must be positive, got {a}")
    x = np.asarray(x, dtype=float)
    y = matrix_power(spec.anisotropy, a) @ x
    for name, p in (("x", x), ("a^E x", y)):
        if not (0.0 <= p[0] <= 1.0 and 0.0 <= p[1] <= 1.0):
            raise ValueError(f"point {name} = {tuple(p)} outside [0,1]^2")
    target = a ** (2.0 * spec.hurst)
    if np.allclose(y, x):
        return ScalingCheckResult(ratio=1.0, ci_halfwidth=0.0, target=target)

    rng = np.random.Generator(np.random.Philox(key=(spec.seed, 0x7a06)))
    k = max(1, int(translates))
    box = np.maximum(0.0, 1.0 - np.maximum(x, y))
    taus = np.vstack([np.zeros(2), rng.uniform(0.0, 1.0, size=(k - 1, 2)) * box])
    pts = np.vstack([taus, taus + y, taus + x])

    u = np.empty(reps)
    w = np.empty(reps)
    for i in range(reps):
        vals = evaluate_at_points(spec.with_seed((spec.seed + i) % 2 ** 64), pts)
        base, at_y, at_x = vals[:k], vals[k:2 * k], vals[2 * k:]
        u[i] = np.mean((at_y - base) ** 2)
        w[i] = np.mean((at_x - base) ** 2)
    um, wm = u.mean(), w.mean()
    ratio = um / wm
    cov = np.cov(u, w)
    var_ratio = ratio ** 2 * (cov[0, 0] / um ** 2 + cov[1, 1] / wm ** 2
                              - 2.0 * cov[0, 1] / (um * wm)) / reps
    return ScalingCheckResult(ratio=float(ratio),
                              ci_halfwidth=float(1.96 * math.sqrt(max(var_ratio, 0.0))),
                              target=float(target))
