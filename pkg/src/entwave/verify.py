"""Theorem-verification harness.

Checks the Parseval pairing, the isometry of energy, the parameter-space
reproducing kernel, the state-independence of the normalization constant,
and the two closed-form integral identities that back the derivations.
All improper integrals are truncated, never transformed; convergence is
demonstrated by range-doubling rather than asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .ccwt import forward, forward_fast
from .fock import unit_norm_field
from .grid import ComplexPlaneGrid, Field, ScaleGrid, integrate, scale_weights, _atomic_write
from .specfun import hermite2, laguerre
from .wavelets import MotherWavelet, c_psi_prime, emhw, eval_wavelet, laguerre_gaussian

_REL_FLOOR = 1e-12


@dataclass(frozen=True)
class ParsevalReport:
    """Paired values of a (mu, kappa)-space identity and its plane side."""

    lhs: complex
    rhs: complex
    rel_error: float
    mu_range: tuple
    grid_summary: str

    @classmethod
    def build(cls, lhs: complex, rhs: complex, scales: ScaleGrid,
              grid: ComplexPlaneGrid) -> "ParsevalReport":
        rel = abs(lhs - rhs) / max(abs(rhs), _REL_FLOOR)
        summary = (
            f"{grid.nx}x{grid.ny} grid on "
            f"[{grid.x_min:g},{grid.x_min + (grid.nx - 1) * grid.dx:g}]^2, "
            f"{len(scales)} scales"
        )
        return cls(complex(lhs), complex(rhs), float(rel),
                   (scales.mu_min, scales.mu_max), summary)


def parseval_pairing(g1: Field, g2: Field, w: MotherWavelet, scales: ScaleGrid,
                     *, engine: str = "fft") -> ParsevalReport:
    """Parseval pairing of two fields.

    lhs = int dmu/mu^3 int d2kappa/pi W_psi g1 conj(W_psi g2) over the
    truncated grids; rhs = C'_psi int d2eta/pi conj(g2) g1.
    """
    run = forward_fast if engine == "fft" else forward
    if not g1.grid.same_layout(g2.grid):
        raise ValueError("fields must share a grid")
    w1 = run(g1, w, scales)
    w2 = w1 if g2 is g1 else run(g2, w, scales)
    grid = w1.kappa_grid
    mask = grid.trapezoid_mask() * (grid.cell_area() / np.pi)
    per_scale = np.array(
        [np.sum(mask * w1.values[s] * np.conj(w2.values[s]))
         for s in range(len(scales))]
    )
    lhs = complex(np.sum(scale_weights(scales, 3) * per_scale))
    overlap = integrate(Field(g1.grid, np.conj(g2.values) * g1.values), "d2_over_pi")
    rhs = c_psi_prime(w) * overlap
    return ParsevalReport.build(lhs, rhs, scales, grid)


def energy_isometry(g: Field, w: MotherWavelet, scales: ScaleGrid,
                    *, engine: str = "fft") -> ParsevalReport:
    """Isometry of energy: the g1 = g2 specialization of the pairing."""
    return parseval_pairing(g, g, w, scales, engine=engine)


def reproducing_kernel(eta: complex, eta_prime: complex, w: MotherWavelet,
                       scales: ScaleGrid, kappa_grid: ComplexPlaneGrid) -> complex:
    """Parameter-space kernel of the mother wavelet.

    K(eta, eta') = (1/C'_psi) int dmu/mu^5 int d2kappa/pi
                   psi((eta' - kappa)/mu) psi*((eta - kappa)/mu)
    over the truncated scale range and translation grid.  The coincident
    value diverges as the resolved scale floor shrinks; pass scale grids
    whose mu_min tracks the kappa spacing to regularize it.
    """
    nodes = kappa_grid.nodes()
    mask = kappa_grid.trapezoid_mask() * (kappa_grid.cell_area() / np.pi)
    weights = scale_weights(scales, 5)
    total = 0.0 + 0.0j
    for s, mu in enumerate(scales.mu_values):
        vals = eval_wavelet(w, (eta_prime - nodes) / mu) * np.conj(
            eval_wavelet(w, (eta - nodes) / mu)
        )
        total += weights[s] * np.sum(mask * vals)
    return complex(total / c_psi_prime(w))


def constant_scan(states, w: MotherWavelet, scales: ScaleGrid,
                  grid: ComplexPlaneGrid | None = None,
                  *, engine: str = "fft") -> list:
    """Isometry values for a list of state descriptors.

    Every descriptor is resolved to a unit-norm field, so each value
    estimates C'_psi independently of the state.
    """
    if grid is None:
        from .grid import default_grid

        grid = default_grid()
    out = []
    for descriptor in states:
        f = unit_norm_field(descriptor, grid)
        out.append(energy_isometry(f, w, scales, engine=engine).lhs.real)
    return out


def oracle_gaussian_integral(zeta: complex, xi: complex, eta_c: complex) -> complex:
    """Closed form of int d2z/pi exp(zeta |z|^2 + xi z + eta conj(z)).

    Equals -(1/zeta) exp(-xi eta / zeta) for Re(zeta) < 0.
    """
    zeta = complex(zeta)
    if zeta.real >= 0:
        raise ValueError(f"need Re(zeta) < 0, got {zeta}")
    return -(1.0 / zeta) * np.exp(-complex(xi) * complex(eta_c) / zeta)


def oracle_gaussian_integral_quadrature(zeta: complex, xi: complex, eta_c: complex,
                                        n: int = 384) -> complex:
    """Plane-quadrature check of :func:`oracle_gaussian_integral`.

    The grid extent solves |zeta| R^2 - (|xi|+|eta|) R = 40 so the
    integrand is below e^-40 at the boundary.
    """
    zeta = complex(zeta)
    if zeta.real >= 0:
        raise ValueError(f"need Re(zeta) < 0, got {zeta}")
    a = -zeta.real
    lin = abs(xi) + abs(eta_c)
    extent = (lin + math.sqrt(lin * lin + 160.0 * a)) / (2.0 * a)
    grid = ComplexPlaneGrid.centered(n, extent)
    z = grid.nodes()
    vals = np.exp(zeta * np.abs(z) ** 2 + xi * z + eta_c * np.conj(z))
    return complex(np.sum(grid.trapezoid_mask() * vals) * grid.cell_area() / np.pi)


def oracle_scale_integral(x: float, y: float) -> float:
    """Closed form of int_0^inf u (1 - u x^2/2)(1 - u y^2/2) e^{-u(x^2+y^2)/2} du.

    Equals -4 (x^4 - 4 x^2 y^2 + y^4) / (x^2 + y^2)^4 for x^2 + y^2 > 0.
    """
    s = x * x + y * y
    if s <= 0:
        raise ValueError("need x^2 + y^2 > 0")
    return -4.0 * (x**4 - 4.0 * x * x * y * y + y**4) / s**4


def oracle_scale_integral_quadrature(x: float, y: float) -> float:
    """Adaptive 1D quadrature check of :func:`oracle_scale_integral`."""
    s = x * x + y * y
    if s <= 0:
        raise ValueError("need x^2 + y^2 > 0")

    def integrand(u):
        return u * (1 - u * x * x / 2) * (1 - u * y * y / 2) * math.exp(-u * s / 2)

    value, _ = quad(integrand, 0.0, np.inf, limit=200)
    return value


# ---------------------------------------------------------------------------
# Named suites
# ---------------------------------------------------------------------------


@dataclass
class VerifySettings:
    """Grids, scale ranges, and tolerances for the named suites.

    The theorem suites stack three truncations (eta grid, kappa grid,
    mu range), hence the 5% default; closed-form oracle rows are held to
    1e-6.  The scale ranges are sized so the truncated tails stay inside
    those budgets (checked by the mu-doubling case).
    """

    grid_n: int = 256
    grid_extent: float = 8.0
    scale_count: int = 64
    mu_min: float = 0.25
    mu_max: float = 16.0
    engine: str = "fft"
    wavelet_kind: str = "emhw"
    wavelet_coeffs: tuple = ()
    theorem_tol: float = 0.05
    doubling_tol: float = 0.01
    ortho_tol: float = 0.02
    oracle_tol: float = 1e-6
    identity_tol: float = 1e-10
    window_lo: float = 0.475
    window_hi: float = 0.525
    ratio_max: float = 1.05
    scan_states: tuple = ("number:0,0", "number:1,1", "coherent:0.5,0,0.3,0")
    scan_mu_min: float = 0.125
    scan_mu_max: float = 16.0
    scan_scale_count: float = 72
    kernel_grid_n: int = 257
    kernel_grid_extent: float = 8.0
    kernel_mu_max: float = 4.0
    kernel_scale_count: int = 80
    kernel_separation: float = 3.0
    kernel_sep_frac: float = 0.01
    kernel_growth_min: float = 3.0
    oracle_draws: int = 50
    identity_max_order: int = 10
    seed: int = 20240801

    def wavelet(self) -> MotherWavelet:
        if self.wavelet_kind == "emhw":
            return emhw()
        if self.wavelet_kind == "lg":
            return laguerre_gaussian(self.wavelet_coeffs)
        raise ValueError(f"verify suites need an admissible plane wavelet, "
                         f"got kind {self.wavelet_kind!r}")

    def grid(self) -> ComplexPlaneGrid:
        return ComplexPlaneGrid.centered(self.grid_n, self.grid_extent)

    def scales(self) -> ScaleGrid:
        return ScaleGrid.log_spaced(self.scale_count, self.mu_min, self.mu_max)


@dataclass(frozen=True)
class CaseResult:
    """One verification row: the judged metric sits in ``rel_error``."""

    case: str
    lhs: complex
    rhs: complex
    rel_error: float
    passed: bool


SUITE_NAMES = ("parseval", "kernel", "constants", "oracles", "all")


def _suite_parseval(s: VerifySettings) -> list:
    w = s.wavelet()
    grid = s.grid()
    scales = s.scales()
    vac = unit_norm_field("number:0,0", grid)
    one_one = unit_norm_field("number:1,1", grid)
    rows = []

    rep = parseval_pairing(vac, vac, w, scales, engine=s.engine)
    rows.append(CaseResult("parseval_vacuum", rep.lhs, rep.rhs, rep.rel_error,
                           rep.rel_error <= s.theorem_tol))

    doubled = ScaleGrid.log_spaced(s.scale_count, s.mu_min / 2, s.mu_max * 2)
    rep2 = parseval_pairing(vac, vac, w, doubled, engine=s.engine)
    change = abs(rep2.lhs - rep.lhs) / max(abs(rep.lhs), _REL_FLOOR)
    rows.append(CaseResult("parseval_mu_doubling", rep2.lhs, rep.lhs, change,
                           change <= s.doubling_tol))

    cross = parseval_pairing(vac, one_one, w, scales, engine=s.engine)
    rows.append(CaseResult("parseval_orthogonal_states", cross.lhs, 0.0,
                           abs(cross.lhs), abs(cross.lhs) <= s.ortho_tol))

    rep11 = energy_isometry(one_one, w, scales, engine=s.engine)
    rows.append(CaseResult("isometry_number_1_1", rep11.lhs, rep11.rhs,
                           rep11.rel_error, rep11.rel_error <= s.theorem_tol))
    return rows


def _suite_constants(s: VerifySettings) -> list:
    w = s.wavelet()
    scales = ScaleGrid.log_spaced(int(s.scan_scale_count), s.scan_mu_min, s.scan_mu_max)
    values = constant_scan(list(s.scan_states), w, scales, s.grid(), engine=s.engine)
    target = c_psi_prime(w)
    rows = []
    for descriptor, value in zip(s.scan_states, values):
        rel = abs(value - target) / max(abs(target), _REL_FLOOR)
        ok = s.window_lo <= value <= s.window_hi
        rows.append(CaseResult(f"constant[{descriptor}]", value, target, rel, ok))
    ratio = max(values) / min(values)
    rows.append(CaseResult("constant_max_min_ratio", ratio, 1.0, ratio - 1.0,
                           ratio <= s.ratio_max))
    return rows


def _kernel_scales(grid: ComplexPlaneGrid, s: VerifySettings) -> ScaleGrid:
    # The resolvable scale floor is the grid spacing; tying mu_min to it
    # regularizes the coincident divergence.
    return ScaleGrid.log_spaced(s.kernel_scale_count, grid.dx, s.kernel_mu_max)


def _suite_kernel(s: VerifySettings) -> list:
    w = s.wavelet()
    coarse = ComplexPlaneGrid.centered(s.kernel_grid_n, s.kernel_grid_extent)
    fine = ComplexPlaneGrid.centered(2 * s.kernel_grid_n - 1, s.kernel_grid_extent)
    k_coarse = reproducing_kernel(0.0, 0.0, w, _kernel_scales(coarse, s), coarse)
    k_fine = reproducing_kernel(0.0, 0.0, w, _kernel_scales(fine, s), fine)
    k_sep = reproducing_kernel(0.0, s.kernel_separation, w,
                               _kernel_scales(coarse, s), coarse)
    rows = [
        CaseResult("kernel_separation_fraction", k_sep, k_coarse,
                   abs(k_sep) / abs(k_coarse),
                   abs(k_sep) <= s.kernel_sep_frac * abs(k_coarse)),
        CaseResult("kernel_coincident_growth", k_fine, k_coarse,
                   abs(k_fine) / abs(k_coarse),
                   abs(k_fine) >= s.kernel_growth_min * abs(k_coarse)),
    ]
    return rows


def _suite_oracles(s: VerifySettings) -> list:
    rng = np.random.default_rng(s.seed)
    rows = []
    for n in range(s.identity_max_order + 1):
        worst = (0.0, 0.0, 0.0)
        for _ in range(20):
            eta = complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) * 2.1
            lhs = (-1) ** n * hermite2(n, n, eta, np.conj(eta))
            rhs = math.factorial(n) * laguerre(n, abs(eta) ** 2)
            rel = abs(lhs - rhs) / max(abs(rhs), _REL_FLOOR)
            if rel >= worst[2]:
                worst = (lhs, rhs, rel)
        rows.append(CaseResult(f"hermite_laguerre_diag[n={n}]", worst[0], worst[1],
                               worst[2], worst[2] <= s.identity_tol))
    for k in range(s.oracle_draws):
        zeta = complex(rng.uniform(-2.0, -0.8), rng.uniform(-0.4, 0.4))
        xi = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        eta_c = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        closed = oracle_gaussian_integral(zeta, xi, eta_c)
        numeric = oracle_gaussian_integral_quadrature(zeta, xi, eta_c)
        err = abs(numeric - closed) / max(abs(closed), 1.0)
        rows.append(CaseResult(f"gaussian_integral[{k}]", numeric, closed, err,
                               err <= s.oracle_tol))
    for k in range(s.oracle_draws):
        x = rng.uniform(0.3, 2.5)
        y = rng.uniform(0.3, 2.5)
        closed = oracle_scale_integral(x, y)
        numeric = oracle_scale_integral_quadrature(x, y)
        err = abs(numeric - closed) / max(abs(closed), 1.0)
        rows.append(CaseResult(f"scale_integral[{k}]", numeric, closed, err,
                               err <= s.oracle_tol))
    return rows


_SUITES = {
    "parseval": _suite_parseval,
    "constants": _suite_constants,
    "kernel": _suite_kernel,
    "oracles": _suite_oracles,
}


def run_suite(name: str, settings: VerifySettings | None = None) -> list:
    """Run a named suite; ``all`` chains every suite in a fixed order."""
    if settings is None:
        settings = VerifySettings()
    if name == "all":
        rows = []
        for key in ("oracles", "parseval", "constants", "kernel"):
            rows.extend(_SUITES[key](settings))
        return rows
    try:
        suite = _SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    return suite(settings)


def format_table(rows) -> str:
    """Fixed-width report table, one line per case."""
    width = max(len(r.case) for r in rows) if rows else 4
    lines = [f"{'case':<{width}}  {'lhs':>24}  {'rhs':>24}  {'metric':>12}  result"]
    for r in rows:
        lhs = complex(r.lhs)
        rhs = complex(r.rhs)
        lines.append(
            f"{r.case:<{width}}  {lhs.real:>11.6g}{lhs.imag:>+11.4g}j  "
            f"{rhs.real:>11.6g}{rhs.imag:>+11.4g}j  "
            f"{r.rel_error:>12.4e}  {'PASS' if r.passed else 'FAIL'}"
        )
    return "\n".join(lines)


def write_report_csv(rows, path: str) -> None:
    """CSV report: case,lhs_re,lhs_im,rhs_re,rhs_im,rel_error."""
    lines = ["case,lhs_re,lhs_im,rhs_re,rhs_im,rel_error"]
    for r in rows:
        lhs = complex(r.lhs)
        rhs = complex(r.rhs)
        lines.append(
            f"{r.case},{lhs.real!r},{lhs.imag!r},{rhs.real!r},{rhs.imag!r},{r.rel_error!r}"
        )
    _atomic_write(path, ("\n".join(lines) + "\n").encode())
