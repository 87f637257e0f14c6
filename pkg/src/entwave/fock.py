"""Truncated two-mode Fock-space realization of the plane representation.

States of two bosonic modes enter the transforms only through their
plane representation g(eta) = <eta|g>, where <eta| is the common
eigenbra of relative position and total momentum.  The basis overlaps
have closed forms in two-variable Hermite polynomials:

    <eta|m,n> = exp(-|eta|^2/2) (-1)^n H_{m,n}(conj(eta), eta) / sqrt(m! n!)

and the conjugate-basis overlap is the pure phase
<xi|eta> = (1/2) exp[(conj(xi) eta - xi conj(eta)) / 2].  The eigenkets
themselves are non-normalizable and are never materialized; every
operation here consumes overlaps only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .grid import ComplexPlaneGrid, Field, integrate, sample
from .specfun import hermite2, hermite2_diagonal_table

_SERIES_ORDER_CAP = 60


def number_state_eta(m: int, n: int, eta):
    """Plane representation <eta|m,n> of a two-mode number state."""
    if m < 0 or n < 0:
        raise ValueError(f"number-state indices must be non-negative, got ({m}, {n})")
    ea = np.asarray(eta, dtype=complex)
    t = np.abs(ea) ** 2
    norm = math.sqrt(math.factorial(m) * math.factorial(n))
    out = np.exp(-0.5 * t) * (-1) ** n * hermite2(m, n, np.conj(ea), ea) / norm
    return complex(out) if np.ndim(eta) == 0 else out


def coherent_state_eta(z1: complex, z2: complex, eta, *, tol: float = 1e-10):
    """Plane representation <eta|z1,z2> of a two-mode coherent state.

    Summed as the truncated number-basis series
    sum_{m,n<=N} <eta|m,n> z1^m z2^n exp(-(|z1|^2+|z2|^2)/2) / sqrt(m! n!)
    with N chosen so the dropped tail is below ``tol``.
    """
    z1 = complex(z1)
    z2 = complex(z2)
    order = _coherent_order(abs(z1), abs(z2), tol)
    ea = np.asarray(eta, dtype=complex)
    t = np.abs(ea) ** 2
    pref = np.exp(-0.5 * t) * math.exp(-0.5 * (abs(z1) ** 2 + abs(z2) ** 2))

    # term(m,n) = pref (-1)^n H_{m,n}(eta*, eta) z1^m z2^n / (m! n!); rows of
    # H are produced by the raising recurrence H_{m+1,n} = x H_{m,n} - n H_{m,n-1}.
    x = np.conj(ea)
    y = ea
    row = np.stack([y**k for k in range(order + 1)])  # H_{0,n}
    zpow2 = np.array([(-z2) ** k / math.factorial(k) for k in range(order + 1)])
    zcol = zpow2.reshape((order + 1,) + (1,) * (row.ndim - 1))
    acc = np.tensordot(zpow2, row, axes=(0, 0))
    z1_fact = 1.0 + 0.0j
    edge = 0.0
    for m in range(order):
        new = np.empty_like(row)
        new[0] = x * row[0]
        for k in range(1, order + 1):
            new[k] = x * row[k] - k * row[k - 1]
        row = new
        z1_fact = z1_fact * z1 / (m + 1)
        acc = acc + z1_fact * np.tensordot(zpow2, row, axes=(0, 0))
        # dropped-tail proxy: last-column term of this row, Gaussian-damped
        edge = max(edge, float(np.max(np.abs(pref * z1_fact * zpow2[order] * row[order]))))
    # final row is the other truncation edge
    edge = max(edge, float(np.max(np.abs(pref * z1_fact * zcol * row))))
    if edge > tol:
        raise ConvergenceError(
            f"coherent-state series tail {edge:.2e} above tolerance {tol:.1e}"
        )
    out = pref * acc
    return complex(out) if np.ndim(eta) == 0 else out


def _coherent_order(a1: float, a2: float, tol: float) -> int:
    a = max(a1, a2, 1e-6)
    for order in range(8, _SERIES_ORDER_CAP + 1):
        if a**order / math.sqrt(math.factorial(order)) < 0.01 * tol:
            return order
    raise ConvergenceError(
        f"coherent amplitudes ({a1:.3g}, {a2:.3g}) too large for the "
        f"series cap {_SERIES_ORDER_CAP}"
    )


def xi_eta_overlap(xi, eta):
    """Overlap <xi|eta> = (1/2) exp[(conj(xi) eta - xi conj(eta)) / 2]."""
    xa = np.asarray(xi, dtype=complex)
    ea = np.asarray(eta, dtype=complex)
    out = 0.5 * np.exp(0.5 * (np.conj(xa) * ea - xa * np.conj(ea)))
    if np.ndim(xi) == 0 and np.ndim(eta) == 0:
        return complex(out)
    return out


def xi_eta_overlap_fock(xi: complex, eta: complex, cutoff: int = 40,
                        averaging: int = 16):
    """<xi|eta> resummed through the truncated number basis.

    Computes the square partial sums S_N = sum_{m,n<=N} <xi|m,n><m,n|eta>.
    Because <xi| and |eta> are non-normalizable, the raw partial sums only
    oscillate around the closed form (at xi = eta = 0 they alternate
    between 1 and 0); ``averaging`` iterated means of the partial-sum
    sequence give the convergent resummation.  ``averaging=0`` returns the
    raw truncated sum S_cutoff.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    if not 0 <= averaging <= cutoff:
        raise ValueError("averaging passes must lie in [0, cutoff]")
    xi = complex(xi)
    eta = complex(eta)
    hx = hermite2_diagonal_table(np.conj(xi), xi, cutoff)
    he = hermite2_diagonal_table(eta, np.conj(eta), cutoff)
    fact = np.array([math.factorial(k) for k in range(cutoff + 1)], dtype=float)
    signs = (-1.0) ** np.arange(cutoff + 1)
    pref = math.exp(-0.5 * (abs(xi) ** 2 + abs(eta) ** 2))
    terms = pref * (hx / fact[:, None]) * (he * signs[None, :] / fact[None, :])
    partial = np.cumsum(np.cumsum(terms, axis=0), axis=1).diagonal()
    for _ in range(averaging):
        partial = 0.5 * (partial[1:] + partial[:-1])
    return complex(partial[-1])


def u2_matrix_element(w, g: Field, mu: float, kappa: complex) -> complex:
    """Matrix element <psi| U2(mu, kappa) |g> through the plane representation.

    Identical quadrature to the forward transform at a single translation:
    (1/mu) int d2eta/pi psi*((eta - kappa)/mu) g(eta).
    """
    from .wavelets import eval_wavelet

    if mu <= 0:
        raise ValueError(f"scale must be positive, got {mu}")
    grid = g.grid
    shifted = (grid.nodes() - kappa) / mu
    kernel = np.conj(eval_wavelet(w, shifted))
    total = np.sum(grid.trapezoid_mask() * g.values * kernel)
    return complex(total * grid.cell_area() / (np.pi * mu))


def completeness_gram(cutoff: int, grid: ComplexPlaneGrid) -> np.ndarray:
    """Gram matrix int d2eta/pi <m,n|eta><eta|m',n'> over all m,n <= cutoff.

    Approximates the identity when the grid resolves and contains the
    sampled states; states are ordered lexicographically by (m, n).
    """
    if cutoff < 0:
        raise ValueError("cutoff must be non-negative")
    nodes = grid.nodes()
    states = [
        number_state_eta(m, n, nodes).ravel()
        for m in range(cutoff + 1)
        for n in range(cutoff + 1)
    ]
    mat = np.stack(states)
    weights = grid.trapezoid_mask().ravel() * (grid.cell_area() / np.pi)
    return (mat.conj() * weights) @ mat.T


@dataclass(frozen=True)
class TwoModeFockState:
    """Truncated coefficient matrix c_{mn} in the two-mode number basis."""

    cutoff: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (self.cutoff + 1, self.cutoff + 1):
            raise ValueError(
                f"coefficient matrix shape {c.shape} does not match cutoff {self.cutoff}"
            )
        if not np.all(np.isfinite(c.view(float))):
            raise ValueError("coefficients contain non-finite values")
        norm = np.sum(np.abs(c) ** 2)
        if norm > 1.0 + 1e-9:
            raise ValueError(f"squared norm {norm:.12f} exceeds 1 beyond truncation slack")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def number(cls, m: int, n: int, cutoff: int | None = None) -> "TwoModeFockState":
        if cutoff is None:
            cutoff = max(m, n)
        c = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
        c[m, n] = 1.0
        return cls(cutoff, c)

    @classmethod
    def coherent(cls, z1: complex, z2: complex, cutoff: int | None = None,
                 tol: float = 1e-10) -> "TwoModeFockState":
        if cutoff is None:
            cutoff = _coherent_order(abs(z1), abs(z2), tol)
        amp1 = np.array([z1**k / math.sqrt(math.factorial(k)) for k in range(cutoff + 1)])
        amp2 = np.array([z2**k / math.sqrt(math.factorial(k)) for k in range(cutoff + 1)])
        c = math.exp(-0.5 * (abs(z1) ** 2 + abs(z2) ** 2)) * np.outer(amp1, amp2)
        return cls(cutoff, c)

    def eta_field(self, grid: ComplexPlaneGrid) -> Field:
        """Sample g(eta) = sum_{mn} c_{mn} <eta|m,n> on a grid."""
        nodes = grid.nodes()
        vals = np.zeros_like(nodes)
        for m in range(self.cutoff + 1):
            for n in range(self.cutoff + 1):
                if self.coeffs[m, n] != 0:
                    vals = vals + self.coeffs[m, n] * number_state_eta(m, n, nodes)
        return Field(grid, vals)


def parse_state_descriptor(text: str):
    """Parse ``number:m,n`` or ``coherent:re1,im1,re2,im2`` descriptors."""
    kind, _, rest = text.strip().partition(":")
    parts = [p.strip() for p in rest.split(",")] if rest else []
    if kind == "number":
        if len(parts) != 2:
            raise ValueError(f"number state needs 'number:m,n', got {text!r}")
        try:
            m, n = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"bad number-state indices in {text!r}")
        if m < 0 or n < 0:
            raise ValueError(f"number-state indices must be non-negative in {text!r}")
        return ("number", m, n)
    if kind == "coherent":
        if len(parts) != 4:
            raise ValueError(
                f"coherent state needs 'coherent:re1,im1,re2,im2', got {text!r}"
            )
        try:
            vals = [float(p) for p in parts]
        except ValueError:
            raise ValueError(f"bad coherent-state amplitudes in {text!r}")
        return ("coherent", complex(vals[0], vals[1]), complex(vals[2], vals[3]))
    raise ValueError(f"unknown state kind {kind!r} in {text!r}")


def state_field(descriptor: str, grid: ComplexPlaneGrid) -> Field:
    """Sample the plane representation of a described state on a grid."""
    parsed = parse_state_descriptor(descriptor)
    if parsed[0] == "number":
        _, m, n = parsed
        return sample(lambda eta: number_state_eta(m, n, eta), grid)
    _, z1, z2 = parsed
    return sample(lambda eta: coherent_state_eta(z1, z2, eta), grid)


def unit_norm_field(descriptor: str, grid: ComplexPlaneGrid) -> Field:
    """State field renormalized to exactly unit plane-quadrature norm."""
    f = state_field(descriptor, grid)
    norm = integrate(Field(f.grid, np.abs(f.values) ** 2), "d2_over_pi").real
    if norm <= 0:
        raise ValueError(f"state {descriptor!r} has vanishing norm on this grid")
    return Field(f.grid, f.values / math.sqrt(norm))
