"""Deformation of the wedge product by two-point kernel contractions.

All exponential series exploit nilpotency: iteration stops as soon as a
contraction application returns zero, so hbar series are exactly finite
at fixed functional grade.

Operator conventions (fixed here and asserted by tests):

* the pair contraction on a tensor factorization F ⊗ G contracts one
  slot of F against one slot of G through the kernel, with Koszul signs
  taken in the doubled algebra (F-words before G-words);
* the single-argument contraction applies the inner derivative to the
  kernel's first index:  Γ_K(F)|_word = (−1)^p (1/2) Σ K[i,j] · (remove
  i first, then j), which makes the time-ordered product agree with the
  star product on temporally ordered supports.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .algebra import Algebra, GrassmannElement
from .kernels import Kernel
from .series import FormalSeries, HbarSeries

__all__ = [
    "SymmetricKernel", "gamma_delta", "star_product", "star_with_kernel",
    "star_commutator", "contraction_operator", "time_ordering",
    "time_ordered_product", "formal_smatrix", "alpha_transform",
    "star_h_sandwich", "star_h_direct", "random_symmetric_kernel",
    "positive_frequency_kernel",
]


def _mat(kernel):
    return kernel.mat if isinstance(kernel, Kernel) else kernel


def _half(ring):
    return ring.number(Fraction(1, 2)) if ring.exact else 0.5


def _inv_factorial(ring, n: int):
    f = 1
    for k in range(2, n + 1):
        f *= k
    return ring.number(Fraction(1, f)) if ring.exact else 1.0 / f


class SymmetricKernel(Kernel):
    """Graded-symmetric two-point kernel.

    For anticommuting generators the graded-symmetric class corresponds
    to an *antisymmetric* coefficient matrix (the causal propagator, by
    contrast, has a symmetric matrix); validated on construction.
    """

    def __init__(self, mat, ring, tol: float = 1e-12):
        super().__init__(mat, ring, kind="symmetric")
        n = mat.shape[0]
        worst = 0.0
        for i in range(n):
            for j in range(n):
                worst = max(worst, abs(complex(mat[i, j]) + complex(mat[j, i])))
        if worst > tol:
            raise ValueError(
                f"kernel violates graded symmetry (defect {worst:.3g})")


# -- pair contraction (star products) ---------------------------------------

def _gamma_pair_apply(state: dict, mat, ring, half) -> dict:
    """One contraction on {(word_F, word_G): coeff} tensor states."""
    out: dict = {}
    for (wa, wb), c in state.items():
        la = len(wa)
        base = -half if la % 2 == 0 else half  # -(1/2) · (−1)^{len wa}
        for pi, i in enumerate(wa):
            row = mat[i]
            sa = -base if pi % 2 == 1 else base
            for pj, j in enumerate(wb):
                k = row[j]
                if ring.is_zero(k):
                    continue
                cc = c * k * (-sa if pj % 2 == 1 else sa)
                key = (wa[:pi] + wa[pi + 1:], wb[:pj] + wb[pj + 1:])
                out[key] = out[key] + cc if key in out else cc
    return {k: v for k, v in out.items() if not ring.is_zero(v)}


def _merge_state(alg: Algebra, state: dict) -> GrassmannElement:
    from ._core import merge_words
    ring = alg.ring
    terms: dict = {}
    for (wa, wb), c in state.items():
        m = merge_words(wa, wb)
        if m is None:
            continue
        sign, w = m
        cc = -c if sign < 0 else c
        terms[w] = terms.get(w, ring.zero) + cc
    return alg.element(terms)


def star_with_kernel(kappa, F: GrassmannElement, G: GrassmannElement) -> FormalSeries:
    """Deformed product with per-contraction kernel κ (one hbar per order).

    Coefficient of hbar^n is (1/n!) · m(Γ_κ^n (F ⊗ G)); the plain star
    product is recovered with κ = i·Δ.
    """
    alg = F.algebra
    alg.check_compatible(G.algebra)
    ring = alg.ring
    mat = _mat(kappa)
    if mat.shape != (alg.n, alg.n):
        raise ValueError("kernel does not match the generator set")
    half = _half(ring)
    state = {}
    for wa, ca in F.items():
        for wb, cb in G.items():
            key = (wa, wb)
            state[key] = state.get(key, ring.zero) + ca * cb
    coeffs = {}
    n = 0
    while state:
        e = _merge_state(alg, state).scale(_inv_factorial(ring, n))
        if not e.is_zero():
            coeffs[n] = e
        state = _gamma_pair_apply(state, mat, ring, half)
        n += 1
    return HbarSeries(alg, coeffs)


def gamma_delta(delta, F: GrassmannElement, G: GrassmannElement) -> GrassmannElement:
    """Single pair contraction (−1)^{|F|+1} (1/2) Σ Δ[i,j] F^(1)_i ∧ G^(1)_j."""
    alg = F.algebra
    alg.check_compatible(G.algebra)
    ring = alg.ring
    mat = _mat(delta)
    if mat.shape != (alg.n, alg.n):
        raise ValueError("kernel does not match the generator set")
    state = {}
    for wa, ca in F.items():
        for wb, cb in G.items():
            key = (wa, wb)
            state[key] = state.get(key, ring.zero) + ca * cb
    return _merge_state(alg, _gamma_pair_apply(state, mat, ring, _half(ring)))


def star_product(delta, F: GrassmannElement, G: GrassmannElement,
                 hbar=None) -> FormalSeries | GrassmannElement:
    """Star product exp-of-contractions series; κ = i·Δ per hbar order.

    With ``hbar`` numeric the series is collapsed at that value.
    """
    ring = F.algebra.ring
    series = star_with_kernel(_mat(delta) * ring.i, F, G)
    if hbar is None:
        return series
    return series.at(hbar)


def _star_series(delta, sF: FormalSeries, sG: FormalSeries) -> FormalSeries:
    out = HbarSeries(sF.algebra, {})
    for ka, ea in sF.coeffs.items():
        for kb, eb in sG.coeffs.items():
            out = out + star_product(delta, ea, eb).shift(ka + kb)
    return out


def star_commutator(delta, F: GrassmannElement, G: GrassmannElement,
                    hbar=None) -> FormalSeries | GrassmannElement:
    """Graded commutator [F,G]_* = F*G − (−1)^{|F||G|} G*F."""
    alg = F.algebra
    out = HbarSeries(alg, {})
    for p, Fp in F.homogeneous_parts().items():
        for q, Gq in G.homogeneous_parts().items():
            rev = star_product(delta, Gq, Fp)
            if (p * q) % 2 == 1:
                rev = rev.scale(-1)
            out = out + star_product(delta, Fp, Gq) - rev
    if hbar is None:
        return out
    return out.at(hbar)


# -- single-argument contraction (time ordering, product equivalence) -------

def contraction_operator(kernel, F: GrassmannElement) -> GrassmannElement:
    """Γ_K(F) = (1/2) Σ K[i,j] · (contract slot i first, then slot j).

    The grade-independent normalization makes Γ_K a second-order
    operator with graded Leibniz decomposition Γ_K(A∧B) = Γ_K A ∧ B +
    A ∧ Γ_K B + cross(A,B), where the cross term matches two pair
    contractions of kernel K; this is what lets exp(Γ_K) conjugation of
    the wedge reduce to cross-contractions only.
    """
    alg = F.algebra
    ring = alg.ring
    mat = _mat(kernel)
    half = _half(ring)
    terms: dict = {}
    for w, c in F.items():
        for pi, i in enumerate(w):
            wi = w[:pi] + w[pi + 1:]
            si = -half if pi % 2 == 1 else half
            row = mat[i]
            for pj, j in enumerate(wi):
                k = row[j]
                if ring.is_zero(k):
                    continue
                cc = c * k * (-si if pj % 2 == 1 else si)
                nw = wi[:pj] + wi[pj + 1:]
                terms[nw] = terms.get(nw, ring.zero) + cc
    return alg.element(terms)


def _exp_contraction(kernel, F: GrassmannElement, unit) -> FormalSeries:
    """Σ_n (unit^n / n!) hbar^n Γ_K^n F as an hbar series."""
    alg = F.algebra
    ring = alg.ring
    coeffs = {}
    cur = F
    n = 0
    scale = ring.one
    while not cur.is_zero():
        coeffs[n] = cur.scale(scale * _inv_factorial(ring, n)) if n else cur
        cur = contraction_operator(kernel, cur)
        n += 1
        scale = scale * ring.coerce(unit)
    return HbarSeries(alg, coeffs)


def _exp_contraction_series(kernel, series: FormalSeries, unit) -> FormalSeries:
    out = HbarSeries(series.algebra, {})
    for k, e in series.coeffs.items():
        out = out + _exp_contraction(kernel, e, unit).shift(k)
    return out


def time_ordering(dirac_kernel, F, direction: str = "forward") -> FormalSeries:
    """Time-ordering operator exp(± i hbar Γ_{Δ^D}) on elements or series.

    ``direction="forward"`` is the ordering map, ``"inverse"`` its exact
    inverse (finite series by nilpotency).
    """
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    ring = (F.algebra if isinstance(F, GrassmannElement) else F.algebra).ring
    unit = ring.i if direction == "forward" else -ring.i
    if isinstance(F, FormalSeries):
        return _exp_contraction_series(dirac_kernel, F, unit)
    return _exp_contraction(dirac_kernel, F, unit)


def time_ordered_product(dirac_kernel, F, G) -> FormalSeries:
    """F ·_T G = T(T^{-1}F ∧ T^{-1}G); graded-symmetric by construction."""
    sF = F if isinstance(F, FormalSeries) else HbarSeries(F.algebra, {0: F})
    sG = G if isinstance(G, FormalSeries) else HbarSeries(G.algebra, {0: G})
    inv_F = time_ordering(dirac_kernel, sF, "inverse")
    inv_G = time_ordering(dirac_kernel, sG, "inverse")
    return time_ordering(dirac_kernel, inv_F.wedge(inv_G), "forward")


def formal_smatrix(dirac_kernel, F: GrassmannElement, max_n: int) -> FormalSeries:
    """Σ_{n<=max_n} (1/n!) F ·_T ... ·_T F (n factors); unit at F = 0."""
    if not F.is_even():
        raise ValueError("interaction term must be even")
    alg = F.algebra
    ring = alg.ring
    out = HbarSeries(alg, {0: alg.one()})
    inv_F = time_ordering(dirac_kernel, F, "inverse")
    power = None
    for n in range(1, max_n + 1):
        power = inv_F if power is None else power.wedge(inv_F)
        if power.is_zero():
            break
        term = time_ordering(dirac_kernel, power, "forward")
        out = out + term.scale(_inv_factorial(ring, n))
    return out


def alpha_transform(sym_kernel, F, direction: str = "forward") -> FormalSeries:
    """Product-equivalence map exp(± hbar Γ_{Δ1}) on elements or series."""
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    alg = F.algebra
    unit = alg.ring.one if direction == "forward" else -alg.ring.one
    if isinstance(F, FormalSeries):
        return _exp_contraction_series(sym_kernel, F, unit)
    return _exp_contraction(sym_kernel, F, unit)


def star_h_sandwich(delta, sym_kernel, F: GrassmannElement,
                    G: GrassmannElement) -> FormalSeries:
    """F *_H G = α(α^{-1}F * α^{-1}G) (the defining sandwich form)."""
    aF = alpha_transform(sym_kernel, F, "inverse")
    aG = alpha_transform(sym_kernel, G, "inverse")
    prod = _star_series(delta, aF, aG)
    return alpha_transform(sym_kernel, prod, "forward")


def star_h_direct(delta, sym_kernel, F: GrassmannElement,
                  G: GrassmannElement) -> FormalSeries:
    """Same product computed directly: per-contraction kernel iΔ + 2Δ1."""
    ring = F.algebra.ring
    kappa = _mat(delta) * ring.i + _mat(sym_kernel) * ring.number(2)
    return star_with_kernel(kappa, F, G)


# -- helpers -----------------------------------------------------------------

def random_symmetric_kernel(n: int, rng, ring) -> SymmetricKernel:
    """Seeded random kernel in the graded-symmetric class."""
    from .linalg import zeros
    mat = zeros((n, n), ring)
    for i in range(n):
        for j in range(i + 1, n):
            if ring.exact:
                c = ring.number(Fraction(rng.randint(-3, 3), rng.randint(1, 3)),
                                Fraction(rng.randint(-3, 3), rng.randint(1, 3)))
            else:
                c = complex(round(rng.uniform(-1, 1), 6), round(rng.uniform(-1, 1), 6))
            mat[i, j] = c
            mat[j, i] = -c
    return SymmetricKernel(mat, ring)


def positive_frequency_kernel(fl, delta: Kernel) -> SymmetricKernel:
    """Experimental positive-frequency split of the causal kernel.

    Splits spatial Fourier modes on the periodic lattice and keeps the
    odd (sign-of-mode) component, antisymmetrized into the
    graded-symmetric class.  Float mode only.
    """
    ring = fl.ring
    if ring.exact:
        raise ValueError("positive-frequency split is float-mode only")
    nx = fl.lattice.nx
    n = fl.n_slots
    mat = np.asarray(delta.mat, dtype=complex).copy()
    # reshape slots as (..., site, comp) and fft over the spatial axis
    lead = n // (fl.lattice.n_sites * 2)
    grid = mat.reshape(lead, fl.lattice.nt, nx, 2, n)
    modes = np.fft.fft(grid, axis=2)
    ks = np.fft.fftfreq(nx)
    sign = np.sign(ks).reshape(1, 1, nx, 1, 1)
    filtered = np.fft.ifft(modes * sign * (-0.5j), axis=2).reshape(n, n)
    anti = 0.5 * (filtered - filtered.T)
    return SymmetricKernel(anti, ring)
