"""Free Dirac and Gross-Neveu actions on the lattice, the interacting
second-derivative kernel, and interacting propagators as terminating
series with Grassmann-even entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import CONJUGATE, FIELD, GrassmannElement
from .dynamics import ActionFunctional, peierls_bracket
from .kernels import Kernel
from .lattice import NCOMP, FieldLattice, dirac_green, dirac_matrix

__all__ = [
    "GrossNeveuParams", "InteractingKernel", "bilinear_element",
    "build_free_action", "build_gn_action", "gn_interaction_term",
    "interacting_propagator", "propagator_defect", "interacting_bracket",
    "permute_colors",
]


@dataclass
class GrossNeveuParams:
    """Couplings of the N-color quartic model.

    ``g`` is the site weight cutoff of the interaction (compact support;
    by default a window clear of the temporal boundaries so that kernel
    identities hold exactly on it).
    """

    ncolors: int = 1
    lam: object = 0
    m: object = 0
    g: list | None = None

    def cutoff(self, fl: FieldLattice) -> list:
        if self.g is not None:
            if len(self.g) != fl.lattice.n_sites:
                raise ValueError("cutoff weight length != number of sites")
            return list(self.g)
        nt = fl.lattice.nt
        return fl.window_weights(1, nt - 2)


def bilinear_element(fl: FieldLattice, M: np.ndarray) -> GrassmannElement:
    """Σ_colors conj_a M[a, b] field_b as a canonical grade-2 element."""
    ring = fl.ring
    terms: dict = {}
    b = fl.block
    for color in range(1, fl.ncolors + 1):
        psi0 = fl.slot(FIELD, color, 0, 0)
        psb0 = fl.slot(CONJUGATE, color, 0, 0)
        for a in range(b):
            row = M[a]
            for bb in range(b):
                c = row[bb]
                if ring.is_zero(c):
                    continue
                # conj_a ∧ field_b = - field_b ∧ conj_a (canonical word)
                w = (psi0 + bb, psb0 + a)
                terms[w] = terms.get(w, ring.zero) - c
    return fl.algebra.element(terms)


def _free_builder(fl: FieldLattice, m):
    def build(weights):
        return bilinear_element(fl, dirac_matrix(fl, m, weights))

    return build


def build_free_action(fl: FieldLattice, m) -> ActionFunctional:
    """Free Dirac action S_0(f) = Σ_x f(x) (conj ∧ (i γ·∂ − m) field)(x)."""
    S = ActionFunctional(fl, _free_builder(fl, m), name="free_dirac")
    S.meta = {"m": m, "model": "free"}
    return S


def _site_density(fl: FieldLattice, site: int) -> GrassmannElement:
    """Σ_{color, component} conj ∧ field at one site (even, grade 2)."""
    ring = fl.ring
    terms = {}
    for color in range(1, fl.ncolors + 1):
        for comp in range(NCOMP):
            w = (fl.slot(FIELD, color, site, comp),
                 fl.slot(CONJUGATE, color, site, comp))
            terms[w] = -ring.one  # conj ∧ field in canonical order
    return fl.algebra.element(terms)


def gn_interaction_term(fl: FieldLattice, params: GrossNeveuParams,
                        include_lambda: bool = False) -> GrassmannElement:
    """Quartic interaction functional F = Σ_x vol g(x)/(2N) (ρ_x ∧ ρ_x).

    ``include_lambda`` multiplies by the numeric coupling; the default
    leaves λ formal so the element can serve as the series insertion.
    """
    ring = fl.ring
    lat = fl.lattice
    vol = ring.coerce(Fraction(lat.dt) * Fraction(lat.dx) if ring.exact
                      else lat.dt * lat.dx)
    half = ring.number(Fraction(1, 2)) if ring.exact else 0.5
    invN = (ring.number(Fraction(1, params.ncolors)) if ring.exact
            else 1.0 / params.ncolors)
    g = params.cutoff(fl)
    out = fl.algebra.zero()
    for site in range(lat.n_sites):
        w = ring.coerce(g[site])
        if ring.is_zero(w):
            continue
        rho = _site_density(fl, site)
        quartic = rho.wedge(rho)
        if quartic.is_zero():
            continue
        out = out + quartic.scale(vol * w * half * invN)
    if include_lambda:
        lam = ring.coerce(Fraction(params.lam) if ring.exact else params.lam)
        out = out.scale(lam)
    return out


def build_gn_action(fl: FieldLattice, params: GrossNeveuParams) -> ActionFunctional:
    """Gross-Neveu action: free part plus the quartic cutoff term."""
    if fl.ncolors != params.ncolors:
        raise ValueError("params.ncolors disagrees with the field lattice")
    free = _free_builder(fl, params.m)
    ring = fl.ring
    lam = ring.coerce(Fraction(params.lam) if ring.exact else params.lam)
    g = params.cutoff(fl)
    lat = fl.lattice
    vol = ring.coerce(Fraction(lat.dt) * Fraction(lat.dx) if ring.exact
                      else lat.dt * lat.dx)
    half = ring.number(Fraction(1, 2)) if ring.exact else 0.5
    invN = (ring.number(Fraction(1, params.ncolors)) if ring.exact
            else 1.0 / params.ncolors)

    def build(weights):
        out = free(weights)
        for site in range(lat.n_sites):
            w = ring.coerce(weights[site]) * ring.coerce(g[site])
            if ring.is_zero(w):
                continue
            rho = _site_density(fl, site)
            quartic = rho.wedge(rho)
            if quartic.is_zero():
                continue
            out = out + quartic.scale(vol * w * half * invN * lam)
        return out

    S = ActionFunctional(fl, build, name="gross_neveu")
    S.meta = {"m": params.m, "model": "gross_neveu", "params": params}
    return S


class InteractingKernel:
    """Terminating propagator series with Grassmann-even entries.

    ``terms[0]`` is the free scalar kernel; ``terms[k]`` carries grade-2k
    element entries, so evaluation against a grade-n configuration uses
    only k <= n//2 contributions.
    """

    def __init__(self, fl: FieldLattice, kind: str, max_grade: int,
                 free: Kernel, corrections: list,
                 params: GrossNeveuParams | None = None):
        self.fl = fl
        self.kind = kind
        self.max_grade = max_grade
        self.free = free
        self.corrections = corrections  # list of ElementKernel, k = 1..
        self.params = params

    def insertion(self, site: int) -> GrassmannElement:
        """Per-site insertion density (lam g(x) / 2N) Σ_b conj^b ∧ field^b."""
        if self.params is None:
            return self.fl.algebra.zero()
        ring = self.fl.ring
        lam = ring.coerce(Fraction(self.params.lam) if ring.exact
                          else self.params.lam)
        g = self.params.cutoff(self.fl)
        half_invN = (ring.number(Fraction(1, 2 * self.params.ncolors))
                     if ring.exact else 0.5 / self.params.ncolors)
        return _site_density(self.fl, site).scale(
            lam * ring.coerce(g[site]) * half_invN)

    @property
    def order_count(self) -> int:
        return 1 + len(self.corrections)

    def parts(self) -> list:
        return [self.free.mat, *self.corrections]

    def term(self, k: int):
        return self.free if k == 0 else self.corrections[k - 1]

    def per_order_norms(self) -> list:
        rows = [(0, 0, float(np.sqrt(sum(abs(complex(c)) ** 2
                                         for c in self.free.mat.ravel()))))]
        for k, corr in enumerate(self.corrections, start=1):
            rows.append((k, 2 * k, corr.frobenius()))
        return rows

    def __repr__(self):
        return (f"InteractingKernel({self.kind}, orders={self.order_count}, "
                f"max_grade={self.max_grade})")


def interacting_propagator(S: ActionFunctional, kind: str,
                           max_grade: int = 6) -> InteractingKernel:
    """Series inverse of the interacting second derivative.

    Built as the terminating expansion Δ_k = (−1)^k (Δ_0 W)^k Δ_0 where W
    is the even element part of S^(2); entry grades are exactly 2k, so
    the series terminates at k = max_grade // 2.
    """
    if max_grade % 2 != 0:
        raise ValueError("max_grade must be even (entries are Grassmann-even)")
    fl = S.fl
    m = getattr(S, "meta", {}).get("m", 0)
    free = dirac_green(fl, m, kind)
    _, W = S.second_kernel()
    corrections = []
    if not W.is_zero():
        kmax = max_grade // 2
        left = W.compose_scalar_left(free.mat)   # Δ0 @ W
        current = None
        for k in range(1, kmax + 1):
            if k == 1:
                current = left.compose_scalar_right(free.mat).scale(-1)
            else:
                current = left.compose(current).scale(-1)
            if current.is_zero():
                break
            corrections.append(current)
    params = getattr(S, "meta", {}).get("params")
    return InteractingKernel(fl, kind, max_grade, free, corrections, params)


def propagator_defect(S: ActionFunctional, ik: InteractingKernel,
                      max_grade: int | None = None) -> float:
    """max |S^(2) @ Δ_I − δ| over exact equation rows, graded entrywise.

    The defect element at each (row, col) is truncated at ``max_grade``,
    matching evaluation against configurations of that grade.
    """
    fl = ik.fl
    max_grade = ik.max_grade if max_grade is None else max_grade
    K0, W = S.second_kernel()
    n = fl.n_slots
    rows = ik.free.exact_rows
    worst = 0.0
    # grade-0 block: K0 @ Δ0 − Id
    scalar = K0.mat @ ik.free.mat
    for i in range(n):
        if rows is not None and not rows[i]:
            continue
        for j in range(n):
            target = 1 if i == j else 0
            worst = max(worst, abs(complex(scalar[i, j]) - target))
    # grade-2k blocks: K0 @ E_k + W-composed with E_{k-1}
    prev = None
    for k, corr in enumerate(ik.corrections, start=1):
        if 2 * k > max_grade:
            break
        blk = corr.compose_scalar_left(K0.mat)
        lower = W.compose_scalar_right(ik.free.mat) if k == 1 else W.compose(prev)
        blk = blk + lower
        for (i, j), e in blk.entries.items():
            if rows is not None and not rows[i]:
                continue
            worst = max(worst, e.truncate(max_grade).max_abs())
        prev = corr
    return worst


def interacting_bracket(S: ActionFunctional, F: GrassmannElement,
                        G: GrassmannElement, max_grade: int = 6) -> GrassmannElement:
    """Peierls bracket with the interacting causal kernel, grade-truncated."""
    dR = interacting_propagator(S, "retarded", max_grade)
    dA = interacting_propagator(S, "advanced", max_grade)
    parts = [dR.free.mat - dA.free.mat]
    parts.extend(dR.corrections)
    parts.extend(c.scale(-1) for c in dA.corrections)
    return peierls_bracket(S, parts, F, G, max_grade=max_grade)


def permute_colors(fl: FieldLattice, elem: GrassmannElement, perm: dict) -> GrassmannElement:
    """Relabel colors by a permutation {old: new}, with Koszul signs."""
    gens = fl.algebra.generators
    out: dict = {}
    ring = fl.ring
    for w, c in elem.items():
        mapped = []
        for i in w:
            g = gens[i]
            mapped.append(fl.slot(g.species, perm.get(g.color, g.color),
                                  g.site, g.component))
        # sort with sign; repeated slots cannot occur under a bijection
        sign = 1
        arr = list(mapped)
        for a in range(len(arr)):
            for b in range(len(arr) - 1 - a):
                if arr[b] > arr[b + 1]:
                    arr[b], arr[b + 1] = arr[b + 1], arr[b]
                    sign = -sign
        w2 = tuple(arr)
        cc = c if sign > 0 else -c
        out[w2] = out.get(w2, ring.zero) + cc
    return fl.algebra.element(out)
