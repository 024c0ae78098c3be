"""Reflection symmetrization across coordinate hyperplanes.

One step takes a unit-volume set with barycenter at the origin, cuts it by
{x_axis = 0}, doubles each half by reflection and keeps the double with the
larger barycentric asymmetry.  Every intermediate quantity and every
inequality linking them is recorded in the step.  Repeating the step over
all axes yields a set symmetric about every coordinate hyperplane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import balls
from .asymmetry import (
    FraenkelOptions,
    PreconditionError,
    barycentric_asymmetry,
    deficit_with_error,
    fraenkel_asymmetry,
    _quadrature_error,
)
from .checks import ANALYTIC_TOL, Check, na, tolerance_for
from .constants import ConstantsTable, diameter_floor, omega
from .measures import (
    DEFAULT_QUADRATURE,
    QuadratureOptions,
    _perimeter,
    barycenter,
    diameter,
    moment,
    symdiff_volume_with_error,
    symmetry_defect,
    volume,
)
from .shapes import (
    AxisBox,
    Ball,
    BallCap,
    Body,
    Empty,
    Hyperplane,
    Polygon2D,
    Region2D,
    RepresentationError,
    Union,
    VoxelGrid,
    normalize,
    to_region,
    voxelize,
)

E_PRIME = "E_prime"
E_DPRIME = "E_dprime"


@dataclass(frozen=True)
class SymmetrizationOptions:
    fraenkel: FraenkelOptions = FraenkelOptions()
    quadrature: QuadratureOptions = DEFAULT_QUADRATURE
    ball_vertices: int = 1024  # disks become inscribed polygons in the plane
    voxels_per_diameter: int = 96  # grid resolution for N >= 3
    symmetry_tol: float = 1e-9


# ---------------------------------------------------------------- split


@dataclass(frozen=True)
class SplitState:
    axis: int
    E_plus: Body
    E_minus: Body
    volume_plus: float
    volume_minus: float
    epsilon: float
    P: tuple[float, ...]
    P_hat: tuple[float, ...]
    eta: float

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "volume_plus": self.volume_plus,
            "volume_minus": self.volume_minus,
            "epsilon": self.epsilon,
            "P": list(self.P),
            "P_hat": list(self.P_hat),
            "eta": self.eta,
        }


def _is_grid(s: Body) -> bool:
    if isinstance(s, VoxelGrid):
        return True
    if isinstance(s, Union):
        return any(_is_grid(p) for p in s.parts)
    return False


def _check_normalized(s: Body, q: QuadratureOptions) -> None:
    m = volume(s, q)
    bar = barycenter(s, q)
    if _is_grid(s):
        vol_tol, bar_tol = 1e-9, 0.5 * math.sqrt(s.dim) * s.h + 1e-12
    else:
        vol_tol, bar_tol = 1e-9, 1e-9 * max(diameter(s), 1.0)
    if abs(m - 1) > vol_tol:
        raise PreconditionError(f"input is not normalized: volume {m!r}")
    if float(np.linalg.norm(bar)) > bar_tol:
        raise PreconditionError(f"input is not normalized: barycenter {bar.tolist()}")


def split(s: Body, axis: int, q: QuadratureOptions = DEFAULT_QUADRATURE, check: bool = True) -> SplitState:
    """Cut a normalized set by {x_axis = 0}."""
    if check:
        _check_normalized(s, q)
    plane = Hyperplane(axis, 0.0)
    plus = s.clip(plane, 1)
    minus = s.clip(plane, -1)
    vp = volume(plus, q)
    vm = volume(minus, q)
    p = moment(plus, q) if vp > 0 else np.zeros(s.dim)
    p_hat = p.copy()
    p_hat[axis] = 0.0
    return SplitState(
        axis=axis,
        E_plus=plus,
        E_minus=minus,
        volume_plus=vp,
        volume_minus=vm,
        epsilon=abs(0.5 - vp),
        P=tuple(float(x) for x in p),
        P_hat=tuple(float(x) for x in p_hat),
        eta=float(np.linalg.norm(p_hat)),
    )


def _double(half: Body, plane: Hyperplane) -> Body:
    if half.is_empty:
        return half
    mirror = half.reflect(plane)
    if isinstance(half, VoxelGrid):
        return half.combine(mirror, np.logical_or)
    if isinstance(half, Region2D):
        return Region2D(half.rings + mirror.rings)
    return Union((half, mirror), disjoint=True)


def build_reflections(st: SplitState) -> tuple[Body, Body]:
    """E' = E+ ∪ R(E+) and E'' = E- ∪ R(E-)."""
    plane = Hyperplane(st.axis, 0.0)
    return _double(st.E_plus, plane), _double(st.E_minus, plane)


# ---------------------------------------------------------------- trilem


@dataclass(frozen=True)
class TrilemResult:
    lhs_ok: bool
    rhs_ok: bool
    D_prime: float
    first: Check
    second: Check
    G_sym_H: float
    G_sym_Htilde: float
    bar_distance: float


def trilem_check(
    G: Body, H: Body, H_tilde: Body, q: QuadratureOptions = DEFAULT_QUADRATURE, rtol: float = 1e-7
) -> TrilemResult:
    """2|G Δ H| >= |G Δ H~| >= (2|G|/D') |bar(G) - bar(H~)|, D' = diam(G ∪ H~)."""
    g = volume(G, q)
    ht = volume(H_tilde, q)
    h = volume(H, q)
    scale = max(g, h, ht, 1e-300)
    if abs(ht - g) > rtol * scale:
        raise PreconditionError(f"|H~| = {ht!r} differs from |G| = {g!r}")
    hh, hh_err = symdiff_volume_with_error(H, H_tilde, q)
    if abs(hh - abs(h - g)) > rtol * scale + 3 * hh_err:
        raise PreconditionError("H and H~ are not nested: |H Δ H~| != ||H| - |G||")
    gh, gh_err = symdiff_volume_with_error(G, H, q)
    ght, ght_err = symdiff_volume_with_error(G, H_tilde, q)
    d_prime = diameter(Union((G, H_tilde)))
    if g > 0 and not H_tilde.is_empty:
        dist = float(np.linalg.norm(barycenter(G, q) - barycenter(H_tilde, q)))
    else:
        dist = 0.0
    lower = 2 * g / d_prime * dist if d_prime > 0 else 0.0
    first = Check(
        "trilem_first",
        "nested-ball triangle bound 2|GΔH| >= |GΔH~|",
        ght,
        2 * gh,
        tolerance_for(2 * gh_err + ght_err),
    )
    second = Check(
        "trilem_second",
        "barycenter-shift bound |GΔH~| >= (2|G|/D')|bar G - bar H~|",
        lower,
        ght,
        tolerance_for(ght_err + gh_err),
    )
    return TrilemResult(first.holds, second.holds, d_prime, first, second, gh, ght, dist)


# ---------------------------------------------------------------- step


@dataclass
class SymmetrizationStep:
    axis: int
    branch: str  # main | epsnotbad | fixed_point | degenerate
    split: SplitState
    input: Body = field(repr=False)
    E_prime: Body = field(repr=False)
    E_dprime: Body = field(repr=False)
    chosen: str
    D: float
    D_eff: float
    P_prime: tuple[float, ...]
    P_dprime: tuple[float, ...]
    eta_prime: float
    eta_dprime: float
    volumes: dict
    perimeters: dict
    deltas: dict
    lambdas: dict
    fraenkel: dict
    side: int
    B_hat_radius: float
    D_prime: float
    checks: list[Check]
    errors: dict

    @property
    def E_tilde(self) -> Body:
        return self.E_prime if self.chosen == E_PRIME else self.E_dprime

    @property
    def slacks(self) -> dict:
        return {c.name: (c.slack if c.applicable else None) for c in self.checks}

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "branch": self.branch,
            "split": self.split.to_dict(),
            "chosen": self.chosen,
            "D": self.D,
            "D_eff": self.D_eff,
            "P_prime": list(self.P_prime),
            "P_dprime": list(self.P_dprime),
            "eta": self.split.eta,
            "eta_prime": self.eta_prime,
            "eta_dprime": self.eta_dprime,
            "volumes": self.volumes,
            "perimeters": self.perimeters,
            "deltas": self.deltas,
            "lambdas": self.lambdas,
            "fraenkel": self.fraenkel,
            "side": self.side,
            "B_hat_radius": self.B_hat_radius,
            "D_prime": self.D_prime,
            "errors": self.errors,
            "checks": [c.to_dict() for c in self.checks],
        }


def _exactly_symmetric(s: Body, axis: int, q: QuadratureOptions) -> bool:
    if isinstance(s, Ball):
        return s.center[axis] == 0.0
    if isinstance(s, AxisBox):
        return s.lo[axis] == -s.hi[axis]
    if isinstance(s, BallCap):
        return s.axis != axis and s.ball.center[axis] == 0.0
    if isinstance(s, Union):
        if all(_exactly_symmetric(p, axis, q) for p in s.parts):
            return True
    if _is_grid(s):
        return False
    try:
        sd, err = symdiff_volume_with_error(s, s.reflect(Hyperplane(axis, 0.0)), q)
    except RepresentationError:
        return False
    return err == 0.0 and sd <= 1e-12 * volume(s, q)


def working_shape(s: Body, opts: SymmetrizationOptions) -> Body:
    """The representation used for clipping and doubling: ring chains in the
    plane and voxel grids in higher dimensions."""
    if s.dim == 2:
        if isinstance(s, (Region2D, Polygon2D)):
            return s if isinstance(s, Region2D) else Region2D(s.rings)
        try:
            return to_region(s, opts.ball_vertices)
        except RepresentationError:
            pass
    if isinstance(s, VoxelGrid):
        return s
    h = diameter(s) / opts.voxels_per_diameter
    return normalize(voxelize(s, h)).shape


def _sqrt_err(delta: float, err: float) -> float:
    """Error of sqrt(delta) induced by an error ``err`` in delta."""
    if err == 0:
        return 0.0
    d = max(delta, 0.0)
    return math.sqrt(d + err) - math.sqrt(d)


def _vol_err(s: Body) -> float:
    return s.h**s.dim if isinstance(s, VoxelGrid) else 0.0


def _bar_err(s: Body) -> float:
    """Barycenter offset left by snapping a grid to its lattice."""
    return 0.5 * math.sqrt(s.dim) * s.h if isinstance(s, VoxelGrid) else 0.0


def _lambda0(s: Body, q: QuadratureOptions) -> tuple[float, float]:
    if s.is_empty:
        return math.nan, 0.0
    m = volume(s, q)
    return barycentric_asymmetry(s, q), _quadrature_error(s, balls.radius_for_volume(s.dim, m), m)


def _delta(s: Body, q: QuadratureOptions) -> tuple[float, float]:
    if s.is_empty:
        return math.nan, 0.0
    return deficit_with_error(s, q)


def symmetrize_step(
    s: Body,
    axis: int,
    constants: ConstantsTable,
    opts: SymmetrizationOptions = SymmetrizationOptions(),
    symmetric_axes: tuple[int, ...] = (),
) -> SymmetrizationStep:
    """One reflection step on a normalized set, symmetric about ``symmetric_axes``."""
    q = opts.quadrature
    n = s.dim
    plane = Hyperplane(axis, 0.0)
    plane.check(n)
    _check_normalized(s, q)
    if symmetric_axes:
        defect = symmetry_defect(s, symmetric_axes, q)
        tol = opts.symmetry_tol if not _is_grid(s) else 1e-12
        if defect > tol:
            raise PreconditionError(f"input is not symmetric about axes {list(symmetric_axes)} (defect {defect:.3g})")

    cf = constants.cf
    c1 = constants.c1
    c2 = constants.c2
    k_eta = omega(n - 1) / omega(n) ** ((n - 1) / n)

    fixed = _exactly_symmetric(s, axis, q)
    work = s if fixed else working_shape(s, opts)
    if work is not s:
        work = normalize(work).shape

    D = diameter(work)  # unit volume, so this is diam / |E|^(1/N)
    D_eff = max(D, diameter_floor(n, constants.floor))
    delta, delta_err = _delta(work, q)
    lam0, lam0_err = _lambda0(work, q)
    fr = fraenkel_asymmetry(work, replace(opts.fraenkel, axis=axis), q)
    F = np.array(fr.center)
    sqrt_delta = math.sqrt(max(delta, 0.0))

    if fixed:
        try:
            st = split(s, axis, q, check=False)
        except RepresentationError:
            st = split(normalize(working_shape(s, opts)).shape, axis, q, check=False)
        e1 = e2 = s
    else:
        st = split(work, axis, q, check=False)
        e1, e2 = build_reflections(st)

    eps = st.epsilon
    vol1 = volume(e1, q) if not e1.is_empty else 0.0
    vol2 = volume(e2, q) if not e2.is_empty else 0.0
    bar1 = barycenter(e1, q) if vol1 > 0 else np.full(n, math.nan)
    bar2 = barycenter(e2, q) if vol2 > 0 else np.full(n, math.nan)
    eta1 = float(np.linalg.norm(bar1))
    eta2 = float(np.linalg.norm(bar2))
    d1, d1_err = (delta, delta_err) if fixed else _delta(e1, q)
    d2, d2_err = (delta, delta_err) if fixed else _delta(e2, q)
    l1, l1_err = (lam0, lam0_err) if fixed else _lambda0(e1, q)
    l2, l2_err = (lam0, lam0_err) if fixed else _lambda0(e2, q)
    p_e = _perimeter(work, q)
    p1 = _perimeter(e1, q) if not fixed else p_e
    p2 = _perimeter(e2, q) if not fixed else p_e

    if e2.is_empty or (not e1.is_empty and not (l2 > l1)):
        chosen = E_PRIME
    else:
        chosen = E_DPRIME

    degenerate = e1.is_empty or e2.is_empty
    epsnotbad = 8 * eps >= lam0
    if fixed:
        branch = "fixed_point"
    elif degenerate:
        branch = "degenerate"
    elif epsnotbad:
        branch = "epsnotbad"
    else:
        branch = "main"

    # working half-space: P^·F^ <= 0 keeps {x_axis > 0}
    p_hat = np.array(st.P_hat)
    f_hat = F.copy()
    f_hat[axis] = 0.0
    side = 1 if float(p_hat @ f_hat) <= 0 else -1
    G = st.E_plus if side > 0 else st.E_minus
    g_vol = st.volume_plus if side > 0 else st.volume_minus
    r_f = balls.radius_for_volume(n, 1.0)
    B_F = Ball(F, r_f)
    H = B_F.clip(plane, side)
    if g_vol > 0:
        rho = balls.cap_radius_for_volume(n, side * F[axis], g_vol)
        H_tilde = Ball(F, rho).clip(plane, side)
    else:
        rho = 0.0
        H_tilde = Empty(n)

    checks: list[Check] = []
    in_quarter = eps <= 0.25

    # half-volume gap
    checks.append(
        Check(
            "eps_sqrt_deficit",
            "half-volume gap eps <= C1 D sqrt(delta)",
            eps,
            c1 * D_eff * sqrt_delta,
            tolerance_for(c1 * D_eff * _sqrt_err(delta, delta_err)),
        )
    )
    # quantitative inequality with the configured constant
    checks.append(
        Check(
            "fraenkel_qii",
            "configured Fraenkel constant lambda <= C_F sqrt(delta)",
            fr.value,
            cf * sqrt_delta,
            tolerance_for(lam0_err + cf * _sqrt_err(delta, delta_err)),
            informational=True,
            note="holds only if the configured C_F is a valid constant for this set",
        )
    )
    if epsnotbad and not fixed:
        checks.append(
            Check(
                "epsnotbad_bound",
                "large-gap branch lambda0 <= 8 C1 D sqrt(delta)",
                lam0,
                8 * c1 * D_eff * sqrt_delta,
                tolerance_for(lam0_err + 8 * c1 * D_eff * _sqrt_err(delta, delta_err)),
            )
        )
    else:
        checks.append(na("epsnotbad_bound", "large-gap branch lambda0 <= 8 C1 D sqrt(delta)", "8 eps < lambda0"))

    # volumes and symmetry of the doubles
    checks.append(
        Check(
            "volume_bookkeeping",
            "|E'| + |E''| = 2",
            abs(vol1 + vol2 - 2),
            0.0,
            tolerance_for(_vol_err(e1) + _vol_err(e2)) if not fixed else ANALYTIC_TOL,
        )
    )
    old_and_new = tuple(sorted(set(symmetric_axes) | {axis}))
    for name, e in (("E_prime", e1), ("E_dprime", e2)):
        if e.is_empty:
            checks.append(na(f"symmetry_{name}", "doubled set gains the new symmetry", "empty half"))
            continue
        checks.append(
            Check(
                f"symmetry_{name}",
                "doubled set gains the new symmetry and keeps the old ones",
                symmetry_defect(e, old_and_new, q),
                0.0,
                opts.symmetry_tol,
            )
        )

    # reflected barycenters
    if in_quarter and not degenerate:
        worst = min(eta1 - 4 * st.eta / 3, 4 * st.eta - eta1, eta2 - 4 * st.eta / 3, 4 * st.eta - eta2)
        checks.append(
            Check(
                "eta_prime_sandwich",
                "reflected barycenter sandwich 4 eta/3 < eta', eta'' < 4 eta",
                -worst,
                0.0,
                tolerance_for(_bar_err(work)),
            )
        )
    else:
        checks.append(na("eta_prime_sandwich", "reflected barycenter sandwich", "eps > 1/4"))

    # asymmetry splitting
    split_err = lam0_err + l1_err + l2_err + 2 * k_eta * _bar_err(work)
    if in_quarter and not degenerate:
        # |B Δ (B + v)| <= 2 k |v| per shifted ball, with |P'| = eta / |E+| exactly
        checks.append(
            Check(
                "lambda0_split_raw",
                "asymmetry splitting before absorbing eps",
                lam0,
                0.5 * (vol1 * l1 + vol2 * l2) + k_eta * (eta1 + eta2) + 2 * eps,
                tolerance_for(split_err),
            )
        )
        checks.append(
            Check(
                "lambda0_split_printed",
                "asymmetry splitting with the coefficient 4 k eta as printed",
                lam0,
                0.5 * (l1 + l2) + 4 * k_eta * st.eta + 2 * eps,
                tolerance_for(split_err),
                informational=True,
            )
        )
    else:
        checks.append(na("lambda0_split_raw", "asymmetry splitting before absorbing eps", "eps > 1/4"))
        checks.append(na("lambda0_split_printed", "asymmetry splitting as printed", "eps > 1/4", True))
    if not epsnotbad and not degenerate and not fixed:
        checks.append(
            Check(
                "lambda0_split",
                "asymmetry splitting lambda0(E) <= lambda0(E') + lambda0(E'') + c eta",
                lam0,
                l1 + l2 + 8 * k_eta * st.eta,
                tolerance_for(split_err),
            )
        )
    else:
        checks.append(na("lambda0_split", "asymmetry splitting", "requires eps < lambda0/8"))

    # perimeters and deficits
    checks.append(
        Check(
            "perimeter_split",
            "P(E') + P(E'') <= 2 P(E)",
            p1[0] + p2[0],
            2 * p_e[0],
            tolerance_for(p1[2] + p2[2] + 2 * p_e[2]),
        )
    )
    if in_quarter and not degenerate:
        pb = balls.perimeter_for_volume(n, 1.0)
        ball_pair = balls.perimeter_for_volume(n, vol1) + balls.perimeter_for_volume(n, vol2)
        bound = 2 * pb - 2 ** (3 + 1 / n) * n * omega(n) ** (1 / n) * (n - 1) / n**2 * eps**2
        checks.append(
            Check(
                "ball_perimeter_pair",
                "P(B') + P(B'') >= 2P(B) - c eps^2",
                bound,
                ball_pair,
                tolerance_for(_vol_err(e1) + _vol_err(e2)),
            )
        )
        raw_err = d1_err + d2_err + 2 * delta_err
        gap = (n - 1) / n**2 * eps**2
        checks.append(
            Check(
                "deficit_split_raw",
                "deficit splitting before the eps lemma, factor 2^((N-1)/N)",
                d1 + d2,
                2 ** ((n - 1) / n) * (2 * delta + 2 ** (3 + 1 / n) * gap),
                tolerance_for(raw_err),
            )
        )
        checks.append(
            Check(
                "deficit_split_printed",
                "deficit splitting before the eps lemma, factor 2^(-(N-1)/N)",
                d1 + d2,
                2 ** (1 / n) * delta + 2 ** (2 + 2 / n) * gap,
                tolerance_for(raw_err),
                informational=True,
                note="fails whenever delta(E') + delta(E'') is close to 2 delta(E)",
            )
        )
    else:
        checks.append(na("ball_perimeter_pair", "P(B') + P(B'') lower bound", "eps > 1/4"))
        checks.append(na("deficit_split_raw", "deficit splitting before the eps lemma", "eps > 1/4"))
        checks.append(na("deficit_split_printed", "deficit splitting before the eps lemma", "eps > 1/4", True))
    if not degenerate:
        checks.append(
            Check(
                "deficit_split",
                "deficit splitting delta(E') + delta(E'') <= C2^2 D^2 delta(E)",
                d1 + d2,
                c2**2 * D_eff**2 * delta,
                tolerance_for(d1_err + d2_err + c2**2 * D_eff**2 * delta_err),
            )
        )
    else:
        checks.append(na("deficit_split", "deficit splitting", "empty half"))

    # nested-ball triangle lemma on the Fraenkel ball
    if g_vol > 0 and not fixed:
        tri = trilem_check(G, H, H_tilde, q)
        checks += [tri.first, tri.second]
        d_prime = tri.D_prime
        section = tri.G_sym_H
        shift = tri.bar_distance
        sec_err = tri.first.tolerance
        checks.append(
            Check(
                "fraenkel_halfspace",
                "lambda(E) >= |G Δ H| >= (|G|/D') |bar G - bar H~|",
                g_vol / d_prime * shift,
                section,
                tri.second.tolerance,
            )
        )
        checks.append(
            Check(
                "fraenkel_halfspace_total",
                "lambda(E) >= |(E Δ B_F) ∩ halfspace|",
                section,
                fr.value,
                tolerance_for(lam0_err + sec_err),
            )
        )
        proj_lower = st.eta / g_vol
        checks.append(
            Check(
                "projection_bound",
                "|bar G - bar H~| >= eta/|G| under P^·F^ <= 0",
                proj_lower,
                shift,
                tolerance_for(_bar_err(work) / g_vol),
            )
        )
        if in_quarter:
            checks.append(Check("diameter_ratio", "D' <= 7 D", d_prime, 7 * D_eff, tolerance_for(_bar_err(work))))
        else:
            checks.append(na("diameter_ratio", "D' <= 7 D", "eps > 1/4"))
        for name, factor, note in (
            ("atlo_printed", 7.0, "factor 7 as printed in the source"),
            ("atlo_derived", 1 / 7.0, "factor 1/7 consistent with D' <= 7D"),
        ):
            checks.append(
                Check(
                    name,
                    "Fraenkel-ball barycenter bound with the diameter factor",
                    factor * g_vol / D_eff * shift,
                    cf * sqrt_delta,
                    tolerance_for(cf * _sqrt_err(delta, delta_err)),
                    informational=True,
                    note=note,
                )
            )
        checks.append(
            Check(
                "atlo_actual",
                "Fraenkel-ball barycenter bound with the measured D'",
                g_vol / d_prime * shift,
                cf * sqrt_delta,
                tolerance_for(cf * _sqrt_err(delta, delta_err)),
                informational=True,
                note="depends on the configured C_F",
            )
        )
    else:
        d_prime = math.nan
        for name in (
            "trilem_first",
            "trilem_second",
            "fraenkel_halfspace",
            "fraenkel_halfspace_total",
            "projection_bound",
            "diameter_ratio",
        ):
            checks.append(na(name, "nested-ball triangle lemma", "fixed point or empty half"))
        for name in ("atlo_printed", "atlo_derived", "atlo_actual"):
            checks.append(na(name, "Fraenkel-ball barycenter bound", "fixed point or empty half", True))

    # final combination with both readings of the factor 7
    l_tilde = l1 if chosen == E_PRIME else l2
    if not epsnotbad and not degenerate and not fixed:
        for name, coeff, note in (
            ("abouttoend_printed", 8 * k_eta / 7, "coefficient 8 w_{N-1} / (7 w_N^{(N-1)/N}) as printed"),
            ("abouttoend_alt", 56 * k_eta, "coefficient with the factor 7 in the numerator"),
        ):
            checks.append(
                Check(
                    name,
                    "lambda0(E) <= 2 lambda0(E~) + c D C_F sqrt(delta)",
                    lam0,
                    2 * l_tilde + coeff * D_eff * cf * sqrt_delta,
                    tolerance_for(split_err),
                    informational=True,
                    note=note,
                )
            )
    else:
        for name in ("abouttoend_printed", "abouttoend_alt"):
            checks.append(na(name, "final combination", "requires eps < lambda0/8", True))

    def bar_tuple(b):
        return tuple(float(x) for x in b)

    return SymmetrizationStep(
        axis=axis,
        branch=branch,
        split=st,
        input=s,
        E_prime=e1,
        E_dprime=e2,
        chosen=chosen,
        D=D,
        D_eff=D_eff,
        P_prime=bar_tuple(bar1),
        P_dprime=bar_tuple(bar2),
        eta_prime=eta1,
        eta_dprime=eta2,
        volumes={"E": volume(work, q), "E_prime": vol1, "E_dprime": vol2},
        perimeters={"E": p_e[0], "E_prime": p1[0], "E_dprime": p2[0]},
        deltas={"E": delta, "E_prime": d1, "E_dprime": d2},
        lambdas={"E": lam0, "E_prime": l1, "E_dprime": l2},
        fraenkel={"lambda": fr.value, "center": list(fr.center), "epsilon_f": fr.epsilon_f,
                  "evaluations": fr.evaluations, "budget_exhausted": fr.budget_exhausted},
        side=side,
        B_hat_radius=rho,
        D_prime=d_prime,
        checks=checks,
        errors={"delta": delta_err, "lambda0": lam0_err, "barycenter": _bar_err(work)},
    )


def eta_inequality_slack(step: SymmetrizationStep) -> float | None:
    """RHS - LHS of the asymmetry splitting bound; None outside its regime."""
    return step.check("lambda0_split").slack if step.check("lambda0_split").applicable else None


def deficit_split_slack(step: SymmetrizationStep, constants: ConstantsTable | None = None) -> float | None:
    """C2^2 D^2 delta(E) - (delta(E') + delta(E'')); None for an empty half.

    With ``constants`` given, the bound is re-evaluated with its C2.
    """
    c = step.check("deficit_split")
    if not c.applicable:
        return None
    if constants is None:
        return c.slack
    return constants.c2**2 * step.D_eff**2 * step.deltas["E"] - c.lhs


# ---------------------------------------------------------------- full run


@dataclass
class SymmetrizationTrace:
    steps: list[SymmetrizationStep]
    final: Body = field(repr=False)
    config: dict
    final_defect: float
    normalization: dict

    @property
    def checks(self) -> list[Check]:
        return [c for st in self.steps for c in st.checks]

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "normalization": self.normalization,
            "steps": [st.to_dict() for st in self.steps],
            "final_symmetry_defect": self.final_defect,
        }


def symmetrize_full(
    s: Body, constants: ConstantsTable, opts: SymmetrizationOptions = SymmetrizationOptions()
) -> SymmetrizationTrace:
    """Apply the step along axes 0..N-1, renormalizing between steps."""
    q = opts.quadrature
    nz = normalize(s)
    current = nz.shape
    steps: list[SymmetrizationStep] = []
    done: tuple[int, ...] = ()
    for axis in range(s.dim):
        step = symmetrize_step(current, axis, constants, opts, symmetric_axes=done)
        steps.append(step)
        done = done + (axis,)
        current = normalize(step.E_tilde).shape
    defect = symmetry_defect(current, range(s.dim), q)
    return SymmetrizationTrace(
        steps=steps,
        final=current,
        config=constants.to_dict(),
        final_defect=defect,
        normalization={"scale": nz.scale, "shift": [float(x) for x in nz.shift]},
    )
