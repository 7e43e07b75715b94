"""
Elastica curves service module.

Critical curves of the boundary energy F[C] = int (kappa + mu)^2 + lambda ds
reduce to quadratures through the first integrals (d, e):

    4 kappa'^2 = Q(kappa) = d - (kappa^2 - c)^2 - e^2 / (4 (kappa + mu)^2)
    4 tau (kappa + mu)^2 = e,      c = lambda + mu^2

The curvature oscillates between the two simple roots kappa_min < kappa_max
of Q. Writing kappa = kappa_max - (kappa_max - kappa_min) sin^2(psi) removes
the square-root endpoint singularity: ds = 4 dpsi / sqrt(g(kappa)) with g the
deflated radicand, and one period is psi in [0, pi].
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from scipy.integrate import quad, solve_ivp, trapezoid
from scipy.optimize import bisect, brentq

from app.config.settings import Settings, get_settings
from app.core.exceptions import (
    ClosedCurveNotFoundError,
    DegenerateRadiusError,
    EquilibriumError,
    GcdError,
    NoOscillationError,
    NumericalError,
    PreconditionError,
    SingularTorsionError,
)
from app.interfaces.elastica_curves import IElasticaCurveService
from app.schemas.geometry import ClosureDefects, CurvatureProfile, SampledCurve
from app.schemas.params import CurveParams, EnergyParams, FirstIntegrals, SearchBox
from app.schemas.reports import ClosedCurveReport

logger = logging.getLogger(__name__)

CLOSED_GAP_RELATIVE = 1e-5
ODE_RTOL = 1e-12
ODE_ATOL = 1e-14


@dataclass(frozen=True)
class Oscillation:
    """Root pair of the radicand and the deflated factor g > 0 between them."""

    params: CurveParams
    integrals: FirstIntegrals
    kappa_min: float
    kappa_max: float
    deflated: Polynomial

    @property
    def amplitude(self) -> float:
        return self.kappa_max - self.kappa_min

    def kappa(self, psi):
        return self.kappa_max - self.amplitude * np.sin(psi) ** 2

    def g(self, kappa):
        shifted = kappa + self.params.mu
        return -self.deflated(kappa) / (4.0 * shifted**2)

    def ds_dpsi(self, psi):
        return 4.0 / np.sqrt(self.g(self.kappa(psi)))

    def dpsi_ds(self, psi):
        return 0.25 * np.sqrt(self.g(self.kappa(psi)))

    def kappa_prime(self, psi):
        k = self.kappa(psi)
        return -0.5 * self.amplitude * np.sin(psi) * np.cos(psi) * np.sqrt(self.g(k))

    def half_period_integral(self, integrand: Callable[[np.ndarray], np.ndarray]) -> float:
        """int over one period of integrand(kappa) ds, using the half-period symmetry."""
        value, _ = quad(
            lambda psi: integrand(self.kappa(psi)) * self.ds_dpsi(psi),
            0.0,
            np.pi / 2.0,
            epsabs=0.0,
            epsrel=1e-13,
            limit=200,
        )
        return 2.0 * value


def kabsch_gap(reference: np.ndarray, moving: np.ndarray) -> float:
    """Max pointwise distance after the best rigid motion of ``moving`` onto ``reference``."""
    ca = reference.mean(axis=0)
    cb = moving.mean(axis=0)
    H = (moving - cb).T @ (reference - ca)
    U, _, Vt = np.linalg.svd(H)
    sign = np.sign(np.linalg.det(Vt.T @ U.T)) or 1.0
    R = Vt.T @ np.diag([1.0, 1.0, sign]) @ U.T
    aligned = (moving - cb) @ R.T + ca
    return float(np.max(np.linalg.norm(reference - aligned, axis=1)))


def _tile_periodic(values: np.ndarray, periods: int) -> np.ndarray:
    """Repeat one sampled period (with duplicated endpoint) ``periods`` times."""
    body = [values[:-1]] * periods
    return np.concatenate(body + [values[-1:]], axis=0)


def _accumulate_periods(values: np.ndarray, periods: int) -> np.ndarray:
    """Continue a quantity that advances by values[-1] each period."""
    body = [values[:-1] + k * values[-1] for k in range(periods)]
    return np.concatenate(body + [[periods * values[-1]]])


class ElasticaCurveService(IElasticaCurveService):
    """
    Concrete implementation of the boundary elastica operations.

    Numerical resolutions come from ``Settings``: samples per period, the
    root-scan grid, root tolerance and the closure tolerance.
    """

    def __init__(self, settings: Optional[Settings] = None) -> None:
        self.settings = settings or get_settings()

    def radicand(self, kappa, params: CurveParams, integrals: FirstIntegrals):
        """
        Evaluate Q(kappa).

        Raises:
            SingularTorsionError: If kappa = -mu while e != 0.
        """
        shifted = np.asarray(kappa, dtype=float) + params.mu
        if integrals.e != 0 and np.any(shifted == 0):
            raise SingularTorsionError("radicand is singular at kappa = -mu when e != 0")
        core = integrals.d - (np.asarray(kappa) ** 2 - params.circle_kappa_sq) ** 2
        if integrals.e == 0:
            return core if np.ndim(core) else float(core)
        value = core - integrals.e**2 / (4.0 * shifted**2)
        return value if np.ndim(value) else float(value)

    def torsion_from_curvature(self, kappa, params: CurveParams, integrals: FirstIntegrals):
        if integrals.e == 0:
            return 0.0 if np.ndim(kappa) == 0 else np.zeros_like(np.asarray(kappa, dtype=float))
        shifted = np.asarray(kappa, dtype=float) + params.mu
        if np.any(shifted == 0):
            raise SingularTorsionError("torsion is singular at kappa = -mu")
        tau = integrals.e / (4.0 * shifted**2)
        return tau if np.ndim(tau) else float(tau)

    def oscillation(self, params: CurveParams, integrals: FirstIntegrals) -> Oscillation:
        """
        Bracket and refine the radicand roots, then deflate the radicand polynomial.

        Raises:
            NoOscillationError: If Q has no positive interval starting above max(0, -mu).
            SingularTorsionError: If -mu lies between the roots with e != 0.
            DegenerateRadiusError: If 4 d (kappa+mu)^2 - e^2 <= 0 on the interval.
        """
        d, e, mu = integrals.d, integrals.e, params.mu
        c = params.circle_kappa_sq
        if d <= 0:
            raise NoOscillationError("d = 0 is the circle branch; use circle_solution")

        upper = 1.05 * math.sqrt(c + math.sqrt(d))
        lower = max(0.0, -mu)
        lower += 1e-9 * max(upper, 1.0)
        grid = np.linspace(lower, upper, self.settings.root_scan_points)
        with np.errstate(divide="ignore", invalid="ignore"):
            Q = self.radicand(grid, params, integrals)
        Q = np.where(np.isfinite(Q), Q, -np.inf)
        positive = Q > 0
        if positive[0]:
            raise NoOscillationError(
                f"radicand is positive at kappa = {lower:.6g}; "
                "curvature does not stay above max(0, -mu)"
            )
        starts = np.flatnonzero(~positive[:-1] & positive[1:])
        ends = np.flatnonzero(positive[:-1] & ~positive[1:])
        if len(starts) == 0 or len(ends) == 0:
            raise NoOscillationError(f"radicand has no positive interval for d={d}, e={e}")
        if len(starts) > 1:
            logger.debug(f"Radicand has {len(starts)} positive intervals; using the first")
        i0 = int(starts[0])
        j0 = int(ends[ends > i0][0])

        def q_scalar(k: float) -> float:
            return float(self.radicand(k, params, integrals))

        tol = self.settings.root_tolerance
        kappa_min = bisect(q_scalar, grid[i0], grid[i0 + 1], xtol=tol)
        kappa_max = bisect(q_scalar, grid[j0], grid[j0 + 1], xtol=tol)

        if e != 0 and kappa_min < -mu < kappa_max:
            raise SingularTorsionError("-mu lies inside the curvature oscillation interval")
        for k in (kappa_min, kappa_max):
            if 4.0 * d * (k + mu) ** 2 - e**2 <= 0:
                raise DegenerateRadiusError()

        k = Polynomial([0.0, 1.0])
        shifted = k + mu
        P = 4.0 * d * shifted**2 - 4.0 * shifted**2 * (k**2 - c) ** 2 - e**2
        deflated = P // Polynomial.fromroots([kappa_min, kappa_max])
        logger.debug(f"Oscillation for d={d}, e={e}: kappa in [{kappa_min:.12g}, {kappa_max:.12g}]")
        return Oscillation(params, integrals, float(kappa_min), float(kappa_max), deflated)

    def curvature_profile(
        self,
        params: CurveParams,
        integrals: FirstIntegrals,
        n_samples: Optional[int] = None,
    ) -> CurvatureProfile:
        """
        Sample one period of kappa(s) uniformly in arclength.

        Args:
            params: Curve energy parameters.
            integrals: First integrals with d > 0.
            n_samples: Samples per period; defaults to the configured value.

        Returns:
            Profile with n_samples + 1 samples, kappa(0) = kappa_max.
        """
        n = n_samples or self.settings.n_samples_per_period
        osc = self.oscillation(params, integrals)
        period = osc.half_period_integral(lambda kappa: np.ones_like(kappa))
        half = period / 2.0

        sol = solve_ivp(
            lambda s, y: [osc.dpsi_ds(y[0])],
            (0.0, half),
            [0.0],
            method="DOP853",
            rtol=ODE_RTOL,
            atol=ODE_ATOL,
            dense_output=True,
        )
        if not sol.success:
            raise NumericalError(f"curvature ODE failed: {sol.message}")

        def psi_at(s):
            s = np.mod(np.asarray(s, dtype=float), period)
            mirrored = s > half
            base = np.where(mirrored, period - s, s)
            psi = np.atleast_1d(sol.sol(np.atleast_1d(base))[0])
            return np.where(mirrored, np.pi - psi, psi)

        def kappa_at(s):
            return osc.kappa(psi_at(s))

        def kappa_prime_at(s):
            return osc.kappa_prime(psi_at(s))

        s = np.linspace(0.0, period, n + 1)
        kappa = kappa_at(s)
        kappa[0] = kappa[-1] = osc.kappa_max
        logger.debug(f"Curvature profile: period={period:.12g}, samples={n + 1}")
        return CurvatureProfile(
            params=params,
            integrals=integrals,
            s=s,
            kappa=kappa,
            kappa_prime=kappa_prime_at(s),
            period=float(period),
            kappa_min=osc.kappa_min,
            kappa_max=osc.kappa_max,
            kappa_at=kappa_at,
            kappa_prime_at=kappa_prime_at,
            oscillation=osc,
        )

    def circle_solution(self, params: CurveParams) -> Tuple[float, float]:
        kappa = math.sqrt(params.circle_kappa_sq)
        return kappa, 1.0 / kappa

    def circle_curve(self, params: CurveParams, n_samples: Optional[int] = None) -> SampledCurve:
        """Critical circle in the plane z = 0, counter-clockwise, with duplicated endpoint."""
        n = n_samples or self.settings.n_samples_per_period
        kappa, radius = self.circle_solution(params)
        t = np.linspace(0.0, 2.0 * np.pi, n + 1)
        c, s = np.cos(t), np.sin(t)
        zeros = np.zeros_like(t)
        return SampledCurve(
            points=np.column_stack([radius * c, radius * s, zeros]),
            tangents=np.column_stack([-s, c, zeros]),
            normals=np.column_stack([-c, -s, zeros]),
            binormals=np.column_stack([zeros, zeros, np.ones_like(t)]),
            kappa=np.full_like(t, kappa),
            tau=zeros.copy(),
            arclength_step=2.0 * np.pi * radius / n,
            closed=True,
            kappa_prime=zeros.copy(),
            reconstruction_gap=0.0,
        )

    def _oscillation_of(self, profile: CurvatureProfile) -> Oscillation:
        if isinstance(profile.oscillation, Oscillation):
            return profile.oscillation
        return self.oscillation(profile.params, profile.integrals)

    def closure_defects(self, profile: CurvatureProfile) -> ClosureDefects:
        """
        Delta z = int (kappa^2 - c) ds and
        Delta theta = e sqrt(d) int (kappa^2 - c) / (4 d (kappa+mu)^2 - e^2) ds
        over one period.

        The reconstructed curve advances by Delta z / sqrt(d) along the axis and
        turns by Delta theta about it; theta is measured so that positive e gives
        positive Frenet torsion.
        """
        return self._defects(self._oscillation_of(profile))

    def _defects(self, osc: Oscillation) -> ClosureDefects:
        params, integrals = osc.params, osc.integrals
        c = params.circle_kappa_sq
        d, e, mu = integrals.d, integrals.e, params.mu
        delta_z = osc.half_period_integral(lambda kappa: kappa**2 - c)
        if e == 0:
            return ClosureDefects(delta_z=delta_z, delta_theta=0.0)
        integral = osc.half_period_integral(
            lambda kappa: (kappa**2 - c) / (4.0 * d * (kappa + mu) ** 2 - e**2)
        )
        return ClosureDefects(delta_z=delta_z, delta_theta=e * math.sqrt(d) * integral)

    def defects_at(self, params: CurveParams, d: float, e: float) -> ClosureDefects:
        """Closure defects for given first integrals without sampling a profile."""
        return self._defects(self.oscillation(params, FirstIntegrals(d=d, e=e)))

    def _solve_d(
        self,
        params: CurveParams,
        e: float,
        box: SearchBox,
        d_hint: Optional[float] = None,
    ) -> Optional[float]:
        """Root of delta_z(., e) on the box's d-grid, nearest ``d_hint`` when several exist."""
        grid = np.linspace(box.d_min, box.d_max, box.d_points)
        values = np.full(len(grid), np.nan)
        for i, d in enumerate(grid):
            try:
                values[i] = self.defects_at(params, float(d), e).delta_z
            except NumericalError:
                continue

        brackets = [
            i
            for i in range(len(grid) - 1)
            if np.isfinite(values[i])
            and np.isfinite(values[i + 1])
            and values[i] * values[i + 1] <= 0
        ]
        if not brackets:
            return None
        if d_hint is not None:
            brackets.sort(key=lambda i: abs(0.5 * (grid[i] + grid[i + 1]) - d_hint))

        for i in brackets:
            try:
                return float(
                    brentq(
                        lambda d: self.defects_at(params, d, e).delta_z,
                        grid[i],
                        grid[i + 1],
                        xtol=1e-15,
                        maxiter=200,
                    )
                )
            except (NumericalError, ValueError) as err:
                logger.debug(f"delta_z bracket [{grid[i]:.6g}, {grid[i + 1]:.6g}] rejected: {err}")
        return None

    def find_closed_curve(
        self,
        params: CurveParams,
        q: int,
        p: int,
        search_box: Optional[SearchBox] = None,
    ) -> FirstIntegrals:
        """
        Shoot for first integrals whose curve closes as a (q, p) torus knot.

        For each e on a grid the axial defect is zeroed in d; the resulting
        one-parameter family is then bisected in e until the angular defect
        equals 2 pi p / q.

        Args:
            params: Curve energy parameters.
            q: Number of curvature periods per closed curve.
            p: Number of turns around the rotation axis.
            search_box: (d, e) search region.

        Returns:
            First integrals (d, e) of the closed curve.

        Raises:
            GcdError: If p and q are not coprime.
            ClosedCurveNotFoundError: If 2 pi p / q is outside the reachable range.
        """
        self._check_winding(q, p)
        if q <= 2 * p:
            logger.warning(f"q={q} <= 2p={2 * p}: outside the embedded regime, searching anyway")
        box = search_box or SearchBox()
        target = 2.0 * math.pi * p / q

        try:
            logger.info(f"Searching closed ({q},{p}) curve for mu={params.mu}, lambda={params.lam}")
            family: List[Tuple[float, float, float]] = []
            for e in np.linspace(box.e_min, box.e_max, box.e_points):
                d_star = self._solve_d(params, float(e), box)
                if d_star is None:
                    continue
                theta = self.defects_at(params, d_star, float(e)).delta_theta
                family.append((float(e), d_star, theta))
                logger.debug(f"e={e:.6g}: d*={d_star:.12g}, dtheta={theta:.12g}")

            if not family:
                raise ClosedCurveNotFoundError(
                    "no zero of delta_z found anywhere in the search box", scanned_range=None
                )
            thetas = np.array([t for _, _, t in family])
            scanned = (float(thetas.min()), float(thetas.max()))

            for orientation in (1.0, -1.0):
                goal = orientation * target
                for (e0, d0, t0), (e1, d1, t1) in zip(family[:-1], family[1:]):
                    if (t0 - goal) * (t1 - goal) > 0:
                        continue
                    e_star, d_star = self._bisect_family(params, box, goal, e0, d0, e1, d1)
                    # the angular defect is odd in e
                    integrals = FirstIntegrals(d=d_star, e=orientation * e_star)
                    self._verify_closure(params, integrals, target)
                    logger.info(
                        f"Closed ({q},{p}) curve: d={integrals.d:.15g}, e={integrals.e:.15g}"
                    )
                    return integrals

            raise ClosedCurveNotFoundError(
                f"target dtheta={target:.6g} outside scanned range "
                f"[{scanned[0]:.6g}, {scanned[1]:.6g}]",
                scanned_range=scanned,
            )
        except EquilibriumError:
            raise
        except Exception as e:
            logger.exception(f"Closed-curve search failed: {e}")
            raise NumericalError(f"closed-curve search failed: {e}") from e

    def _bisect_family(
        self,
        params: CurveParams,
        box: SearchBox,
        goal: float,
        e0: float,
        d0: float,
        e1: float,
        d1: float,
    ) -> Tuple[float, float]:
        solved = {}

        def mismatch(e: float) -> float:
            hint = d0 + (d1 - d0) * (e - e0) / (e1 - e0) if e1 != e0 else d0
            d_star = self._solve_d(params, e, box, d_hint=hint)
            if d_star is None:
                raise ClosedCurveNotFoundError(f"lost the delta_z = 0 branch at e={e:.12g}")
            solved[e] = d_star
            return self.defects_at(params, d_star, e).delta_theta - goal

        e_star = brentq(mismatch, e0, e1, xtol=1e-15, maxiter=200)
        d_star = solved.get(e_star)
        if d_star is None:
            mismatch(e_star)
            d_star = solved[e_star]
        return float(e_star), float(d_star)

    def _verify_closure(
        self, params: CurveParams, integrals: FirstIntegrals, target: float
    ) -> None:
        osc = self.oscillation(params, integrals)
        defects = self._defects(osc)
        period = osc.half_period_integral(lambda kappa: np.ones_like(kappa))
        tol = self.settings.closure_tolerance
        if abs(defects.delta_z) >= tol * period or abs(defects.delta_theta - target) >= tol:
            raise ClosedCurveNotFoundError(
                f"closure tolerance missed: dz={defects.delta_z:.3e}, "
                f"dtheta-target={defects.delta_theta - target:.3e}"
            )

    def _check_winding(self, q: int, p: int) -> None:
        if p < 1 or q < 1:
            raise PreconditionError(f"winding numbers must be positive, got p={p}, q={q}")
        if math.gcd(p, q) != 1:
            raise GcdError(p, q)
        if q > self.settings.max_winding:
            raise PreconditionError(
                f"q={q} exceeds the configured winding cap {self.settings.max_winding}"
            )

    def reconstruct_curve(
        self,
        profile: CurvatureProfile,
        periods: int = 1,
        cross_check: bool = True,
    ) -> SampledCurve:
        """
        Build the curve on its rotational torus in cylindrical coordinates.

        r^2 = (4 d (kappa+mu)^2 - e^2) / d^2, z' = (kappa^2 - c) / sqrt(d) and
        theta' = e sqrt(d) (kappa^2 - c) / (4 d (kappa+mu)^2 - e^2), so one period
        moves Delta z / sqrt(d) along the axis and turns by Delta theta. The
        binormal is the rotation field -sqrt(d) d/dtheta + (e / sqrt(d)) d/dz over
        2 (kappa + mu); with this orientation the Frenet torsion is e / 4 (kappa+mu)^2.
        The frame is analytic; with ``cross_check`` the Frenet system is
        integrated as well and the aligned pointwise gap is stored on the result.

        Raises:
            DegenerateRadiusError: If the radius vanishes on the profile.
        """
        if periods < 1:
            raise PreconditionError("periods must be at least 1")
        params, integrals = profile.params, profile.integrals
        d, e, mu = integrals.d, integrals.e, params.mu
        c = params.circle_kappa_sq
        sqrt_d = math.sqrt(d)

        def rates(s, y):
            kappa = float(profile.kappa_at(s)[0])
            dz = (kappa**2 - c) / sqrt_d
            dtheta = e * sqrt_d * (kappa**2 - c) / (4.0 * d * (kappa + mu) ** 2 - e**2)
            return [dz, dtheta]

        sol = solve_ivp(
            rates,
            (0.0, profile.period),
            [0.0, 0.0],
            method="DOP853",
            t_eval=profile.s,
            rtol=ODE_RTOL,
            atol=ODE_ATOL,
        )
        if not sol.success:
            raise NumericalError(f"cylindrical reconstruction failed: {sol.message}")
        z_one, theta_one = sol.y
        z_one[0] = theta_one[0] = 0.0

        n = len(profile.s) - 1
        z = _accumulate_periods(z_one, periods)
        theta = _accumulate_periods(theta_one, periods)
        kappa = _tile_periodic(profile.kappa, periods)
        kappa_prime = _tile_periodic(profile.kappa_prime, periods)

        radicand_r = 4.0 * d * (kappa + mu) ** 2 - e**2
        if np.any(radicand_r <= 0):
            raise DegenerateRadiusError()
        r = np.sqrt(radicand_r) / d
        dr = 4.0 * (kappa + mu) * kappa_prime / (d * r)
        dz = (kappa**2 - c) / sqrt_d
        dtheta = e * sqrt_d * (kappa**2 - c) / radicand_r

        e_r = np.column_stack([np.cos(theta), np.sin(theta), np.zeros_like(theta)])
        e_t = np.column_stack([-np.sin(theta), np.cos(theta), np.zeros_like(theta)])
        e_z = np.tile([0.0, 0.0, 1.0], (len(theta), 1))

        points = r[:, None] * e_r + z[:, None] * e_z
        T = dr[:, None] * e_r + (r * dtheta)[:, None] * e_t + dz[:, None] * e_z
        T /= np.linalg.norm(T, axis=1, keepdims=True)
        B = ((-sqrt_d * r)[:, None] * e_t + (e / sqrt_d) * e_z) / (2.0 * (kappa + mu))[:, None]
        B -= np.sum(B * T, axis=1, keepdims=True) * T
        B /= np.linalg.norm(B, axis=1, keepdims=True)
        N = np.cross(B, T)
        tau = np.asarray(self.torsion_from_curvature(kappa, params, integrals), dtype=float)
        tau = np.broadcast_to(tau, kappa.shape).copy()

        step = profile.period / n
        length = float(periods * profile.period)
        gap = float(np.linalg.norm(points[0] - points[-1]))
        curve = SampledCurve(
            points=points,
            tangents=T,
            normals=N,
            binormals=B,
            kappa=kappa,
            tau=tau,
            arclength_step=step,
            closed=gap < CLOSED_GAP_RELATIVE * length,
            kappa_prime=kappa_prime,
        )
        if not cross_check:
            return curve

        frenet = self.frenet_integrate(profile, periods, curve)
        reconstruction_gap = kabsch_gap(points, frenet)
        logger.info(
            f"Reconstructed {periods} period(s): length={length:.10g}, endpoint gap={gap:.3e}, "
            f"Frenet gap={reconstruction_gap:.3e}"
        )
        return SampledCurve(
            points=points,
            tangents=T,
            normals=N,
            binormals=B,
            kappa=kappa,
            tau=tau,
            arclength_step=step,
            closed=curve.closed,
            kappa_prime=kappa_prime,
            reconstruction_gap=reconstruction_gap,
        )

    def frenet_integrate(
        self,
        profile: CurvatureProfile,
        periods: int,
        start: SampledCurve,
    ) -> np.ndarray:
        """Integrate the Frenet-Serret system from the start frame."""
        params, integrals = profile.params, profile.integrals
        mu, e = params.mu, integrals.e

        def rhs(s, y):
            kappa = float(profile.kappa_at(s)[0])
            tau = 0.0 if e == 0 else e / (4.0 * (kappa + mu) ** 2)
            T, N, B = y[3:6], y[6:9], y[9:12]
            return np.concatenate([T, kappa * N, -kappa * T + tau * B, -tau * N])

        y0 = np.concatenate(
            [start.points[0], start.tangents[0], start.normals[0], start.binormals[0]]
        )
        s_eval = np.arange(start.n_samples) * start.arclength_step
        s_eval[-1] = min(s_eval[-1], periods * profile.period)
        sol = solve_ivp(
            rhs,
            (0.0, periods * profile.period),
            y0,
            method="DOP853",
            t_eval=s_eval,
            rtol=1e-11,
            atol=1e-13,
        )
        if not sol.success:
            raise NumericalError(f"Frenet integration failed: {sol.message}")
        return sol.y[:3].T

    def el_residual_curve(self, curve: SampledCurve, params: CurveParams) -> float:
        """
        max |J'| / (max |J| + |lambda|) with J = (kappa^2 - c) T + 2 kappa' N + 2 tau (kappa+mu) B.
        """
        h = curve.arclength_step
        kappa = curve.kappa
        if curve.kappa_prime is not None:
            kappa_prime = curve.kappa_prime
        else:
            kappa_prime = np.gradient(kappa, h, edge_order=2)
        J = (
            (kappa**2 - params.circle_kappa_sq)[:, None] * curve.tangents
            + (2.0 * kappa_prime)[:, None] * curve.normals
            + (2.0 * curve.tau * (kappa + params.mu))[:, None] * curve.binormals
        )
        dJ = np.gradient(J, h, axis=0, edge_order=2)
        scale = float(np.max(np.linalg.norm(J, axis=1))) + abs(params.lam)
        if scale == 0:
            return 0.0
        return float(np.max(np.linalg.norm(dJ, axis=1)) / scale)

    def genus_bound(self, q: int, p: int) -> int:
        if p < 1 or q < 1:
            raise PreconditionError(f"winding numbers must be positive, got p={p}, q={q}")
        if math.gcd(p, q) != 1:
            raise GcdError(p, q)
        return ((p - 1) * (q - 1) + 1) // 2

    def curve_energy(self, curve: SampledCurve, params: CurveParams) -> float:
        """int (kappa + mu)^2 + lambda ds over the sampled curve."""
        density = (curve.kappa + params.mu) ** 2 + params.lam
        if curve.closed:
            m = len(curve.loop_points())
            return float(np.sum(density[:m]) * curve.arclength_step)
        return float(trapezoid(density, dx=curve.arclength_step))

    def contact_angle_parameters(self, params: EnergyParams, mu_sign: int = 1) -> CurveParams:
        """(mu, lambda) of the boundary curve for the contact angle selected by ``mu_sign``."""
        return CurveParams.from_energy(params, mu_sign)

    def first_integral_drift(
        self,
        curve: SampledCurve,
        params: CurveParams,
        integrals: FirstIntegrals,
    ) -> Tuple[float, float]:
        """Relative drift of d and e recomputed from the sampled curve data."""
        kappa = curve.kappa
        kappa_prime = (
            curve.kappa_prime
            if curve.kappa_prime is not None
            else np.gradient(kappa, curve.arclength_step, edge_order=2)
        )
        shifted = kappa + params.mu
        d_samples = (
            4.0 * kappa_prime**2
            + (kappa**2 - params.circle_kappa_sq) ** 2
            + 4.0 * curve.tau**2 * shifted**2
        )
        e_samples = 4.0 * curve.tau * shifted**2
        d_drift = float(np.max(np.abs(d_samples - integrals.d)) / max(integrals.d, 1e-300))
        e_scale = max(abs(integrals.e), integrals.d, 1e-300)
        e_drift = float(np.max(np.abs(e_samples - integrals.e)) / e_scale)
        return d_drift, e_drift

    def solve_closed_curve(
        self,
        params: CurveParams,
        q: int,
        p: int,
        search_box: Optional[SearchBox] = None,
    ) -> Tuple[ClosedCurveReport, SampledCurve]:
        """Search, reconstruct over q periods and report a closed (q, p) curve."""
        integrals = self.find_closed_curve(params, q, p, search_box)
        profile = self.curvature_profile(params, integrals)
        defects = self.closure_defects(profile)
        curve = self.reconstruct_curve(profile, periods=q)
        residual = self.el_residual_curve(curve, params)
        report = ClosedCurveReport(
            mu=params.mu,
            lam=params.lam,
            p=p,
            q=q,
            d=integrals.d,
            e=integrals.e,
            period=profile.period,
            length=q * profile.period,
            defects={"dz": defects.delta_z, "dtheta": defects.delta_theta},
            residual=residual,
        )
        return report, curve
