"""Evaluatable immersions of the plane into round spheres, built from
frequency/weight data. Every coordinate plane carries a circle
c*(cos<w,p>, sin<w,p>), so all partial derivatives are exact trig forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError
from .parameters import (
    MiyataData,
    lift_structure,
    structure_params,
    t_of_s,
    rho_tilde_of,
    unit_circle,
    validate_miyata,
    _min_pm_distance,
)


class ConstructionError(RuntimeError):
    """A frequency-extension search exhausted its schedule."""


@dataclass(frozen=True, eq=False)
class Immersion:
    """Unit-sphere valued map with one frequency per coordinate plane.

    Plane i occupies coordinates (2i, 2i+1); the first m planes are the
    low-frequency (|w| = sqrt(lambda1)) blocks. Immutable; eval/partial are
    pure and accept batched points of shape (..., 2).
    """

    data: MiyataData
    wave_vectors: np.ndarray  # (K, 2)
    amplitudes: np.ndarray  # (K,)

    @property
    def m(self) -> int:
        return self.data.m

    @property
    def num_planes(self) -> int:
        return len(self.amplitudes)

    @property
    def ambient_dim(self) -> int:
        return 2 * self.num_planes

    def _phases(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != 2:
            raise ValueError("points must have shape (..., 2)")
        return p @ self.wave_vectors.T

    def _assemble(self, cos_part, sin_part) -> np.ndarray:
        out = np.empty(cos_part.shape[:-1] + (self.ambient_dim,))
        out[..., 0::2] = cos_part
        out[..., 1::2] = sin_part
        return out

    def eval(self, p) -> np.ndarray:
        """psi(p); |psi| = 1 identically."""
        theta = self._phases(p)
        return self._assemble(self.amplitudes * np.cos(theta), self.amplitudes * np.sin(theta))

    def partial(self, p, ax: tuple[int, int]) -> np.ndarray:
        """Exact partial derivative of order ax = (a, b), a+b <= 4.

        Each derivative in x multiplies a plane by its w_1 and advances the
        phase by pi/2 (likewise w_2 for y), so the result is again a closed
        trig form, never a difference quotient.
        """
        a, b = ax
        if a < 0 or b < 0 or a + b > 4:
            raise DomainError("unsupported derivative order %r (|ax| must be <= 4)" % (ax,))
        theta = self._phases(p) + (a + b) * (math.pi / 2)
        factor = (
            self.amplitudes
            * self.wave_vectors[:, 0] ** a
            * self.wave_vectors[:, 1] ** b
        )
        return self._assemble(factor * np.cos(theta), factor * np.sin(theta))

    def partial_table(self, p, max_order: int = 4) -> dict[tuple[int, int], np.ndarray]:
        """All partials up to total order max_order, keyed by (a, b)."""
        if max_order > 4:
            raise DomainError("unsupported derivative order %d" % max_order)
        theta = self._phases(p)
        table = {}
        for a in range(max_order + 1):
            for b in range(max_order + 1 - a):
                shifted = theta + (a + b) * (math.pi / 2)
                factor = (
                    self.amplitudes
                    * self.wave_vectors[:, 0] ** a
                    * self.wave_vectors[:, 1] ** b
                )
                table[(a, b)] = self._assemble(factor * np.cos(shifted), factor * np.sin(shifted))
        return table

    def spectral_split(self, p) -> tuple[np.ndarray, np.ndarray]:
        """(psi_t1, psi_t2): low/high frequency blocks, zero-padded to full
        ambient dimension. psi_t1 + psi_t2 = eval(p)."""
        full = self.eval(p)
        t1 = np.zeros_like(full)
        t1[..., : 2 * self.m] = full[..., : 2 * self.m]
        t2 = full - t1
        return t1, t2


def build(data: MiyataData, validate: bool = True) -> Immersion:
    """Assemble the frequency table from admissible data.

    For a unit frequency z at level lambda the wave vector is
    sqrt(lambda)*(Im z, Re z); amplitudes are sqrt(weight/2), so the squared
    amplitudes sum to one.
    """
    if validate:
        report = validate_miyata(data)
        if not report.passed:
            failing = ", ".join(c.name for c in report.failures())
            raise ValueError("invalid immersion data (%s)" % failing)
    rows = []
    amps = []
    for z, w in zip(data.mu, data.r_weights):
        rows.append((math.sqrt(data.lambda1) * z.imag, math.sqrt(data.lambda1) * z.real))
        amps.append(math.sqrt(w / 2.0))
    for z, w in zip(data.eta, data.rp_weights):
        rows.append((math.sqrt(data.lambda2) * z.imag, math.sqrt(data.lambda2) * z.real))
        amps.append(math.sqrt(w / 2.0))
    return Immersion(
        data=data,
        wave_vectors=np.array(rows, dtype=float),
        amplitudes=np.array(amps, dtype=float),
    )


def from_structure(h: float, rho: float) -> Immersion:
    """Six-dimensional ambient immersion of the structure family."""
    return build(lift_structure(structure_params(h, rho)))


def symmetric_weights_data(h: float) -> MiyataData:
    """The equal-weight family member: R' = (1/2, 1/2), eta_1 = sqrt(h/(1+h))
    + i sqrt(1/(1+h)), eta_2 its conjugate."""
    e1 = complex(math.sqrt(h / (1.0 + h)), math.sqrt(1.0 / (1.0 + h)))
    return MiyataData(
        h=h,
        mu=(complex(1.0, 0.0),),
        eta=(e1, e1.conjugate()),
        r_weights=(1.0,),
        rp_weights=(0.5, 0.5),
    )


def sasahara_data() -> MiyataData:
    """The h = 1/2 doubly periodic example."""
    return symmetric_weights_data(0.5)


_S_SCHEDULE_OFFSETS = [0.0] + [
    sgn / 2.0**k for k in range(3, 24) for sgn in (1.0, -1.0)
]


def _pair_for_weight(h: float, s: float) -> tuple[complex, complex]:
    """Unit pair (e^{i rho}, e^{i rho~}) with weight s, from the t(s) formula."""
    rho = 2.0 * math.atan(t_of_s(h, s))
    return unit_circle(rho), unit_circle(rho_tilde_of(h, rho))


def _schedule(h: float):
    lo = h / (1.0 + h)
    hi = 1.0 / (1.0 + h)
    for off in _S_SCHEDULE_OFFSETS:
        s = 0.5 + off
        if lo < s < hi:
            yield s


def extend_dimension(im: Immersion) -> Immersion:
    """Raise the target dimension keeping the mean curvature.

    A two-eta-block input gains one block (ambient +2): weights become
    (h s, h(1-s), 1-h) with frequencies (i eta_1, i eta_2, i mu_1). Larger
    inputs gain two blocks (ambient +4): existing high weights are halved and
    a fresh pair with weights (s/2, (1-s)/2) is appended. The fresh pair comes
    from the deterministic schedule s in {1/2, 1/2 +- 1/8, ...}, skipping any
    s whose frequencies collide with existing ones.
    """
    data = im.data
    if data.m != 1:
        raise ValueError("dimension extension supports m = 1 data only, got m = %d" % data.m)
    h = data.h
    mu1 = data.mu[0]
    if data.mp == 2:
        candidates = [(data.rp_weights[0], data.eta[0], data.eta[1])]
        for s in _schedule(h):
            a, b = _pair_for_weight(h, s)
            candidates.append((s, mu1 * a, mu1 * b))
        for s, a, b in candidates:
            eta = (1j * a, 1j * b, 1j * mu1)
            if _min_pm_distance(eta) > 1e-9:
                out = MiyataData(
                    h=h,
                    mu=data.mu,
                    eta=eta,
                    r_weights=data.r_weights,
                    rp_weights=(h * s, h * (1.0 - s), 1.0 - h),
                )
                return build(out)
        raise ConstructionError("no admissible distinct frequency triple found")
    for s in _schedule(h):
        a, b = _pair_for_weight(h, s)
        a, b = mu1 * a, mu1 * b
        eta = data.eta + (a, b)
        if _min_pm_distance(eta) > 1e-9:
            out = MiyataData(
                h=h,
                mu=data.mu,
                eta=eta,
                r_weights=data.r_weights,
                rp_weights=tuple(w / 2.0 for w in data.rp_weights) + (s / 2.0, (1.0 - s) / 2.0),
            )
            return build(out)
    raise ConstructionError("no admissible distinct frequency pair found")
