"""Anisotropic dyadic families psi, Psi_j, Phi_j and block (de)composition."""
import logging
import math
from functools import lru_cache
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from mixtrace.errors import DomainError, GridMismatchError, ResolutionError
from mixtrace.geometry import aniso_distance
from mixtrace.grid_field import anisotropic_radius, from_spectrum, spectrum
from mixtrace.models import AnisoBall, AnisotropyVector, Grid, GridField
from mixtrace.resilience import parallel_map

_LOG = logging.getLogger(__name__)

PLATEAU = 11 / 10
CUTOFF = 13 / 10
MIN_J_MAX = 2

Flavor = Literal["inhomogeneous", "homogeneous"]


def smooth_step(s):
    """H(s) = e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)}): 0 for s <= 0, 1 for s >= 1."""
    s = np.asarray(s, dtype=float)
    inner = np.clip(s, 1e-300, 1.0 - 1e-16)
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        left = np.exp(-1.0 / inner)
        right = np.exp(-1.0 / (1.0 - inner))
        bridge = left / (left + right)
    out = np.where(s <= 0.0, 0.0, np.where(s >= 1.0, 1.0, bridge))
    return out if out.ndim else float(out)


def psi(t, plateau: float = PLATEAU, cutoff: float = CUTOFF):
    """1 for t <= plateau, 0 for t >= cutoff, smooth and monotone between."""
    t = np.asarray(t, dtype=float)
    return smooth_step((cutoff - t) / (cutoff - plateau))


class LPFamily(BaseModel):
    """Dyadic family on one grid: Psi_j = psi(2^{-j}|xi|_a), Phi_j = Psi_j - Psi_{j-1}."""
    model_config = ConfigDict(frozen=True)

    a: AnisotropyVector
    grid: Grid
    flavor: Flavor = "inhomogeneous"
    j_min: int = Field(0, description="First block index (K_min for the homogeneous flavor)")
    j_max: int
    plateau: float = Field(PLATEAU, gt=0)
    cutoff: float = Field(CUTOFF, gt=0)

    @model_validator(mode="after")
    def _check(self) -> "LPFamily":
        if self.cutoff <= self.plateau:
            raise ValueError("cutoff must exceed plateau")
        if self.a.n != self.grid.n:
            raise ValueError("family anisotropy and grid differ in dimension")
        if self.j_max < self.j_min:
            raise ValueError("empty block window")
        if self.flavor == "inhomogeneous" and self.j_min != 0:
            raise ValueError("inhomogeneous families start at j = 0")
        return self

    @property
    def indices(self) -> range:
        return range(self.j_min, self.j_max + 1)

    def radius(self) -> np.ndarray:
        return anisotropic_radius(self.grid, self.a)

    def Psi(self, j: int) -> np.ndarray:
        return psi(2.0 ** (-j) * self.radius(), self.plateau, self.cutoff)

    def block_symbol(self, j: int) -> np.ndarray:
        return _block_symbol(self, j)

    def corona(self, j: int) -> tuple[float, float]:
        """(inner, outer) anisotropic radii of the support of Phi_j."""
        outer = self.cutoff * 2.0 ** j
        if self.flavor == "inhomogeneous" and j == 0:
            return 0.0, outer
        return self.plateau * 2.0 ** (j - 1), outer

    def certificate(self, j: int) -> AnisoBall:
        inner, outer = self.corona(j)
        return AnisoBall(center=(0.0,) * self.grid.n, radius=outer, inner=inner, a=self.a)


@lru_cache(maxsize=64)
def _block_symbol(fam: LPFamily, j: int) -> np.ndarray:
    if fam.flavor == "inhomogeneous" and j == 0:
        out = fam.Psi(0)
    else:
        out = fam.Psi(j) - fam.Psi(j - 1)
    out.flags.writeable = False
    return out


def lp_symbol(a: AnisotropyVector, j: int, xi, flavor: Flavor = "inhomogeneous") -> np.ndarray:
    """Phi_j (or phi_j) at arbitrary frequency points, coordinate axis first."""
    r = np.asarray(aniso_distance(a, xi))
    if flavor == "inhomogeneous" and j == 0:
        return psi(r)
    return psi(2.0 ** (-j) * r) - psi(2.0 ** (1 - j) * r)


def nyquist_radius(grid: Grid, a: AnisotropyVector) -> float:
    """Largest anisotropic radius whose ball avoids every axis Nyquist frequency."""
    return float(min(nyq ** (1.0 / w) for nyq, w in zip(grid.nyquist, a.a)))


def covering_index(radius: float, plateau: float = PLATEAU) -> int:
    """Smallest J >= 0 with Psi_J = 1 on the ball of the given radius."""
    if radius <= plateau:
        return 0
    return int(math.ceil(math.log2(radius / plateau) - 1e-12))


def build_family(
    a: AnisotropyVector,
    grid: Grid,
    flavor: Flavor = "inhomogeneous",
    j_max: Optional[int] = None,
    plateau: float = PLATEAU,
    cutoff: float = CUTOFF,
) -> LPFamily:
    """Family truncated at Nyquist: J_max = floor(log2 R_nyq) - 1 unless overridden.

    The homogeneous flavor covers every nonzero grid frequency with the window
    K_min <= k <= K_max, so sum_k phi_k = 1 off the origin.
    """
    if a.n != grid.n:
        raise DomainError(f"anisotropy of dimension {a.n} on a {grid.n}-dimensional grid")
    if flavor == "homogeneous":
        r_min = min((math.pi / h) ** (1.0 / w) for h, w in zip(grid.half_periods, a.a))
        r_max = float(anisotropic_radius(grid, a).max())
        k_min = int(math.floor(1.0 + math.log2(r_min / cutoff)))
        k_max = int(math.ceil(math.log2(r_max / plateau)))
        return LPFamily(a=a, grid=grid, flavor=flavor, j_min=k_min, j_max=k_max, plateau=plateau, cutoff=cutoff)

    nyq = nyquist_radius(grid, a)
    auto = int(math.floor(math.log2(nyq))) - 1
    if j_max is None:
        if auto < MIN_J_MAX:
            raise ResolutionError(
                f"grid {grid.points} resolves J_max = {auto} < {MIN_J_MAX}; "
                f"need a Nyquist anisotropic radius of at least {2 ** (MIN_J_MAX + 1)}"
            )
        j_max = auto
    elif j_max < 0:
        raise DomainError("j_max must be nonnegative")
    elif j_max > auto:
        _LOG.warning(
            "dyadic window extends past the Nyquist-safe index",
            extra={"j_max": j_max, "nyquist_j_max": auto, "grid": grid.points},
        )
    return LPFamily(a=a, grid=grid, flavor=flavor, j_max=j_max, plateau=plateau, cutoff=cutoff)


class LPDecomposition(BaseModel):
    """Blocks u_j = Phi_j(D)u over the family window plus the remainder beyond it."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    family: LPFamily
    blocks: tuple[GridField, ...]
    remainder: GridField

    @property
    def indices(self) -> range:
        return self.family.indices


def decompose(u: GridField, fam: LPFamily) -> LPDecomposition:
    """Blocks with corona certificates; the remainder is (1 - Psi_Jmax)(D)u, or the mean for phi_k."""
    if u.grid != fam.grid:
        raise GridMismatchError(f"field grid {u.grid.points} differs from family grid {fam.grid.points}")
    spec = spectrum(u)

    def _block(j: int) -> GridField:
        return from_spectrum(u.grid, spec * fam.block_symbol(j), fam.certificate(j))

    blocks = tuple(parallel_map(_block, list(fam.indices)))
    if fam.flavor == "inhomogeneous":
        rest = spec * (1.0 - fam.Psi(fam.j_max))
    else:
        rest = np.zeros_like(spec)
        rest.flat[0] = spec.flat[0]
    return LPDecomposition(family=fam, blocks=blocks, remainder=from_spectrum(u.grid, rest))


def recompose(d: LPDecomposition, upto: Optional[int] = None, include_remainder: bool = True) -> GridField:
    """Sum of blocks j <= upto (all by default), plus the remainder when summing everything."""
    grid = d.family.grid
    total = np.zeros(grid.points, dtype=np.complex128)
    last = d.family.j_max if upto is None else upto
    for j, block in zip(d.indices, d.blocks):
        if block.grid != grid:
            raise GridMismatchError("decomposition blocks live on different grids")
        if j <= last:
            total += block.values
    if include_remainder and last >= d.family.j_max:
        total += d.remainder.values
    return GridField(grid=grid, values=total)
