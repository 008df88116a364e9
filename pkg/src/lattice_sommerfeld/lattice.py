"""Problem parameters, dispersion relation and the incident lattice wave."""
from __future__ import annotations

import configparser
import enum
import hashlib
import json
import math
import warnings
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ConfigError, NoConvergence

# eps*omega1 must stay this far from {0, 2, 2*sqrt(2)}
EXCEPTIONAL_MARGIN = 1e-3


class BoundaryKind(str, enum.Enum):
    """Rigid constraint (Dirichlet) or crack (Neumann) along y = 0, x < 0."""

    DIRICHLET = "D"
    NEUMANN = "N"

    @classmethod
    def parse(cls, value) -> "BoundaryKind":
        if isinstance(value, cls):
            return value
        v = str(value).strip().upper()
        aliases = {"D": cls.DIRICHLET, "DIRICHLET": cls.DIRICHLET,
                   "N": cls.NEUMANN, "NEUMANN": cls.NEUMANN}
        try:
            return aliases[v]
        except KeyError:
            raise ConfigError(f"unknown boundary kind {value!r}") from None


@dataclass(frozen=True)
class Frequency:
    """Complex frequency omega = omega1 + i*omega2 with omega2 > 0."""

    omega1: float
    omega2: float

    def __post_init__(self):
        if not self.omega2 > 0:
            raise ConfigError("omega2 must be strictly positive")

    @property
    def value(self) -> complex:
        return complex(self.omega1, self.omega2)


@dataclass(frozen=True)
class LatticeSite:
    x: int
    y: int


@dataclass(frozen=True)
class ProblemConfig:
    """Parameters of one discrete Sommerfeld problem.

    ``extent`` is the physical half-line length X; the number of lattice
    unknowns in the error window is ``floor(X / eps)``.
    """

    eps: float
    freq: Frequency
    theta: float
    kind: BoundaryKind = BoundaryKind.DIRICHLET
    extent: float = 76.0
    tol_quad: float = 1e-13
    tol_root: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "kind", BoundaryKind.parse(self.kind))
        if not self.eps > 0:
            raise ConfigError("eps must be positive")
        if not self.extent > 0:
            raise ConfigError("extent must be positive")
        a = self.eps * self.freq.omega1
        if not 0 < a < 2 * math.sqrt(2):
            raise ConfigError(f"eps*omega1 = {a:g} outside (0, 2*sqrt(2))")
        for bad in (0.0, 2.0, 2 * math.sqrt(2)):
            if abs(a - bad) < EXCEPTIONAL_MARGIN:
                raise ConfigError(f"eps*omega1 = {a:g} too close to exceptional value {bad:g}")
        if not self.theta_in_default_domain:
            warnings.warn(f"theta = {self.theta:g} outside (0, pi/2]; forcing may grow "
                          "along the half-line", stacklevel=3)

    @property
    def theta_in_default_domain(self) -> bool:
        return 0 < self.theta <= math.pi / 2 + 1e-14

    @property
    def omega(self) -> complex:
        return self.freq.value

    @property
    def w2(self) -> complex:
        """Lattice frequency squared, (eps*omega)**2."""
        return (self.eps * self.omega) ** 2

    @cached_property
    def kappa(self) -> complex:
        return solve_wavenumber(self.freq, self.theta, self.eps, tol=self.tol_root)

    @property
    def kappa_x(self) -> complex:
        return self.kappa * np.cos(self.theta)

    @property
    def kappa_y(self) -> complex:
        return self.kappa * np.sin(self.theta)

    @property
    def k(self) -> complex:
        """Macroscopic wavenumber kappa/eps."""
        return self.kappa / self.eps

    @property
    def n_window(self) -> int:
        return int(math.floor(self.extent / self.eps + 1e-9))

    def with_(self, **changes) -> "ProblemConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "eps": float(self.eps),
            "omega_re": float(self.freq.omega1),
            "omega_im": float(self.freq.omega2),
            "theta": float(self.theta),
            "kind": self.kind.value,
            "extent_X": float(self.extent),
            "tol_quad": float(self.tol_quad),
            "tol_root": float(self.tol_root),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemConfig":
        try:
            return cls(
                eps=float(d["eps"]),
                freq=Frequency(float(d.get("omega_re", 1.0)), float(d.get("omega_im", 0.1))),
                theta=float(d.get("theta", math.pi / 3)),
                kind=d.get("kind", "D"),
                extent=float(d.get("extent_X", 76.0)),
                tol_quad=float(d.get("tol_quad", 1e-13)),
                tol_root=float(d.get("tol_root", 1e-12)),
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key {exc}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from None

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


_SECTION = "problem"


def load_config(path) -> ProblemConfig:
    """Read a flat ``key = value`` file (no section header needed)."""
    text = Path(path).read_text()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_string(f"[{_SECTION}]\n" + text)
    return ProblemConfig.from_dict(dict(parser[_SECTION]))


def dump_config(cfg: ProblemConfig, path) -> None:
    lines = [f"{k} = {v!r}" if not isinstance(v, str) else f"{k} = {v}"
             for k, v in cfg.to_dict().items()]
    Path(path).write_text("\n".join(lines) + "\n")


def dispersion_sigma(kx, ky, w2):
    """Square lattice dispersion function w2 - 4 + 2 cos kx + 2 cos ky."""
    return w2 - 4 + 2 * np.cos(kx) + 2 * np.cos(ky)


def solve_wavenumber(freq: Frequency, theta: float, eps: float, tol: float = 1e-12,
                     maxiter: int = 50) -> complex:
    """Lattice wavenumber kappa with sigma(kappa cos, kappa sin, (eps w)^2) = 0.

    Newton iteration started from the continuum value eps*omega.  Roots with
    Re(kappa) < 0 are mapped to -kappa (sigma is even); roots outside the
    first Brillouin zone are rejected.
    """
    omega = freq.value
    w2 = (eps * omega) ** 2
    c, s = math.cos(theta), math.sin(theta)
    kap = complex(eps * omega)
    for _ in range(maxiter):
        g = dispersion_sigma(kap * c, kap * s, w2)
        dg = -2 * c * np.sin(kap * c) - 2 * s * np.sin(kap * s)
        if dg == 0:
            break
        step = g / dg
        kap -= step
        if abs(step) <= 1e-15 * max(1.0, abs(kap)):
            break
    res = abs(dispersion_sigma(kap * c, kap * s, w2))
    if not np.isfinite(kap) or res > tol:
        raise NoConvergence(f"wavenumber Newton residual {res:.3e} > {tol:g}")
    if kap.real < 0:
        kap = -kap
    if abs((kap * c).real) > math.pi or abs((kap * s).real) > math.pi:
        raise NoConvergence("wavenumber root outside the first Brillouin zone")
    if kap.imag <= 0:
        raise NoConvergence("wavenumber root has non-positive imaginary part")
    return complex(kap)


def incident_wave(cfg: ProblemConfig, site):
    """Incident lattice wave exp(-i(kx*x + ky*y)); ``site`` may be a LatticeSite
    or an ``(x, y)`` pair of arrays."""
    if isinstance(site, LatticeSite):
        x, y = site.x, site.y
    else:
        x, y = site
    return np.exp(-1j * (cfg.kappa_x * np.asarray(x) + cfg.kappa_y * np.asarray(y)))


def macroscopic_coords(site: LatticeSite, cfg: ProblemConfig) -> tuple[float, float]:
    """Physical coordinates of a site; Neumann rows sit half a spacing up."""
    shift = 0.5 if cfg.kind is BoundaryKind.NEUMANN else 0.0
    return site.x * cfg.eps, (site.y + shift) * cfg.eps
