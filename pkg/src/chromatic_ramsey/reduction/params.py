"""Parameter schedules that drive the color-reduction engine.

Every shrinking step of the engine is priced by a ladder of fractions:
``beta`` for the intersection loss inside one step, ``alpha_i`` for the
smallest part size admitted when building level ``i`` of the tower, and
``gamma_i`` for the cumulative size guarantee after the step finishes.
The quantities decay brutally fast in ``r``, so each one is stored twice:
as an exact :class:`~fractions.Fraction` (used whenever a threshold must
be compared exactly against a set size) and as a natural-log float mirror
(used for products that would underflow any fixed-precision format).

`EngineParams.paper_formula` fills the ladder from the closed-form
schedule in terms of ``q`` and ``r``; `EngineParams.manual` accepts any
exact values for controlled experiments at desk scale, where the asymptotic
schedule collapses to its floors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from ..dense_pairs import as_fraction, ceil_frac
from ..errors import EpsilonOutOfRange, PreconditionViolation
from ..serialize import frac_str, parse_frac

LOG2 = math.log(2.0)

# beta is floored at 2^-64: far below anything a desk-scale run can certify,
# but positive, so logarithms and reciprocals stay finite.
LOG_BETA_MIN = -64.0 * LOG2
BETA_MIN = Fraction(1, 2 ** 64)

# Fractions recovered from logs below exp's underflow point are pinned to
# 2^-4096: positive, exact, and cheap to multiply.
_TINY_SHIFT = 4096

_SOURCES = ("paper_formula", "manual")


def log_of_fraction(f: Fraction) -> float:
    """Natural log of a positive rational, stable for huge numerators."""
    if f <= 0:
        raise PreconditionViolation("logarithm of a non-positive fraction")
    return math.log(f.numerator) - math.log(f.denominator)


def _frac_from_log(lg: float) -> Fraction:
    """A positive rational close to e**lg, never zero, capped at 1."""
    if lg >= 0.0:
        return Fraction(1)
    if lg > -700.0:
        return Fraction(math.exp(lg))
    shift = min(_TINY_SHIFT, int(math.ceil(-lg / LOG2)))
    return Fraction(1, 1 << shift)


def floored_size(frac: Fraction | int, n: int) -> tuple[int, bool]:
    """Integer size supported by the claim ``frac * n``, floored at 1.

    Returns the size together with a flag saying whether the floor fired;
    it fires exactly when the product is at most 1, meaning any nonempty
    set satisfies the nominal guarantee and the claim is vacuous.
    """
    value = as_fraction(frac) * n
    if value <= 1:
        return 1, True
    return ceil_frac(value), False


@dataclass(frozen=True)
class EngineParams:
    """Exact fractions plus float log mirrors for one engine configuration.

    ``alpha_vec`` holds (alpha_0, ..., alpha_{q-2}) and ``gamma_vec`` the
    cumulative products gamma_i = beta * alpha_0 * ... * alpha_i.  The log
    mirrors satisfy the same identities via ``math.fsum``.
    """

    q: int
    r: int
    n: int
    eps: Fraction
    delta: Fraction
    z: Fraction
    y: Fraction
    beta: Fraction
    alpha_vec: tuple[Fraction, ...]
    gamma_vec: tuple[Fraction, ...]
    source: str
    log_delta: float
    log_beta: float
    log_alpha: tuple[float, ...]
    log_gamma: tuple[float, ...]
    eps_clamped: bool = False
    beta_floored: bool = False
    label: str = ""
    r_min: int = 8
    base_gamma: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.q < 2:
            raise PreconditionViolation("q must be at least 2")
        if self.r < 2:
            raise PreconditionViolation("need at least two colors")
        if self.n < 1:
            raise PreconditionViolation("n must be positive")
        if self.r_min < 2:
            raise PreconditionViolation("r_min must be at least 2")
        if self.source not in _SOURCES:
            raise PreconditionViolation(f"unknown parameter source {self.source!r}")
        if not 0 < self.eps < 1:
            raise EpsilonOutOfRange("eps must lie strictly between 0 and 1")
        if not 0 < self.z < 1:
            raise PreconditionViolation("z must lie strictly between 0 and 1")
        for name, value in (("delta", self.delta), ("beta", self.beta)):
            if not 0 < value <= 1:
                raise PreconditionViolation(f"{name} must lie in (0, 1]")
        want = self.q - 1
        if len(self.alpha_vec) != want or len(self.gamma_vec) != want:
            raise PreconditionViolation("alpha_vec and gamma_vec need q-1 entries")
        if len(self.log_alpha) != want or len(self.log_gamma) != want:
            raise PreconditionViolation("log mirrors need q-1 entries")
        for a in self.alpha_vec:
            if not 0 < a <= 1:
                raise PreconditionViolation("every alpha must lie in (0, 1]")
        for g in self.gamma_vec:
            if g <= 0:
                raise PreconditionViolation("every gamma must be positive")
        if self.base_gamma is not None and self.base_gamma < 2:
            raise PreconditionViolation("base_gamma must be at least 2")

    @property
    def eps_eff(self) -> Fraction:
        """The working density parameter eps**(q-1) used by level machinery."""
        return self.eps ** (self.q - 1)

    @classmethod
    def paper_formula(cls, q: int, r: int, n: int, *,
                      eps0: Fraction | int | float | str = Fraction(1),
                      r_min: int = 8, base_gamma: int | None = None,
                      seed: int = 0) -> "EngineParams":
        """Closed-form schedule in q and r, evaluated in log space.

        eps = r^(-1/q) * log r exceeds eps0 for small r; in that case it is
        clamped to (63/64) * eps0 and the clamp is recorded.  beta is floored
        at 2^-64 when the closed form underflows or its base goes negative.
        """
        if q < 2:
            raise PreconditionViolation("q must be at least 2")
        if r < 2:
            raise PreconditionViolation("need at least two colors")
        if n < 1:
            raise PreconditionViolation("n must be positive")
        eps0 = as_fraction(eps0)
        if not 0 < eps0 <= 1:
            raise EpsilonOutOfRange("eps0 must lie in (0, 1]")
        eps_raw = Fraction(float(r ** (-1.0 / q)) * math.log(r))
        clamped = eps_raw >= eps0
        eps = Fraction(63, 64) * eps0 if clamped else eps_raw

        log_r = math.log(r)
        log_delta = -(1.0 / float(eps) ** (q - 1)) * log_r
        delta = _frac_from_log(log_delta)

        big = 16 ** q  # 2^(4q)
        z = Fraction(big, big + 1)
        log_inv_z = math.log1p(1.0 / big)
        y_f = log_r / log_inv_z
        y = Fraction(y_f)

        edge = 1 - Fraction(2 ** (q + 3)) * eps
        if edge > 0:
            log_beta_raw = (r / float(big)) * log_of_fraction(edge)
        else:
            log_beta_raw = -math.inf
        floored = log_beta_raw < LOG_BETA_MIN
        log_beta = LOG_BETA_MIN if floored else log_beta_raw
        beta = BETA_MIN if floored else _frac_from_log(log_beta)

        log_alpha = [log_delta]
        alphas = [delta]
        for i in range(1, q - 1):
            lg = -log_beta + (3.0 * y_f) ** i * (log_beta + log_delta)
            log_alpha.append(lg)
            alphas.append(_frac_from_log(lg))
        log_gamma = [math.fsum([log_beta, *log_alpha[:i + 1]])
                     for i in range(q - 1)]
        gammas: list[Fraction] = []
        running = beta
        for a in alphas:
            running *= a
            gammas.append(running)

        return cls(q=q, r=r, n=n, eps=eps, delta=delta, z=z, y=y, beta=beta,
                   alpha_vec=tuple(alphas), gamma_vec=tuple(gammas),
                   source="paper_formula", log_delta=log_delta,
                   log_beta=log_beta, log_alpha=tuple(log_alpha),
                   log_gamma=tuple(log_gamma), eps_clamped=clamped,
                   beta_floored=floored, label="paper_formula", r_min=r_min,
                   base_gamma=base_gamma, seed=seed)

    @classmethod
    def cubic_schedule(cls, r: int, n: int, *, r_min: int = 8,
                       base_gamma: int | None = None,
                       seed: int = 0) -> "EngineParams":
        """Alternative q = 3 schedule with a 31/32 color retention rate.

        Uses eps = r^(-1/3) * (log r)^(2/3), a slower-decaying alpha_0 that
        doubles as delta, and beta = (1 - 16*eps)^(r/4).
        """
        if r < 2:
            raise PreconditionViolation("need at least two colors")
        if n < 1:
            raise PreconditionViolation("n must be positive")
        q = 3
        log_r = math.log(r)
        eps_raw = Fraction(float(r ** (-1.0 / 3)) * log_r ** (2.0 / 3))
        clamped = eps_raw >= 1
        eps = Fraction(63, 64) if clamped else eps_raw
        eps_f = float(eps)

        log_alpha0 = -(math.log(1.0 / eps_f ** 2) / eps_f ** 2) * log_r
        alpha0 = _frac_from_log(log_alpha0)
        log_alpha1 = -100.0 * log_r ** 2 * r ** (2.0 / 3)
        alpha1 = _frac_from_log(log_alpha1)

        edge = 1 - 16 * eps
        if edge > 0:
            log_beta_raw = (r / 4.0) * log_of_fraction(edge)
        else:
            log_beta_raw = -math.inf
        floored = log_beta_raw < LOG_BETA_MIN
        log_beta = LOG_BETA_MIN if floored else log_beta_raw
        beta = BETA_MIN if floored else _frac_from_log(log_beta)

        z = Fraction(31, 32)
        y = Fraction(log_r / math.log(32.0 / 31.0))
        log_alpha = (log_alpha0, log_alpha1)
        log_gamma = (math.fsum([log_beta, log_alpha0]),
                     math.fsum([log_beta, log_alpha0, log_alpha1]))
        gamma0 = beta * alpha0
        gammas = (gamma0, gamma0 * alpha1)

        return cls(q=q, r=r, n=n, eps=eps, delta=alpha0, z=z, y=y, beta=beta,
                   alpha_vec=(alpha0, alpha1), gamma_vec=gammas,
                   source="manual", log_delta=log_alpha0, log_beta=log_beta,
                   log_alpha=log_alpha, log_gamma=log_gamma,
                   eps_clamped=clamped, beta_floored=floored,
                   label="cubic_schedule", r_min=r_min,
                   base_gamma=base_gamma, seed=seed)

    @classmethod
    def manual(cls, q: int, r: int, n: int, *, eps, z, beta, alpha_vec,
               delta=None, r_min: int = 8, base_gamma: int | None = None,
               seed: int = 0, label: str = "manual") -> "EngineParams":
        """Exact user-supplied ladder; delta defaults to alpha_0."""
        eps = as_fraction(eps)
        z = as_fraction(z)
        beta = as_fraction(beta)
        alphas = tuple(as_fraction(a) for a in alpha_vec)
        if len(alphas) != q - 1:
            raise PreconditionViolation("alpha_vec needs q-1 entries")
        delta = alphas[0] if delta is None else as_fraction(delta)
        if not 0 < z < 1:
            raise PreconditionViolation("z must lie strictly between 0 and 1")
        y = Fraction(math.log(r) / log_of_fraction(Fraction(1) / z))

        log_beta = log_of_fraction(beta)
        log_alpha = tuple(log_of_fraction(a) for a in alphas)
        log_gamma = tuple(math.fsum([log_beta, *log_alpha[:i + 1]])
                          for i in range(q - 1))
        gammas: list[Fraction] = []
        running = beta
        for a in alphas:
            running *= a
            gammas.append(running)

        return cls(q=q, r=r, n=n, eps=eps, delta=delta, z=z, y=y, beta=beta,
                   alpha_vec=alphas, gamma_vec=tuple(gammas), source="manual",
                   log_delta=log_of_fraction(delta), log_beta=log_beta,
                   log_alpha=log_alpha, log_gamma=log_gamma, label=label,
                   r_min=r_min, base_gamma=base_gamma, seed=seed)

    def payload(self) -> dict[str, Any]:
        """JSON-ready dict preserving every field exactly."""
        return {
            "q": self.q, "r": self.r, "n": self.n,
            "eps": frac_str(self.eps), "delta": frac_str(self.delta),
            "z": frac_str(self.z), "y": frac_str(self.y),
            "beta": frac_str(self.beta),
            "alpha_vec": [frac_str(a) for a in self.alpha_vec],
            "gamma_vec": [frac_str(g) for g in self.gamma_vec],
            "source": self.source,
            "log_delta": self.log_delta, "log_beta": self.log_beta,
            "log_alpha": list(self.log_alpha),
            "log_gamma": list(self.log_gamma),
            "eps_clamped": self.eps_clamped,
            "beta_floored": self.beta_floored,
            "label": self.label, "r_min": self.r_min,
            "base_gamma": self.base_gamma, "seed": self.seed,
        }

    @classmethod
    def from_payload(cls, data: dict[str, Any]) -> "EngineParams":
        return cls(
            q=int(data["q"]), r=int(data["r"]), n=int(data["n"]),
            eps=parse_frac(data["eps"]), delta=parse_frac(data["delta"]),
            z=parse_frac(data["z"]), y=parse_frac(data["y"]),
            beta=parse_frac(data["beta"]),
            alpha_vec=tuple(parse_frac(a) for a in data["alpha_vec"]),
            gamma_vec=tuple(parse_frac(g) for g in data["gamma_vec"]),
            source=str(data["source"]),
            log_delta=float(data["log_delta"]),
            log_beta=float(data["log_beta"]),
            log_alpha=tuple(float(x) for x in data["log_alpha"]),
            log_gamma=tuple(float(x) for x in data["log_gamma"]),
            eps_clamped=bool(data["eps_clamped"]),
            beta_floored=bool(data["beta_floored"]),
            label=str(data["label"]), r_min=int(data["r_min"]),
            base_gamma=(None if data["base_gamma"] is None
                        else int(data["base_gamma"])),
            seed=int(data["seed"]),
        )
