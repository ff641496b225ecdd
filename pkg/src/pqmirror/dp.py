"""Pure epsilon-DP release of the sketch.

Boundary parameterization (K-1 interior points, public endpoints), even
budget split between boundaries and sizes, bounded Laplace sampling via
inverse CDF, and a fixed-point computation of the inflated noise scale
that keeps the truncated mechanism purely epsilon-DP.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainViolation, InvalidBudget, NonConvergence
from .sketch import Domain, Sketch

_FIXED_POINT_REL_TOL = 1e-12
_FIXED_POINT_MAX_ITER = 10_000


@dataclass(frozen=True)
class BoundarySet:
    """K+1 non-decreasing boundary values; endpoints are the public domain."""

    betas: tuple[int, ...]

    def __post_init__(self):
        for a, b in zip(self.betas, self.betas[1:]):
            if a > b:
                raise ValueError(f"boundaries not sorted: {a} > {b}")

    @property
    def num_groups(self) -> int:
        return len(self.betas) - 1

    def interval(self, i: int) -> tuple[int, int]:
        return self.betas[i], self.betas[i + 1]


@dataclass(frozen=True)
class ReleaseParams:
    epsilon: float  # may be math.inf for the no-privacy mode
    max_multiplicity: int
    domain: Domain
    rng_seed: int

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidBudget(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_multiplicity < 1:
            raise ValueError(f"max multiplicity must be >= 1, got {self.max_multiplicity}")


@dataclass(frozen=True)
class NoisySketch:
    """The public artifact: sorted noisy boundaries, noisy sizes, and the
    release parameters needed to reproduce or audit the synthesis."""

    betas: BoundarySet
    sizes: tuple[float, ...]
    rows_per_group: int
    row_counts: tuple[int, ...]
    column_count: int
    codec: str
    filter_column: str
    params: ReleaseParams
    noise_scale_beta: float
    noise_scale_size: float

    @property
    def num_row_groups(self) -> int:
        return len(self.sizes)

    @property
    def total_rows(self) -> int:
        return sum(self.row_counts)

    def to_json(self) -> str:
        eps = self.params.epsilon
        return json.dumps(
            {
                "betas": list(self.betas.betas),
                "sizes": [int(round(s)) for s in self.sizes],
                "rows_per_group": self.rows_per_group,
                "row_counts": list(self.row_counts),
                "column_count": self.column_count,
                "codec": self.codec,
                "filter_column": self.filter_column,
                "epsilon": "inf" if math.isinf(eps) else eps,
                "m": self.params.max_multiplicity,
                "domain": [self.params.domain.lower, self.params.domain.upper],
                "seed": self.params.rng_seed,
                "b_star": self.noise_scale_beta,
                "b_size": self.noise_scale_size,
            },
            indent=2,
        )

    @staticmethod
    def from_json(text: str) -> "NoisySketch":
        doc = json.loads(text)
        eps = doc["epsilon"]
        eps = math.inf if eps in ("inf", None) else float(eps)
        params = ReleaseParams(
            epsilon=eps,
            max_multiplicity=doc["m"],
            domain=Domain(doc["domain"][0], doc["domain"][1]),
            rng_seed=doc["seed"],
        )
        return NoisySketch(
            betas=BoundarySet(tuple(doc["betas"])),
            sizes=tuple(float(s) for s in doc["sizes"]),
            rows_per_group=doc["rows_per_group"],
            row_counts=tuple(doc["row_counts"]),
            column_count=doc["column_count"],
            codec=doc["codec"],
            filter_column=doc.get("filter_column", "value"),
            params=params,
            noise_scale_beta=doc["b_star"],
            noise_scale_size=doc["b_size"],
        )


def to_boundaries(sketch: Sketch, domain: Domain) -> BoundarySet:
    """Map per-RG maxes to interior boundaries; endpoints come from the
    public domain (the last RG's max is discarded in favor of d_U)."""
    for rg in sketch.row_groups:
        if not (domain.lower <= rg.min_val and rg.max_val <= domain.upper):
            raise DomainViolation(
                f"RG {rg.index} range [{rg.min_val}, {rg.max_val}] outside "
                f"[{domain.lower}, {domain.upper}]"
            )
    interior = tuple(rg.max_val for rg in sketch.row_groups[:-1])
    return BoundarySet((domain.lower,) + interior + (domain.upper,))


def sensitivity_boundary(m: int, domain: Domain) -> int:
    """Boundary sensitivity: one changed row moves a boundary by at most the
    value's multiplicity, capped at the public domain width."""
    if m < 1:
        raise ValueError(f"multiplicity must be >= 1, got {m}")
    return min(m, domain.width)


def _normalizer(mean: float, scale: float, lower: float, upper: float) -> float:
    # Mass of Laplace(mean, scale) inside [lower, upper], for mean in range.
    return 1.0 - 0.5 * (
        math.exp(-(mean - lower) / scale) + math.exp(-(upper - mean) / scale)
    )


def fixed_point_scale(delta: float, domain: Domain, epsilon_share: float) -> float:
    """Smallest noise scale keeping the bounded Laplace mechanism purely
    epsilon-DP on the domain, found by fixed-point iteration from the
    standard scale delta/epsilon.

    Exactly delta/epsilon when delta equals the domain width (truncation
    is symmetric between any two in-range means there, so no inflation).
    """
    if not (epsilon_share > 0 and math.isfinite(epsilon_share)):
        raise InvalidBudget(f"epsilon share must be positive and finite, got {epsilon_share}")
    if delta <= 0:
        raise ValueError(f"sensitivity must be > 0, got {delta}")
    width = domain.width
    b0 = delta / epsilon_share
    if delta >= width:
        return b0

    def delta_c(b: float) -> float:
        # Worst-case normalizer ratio between two means delta apart, attained
        # with one mean at a domain endpoint.
        return _normalizer(domain.lower + delta, b, domain.lower, domain.upper) / _normalizer(
            domain.lower, b, domain.lower, domain.upper
        )

    b = b0
    for _ in range(_FIXED_POINT_MAX_ITER):
        log_ratio = math.log(delta_c(b))
        denom = epsilon_share - log_ratio
        if denom <= 0:
            raise NonConvergence(
                f"epsilon share {epsilon_share} cannot absorb truncation ratio {log_ratio}"
            )
        b_next = delta / denom
        if abs(b_next - b) < _FIXED_POINT_REL_TOL * b0:
            return b_next
        b = b_next
    raise NonConvergence(
        f"no fixed point after {_FIXED_POINT_MAX_ITER} iterations (delta={delta}, "
        f"eps={epsilon_share})"
    )


def _laplace_cdf(x: float, mean: float, scale: float) -> float:
    if x == math.inf:
        return 1.0
    if x <= mean:
        return 0.5 * math.exp((x - mean) / scale)
    return 1.0 - 0.5 * math.exp(-(x - mean) / scale)


def bounded_laplace_sample(true_value, scale, lower, upper, rng, size=None):
    """Sample Laplace(true_value, scale) conditioned on [lower, upper] by
    inverse CDF. `upper` may be +inf (one-sided truncation for sizes).

    With size=None returns a scalar; otherwise an ndarray of draws.
    """
    if scale <= 0:
        raise ValueError(f"scale must be > 0, got {scale}")
    if not (lower <= true_value <= upper):
        raise ValueError(f"true value {true_value} outside [{lower}, {upper}]")
    f_lo = _laplace_cdf(lower, true_value, scale)
    f_hi = _laplace_cdf(upper, true_value, scale)
    u = rng.uniform(f_lo, f_hi, size=size)
    with np.errstate(divide="ignore"):
        out = np.where(
            u < 0.5,
            true_value + scale * np.log(2.0 * u),
            true_value - scale * np.log(2.0 * (1.0 - u)),
        )
    out = np.clip(out, lower, upper if upper != math.inf else np.inf)
    if size is None:
        return float(out)
    return out


def release_sketch(sketch: Sketch, params: ReleaseParams) -> NoisySketch:
    """Release the sketch under pure epsilon-DP.

    Budget: each RG gets the full epsilon (disjoint partitions compose in
    parallel); within a RG the two released statistics split it evenly.
    Interior boundaries are noised on [d_L, d_U] at the fixed-point scale,
    sizes on [0, inf) at the standard scale, then interiors are sorted
    (deterministic post-processing, no extra budget) and rounded.
    """
    domain = params.domain
    exact = to_boundaries(sketch, domain)
    true_sizes = tuple(float(rg.compressed_size) for rg in sketch.row_groups)

    if math.isinf(params.epsilon):
        return NoisySketch(
            betas=exact,
            sizes=true_sizes,
            rows_per_group=sketch.rows_per_group,
            row_counts=sketch.row_counts,
            column_count=sketch.column_count,
            codec=sketch.codec,
            filter_column=sketch.filter_column,
            params=params,
            noise_scale_beta=0.0,
            noise_scale_size=0.0,
        )

    eps_beta = params.epsilon / 2.0
    eps_size = params.epsilon / 2.0
    delta_beta = sensitivity_boundary(params.max_multiplicity, domain)
    delta_size = sketch.uncompressed_row_size
    b_star = fixed_point_scale(delta_beta, domain, eps_beta)
    b_size = delta_size / eps_size

    rng = np.random.default_rng(params.rng_seed)
    noisy_interior = [
        bounded_laplace_sample(b, b_star, domain.lower, domain.upper, rng)
        for b in exact.betas[1:-1]
    ]
    noisy_sizes = tuple(
        bounded_laplace_sample(s, b_size, 0.0, math.inf, rng) for s in true_sizes
    )
    noisy_interior.sort()
    betas = (domain.lower,) + tuple(int(round(b)) for b in noisy_interior) + (domain.upper,)

    return NoisySketch(
        betas=BoundarySet(betas),
        sizes=noisy_sizes,
        rows_per_group=sketch.rows_per_group,
        row_counts=sketch.row_counts,
        column_count=sketch.column_count,
        codec=sketch.codec,
        filter_column=sketch.filter_column,
        params=params,
        noise_scale_beta=b_star,
        noise_scale_size=b_size,
    )
