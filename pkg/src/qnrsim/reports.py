"""Serializable run reports and the uniformity statistic attached to them."""
from __future__ import annotations

import dataclasses
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable

from scipy import stats

from .number_theory import jacobi
from .sampler import VerificationReport

SCHEMA_VERSION = 1


@dataclass
class ChiSquare:
    statistic: float
    df: int
    p_value: float


@dataclass
class SampleReport:
    p: int
    path: str
    seed: int
    count: int
    samples: list[int]
    frequency_table: list[list[int]]
    chi_square: ChiSquare | None
    elapsed_ms: float | None = None


@dataclass
class SetSampleReport:
    n: int
    k: int
    source: str
    augmented: bool
    pre_iterations: int
    final_theta: float
    max_unmarked_probability: float
    seed: int
    count: int
    samples: list[int]
    frequency_table: list[list[int]]
    chi_square: ChiSquare | None
    elapsed_ms: float | None = None


@dataclass
class GroverStep:
    iteration: int
    target_amplitude: list[float]
    other_amplitude: list[float]
    target_probability: float


@dataclass
class GroverDemoReport:
    n: int
    target: int
    deterministic: bool
    steps: list[GroverStep] = field(default_factory=list)
    success_probability: float = 0.0
    max_other_amplitude: float = 0.0
    pre_iterations: int | None = None
    final_theta: float | None = None
    seed: int | None = None
    observed: int | None = None


def frequency_table(samples: Iterable[int], categories: Iterable[int]) -> list[list[int]]:
    """[value, count] rows over ``categories`` (zero counts kept), ascending."""
    counts = Counter(samples)
    cats = sorted(set(categories) | set(counts))
    return [[c, counts.get(c, 0)] for c in cats]


def chi_square_uniform(table: list[list[int]]) -> ChiSquare | None:
    """Goodness of fit of the observed counts to a uniform distribution."""
    if len(table) < 2:
        return None
    observed = [c for _, c in table]
    res = stats.chisquare(observed)
    return ChiSquare(statistic=float(res.statistic), df=len(observed) - 1, p_value=float(res.pvalue))


def check_samples(report: SampleReport) -> None:
    bad = [a for a in set(report.samples) if jacobi(a, report.p) != -1]
    if bad:
        raise AssertionError(f"samples {sorted(bad)[:5]} are not nonresidues mod {report.p}")


def to_dict(report: Any) -> dict[str, Any]:
    return {"schema": SCHEMA_VERSION, **dataclasses.asdict(report)}


def to_json(report: Any) -> str:
    return json.dumps(to_dict(report))


_NESTED = {
    SampleReport: {"chi_square": ChiSquare},
    SetSampleReport: {"chi_square": ChiSquare},
    GroverDemoReport: {"steps": GroverStep},
    VerificationReport: {},
}


def from_json(text: str | dict, cls: type) -> Any:
    data = json.loads(text) if isinstance(text, str) else dict(text)
    schema = data.pop("schema", None)
    if schema != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema {schema!r}")
    for key, sub in _NESTED[cls].items():
        value = data.get(key)
        if isinstance(value, list):
            data[key] = [sub(**v) for v in value]
        elif isinstance(value, dict):
            data[key] = sub(**value)
    return cls(**data)
