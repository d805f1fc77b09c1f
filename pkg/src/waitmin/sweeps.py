"""Batch evaluation over grids of load ratio and pickup threshold.

A sweep is declared in JSON and rendered to CSV, one numeric table per
output kind. The service rate is pinned to 1 throughout, so the load knob
is the single dimensionless ratio lambda/mu and reported waits double as
normalized waits.

Config layout::

    {"sweeps": [{"name": "curve",
                 "ratios": [1, 100],
                 "d_values": [1, 2, 5],          # or {"from":1,"to":9,"step":2} or "optimal"
                 "outputs": ["wait_curve"],
                 "simulate": false,               # optional
                 "lmax": 50,                      # optional, pmf tables only
                 "sim": {"seed": 7}}]}            # optional simulator overrides

Unknown fields anywhere are rejected by name rather than ignored, so a
typo cannot silently drop a knob. Output files live under one directory;
a sweep producing a single file claims ``<name>.csv``, otherwise each file
is tagged with its output kind, ratio, and threshold. Floats are written
with 12 significant digits and LF line endings, and simulation seeds are
derived from (master seed, ratio index, d index), so a config maps to
byte-identical files on every run.
"""

from __future__ import annotations

import dataclasses
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable

import numpy as np

from .analytic import StationaryDistribution, mean_wait
from .model import ModelParams, ValidationError, new_params
from .optimizer import find_d_star, heuristic_d_star
from .simulator import SimConfig, replicate

__all__ = [
    "SweepSpec",
    "SweepArtifact",
    "parse_config",
    "load_config",
    "default_lmax",
    "run_sweep",
    "run_config",
]

OUTPUT_KINDS = ("pmf", "wait_curve", "optimum", "normalized_by_ratio")

_SWEEP_FIELDS = {"name", "ratios", "d_values", "outputs", "simulate", "lmax", "sim"}
_SIM_FIELDS = {"seed", "num_transactions", "warmup_transactions", "replications", "batch_count"}
_NAME_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9._-]*")


@dataclass(frozen=True)
class SweepSpec:
    """One validated sweep: a grid of ratios and thresholds plus the tables
    to emit. ``d_values`` may be the literal ``"optimal"``, in which case
    the grid collapses to the per-ratio optimizer result."""

    name: str
    ratios: tuple[float, ...]
    d_values: tuple[int, ...] | str
    outputs: tuple[str, ...]
    simulate: bool = False
    lmax: int | None = None
    sim: SimConfig = SimConfig()


@dataclass(frozen=True)
class SweepArtifact:
    """One CSV written by a sweep, tagged for downstream rendering."""

    kind: str
    path: Path
    ratio: float | None = None
    d: int | None = None


def _fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("booleans have no place in a numeric table")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _reject_unknown(fields: dict, allowed: set[str], where: str) -> None:
    for key in fields:
        if key not in allowed:
            raise ValidationError(f"unknown field {key!r} in {where}")


def _parse_d_values(raw: Any, where: str) -> tuple[int, ...] | str:
    if raw == "optimal":
        return "optimal"
    if isinstance(raw, dict):
        _reject_unknown(raw, {"from", "to", "step"}, f"{where}.d_values")
        try:
            start, stop = raw["from"], raw["to"]
        except KeyError as missing:
            raise ValidationError(f"{where}.d_values range needs {missing.args[0]!r}") from None
        step = raw.get("step", 1)
        for label, v in (("from", start), ("to", stop), ("step", step)):
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ValidationError(f"{where}.d_values.{label} must be a positive integer")
        if stop < start:
            raise ValidationError(f"{where}.d_values range is empty ({start}..{stop})")
        return tuple(range(start, stop + 1, step))
    if isinstance(raw, list) and raw:
        for v in raw:
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ValidationError(f"{where}.d_values entries must be positive integers")
        return tuple(raw)
    raise ValidationError(
        f"{where}.d_values must be a non-empty list, a from/to/step range, or \"optimal\""
    )


def _parse_sweep(raw: Any, index: int) -> SweepSpec:
    where = f"sweeps[{index}]"
    if not isinstance(raw, dict):
        raise ValidationError(f"{where} must be an object")
    _reject_unknown(raw, _SWEEP_FIELDS, where)
    for required in ("name", "ratios", "d_values", "outputs"):
        if required not in raw:
            raise ValidationError(f"{where} is missing {required!r}")

    name = raw["name"]
    if not isinstance(name, str) or not _NAME_RE.fullmatch(name):
        raise ValidationError(f"{where}.name must be a filesystem-safe identifier, got {name!r}")

    ratios = raw["ratios"]
    if not isinstance(ratios, list) or not ratios:
        raise ValidationError(f"{where}.ratios must be a non-empty list")
    for r in ratios:
        if isinstance(r, bool) or not isinstance(r, (int, float)) or not math.isfinite(r) or r <= 0:
            raise ValidationError(f"{where}.ratios entries must be positive numbers, got {r!r}")

    outputs = raw["outputs"]
    if not isinstance(outputs, list) or not outputs:
        raise ValidationError(f"{where}.outputs must be a non-empty list")
    for out in outputs:
        if out not in OUTPUT_KINDS:
            raise ValidationError(
                f"{where}.outputs contains {out!r}; choices are {', '.join(OUTPUT_KINDS)}"
            )
    if len(set(outputs)) != len(outputs):
        raise ValidationError(f"{where}.outputs lists the same kind twice")

    simulate = raw.get("simulate", False)
    if not isinstance(simulate, bool):
        raise ValidationError(f"{where}.simulate must be true or false")

    lmax = raw.get("lmax")
    if lmax is not None and (not isinstance(lmax, int) or isinstance(lmax, bool) or lmax < 1):
        raise ValidationError(f"{where}.lmax must be a positive integer")

    sim_raw = raw.get("sim", {})
    if not isinstance(sim_raw, dict):
        raise ValidationError(f"{where}.sim must be an object")
    _reject_unknown(sim_raw, _SIM_FIELDS, f"{where}.sim")
    sim = SimConfig(**sim_raw)

    return SweepSpec(
        name=name,
        ratios=tuple(float(r) for r in ratios),
        d_values=_parse_d_values(raw["d_values"], where),
        outputs=tuple(outputs),
        simulate=simulate,
        lmax=lmax,
        sim=sim,
    )


def parse_config(text: str) -> list[SweepSpec]:
    """Parse and validate a JSON sweep config; every problem is reported as
    a :class:`ValidationError` naming the offending field."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as err:
        raise ValidationError(f"config is not valid JSON: {err}") from None
    if not isinstance(raw, dict):
        raise ValidationError("config root must be an object")
    _reject_unknown(raw, {"sweeps"}, "config root")
    if "sweeps" not in raw or not isinstance(raw["sweeps"], list) or not raw["sweeps"]:
        raise ValidationError("config root needs a non-empty 'sweeps' list")
    specs = [_parse_sweep(entry, i) for i, entry in enumerate(raw["sweeps"])]
    names = [s.name for s in specs]
    if len(set(names)) != len(names):
        raise ValidationError("sweep names must be unique within a config")
    return specs


def load_config(path: str | Path) -> list[SweepSpec]:
    return parse_config(Path(path).read_text())


def default_lmax(ratio: float, d: int) -> int:
    """Largest queue length tabulated in a distribution table when no cap is
    given: past the flat head and deep enough into the geometric tail."""
    return max(2 * d, math.ceil(3 * ratio), 20)


def _grid_seed(master: int, ratio_index: int, d_index: int) -> int:
    seq = np.random.SeedSequence((master, ratio_index, d_index))
    return int(seq.generate_state(1, np.uint64)[0])


def _resolved_d(spec: SweepSpec, params: ModelParams) -> tuple[int, ...]:
    if spec.d_values == "optimal":
        return (find_d_star(params).d_star,)
    return spec.d_values  # type: ignore[return-value]


def _write_csv(path: Path, header: Iterable[str], rows: Iterable[tuple]) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def run_sweep(
    spec: SweepSpec,
    out_dir: str | Path,
    progress: Callable[[str], None] | None = None,
) -> list[SweepArtifact]:
    """Evaluate one sweep and write its CSV files under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    params_by_ratio = {ratio: new_params(ratio, 1.0) for ratio in spec.ratios}
    d_by_ratio = {ratio: _resolved_d(spec, params_by_ratio[ratio]) for ratio in spec.ratios}

    # plan every file first so single-file sweeps can claim the bare name
    planned: list[SweepArtifact] = []
    for kind in spec.outputs:
        if kind == "pmf":
            for ratio in spec.ratios:
                planned.extend(
                    SweepArtifact(kind, Path(), ratio, d) for d in d_by_ratio[ratio]
                )
        elif kind == "optimum":
            planned.append(SweepArtifact(kind, Path()))
        else:
            planned.extend(SweepArtifact(kind, Path(), ratio) for ratio in spec.ratios)

    def named(art: SweepArtifact) -> SweepArtifact:
        if len(planned) == 1:
            stem = spec.name
        else:
            parts = [spec.name, art.kind]
            if art.ratio is not None:
                parts.append(f"r{_fmt(art.ratio)}")
            if art.d is not None:
                parts.append(f"d{art.d}")
            stem = "__".join(parts)
        return dataclasses.replace(art, path=out_dir / f"{stem}.csv")

    artifacts = []
    for art in (named(a) for a in planned):
        if progress is not None:
            progress(f"writing {art.path.name}")
        if art.kind == "pmf":
            _write_pmf(art, params_by_ratio[art.ratio], spec)
        elif art.kind == "wait_curve":
            _write_wait_curve(art, params_by_ratio[art.ratio], d_by_ratio[art.ratio], spec)
        elif art.kind == "optimum":
            _write_optimum(art, params_by_ratio, spec)
        else:
            _write_normalized(art, params_by_ratio[art.ratio], d_by_ratio[art.ratio])
        artifacts.append(art)
    return artifacts


def _write_pmf(art: SweepArtifact, params: ModelParams, spec: SweepSpec) -> None:
    dist = StationaryDistribution.for_policy(params, art.d)
    lmax = spec.lmax if spec.lmax is not None else default_lmax(art.ratio, art.d)
    _write_csv(art.path, ("l", "pi_l"), ((l, dist.pmf(l)) for l in range(lmax + 1)))


def _write_wait_curve(
    art: SweepArtifact, params: ModelParams, ds: tuple[int, ...], spec: SweepSpec
) -> None:
    header = ["d", "w_bar", "mu_w_bar"]
    if spec.simulate:
        header += ["sim_mean", "sim_ci"]
    ratio_index = spec.ratios.index(art.ratio)

    def rows():
        for d_index, d in enumerate(ds):
            summary = mean_wait(params, d)
            row = (d, summary.w_bar, summary.w_bar_normalized)
            if spec.simulate:
                cfg = dataclasses.replace(
                    spec.sim, seed=_grid_seed(spec.sim.seed, ratio_index, d_index)
                )
                result = replicate(params, d, cfg)
                row += (result.mean_wait, result.ci_half_width)
            yield row

    _write_csv(art.path, header, rows())


def _write_optimum(
    art: SweepArtifact, params_by_ratio: dict[float, ModelParams], spec: SweepSpec
) -> None:
    def rows():
        for ratio in spec.ratios:
            params = params_by_ratio[ratio]
            mu = params.service_rate
            best = find_d_star(params)
            yield (
                ratio,
                best.d_star,
                heuristic_d_star(params),
                mu * best.w_star,
                mu * best.w_baseline,
                best.reduction,
            )

    _write_csv(
        art.path,
        ("lambda_over_mu", "d_star", "d_heuristic", "w_star_normalized", "w1_normalized", "reduction"),
        rows(),
    )


def _write_normalized(art: SweepArtifact, params: ModelParams, ds: tuple[int, ...]) -> None:
    lam, mu = params.arrival_rate, params.service_rate
    _write_csv(
        art.path,
        ("d_mu_over_lambda", "mu_w_bar"),
        ((d * mu / lam, mean_wait(params, d).w_bar_normalized) for d in ds),
    )


def run_config(
    specs: Iterable[SweepSpec],
    out_dir: str | Path,
    progress: Callable[[str], None] | None = None,
) -> list[SweepArtifact]:
    """Run every sweep in a parsed config against one output directory."""
    artifacts: list[SweepArtifact] = []
    for spec in specs:
        artifacts.extend(run_sweep(spec, out_dir, progress))
    return artifacts
