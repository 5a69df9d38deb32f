import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

from rich.console import Console
from rich.logging import RichHandler

from .constants_and_enums import (
    DEFAULT_TOLERANCES,
    SCHEMA_VERSION,
    KernelNormalization,
    Tolerances,
)
from .constructions import (
    ExceptionalSeed,
    thm1_construct,
    thm1_witness,
    thm2_construct,
    thm2_witness,
)
from .distribution import verify_stein_weiss
from .exceptions import (
    ConfigError,
    ConstructionError,
    ConvergenceError,
    HilbertExceptionalError,
)
from .hilbert import (
    PiecewiseLinearFunction,
    hilbert_indicator,
    hilbert_piecewise_linear,
    maximal_hilbert_indicator,
    quadrature_oracle,
    truncated_hilbert_indicator,
)
from .intervals import FiniteOpenSet, verify_whitney, whitney_partition
from .kk_polynomial import kk_construct, kk_split
from .level_set import sublevel_set, sum_of_roots, verify_bezout, verify_roundtrip
from .verify_all import verify_all

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

ORACLE_TOL = 1e-7

Table = Tuple[Sequence[str], List[Sequence[Any]]]

# payload keys accepted per command, besides "schema"
PAYLOAD_KEYS: Dict[str, Tuple[str, ...]] = {
    "transform": ("set", "plfunction", "points", "epsilon", "epsilons", "tolerances"),
    "levelset": ("set", "lambda", "tolerances"),
    "stein-weiss": ("set", "lambdas", "tolerances"),
    "whitney": ("set", "depth", "tolerances"),
    "construct-thm1": ("seed_points", "depth", "lambda", "radius", "tolerances"),
    "construct-thm2": ("seed_points", "depth", "eta", "radius", "tolerances"),
    "kk": ("set", "delta", "m_budget", "approx_tol", "tolerances"),
    "verify-all": ("cases", "tolerances"),
}
COMMANDS = tuple(PAYLOAD_KEYS)


@dataclass
class RunConfig:
    """
    One CLI invocation

    Attributes:
        command (str): subcommand name
        payload (dict): decoded input JSON, checked against PAYLOAD_KEYS
        out (Path, optional): directory for the JSON and CSV artifacts
        normalization (KernelNormalization, optional): kernel flag, per command
            default when None
        tolerances (Tolerances): defaults with the overrides applied
        seed (int): corpus seed for verify-all
        depth (int, optional): Whitney or construction depth
        verbose (bool): debug logging
    """

    command: str
    payload: Dict[str, Any] = field(default_factory=dict)
    out: Optional[Path] = None
    normalization: Optional[KernelNormalization] = None
    tolerances: Tolerances = DEFAULT_TOLERANCES
    seed: int = 0
    depth: Optional[int] = None
    verbose: bool = False

    def __post_init__(self):
        if self.command not in PAYLOAD_KEYS:
            raise ConfigError(f"RunConfig: unknown command {self.command!r}")
        if not isinstance(self.payload, dict):
            raise ConfigError("RunConfig: the input must be a JSON object")
        schema = self.payload.get("schema", SCHEMA_VERSION)
        if schema != SCHEMA_VERSION:
            raise ConfigError(
                f"RunConfig: schema {schema!r} is not supported,"
                f" expected {SCHEMA_VERSION}"
            )
        allowed = set(PAYLOAD_KEYS[self.command]) | {"schema"}
        unknown = sorted(set(self.payload) - allowed)
        if unknown:
            raise ConfigError(
                f"RunConfig: unknown fields for {self.command}: {', '.join(unknown)}"
            )
        if self.depth is not None and self.depth < 1:
            raise ConfigError(f"RunConfig: depth must be >= 1, got {self.depth}")
        overrides = self.payload.get("tolerances", {})
        if not isinstance(overrides, dict):
            raise ConfigError("RunConfig: tolerances must be an object")
        try:
            self.tolerances = self.tolerances.replace(**overrides)
        except TypeError as err:
            raise ConfigError(f"RunConfig: {err}") from err
        except ValueError as err:
            raise ConfigError(str(err)) from err

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        payload = _load_payload(args.input) if args.input else {}
        tolerances = DEFAULT_TOLERANCES
        if args.tol is not None:
            try:
                tolerances = tolerances.replace(
                    roundtrip_tol=args.tol,
                    bezout_tol=args.tol,
                    stein_weiss_rel_tol=args.tol,
                )
            except ValueError as err:
                raise ConfigError(str(err)) from err
        normalization = None
        if args.kernel_normalization:
            normalization = KernelNormalization(args.kernel_normalization)
        return cls(
            command=args.command,
            payload=payload,
            out=Path(args.out) if args.out else None,
            normalization=normalization,
            tolerances=tolerances,
            seed=args.seed,
            depth=args.depth,
            verbose=args.verbose,
        )

    def require(self, key: str) -> Any:
        if key not in self.payload:
            raise ConfigError(f"{self.command}: missing field {key!r}")
        return self.payload[key]

    def finite_open_set(self, key: str = "set") -> FiniteOpenSet:
        try:
            return FiniteOpenSet.from_json(self.require(key))
        except (TypeError, ValueError) as err:
            raise ConfigError(f"{self.command}: invalid {key!r}, {err}") from err


@dataclass
class CommandResult:
    passed: bool
    report: Dict[str, Any]
    tables: Dict[str, Table] = field(default_factory=dict)


def _load_payload(source: str) -> Dict[str, Any]:
    try:
        if source == "-":
            return json.load(sys.stdin)
        with open(source, "r") as f:
            return json.load(f)
    except OSError as err:
        raise ConfigError(f"cannot read input {source}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"malformed JSON in {source}: {err}") from err


def _transform_source(
    config: RunConfig,
) -> Union[FiniteOpenSet, PiecewiseLinearFunction]:
    has_set, has_function = "set" in config.payload, "plfunction" in config.payload
    if has_set == has_function:
        raise ConfigError(
            f"{config.command}: give exactly one of 'set' and 'plfunction'"
        )
    if has_set:
        return config.finite_open_set()
    spec = config.payload["plfunction"]
    try:
        return PiecewiseLinearFunction(
            tuple(float(t) for t in spec["nodes"]),
            tuple(float(v) for v in spec["values"]),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise ConfigError(f"{config.command}: invalid 'plfunction', {err}") from err


def _transform_epsilons(config: RunConfig) -> List[float]:
    epsilons = list(config.payload.get("epsilons", []))
    if "epsilon" in config.payload:
        epsilons.append(config.payload["epsilon"])
    try:
        epsilons = [float(eps) for eps in epsilons]
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{config.command}: invalid epsilon, {err}") from err
    if any(not eps > 0 for eps in epsilons):
        raise ConfigError(f"{config.command}: epsilons must be positive")
    return epsilons


def _run_transform(config: RunConfig) -> CommandResult:
    source = _transform_source(config)
    normalization = config.normalization or KernelNormalization.PI
    points = [float(x) for x in config.require("points")]
    epsilons = _transform_epsilons(config)

    def value_at(x: float, eps: float) -> float:
        if isinstance(source, PiecewiseLinearFunction):
            return hilbert_piecewise_linear(source, x, eps, normalization)
        if eps > 0:
            return truncated_hilbert_indicator(source, x, eps, normalization)
        return hilbert_indicator(source, x, normalization)

    rows = []
    entries = []
    worst_oracle = 0.0
    for x in points:
        value = value_at(x, 0.0)
        rows.append((x, None, value, None, None))
        truncated = []
        for eps in epsilons:
            truncated_value = value_at(x, eps)
            oracle = quadrature_oracle(source, x, eps, normalization, config.tolerances)
            diff = abs(truncated_value - oracle)
            worst_oracle = max(worst_oracle, diff)
            rows.append((x, eps, truncated_value, oracle, diff))
            truncated.append(
                {
                    "epsilon": eps,
                    "value": truncated_value,
                    "oracle": oracle,
                    "abs_diff": diff,
                }
            )
        entry = {"x": x, "value": value, "truncated": truncated}
        if isinstance(source, FiniteOpenSet):
            entry["maximal_lower_bound"] = maximal_hilbert_indicator(
                source, x, normalization=normalization
            )
        entries.append(entry)
    report = {
        "normalization": normalization.value,
        "source": "set" if isinstance(source, FiniteOpenSet) else "plfunction",
        "values": entries,
        "max_oracle_error": worst_oracle,
    }
    return CommandResult(
        passed=worst_oracle <= ORACLE_TOL,
        report=report,
        tables={"transform": (("x", "epsilon", "value", "oracle", "abs_diff"), rows)},
    )


def _run_levelset(config: RunConfig) -> CommandResult:
    F = config.finite_open_set()
    lam = float(config.require("lambda"))
    normalization = config.normalization or KernelNormalization.BARE
    tolerances = config.tolerances
    level_config = sublevel_set(F, lam, tolerances)
    bezout = verify_bezout(level_config)
    roundtrip = verify_roundtrip(level_config, normalization, tolerances)
    computed, formula = sum_of_roots(level_config)
    report = level_config.to_dict()
    report.update(
        {
            "bezout_residual": bezout,
            "sum_of_roots": {"computed": computed, "formula": formula},
            "roundtrip": roundtrip.to_dict(),
            "interlaced": level_config.interlaced,
        }
    )
    passed = (
        level_config.interlaced
        and level_config.measure_relative_error <= tolerances.measure_rel_tol
        and bezout <= tolerances.bezout_tol
        and roundtrip.passed
    )
    return CommandResult(passed=passed, report=report)


def _run_stein_weiss(config: RunConfig) -> CommandResult:
    E = config.finite_open_set()
    lambdas = [float(lam) for lam in config.require("lambdas")]
    report = verify_stein_weiss(E, lambdas, config.tolerances)
    return CommandResult(
        passed=report.passed,
        report=report.to_dict(),
        tables={
            "stein_weiss": (
                ("lambda", "exact", "formula", "rel_error"),
                report.rows(),
            )
        },
    )


def _depth(config: RunConfig, default: int) -> int:
    if config.depth is not None:
        return config.depth
    depth = int(config.payload.get("depth", default))
    if depth < 1:
        raise ConfigError(f"{config.command}: depth must be >= 1, got {depth}")
    return depth


def _run_whitney(config: RunConfig) -> CommandResult:
    G = config.finite_open_set()
    partition = whitney_partition(G, _depth(config, 6))
    report = verify_whitney(partition, config.tolerances)
    cells = [
        (cell.left, cell.right, cell.component, cell.level, cell.side)
        for cell in partition.cells
    ]
    return CommandResult(
        passed=report.passed,
        report={
            "set": G.to_json(),
            "depth": partition.depth,
            "cells": [list(cell) for cell in cells],
            "remainder_measure": partition.remainder_measure,
            "report": report.to_dict(),
        },
        tables={"whitney": (("left", "right", "component", "level", "side"), cells)},
    )


def _seed(config: RunConfig) -> ExceptionalSeed:
    points = config.require("seed_points")
    if not points:
        raise ConfigError(f"{config.command}: seed_points must be nonempty")
    try:
        radius = float(config.payload.get("radius", 0.5))
        return ExceptionalSeed.around([float(p) for p in points], radius)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{config.command}: invalid seed, {err}") from err


def _witness_table(witnesses) -> Table:
    rows = [(w.x,) + row for w in witnesses for row in w.rows()]
    return ("x", "n", "epsilon", "value", "A_bound", "B_count"), rows


def _run_thm1(config: RunConfig) -> CommandResult:
    seed = _seed(config)
    construction = thm1_construct(
        seed,
        _depth(config, 6),
        float(config.payload.get("lambda", 1.0)),
        config.tolerances,
    )
    witnesses = [thm1_witness(construction, x) for x in seed.points]
    report = construction.to_dict()
    report["witnesses"] = [w.to_dict() for w in witnesses]
    return CommandResult(
        passed=all(w.passed for w in witnesses),
        report=report,
        tables={"witness": _witness_table(witnesses)},
    )


def _run_thm2(config: RunConfig) -> CommandResult:
    seed = _seed(config)
    construction = thm2_construct(
        seed,
        _depth(config, 5),
        float(config.payload.get("eta", 1.0)),
        config.tolerances,
    )
    witnesses = [thm2_witness(construction, x) for x in seed.points]
    report = construction.to_dict()
    report["witnesses"] = [w.to_dict() for w in witnesses]
    report["continuous"] = construction.f.is_continuous()
    return CommandResult(
        passed=construction.f.is_continuous() and all(w.passed for w in witnesses),
        report=report,
        tables={"witness": _witness_table(witnesses)},
    )


def _run_kk(config: RunConfig) -> CommandResult:
    F = config.finite_open_set()
    options = {"tolerances": config.tolerances}
    for key in ("delta", "approx_tol"):
        if key in config.payload:
            options[key] = float(config.payload[key])
    if "m_budget" in config.payload:
        options["m_budget"] = int(config.payload["m_budget"])
    header = ("x", "max_partial_sum", "bound")
    if F and F.infimum >= 0 and F.supremum <= math.pi:
        result = kk_construct(F, **options)
        return CommandResult(
            passed=result.passed,
            report=result.to_dict(),
            tables={"kk": (header, result.rows())},
        )
    split = kk_split(F)
    combined = split.construct(**options)
    rows = [row for piece in combined.pieces for row in piece.rows()]
    return CommandResult(
        passed=all(piece.passed for piece in combined.pieces)
        and combined.first_piece_passed,
        report=combined.to_dict(),
        tables={"kk": (header, rows)},
    )


def _run_verify_all(config: RunConfig) -> CommandResult:
    console = Console(stderr=True)
    cases = config.payload.get("cases")
    with console.status("Running the verification corpus", spinner="dots") as status:
        summary = verify_all(
            seed=config.seed,
            tolerances=config.tolerances,
            cases=cases,
            progress=lambda name: status.update(
                f"Running the verification corpus: {name}"
            ),
        )
    return CommandResult(
        passed=summary.passed,
        report=summary.to_dict(),
        tables={"verify_all": (("check", "passed", "worst_margin"), summary.rows())},
    )


RUNNERS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    "transform": _run_transform,
    "levelset": _run_levelset,
    "stein-weiss": _run_stein_weiss,
    "whitney": _run_whitney,
    "construct-thm1": _run_thm1,
    "construct-thm2": _run_thm2,
    "kk": _run_kk,
    "verify-all": _run_verify_all,
}


def _finite(value: Any) -> Any:
    # inf and nan are not JSON; endpoint singularities become null
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    return value


def _dumps(payload: Dict[str, Any]) -> str:
    return json.dumps(_finite(payload), sort_keys=True, indent=2, allow_nan=False)


def _write_artifacts(config: RunConfig, result: CommandResult, document: str) -> None:
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    stem = config.command.replace("-", "_")
    (out / f"{stem}.json").write_text(document + "\n")
    for name, (header, rows) in result.tables.items():
        with open(out / f"{name}.csv", "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)


def run(config: RunConfig) -> int:
    """
    Dispatch one command, print its JSON report and write the artifacts

    Returns:
        int: EXIT_PASS, or EXIT_FAIL when a verification fails
    """
    logger.debug(f"run: {config.command} with {sorted(config.payload)}")
    result = RUNNERS[config.command](config)
    document = _dumps(
        {
            "command": config.command,
            "schema": SCHEMA_VERSION,
            "passed": result.passed,
            **result.report,
        }
    )
    print(document)
    if config.out is not None:
        _write_artifacts(config, result, document)
    if not result.passed:
        logger.warning(f"run: {config.command} failed verification")
        return EXIT_FAIL
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hilbert-exceptional",
        description=(
            "Hilbert transforms of interval unions, level set inversion and"
            " exceptional set constructions."
        ),
    )
    parser.add_argument("command", choices=COMMANDS, help="what to compute")
    parser.add_argument("--input", help="JSON input file, - for stdin")
    parser.add_argument("--out", help="directory for JSON and CSV artifacts")
    parser.add_argument(
        "--kernel-normalization",
        choices=[n.value for n in KernelNormalization],
        dest="kernel_normalization",
        help="pi: (1/pi) kernel, bare: log sum (defaults per command)",
    )
    parser.add_argument("--tol", type=float, help="verification tolerance override")
    parser.add_argument(
        "--seed", type=int, default=0, help="corpus seed for verify-all (default: 0)"
    )
    parser.add_argument("--depth", type=int, help="Whitney or construction depth")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    return parser


def _error(kind: str, err: Exception) -> None:
    message = json.dumps({"error": kind, "message": str(err)}, sort_keys=True)
    sys.stderr.write(message + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_PASS if err.code == 0 else EXIT_CONFIG

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )
    try:
        config = RunConfig.from_args(args)
        return run(config)
    except ConfigError as err:
        _error("config", err)
        return EXIT_CONFIG
    except (ConstructionError, ConvergenceError) as err:
        _error("verification", err)
        return EXIT_FAIL
    except (HilbertExceptionalError, ValueError, TypeError) as err:
        _error("config", err)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
