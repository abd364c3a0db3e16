"""Command line interface.

Subcommands ``interp``, ``upsample``, ``swelling``, ``verify`` and
``search-extrapolation``. Data go to ``--out`` or stdout, diagnostics to stderr. The exit
status is 0 on success, 1 if a verified property is violated and 2 for invalid input.
"""

import argparse
import json
import logging
import sys

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple

import pandas as pd

from .ensembles import EnsembleSpec, RankMode
from .exceptions import PsdRootInterpolationError, ValidationError
from .geodesics import GeodesicSpec, path_point, swelling_profile
from .metrics import MetricKind
from .tensor_field import (
    CSV_FLOAT_FORMAT,
    OutputFormat,
    format_field,
    format_tensor,
    load_field,
    load_tensor,
    upsample,
)
from .verifier import (
    DEFAULT_P_VALUES,
    TOL_REL,
    PropertyId,
    reports_to_frame,
    reports_to_json,
    run_all,
    search_extrapolation_counterexamples,
)


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT_ERROR = 2

SWELLING_METRICS = (MetricKind.EUCLIDEAN_ROOT, MetricKind.PROCRUSTES)


@dataclass
class CliConfig:
    """Validated settings of one CLI run."""

    command: str
    inputs: Tuple[str, ...] = ()
    metric: MetricKind = MetricKind.PROCRUSTES
    metrics: Tuple[MetricKind, ...] = SWELLING_METRICS
    p: float = 0.5
    steps: int = 11
    p_min: float = 0.0
    p_max: float = 1.0
    factor: int = 2
    trials: int = 1000
    dim: int = 3
    seed: int = 42
    rank_mode: RankMode = RankMode.MIXED
    properties: Optional[Tuple[PropertyId, ...]] = None
    p_values: Tuple[float, ...] = DEFAULT_P_VALUES
    output_format: OutputFormat = OutputFormat.JSON
    out: Optional[str] = None
    ensemble: Optional[EnsembleSpec] = field(default=None, repr=False)

    @classmethod
    def from_args(cls, args):
        """Build and validate a config from parsed arguments.

        Raises
        ------
        ValidationError
            If the settings of the chosen subcommand are inconsistent.

        """
        options = {k: v for k, v in vars(args).items() if v is not None and k != "log_level"}
        if "metrics" in options:
            options["metrics"] = tuple(options["metrics"])
        if "properties" in options:
            options["properties"] = tuple(options["properties"])
        if "p_values" in options:
            options["p_values"] = tuple(options["p_values"])
        if "format" in options:
            options["output_format"] = options.pop("format")
        options["inputs"] = tuple(options.get("inputs", ()))
        cfg = cls(**options)
        cfg.validate()
        return cfg

    def validate(self):
        """Convert choices to enums and check the settings of the subcommand."""
        self.metric = MetricKind(self.metric)
        self.metrics = tuple(MetricKind(m) for m in self.metrics)
        self.output_format = OutputFormat(self.output_format)
        self.rank_mode = RankMode(self.rank_mode)
        if self.properties is not None:
            self.properties = tuple(PropertyId(p) for p in self.properties)
        if self.command == "upsample" and self.factor < 2:
            raise ValidationError(f"--factor must be at least 2, got {self.factor}")
        if self.command == "swelling":
            if self.steps < 2:
                raise ValidationError(f"--steps must be at least 2, got {self.steps}")
            if not self.p_min < self.p_max:
                raise ValidationError("--p-min must be smaller than --p-max")
        if self.command == "search-extrapolation":
            inside = [p for p in self.p_values if 0.0 <= p <= 1.0]
            if inside:
                raise ValidationError(f"--p-values must lie outside [0, 1], got {inside}")
        if self.command in ("verify", "search-extrapolation"):
            self.ensemble = EnsembleSpec(
                dim=self.dim, trials=self.trials, seed=self.seed, rank_mode=self.rank_mode
            )


def _emit(text, out):
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
        logger.info("wrote %s", out)


def interp_pair(cfg):
    """Print the path point between two single-tensor files."""
    a_path, b_path = cfg.inputs
    spec = GeodesicSpec(cfg.metric, load_tensor(a_path), load_tensor(b_path))
    _emit(format_tensor(path_point(spec, cfg.p), cfg.output_format), cfg.out)
    return EXIT_OK


def upsample_field(cfg):
    """Upsample a field file and write the result."""
    (in_path,) = cfg.inputs
    refined = upsample(load_field(in_path, strict=True), cfg.factor, cfg.metric)
    _emit(format_field(refined, cfg.output_format), cfg.out)
    return refined


def upsample_cmd(cfg):
    """Run ``upsample`` and write the refined field."""
    upsample_field(cfg)
    return EXIT_OK


def swelling_table(D1, D2, metrics, steps, p_min=0.0, p_max=1.0):
    """Determinant roots along the paths of several metrics, one column per metric.

    Returns
    -------
    table: pandas.DataFrame
        Indexed by ``p``.
    flagged: list of float or None
        Parameters in ``[0, 1]`` where the Procrustes value exceeds the Euclidean-root
        value by more than ``TOL_REL`` relative. None unless both metrics are present.

    """
    columns = {
        metric.value: swelling_profile(GeodesicSpec(metric, D1, D2), steps, p_min, p_max)
        for metric in metrics
    }
    table = pd.DataFrame(columns)
    flagged = None
    root, procrustes = MetricKind.EUCLIDEAN_ROOT.value, MetricKind.PROCRUSTES.value
    if root in table and procrustes in table:
        inside = table[(table.index >= 0.0) & (table.index <= 1.0)]
        excess = inside[procrustes] > inside[root] * (1 + TOL_REL) + TOL_REL
        flagged = [float(p) for p in inside.index[excess]]
    return table, flagged


def swelling_report(cfg):
    """Print the swelling table of two single-tensor files."""
    a_path, b_path = cfg.inputs
    table, flagged = swelling_table(
        load_tensor(a_path), load_tensor(b_path), cfg.metrics, cfg.steps, cfg.p_min, cfg.p_max
    )
    if cfg.output_format is OutputFormat.JSON:
        record = table.reset_index().to_dict(orient="list")
        record["flagged_p"] = flagged
        text = json.dumps(record)
    else:
        text = table.to_csv(float_format=CSV_FLOAT_FORMAT)
        if flagged is not None:
            text += f"# procrustes exceeds euclidean-root at p = {flagged or 'none'}\n"
    if flagged:
        logger.warning("Procrustes path swells beyond the Euclidean-root path at p = %s", flagged)
    _emit(text, cfg.out)
    return EXIT_OK


def _emit_reports(reports, cfg):
    if cfg.output_format is OutputFormat.JSON:
        text = reports_to_json(reports)
    else:
        text = reports_to_frame(reports).to_csv(index=False, float_format=CSV_FLOAT_FORMAT)
    _emit(text, cfg.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATION


def verify_cmd(cfg):
    """Run verification campaigns and write their reports."""
    return _emit_reports(run_all(cfg.ensemble, cfg.properties, cfg.p_values), cfg)


def search_cmd(cfg):
    """Run the extrapolation search and write its report."""
    return _emit_reports([search_extrapolation_counterexamples(cfg.ensemble, cfg.p_values)], cfg)


def _add_output_args(parser):
    parser.add_argument(
        "--format", choices=[f.value for f in OutputFormat], help="Output format (json)."
    )
    parser.add_argument("--out", help="Output file. Defaults to stdout.")


def _add_ensemble_args(parser):
    parser.add_argument("--trials", type=int, help="Trials per property (1000).")
    parser.add_argument("--dim", type=int, help="Matrix dimension, 2 to 8 (3).")
    parser.add_argument("--seed", type=int, help="Random seed (42).")
    parser.add_argument(
        "--rank-mode", choices=[m.value for m in RankMode], help="Rank of the draws (mixed)."
    )
    parser.add_argument(
        "--p-values",
        type=float,
        nargs="+",
        help="Extrapolation parameters outside [0, 1] (-1 -0.5 1.5 2).",
    )


def build_parser():
    """Argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="psd-root-interpolation",
        description="Interpolate PSD tensors along square-root geodesics and verify "
        "the inequalities behind them.",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Verbosity of the diagnostics on stderr.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    metric_kw = dict(choices=[m.value for m in MetricKind])

    interp = commands.add_parser("interp", help="Path point between two tensors.")
    interp.add_argument("inputs", nargs=2, metavar="TENSOR", help="Single-tensor files D1, D2.")
    interp.add_argument("--metric", help="Geodesic (procrustes).", **metric_kw)
    interp.add_argument("--p", type=float, help="Path parameter, D(1) = D1, D(0) = D2 (0.5).")
    _add_output_args(interp)

    up = commands.add_parser("upsample", help="Refine a tensor field along geodesics.")
    up.add_argument("inputs", nargs=1, metavar="FIELD", help="Field file.")
    up.add_argument("--factor", type=int, help="Refinement factor, at least 2 (2).")
    up.add_argument("--metric", help="Geodesic (procrustes).", **metric_kw)
    _add_output_args(up)

    swell = commands.add_parser("swelling", help="Determinant roots along paths.")
    swell.add_argument("inputs", nargs=2, metavar="TENSOR", help="Single-tensor files D1, D2.")
    swell.add_argument(
        "--metric",
        dest="metrics",
        action="append",
        help="Geodesic, may be repeated (euclidean-root and procrustes).",
        **metric_kw,
    )
    swell.add_argument("--steps", type=int, help="Number of parameters (11).")
    swell.add_argument("--p-min", type=float, help="First parameter (0).")
    swell.add_argument("--p-max", type=float, help="Last parameter (1).")
    _add_output_args(swell)

    verify = commands.add_parser("verify", help="Run property campaigns.")
    _add_ensemble_args(verify)
    verify.add_argument(
        "--properties",
        nargs="+",
        choices=[p.value for p in PropertyId],
        help="Properties to verify (all).",
    )
    _add_output_args(verify)

    search = commands.add_parser(
        "search-extrapolation", help="Search for extrapolation non-ordering witnesses."
    )
    _add_ensemble_args(search)
    _add_output_args(search)
    return parser


_COMMANDS = {
    "interp": interp_pair,
    "upsample": upsample_cmd,
    "swelling": swelling_report,
    "verify": verify_cmd,
    "search-extrapolation": search_cmd,
}


def main(argv=None):
    """Entry point of the ``psd-root-interpolation`` console script."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = CliConfig.from_args(args)
        return _COMMANDS[cfg.command](cfg)
    except (PsdRootInterpolationError, ValueError, OSError) as err:
        logger.error("%s: %s", type(err).__name__, err)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
