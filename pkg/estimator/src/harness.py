"""
Command line and experiment runner.

subcommands:
    generate    write a seeded Setting A/B dataset as CSV
    estimate    run methods on a CSV dataset
    experiment  multi-trial comparison across alphas and sample sizes
    oracle      brute-force minimum-l0 indicator of a tiny CSV dataset
    indicator   per-sample h of the l1 and lp relaxations at the median
    calibrate   sigma from a CSV of known-clean rows (heuristic)

Every subcommand accepts --config FILE with flat `key = value` lines mirroring
the long flag names; flags given on the command line win.
"""

# standard libs
import argparse
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

# 3rd party
import numpy as np
import pandas as pd

# local
import datagen
import methods
import oracle
import solvers
import tables
from algorithm1 import PRACTICAL_ITERATION_CAP
from baselines import coordinate_median
from data_loader import as_matrix, feature_columns, ingest_csv, load_oracle_mean, save_csv
from indicator import DEFAULT_TAU, MIN_C1_SQUARED, MomentBound

logger = logging.getLogger(__name__)

# constants
DEFAULT_TRIALS = 20
DEFAULT_SEED = 0
DEFAULT_METHODS = ["filter", "l1", "lp"]
FORMATS = ["csv", "json"]
COLUMNS = ["method", "alpha", "d", "n", "trial", "recovery_error", "outer_iterations", "wall_time_ms"]
AGGREGATE_TRIAL = "mean"
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_METHOD_FAILURE = 3
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off"}


class ConfigError(ValueError):
    pass


class TraceViolationError(RuntimeError):
    pass


"""
============================================================================================
Experiment
============================================================================================
"""


@dataclass(frozen=True)
class ExperimentSpec:
    setting: str = "b"
    d: int = 100
    ns: tuple = (2000,)
    alphas: tuple = (0.2,)
    trials: int = DEFAULT_TRIALS
    methods: tuple = tuple(DEFAULT_METHODS)
    sigma: float = 1.0
    c1_squared: float = MIN_C1_SQUARED
    p: float = solvers.DEFAULT_P
    tau: float = DEFAULT_TAU
    seed: int = DEFAULT_SEED
    outer_reweights: int = solvers.DEFAULT_OUTER_REWEIGHTS
    variant: str = solvers.VARIANTS[0]
    timing: bool = False
    # path of a one-row reference mean for unlabeled CSV settings
    oracle: Optional[str] = None

    def __post_init__(self):
        setting = self.setting.lower() if self.setting.lower() in ("a", "b") else self.setting
        object.__setattr__(self, "setting", setting)
        object.__setattr__(self, "ns", tuple(int(n) for n in self.ns))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "methods", tuple(self.methods))

        if setting not in ("a", "b") and not os.path.isfile(setting):
            raise ConfigError(f"setting must be 'a', 'b' or an existing CSV path, got {self.setting!r}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not self.alphas or any(not 0.0 <= a < 0.5 for a in self.alphas):
            raise ConfigError(f"alphas must be a non-empty subset of [0, 0.5), got {list(self.alphas)}")
        if not self.ns or any(n < 2 for n in self.ns):
            raise ConfigError(f"sample sizes must be >= 2, got {list(self.ns)}")
        if setting in ("a", "b") and self.d < (2 if setting == "b" else 1):
            raise ConfigError(f"d={self.d} is too small for setting {setting}")
        if not self.methods:
            raise ConfigError("at least one method is required")
        unknown = [m for m in self.methods if m not in methods.METHOD_LIST]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}, choose from {methods.METHOD_LIST}")
        if self.sigma <= 0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if self.c1_squared < MIN_C1_SQUARED:
            raise ConfigError(f"c1sq must be >= {MIN_C1_SQUARED}, got {self.c1_squared}")
        if not 0.0 < self.p < 1.0:
            raise ConfigError(f"p must lie in (0, 1), got {self.p}")
        if not 0.0 <= self.tau < 1.0:
            raise ConfigError(f"tau must lie in [0, 1), got {self.tau}")
        if self.variant not in solvers.VARIANTS:
            raise ConfigError(f"variant must be one of {solvers.VARIANTS}, got {self.variant!r}")
        if self.outer_reweights < 1:
            raise ConfigError(f"reweights must be >= 1, got {self.outer_reweights}")

    @property
    def from_csv(self):
        return self.setting not in ("a", "b")

    def params(self):
        return methods.MethodParams(
            sigma=self.sigma,
            c1_squared=self.c1_squared,
            p=self.p,
            tau=self.tau,
            outer_reweights=self.outer_reweights,
            variant=self.variant,
        )

    def to_dict(self):
        spec = asdict(self)
        spec["ns"] = list(self.ns)
        spec["alphas"] = list(self.alphas)
        spec["methods"] = list(self.methods)
        return spec


@dataclass(frozen=True)
class ResultRow:
    method: str
    alpha: float
    d: int
    n: int
    # trial index, or AGGREGATE_TRIAL for the per-(method, n, alpha) mean
    trial: object
    recovery_error: float
    outer_iterations: float
    wall_time_ms: Optional[float] = None
    error: str = ""
    l0_trace: tuple = field(default=(), compare=False)

    @property
    def failed(self):
        return bool(self.error)


def check_trace(l0_trace, n):
    """Strict decrease before the final entry and at most min(n, 50) entries."""
    cap = min(n, PRACTICAL_ITERATION_CAP)
    if not l0_trace:
        raise TraceViolationError("empty l0 trace")
    if len(l0_trace) > cap:
        raise TraceViolationError(f"{len(l0_trace)} outer iterations exceed the cap {cap}")
    head = list(l0_trace[:-1])
    for t, (a, b) in enumerate(zip(head, head[1:])):
        if not a > b:
            raise TraceViolationError(f"l0 trace {list(l0_trace)} does not decrease at iteration {t + 1}")


def _case_dataset(spec, n, alpha, trial):
    if spec.from_csv:
        dataset = ingest_csv(spec.setting)
        oracle_mean = load_oracle_mean(spec.oracle) if spec.oracle else None
        return datagen.from_dataset(dataset, oracle_mean)
    return datagen.generate(spec.setting, spec.d, n, alpha, spec.seed + trial)


def _run_method(spec, method, ds, alpha, trial):
    estimator = methods.get_method(method)
    t0 = time.perf_counter()
    try:
        outcome = estimator(np.array(ds.values), spec.params())
    except Exception as e:  # noqa: BLE001 - recorded as an error row
        logger.warning("%s failed on alpha=%g n=%d trial %d: %s", method, alpha, ds.n, trial, e)
        return ResultRow(method, alpha, ds.d, ds.n, trial, math.nan, 0, None, error=f"{type(e).__name__}: {e}")
    t1 = time.perf_counter()

    if method in methods.L0_METHODS:
        check_trace(outcome.l0_trace, ds.n)

    return ResultRow(
        method=method,
        alpha=alpha,
        d=ds.d,
        n=ds.n,
        trial=trial,
        recovery_error=datagen.recovery_error(outcome.mean, ds),
        outer_iterations=outcome.outer_iterations,
        wall_time_ms=(t1 - t0) * 1000.0 if spec.timing else None,
        l0_trace=tuple(outcome.l0_trace),
    )


def run_case(spec, n, alpha, trial):
    """All methods on one generated dataset; the unit of work for the pool."""
    ds = _case_dataset(spec, n, alpha, trial)
    logger.info("trial %d/%d: alpha=%g n=%d", trial + 1, spec.trials, alpha, ds.n)
    return [_run_method(spec, method, ds, alpha, trial) for method in spec.methods]


def _cases(spec):
    if spec.from_csv:
        # a fixed dataset: one case, alpha is the labeled outlier fraction
        ds = _case_dataset(spec, None, None, 0)
        return [(ds.n, datagen.outlier_fraction(ds), 0)]
    return [(n, alpha, trial) for n in spec.ns for alpha in spec.alphas for trial in range(spec.trials)]


def aggregate(rows):
    """Per-(method, n, alpha) mean over the trials that did not fail."""
    ok = [row for row in rows if not row.failed]
    first = rows[0]
    if not ok:
        return ResultRow(first.method, first.alpha, first.d, first.n, AGGREGATE_TRIAL, math.nan, math.nan, None, error="all trials failed")

    times = [row.wall_time_ms for row in ok if row.wall_time_ms is not None]
    return ResultRow(
        method=first.method,
        alpha=first.alpha,
        d=first.d,
        n=first.n,
        trial=AGGREGATE_TRIAL,
        recovery_error=float(np.mean([row.recovery_error for row in ok])),
        outer_iterations=float(np.mean([row.outer_iterations for row in ok])),
        wall_time_ms=float(np.mean(times)) if times else None,
    )


def run_experiment(spec, workers=1):
    """Rows ordered by (method, n, alpha, trial), each group followed by its
    aggregate row, independent of worker completion order."""
    cases = _cases(spec)
    if workers > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_case, spec, *case) for case in cases]
            trial_rows = [row for future in futures for row in future.result()]
    else:
        trial_rows = [row for case in cases for row in run_case(spec, *case)]

    order = {method: i for i, method in enumerate(spec.methods)}
    trial_rows.sort(key=lambda row: (order[row.method], row.n, row.alpha, row.trial))

    rows = []
    group = []
    for row in trial_rows:
        if group and (row.method, row.n, row.alpha) != (group[0].method, group[0].n, group[0].alpha):
            rows.extend(group + [aggregate(group)])
            group = []
        group.append(row)
    rows.extend(group + [aggregate(group)])
    return rows


def indicator_profile(data, bound, cfg=solvers.IrlsConfig(), tau=DEFAULT_TAU, labels=None):
    """h of the l1 and lp relaxations with the center fixed at the coordinate-wise median."""
    values = as_matrix(data)
    center = coordinate_median(values)
    h_l1, _ = solvers.solve_l1(values, center, bound, tau=tau)
    h_lp, _ = solvers.solve_lp(values, center, bound, cfg, tau=tau)

    frame = pd.DataFrame({"index": np.arange(values.shape[0]), "h_l1": h_l1.h, "h_lp": h_lp.h})
    if labels is not None:
        frame["is_inlier"] = np.asarray(labels, dtype=bool).astype(int)
    return frame


"""
============================================================================================
Output
============================================================================================
"""


def format_number(value):
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    # shortest repr round-trips and is stable across runs
    return repr(value)


def rows_to_frame(rows):
    records = []
    for row in rows:
        records.append(
            {
                "method": row.method,
                "alpha": format_number(row.alpha),
                "d": str(row.d),
                "n": str(row.n),
                "trial": str(row.trial),
                "recovery_error": format_number(row.recovery_error),
                "outer_iterations": format_number(row.outer_iterations),
                "wall_time_ms": format_number(row.wall_time_ms),
            }
        )
    return pd.DataFrame(records, columns=COLUMNS)


def _json_number(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return value


def rows_to_json(rows, spec):
    payload = {
        "spec": spec.to_dict(),
        "rows": [
            {
                "method": row.method,
                "alpha": row.alpha,
                "d": row.d,
                "n": row.n,
                "trial": row.trial,
                "recovery_error": _json_number(row.recovery_error),
                "outer_iterations": _json_number(row.outer_iterations),
                "wall_time_ms": _json_number(row.wall_time_ms),
                "error": row.error or None,
            }
            for row in rows
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def render_results(rows, spec, fmt="csv"):
    if fmt == "csv":
        return rows_to_frame(rows).to_csv(index=False, lineterminator="\n")
    elif fmt == "json":
        return rows_to_json(rows, spec)
    else:
        raise ConfigError(f"format must be one of {FORMATS}, got {fmt!r}")


def write_output(text, path):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as f:
        f.write(text)
    logger.info("wrote %s", path)


def read_results(path):
    """Result CSV back into a frame; the trial column stays textual."""
    return pd.read_csv(path, dtype={"method": str, "trial": str}, keep_default_na=False, na_values=["nan"])


"""
============================================================================================
Configuration
============================================================================================
"""

# name: (type, repeatable, help)
OPTIONS = {
    "setting": (str, False, "'a', 'b' or a CSV path (experiment only)"),
    "d": (int, False, "dimension"),
    "n": (int, True, "sample size; repeat for a sample-size sweep"),
    "alpha": (float, True, "corruption fraction in [0, 0.5); repeatable"),
    "trials": (int, False, f"trials per (alpha, n), default {DEFAULT_TRIALS}"),
    "methods": (str, True, f"comma-separated subset of {methods.METHOD_LIST}"),
    "sigma": (float, False, "spectral bound sigma on the inlier covariance"),
    "c1sq": (float, False, f"constant c1^2 >= {MIN_C1_SQUARED}"),
    "p": (float, False, "exponent of the lp relaxation"),
    "tau": (float, False, "support threshold"),
    "reweights": (int, False, "outer reweighting rounds of the lp path"),
    "variant": (str, False, f"lp majorizer, one of {solvers.VARIANTS}"),
    "seed": (int, False, "base seed; trial t uses seed + t"),
    "out": (str, False, "output path, stdout when omitted"),
    "format": (str, False, f"one of {FORMATS}"),
    "workers": (int, False, "worker processes for independent trials"),
    "input": (str, False, "input CSV"),
    "oracle": (str, False, "one-row CSV holding the reference mean"),
    "oracle_out": (str, False, "write the generated dataset's oracle mean here"),
    "timing": (bool, False, "record wall time per method (breaks byte-identical reruns)"),
    "strict": (bool, False, "exit with code 3 when a method fails"),
    "table": (bool, False, "print a pivot table of aggregate rows"),
}

DEFAULTS = {
    "setting": "b",
    "d": 100,
    "n": [2000],
    "alpha": [0.2],
    "trials": DEFAULT_TRIALS,
    "methods": DEFAULT_METHODS,
    "sigma": 1.0,
    "c1sq": MIN_C1_SQUARED,
    "p": solvers.DEFAULT_P,
    "tau": DEFAULT_TAU,
    "reweights": solvers.DEFAULT_OUTER_REWEIGHTS,
    "variant": solvers.VARIANTS[0],
    "seed": DEFAULT_SEED,
    "out": None,
    "format": "csv",
    "workers": 1,
    "input": None,
    "oracle": None,
    "oracle_out": None,
    "timing": False,
    "strict": False,
    "table": False,
}

COMMANDS = {
    "generate": ["setting", "d", "n", "alpha", "seed", "out", "oracle_out"],
    "estimate": ["input", "methods", "sigma", "c1sq", "p", "tau", "reweights", "variant", "oracle", "out", "format", "timing", "strict"],
    "experiment": [
        "setting", "d", "n", "alpha", "trials", "methods", "sigma", "c1sq", "p", "tau", "reweights",
        "variant", "seed", "oracle", "out", "format", "workers", "timing", "strict", "table",
    ],
    "oracle": ["input", "sigma", "c1sq", "tau"],
    "indicator": ["setting", "input", "d", "n", "alpha", "seed", "sigma", "c1sq", "p", "tau", "reweights", "variant", "out"],
    "calibrate": ["input"],
}


def _convert(name, text):
    kind, repeatable, _ = OPTIONS[name]
    try:
        if kind is bool:
            word = text.strip().lower()
            if word in TRUE_WORDS:
                return True
            if word in FALSE_WORDS:
                return False
            raise ValueError(f"expected a boolean, got {text!r}")
        if repeatable:
            return [kind(part.strip()) for part in text.split(",") if part.strip()]
        return kind(text.strip())
    except ValueError as e:
        raise ConfigError(f"option {name}: {e}") from e


def load_config(path):
    """Flat `key = value` file; '#' starts a comment."""
    config = {}
    try:
        with open(path) as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e

    for number, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{number}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTIONS:
            raise ConfigError(f"{path}:{number}: unknown key {key!r}")
        config[key] = _convert(key, value)
    return config


def _add_option(parser, name):
    kind, repeatable, help_text = OPTIONS[name]
    flag = "--" + name.replace("_", "-")
    if kind is bool:
        parser.add_argument(flag, dest=name, action="store_const", const=True, default=None, help=help_text)
    elif name == "methods":
        parser.add_argument(flag, dest=name, type=lambda text: _convert("methods", text), default=None, help=help_text)
    elif repeatable:
        parser.add_argument(flag, dest=name, type=kind, action="append", default=None, help=help_text)
    else:
        parser.add_argument(flag, dest=name, type=kind, default=None, help=help_text)


def build_parser():
    parser = argparse.ArgumentParser(description="l0-based robust mean estimation toolkit")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for command, names in COMMANDS.items():
        sub = subparsers.add_parser(command)
        sub.add_argument("--config", type=str, default=None, help="flat key = value file; flags win")
        for name in names:
            _add_option(sub, name)
    return parser


def parse_args(argv=None):
    """Merged options: command line, then --config file, then DEFAULTS."""
    try:
        args = vars(build_parser().parse_args(argv))
    except SystemExit as e:
        if e.code not in (0, None):
            raise ConfigError("invalid command line") from e
        raise

    config = load_config(args["config"]) if args["config"] else {}
    merged = {"command": args["command"], "verbose": args["verbose"], "quiet": args["quiet"]}
    for name in COMMANDS[args["command"]]:
        if args[name] is not None:
            merged[name] = args[name]
        elif name in config:
            merged[name] = config[name]
        else:
            merged[name] = DEFAULTS[name]
    if "format" in merged and merged["format"] not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {merged['format']!r}")
    return merged


def configure_logging(args):
    level = logging.DEBUG if args.get("verbose") else logging.WARNING if args.get("quiet") else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT)


def spec_from_args(args):
    return ExperimentSpec(
        setting=args["setting"],
        d=args["d"],
        ns=tuple(args["n"]),
        alphas=tuple(args["alpha"]),
        trials=args["trials"],
        methods=tuple(args["methods"]),
        sigma=args["sigma"],
        c1_squared=args["c1sq"],
        p=args["p"],
        tau=args["tau"],
        seed=args["seed"],
        outer_reweights=args["reweights"],
        variant=args["variant"],
        timing=args["timing"],
        oracle=args["oracle"],
    )


"""
============================================================================================
Subcommands
============================================================================================
"""


def _require_input(args):
    if not args["input"]:
        raise ConfigError("--input is required")
    return ingest_csv(args["input"])


def cmd_generate(args):
    if args["setting"] not in ("a", "b"):
        raise ConfigError(f"generate needs --setting a or b, got {args['setting']!r}")
    if len(args["n"]) != 1 or len(args["alpha"]) != 1:
        raise ConfigError("generate takes a single --n and a single --alpha")
    try:
        ds = datagen.generate(args["setting"], args["d"], args["n"][0], args["alpha"][0], args["seed"])
    except ValueError as e:
        raise ConfigError(str(e)) from e

    if args["out"] is None:
        save_csv(sys.stdout, ds.data)
    else:
        save_csv(args["out"], ds.data)
        logger.info("wrote %s", args["out"])
    if args["oracle_out"]:
        save_csv(args["oracle_out"], ds.oracle_mean[np.newaxis, :])
    return EXIT_OK


def cmd_estimate(args):
    dataset = _require_input(args)
    oracle_mean = load_oracle_mean(args["oracle"]) if args["oracle"] else None
    try:
        ds = datagen.from_dataset(dataset, oracle_mean)
    except ValueError:
        logger.info("no labels and no --oracle: recovery errors are not available")
        ds = None

    spec = ExperimentSpec(
        setting=args["input"],
        ns=(dataset.n,),
        methods=tuple(args["methods"]),
        sigma=args["sigma"],
        c1_squared=args["c1sq"],
        p=args["p"],
        tau=args["tau"],
        outer_reweights=args["reweights"],
        variant=args["variant"],
        timing=args["timing"],
        oracle=args["oracle"],
    )

    records = []
    failed = False
    for method in spec.methods:
        t0 = time.perf_counter()
        try:
            outcome = methods.get_method(method)(np.array(dataset.values), spec.params())
        except Exception as e:  # noqa: BLE001 - reported per method
            logger.warning("%s failed: %s", method, e)
            failed = True
            records.append({"method": method, "error": f"{type(e).__name__}: {e}"})
            continue
        t1 = time.perf_counter()
        if method in methods.L0_METHODS:
            check_trace(outcome.l0_trace, dataset.n)

        record = {
            "method": method,
            "recovery_error": datagen.recovery_error(outcome.mean, ds) if ds is not None else None,
            "outer_iterations": outcome.outer_iterations,
            "wall_time_ms": (t1 - t0) * 1000.0 if spec.timing else None,
        }
        record.update(dict(zip(feature_columns(dataset.d), outcome.mean.tolist())))
        records.append(record)

    columns = ["method", "recovery_error", "outer_iterations", "wall_time_ms"] + feature_columns(dataset.d)
    frame = pd.DataFrame(records, columns=columns)
    if args["format"] == "json":
        text = json.dumps({"spec": spec.to_dict(), "rows": records}, indent=2) + "\n"
    else:
        text = frame.to_csv(index=False, lineterminator="\n", float_format="%.17g")
    write_output(text, args["out"])
    return EXIT_METHOD_FAILURE if failed and args["strict"] else EXIT_OK


def cmd_experiment(args):
    spec = spec_from_args(args)
    rows = run_experiment(spec, workers=max(1, args["workers"]))
    write_output(render_results(rows, spec, args["format"]), args["out"])

    if args["table"]:
        print(tables.render(tables.pivot_table(rows)))
    failures = [row for row in rows if row.failed and row.trial != AGGREGATE_TRIAL]
    if failures:
        logger.warning("%d method runs failed", len(failures))
    return EXIT_METHOD_FAILURE if failures and args["strict"] else EXIT_OK


def cmd_oracle(args):
    dataset = _require_input(args)
    bound = MomentBound(args["sigma"], dataset.n, args["c1sq"])
    try:
        result = oracle.brute_force_l0(dataset, bound, args["tau"])
    except ValueError as e:
        raise ConfigError(str(e)) from e
    print(f"min_l0: {result.min_l0}")
    print(f"support: {list(result.support)}")
    print("mean: " + ",".join(format_number(v) for v in result.mean))
    return EXIT_OK


def cmd_indicator(args):
    if args["input"]:
        dataset = ingest_csv(args["input"])
        values, labels = dataset.values, dataset.labels
    else:
        if args["setting"] not in ("a", "b"):
            raise ConfigError("indicator needs --input or --setting a/b")
        ds = datagen.generate(args["setting"], args["d"], args["n"][0], args["alpha"][0], args["seed"])
        values, labels = ds.values, ds.inlier_mask

    bound = MomentBound(args["sigma"], values.shape[0], args["c1sq"])
    cfg = solvers.IrlsConfig(p=args["p"], outer_reweights=args["reweights"], variant=args["variant"])
    frame = indicator_profile(values, bound, cfg, args["tau"], labels)
    write_output(frame.to_csv(index=False, lineterminator="\n", float_format="%.17g"), args["out"])
    return EXIT_OK


def cmd_calibrate(args):
    result = oracle.calibrate_sigma(_require_input(args))
    print(f"sigma: {format_number(result.sigma)}")
    print(f"label: {result.label}")
    for message in result.warnings:
        print(f"warning: {message}")
    return EXIT_OK


def main(argv=None):
    try:
        args = parse_args(argv)
        configure_logging(args)
        command = args["command"]
        if command == "generate":
            return cmd_generate(args)
        elif command == "estimate":
            return cmd_estimate(args)
        elif command == "experiment":
            return cmd_experiment(args)
        elif command == "oracle":
            return cmd_oracle(args)
        elif command == "indicator":
            return cmd_indicator(args)
        elif command == "calibrate":
            return cmd_calibrate(args)
        else:
            raise ConfigError(f"command {command!r} unknown!")
    except ValueError as e:
        # ConfigError, CsvFormatError and invalid numeric arguments
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
