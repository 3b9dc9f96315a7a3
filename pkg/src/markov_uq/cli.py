"""Batch front-end: constants, bounds, entropy rates, validation, zoo listing.

Every command is deterministic for a fixed config including the seed;
reports are JSON with sorted keys and no timestamps, CSV floats carry 17
significant digits so they round-trip exactly.

Exit codes: 0 success (or validation pass), 2 invalid model/config,
3 numeric failure, 4 no certified method applies, 5 validation fail,
6 validation inconclusive.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .chain import (
    GeneratorMatrix,
    TransitionKernel,
    invariant_measure,
    is_reversible,
    model_from_json,
    observable_from_json,
)
from .divergence import relative_entropy
from .entropy_rates import (
    EXACT,
    EntropyRate,
    ctmc_relent_rate,
    dtmc_relent_rate,
    jump_decomposition,
)
from .errors import (
    InvalidModelError,
    MarkovUqError,
    NoCertifiedMethod,
    NumericFailure,
)
from .report import METHODS, assemble_bound
from .simulate import path_ergodic_averages, uniformize, validate_bound
from .spectral import (
    asymptotic_variance,
    log_sobolev_constant_numeric,
    poincare_constant,
)
from .chain import StationaryMeasure, center_observable
from .zoo import ZooModel, zoo_model, zoo_names

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3
EXIT_NO_METHOD = 4
EXIT_FAIL = 5
EXIT_INCONCLUSIVE = 6

_ZOO_PREFIXES = ("mminfty", "hypercube", "exclusion", "langevin")
_NUMERIC_BETA_MAX_STATES = 64


def _read_text(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise InvalidModelError(f"cannot read {path}: {exc}") from exc


def _json_loads(text: str, origin: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidModelError(
            f"invalid JSON in {origin} at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _load_model(text: str) -> ZooModel:
    if text.lstrip().startswith("{"):
        model = model_from_json(_json_loads(text, "inline model"))
        return ZooModel("custom", model.kind, model, None, {}, None, None)
    head = text.partition(":")[0]
    if head in _ZOO_PREFIXES:
        return zoo_model(text)
    if os.path.exists(text):
        model = model_from_json(_json_loads(_read_text(text), text))
        return ZooModel(os.path.basename(text), model.kind, model, None, {}, None, None)
    raise InvalidModelError(
        f"model {text!r} is neither inline JSON, an existing file, nor a zoo name"
    )


def _measure_of(rec: ZooModel) -> StationaryMeasure:
    return rec.measure if rec.measure is not None else invariant_measure(rec.model)


def _resolve_observable(text: str | None, rec: ZooModel) -> np.ndarray:
    if text is None:
        if rec.observable_values is not None:
            return rec.observable_values
        raise InvalidModelError("an observable is required: pass --observable")
    if text == "n":
        try:
            return np.array([float(s) for s in rec.model.states])
        except (TypeError, ValueError) as exc:
            raise InvalidModelError(
                "states are not numeric labels; supply explicit observable values"
            ) from exc
    if text.lstrip().startswith(("{", "[")):
        obj = _json_loads(text, "inline observable")
    elif os.path.exists(text):
        obj = _json_loads(_read_text(text), text)
    else:
        raise InvalidModelError(f"observable {text!r} is neither JSON nor a file")
    if isinstance(obj, list):
        obj = {"values": obj}
    values = observable_from_json(obj)
    if values.shape[0] != len(rec.model.states):
        raise InvalidModelError(
            f"observable has {values.shape[0]} entries, model has {len(rec.model.states)} states"
        )
    return values


def _exact_relent(base: ZooModel, alt: ZooModel) -> EntropyRate:
    b, a = base.model, alt.model
    mu_alt = _measure_of(alt)
    mu_base = _measure_of(base)
    if isinstance(b, GeneratorMatrix) and isinstance(a, GeneratorMatrix):
        lam_b, jump_b = jump_decomposition(b)
        lam_a, jump_a = jump_decomposition(a)
        er = ctmc_relent_rate(lam_a, jump_a, lam_b, jump_b, mu_alt)
        initial = relative_entropy(mu_alt.weights, mu_base.weights)
        return EntropyRate(er.rate, initial, EXACT)
    if isinstance(b, TransitionKernel) and isinstance(a, TransitionKernel):
        return dtmc_relent_rate(a, b, mu_alt, mu_base)
    raise InvalidModelError("base and alternative models must both be ctmc or both dtmc")


def _emit(obj, out_path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: str, header: list[str], rows: list[list[float]]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def _certified_constants(rec: ZooModel, mu: StationaryMeasure, gen: GeneratorMatrix):
    if rec.constants is not None and rec.constants.log_sobolev_beta is not None:
        return rec.constants
    if gen.n <= _NUMERIC_BETA_MAX_STATES:
        return log_sobolev_constant_numeric(gen, mu)
    return None


def _gen_and_measure(rec: ZooModel):
    mu = _measure_of(rec)
    model = rec.model
    if isinstance(model, TransitionKernel):
        gen = uniformize(model, 1.0)
        mu = StationaryMeasure(mu.weights, mu.log_weights, gen.fingerprint)
        return gen, mu
    if isinstance(model, GeneratorMatrix):
        return model, mu
    raise InvalidModelError(f"{rec.name} is not a finite-state model")


def cmd_constants(args) -> int:
    rec = _load_model(args.model)
    if rec.kind == "sde":
        out = {"model": rec.name, "kind": "sde"}
        out.update({k: v for k, v in rec.pack.items() if isinstance(v, (int, float))})
        if rec.constants is not None:
            out["provenance"] = rec.constants.provenance
        _emit(out, args.out)
        return EXIT_OK
    gen, mu = _gen_and_measure(rec)
    reversible = is_reversible(gen, mu)
    alpha = poincare_constant(gen, mu)
    out = {
        "model": rec.name,
        "kind": rec.kind,
        "n_states": gen.n,
        "alpha": alpha,
        "reversible": reversible,
        "provenance": "spectral",
    }
    if "alpha" in rec.pack:
        out["alpha_pack"] = float(rec.pack["alpha"])
    constants = _certified_constants(rec, mu, gen)
    if constants is not None and constants.log_sobolev_beta is not None:
        out["beta"] = constants.log_sobolev_beta
        out["beta_provenance"] = constants.provenance
    values = None
    if args.observable is not None or rec.observable_values is not None:
        values = _resolve_observable(args.observable, rec)
    if values is not None:
        f = center_observable(values, mu)
        out["mean"] = mu.mean(values)
        out["variance"] = mu.variance(values)
        out["m_plus"] = alpha * f.pos_sup
        out["m_minus"] = alpha * f.neg_sup
        if reversible:
            out["sigma2_asymptotic"] = asymptotic_variance(gen, f, mu)
    _emit(out, args.out)
    return EXIT_OK


def _parse_sweep(text: str):
    parts = text.split(":")
    if len(parts) != 4 or parts[0] not in ("eta", "T"):
        raise InvalidModelError("--sweep must look like eta:LO:HI:N or T:LO:HI:N")
    lo, hi, num = float(parts[1]), float(parts[2]), int(parts[3])
    if not 0.0 < lo <= hi or num < 2:
        raise InvalidModelError("sweep grid needs 0 < LO <= HI and N >= 2")
    return parts[0], np.geomspace(lo, hi, num)


def cmd_bound(args) -> int:
    rec = _load_model(args.model)
    values = _resolve_observable(args.observable, rec)
    if args.eta is not None and args.alt_model is not None:
        raise InvalidModelError("--eta and --alt-model are mutually exclusive")
    if args.eta is None and args.alt_model is None:
        raise InvalidModelError("supply an entropy budget: --eta or --alt-model")
    if args.eta is not None:
        eta = float(args.eta)
        if eta < 0.0:
            raise InvalidModelError("--eta must be >= 0")
    else:
        eta = _exact_relent(rec, _load_model(args.alt_model))
    constants = rec.constants
    if args.method == "log-sobolev" and (constants is None or constants.log_sobolev_beta is None):
        gen, mu = _gen_and_measure(rec)
        constants = _certified_constants(rec, mu, gen)
    report = assemble_bound(
        rec.model,
        values,
        eta,
        t_horizon=args.T,
        mu=rec.measure,
        method=args.method,
        constants=constants,
    )
    out = report.to_json()
    out["model"] = rec.name
    _emit(out, args.out)
    if args.csv:
        if args.sweep:
            axis, grid = _parse_sweep(args.sweep)
            rows = []
            for g in grid:
                if axis == "eta":
                    rep = assemble_bound(
                        rec.model, values, float(g), t_horizon=args.T,
                        mu=rec.measure, method=args.method, constants=constants,
                    )
                else:
                    rep = assemble_bound(
                        rec.model, values, eta, t_horizon=float(g),
                        mu=rec.measure, method=args.method, constants=constants,
                    )
                rows.append([float(g), rep.xi_plus.value, rep.xi_minus.value])
            _write_csv(args.csv, [axis, "xi_plus", "xi_minus"], rows)
        else:
            _write_csv(
                args.csv,
                ["eta", "xi_plus", "xi_minus"],
                [[report.eta, report.xi_plus.value, report.xi_minus.value]],
            )
    return EXIT_OK


def cmd_relent(args) -> int:
    base = _load_model(args.model)
    alt = _load_model(args.alt_model)
    er = _exact_relent(base, alt)
    out = er.to_json()
    if args.T is not None:
        out["eta_at_T"] = er.eta_at(args.T)
        out["T"] = args.T
    _emit(out, args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    base = _load_model(args.model)
    alt = _load_model(args.alt_model)
    values = _resolve_observable(args.observable, base)
    er = _exact_relent(base, alt)
    constants = base.constants
    if args.method == "log-sobolev" and (constants is None or constants.log_sobolev_beta is None):
        gen, mu = _gen_and_measure(base)
        constants = _certified_constants(base, mu, gen)
    bound = assemble_bound(
        base.model,
        values,
        er,
        t_horizon=args.T,
        mu=base.measure,
        method=args.method,
        constants=constants,
    )
    averages = None
    if args.csv:
        mu_alt = _measure_of(alt)
        averages = path_ergodic_averages(
            alt.model, mu_alt.weights, values, args.T, args.paths, args.seed
        )
        _write_csv(args.csv, ["path_average"], [[float(v)] for v in averages])
    vr = validate_bound(
        base.model, alt.model, values, args.T, args.paths, args.seed, bound,
        averages=averages,
    )
    _emit({"bound": bound.to_json(), "validation": vr.to_json()}, args.out)
    if vr.verdict == "pass":
        return EXIT_OK
    if vr.verdict == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_FAIL


def cmd_zoo_list(args) -> int:
    _emit(zoo_names(), args.out)
    return EXIT_OK


def _add_common(sub, observable: bool = True):
    sub.add_argument("--model", required=True, help="zoo name, JSON file, or inline JSON")
    if observable:
        sub.add_argument(
            "--observable",
            help='"n" (numeric state labels), JSON file, or inline {"values": [...]}',
        )
    sub.add_argument("--seed", type=int, default=None, help="master seed (default: MARKOV_UQ_SEED or 0)")
    sub.add_argument("--threads", type=int, default=None, help="cap on compiled-kernel threads")
    sub.add_argument("--out", help="write the JSON report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="markov-uq",
        description="Certified uncertainty bounds for ergodic averages of Markov models",
    )
    parser.add_argument("--config", help="JSON file of flag defaults; explicit flags win")
    sub = parser.add_subparsers(dest="command", required=True)
    all_parsers = [parser]

    p = sub.add_parser("constants", help="spectral and functional-inequality constants")
    _add_common(p)
    all_parsers.append(p)

    p = sub.add_parser("bound", help="assemble a certified two-sided bias bound")
    _add_common(p)
    p.add_argument("--alt-model", help="alternative model; its exact entropy rate sets eta")
    p.add_argument("--eta", type=float, help="entropy budget override (nats per unit time)")
    p.add_argument("--method", default="auto", choices=list(METHODS))
    p.add_argument("--T", type=float, default=None, help="horizon for amortizing initial entropy")
    p.add_argument("--csv", help="CSV output path (single row, or a sweep with --sweep)")
    p.add_argument("--sweep", help="eta:LO:HI:N or T:LO:HI:N geometric grid for --csv")
    all_parsers.append(p)

    p = sub.add_parser("relent", help="exact entropy rate between two finite models")
    _add_common(p, observable=False)
    p.add_argument("--alt-model", required=True)
    p.add_argument("--T", type=float, default=None, help="also report rate + initial/T")
    all_parsers.append(p)

    p = sub.add_parser("validate", help="simulate the alternative and test the bound")
    _add_common(p)
    p.add_argument("--alt-model", required=True)
    p.add_argument("--method", default="auto", choices=list(METHODS))
    p.add_argument("--T", type=float, default=1000.0)
    p.add_argument("--paths", type=int, default=100000)
    p.add_argument("--dt", type=float, default=None, help="unused for jump models; reserved")
    p.add_argument("--csv", help="write per-path ergodic averages here")
    all_parsers.append(p)

    p = sub.add_parser("zoo-list", help="list built-in models and their parameters")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    all_parsers.append(p)

    parser.all_parsers = all_parsers
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    # the probe strips --config wherever it sits, so it works after the subcommand too
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, rest = probe.parse_known_args(argv)
    if known.config:
        defaults = _json_loads(_read_text(known.config), known.config)
        if not isinstance(defaults, dict):
            raise InvalidModelError("config file must hold a JSON object of flag defaults")
        defaults = {k.replace("-", "_"): v for k, v in defaults.items()}
        # subcommands parse into a fresh namespace, so each needs the defaults too
        for target in getattr(parser, "all_parsers", [parser]):
            target.set_defaults(**defaults)
    return parser.parse_args(rest)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        if getattr(args, "seed", None) is None:
            args.seed = int(os.environ.get("MARKOV_UQ_SEED", "0"))
        if getattr(args, "threads", None):
            try:
                import numba

                numba.set_num_threads(max(1, min(args.threads, numba.config.NUMBA_NUM_THREADS)))
            except (ImportError, ValueError):
                pass
        handler = {
            "constants": cmd_constants,
            "bound": cmd_bound,
            "relent": cmd_relent,
            "validate": cmd_validate,
            "zoo-list": cmd_zoo_list,
        }[args.command]
        return handler(args)
    except NoCertifiedMethod as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_METHOD
    except NumericFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvalidModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except MarkovUqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
