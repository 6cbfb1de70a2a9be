"""Command-line surface: generation, pruning, evaluation, sweeps.

Every command is deterministic given its flags (randomness only ever comes
from --seed, default 0), so repeated invocations produce byte-identical
output files. Exit codes: 0 success, 1 usage or validation error, 2 I/O or
parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ContractViolation, FormatError, UsageError
from .model import forward, gen_network, load_network, save_network
from .prune import (
    PruneConfig,
    load_labelmap,
    load_report,
    prune_input_channels,
    prune_output_topn,
    prune_units,
    save_labelmap,
    save_report,
    select_units,
)
from .report import compare_outputs, deviation_json, sweep, sweep_csv
from .scene import channel_sums, gen_scene, load_scene, roi_pool, save_scene

__all__ = ["main", "build_parser"]


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; we want usage errors on 1."""

    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _write(path: str, data: bytes) -> None:
    Path(path).write_bytes(data)


def _parse_sizes(text: str) -> list[int]:
    try:
        sizes = [int(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"--sizes must be comma-separated integers, got {text!r}") from None
    if not sizes:
        raise UsageError("--sizes must name at least one width")
    return sizes


def _parse_thresholds(text: str) -> list[float]:
    try:
        taus = [float(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"--thresholds must be comma-separated numbers, got {text!r}") from None
    for a, b in zip(taus, taus[1:]):
        if b < a:
            raise UsageError(f"--thresholds must be ascending, got {a} before {b}")
    if any(t < 0 for t in taus):
        raise UsageError("--thresholds must be nonnegative")
    return taus


def _load_vector_file(path: str, what: str) -> np.ndarray:
    """Read a JSON array of numbers (probe inputs, class scores)."""

    def reject(name: str):
        raise FormatError(f"non-finite constant {name!r} is not allowed in {what} files")

    try:
        doc = json.loads(_read(path).decode("utf-8"), parse_constant=reject)
    except json.JSONDecodeError as e:
        raise FormatError(f"{what} parse error at line {e.lineno} column {e.colno}: {e.msg}") from e
    if not isinstance(doc, list) or any(
        isinstance(v, bool) or not isinstance(v, (int, float)) for v in doc
    ):
        raise FormatError(f"{what} file must be a JSON array of numbers")
    return np.asarray([float(v) for v in doc], dtype=np.float64)


def _cmd_gen_net(args) -> int:
    net = gen_network(_parse_sizes(args.sizes), sparsity=args.sparsity, seed=args.seed)
    _write(args.out, save_network(net))
    return 0


def _cmd_gen_scene(args) -> int:
    sc = gen_scene(
        args.c,
        args.h,
        args.w,
        zero_channels=args.zero_channels,
        n_rois=args.n_rois,
        pool_h=args.pool_h,
        pool_w=args.pool_w,
        seed=args.seed,
    )
    _write(args.out, save_scene(sc))
    return 0


def _cmd_prune(args) -> int:
    if (args.scene is None) == (args.probe is None):
        raise UsageError("exactly one of --scene or --probe is required")
    net = load_network(_read(args.model))
    cfg = PruneConfig.for_threshold(args.tau)
    if args.scene is not None:
        if args.layer != 0:
            raise UsageError("--layer must be 0 when pruning from a scene")
        sc = load_scene(_read(args.scene))
        pruned_net, rep = prune_input_channels(
            net, channel_sums(sc.fmap), sc.pool_h, sc.pool_w, cfg
        )
    else:
        probe = _load_vector_file(args.probe, "probe")
        profile = forward(net, probe)
        sel = select_units(profile.layer(args.layer), cfg, layer=args.layer)
        pruned_net, rep = prune_units(net, args.layer, sel, profile=profile)
    _write(args.out, save_network(pruned_net))
    if args.report is not None:
        _write(args.report, save_report(rep))
    return 0


def _cmd_topn(args) -> int:
    net = load_network(_read(args.model))
    scores = _load_vector_file(args.scores, "scores")
    pruned_net, label_map, rep = prune_output_topn(net, scores, args.n)
    _write(args.out, save_network(pruned_net))
    _write(args.labelmap, save_labelmap(label_map))
    if args.report is not None:
        _write(args.report, save_report(rep))
    return 0


def _cmd_eval(args) -> int:
    original = load_network(_read(args.model_a))
    pruned = load_network(_read(args.model_b))
    sc = load_scene(_read(args.scene))
    label_map = load_labelmap(_read(args.labelmap)) if args.labelmap else None
    input_keep = None
    bound = None
    if args.report:
        rep = load_report(_read(args.report))
        bound = rep.deviation_bound
        if rep.kind == "input-channels":
            input_keep = rep.selections[0].kept
    if original.input_dim != sc.pooled_width:
        raise ContractViolation(
            f"model expects {original.input_dim} inputs but the scene pools to "
            f"{sc.pooled_width}"
        )
    examples = (roi_pool(sc.fmap, r, sc.pool_h, sc.pool_w) for r in sc.rois)
    dr = compare_outputs(
        original, pruned, examples, label_map=label_map, input_keep=input_keep, bound=bound
    )
    print(deviation_json(dr))
    return 0


def _cmd_sweep(args) -> int:
    net = load_network(_read(args.model))
    sc = load_scene(_read(args.scene))
    text = sweep_csv(sweep(net, sc, _parse_thresholds(args.thresholds)))
    if args.out == "-":
        sys.stdout.write(text)
    else:
        _write(args.out, text.encode("utf-8"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="unitprune",
        description="Specialize a feedforward network by pruning inactive units.",
    )
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("gen-net", help="generate a seeded random network")
    p.add_argument("--sizes", required=True, help="comma-separated widths, input first")
    p.add_argument("--sparsity", type=float, default=0.0, help="fraction of dead hidden units")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="model file to write")
    p.set_defaults(func=_cmd_gen_net)

    p = sub.add_parser("gen-scene", help="generate a seeded random scene")
    p.add_argument("--c", type=int, default=512, help="channels")
    p.add_argument("--h", type=int, default=14, help="feature map height")
    p.add_argument("--w", type=int, default=14, help="feature map width")
    p.add_argument("--zero-channels", type=int, default=0)
    p.add_argument("--n-rois", type=int, default=0)
    p.add_argument("--pool-h", type=int, default=7)
    p.add_argument("--pool-w", type=int, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="scene file to write")
    p.set_defaults(func=_cmd_gen_scene)

    p = sub.add_parser("prune", help="prune a model against a scene or probe vector")
    p.add_argument("--model", required=True)
    p.add_argument("--scene", help="scene file; prunes input channels of layer 0")
    p.add_argument("--probe", help="JSON vector file; prunes hidden units of --layer")
    p.add_argument("--tau", type=float, default=0.0, help="activation threshold")
    p.add_argument("--layer", type=int, default=0, help="hidden layer to prune (probe mode)")
    p.add_argument("--out", required=True, help="pruned model file to write")
    p.add_argument("--report", help="optional report file to write")
    p.set_defaults(func=_cmd_prune)

    p = sub.add_parser("topn", help="keep only the n highest-scoring outputs")
    p.add_argument("--model", required=True)
    p.add_argument("--scores", required=True, help="JSON vector file, one score per output")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", required=True, help="pruned model file to write")
    p.add_argument("--labelmap", required=True, help="label map file to write")
    p.add_argument("--report", help="optional report file to write")
    p.set_defaults(func=_cmd_topn)

    p = sub.add_parser("eval", help="compare two models over a scene's regions")
    p.add_argument("--model-a", required=True, help="original model")
    p.add_argument("--model-b", required=True, help="pruned model")
    p.add_argument("--scene", required=True)
    p.add_argument("--labelmap", help="label map written by topn")
    p.add_argument("--report", help="report written by prune; maps shrunk inputs")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="prune at each threshold and emit CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--scene", required=True)
    p.add_argument("--thresholds", required=True, help="comma-separated ascending values")
    p.add_argument("--out", default="-", help="CSV path, or - for standard output")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except FormatError as e:
        print(f"format error: {e}", file=sys.stderr)
        return 2
    except ContractViolation as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
