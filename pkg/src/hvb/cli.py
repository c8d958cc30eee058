"""Command-line front end: ``hvb <verb> [options] FILE...``.

Every input file is a JSON object carrying ``"v": 1``; ``-`` reads stdin.
The payload goes to stdout, diagnostics to stderr.  Exit status is 0 on
success, 1 for invalid input and 2 for an unsupported regime.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable

from . import bundlecat, isogeny, nilmod
from .bundlecat import GroundContext, HomogBundle
from .errors import DecompositionError, InputError, UnsupportedRegimeError
from .galois import CharacterPoint, GaloisModule, orbit_of
from .isogeny import IsogenyData
from .nilmod import NilModule

SCHEMA_VERSION = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _read(path: str):
    try:
        if path == "-":
            raw = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                raw = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    if not isinstance(obj, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    if obj.get("v") != SCHEMA_VERSION:
        raise InputError(f"{path}: unsupported schema version {obj.get('v')!r} (expected \"v\": 1)")
    return obj


def _kind(obj) -> str:
    if "mats" in obj:
        return "module"
    if "summands" in obj:
        return "bundle"
    if "dual_map" in obj:
        return "isogeny"
    if "orders" in obj:
        return "characters"
    raise InputError("cannot tell what the input describes (expected 'mats', 'summands', 'dual_map' or 'orders')")


def _load(path: str, want: tuple = ("module", "bundle", "isogeny", "characters")):
    obj = _read(path)
    kind = _kind(obj)
    if kind not in want:
        raise InputError(f"{path}: expected {' or '.join(want)}, got {kind}")
    if kind == "module":
        return nilmod.require_valid(NilModule.from_json(obj))
    if kind == "bundle":
        return HomogBundle.from_json(obj)
    if kind == "isogeny":
        return IsogenyData.from_json(obj)
    return obj


def _versioned(obj: dict) -> dict:
    return {"v": SCHEMA_VERSION, **obj}


def _pair(args, want=("module", "bundle")):
    if len(args.inputs) != 2:
        raise InputError(f"'{args.verb}' takes exactly two inputs")
    a, b = (_load(p, want) for p in args.inputs)
    if type(a) is not type(b):
        raise InputError(f"'{args.verb}' needs two modules or two bundles")
    return a, b


def _single(args, want=("module", "bundle")):
    if len(args.inputs) != 1:
        raise InputError(f"'{args.verb}' takes exactly one input")
    return _load(args.inputs[0], want)


def _check_level(args, *modules: GaloisModule):
    if args.level is None:
        return
    for M in modules:
        bad = [n for n in M.orders if args.level % n]
        if bad:
            raise InputError(f"torsion level {args.level} is not a multiple of the module orders {bad}")


# verbs --------------------------------------------------------------------

def cmd_validate(args):
    obj = _read(args.inputs[0]) if len(args.inputs) == 1 else None
    if obj is None:
        raise InputError("'validate' takes exactly one input")
    kind = _kind(obj)
    if kind == "module":
        m = NilModule.from_json(obj)
        bad = nilmod.validate(m)
    elif kind == "isogeny":
        bad = isogeny.validate_isogeny(IsogenyData.from_json(obj))
    elif kind == "bundle":
        HomogBundle.from_json(obj)
        bad = []
    else:
        GaloisModule.from_json(obj)
        bad = []
    return {"kind": kind, "valid": not bad, "violations": bad}, (1 if bad else 0)


def cmd_sum(args):
    a, b = _pair(args)
    if isinstance(a, NilModule):
        return _versioned(nilmod.direct_sum(a, b).to_json()), 0
    return _versioned(bundlecat.direct_sum_bundles(a, b).to_json()), 0


def cmd_tensor(args):
    a, b = _pair(args)
    if isinstance(a, NilModule):
        return _versioned(nilmod.tensor(a, b).to_json()), 0
    return _versioned(bundlecat.tensor_bundles(a, b).to_json()), 0


def cmd_dual(args):
    a = _single(args)
    if isinstance(a, NilModule):
        return _versioned(nilmod.dual(a).to_json()), 0
    return _versioned(bundlecat.dual_bundle(a).to_json()), 0


def cmd_hom(args):
    a, b = _pair(args)
    if isinstance(a, NilModule):
        return nilmod.hom_dim(a, b), 0
    return bundlecat.hom_ext_dims(a, b, 0)[0], 0


def cmd_ext(args):
    a, b = _pair(args)
    deg = args.max_degree
    if isinstance(a, NilModule):
        return nilmod.ext_dims(a, b, a.g if deg is None else deg), 0
    return bundlecat.hom_ext_dims(a, b, a.context.g if deg is None else deg), 0


def cmd_decompose(args):
    a = _single(args)
    if isinstance(a, NilModule):
        rep = nilmod.decompose(a, args.seed)
        rows = [{"orbit": "-", "rank": m.rank, "indecomposable": True, "loewy": nilmod.loewy_length(m)}
                for m, k in rep.summands for _ in range(k)]
        return _versioned(rep.to_json()), 0, rows
    return cmd_blocks(args)


def _block_rows(blocks):
    return [{"orbit": b.orbit.label(), "rank": b.bundle.rank if hasattr(b, "bundle") else b.rank,
             "indecomposable": b.indecomposable,
             "loewy": bundlecat.data_loewy(b.bundle.summands[0][1]) if hasattr(b, "bundle") else b.loewy}
            for b in blocks]


def cmd_blocks(args):
    E = _single(args, ("bundle",))
    blocks = bundlecat.block_decompose(E, args.seed)
    return {"rank": E.rank, "blocks": [b.to_json() for b in blocks]}, 0, _block_rows(blocks)


def cmd_classify(args):
    return bundlecat.classify(_single(args, ("bundle",))), 0


def _iso_and_bundle(args):
    if len(args.inputs) != 2:
        raise InputError(f"'{args.verb}' takes an isogeny and a bundle")
    iso = _load(args.inputs[0], ("isogeny",))
    E = _load(args.inputs[1], ("bundle",))
    _check_level(args, iso.src.characters, iso.dst.characters)
    return iso, E


def cmd_pullback(args):
    iso, F = _iso_and_bundle(args)
    return _versioned(isogeny.pullback(iso, F).to_json()), 0


def _report(rep):
    return _versioned(rep.to_json()), 0, _block_rows(rep.blocks)


def cmd_pushforward(args):
    iso, E = _iso_and_bundle(args)
    return _report(isogeny.pushforward(iso, E, args.seed))


def cmd_frobenius(args):
    if args.inputs:
        raise InputError("'frobenius' takes no input files")
    missing = [f"--{k}" for k in ("g", "p", "n") if getattr(args, k) is None]
    if missing:
        raise InputError(f"'frobenius' needs {', '.join(missing)}")
    ctx = GroundContext(args.g, args.p, args.r or 0, True)
    return _report(isogeny.frobenius_pushforward(ctx, args.n))


def cmd_factor(args):
    iso = _single(args, ("isogeny",))
    m, u = isogeny.factor_isogeny(iso)
    return {"multiplicative": _versioned(m.to_json()), "unipotent": _versioned(u.to_json()),
            "degrees": [m.degree, u.degree]}, 0


def cmd_orbit(args):
    obj = _single(args, ("characters",))
    M = GaloisModule.from_json(obj)
    _check_level(args, M)
    if "point" not in obj:
        raise InputError("'orbit' input needs a 'point'")
    orb = orbit_of(M, CharacterPoint.from_json(obj["point"]))
    return {"points": [list(p) for p in orb.points], "q": orb.q, "s": orb.s}, 0


COMMANDS: dict[str, Callable] = {
    "validate": cmd_validate, "sum": cmd_sum, "tensor": cmd_tensor, "dual": cmd_dual, "hom": cmd_hom,
    "ext": cmd_ext, "decompose": cmd_decompose, "blocks": cmd_blocks, "classify": cmd_classify,
    "pullback": cmd_pullback, "pushforward": cmd_pushforward, "frobenius": cmd_frobenius,
    "factor": cmd_factor, "orbit": cmd_orbit,
}


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hvb", description="Homogeneous vector bundles on abelian varieties, computed exactly.")
    ap.add_argument("verb", choices=sorted(COMMANDS), help="operation to run")
    ap.add_argument("inputs", nargs="*", help="JSON input files ('-' for stdin)")
    ap.add_argument("--format", choices=("json", "table"), default="json")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized searches (default 0)")
    ap.add_argument("--max-degree", type=int, default=None, help="top Ext degree (default g)")
    ap.add_argument("--level", type=int, default=None, help="assert the working torsion level")
    ap.add_argument("--g", type=int)
    ap.add_argument("--r", type=int)
    ap.add_argument("--p", type=int)
    ap.add_argument("--n", type=int)
    return ap


def _fmt(v) -> str:
    if v is None:
        return "?"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def render_table(rows) -> str:
    header = ["orbit", "rank", "indecomposable", "loewy"]
    cells = [header] + [[_fmt(r[h]) for h in header] for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
    return "\n".join("  ".join(c[i].ljust(widths[i]) for i in range(len(header))).rstrip() for c in cells)


def _render_plain(payload) -> str:
    if isinstance(payload, dict):
        width = max((len(k) for k in payload), default=0)
        return "\n".join(f"{k.ljust(width)}  {json.dumps(v, sort_keys=True)}" for k, v in payload.items())
    return json.dumps(payload)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_intermixed_args(argv)
        if args.seed < 0 or args.seed >= 1 << 64:
            raise InputError("--seed must be an unsigned 64-bit integer")
        out = COMMANDS[args.verb](args)
        payload, code = out[0], out[1]
        rows = out[2] if len(out) > 2 else None
        if args.format == "table":
            text = render_table(rows) if rows is not None else _render_plain(payload)
        else:
            text = json.dumps(payload, indent=2, sort_keys=True)
        print(text, file=stdout)
        return code
    except InputError as exc:
        print(f"hvb: error: {exc}", file=stderr)
        return 1
    except (UnsupportedRegimeError, DecompositionError) as exc:
        print(f"hvb: unsupported: {exc}", file=stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
