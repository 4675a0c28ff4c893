"""Command-line front end.

Subcommands::

    khtangle kh FILE [--level N|inf]     homology, Jones polynomial, determinant
    khtangle closure FILE --level N|inf  the closed diagram as PD JSON
    khtangle kappa FILE [--window N:M]   kappa grid and stabilization certificate
    khtangle mirror-check FILE           amphicheirality comparison
    khtangle verify [--soft-only]        the acceptance suite

Exit status: 0 success, 1 failed verification, 2 input error,
3 unstabilized, 4 resource cap.  Output is written only when a command
succeeds; unstabilized kappa runs write their partial table to a separate
file whose name ends in ``.UNSTABILIZED``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import acceptance
from .diagram import PlanarDiagram, SuturedTangle, TangleError, closure, closure_infinity, load_input
from .khcomplex import DEFAULT_CAP, ResourceCapError, dumps, khovanov, summary
from .limit import KappaError, UnstabilizedError, WindowPolicy, amphicheirality_check, compute_kappa, structure_report

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_UNSTABLE, EXIT_CAP = 0, 1, 2, 3, 4
COMMANDS = ("kh", "closure", "kappa", "mirror-check", "verify")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    window: Optional[tuple[int, int]] = None
    cap: int = DEFAULT_CAP
    fmt: str = "tsv"
    output: Optional[str] = None
    seed: int = 0
    soft_only: bool = False
    level: Optional[str] = None
    data: Optional[str] = None
    partner: Optional[str] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.window is not None and not self.window[0] < self.window[1]:
            raise InputError(f"window {self.window[0]}:{self.window[1]} needs N < M")
        if self.cap < DEFAULT_CAP:
            raise InputError(f"cap must be at least {DEFAULT_CAP}")
        if self.fmt not in ("tsv", "json"):
            raise InputError(f"unknown format {self.fmt!r}")


def parse_window(s: str) -> tuple[int, int]:
    try:
        a, b = s.split(":")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must look like N:M, got {s!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("tsv", "json"), default="tsv")
    common.add_argument("--output", "-o", help="write here instead of standard output")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest number of crossings to process")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")

    p = argparse.ArgumentParser(prog="khtangle", description="Khovanov homology of sutured tangles and the kappa invariant.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("kh", parents=[common], help="reduced Khovanov homology of a diagram or tangle closure")
    s.add_argument("input")
    s.add_argument("--level", help="closure level n or 'inf' for T(1/0); required for tangle files")

    s = sub.add_parser("closure", parents=[common], help="print a closure of a tangle as PD JSON")
    s.add_argument("input")
    s.add_argument("--level", required=True)

    s = sub.add_parser("kappa", parents=[common], help="kappa of a tangle")
    s.add_argument("input")
    s.add_argument("--window", type=parse_window, help="fixed window N:M instead of automatic widening")

    s = sub.add_parser("mirror-check", parents=[common], help="compare kappa with the reflection of kappa of the mirror")
    s.add_argument("input")
    s.add_argument("--partner", help="tangle of a second strong inversion to compare against")
    s.add_argument("--window", type=parse_window)

    s = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    s.add_argument("--soft-only", action="store_true", help="only the mod 4 and tiling diagnostics")
    s.add_argument("--data", help="dataset directory (default: the shipped one)")
    return p


def config_from_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    a = build_parser().parse_args(argv)
    return RunConfig(
        command=a.command,
        inputs=[a.input] if getattr(a, "input", None) else [],
        window=getattr(a, "window", None),
        cap=a.cap,
        fmt=a.fmt,
        output=a.output,
        seed=a.seed,
        soft_only=getattr(a, "soft_only", False),
        level=getattr(a, "level", None),
        data=getattr(a, "data", None),
        partner=getattr(a, "partner", None),
    )


# ---------------------------------------------------------------------------


def _load(path: str):
    try:
        return load_input(path)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _tangle(path: str) -> SuturedTangle:
    x = _load(path)
    if not isinstance(x, SuturedTangle):
        raise InputError(f"{path} is a closed diagram; this command needs a tangle file")
    return x


def _closed(cfg: RunConfig) -> PlanarDiagram:
    x = _load(cfg.inputs[0])
    if isinstance(x, PlanarDiagram):
        if cfg.level is not None:
            raise InputError("--level applies to tangle files only")
        return x
    if cfg.level is None:
        raise InputError("tangle input needs --level N or --level inf")
    if cfg.level == "inf":
        return closure_infinity(x)
    try:
        n = int(cfg.level)
    except ValueError:
        raise InputError(f"level must be an integer or 'inf', got {cfg.level!r}") from None
    if len(x.crossings) + abs(n) > cfg.cap:
        raise ResourceCapError(f"T({n}) has {len(x.crossings) + abs(n)} crossings; cap is {cfg.cap}")
    return closure(x, n)


def cmd_kh(cfg: RunConfig) -> str:
    d = _closed(cfg)
    v = khovanov(d, cap=cfg.cap)
    s = summary(v)
    if cfg.fmt == "json":
        s["name"] = d.name
        s["delta"] = [{"u": u, "two_delta": td, "dim": n} for (u, td), n in sorted(v.delta_table().items())]
        return dumps(s) + "\n"
    out = [f"# reduced Khovanov homology of {d.name or 'diagram'} ({len(d.crossings)} crossings)", "# (u, q) table"]
    out.append(v.uq_tsv().rstrip("\n"))
    out.append("# (u, 2delta) table")
    out.append(v.to_tsv().rstrip("\n"))
    out.append(f"jones\t{s['jones']}")
    out.append(f"determinant\t{s['determinant']}")
    out.append(f"thin\t{str(s['thin']).lower()}")
    return "\n".join(out) + "\n"


def cmd_closure(cfg: RunConfig) -> str:
    d = _closed(cfg)
    return json.dumps(d.to_json(), indent=1, sort_keys=True) + "\n"


def _kappa_text(k, fmt: str, name: str) -> str:
    if fmt == "json":
        obj = k.to_json()
        obj["name"] = name
        obj["structure"] = structure_report(k)
        return dumps(obj) + "\n"
    cert = k.stabilization
    out = [f"# kappa of {name}", k.to_tsv().rstrip("\n") if k.table else "# (empty)"]
    out.append(f"total\t{k.total_dim}")
    out.append(f"window\t{cert.get('window')}")
    if "compared" in cert:
        out.append(f"agreeing\t{cert['agreeing_windows']} of {len(cert['compared'])}")
    out.append(f"end_conditions\t{str(cert.get('end_conditions')).lower()}")
    if "eventual_ranks" in cert and not cert.get("end_conditions"):
        ranks = cert["eventual_ranks"]
        out.append("eventual_ranks\t" + (" ".join(f"{u}:{r}" for u, r in sorted(ranks.items())) or "-"))
    for note in cert.get("notes", []):
        out.append(f"# {note}")
    return "\n".join(out) + "\n"


def _policy(cfg: RunConfig) -> WindowPolicy:
    return WindowPolicy(cap=cfg.cap, window=cfg.window)


def cmd_kappa(cfg: RunConfig) -> str:
    t = _tangle(cfg.inputs[0])
    k = compute_kappa(t, _policy(cfg))
    return _kappa_text(k, cfg.fmt, t.name)


def cmd_mirror_check(cfg: RunConfig) -> str:
    t = _tangle(cfg.inputs[0])
    partner = _tangle(cfg.partner) if cfg.partner else None
    v = amphicheirality_check(t, partner, _policy(cfg))
    if cfg.fmt == "json":
        return dumps({
            "verdict": v.verdict,
            "kappa": v.kappa.to_json(),
            "reflected": v.reflected.to_json(),
            "differing_u": v.differing_u,
        }) + "\n"
    out = [f"verdict\t{v.verdict}", f"differing_u\t{','.join(map(str, v.differing_u)) or '-'}"]
    out.append("# kappa")
    out.append(v.kappa.to_tsv().rstrip("\n") if v.kappa.table else "# (empty)")
    out.append("# reflected kappa of the mirror" if partner is None else "# reflected kappa of the partner")
    out.append(v.reflected.to_tsv().rstrip("\n") if v.reflected.table else "# (empty)")
    return "\n".join(out) + "\n"


def cmd_verify(cfg: RunConfig) -> tuple[str, bool]:
    ctx = acceptance.Context(root=cfg.data, seed=cfg.seed)
    results = acceptance.run(ctx, soft_only=cfg.soft_only)
    hard = [r for r in results if r.hard]
    soft = [r for r in results if not r.hard]
    if cfg.fmt == "json":
        text = dumps({
            "hard": [r.__dict__ for r in hard],
            "soft": [r.__dict__ for r in soft],
            "ok": all(r.ok for r in hard),
        }) + "\n"
    else:
        lines = [r.line() for r in hard]
        if soft:
            lines.append("# soft diagnostics (not fatal)")
            lines += [r.line() for r in soft]
        passed = sum(r.ok for r in hard)
        if hard:
            lines.append(f"# {passed}/{len(hard)} hard checks passed")
        text = "\n".join(lines) + "\n"
    return text, all(r.ok for r in hard)


# ---------------------------------------------------------------------------


def _write(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, target)


def unstabilized_path(cfg: RunConfig) -> Path:
    if cfg.output:
        return Path(cfg.output + ".UNSTABILIZED")
    return Path(Path(cfg.inputs[0]).name.split(".")[0] + ".kappa.UNSTABILIZED")


def run(cfg: RunConfig) -> int:
    try:
        if cfg.command == "verify":
            text, ok = cmd_verify(cfg)
            _write(text, cfg.output)
            return EXIT_OK if ok else EXIT_FAILED
        handler = {"kh": cmd_kh, "closure": cmd_closure, "kappa": cmd_kappa, "mirror-check": cmd_mirror_check}
        text = handler[cfg.command](cfg)
    except (TangleError, InputError, KappaError) as e:
        arcs = getattr(e, "arcs", ())
        extra = f" (arcs {', '.join(map(str, arcs))})" if arcs else ""
        print(f"khtangle: input error: {e}{extra}", file=sys.stderr)
        return EXIT_INPUT
    except UnstabilizedError as e:
        print(f"khtangle: unstabilized: {e}", file=sys.stderr)
        if e.partial is not None and cfg.command == "kappa":
            path = unstabilized_path(cfg)
            header = "# UNSTABILIZED: partial result, not a certified kappa\n"
            name = Path(cfg.inputs[0]).name
            if cfg.fmt == "json":
                obj = json.loads(_kappa_text(e.partial, "json", name))
                obj["status"] = "UNSTABILIZED"
                text = dumps(obj) + "\n"
            else:
                text = header + _kappa_text(e.partial, "tsv", name)
            _write(text, str(path))
            print(f"khtangle: partial data written to {path}", file=sys.stderr)
        return EXIT_UNSTABLE
    except ResourceCapError as e:
        print(f"khtangle: resource cap: {e}", file=sys.stderr)
        return EXIT_CAP
    _write(text, cfg.output)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = config_from_args(argv)
    except InputError as e:
        print(f"khtangle: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
