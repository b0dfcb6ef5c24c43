"""Command-line interface: ``chansup {validate,measure,bases,demo,classify}``.

Output is one ``key=value`` per line in a fixed order (``--json`` emits the
same fields as a JSON object). Reals are printed with 12 digits after the
decimal point; the infinite relative entropy prints as ``inf``.

Exit codes: 0 success, 2 semantic negative (not CP), 64 usage or parse
error, 65 dimension mismatch. ``CHANSUP_SEED`` seeds any random parameter
(``{"random_unitary": d}`` or ``{"random_state": d}`` in scenario files).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import io, protocols
from .bases import canonical_basis, choi_basis
from .bipartite import MAX_GAMMA_PRODUCT_DIM, classify, correlation_witness, gamma_state
from .channels import Channel, to_choi, validate_choi
from .errors import ChansupError, DimensionError, ParseError
from .matrix_core import TOL_PSD, ket, proj
from .sampling import default_rng, env_seed, random_state, random_unitary
from .superposition import TOL_FREE, choi_coefficients, is_superposition_free, measure_l1, measure_rel_entropy

EXIT_OK = 0
EXIT_NEGATIVE = 2
EXIT_USAGE = 64
EXIT_DATA = 65


class UsageError(ChansupError):
    pass


class Sci(float):
    """A real printed in scientific notation (tolerances, residuals)."""


def fmt(x: Any) -> str:
    if isinstance(x, Sci):
        return f"{float(x):.6e}"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{float(x) + 0.0:.12f}".replace("-0.000000000000", "0.000000000000")
    if isinstance(x, complex):
        im = fmt(abs(x.imag))
        sign = "-" if x.imag < 0 and im != fmt(0.0) else "+"
        return f"{fmt(x.real)}{sign}{im}j"
    if isinstance(x, (list, tuple, np.ndarray)):
        return ",".join(fmt(v.item() if isinstance(v, np.generic) else v) for v in x)
    return str(x)


class Report:
    def __init__(self, command: str):
        self.fields: list[tuple[str, Any]] = [("command", command)]

    def add(self, key: str, value: Any) -> None:
        self.fields.append((key, value))

    def render(self, as_json: bool) -> str:
        if as_json:
            return json.dumps({k: fmt(v) for k, v in self.fields}, indent=2) + "\n"
        return "".join(f"{k}={fmt(v)}\n" for k, v in self.fields)


def _digest(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def _load(path: str, loader: Callable):
    doc, raw = io.read_json(path)
    return loader(doc), raw


def _choi_of(doc) -> tuple[np.ndarray, Optional[Channel]]:
    if isinstance(doc, dict) and "kraus" in doc:
        ch = io.channel_from_json(doc)
        return to_choi(ch), ch
    return io.choi_from_json(doc), None


def cmd_validate(args, rep: Report) -> int:
    (choi, _), raw = _load(args.path, _choi_of)
    rep.add("input", args.path)
    rep.add("sha256", _digest(raw))
    rep.add("tol_psd", Sci(args.tol_psd))
    r = validate_choi(choi, args.tol_psd)
    d = int(round(np.sqrt(choi.shape[0])))
    marginal = choi.reshape(d, d, d, d).trace(axis1=1, axis2=3)
    defect = float(np.linalg.norm(np.eye(d) - d * marginal.T))
    rep.add("dim", d)
    rep.add("cp", r.cp)
    rep.add("tp", r.tp)
    rep.add("tni", r.tni)
    rep.add("completeness_defect", Sci(defect))
    rep.add("marginal_defect", Sci(r.marginal_defect))
    rep.add("min_choi_eigenvalue", r.min_choi_eigenvalue)
    return EXIT_OK if r.cp else EXIT_NEGATIVE


def _basis(name: str, d: int):
    if name.startswith("file:"):
        b, _ = _load(name[5:], io.basis_from_json)
        if b.dim != d:
            raise DimensionError(f"basis dimension {b.dim} differs from channel dimension {d}")
        return b
    if name not in ("nonunitary", "non_unitary", "schwinger"):
        raise UsageError(f"unknown basis {name!r}")
    return canonical_basis(name, d)


def cmd_measure(args, rep: Report) -> int:
    (choi, _), raw = _load(args.path, _choi_of)
    d = int(round(np.sqrt(choi.shape[0])))
    b = _basis(args.basis, d)
    rep.add("input", args.path)
    rep.add("sha256", _digest(raw))
    rep.add("basis", args.basis)
    rep.add("measure", args.measure)
    rep.add("tol_free", Sci(args.tol_free))
    rep.add("dim", d)
    rep.add("trace", float(np.trace(choi).real))
    if args.measure in ("l1", "both"):
        rep.add("l1", measure_l1(choi, b).value)
    if args.measure in ("relent", "both"):
        rep.add("relent", measure_rel_entropy(choi, b).value)
    free = is_superposition_free(choi, b, args.tol_free)
    rep.add("free", free is not None)
    rep.add("weights", np.real(np.diag(choi_coefficients(choi, b))))
    return EXIT_OK


def cmd_bases(args, rep: Report) -> int:
    b = canonical_basis(args.kind, args.dim)
    rep.add("kind", b.kind)
    rep.add("dim", b.dim)
    rep.add("gram_residual", Sci(b.gram_residual()))
    rep.add("choi_gram_residual", Sci(np.abs(choi_basis(b).gram() - np.eye(len(b))).max()))
    if args.out:
        io.dump(io.basis_to_json(b), args.out)
        rep.add("out", args.out)
    return EXIT_OK


NAMED_OPS = {
    "I": protocols.ID2,
    "X": protocols.SX,
    "Y": protocols.SY,
    "Z": protocols.SZ,
    "H": protocols.HADAMARD,
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
}
NAMED_STATES = {"0": ket(0, 2), "1": ket(1, 2), "+": protocols.PLUS, "-": protocols.MINUS}


def _op(p, rng):
    if isinstance(p, str):
        if p not in NAMED_OPS:
            raise ParseError(f"unknown named operator {p!r}")
        return NAMED_OPS[p]
    if isinstance(p, dict) and "random_unitary" in p:
        return random_unitary(int(p["random_unitary"]), rng)
    return io.decode_matrix(p)


def _vec(p, rng):
    if isinstance(p, str):
        if p not in NAMED_STATES:
            raise ParseError(f"unknown named state {p!r}")
        return NAMED_STATES[p]
    if isinstance(p, dict) and "random_state" in p:
        return random_state(int(p["random_state"]), rng)
    return io.decode_vector(p)


def _projector(p, rng):
    v = _vec(p, rng) if isinstance(p, str) or (isinstance(p, list) and p and not isinstance(p[0][0], list)) else io.decode_matrix(p)
    return proj(v) if v.ndim == 1 else v


def _need(params: dict, key: str):
    if key not in params:
        raise ParseError(f"scenario: missing parameter {key!r}")
    return params[key]


def _branch_rows(rep: Report, outcomes) -> None:
    rep.add("branches", len(outcomes))
    for o in outcomes:
        rep.add(f"branch[{o.label}].probability", o.probability)
        rep.add(f"branch[{o.label}].post", [complex(z) for z in o.post_state])


def _run_scenario(name: str, params: dict, rep: Report) -> int:
    rng = default_rng()
    op = lambda k: _op(_need(params, k), rng)  # noqa: E731
    vec = lambda k: _vec(_need(params, k), rng)  # noqa: E731
    rep.add("protocol", name)
    if name == "switch":
        c = vec("control")
        o = protocols.switch_superpose(op("u1"), op("u2"), c, vec("sys"), _projector(_need(params, "projector"), rng))
        _branch_rows(rep, [o])
    elif name == "collapse_qubit":
        _branch_rows(rep, protocols.collapse_qubit(op("v"), vec("sys")))
    elif name == "collapse_general":
        _branch_rows(rep, protocols.collapse_general(op("v"), vec("sys")))
    elif name == "temporal_order":
        pr = _projector(params["projector"], rng) if "projector" in params else None
        o = protocols.temporal_order(op("u1"), op("u2"), float(_need(params, "p0")), float(_need(params, "p1")), vec("sys"), pr)
        _branch_rows(rep, [o])
    elif name == "temporal_bell":
        t = protocols.temporal_bell(op("uA1"), op("uA2"), op("uB1"), op("uB2"), float(_need(params, "p0")),
                                    float(_need(params, "p1")), vec("sysA"), vec("sysB"))
        _branch_rows(rep, [t.outcome])
        rep.add("entanglement_entropy", t.entanglement_entropy)
        if t.chsh_max is not None:
            rep.add("chsh_max", t.chsh_max)
    elif name == "signaling":
        ch = io.bipartite_from_json(_need(params, "channel"))
        r = protocols.signaling_test(ch, ch.dims)
        rep.add("a_to_b", r.a_to_b)
        rep.add("b_to_a", r.b_to_a)
        if r.a_witness is not None:
            rep.add("a_witness_distance", r.a_witness[3])
        if r.b_witness is not None:
            rep.add("b_witness_distance", r.b_witness[3])
    else:
        raise UsageError(f"unknown protocol {name!r}")
    return EXIT_OK


def cmd_demo(args, rep: Report) -> int:
    path = Path(args.path)
    rep.add("seed", env_seed())
    if not path.is_dir():
        (name, params), raw = _load(args.path, io.scenario_from_json)
        rep.add("input", args.path)
        rep.add("sha256", _digest(raw))
        return _run_scenario(name, params, rep)
    status = EXIT_OK
    for f in sorted(path.glob("*.json")):
        rep.add("input", str(f))
        try:
            (name, params), raw = _load(str(f), io.scenario_from_json)
            rep.add("sha256", _digest(raw))
            code = _run_scenario(name, params, rep)
        except Exception as exc:  # each file is isolated
            code = _exit_code(exc)
            rep.add("error", str(exc))
        rep.add("status", code)
        status = max(status, code)
    return status


def cmd_classify(args, rep: Report) -> int:
    ch, raw = _load(args.path, io.bipartite_from_json)
    rep.add("input", args.path)
    rep.add("sha256", _digest(raw))
    rep.add("dims", list(ch.dims))
    ba = _basis(args.basis, ch.dims[0])
    bb = _basis(args.basis, ch.dims[1])
    res = classify(ch, ba, bb)
    rep.add("label", res.label.value)
    for key in ("kraus_set", "schmidt_ranks", "a_orthogonal", "b_orthogonal", "product_basis_l1", "reason"):
        if key in res.diagnostics:
            rep.add(key, res.diagnostics[key])
    if ch.dims[0] * ch.dims[1] <= MAX_GAMMA_PRODUCT_DIM:
        w = correlation_witness(gamma_state(ch), ch.dims)
        rep.add("product", w.product)
        rep.add("ppt", w.ppt)
        rep.add("negativity", w.negativity)
        rep.add("classical_diag", w.classical_diag)
        if w.entanglement_entropy is not None:
            rep.add("entanglement_entropy", w.entanglement_entropy)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chansup", description="Superposition of quantum operations: validation, measures, protocols.")
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    p.add_argument("--tol-psd", type=float, default=TOL_PSD)
    p.add_argument("--tol-free", type=float, default=TOL_FREE)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="CP / TP / TNI status of a channel or Choi file")
    s.add_argument("path")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("measure", help="superposition measures of a channel")
    s.add_argument("path")
    s.add_argument("--basis", default="schwinger", help="nonunitary | schwinger | file:PATH")
    s.add_argument("--measure", choices=("l1", "relent", "both"), default="both")
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("bases", help="emit a canonical operator basis")
    s.add_argument("--kind", choices=("nonunitary", "non_unitary", "schwinger"), required=True)
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_bases)

    s = sub.add_parser("demo", help="run a protocol scenario file or a directory of them")
    s.add_argument("path")
    s.set_defaults(func=cmd_demo)

    s = sub.add_parser("classify", help="local / non-local superposition class of a bipartite channel")
    s.add_argument("path")
    s.add_argument("--basis", default="schwinger", help="local reference family")
    s.set_defaults(func=cmd_classify)

    for name, sp in sub.choices.items():
        # shared flags are accepted after the subcommand too
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        sp.add_argument("--tol-psd", type=float, default=argparse.SUPPRESS)
        sp.add_argument("--tol-free", type=float, default=argparse.SUPPRESS)
    return p


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, (ParseError, UsageError, FileNotFoundError, IsADirectoryError)):
        return EXIT_USAGE
    if isinstance(exc, ChansupError):
        # dimension mismatches and other data-contract failures
        return EXIT_DATA
    raise exc


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    echo = " ".join(["chansup", *(sys.argv[1:] if argv is None else argv)])
    rep = Report(args.command)
    rep.add("argv", echo)
    try:
        code = args.func(args, rep)
    except Exception as exc:
        code = _exit_code(exc)
        rep.add("error", str(exc))
        if isinstance(exc, ParseError):
            rep.add("line", exc.line)
            rep.add("col", exc.col)
    rep.add("exit_status", code)
    out = rep.render(args.json)
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
