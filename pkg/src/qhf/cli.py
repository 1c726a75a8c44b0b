"""Command-line front end.

Exit codes: 0 the property holds / success, 1 it fails, 2 usage or guard error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import formula as fm
from .circuit import (
    FORMATS, Circuit, CircuitError, count_resources, deserialize,
    lower_strict_h_tof, serialize,
)
from .config import RunConfig
from .exactsim import GuardError, SimulationError, run_circuit, unitary_column
from .sweep import sweep
from .synth import synth_dj, synth_phase_oracle, synth_q_gadget, synth_reduction
from .verify import (
    UnsupportedClassError, Verdict, check_identity_full, check_identity_initialized,
    detect_non_affine, detect_superposition, verify_reduction,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-free-wires", type=int, default=None)
    p.add_argument("--max-full-qubits", type=int, default=None)
    p.add_argument("--max-clifford-qubits", type=int, default=None)
    p.add_argument("--max-formula-vars", type=int, default=None)


def _formula_args(p: argparse.ArgumentParser):
    p.add_argument("formula", nargs="?", help="inline formula, e.g. 'x1 & !x2'")
    p.add_argument("--file", help="read the formula text from a file")
    p.add_argument("--dimacs", help="read a DIMACS CNF file")


def _circuit_args(p: argparse.ArgumentParser):
    p.add_argument("circuit", help="circuit file (native, .qasm or .json)")
    p.add_argument("--in-format", choices=FORMATS, default=None)


def _emit_args(p: argparse.ArgumentParser):
    p.add_argument("--format", choices=FORMATS, default="native")
    p.add_argument("--strict-h-tof", action="store_true", help="lower to H and TOF only")
    p.add_argument("-o", "--out", help="write the circuit here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qhf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name in ("parse", "balanced", "verify-reduction"):
        p = sub.add_parser(name)
        _formula_args(p)
        _common(p)
    for name in ("oracle", "dj", "gadget", "reduce"):
        p = sub.add_parser(name)
        _formula_args(p)
        _emit_args(p)
        _common(p)
        if name == "gadget":
            p.add_argument("--gate", choices=("CX", "TOF"), default="CX")
        if name in ("gadget", "reduce"):
            p.add_argument("--keep-mcx", action="store_true",
                           help="emit multi-controlled X unlowered")

    p = sub.add_parser("simulate")
    _circuit_args(p)
    p.add_argument("--input", default="", help="bits for the free wires (or all wires with --column)")
    p.add_argument("--column", action="store_true", help="ignore roles; --input sets every wire")
    _common(p)

    p = sub.add_parser("check-identity")
    _circuit_args(p)
    p.add_argument("--semantics", choices=("initialized", "full"), default="initialized")
    _common(p)

    p = sub.add_parser("detect")
    _circuit_args(p)
    p.add_argument("--restrict", help="comma-separated wires for the non-affine check")
    _common(p)

    for name in ("count", "lower"):
        p = sub.add_parser(name)
        _circuit_args(p)
        _common(p)
        if name == "lower":
            p.add_argument("--format", choices=FORMATS, default="native")
            p.add_argument("-o", "--out")

    p = sub.add_parser("sweep")
    p.add_argument("n", type=int)
    _common(p)
    return parser


def _config(args) -> RunConfig:
    return RunConfig.from_env(
        output="json" if args.json else None,
        workers=args.workers, seed=args.seed,
        max_free_wires=args.max_free_wires, max_full_qubits=args.max_full_qubits,
        max_clifford_qubits=args.max_clifford_qubits, max_formula_vars=args.max_formula_vars,
    )


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_formula(args) -> fm.Formula:
    given = [x is not None for x in (args.formula, args.file, args.dimacs)]
    if sum(given) != 1:
        raise UsageError("give exactly one of FORMULA, --file or --dimacs")
    if args.dimacs:
        return fm.parse_dimacs(_read(args.dimacs))
    text = _read(args.file) if args.file else args.formula
    return fm.parse_formula(text)


def _load_circuit(args) -> Circuit:
    fmt = args.in_format
    if fmt is None:
        suffix = Path(args.circuit).suffix.lower()
        fmt = {".qasm": "qasm2", ".json": "json"}.get(suffix, "native")
    return deserialize(_read(args.circuit), fmt)


def _verdict_text(name: str, v: Verdict) -> str:
    out = f"{name}: {'holds' if v.holds else 'fails'}"
    if v.global_phase is not None:
        out += f" (global phase {v.global_phase.render()})"
    if v.witness:
        out += "\n  witness: " + json.dumps(v.witness, sort_keys=True)
    return out + "\n"


class _Out:
    def __init__(self, cfg: RunConfig):
        self.json = cfg.output == "json"

    def emit(self, text: str, doc: dict):
        if self.json:
            sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
        else:
            sys.stdout.write(text)


def _circuit_out(args, circuit: Circuit, out: _Out):
    fmt = getattr(args, "format", "native")
    text = serialize(circuit, fmt)
    if args.out:
        Path(args.out).write_text(text)
        out.emit(f"wrote {args.out}\n", {"written": args.out, "format": fmt,
                                          "qubits": circuit.m, "gates": len(circuit)})
    elif out.json and fmt != "json":
        out.emit("", {"format": fmt, "circuit": text})
    else:
        sys.stdout.write(text)


def _run(args, cfg: RunConfig, out: _Out) -> int:
    cmd = args.command
    if cmd == "parse":
        phi = _load_formula(args)
        out.emit(f"{fm.dump_ast(phi.root)}\nn_vars={phi.n_vars}\n",
                 {"ast": fm.dump_ast(phi.root), "n_vars": phi.n_vars, "text": fm.to_text(phi)})
        return EXIT_OK
    if cmd == "balanced":
        phi = _load_formula(args)
        sat = fm.count_sat(phi, cfg.max_formula_vars)
        flag = "true" if sat.balanced else "false"
        out.emit(f"#SAT={sat.count_sat}, beta={sat.beta}, balanced={flag}\n",
                 {"count_sat": sat.count_sat, "beta": str(sat.beta), "balanced": sat.balanced,
                  "n_vars": sat.n_vars})
        return EXIT_OK if sat.balanced else EXIT_FAIL
    if cmd in ("oracle", "dj", "gadget", "reduce"):
        phi = _load_formula(args)
        if cmd == "oracle":
            circuit = synth_phase_oracle(phi).circuit
        elif cmd == "dj":
            circuit = synth_dj(phi)
        elif cmd == "gadget":
            circuit = synth_q_gadget(phi, args.gate, lower=not args.keep_mcx)
        else:
            circuit, _ = synth_reduction(phi, lower=not args.keep_mcx)
        if args.strict_h_tof:
            circuit = lower_strict_h_tof(circuit)
        _circuit_out(args, circuit, out)
        return EXIT_OK
    if cmd == "verify-reduction":
        phi = _load_formula(args)
        report = verify_reduction(phi, max_full_qubits=cfg.max_full_qubits,
                                  max_free=cfg.max_free_wires)
        out.emit(report.render(), report.to_dict())
        return EXIT_OK if report.biconditional_holds and report.promise_respected else EXIT_FAIL
    if cmd == "sweep":
        summary = sweep(args.n, cfg.workers)
        out.emit(summary.render(), summary.to_dict())
        if not out.json:
            sys.stderr.write(f"runtime {summary.seconds:.2f}s\n")
        return EXIT_OK if summary.ok else EXIT_FAIL

    circuit = _load_circuit(args)
    if cmd == "simulate":
        if args.column:
            if len(args.input) != circuit.m:
                raise UsageError(f"--column needs {circuit.m} input bits")
            state = unitary_column(circuit, args.input, cfg.max_full_qubits)
        else:
            state = run_circuit(circuit, args.input)
        rows = sorted(state.render().splitlines())
        out.emit(state.render(), {"qubits": state.m, "state": rows})
        return EXIT_OK
    if cmd == "check-identity":
        if args.semantics == "full":
            v = check_identity_full(circuit, cfg.max_full_qubits)
        else:
            v = check_identity_initialized(circuit, cfg.max_free_wires)
        out.emit(_verdict_text(f"identity ({args.semantics})", v), v.to_dict())
        return EXIT_OK if v.holds else EXIT_FAIL
    if cmd == "detect":
        restrict = None
        if args.restrict:
            try:
                restrict = [int(w) for w in args.restrict.split(",")]
            except ValueError:
                raise UsageError(f"bad --restrict {args.restrict!r}") from None
            if any(not 0 <= w < circuit.m for w in restrict):
                raise UsageError("--restrict wire out of range")
        sup = detect_superposition(circuit, cfg.max_free_wires)
        na = detect_non_affine(circuit, restrict, cfg.max_free_wires)
        out.emit(_verdict_text("superposition", sup) + _verdict_text("non-affine", na),
                 {"superposition": sup.to_dict(), "non_affine": na.to_dict()})
        return EXIT_OK if sup.holds and na.holds else EXIT_FAIL
    if cmd == "count":
        rep = count_resources(circuit)
        text = "".join(f"{k}={v}\n" for k, v in rep.counts.items())
        text += "".join(f"{k}: count={rep.class_counts[k]} depth={rep.class_depths[k]}\n"
                        for k in rep.class_counts)
        text += f"total={rep.total} depth={rep.depth}\n"
        out.emit(text, rep.to_dict())
        return EXIT_OK
    if cmd == "lower":
        _circuit_out(args, lower_strict_h_tof(circuit), out)
        return EXIT_OK
    raise UsageError(f"unknown command {cmd}")


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    json_mode = "--json" in argv
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
        return _run(args, cfg, _Out(cfg))
    except (UsageError, GuardError, UnsupportedClassError, fm.FormulaError,
            CircuitError, SimulationError, ValueError) as exc:
        if json_mode:
            sys.stdout.write(json.dumps({"error": str(exc), "kind": type(exc).__name__}) + "\n")
        else:
            sys.stderr.write(f"qhf: error: {exc}\n")
        return EXIT_USAGE
