"""Command line front end.

Reads a condition-space document (JSON, from a file or stdin) and runs one
pipeline stage.  Exit status: 0 when every certification passes, 2 when a
verification fails, 1 for malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

from .core import (ConditionSpace, DegenerateSpace, Distribution, NotInAC, Lp, ad_chain,
                   is_point_supported, qpoly, run_pipeline, tau)
from .exactfield import NotPolyExp, Poly
from .oracle import OracleError, check_identity, x_action, z_action
from .opx import DiffOpX, right_divide
from .parsing import ParseError, parse_polyexp, parse_scalar
from .waveform import waveform_apply_x

COMMANDS = ("tau", "psi", "qpoly", "factor", "lambda", "verify", "ad", "wilson", "latex")
EXAMPLES = ("calogero_moser", "soliton")


class InputError(ValueError):
    """The document could not be turned into a condition space."""


def load_document(source) -> dict:
    try:
        doc = json.load(source)
    except json.JSONDecodeError as err:
        raise InputError(f"invalid JSON: {err}") from err
    if not isinstance(doc, dict) or not isinstance(doc.get("distributions"), list):
        raise InputError("document needs a 'distributions' list")
    return doc


def example_document(name: str) -> dict:
    text = resources.files("tbispec.data").joinpath(f"{name}.json").read_text()
    return json.loads(text)


def condition_space(doc: dict) -> ConditionSpace:
    basis = []
    for i, entries in enumerate(doc["distributions"]):
        if not isinstance(entries, list) or not entries:
            raise InputError(f"distribution {i} must be a nonempty list of entries")
        terms = []
        for e in entries:
            try:
                lam = parse_scalar(str(e["lambda"]))
                order = int(e.get("order", 0))
                coeff = parse_scalar(str(e.get("coeff", "1")))
            except (KeyError, TypeError, ValueError) as err:
                raise InputError(f"bad entry {e!r} in distribution {i}: {err}") from err
            if order < 0:
                raise InputError(f"negative order in distribution {i}")
            terms.append(((lam, order), coeff))
        basis.append(Distribution(terms))
    try:
        return ConditionSpace(basis)
    except DegenerateSpace as err:
        raise InputError(str(err)) from err


def _settings(doc: dict, args) -> dict:
    s = dict(doc.get("settings") or {})
    if args.g is not None:
        s["g_override"] = args.g
    for key in ("m_max", "oracle_samples", "seed", "tol"):
        v = getattr(args, key)
        if v is not None:
            s[key] = v
    s.setdefault("m_max", 2)
    s.setdefault("oracle_samples", 20)
    s.setdefault("seed", 0)
    s.setdefault("tol", 1e-6)
    return s


def _render(obj, fmt: str) -> str:
    if isinstance(obj, Poly):
        # polynomials reaching the output are always in z
        if fmt == "latex":
            return obj.to_latex("z")
        return obj.to_text("z", descending=True, spaced=False)
    return obj.to_latex() if fmt == "latex" else obj.to_text()


class Runner:
    """Holds one document and computes whatever a command needs, lazily."""

    def __init__(self, C: ConditionSpace, settings: dict):
        self.C = C
        self.settings = settings
        self._data = None
        g = settings.get("g_override")
        try:
            self.g = parse_polyexp(g) if g else None
        except ParseError as err:
            raise InputError(f"bad g override: {err}") from err
        self.certs = {}

    @property
    def data(self):
        if self._data is None:
            try:
                self._data = run_pipeline(self.C, g=self.g)
            except NotPolyExp as err:
                raise InputError(f"g does not make Qbar polynomial-exponential: {err}") from err
            for k, v in self._data.certificates.items():
                self.certs[k] = {"kind": "exact", "passed": bool(v)}
        return self._data

    def oracle(self, name, lhs, rhs):
        try:
            rep = check_identity(lhs, rhs, samples=int(self.settings["oracle_samples"]),
                                 tol=float(self.settings["tol"]), seed=int(self.settings["seed"]),
                                 identity=name)
        except OracleError as err:
            self.certs[name] = {"kind": "oracle", "passed": False, "error": str(err)}
            return
        self.certs[name] = {"kind": "oracle", "passed": rep.passed,
                            "max_residual": float(f"{rep.max_residual:.3e}"),
                            "samples": rep.samples, "seed": rep.seed, "tol": rep.tol}

    def verify(self) -> dict:
        d = self.data
        K = d.kbar
        M, R = right_divide(K * DiffOpX.from_poly_in_D(d.q), K)
        self.certs["lp_remainder_zero"] = {"kind": "exact", "passed": R.is_zero()}
        L = Lp(self.C, d.q, K, d.tau)
        lhs1 = waveform_apply_x(L, d.psi)
        rhs1 = d.psi * d.q
        self.certs["lp_eigenvalue"] = {"kind": "exact", "passed": lhs1 == rhs1}
        self.oracle("oracle_lp_eigenvalue", lhs1, rhs1)
        self.oracle("oracle_theorem_eigenvalue", d.eigen_lhs(), d.eigen_rhs())
        self.oracle("oracle_lp_numeric_action", x_action(L, d.psi), rhs1)
        self.oracle("oracle_lambda_numeric_action", z_action(d.lambda_op, d.psi), d.eigen_rhs())
        return {"Lp": L}

    def ad(self, m: int) -> dict:
        d = self.data
        rep = ad_chain(self.C, d.q, m, d)
        self.certs["ad_B_vanishing"] = {"kind": "exact", "passed": rep["B_vanishes"]}
        self.certs["ad_identities"] = {"kind": "exact", "passed": rep["identities_hold"]}
        return rep


def _emit(out, fmt, command, C, payload: dict, certs: dict, settings: dict):
    if fmt == "structured":
        doc = {
            "command": command,
            "condition_space": C.to_text(),
            "dim": C.dim,
            "results": payload,
            "certification": certs,
            "all_passed": all(c["passed"] for c in certs.values()),
            "settings": {k: settings[k] for k in sorted(settings)},
        }
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return
    if len(payload) == 1:
        out.write(f"{next(iter(payload.values()))}\n")
    else:
        for key, value in payload.items():
            if isinstance(value, list):
                out.write(f"{key}:\n")
                for row in value:
                    out.write("  " + " ".join(f"{k}={v}" for k, v in row.items()) + "\n")
            else:
                out.write(f"{key}: {value}\n")
    if command not in ("verify", "ad"):
        return
    for name in sorted(certs):
        c = certs[name]
        extra = f" (max residual {c['max_residual']:.2e})" if "max_residual" in c else ""
        out.write(f"[{'pass' if c['passed'] else 'FAIL'}] {name}{extra}\n")


def _payload(command: str, runner: Runner, fmt: str, m: int) -> dict:
    r = lambda v: _render(v, "latex" if fmt == "latex" else "text")
    C = runner.C
    if command == "wilson":
        return {"point_supported": is_point_supported(C)}
    if command == "qpoly":
        return {"q": r(qpoly(C))}
    if command == "tau":
        return {"tau": r(tau(C))}
    d = runner.data
    if command == "psi":
        return {"psi": r(d.psi)}
    if command == "factor":
        return {"Qbar": r(d.Qbar), "g": r(d.g), "pi": r(d.pi), "tau": r(d.tau)}
    if command == "lambda":
        return {"Lambda": r(d.lambda_op), "pi": r(d.pi),
                "shift_free": d.lambda_op.is_differential()}
    if command == "verify":
        extra = runner.verify()
        return {"tau": r(d.tau), "psi": r(d.psi), "q": r(d.q), "g": r(d.g), "pi": r(d.pi),
                "Lp": r(extra["Lp"]), "Lambda": r(d.lambda_op)}
    if command == "ad":
        rep = runner.ad(m)
        return {"p": r(rep["p"]), "ord_Lp": rep["ord_Lp"], "rows": rep["rows"]}
    if command == "latex":
        return {"tau": d.tau.to_latex(), "psi": d.psi.to_latex(), "q": d.q.to_latex("z"),
                "pi": d.pi.to_latex(), "Lambda": d.lambda_op.to_latex()}
    raise InputError(f"unknown command {command}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tbispec", description=__doc__.split("\n\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("document", nargs="?", default="-",
                    help="condition-space JSON file, '-' for stdin")
    ap.add_argument("--example", choices=EXAMPLES, help="use a bundled document")
    ap.add_argument("--format", choices=("text", "latex", "structured"), default="text")
    ap.add_argument("--g", help="override the multiplier g, e.g. 'x*exp(-x)'")
    ap.add_argument("--m", type=int, help="highest ad-chain index for 'ad'")
    ap.add_argument("--m-max", dest="m_max", type=int)
    ap.add_argument("--oracle-samples", dest="oracle_samples", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--tol", type=float)
    return ap


def main(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.example:
            doc = example_document(args.example)
        elif args.document == "-":
            doc = load_document(stdin)
        else:
            try:
                with open(args.document) as fh:
                    doc = load_document(fh)
            except OSError as err:
                raise InputError(str(err)) from err
        C = condition_space(doc)
        settings = _settings(doc, args)
        runner = Runner(C, settings)
        m = args.m if args.m is not None else int(settings["m_max"])
        payload = _payload(args.command, runner, args.format, m)
    except (InputError, ParseError, NotInAC) as err:
        stderr.write(f"error: {err}\n")
        return 1
    _emit(stdout, args.format, args.command, C, payload, runner.certs, settings)
    return 0 if all(c["passed"] for c in runner.certs.values()) else 2


if __name__ == "__main__":
    sys.exit(main())
