"""Command-line front end: design, sweep, catalog and verify.

Settings come from an optional flat JSON file (``--config``) whose keys are
the flag names; flags given on the command line override it.  Exit codes:
0 success, 1 input error, 2 construction error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from contextlib import contextmanager
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path

from . import analysis
from . import io as fio
from .errors import ConstructionError, InputError, MDLVQError, UnsupportedError, VerificationError
from .labeling import solve_labeling
from .lattice import KINDS, make_lattice
from .quantizer import QuantizerConfig, measure
from .sublattice import build_system, catalog_rows, is_clean, similar_sublattice, witnesses
from .verify import run_suite


@dataclass
class ExperimentSpec:
    kind: str = "Zn"
    L: int = 2
    xi1: str | None = None
    xi2: str | None = None
    N1: int | None = None
    N2: int | None = None
    gamma1: float | None = None
    gamma2: float | None = None
    p1: float | None = None
    p2: float | None = None
    beta: float | None = None
    R0: float | None = None
    source: str = "gaussian"
    box: float = 1000.0
    samples: int = 100_000
    seed: int = 0
    reduce: bool = False
    out: str = "."

    def validate(self):
        if self.kind not in KINDS:
            raise InputError(f"kind must be one of {KINDS}")
        if (self.xi1 is None) != (self.xi2 is None):
            raise InputError("give both xi1 and xi2")
        if self.xi1 is None and (self.N1 is None or self.N2 is None):
            raise InputError("give xi1/xi2 or N1/N2")
        has_g = self.gamma1 is not None or self.gamma2 is not None
        has_p = self.p1 is not None or self.p2 is not None
        if has_g == has_p:
            raise InputError("give exactly one of the weight pair (gamma1, gamma2) or the channel pair (p1, p2)")
        if has_g and (self.gamma1 is None or self.gamma2 is None):
            raise InputError("give both gamma1 and gamma2")
        if has_p and (self.p1 is None or self.p2 is None):
            raise InputError("give both p1 and p2")
        if (self.beta is None) == (self.R0 is None):
            raise InputError("give exactly one of beta or R0")
        if self.samples < 1:
            raise InputError("samples must be >= 1")
        return self

    def weights(self) -> tuple[Fraction, Fraction]:
        if self.gamma1 is not None:
            return Fraction(str(self.gamma1)), Fraction(str(self.gamma2))
        ch = analysis.optimal_gamma_ratio(analysis.ChannelModel(self.p1, self.p2))
        return Fraction(ch.ratio).limit_denominator(10**6), Fraction(1)

    def h_p(self) -> float:
        return analysis.entropy_gaussian() if self.source == "gaussian" else analysis.entropy_uniform(self.box)


SPEC_FIELDS = {f.name for f in fields(ExperimentSpec)}


@contextmanager
def stage(name: str):
    """Re-raise module errors with the failing stage named."""
    try:
        yield
    except MDLVQError as e:
        e.args = (f"{name}: {e}",) + e.args[1:]
        raise


def _pick_witness(kind: str, L: int, N: int):
    base = make_lattice(kind, L)
    cands = witnesses(kind, L, N)
    side = "right" if kind == "D4" else "left"
    for xi in cands:
        if is_clean(base, similar_sublattice(base, xi, side)):
            return xi
    raise ConstructionError(f"no clean similar sublattice of index {N} for {kind}{L}")


def make_system(spec: ExperimentSpec):
    base = make_lattice(spec.kind, spec.L)
    with stage("witness"):
        if spec.xi1 is not None:
            xi1 = fio.parse_element(spec.xi1, spec.kind, spec.L)
            xi2 = fio.parse_element(spec.xi2, spec.kind, spec.L)
        else:
            xi1 = _pick_witness(spec.kind, spec.L, spec.N1)
            xi2 = _pick_witness(spec.kind, spec.L, spec.N2)
    with stage("build_system"):
        s = build_system(base, xi1, xi2)
        s.check()
    return s


def _beta(spec: ExperimentSpec, base) -> float:
    if spec.beta is not None:
        if not spec.beta > 0:
            raise InputError("beta must be positive")
        return float(spec.beta)
    return analysis.beta_for_rate(spec.h_p(), spec.R0, base.dim, base.volume)


def _solve(spec, system, g1, g2):
    with stage("solve_labeling"):
        reduce = spec.reduce and system.lcm_sub is not None
        return solve_labeling(system, g1, g2, reduce=reduce)


def _measure(spec, lab, beta):
    with stage("measure"):
        cfg = QuantizerConfig(lab, beta, spec.source, spec.box, spec.seed, spec.samples)
        return measure(cfg)


def sweep_row(label: str, rep) -> dict:
    """One rd_curve row from a measurement report."""
    pred = rep.predicted or {}
    row = {
        "sweep": label,
        "gamma1": None,
        "gamma2": None,
        "beta": rep.beta,
        "R0": rep.R0,
        "R1": rep.R1,
        "R2": rep.R2,
        "R0_analytic": rep.R0_analytic,
        "R1_analytic": rep.R1_analytic,
        "R2_analytic": rep.R2_analytic,
        "d0": rep.d0,
        "d1": rep.d1,
        "d2": rep.d2,
        "d0_stderr": rep.d0_stderr,
        "d1_stderr": rep.d1_stderr,
        "d2_stderr": rep.d2_stderr,
        "d0_pred": pred.get("d0_pred"),
        "d1_pred": pred.get("d1_pred"),
        "d2_pred": pred.get("d2_pred"),
        "ratio_measured": rep.d1 / rep.d2 if rep.d2 > 0 else None,
        "ratio_excess": (rep.d1 - rep.d0) / (rep.d2 - rep.d0) if rep.d2 > rep.d0 else None,
        "ratio_pred": pred.get("ratio_pred"),
        "ozarow_d0": None,
        "gap_db": None,
    }
    if rep.source == "gaussian":
        try:
            row["ozarow_d0"] = analysis.ozarow_bound(rep.R1_analytic, rep.R2_analytic, rep.d1, rep.d2)
            row["gap_db"] = analysis.ozarow_gap_db(rep.R1_analytic, rep.R2_analytic, rep.d0, rep.d1, rep.d2)
        except InputError:
            pass
    return row


# ---------------------------------------------------------------------------
# Commands


def cmd_design(spec: ExperimentSpec) -> dict:
    spec.validate()
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    s = make_system(spec)
    g1, g2 = spec.weights()
    lab = _solve(spec, s, g1, g2)
    beta = _beta(spec, s.base)
    rep = _measure(spec, lab, beta)
    sysdoc = fio.system_document(s)
    fio.write_json(out / "system.json", sysdoc)
    fio.write_labeling(out / "labeling.csv", lab)
    doc = {
        "spec": asdict(spec) | {"out": None},
        "gamma1": lab.gamma1,
        "gamma2": lab.gamma2,
        "labeling_cost": lab.cost,
        "labeling_size": lab.size,
        "measurement": rep.as_dict(),
    }
    if spec.source == "gaussian":
        row = sweep_row("design", rep)
        doc["ozarow_d0"] = row["ozarow_d0"]
        doc["gap_db"] = row["gap_db"]
    fio.write_json(out / "report.json", doc)
    return doc


def _parse_pairs(text: str) -> list[tuple[Fraction, Fraction]]:
    out = []
    for item in text.split(","):
        a, _, b = item.partition(":")
        try:
            out.append((Fraction(a.strip()), Fraction(b.strip())))
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"bad weight pair {item!r} (expected g1:g2)") from e
    return out


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as e:
        raise InputError(f"bad number list {text!r}") from e


DEFAULT_GAMMAS = "1:4,1:2,1:1,2:1,9:5,4:1"
DEFAULT_RATES = "4,5,6,7"


def cmd_sweep(spec: ExperimentSpec, sweep: str, gammas: str = DEFAULT_GAMMAS, rates: str = DEFAULT_RATES) -> list[dict]:
    if sweep not in ("gamma", "rate"):
        raise InputError("sweep must be 'gamma' or 'rate'")
    if sweep == "rate":
        # the rate list replaces beta/R0
        spec.beta, spec.R0 = None, 0.0
    spec.validate()
    out = Path(spec.out)
    out.mkdir(parents=True, exist_ok=True)
    s = make_system(spec)
    rows = []
    if sweep == "gamma":
        beta = _beta(spec, s.base)
        for g1, g2 in _parse_pairs(gammas):
            lab = _solve(spec, s, g1, g2)
            row = sweep_row("gamma", _measure(spec, lab, beta))
            row["gamma1"], row["gamma2"] = float(g1), float(g2)
            rows.append(row)
    else:
        g1, g2 = spec.weights()
        lab = _solve(spec, s, g1, g2)
        for R0 in _parse_floats(rates):
            beta = analysis.beta_for_rate(spec.h_p(), R0, s.base.dim, s.base.volume)
            row = sweep_row("rate", _measure(spec, lab, beta))
            row["gamma1"], row["gamma2"] = float(g1), float(g2)
            rows.append(row)
    fio.write_sweep(out / "rd_curve.csv", rows)
    return rows


def cmd_catalog(kind: str, L: int, limit: int, out: str | None = None) -> str:
    if kind not in KINDS:
        raise InputError(f"kind must be one of {KINDS}")
    if limit < 1:
        raise InputError("limit must be positive")
    with stage("catalog"):
        rows = catalog_rows(kind, L, limit)
    path = None
    if out is not None:
        Path(out).mkdir(parents=True, exist_ok=True)
        path = Path(out) / "catalog.csv"
    return fio.write_catalog(path, rows)


def cmd_verify(suite: str, M: int = 3, max_ns: int = 225):
    kw = {"cld2": {"M": M}, "properties": {"max_ns": max_ns}}.get(suite, {})
    rep = run_suite(suite, **kw)
    return rep


# ---------------------------------------------------------------------------
# Argument handling


def _spec_args(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat JSON file with default settings")
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--L", type=int)
    p.add_argument("--xi1")
    p.add_argument("--xi2")
    p.add_argument("--N1", type=int)
    p.add_argument("--N2", type=int)
    p.add_argument("--gamma1", type=float)
    p.add_argument("--gamma2", type=float)
    p.add_argument("--p1", type=float)
    p.add_argument("--p2", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--R0", type=float)
    p.add_argument("--source", choices=("gaussian", "uniform"))
    p.add_argument("--box", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--reduce", action="store_const", const=True, default=None)
    p.add_argument("--out")


def spec_from_args(ns: argparse.Namespace) -> ExperimentSpec:
    vals = {}
    if getattr(ns, "config", None):
        try:
            doc = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise InputError(f"cannot read config: {e}") from e
        if not isinstance(doc, dict):
            raise InputError("config must be a flat JSON object")
        unknown = set(doc) - SPEC_FIELDS
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        for k, v in doc.items():
            if isinstance(v, (dict, list)):
                raise InputError(f"config value for {k!r} must be a scalar")
        vals.update(doc)
    for k in SPEC_FIELDS:
        v = getattr(ns, k, None)
        if v is not None:
            vals[k] = v
    for k in ("xi1", "xi2"):
        if k in vals and vals[k] is not None:
            vals[k] = str(vals[k])
    return ExperimentSpec(**vals)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mdlvq", description="Two-description lattice vector quantizer design")
    sub = p.add_subparsers(dest="command", required=True)
    d = sub.add_parser("design", help="build a system, solve the labeling, measure and write artifacts")
    _spec_args(d)
    s = sub.add_parser("sweep", help="rate-distortion sweep over weights or rates")
    _spec_args(s)
    s.add_argument("--sweep", choices=("gamma", "rate"), required=True)
    s.add_argument("--gammas", default=DEFAULT_GAMMAS, help="comma list of g1:g2 pairs")
    s.add_argument("--rates", default=DEFAULT_RATES, help="comma list of central rates R0")
    c = sub.add_parser("catalog", help="similar-sublattice indices with witnesses and cleanliness")
    c.add_argument("--kind", choices=KINDS, default="Zn")
    c.add_argument("--L", type=int, default=2)
    c.add_argument("--limit", type=int, default=50)
    c.add_argument("--out")
    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument(
        "--suite",
        choices=("properties", "cld2", "lemma51"),
        required=True,
        help="properties: structural checks on every clean system; cld2: exhaustive D4 clean search at index M^2; lemma51: deviation trend on the scaled Z family",
    )
    v.add_argument("--M", type=int, default=3)
    v.add_argument("--max-ns", dest="max_ns", type=int, default=225)
    return p


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    stderr = sys.stderr
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    try:
        if ns.command == "design":
            doc = cmd_design(spec_from_args(ns))
            m = doc["measurement"]
            print(f"cost {doc['labeling_cost']}  R0 {m['R0']:.4f}  d0 {m['d0']:.6g}  d1 {m['d1']:.6g}  d2 {m['d2']:.6g}", file=stdout)
        elif ns.command == "sweep":
            rows = cmd_sweep(spec_from_args(ns), ns.sweep, ns.gammas, ns.rates)
            print(f"{len(rows)} rows written", file=stdout)
        elif ns.command == "catalog":
            stdout.write(cmd_catalog(ns.kind, ns.L, ns.limit, ns.out))
        else:
            rep = cmd_verify(ns.suite, ns.M, ns.max_ns)
            for line in rep.lines():
                print(line, file=stdout)
            if not rep.passed:
                raise VerificationError(f"suite {ns.suite} failed")
    except (InputError, UnsupportedError) as e:
        print(f"error: {e}", file=stderr)
        return 1
    except MDLVQError as e:
        print(f"error: {e}", file=stderr)
        return e.exit_code
    return 0


def main(argv=None):
    sys.exit(run(argv))
