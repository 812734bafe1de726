"""Conventions ledger: the convention choices this library had to make, with the
numerical evidence that settled each one.

The ledger ships as ``data/conventions.json``. ``adjudicate()`` recomputes every
entry from scratch; ``regenerate()`` writes the file and refuses to overwrite an
adopted value that has drifted.
"""
import json
import math
import pathlib
import re
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from .errors import LedgerMismatch

DATA_FILE = pathlib.Path(__file__).with_name("data") / "conventions.json"
MANDATORY = ("phi-normalization", "f-branch", "s-matrix-sign", "pole-convention")
REFERENCE_POLE = complex(-4.446, -0.31896e-15)
REFERENCE_KAPPA = 11.0


@dataclass(frozen=True)
class LedgerEntry:
    key: str
    adopted: str
    alternatives: list
    evidence: str
    paper_anchor: str
    values: dict = field(default_factory=dict)


def ledger(path=DATA_FILE):
    """Entries of the shipped ledger file, in file order."""
    raw = json.loads(pathlib.Path(path).read_text())
    entries = [LedgerEntry(**e) for e in raw["entries"]]
    keys = [e.key for e in entries]
    if len(set(keys)) != len(keys):
        raise LedgerMismatch("duplicate ledger keys")
    return entries


def entry(key, path=DATA_FILE):
    for e in ledger(path):
        if e.key == key:
            return e
    raise KeyError(key)


def _fmt(x):
    return float(f"{x:.6e}")


def _cfmt(z):
    return [_fmt(z.real), _fmt(z.imag)]


# ---------------------------------------------------------------------------
# adjudication

def _phi_entry():
    printed = integrate.quad(lambda x: (2.0 / math.pi) * math.exp(-2 * x * x), -np.inf, np.inf)[0]
    adopted = integrate.quad(lambda x: math.sqrt(2.0 / math.pi) * math.exp(-2 * x * x), -np.inf, np.inf)[0]
    return LedgerEntry(
        key="phi-normalization",
        adopted="(2/π)^{1/4} e^{−x²}",
        alternatives=["√(2/π) e^{−x²} (norm² = √(2/π))"],
        evidence="tests/test_model.py::test_phi_unit_norm",
        paper_anchor="defect state printed with amplitude sqrt(2/pi); projector kernel sqrt(2/pi) exp(-(x^2+x'^2))",
        values={"norm_sq_adopted": _fmt(adopted), "norm_sq_printed": _fmt(printed)},
    )


def _branch_entry():
    from .cerf import faddeeva_w
    from .model import ModelParams
    from .resolvent import F, F_by_quadrature

    p = ModelParams(1.0, 1.0)
    z = 1.0 + 1.0j
    quad = F_by_quadrature(z, p)
    ours = F(z, p)
    printed = (1j * math.pi) * complex(faddeeva_w(-math.sqrt(2.0) * z))
    return LedgerEntry(
        key="f-branch",
        adopted="F(z) = -(iπ/E) w(√2 z/E) for Im z > 0, (iπ/E) w(-√2 z/E) for Im z < 0; "
                "F_ell(z) = -(iπ/E) w(√2 z/E) on the whole plane",
        alternatives=["(iπ/E) e^{-2z²/E²} erfc(i√2 z/E) on both half planes"],
        evidence="tests/test_resolvent.py::test_F_matches_defining_integral",
        paper_anchor="closed form of the Gaussian Stieltjes integral via erfc(i sqrt2 z/E)",
        values={"z": _cfmt(z), "quadrature": _cfmt(quad),
                "rel_err_adopted": _fmt(abs(ours - quad) / abs(quad)),
                "rel_err_printed_form_upper": _fmt(abs(printed - quad) / abs(quad))},
    )


def _sign_entry():
    from .laxphillips import smatrix
    from .model import ModelParams

    x = np.linspace(-20.0, 20.0, 2001)
    worst = {}
    for sign in (+1, -1):
        d = 0.0
        for lam, E in ((2.0, 1.0), (11.0, 1.0), (-2.0, 1.0)):
            d = max(d, float(np.max(smatrix(x, ModelParams(E, lam), sign=sign).modulus_defect)))
        worst[sign] = d
    adopted = min(worst, key=worst.get)
    txt = {-1: "S(x) = 1 - (2πi/E) λ√(2/π) e^{-2x²} / (1 - λ√(2/π) F(-Ex + i0))",
           +1: "S(x) = 1 + (2πi/E) λ√(2/π) e^{-2x²} / (1 - λ√(2/π) F(-Ex + i0))"}
    return LedgerEntry(
        key="s-matrix-sign",
        adopted=txt[adopted],
        alternatives=[txt[-adopted]],
        evidence="tests/test_laxphillips.py::test_smatrix_unimodular_adopted_sign",
        paper_anchor="S-matrix numerator printed with +(2 pi i/E)",
        values={"max_modulus_defect_minus": _fmt(worst[-1]),
                "max_modulus_defect_plus": _fmt(worst[+1])},
    )


def _pole_entry():
    from .model import ModelParams
    from .poles import enumerate_roots, find_pole_two_stage

    rows = {}
    s2p = math.sqrt(2.0 * math.pi)
    for label, lam in (("lambda=+11", 11.0), ("lambda=-11", -11.0),
                       ("kappa=+11", REFERENCE_KAPPA / s2p), ("kappa=-11", -REFERENCE_KAPPA / s2p)):
        p = ModelParams(1.0, lam)
        roots, total = enumerate_roots(p, complex(-15.0, -1.0), complex(15.0, 0.25))
        narrow = find_pole_two_stage(p)
        rows[label] = {"coupling": _fmt(lam), "count": total,
                       "roots": [_cfmt(r.z0) for r in roots],
                       "two_stage": _cfmt(narrow.z0)}
    hit = [k for k, v in rows.items() if abs(v["two_stage"][0] - REFERENCE_POLE.real) <= 1e-3]
    adopted = ("g(z) = 1 + i κ w(√2 z/E) with κ = λ√(2π)/E = -11, i.e. λ = -11/√(2π) at E = 1"
               if hit == ["kappa=-11"] else "no convention reproduces the reference pole")
    return LedgerEntry(
        key="pole-convention",
        adopted=adopted,
        alternatives=["λ = +11 (narrow root at +11.0228)", "λ = -11 (narrow root at -11.0228)",
                      "κ = +11 (narrow root at +4.446)"],
        evidence="tests/test_poles.py::test_pole_convention_reproduces_reference",
        paper_anchor="reference pole -4.446 - 0.31896e-15 i at lambda/E = 11",
        values={"reference": _cfmt(REFERENCE_POLE), "reproducing": hit, "readings": rows},
    )


def _residue_entry():
    from .model import ModelParams
    from .poles import find_pole, residue_at_pole

    p = ModelParams(1.0, 2.0)
    rep = residue_at_pole(find_pole(p), p)
    return LedgerEntry(
        key="residue-prefactor",
        adopted="contour residue -(2πi/E) λ√(2/π) e^{-2z0²/E²} / g'(z0) "
                "= -(iπE/2) λ√(2/π) e^{-2z0²/E²} / (z0 - λ), using g'(z0) = 4(z0 - λ)/E²",
        alternatives=["(8πi/E³) λ√(2/π) e^{-2z0²/E²} / (z0 - λ)"],
        evidence="tests/test_poles.py::test_residue_formula_vs_contour",
        paper_anchor="S-matrix residue prefactor 8 pi i / E^3",
        values={"lambda": 2.0, "E": 1.0, "formula": _cfmt(rep.formula), "contour": _cfmt(rep.contour),
                "relative_discrepancy": _fmt(rep.relative_discrepancy), "ratio": _cfmt(rep.ratio),
                "ratio_closed_form": "-16/E^4"},
    )


def _selection_entry():
    from .evolution import oracle_spectrum, spectral_peak
    from .model import ModelParams
    from .poles import find_pole

    p = ModelParams(1.0, 2.0)
    peak, spacing = spectral_peak(oracle_spectrum(p))
    pole = find_pole(p, spectral_peak=peak)
    return LedgerEntry(
        key="resonance-selection",
        adopted="root whose real part is nearest the oracle spectral-density peak; "
                "narrowest root when no oracle is available",
        alternatives=["first converged Newton root"],
        evidence="tests/test_evolution.py::test_spectral_peak_matches_pole",
        paper_anchor="uniqueness of the computed pole",
        values={"peak": _fmt(peak), "spacing": _fmt(spacing), "z0": _cfmt(pole.z0)},
    )


def _grid_entry():
    return LedgerEntry(
        key="oracle-grid",
        adopted="L = 6, N = 801 for E = 1 and |λ| <= 4; otherwise L = max(3.8, 3|z0|/E, 6) at spacing 0.015/E",
        alternatives=["L = max(3.8, 3|z0|/E) everywhere (L = 6.41 at λ = 2)"],
        evidence="tests/test_evolution.py::test_contour_matches_oracle",
        paper_anchor="none (discretization)",
    )


ADJUDICATORS = (_phi_entry, _branch_entry, _sign_entry, _pole_entry, _residue_entry,
                _selection_entry, _grid_entry)


def adjudicate():
    return [f() for f in ADJUDICATORS]


def dumps(entries):
    return json.dumps({"entries": [asdict(e) for e in entries]}, indent=1, ensure_ascii=False,
                      sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# validation

def find_tests_dir(start=None):
    here = pathlib.Path(start or __file__).resolve()
    for parent in here.parents:
        cand = parent / "tests"
        if cand.is_dir() and (cand / "test_acceptance.py").exists():
            return cand
    return None


def evidence_exists(evidence, tests_dir):
    """True when ``tests/<file>.py::<name>`` names a test function in tests_dir."""
    m = re.fullmatch(r"tests/([\w./]+\.py)::(\w+)", evidence)
    if not m or tests_dir is None:
        return False
    path = pathlib.Path(tests_dir) / m.group(1)
    if not path.exists():
        return False
    return re.search(rf"^\s*def {m.group(2)}\(", path.read_text(), re.M) is not None


def validate(entries, tests_dir):
    """List of problems: missing mandatory keys, duplicate keys, absent evidence tests."""
    problems = []
    keys = [e.key for e in entries]
    for k in MANDATORY:
        if k not in keys:
            problems.append(f"mandatory key {k!r} missing")
    if len(set(keys)) != len(keys):
        problems.append("duplicate keys")
    for e in entries:
        if not evidence_exists(e.evidence, tests_dir):
            problems.append(f"{e.key}: evidence test {e.evidence!r} not found")
    return problems


def regenerate(path=DATA_FILE, tests_dir=None, write=True):
    """Recompute the ledger, check it against the shipped file, and rewrite it.

    Returns ``(entries, problems)``. A change in any adopted value is a problem;
    the file is then left untouched.
    """
    entries = adjudicate()
    problems = validate(entries, tests_dir if tests_dir is not None else find_tests_dir())
    path = pathlib.Path(path)
    if path.exists():
        old = {e.key: e.adopted for e in ledger(path)}
        for e in entries:
            if e.key in old and old[e.key] != e.adopted:
                problems.append(f"{e.key}: adopted value drifted from {old[e.key]!r} to {e.adopted!r}")
    if write and not any("drifted" in p for p in problems):
        path.write_text(dumps(entries))
    return entries, problems
