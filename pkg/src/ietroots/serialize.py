"""JSON documents for bases, exact reals, IETs, chains, return systems and certificates.

Rationals are always strings ``"p/q"`` (or ``"p"``); floats never appear in a
document.  Parsing failures raise :class:`DocumentError` carrying a JSON
pointer to the offending field.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .dynamics import ChainSet, ReturnSystem, idoc_3iet, minimal_3iet
from .errors import (
    BasisError,
    DocumentError,
    IETError,
    LengthSumMismatch,
    NonPositiveLength,
    NotABijection,
)
from .exact import BasisSpec, DecimalApprox, ExactReal, Sqrt, Unit, basis_create
from .iet import IET, Keane, keane_minimal_sufficient, power, rank
from .roots import Evidence, NoRootCertificate, RootCertificate

DOCUMENT_VERSION = 1
_RATIONAL = re.compile(r"^[+-]?\d+(/\d+)?$")


# ---------------------------------------------------------------------------
# numbers and bases

def frac_to_json(q: Fraction) -> str:
    return str(q)


def frac_from_json(value: Any, pointer: str) -> Fraction:
    if isinstance(value, bool):
        raise DocumentError("expected a rational string, got a boolean", pointer)
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str) or not _RATIONAL.match(value.strip()):
        raise DocumentError(f"expected a rational string 'p/q', got {value!r}", pointer)
    try:
        return Fraction(value.strip())
    except ZeroDivisionError:
        raise DocumentError(f"zero denominator in {value!r}", pointer) from None


def basis_to_json(basis: BasisSpec) -> list[dict]:
    out = []
    for e in basis.elements:
        if isinstance(e, Unit):
            out.append({"kind": "unit"})
        elif isinstance(e, Sqrt):
            out.append({"kind": "sqrt", "radicand": e.radicand})
        else:
            out.append({"kind": "decimal", "approx": frac_to_json(e.approx),
                        "err": frac_to_json(e.err)})
    return out


def basis_from_json(data: Any, pointer: str = "/basis") -> BasisSpec:
    if not isinstance(data, list) or not data:
        raise DocumentError("basis must be a non-empty array", pointer)
    elems = []
    for i, d in enumerate(data):
        p = f"{pointer}/{i}"
        if not isinstance(d, dict):
            raise DocumentError("basis element must be an object", p)
        kind = d.get("kind")
        try:
            if kind == "unit":
                elems.append(Unit())
            elif kind == "sqrt":
                r = d.get("radicand")
                if isinstance(r, str) and r.strip().lstrip("+-").isdigit():
                    r = int(r)
                if not isinstance(r, int) or isinstance(r, bool):
                    raise DocumentError("radicand must be an integer", f"{p}/radicand")
                elems.append(basis_create(["unit", ("sqrt", r)]).elements[1])
            elif kind == "decimal":
                approx = frac_from_json(d.get("approx"), f"{p}/approx")
                err = frac_from_json(d.get("err"), f"{p}/err")
                try:
                    elems.append(DecimalApprox(approx, err))
                except ValueError as exc:
                    raise DocumentError(str(exc), f"{p}/err") from None
            else:
                raise DocumentError(f"unknown basis element kind {kind!r}", f"{p}/kind")
        except BasisError as exc:
            raise DocumentError(str(exc), p) from None
    try:
        return BasisSpec(tuple(elems))
    except BasisError as exc:
        raise DocumentError(str(exc), pointer) from None


def real_to_json(x: ExactReal) -> list[str]:
    return [frac_to_json(c) for c in x.coeffs]


def real_from_json(data: Any, basis: BasisSpec, pointer: str) -> ExactReal:
    if not isinstance(data, list):
        raise DocumentError("expected a coefficient array", pointer)
    if len(data) != len(basis):
        raise DocumentError(
            f"{len(data)} coefficients for a basis of dimension {len(basis)}", pointer)
    return ExactReal(basis, [frac_from_json(c, f"{pointer}/{i}") for i, c in enumerate(data)])


def real_display(x: ExactReal, digits: int = 20) -> dict:
    """Coefficients plus a decimal approximation for output (never parsed back)."""
    return {"coeffs": real_to_json(x), "expr": str(x), "approx": x.approx(digits),
            "digits": digits}


# ---------------------------------------------------------------------------
# IET documents

@dataclass(frozen=True)
class IETDocument:
    iet: IET
    name: str | None = None
    provenance: Any = None

    def to_json(self) -> dict:
        return iet_to_json(self.iet, self.name, self.provenance)


def iet_to_json(T: IET, name: str | None = None, provenance: Any = None) -> dict:
    doc = {
        "version": DOCUMENT_VERSION,
        "basis": basis_to_json(T.basis),
        "L": real_to_json(T.L),
        "lambda": [real_to_json(x) for x in T.lengths],
        "perm": list(T.perm),
    }
    if name is not None:
        doc["name"] = name
    if provenance is not None:
        doc["provenance"] = provenance
    return doc


def parse_document(doc: Any, pointer: str = "") -> IETDocument:
    """Parse an IET document; the presentation is kept as given."""
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object", pointer)
    for key in ("version", "basis", "L", "lambda", "perm"):
        if key not in doc:
            raise DocumentError(f"missing field {key!r}", f"{pointer}/{key}")
    if doc["version"] != DOCUMENT_VERSION:
        raise DocumentError(f"unsupported version {doc['version']!r}", f"{pointer}/version")
    basis = basis_from_json(doc["basis"], f"{pointer}/basis")
    L = real_from_json(doc["L"], basis, f"{pointer}/L")
    lam = doc["lambda"]
    if not isinstance(lam, list) or not lam:
        raise DocumentError("lambda must be a non-empty array", f"{pointer}/lambda")
    lengths = [real_from_json(x, basis, f"{pointer}/lambda/{i}") for i, x in enumerate(lam)]
    perm = doc["perm"]
    if (not isinstance(perm, list)
            or not all(isinstance(p, int) and not isinstance(p, bool) for p in perm)):
        raise DocumentError("perm must be an array of integers", f"{pointer}/perm")
    if len(perm) != len(lengths):
        raise DocumentError("perm and lambda differ in length", f"{pointer}/perm")
    for i, x in enumerate(lengths):
        if x.sign() <= 0:
            raise DocumentError(f"interval length {x} is not positive", f"{pointer}/lambda/{i}")
    try:
        T = IET(perm, lengths, L)
    except NotABijection as exc:
        raise DocumentError(str(exc), f"{pointer}/perm") from None
    except LengthSumMismatch as exc:
        raise DocumentError(str(exc), f"{pointer}/L") from None
    except NonPositiveLength as exc:
        raise DocumentError(str(exc), f"{pointer}/lambda") from None
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise DocumentError("name must be a string", f"{pointer}/name")
    return IETDocument(T, name, doc.get("provenance"))


def load_iet(doc: Any) -> IET:
    return parse_document(doc).iet


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


# ---------------------------------------------------------------------------
# dynamics results

def chains_to_json(cs: ChainSet) -> dict:
    return {
        "status": cs.status,
        "complete": cs.complete,
        "count": cs.count,
        "budget_used": cs.budget_used,
        "chains": [[real_to_json(x) for x in chain] for chain in cs.chains],
        "display": [" -> ".join(str(x) for x in chain) for chain in cs.chains],
    }


def return_system_to_json(rs: ReturnSystem) -> dict:
    a, b = rs.interval
    return {
        "interval": [real_to_json(a), real_to_json(b)],
        "pieces": [{"start": real_to_json(s), "length": real_to_json(n), "return_time": t,
                    "image": real_to_json(img)}
                   for (s, n), t, (img, _) in zip(rs.pieces, rs.return_times, rs.images)],
        "return_times": list(rs.return_times),
        "induced": iet_to_json(rs.induced),
        "induced_canonical": iet_to_json(rs.induced.canonical),
        "tiles": rs.tiles,
        "budget_used": rs.budget_used,
    }


# ---------------------------------------------------------------------------
# certificates

def certificate_to_json(cert) -> dict:
    if isinstance(cert, RootCertificate):
        return {"kind": "root", "n": cert.n, "S": iet_to_json(cert.S), "verified": cert.verified}
    if isinstance(cert, NoRootCertificate):
        return {"kind": "noroot", "reason": cert.reason, "data": cert.data}
    raise TypeError(f"not a certificate: {cert!r}")


@dataclass(frozen=True)
class Verdict:
    ok: bool
    kind: str
    problems: tuple = ()
    diff: dict | None = None


def verify_certificate(cert: Any, T: IET) -> Verdict:
    """Re-derive a certificate's claim about ``T`` from scratch."""
    if not isinstance(cert, dict):
        raise DocumentError("certificate must be a JSON object", "")
    kind = cert.get("kind")
    if kind == "root":
        return _verify_root(cert, T)
    if kind == "noroot":
        return _verify_noroot(cert, T)
    raise DocumentError(f"unknown certificate kind {kind!r}", "/kind")


def _verify_root(cert: dict, T: IET) -> Verdict:
    n = cert.get("n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise DocumentError("n must be an integer", "/n")
    if cert.get("verified") is not True:
        return Verdict(False, "root", ("certificate does not claim verification",))
    if "S" not in cert:
        raise DocumentError("missing field 'S'", "/S")
    S = parse_document(cert["S"], "/S").iet
    if n < 2:
        return Verdict(False, "root", (f"n = {n} is not a root order",))
    if S.basis != T.basis or S.L != T.L:
        return Verdict(False, "root", ("S and T live on different domains or bases",))
    P = power(S, n)
    if P == T:
        return Verdict(True, "root")
    diff = {"S^n": iet_to_json(P.canonical), "T": iet_to_json(T.canonical)}
    return Verdict(False, "root", ("S^n differs from T",), diff)


def _verify_noroot(cert: dict, T: IET) -> Verdict:
    reason = cert.get("reason")
    data = cert.get("data")
    if not isinstance(data, dict):
        raise DocumentError("data must be an object", "/data")
    problems = []
    if reason == "idoc_holds":
        try:
            if not minimal_3iet(T):
                problems.append("T is not minimal")
        except IETError as exc:
            return Verdict(False, "noroot", (str(exc),))
        if not problems:
            res = idoc_3iet(T)
            if not res.holds:
                problems.append(f"IDOC fails with witness {res.witness}")
            point = res.solution.point
            expected = {
                "solution": None if point is None else [str(x) for x in point],
                "directions": [[str(x) for x in d] for d in res.solution.directions],
            }
            if data != expected:
                problems.append("recorded solution set differs from the recomputed one")
    elif reason == "rank_bound":
        C = T.canonical
        r, bound = rank(C), 1 + C.m // 2
        expected = {"rank": r, "m": C.m, "bound": bound, "evidence": data.get("evidence")}
        if data != expected:
            problems.append("recorded rank data differs from the recomputed one")
        if r <= bound:
            problems.append(f"rank {r} does not exceed {bound}")
        problems.extend(_check_evidence(T, data.get("evidence")))
    else:
        raise DocumentError(f"unknown reason {reason!r}", "/reason")
    return Verdict(not problems, "noroot", tuple(problems))


def _check_evidence(T: IET, evidence) -> list[str]:
    try:
        ev = Evidence(evidence)
    except ValueError:
        return [f"unknown minimality evidence {evidence!r}"]
    if ev is Evidence.KEANE and keane_minimal_sufficient(T) is not Keane.YES:
        return ["Keane's criterion does not apply"]
    if ev is Evidence.THREE_IET:
        C = T.canonical
        if C.m != 3 or C.perm != (3, 2, 1) or not minimal_3iet(C):
            return ["T is not a minimal (3,2,1) 3-IET"]
    return []
