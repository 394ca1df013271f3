"""Regenerate the golden corpus: documents under docs/ and CLI outputs in cases.json.

Run from the repository root after an intentional output change, then review
the diff by hand before committing it.
"""

import contextlib
import io
import json
from fractions import Fraction
from pathlib import Path

from ietroots.cli import main
from ietroots.dynamics import tower_build
from ietroots.exact import DecimalApprox, basis_create, sqrt_basis
from ietroots.iet import IET, rotation
from ietroots.roots import example_family
from ietroots.serialize import dumps, iet_to_json

HERE = Path(__file__).parent
DOCS = HERE / "docs"


def documents():
    B = sqrt_basis(2)
    one, s2 = B.one(), B.sqrt(2)
    alpha = s2 - 1
    R = rotation(alpha)
    t = alpha / 2
    yield "rot_sqrt2", R, "rotation by sqrt(2)-1"
    yield "idoc_holds", IET((3, 2, 1), (alpha, alpha, 3 - s2 * 2)), "3-IET satisfying IDOC"
    yield "idoc_fails", IET((3, 2, 1), (t * 2, one - t * 3, t)), "3-IET with one orbit of discontinuities"
    yield "tower_1_2", tower_build(R, (1, 2))[0], "tower (1,2) over the rotation"
    yield "tower_2_2", tower_build(R, (2, 2))[0], "tower (2,2) over the rotation"
    yield "rational_rot", IET((2, 1), (one / 3, one * 2 / 3)), "rotation by 2/3"

    B3 = sqrt_basis(2, 3)
    s2, s3, one3 = B3.sqrt(2), B3.sqrt(3), B3.one()
    yield "rank3_321", IET((3, 2, 1), (s2 - 1, s3 - 1, one3)), "3-IET of rank 3"
    yield "rev4", IET((4, 3, 2, 1), (s2 - 1, s3 - 1, one3 / 2, one3 / 3)), "reversal of 4 intervals"
    yield "cyc4", IET((2, 4, 1, 3), (one3 / 2, s3 - 1, s2 - 1, one3 / 3)), "4-IET, perm (2,4,1,3)"
    T, S, N = example_family(4, [s2 - 1, s3 - 1])
    yield "family4_T", T, "family member m = 4"
    yield "family4_S", S, f"its {N}-th root"

    Bd = basis_create(["unit", DecimalApprox(Fraction(314159265358979, 10**14), Fraction(1, 10**14))])
    pi_frac = Bd.element(1) - 3
    yield "decimal_rot", rotation(pi_frac), "rotation by pi - 3 (decimal basis element)"


CASES = [
    ["eval", "docs/rot_sqrt2.json", "0,0"],
    ["eval", "docs/idoc_fails.json", "1/2,0"],
    ["compose", "docs/rev4.json", "docs/cyc4.json"],
    ["compose", "docs/rot_sqrt2.json", "docs/rank3_321.json"],
    ["power", "docs/rot_sqrt2.json", "0"],
    ["power", "docs/family4_S.json", "3"],
    ["power", "docs/cyc4.json", "-1"],
    ["canon", "docs/tower_1_2.json"],
    ["canon", "docs/tower_2_2.json"],
    ["rank", "docs/idoc_holds.json"],
    ["rank", "docs/family4_T.json"],
    ["chains", "docs/rot_sqrt2.json"],
    ["chains", "docs/idoc_holds.json"],
    ["chains", "docs/tower_2_2.json"],
    ["chains", "docs/rational_rot.json"],
    ["first-return", "docs/idoc_holds.json", "0,0", "[\"-2\", \"2\"]"],
    ["first-return", "docs/rot_sqrt2.json", "0,0", "2,-1"],
    ["tower", "docs/rot_sqrt2.json", "2", "2"],
    ["find-root", "docs/idoc_holds.json"],
    ["find-root", "docs/idoc_fails.json"],
    ["find-root", "docs/tower_2_2.json"],
    ["find-root", "docs/tower_1_2.json"],
    ["idoc", "docs/idoc_holds.json"],
    ["idoc", "docs/idoc_fails.json"],
    ["classify-tower", "docs/rot_sqrt2.json", "4", "6"],
    ["classify-tower", "docs/rot_sqrt2.json", "2", "3"],
    ["examples", "4", "--radicands", "2", "3", "--alpha=-1,1,0", "--alpha=-1,0,1"],
    ["examples", "5", "--radicands", "2", "3", "--alpha=-1,1,0", "--alpha=-1,0,1"],
    ["rank", "docs/decimal_rot.json"],
    ["chains", "docs/decimal_rot.json"],
]


def run(args):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(args) + ["--output", "json"])
    return code, out.getvalue(), err.getvalue()


def build():
    DOCS.mkdir(exist_ok=True)
    for name, T, prov in documents():
        (DOCS / f"{name}.json").write_text(dumps(iet_to_json(T, name, prov)) + "\n")
    cases = []
    for args in CASES:
        code, out, err = run(args)
        cases.append({"args": args, "exit": code,
                      "stdout": json.loads(out) if out else None,
                      "stderr": json.loads(err) if err else None})
    (HERE / "cases.json").write_text(dumps(cases) + "\n")
    for name, args in [("cert_idoc_fails", ["find-root", "docs/idoc_fails.json"]),
                       ("cert_idoc_holds", ["find-root", "docs/idoc_holds.json"])]:
        _, out, _ = run(args)
        (DOCS / f"{name}.json").write_text(dumps(json.loads(out)["payload"]) + "\n")


if __name__ == "__main__":
    import os
    os.chdir(HERE)
    build()
