"""Command-line entry point: ``tubeinv <command> [options]``.

Exit codes: 0 when everything computed passes, 1 when a check fails, 2 for
invalid input (bad labels, unknown quivers, unsupported backends).
"""
from __future__ import annotations

import json
import logging
import os
import sys
from dataclasses import dataclass

import click

from .alphainv import check_suite, diagonal_spectrum
from .cyclo import embed_complex
from .frob import MAX_H, FrobeniusLimitError, frobenius_report
from .linalg import RankAmbiguityError
from .mtc import modular_data
from .quivmod import ADEQuiver, QuiverError, ade_quiver, builtin_names, quiver_from_json

log = logging.getLogger("tubeinv")

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class InvalidInput(click.ClickException):
    exit_code = EXIT_INVALID


@dataclass(frozen=True)
class RunConfig:
    command: str
    h: int | None = None
    quiver: str | None = None
    backend: str = "exact"
    tolerance: float | None = None
    deep: bool = False
    fmt: str = "json"
    out: str | None = None

    def __post_init__(self):
        if self.tolerance is not None and self.backend != "float":
            raise InvalidInput("--tolerance is only meaningful with --backend float")


# ---------------------------------------------------------------------------
# loading and emitting


def load_quiver(source: str) -> ADEQuiver:
    """A builtin name (A2..A29, D4..D16, E6..E8) or a path to a quiver JSON file."""
    if source in builtin_names():
        return ade_quiver(source)
    if os.path.exists(source):
        try:
            with open(source, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInput(f"cannot read quiver file {source}: {exc}") from exc
        try:
            return quiver_from_json(data)
        except (QuiverError, KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"invalid quiver {source}: {exc}") from exc
    raise InvalidInput(f"unknown quiver {source!r}: not a builtin name or an existing file")


def dump_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit(cfg: RunConfig, text: str):
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _num(x, digits: int = 6) -> str:
    z = complex(embed_complex(x, 15))
    re_, im = round(z.real, digits) + 0.0, round(z.imag, digits) + 0.0
    if im == 0:
        return f"{re_:g}"
    if re_ == 0:
        return f"{im:g}i"
    return f"{re_:g}{'+' if im > 0 else '-'}{abs(im):g}i"


def _grid(rows) -> str:
    cells = [[str(c) for c in row] for row in rows]
    width = max((len(c) for row in cells for c in row), default=1)
    return "\n".join("  ".join(c.rjust(width) for c in row) for row in cells)


def _latex_matrix(rows) -> str:
    body = " \\\\\n".join(" & ".join(str(c) for c in row) for row in rows)
    return "\\begin{pmatrix}\n" + body + "\n\\end{pmatrix}"


def _chi_sum(labels) -> str:
    return " + ".join(f"\\chi_{{{a}}}" for a in labels)


def latex_partition_function(Z: list) -> str:
    """Z as a sum of |chi_R + ...|^2 blocks when it decomposes that way, else the raw matrix."""
    n = len(Z)
    seen_rows: set = set()
    terms = []
    for start in range(n):
        if start in seen_rows or not any(Z[start]):
            continue
        rows, cols = {start}, set()
        frontier = True
        while frontier:
            frontier = False
            for r in list(rows):
                for c in range(n):
                    if Z[r][c] and c not in cols:
                        cols.add(c)
                        frontier = True
            for c in list(cols):
                for r in range(n):
                    if Z[r][c] and r not in rows:
                        rows.add(r)
                        frontier = True
        seen_rows |= rows
        values = {Z[r][c] for r in rows for c in cols}
        if len(values) != 1:
            return _latex_matrix(Z)
        k = values.pop()
        R = [r + 1 for r in sorted(rows)]
        C = [c + 1 for c in sorted(cols)]
        coef = "" if k == 1 else str(k)
        if R == C:
            inner = _chi_sum(R)
            terms.append(f"{coef}|{inner}|^2")
        else:
            terms.append(f"{coef}({_chi_sum(R)})({_chi_sum(C)})^*")
    return "Z = " + " + ".join(terms) if terms else _latex_matrix(Z)


# ---------------------------------------------------------------------------
# commands


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("-v", "--verbose", is_flag=True, help="Log progress to stderr.")
def cli(verbose: bool):
    """Modular invariants of ADE module categories over Temperley-Lieb."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def common_options(func):
    func = click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
                        help="Write the report here instead of stdout.")(func)
    func = click.option("--format", "fmt", type=click.Choice(["json", "pretty", "latex"]),
                        default="json", show_default=True)(func)
    return func


def quiver_options(func):
    func = click.option("--deep", is_flag=True,
                        help="Also impose the two-strand intertwiner square.")(func)
    func = click.option("--tolerance", type=float, default=None,
                        help="Relative singular-value threshold (float backend).")(func)
    func = click.option("--backend", type=click.Choice(["exact", "float"]), default="exact",
                        show_default=True)(func)
    func = click.option("--quiver", "quiver", required=True,
                        help="Builtin name (A2..A29, D4..D16, E6, E7, E8) or quiver JSON path.")(func)
    return func


@cli.command("modular-data")
@click.option("--h", "h", type=int, required=True, help="Coxeter number (>= 3).")
@common_options
def cmd_modular_data(h: int, fmt: str, out: str | None):
    """S, T, quantum dimensions and fusion rules at Coxeter number h."""
    cfg = RunConfig("modular-data", h=h, fmt=fmt, out=out)
    if h < 3:
        raise InvalidInput(f"Coxeter number must be at least 3, got {h}")
    md = modular_data(h)
    if fmt == "json":
        text = dump_json(md.to_json())
    elif fmt == "pretty":
        lines = [f"h = {h}, labels 1..{h - 1}, d(C) = {_num(md.global_dim)}",
                 "d: " + "  ".join(_num(x) for x in md.d),
                 "|d|: " + "  ".join(f"{v:g}" for v in md.to_json()["abs_d"]),
                 "T: " + "  ".join(_num(x) for x in md.T),
                 "S:", _grid([[_num(x) for x in row] for row in md.S])]
        text = "\n".join(lines) + "\n"
    else:
        text = (f"% h = {h}\nd = {_latex_matrix([[_num(x) for x in md.d]])}\n"
                f"T = \\mathrm{{diag}}{_latex_matrix([[_num(x) for x in md.T]])}\n"
                f"S = {_latex_matrix([[_num(x) for x in row] for row in md.S])}\n")
    emit(cfg, text)


@cli.command("invariant")
@quiver_options
@common_options
def cmd_invariant(quiver: str, backend: str, tolerance: float | None, deep: bool, fmt: str,
                  out: str | None):
    """Compute Z(TM) for a quiver, check invariance and compare with the ADE list."""
    cfg = RunConfig("invariant", quiver=quiver, backend=backend, tolerance=tolerance, deep=deep,
                    fmt=fmt, out=out)
    q = load_quiver(quiver)
    try:
        result = check_suite(q, backend=backend, deep=deep, tolerance=tolerance)
    except RankAmbiguityError as exc:
        raise InvalidInput(f"float rank decision is ambiguous: {exc}") from exc
    data = result.to_json()
    if fmt == "json":
        text = dump_json(data)
    elif fmt == "pretty":
        checks = data["checks"]
        lines = [f"{q.name} (h = {q.h}, backend {backend})", _grid(result.z.matrix),
                 "checks: " + ", ".join(f"{k}={'pass' if v else 'FAIL'}"
                                        for k, v in checks.items() if isinstance(v, bool)),
                 f"ADE match: {data['ciz_match']}"]
        if "s_defect" in checks:
            lines.append(f"S defect: {checks['s_defect']['value']}")
        if backend == "float":
            lines.append(f"smallest rank gap ratio: {result.z.min_gap()}")
        text = "\n".join(lines) + "\n"
    else:
        text = f"% {q.name}, h = {q.h}\n{latex_partition_function(result.z.matrix)}\n"
    emit(cfg, text)
    if not result.ok:
        sys.exit(EXIT_FAIL)


@cli.command("diagonal")
@quiver_options
@common_options
def cmd_diagonal(quiver: str, backend: str, tolerance: float | None, deep: bool, fmt: str,
                 out: str | None):
    """Diagonal of Z from eigenvalue multiplicities of the adjacency matrix."""
    cfg = RunConfig("diagonal", quiver=quiver, backend=backend, tolerance=tolerance, deep=deep,
                    fmt=fmt, out=out)
    q = load_quiver(quiver)
    diag = diagonal_spectrum(q)
    if fmt == "json":
        text = dump_json({"quiver": q.name, "h": q.h, "labels": list(range(1, q.h)),
                          "diagonal": diag})
    elif fmt == "pretty":
        ones = [m for m, v in enumerate(diag, 1) if v]
        text = f"{q.name} (h = {q.h}): {tuple(diag)}\nexponents: {ones}\n"
    else:
        text = f"% {q.name}, h = {q.h}\n{_latex_matrix([diag])}\n"
    emit(cfg, text)


@cli.command("frobenius")
@quiver_options
@common_options
def cmd_frobenius(quiver: str, backend: str, tolerance: float | None, deep: bool, fmt: str,
                  out: str | None):
    """Verify the commutative Frobenius algebra structure on TM (exact, small h)."""
    cfg = RunConfig("frobenius", quiver=quiver, backend=backend, tolerance=tolerance, deep=deep,
                    fmt=fmt, out=out)
    q = load_quiver(quiver)
    if backend != "exact" or q.h > MAX_H:
        raise InvalidInput(f"exact backend required, h ≤ {MAX_H}")
    try:
        report = frobenius_report(q)
    except FrobeniusLimitError as exc:
        raise InvalidInput(str(exc)) from exc
    data = report.to_json()
    if fmt == "json":
        text = dump_json(data)
    else:
        rows = [(name, "pass" if c["ok"] else "FAIL") for name, c in data["checks"].items()]
        rows.append(("dim_condition", "pass" if report.dim_condition else "FAIL"))
        if fmt == "pretty":
            text = f"{q.name} (h = {q.h})\n" + "\n".join(f"  {n:<15}{v}" for n, v in rows) + "\n"
        else:
            body = " \\\\\n".join(f"{n.replace('_', ' ')} & {v}" for n, v in rows)
            text = f"% {q.name}, h = {q.h}\n\\begin{{tabular}}{{ll}}\n{body}\n\\end{{tabular}}\n"
    emit(cfg, text)
    if not report.ok:
        sys.exit(EXIT_FAIL)


def main(argv=None):
    cli.main(args=argv, prog_name="tubeinv")


if __name__ == "__main__":  # pragma: no cover
    main()
