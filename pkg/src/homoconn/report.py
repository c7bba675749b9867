"""
Commands behind the CLI and HTTP surfaces, and their JSON/Markdown emitters.

Every command returns a ReportEnvelope {command, config, results, residuals,
verdicts}; numbers in it always come from the solver and the Nomizu calculus.
"""

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .batteries import BatteryManager, default_manager
from .config import config
from .connection_families import (
    expected_einstein,
    family_alpha,
    named_connection,
    skew_family,
)
from .errors import InvalidInputError
from .invariant_solver import (
    BilinearMap,
    invariant_bilinear_basis,
    metric_subspace,
    skew_torsion_subspace,
)
from .lie_core import ReductiveSplit, reductive_split
from .models import CLASS_N, ComplexValue, ReportEnvelope, RunConfig
from .nomizu_calculus import (
    FLAT_TOL,
    ConnectionReport,
    curvature_invariants,
    levi_civita_map,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_COMPLEX_UNIT = re.compile(r"(?<![\d.])i")


def parse_complex(text: str) -> complex:
    """Parse `1+0i`, `-0.5i`, `i`, `2`, `1-i` into a complex number."""
    cleaned = text.strip().replace(" ", "")
    if not cleaned:
        raise InvalidInputError("empty complex number")
    try:
        return complex(_COMPLEX_UNIT.sub("1i", cleaned).replace("i", "j"))
    except ValueError:
        raise InvalidInputError(f"cannot parse complex number '{text}'") from None


def parse_grid(text: str) -> List[float]:
    """`a:b:step` (inclusive) or a comma-separated list."""
    text = text.strip()
    try:
        if ":" not in text:
            return [float(v) for v in text.split(",") if v.strip()]
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise InvalidInputError(f"cannot parse grid '{text}'") from None
    if step <= 0 or stop < start:
        raise InvalidInputError(f"grid '{text}' needs step > 0 and a <= b")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(count)]


def parse_q_grid(text: str) -> List[complex]:
    """Comma list of complex numbers, or `a:b:step` expanded to the lattice Re x Im."""
    if ":" in text:
        values = parse_grid(text)
        return [complex(re_, im) for re_ in values for im in values]
    return [parse_complex(v) for v in text.split(",") if v.strip()]


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


def curvature_class(report: ConnectionReport) -> str:
    """flat, totally_skew (nonzero, cyclic) or generic"""
    if report.curvature_max < FLAT_TOL:
        return "flat"
    if report.cyclic_residual < FLAT_TOL:
        return "totally_skew"
    return "generic"


def ricci_sign(sym_ricci: np.ndarray, tol: float = FLAT_TOL) -> str:
    eigenvalues = np.linalg.eigvalsh(sym_ricci)
    if np.max(np.abs(eigenvalues)) < tol:
        return "zero"
    if np.min(eigenvalues) > tol:
        return "positive"
    if np.max(eigenvalues) < -tol:
        return "negative"
    return "indefinite"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _resolve_n(sphere: Optional[str], n: Optional[int]) -> int:
    required = CLASS_N.get(sphere) if sphere else None
    if required is not None:
        if n is not None and n != required:
            raise InvalidInputError(
                f"sphere class {sphere} has n = {required}, got {n}"
            )
        return required
    if n is None:
        raise InvalidInputError("n is required for general_n and named connections")
    return n


def dims_row(n: int) -> Dict[str, Any]:
    split = reductive_split(n)
    invariant = invariant_bilinear_basis(split)
    metric = metric_subspace(invariant, split)
    skew = skew_torsion_subspace(metric, split, levi_civita_map(split))
    return {
        "sphere": f"S^{2 * n + 1}",
        "n": n,
        "invariant": invariant.dim,
        "metric": metric.dim,
        "skew_torsion": skew.dim,
    }


def cmd_dims(n_list: Sequence[int]) -> ReportEnvelope:
    if not n_list:
        raise InvalidInputError("at least one n is required")
    for n in n_list:
        if n < 1:
            raise InvalidInputError(f"sphere parameter n must be >= 1, got n={n}")
    rows = [dims_row(n) for n in n_list]
    return ReportEnvelope(command="dims", config={"n": list(n_list)}, results=rows)


def resolve_connection(run: RunConfig) -> tuple:
    """(split, alpha, label) for a connection request."""
    if run.named is not None:
        split = reductive_split(_resolve_n(run.sphere, run.n))
        return split, named_connection(run.named, split), run.named
    if run.params is not None:
        split = reductive_split(_resolve_n(run.params.sphere_class, run.n))
        label = f"{run.params.sphere_class}/{run.params.kind}"
        return split, family_alpha(run.params, split), label
    if run.sphere is None or run.r is None:
        raise InvalidInputError(
            "give --named, --params '{\"sphere_class\": ...}', or --sphere with --r"
        )
    split = reductive_split(_resolve_n(run.sphere, run.n))
    q = run.q.value if run.q is not None else None
    return split, skew_family(run.sphere, run.r, q, split), f"{run.sphere}/skew"


def _report_payload(split: ReductiveSplit, report: ConnectionReport) -> Dict[str, Any]:
    payload = {
        "n": split.n,
        "dim": split.dim,
        "scalar": report.scalar,
        "torsion_norm_sq": report.torsion_norm_sq,
        "curvature_max": report.curvature_max,
        "ricci": report.ricci.tolist(),
        "sym_ricci": report.sym_ricci.tolist(),
        "s_tensor": report.s_tensor.tolist(),
        "ricci_sign": ricci_sign(report.sym_ricci),
    }
    if split.n == 3:
        payload["curvature_class"] = curvature_class(report)
    return payload


def cmd_connection(run: RunConfig) -> ReportEnvelope:
    split, alpha, label = resolve_connection(run)
    report = curvature_invariants(split, alpha, tol=run.tolerance)
    results = _report_payload(split, report)
    results["connection"] = label

    residuals = {
        "metric": report.metric_residual,
        "sym_ricci_routes": report.sym_ricci_route_gap,
        "cyclic": report.cyclic_residual,
    }
    if report.einstein_residual is not None:
        residuals["einstein"] = report.einstein_residual
    verdicts = {
        "is_metric": report.is_metric,
        "is_skew_torsion": report.is_skew_torsion,
        "is_einstein": report.is_einstein,
        "ricci_sign": results["ricci_sign"],
    }
    if "curvature_class" in results:
        verdicts["curvature_class"] = results["curvature_class"]
    return ReportEnvelope(
        command="connection",
        config=run.model_dump(mode="json"),
        results=results,
        residuals=residuals,
        verdicts=verdicts,
    )


def _scan_point(
    sphere: str, split: ReductiveSplit, r: float, q: Optional[complex], tol: float
) -> Dict[str, Any]:
    alpha: BilinearMap = skew_family(sphere, r, q, split)
    report = curvature_invariants(split, alpha, tol=tol)
    expected = expected_einstein(sphere, split.n, r, q, tol=tol)
    return {
        "r": r,
        "q": ComplexValue.of(q).model_dump() if q is not None else None,
        "residual": report.einstein_residual,
        "einstein": report.is_einstein,
        "expected": expected,
        "agrees": report.is_einstein == expected,
    }


def cmd_einstein_scan(run: RunConfig, workers: Optional[int] = None) -> ReportEnvelope:
    """Einstein residual over an r (and q) grid of the skew family."""
    if run.sphere is None:
        raise InvalidInputError("scan needs a sphere class")
    if not run.r_grid:
        raise InvalidInputError("scan needs a non-empty r grid")
    if run.q_grid and run.sphere not in ("s7", "s5"):
        raise InvalidInputError(f"q is not a parameter of the {run.sphere} skew family")

    split = reductive_split(_resolve_n(run.sphere, run.n))
    q_values = [q.value for q in run.q_grid] or [None]
    grid = [(r, q) for r in run.r_grid for q in q_values]
    # warm the per-split caches before fanning out
    skew_family(run.sphere, 0.0, q_values[0], split)
    logger.debug("scan %s n=%d: %d points", run.sphere, split.n, len(grid))

    workers = workers or config.SCAN_WORKERS
    with ThreadPoolExecutor(max_workers=workers) as pool:
        points = list(
            pool.map(
                lambda point: _scan_point(
                    run.sphere, split, point[0], point[1], run.tolerance
                ),
                grid,
            )
        )

    on_locus = [p["residual"] for p in points if p["expected"]]
    return ReportEnvelope(
        command="scan",
        config=run.model_dump(mode="json"),
        results=points,
        residuals={"max_on_locus": max(on_locus, default=0.0)},
        verdicts={
            "locus_matches": all(p["agrees"] for p in points),
            "einstein_points": sum(1 for p in points if p["einstein"]),
        },
    )


def cmd_verify(
    run: RunConfig,
    batteries: Optional[Sequence[str]] = None,
    manager: Optional[BatteryManager] = None,
) -> ReportEnvelope:
    manager = manager or default_manager()
    results = manager.run_all(run.seed, run.trials, batteries)
    verdicts: Dict[str, Any] = {r.name: r.passed for r in results}
    verdicts["all_passed"] = all(r.passed for r in results)
    return ReportEnvelope(
        command="verify",
        config=run.model_dump(mode="json"),
        results=[r.model_dump() for r in results],
        residuals={r.name: r.max_residual for r in results},
        verdicts=verdicts,
    )


# ---------------------------------------------------------------------------
# Emitters
# ---------------------------------------------------------------------------


def render_json(envelope: ReportEnvelope) -> str:
    return envelope.model_dump_json(indent=2)


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if value is None:
        return "-"
    return str(value)


def _matrix_md(title: str, matrix: List[List[float]]) -> List[str]:
    lines = [f"### {title}", "", "```"]
    lines += [" ".join(f"{v:10.4f}" for v in row) for row in matrix]
    lines += ["```", ""]
    return lines


def _dims_md(envelope: ReportEnvelope) -> List[str]:
    lines = [
        "# Invariant connections on odd-dimensional spheres",
        "",
        "| Sphere | n | Invariant | Metric | Skew-torsion |",
        "|---|---|---|---|---|",
    ]
    for row in envelope.results:
        lines.append(
            f"| {row['sphere']} | {row['n']} | {row['invariant']} "
            f"| {row['metric']} | {row['skew_torsion']} |"
        )
    return lines


def _connection_md(envelope: ReportEnvelope) -> List[str]:
    results = envelope.results
    lines = [f"# Connection report: {results['connection']}", ""]
    lines += ["| Quantity | Value |", "|---|---|"]
    for key in ("n", "scalar", "torsion_norm_sq", "curvature_max", "ricci_sign"):
        lines.append(f"| {key} | {_fmt(results[key])} |")
    for key, value in envelope.verdicts.items():
        lines.append(f"| {key} | {_fmt(value)} |")
    for key, value in envelope.residuals.items():
        lines.append(f"| residual: {key} | {_fmt(value)} |")
    lines.append("")
    lines += _matrix_md("Sym(Ric)", results["sym_ricci"])
    lines += _matrix_md("S", results["s_tensor"])
    return lines


def _scan_md(envelope: ReportEnvelope) -> List[str]:
    lines = [
        f"# Einstein scan: {envelope.config.get('sphere')}",
        "",
        "| r | q | residual | Einstein | expected | agrees |",
        "|---|---|---|---|---|---|",
    ]
    for p in envelope.results:
        q = p["q"]
        q_text = "-" if q is None else f"{q['re']:g}{q['im']:+g}i"
        lines.append(
            f"| {p['r']:g} | {q_text} | {_fmt(p['residual'])} | {p['einstein']} "
            f"| {p['expected']} | {p['agrees']} |"
        )
    lines += ["", f"locus_matches: {envelope.verdicts['locus_matches']}"]
    return lines


def _verify_md(envelope: ReportEnvelope) -> List[str]:
    lines = [
        "# Verification batteries",
        "",
        "| Battery | Passed | Max residual | Detail |",
        "|---|---|---|---|",
    ]
    for r in envelope.results:
        lines.append(
            f"| {r['name']} | {r['passed']} | {r['max_residual']:.3e} | {r['detail']} |"
        )
    lines += ["", f"all_passed: {envelope.verdicts['all_passed']}"]
    return lines


_MARKDOWN = {
    "dims": _dims_md,
    "connection": _connection_md,
    "scan": _scan_md,
    "verify": _verify_md,
}


def render_markdown(envelope: ReportEnvelope) -> str:
    return "\n".join(_MARKDOWN[envelope.command](envelope)) + "\n"


def render(envelope: ReportEnvelope, output_format: str) -> str:
    if output_format == "markdown":
        return render_markdown(envelope)
    return render_json(envelope)
