import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar
from app.config import settings
from app.models.models import (
    RunConfig, RunReport, TableRow, GradeModel, DimsModel, PropertyResultModel, PropertyStatus,
    ReportFormat, CharacterRequest, CharacterResponse, CharacterRow
)
from app.algebra.fock import Flavor, Grade, enumerate_basis, grade_range, product_character
from app.algebra.invariants import EvidenceRow, character, conjecture_evidence, evidence_row, oracle_span
from app.algebra.properties import PROPERTIES, PropertyContext, run_properties
from app.algebra.vecfields import default_g1
from app.algebra.vertex import central_charge_experiment
from app.archive import write_report

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

CSV_COLUMNS = ["k", "l", "dim_basis", "dim_g0_inv", "dim_full_inv", "dim_oracle"]

def ordered_map(fn: Callable[[T], R], items: Sequence[T], threads: int) -> List[R]:
    """map over a worker pool; results keep the order of items"""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))

def requested_grades(cfg: RunConfig) -> List[Grade]:
    return [
        Grade(k, l)
        for k in range(cfg.k_max + 1)
        for l in grade_range(cfg.n, k)
        if cfg.includes(l)
    ]

def _grade_model(grade: Grade) -> GradeModel:
    return GradeModel(k=grade.k, l=grade.l)

def _evidence_table_row(row: EvidenceRow, with_type: bool = False) -> TableRow:
    return TableRow(
        grade=_grade_model(row.grade),
        type=row.algebra if with_type else None,
        dims=DimsModel(
            basis=row.dim_basis,
            g0_inv=row.dim_g0_invariants,
            full_inv=row.dim_full_invariants,
            oracle=row.dim_oracle_span,
        ),
        status=row.status,
        witnesses=list(row.witnesses) or None,
    )

def _first_grade(rows: Sequence[EvidenceRow], predicate: Callable[[EvidenceRow], bool]) -> Optional[str]:
    for row in rows:
        if predicate(row):
            return f"grade ({row.grade.k},{row.grade.l})"
    return None

def _property(name: str, witness: Optional[str]) -> PropertyResultModel:
    status = PropertyStatus.PASS if witness is None else PropertyStatus.FAIL
    return PropertyResultModel(name=name, status=status, witness=witness)

class BasisService:
    def __init__(self):
        self.command = "basis"

    def run(self, cfg: RunConfig) -> RunReport:
        """Weight-space dimensions per grade, checked against the product character"""
        grades = requested_grades(cfg)
        dims = ordered_map(
            lambda g: enumerate_basis(cfg.flavor, cfg.n, g.k, g.l, cfg.gamma_degree).dim,
            grades,
            cfg.threads,
        )
        tables = [
            TableRow(grade=_grade_model(g), dims=DimsModel(basis=d))
            for g, d in zip(grades, dims)
        ]

        properties = []
        notes = [f"flavor {cfg.flavor.value}"]
        if cfg.flavor is Flavor.PLUS:
            expected = product_character(cfg.n, cfg.k_max)
            witness = next(
                (f"grade ({g.k},{g.l}): enumerated {d}, character {expected.get(g, 0)}"
                 for g, d in zip(grades, dims) if d != expected.get(g, 0)),
                None,
            )
            properties.append(_property("character_identity", witness))
        else:
            notes.append(f"gamma_(-1) degree at most {cfg.gamma_degree}")

        logger.info("✅ basis: %d grades for N=%d", len(grades), cfg.n)
        return RunReport(command=self.command, config=cfg, tables=tables, properties=properties, notes=notes)

class InvariantService:
    def __init__(self):
        self.command = "invariants"
        self.evidence_kmax = settings.conjecture_kmax

    def g1_text(self, cfg: RunConfig) -> str:
        if cfg.g1 is not None:
            return cfg.g1
        return default_g1(cfg.n).text if cfg.n >= 2 else "0"

    def run(self, cfg: RunConfig) -> RunReport:
        """Invariant dimensions per grade next to the generated span"""
        # built once up front and shared read-only by the workers
        span = oracle_span(cfg.type, cfg.n, cfg.k_max)
        g1 = cfg.g1_field()
        grades = requested_grades(cfg)
        rows = ordered_map(
            lambda g: evidence_row(cfg.type, cfg.n, g.k, g.l, span, g1),
            grades,
            cfg.threads,
        )
        tables = [_evidence_table_row(row) for row in rows]

        properties = [
            _property("containment", _first_grade(rows, lambda r: not r.contained)),
        ]
        notes = [f"g1 = {self.g1_text(cfg)}"]
        if cfg.n == 2:
            properties.append(
                _property("invariants_match_generated_algebra", _first_grade(rows, lambda r: r.status == "GAP"))
            )
        else:
            notes.append("evidence: equality with the generated span is only conjectured for N != 2")

        logger.info("✅ invariants: %d grades for type %s, N=%d", len(grades), cfg.type.value, cfg.n)
        return RunReport(command=self.command, config=cfg, tables=tables, properties=properties, notes=notes)

    def evidence(self, n: int = 3, k_max: Optional[int] = None) -> RunReport:
        """Conjecture evidence over every applicable type"""
        k_max = self.evidence_kmax if k_max is None else k_max
        report = conjecture_evidence(n, k_max)
        tables = [_evidence_table_row(row, with_type=True) for row in report.rows]
        witness = next(
            (f"type {row.algebra.value} grade ({row.grade.k},{row.grade.l})" for row in report.rows if not row.contained),
            None,
        )
        return RunReport(
            command=report.label,
            config=RunConfig(n=n, k_max=k_max),
            tables=tables,
            properties=[_property("containment", witness)],
            notes=list(report.notes),
        )

class VerifyService:
    def __init__(self):
        self.command = "verify"

    def run(self, cfg: RunConfig, inject_sign_flip: bool = False) -> RunReport:
        """Run the property suite; inject_sign_flip is a negative control for tests"""
        ctx = PropertyContext(
            N=cfg.n,
            algebra=cfg.type,
            k_max=cfg.k_max,
            seed=cfg.seed,
            inject_sign_flip=inject_sign_flip,
        )
        selected = cfg.properties or list(PROPERTIES)
        names = [name for name in PROPERTIES if name in selected]
        outcomes = ordered_map(lambda name: run_properties(ctx, [name])[0], names, cfg.threads)
        properties = [
            PropertyResultModel(name=o.name, status=o.status, witness=o.witness)
            for o in outcomes
        ]

        charges = central_charge_experiment(cfg.n)
        counts = {status: sum(1 for p in properties if p.status is status) for status in PropertyStatus}
        notes = [
            f"{counts[PropertyStatus.PASS]} passed, {counts[PropertyStatus.FAIL]} failed, "
            f"{counts[PropertyStatus.SKIP]} skipped",
            f"twisted central charge {charges['twisted_c']}; J_(1)J = {charges['j_anomaly']}; "
            f"untwisted central charge {charges['untwisted_c']}",
        ]
        if counts[PropertyStatus.FAIL]:
            logger.warning("❌ verify: %d properties failed", counts[PropertyStatus.FAIL])
        else:
            logger.info("✅ verify: all %d properties hold", len(properties))
        return RunReport(command=self.command, config=cfg, properties=properties, notes=notes)

class CharacterService:
    def table(self, request: CharacterRequest) -> CharacterResponse:
        """Graded dimension table from one of the three sources"""
        counts = character(request.source, request.n, request.k_max, request.type)
        rows = [
            CharacterRow(grade=_grade_model(grade), dim=dim)
            for grade, dim in sorted(counts.items())
        ]
        return CharacterResponse(source=request.source, n=request.n, k_max=request.k_max, rows=rows)

# Rendering
def _cell(value: Optional[int]) -> str:
    return "" if value is None else str(value)

def render_csv(report: RunReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.tables:
        dims = row.dims
        writer.writerow([
            row.grade.k, row.grade.l,
            _cell(dims.basis), _cell(dims.g0_inv), _cell(dims.full_inv), _cell(dims.oracle),
        ])
    return buffer.getvalue()

def render_text(report: RunReport) -> str:
    cfg = report.config
    lines = [f"# {report.command}  N={cfg.n}  type={cfg.type.value}  k_max={cfg.k_max}"]
    lines += [f"# {note}" for note in report.notes]
    if report.tables:
        header = ["type"] if any(row.type is not None for row in report.tables) else []
        header += CSV_COLUMNS + ["status"]
        body = []
        for row in report.tables:
            dims = row.dims
            cells = [row.type.value] if header[0] == "type" else []
            cells += [
                str(row.grade.k), str(row.grade.l),
                _cell(dims.basis), _cell(dims.g0_inv), _cell(dims.full_inv), _cell(dims.oracle),
                row.status or "",
            ]
            body.append(cells)
        widths = [max(len(line[i]) for line in [header] + body) for i in range(len(header))]
        for cells in [header] + body:
            lines.append("  ".join(cell.rjust(width) for cell, width in zip(cells, widths)).rstrip())
    for p in report.properties:
        suffix = f"  ({p.witness})" if p.witness else ""
        lines.append(f"{p.status.value:<4}  {p.name}{suffix}")
    return "\n".join(lines) + "\n"

def render_report(report: RunReport, fmt: ReportFormat) -> str:
    fmt = ReportFormat(fmt)
    if fmt is ReportFormat.CSV:
        return render_csv(report)
    if fmt is ReportFormat.TEXT:
        return render_text(report)
    return report.model_dump_json(indent=2, exclude_none=True) + "\n"

def report_name(report: RunReport) -> str:
    cfg = report.config
    return f"{report.command}_{cfg.type.value}_N{cfg.n}_k{cfg.k_max}"

def archive_report(report: RunReport, fmt: ReportFormat) -> str:
    path = write_report(report_name(report), ReportFormat(fmt).value, render_report(report, fmt))
    return str(path)

# Create service instances
basis_service = BasisService()
invariant_service = InvariantService()
verify_service = VerifyService()
character_service = CharacterService()
