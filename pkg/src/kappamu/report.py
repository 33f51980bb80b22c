"""Versioned, machine-readable verification reports."""

from __future__ import annotations

import json
from contextlib import nullcontext
from dataclasses import dataclass, field

from .contact_core import (
    AxiomResult,
    KappaMuReport,
    classify,
    compute_h,
    fit_kappa_mu,
    h_identities,
    is_sasakian,
    nijenhuis_identities,
    verify_contact_metric,
)
from .errors import (
    ClassMismatch,
    CriteriaDisagreement,
    KappaMuError,
    NotNullity,
)
from .exact_scalar import float_tolerance, serialize
from .frame_model import FrameModel, model_invariants
from .legendre import (
    TENSOR_IDS,
    bilegendrian_connection,
    check_parallel,
    foliation_data,
    libermann_closed_form,
    pang_closed_form,
)

REPORT_SCHEMA = "1"
DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Report:
    model_id: str
    backend: str = "exact"
    tolerance: float | None = None
    axiom_results: tuple = ()  # dicts with name / passed / witness
    kappa_mu: dict | None = None
    pang: dict = field(default_factory=dict)
    synthesis: dict | None = None
    warnings: tuple = ()
    not_kappa_mu: bool = False
    error: str | None = None

    def __post_init__(self):
        if self.backend not in ("exact", "float"):
            raise ValueError(f"unknown backend {self.backend!r}")
        object.__setattr__(self, "axiom_results", tuple(dict(a) for a in self.axiom_results))
        object.__setattr__(self, "warnings", tuple(self.warnings))
        if self.kappa_mu is not None and not self.axioms_passed:
            raise ValueError("a report with a failed axiom cannot carry a kappa_mu block")

    @property
    def axioms_passed(self) -> bool:
        return all(a["passed"] for a in self.axiom_results)

    @property
    def passed(self) -> bool:
        synth_ok = self.synthesis is None or all(c["passed"] for c in self.synthesis.get("checks", []))
        return self.error is None and self.axioms_passed and synth_ok

    @property
    def failures(self) -> list[dict]:
        out = [a for a in self.axiom_results if not a["passed"]]
        if self.synthesis:
            out += [c for c in self.synthesis.get("checks", []) if not c["passed"]]
        return out

    def to_dict(self) -> dict:
        return {
            "report_schema": REPORT_SCHEMA,
            "model_id": self.model_id,
            "backend": self.backend,
            "tolerance": self.tolerance,
            "axiom_results": [dict(a) for a in self.axiom_results],
            "kappa_mu": self.kappa_mu,
            "pang": self.pang,
            "synthesis": self.synthesis,
            "warnings": list(self.warnings),
            "not_kappa_mu": self.not_kappa_mu,
            "error": self.error,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        if data.get("report_schema") != REPORT_SCHEMA:
            raise ValueError(f"unsupported report_schema {data.get('report_schema')!r}")
        known = {k: data[k] for k in (
            "model_id", "backend", "tolerance", "axiom_results", "kappa_mu", "pang",
            "synthesis", "warnings", "not_kappa_mu", "error") if k in data}
        return cls(**known)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))


def axiom_dict(result: AxiomResult) -> dict:
    return {"name": result.name, "passed": bool(result.passed), "witness": result.witness or ""}


def kappa_mu_dict(rep: KappaMuReport) -> dict:
    s = lambda x: None if x is None else serialize(x)  # noqa: E731
    return {"kappa": s(rep.kappa), "mu": s(rep.mu), "lambda": s(rep.lam),
            "boeckx": s(rep.boeckx), "class": rep.class_label}


def backend_context(backend: str, tolerance: float | None):
    if backend == "float":
        return float_tolerance(DEFAULT_TOLERANCE if tolerance is None else tolerance)
    return nullcontext()


def prepare(model: FrameModel, backend: str) -> FrameModel:
    return model.to_float() if backend == "float" else model


def _matrix(M):
    return [[serialize(x) for x in r] for r in M.rows]


def _identity_checks(model: FrameModel, rep: KappaMuReport):
    """Pang and Libermann closed forms, classification and the parallelism of
    the bi-Legendrian connection on the eigen-foliation pair."""
    results, pang = [], {}
    datas = []
    for plus, key in ((True, "D(lambda)"), (False, "D(-lambda)")):
        basis = rep.d_plus_basis if plus else rep.d_minus_basis
        fd = foliation_data(model, basis)
        datas.append(fd)
        pang[key] = {"class": fd.pang_class, "pi": _matrix(fd.pi),
                     "basis": [[serialize(x) for x in v] for v in basis],
                     "integrable": fd.integrable}
        closed = pang_closed_form(model, rep, plus)
        results.append(AxiomResult(f"Pi_{key} = (+-2 lambda - mu + 2) g", (fd.pi - closed).is_zero()))
        if fd.lambda_op is not None and rep.class_label in ("I", "II", "III"):
            ok = (fd.lambda_op - libermann_closed_form(model, rep, plus)).is_zero()
            results.append(AxiomResult(f"Lambda_{key} closed form", ok))
    try:
        classify(rep, model)
        results.append(AxiomResult("class label matches Pang classes", True))
    except ClassMismatch as exc:
        results.append(AxiomResult("class label matches Pang classes", False, str(exc)))
    blc = bilegendrian_connection(model, datas[0].bundle, datas[1].bundle)
    results.append(AxiomResult("bi-Legendrian connection unique", blc.solution_dimension == 0))
    h = compute_h(model, check=False)
    for tid in TENSOR_IDS:
        chk = check_parallel(blc, tid, h)
        results.append(AxiomResult(f"nabla^bl {tid} = 0", chk.passed, chk.worst))
    return results, pang


def verify_report(model: FrameModel, *, model_id: str = "", backend: str = "exact",
                  tolerance: float | None = None) -> Report:
    """Run the full axiom and identity suite on one model."""
    model_id = model_id or model.name or "model"
    tol = (DEFAULT_TOLERANCE if tolerance is None else tolerance) if backend == "float" else None
    with backend_context(backend, tolerance):
        m = prepare(model, backend)
        results = [AxiomResult(name, ok, detail) for name, ok, detail in model_invariants(m)]
        warnings: list[str] = []
        km = None
        pang: dict = {}
        not_km = False
        error = None
        if all(r.passed for r in results):
            results += verify_contact_metric(m)
        if all(r.passed for r in results):
            try:
                results += h_identities(m)
                results += nijenhuis_identities(m)
                ev = is_sasakian(m)
                results.append(AxiomResult("Sasakian criteria agree", True,
                                           "Sasakian" if ev else "not Sasakian"))
                try:
                    rep = fit_kappa_mu(m)
                except NotNullity as exc:
                    not_km = True
                    warnings.append(f"not a (kappa, mu)-space: {exc}")
                else:
                    km = kappa_mu_dict(rep)
                    if not rep.sasakian:
                        extra, pang = _identity_checks(m, rep)
                        results += extra
            except CriteriaDisagreement as exc:
                results.append(AxiomResult("Sasakian criteria agree", False, str(exc)))
            except KappaMuError as exc:
                error = f"{type(exc).__name__}: {exc}"
        if not all(r.passed for r in results):
            km = None
        return Report(model_id, backend, tol, [axiom_dict(r) for r in results], km, pang,
                      None, warnings, not_km, error)
