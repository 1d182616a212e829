"""Serialization of audit reports: JSON, plain text and a CSV digest."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict

from .audit import AuditReport, Verdict, derive_verdict
from .montecarlo import VECTORS, MonteCarloSummary
from .stats import CorrelationResult
from .unitroot import AdfResult

SIG_DIGITS = 12
FORMATS = ("json", "text", "csv-digest")


def _clean(obj):
    """Round floats to 12 significant digits, map non-finite floats to null."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _clean(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _adf_dict(res, supplementary: bool) -> dict:
    if isinstance(res, Exception):
        return {"error": f"{type(res).__name__}: {res}", "supplementary": supplementary}
    d = asdict(res)
    d["supplementary"] = supplementary
    return d


def report_to_dict(report: AuditReport) -> dict:
    fit = report.ols_levels
    return _clean({
        "inputs": report.inputs,
        "adf": {name: _adf_dict(res, name.endswith("changes"))
                for name, res in report.adf.items()},
        "correlations": {"levels": asdict(report.corr_levels),
                         "changes": asdict(report.corr_changes)},
        "regression": {
            "levels": {"beta0": fit.beta0, "beta1": fit.beta1,
                       "se_beta1": fit.se_beta1, "r_squared": fit.r_squared,
                       "n": fit.n, "degenerate": fit.degenerate},
            "resid_lag1": asdict(report.resid_diag),
        },
        "monte_carlo": report.mc.digest() if report.mc is not None else None,
        "verdict": {"category": report.verdict.value,
                    "rationale": list(report.rationale)},
        "config": report.config.echo(),
    })


def dumps_json(data: dict) -> str:
    return json.dumps(_clean(data), sort_keys=True, indent=2, allow_nan=False) + "\n"


def verdict_from_dict(data: dict) -> tuple[Verdict, list[str]]:
    """Recompute the verdict from a parsed JSON report."""
    def adf(d):
        return AdfResult(**{k: v for k, v in d.items() if k != "supplementary"})

    def corr(d):
        d = dict(d)
        if d.get("t_stat") is None:
            d["t_stat"] = math.copysign(math.inf, d["r"])
        return CorrelationResult(**d)

    labels = (data["inputs"]["a"]["label"], data["inputs"]["b"]["label"])
    return derive_verdict(adf(data["adf"]["a_levels"]), adf(data["adf"]["b_levels"]),
                          corr(data["correlations"]["levels"]),
                          corr(data["correlations"]["changes"]),
                          data["config"]["alpha"], labels)


def format_text(report: AuditReport) -> str:
    inp = report.inputs
    cl, cc, fit = report.corr_levels, report.corr_changes, report.ols_levels
    out = [
        f"trendaudit report: {inp['a']['label']} vs {inp['b']['label']}",
        f"overlap {inp['overlap']['start']}-{inp['overlap']['end']} "
        f"(n = {inp['overlap']['n']}; dropped a = {inp['a']['dropped_by_alignment']}, "
        f"b = {inp['b']['dropped_by_alignment']})",
        "",
        f"verdict: {report.verdict.value}",
    ]
    out += [f"  - {line}" for line in report.rationale]
    out += ["", "unit-root tests (ADF):"]
    for name, res in report.adf.items():
        tag = " [supplementary]" if name.endswith("changes") else ""
        if isinstance(res, Exception):
            out.append(f"  {name:<10} not computed: {res}{tag}")
            continue
        p = f", approx p {res.approx_p:.3f}" if res.approx_p is not None else ""
        out.append(f"  {name:<10} stat {res.statistic:8.3f}  5% cv "
                   f"{res.critical_values['5%']:.3f}  -> {res.verdict}{p}{tag}")
    out += [
        "",
        f"correlation, levels : r = {cl.r:.4f}  t = {cl.t_stat:.3f}  p = {cl.p_two_sided:.4g}  n = {cl.n}",
        f"correlation, changes: r = {cc.r:.4f}  t = {cc.t_stat:.3f}  p = {cc.p_two_sided:.4g}  n = {cc.n}",
        f"OLS a on b (levels) : beta1 = {fit.beta1:.6g} (se {fit.se_beta1:.3g}), "
        f"r^2 = {fit.r_squared:.4f}",
        f"lag-1 residual correlation: {report.resid_diag.rho_hat:.4f} "
        f"({report.resid_diag.n_pairs} pairs)",
    ]
    if report.mc is not None:
        mc = report.mc
        out += ["", f"random-walk null ({mc.n_walks} walks, seed {mc.seed}, "
                    f"{mc.n_excluded} excluded):"]
        out.append(f"  level r   mean {mc.stats('level_corrs')['mean']:.3f}, "
                   f"share > .30 {mc.share_above(0.30):.1%}, "
                   f"share > .75 {mc.share_above(0.75):.1%}")
        out.append(f"  changes r mean {mc.stats('change_corrs')['mean']:.3f}, "
                   f"max |r| {mc.stats('change_corrs')['max_abs']:.3f}")
        out.append(f"  observed level r {cl.r:.3f} exceeded by "
                   f"{mc.share_above(cl.r):.1%} of walks")
    return "\n".join(out) + "\n"


DIGEST_FIELDS = ("kind", "series", "index", "lo", "hi", "value")


def write_digest_csv(fh, report: AuditReport | None = None,
                     mc: MonteCarloSummary | None = None) -> None:
    """Long-format CSV of histograms and per-walk vectors for plotting."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(DIGEST_FIELDS)
    g = lambda x: "" if x is None else f"{x:.{SIG_DIGITS}g}"
    if report is not None:
        mc = report.mc
        for res in (report.corr_levels, report.corr_changes):
            w.writerow(("pair_r", res.mode, 0, "", "", g(res.r)))
            w.writerow(("pair_p", res.mode, 0, "", "", g(res.p_two_sided)))
    if mc is None:
        return
    for name in VECTORS:
        h = mc.histograms[name]
        for i, cnt in enumerate(h.counts):
            w.writerow(("hist", name, i, g(h.edges[i]), g(h.edges[i + 1]), int(cnt)))
        if h.overlay is not None:
            for i, val in enumerate(h.overlay):
                w.writerow(("overlay", name, i, g(h.edges[i]), g(h.edges[i + 1]), g(val)))
    for name in VECTORS:
        for i, val in enumerate(getattr(mc, name)):
            w.writerow(("sample", name, i, "", "", g(val)))


def render(report: AuditReport, fmt: str = "json") -> str:
    if fmt == "json":
        return dumps_json(report_to_dict(report))
    if fmt == "text":
        return format_text(report)
    if fmt == "csv-digest":
        buf = io.StringIO()
        write_digest_csv(buf, report)
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def write_report(report: AuditReport, fmt: str = "json", destination=None) -> None:
    """Write `report` to a path, an open stream, or stdout when None / "-"."""
    text = render(report, fmt)
    if destination is None or destination == "-":
        sys.stdout.write(text)
    elif isinstance(destination, (str, os.PathLike)):
        with open(destination, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        destination.write(text)
