"""Tables, comparisons and file emission behind the command line."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .covariance import NoiseModel, coarse_convergence, cov_1d, cov_2d, post_transform_cov
from .errors import InvalidParam, UnknownTable
from .simulate import SimConfig, default_2d_config, mc_run_1d, mc_run_2d
from .spectra import (HilbertDualRule, WaveletFamily, dual_spectrum, haar_packet_filters,
                      make_spectrum, meyer_linear_phase)
from .xcorr import decay_exponent_fit, gamma, gamma_pair_quad, gamma_provider

__all__ = [
    "TABLE_IDS",
    "XCORR_HEADER",
    "FIELD2D_HEADER",
    "MEYER_TABLE_PHASES",
    "load_paper_tables",
    "make_family",
    "build_table",
    "xcorr_rows",
    "mc_compare",
    "field2d_compare",
    "mosaic",
    "write_pgm",
    "write_csv",
    "acceptance_suite",
]

TABLE_IDS = ("asymptotic_haar", "dyadic_theory", "meyer_first", "meyer_last",
             "hadamard", "interband")
XCORR_HEADER = ["family", "M", "eps", "d", "m", "mprime", "lag", "gamma", "method", "abs_err"]
FIELD2D_HEADER = ["m1", "m2", "l1", "l2", "gamma_theory", "gamma_mc", "stderr"]
TABLE_HEADER = ["table", "family", "M", "eps", "m", "mprime", "lag", "quantity",
                "value", "method", "paper_value", "delta"]
MC_HEADER = ["j", "m", "mprime", "kind", "lag", "mean", "stderr", "theory", "z"]

# Linear Meyer phases eta_m(w) = slope_m * w under which the published
# inter-band values are reproduced (found by fitting; not part of the
# family definition, which leaves the phases open).
MEYER_TABLE_PHASES = {
    2: (0.0, -0.5),
    3: (0.0, -1.5, -0.75),
    4: (0.0, -0.5, -0.25, -0.75),
}


def fmt(x):
    """Stable text form of a float for CSV output."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in r])
    return path


# ---------------------------------------------------------------- families


def make_family(name, M=2, eps=None, order=None, filters=None, phase_slopes=None,
                phase_offsets=None):
    """Build a :class:`WaveletFamily` from command-line style names.

    ``name`` is one of shannon, meyer, haar, franklin (alias splines1),
    battle_lemarie (needs ``order``; ``splinesP`` is shorthand), custom.
    ``phase_slopes="orthonormal"`` selects :func:`meyer_linear_phase`.
    """
    name = name.lower()
    if name.startswith("splines") and name != "splines":
        order = int(name[len("splines"):])
        name = "franklin" if order == 1 else "battle_lemarie"
    if name.startswith("battle_lemarie") and name[-1].isdigit():
        order = int(name[len("battle_lemarie"):])
        name = "battle_lemarie"
    if name == "shannon":
        return WaveletFamily.shannon(M)
    if name == "meyer":
        if isinstance(phase_slopes, str):
            if phase_slopes != "orthonormal":
                raise InvalidParam(f"unknown phase choice {phase_slopes!r}")
            phase_slopes, phase_offsets = meyer_linear_phase(M)
        return WaveletFamily.meyer(M, eps, phase_slopes=phase_slopes,
                                   phase_offsets=phase_offsets)
    if name == "haar":
        return WaveletFamily.haar(M)
    if name == "franklin":
        return WaveletFamily.franklin()
    if name == "battle_lemarie":
        if order is None:
            raise InvalidParam("battle_lemarie needs --order")
        if order == 1:
            return WaveletFamily.franklin()
        return WaveletFamily.battle_lemarie(order)
    if name == "custom":
        if filters is None:
            raise InvalidParam("custom family needs a filter file")
        return WaveletFamily.custom_fir(filters)
    raise InvalidParam(f"unknown family {name!r}")


def _eps_text(fam):
    return "" if fam.epsilon is None else fmt(fam.epsilon)


# ---------------------------------------------------------------- published values


def load_paper_tables():
    """Rows of the bundled transcription of published values (read-only)."""
    text = resources.files("dtnoise").joinpath("data/paper_tables.csv").read_text("utf-8")
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    rows = []
    for r in csv.DictReader(io.StringIO("\n".join(lines))):
        r["paper_value"] = float(Fraction(r["paper_value"]))
        r["M"] = int(r["M"])
        r["m"], r["mprime"] = int(r["m"]), int(r["mprime"])
        r["lag"] = int(r["lag"]) if r["lag"] else None
        r["eps"] = float(Fraction(r["eps"])) if r["eps"] else None
        rows.append(r)
    return rows


def _table_family(r):
    fam, M = r["family"], r["M"]
    if fam == "meyer":
        slopes = MEYER_TABLE_PHASES.get(M) if r["table"] == "interband" else None
        return WaveletFamily.meyer(M, r["eps"], phase_slopes=slopes)
    return make_family(fam, M)


def _asymptotic_rows(rows):
    out = []
    taus = np.arange(8, 65, dtype=float)
    fam = WaveletFamily.haar(16)
    by_m = {}
    for r in rows:
        by_m.setdefault(r["m"], {})[r["quantity"]] = r
    for m in sorted(by_m):
        seq = gamma(fam, m, m, taus)
        fit = decay_exponent_fit(taus, seq.values)
        e = by_m[m]["exponent"]["paper_value"]
        coeff = math.pi * gamma(fam, m, m, [32.0]).values[0] * 32.0 ** e
        for q, val in (("exponent", fit.exponent), ("pi_coeff", coeff)):
            pv = by_m[m][q]["paper_value"]
            out.append(["asymptotic_haar", "haar", 16, "", m, m, "", q, val, seq.method,
                        pv, val - pv])
    return out


def build_table(table_id):
    """Computed values beside the published ones for one table.

    Returns
    -------
    header, rows : list, list of lists
    """
    if table_id not in TABLE_IDS:
        raise UnknownTable(f"unknown table {table_id!r}; choose from {', '.join(TABLE_IDS)}")
    paper = [r for r in load_paper_tables() if r["table"] == table_id]
    if table_id == "asymptotic_haar":
        return TABLE_HEADER, _asymptotic_rows(paper)
    groups = {}
    for r in paper:
        key = (r["family"], r["M"], r["eps"], r["m"], r["mprime"])
        groups.setdefault(key, []).append(r)
    out = []
    for (famname, M, eps, m, mp), rs in groups.items():
        fam = _table_family(rs[0])
        lags = [r["lag"] for r in rs]
        if table_id == "hadamard":
            seq = gamma(fam, m, mp, lags, method="packet_recursion")
        else:
            seq = gamma(fam, m, mp, lags)
        for r, v in zip(rs, seq.values):
            out.append([table_id, famname, M, "" if eps is None else fmt(eps), m, mp,
                        r["lag"], "gamma", v, seq.method, r["paper_value"],
                        v - r["paper_value"]])
    return TABLE_HEADER, out


# ---------------------------------------------------------------- xcorr


def xcorr_rows(family, bands, lags, method="auto", d=0):
    """CSV rows for ``(m, mprime)`` band pairs, ordered by (m, mprime, lag)."""
    rows = []
    lags = np.sort(np.asarray(lags, dtype=float))
    for m, mp in sorted(bands):
        seq = gamma(family, m, mp, lags, d, method)
        err = np.broadcast_to(np.asarray(seq.est_abs_error, dtype=float), lags.shape)
        for lag, v, e in zip(lags, seq.values, err):
            lag = int(lag) if lag == int(lag) else float(lag)
            rows.append([family.kind, family.M, _eps_text(family), d, m, mp, lag, v,
                         seq.method, e])
    return rows


# ---------------------------------------------------------------- Monte Carlo


def _theory_1d(family, noise, j, m, mp, kind, lags, d):
    if kind == "primal_dual":
        prov = gamma_provider(family, m, mp, d)
        return cov_1d(noise, prov, j, m, mp, lags, kind, family.M).values
    if noise.kind == "white":
        if m != mp and family.kind == "meyer" and family.phase_slopes is None:
            # phase-free Meyer bands are not orthogonal to their neighbours
            a, b = make_spectrum(family, m), make_spectrum(family, mp)
            if kind == "dual_dual":
                rule = HilbertDualRule(d)
                a, b = dual_spectrum(a, rule), dual_spectrum(b, rule)
            return noise.sigma2 * gamma_pair_quad(a, b, -np.asarray(lags, dtype=float))[0]
        return cov_1d(noise, None, j, m, mp, lags, kind, family.M).values
    return np.full(len(lags), np.nan)


def mc_compare(config, noise, lags, kinds=("primal_dual",), pairs="diagonal", workers=1):
    """Monte Carlo estimates beside theory.

    Returns
    -------
    rows : list
        One row per (j, m, mprime, kind, lag) following ``MC_HEADER``.
    frac : float
        Fraction of cells with ``|z| <= 3`` (cells without theory excluded).
    """
    est = mc_run_1d(config, noise, lags, kinds, pairs, workers)
    theory = {}
    rows, zs = [], []
    for e in est:
        key = (e.j, e.m, e.mprime, e.kind)
        if key not in theory:
            th = _theory_1d(config.family, noise, e.j, e.m, e.mprime, e.kind,
                            np.asarray(lags), config.d)
            theory[key] = dict(zip(np.asarray(lags).tolist(), th))
        th = theory[key][e.lag]
        z = (e.mean - th) / e.stderr if e.stderr > 0 else (0.0 if e.mean == th else np.inf)
        if not np.isnan(th):
            zs.append(abs(z))
        rows.append([e.j, e.m, e.mprime, e.kind, e.lag, e.mean, e.stderr, th, z])
    frac = float(np.mean(np.asarray(zs) <= 3)) if zs else float("nan")
    return rows, frac


@dataclass
class Field2DResult:
    M: int
    lags: np.ndarray
    theory: dict
    mc: dict
    stderr: dict
    post: dict | None = None

    def frac_within(self, k=3.0):
        z = [np.abs((self.mc[mm] - self.theory[mm]) / self.stderr[mm]).ravel()
             for mm in self.theory]
        return float(np.mean(np.concatenate(z) <= k))

    def rows(self):
        out = []
        for mm in sorted(self.theory):
            for a, l1 in enumerate(self.lags):
                for b, l2 in enumerate(self.lags):
                    out.append([mm[0], mm[1], int(l1), int(l2), self.theory[mm][a, b],
                                self.mc[mm][a, b], self.stderr[mm][a, b]])
        return out


def field2d_compare(family, noise, runs=100, seed=0, L=256, J=2, lags=range(4),
                    post_transform=False, workers=1):
    """2D white-noise covariance fields: theory and Monte Carlo for every subband."""
    lags = np.asarray(list(lags))
    config = default_2d_config(family, runs=runs, base_seed=seed, L=L, J=J)
    fields = mc_run_2d(config, noise, lags, post_transform, workers)
    M = family.M
    theory, mc, se, post = {}, {}, {}, {}
    for f in fields:
        provs = [gamma_provider(family, f.m[0], f.m[0]), gamma_provider(family, f.m[1], f.m[1])]
        if f.kind == "nh":
            th = cov_2d(noise, provs, J, f.m, f.m, lags, lags, "primal_dual", M).values
            theory[f.m], mc[f.m], se[f.m] = th, f.mean, f.stderr
        else:
            nh = cov_2d(noise, provs, J, f.m, f.m, lags, lags, "primal_dual", M).values
            nn = cov_2d(noise, provs, J, f.m, f.m, lags, lags, "primal_primal", M).values
            th = {"ww": nn + nh, "whwh": nn - nh, "wwh": np.zeros_like(nh)}[f.kind]
            post[(f.m, f.kind)] = (th, f.mean, f.stderr)
    return Field2DResult(M, lags, theory, mc, se, post if post_transform else None)


def mosaic(blocks, M, n, cell=16, sep=1):
    """Assemble an ``M x M`` mosaic of ``n x n`` lag blocks into an 8-bit image.

    Values are mapped symmetrically around zero: ``-max|v|`` to 0 (dark),
    0 to 128 and ``+max|v|`` to 255 (light). Blocks are separated by dashed
    lines.
    """
    vmax = max(float(np.max(np.abs(b))) for b in blocks.values()) or 1.0
    side = M * n * cell + (M - 1) * sep
    img = np.zeros((side, side), dtype=np.uint8)
    for (m1, m2), b in blocks.items():
        g = np.clip(np.rint(127.5 + 127.5 * np.asarray(b) / vmax), 0, 255).astype(np.uint8)
        g = np.kron(g, np.ones((cell, cell), dtype=np.uint8))
        r0, c0 = m1 * (n * cell + sep), m2 * (n * cell + sep)
        img[r0:r0 + n * cell, c0:c0 + n * cell] = g
    dash = np.where((np.arange(side) // 4) % 2 == 0, 255, 0).astype(np.uint8)
    for k in range(1, M):
        p = k * (n * cell + sep) - sep
        img[p:p + sep, :] = dash
        img[:, p:p + sep] = dash[:, None]
    return img


def write_pgm(path, img):
    """Plain (P2) 8-bit portable graymap."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    h, w = img.shape
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"P2\n{w} {h}\n255\n")
        for row in img:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")
    return path


# ---------------------------------------------------------------- acceptance


@dataclass
class Check:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float


def _max_delta(rows, select=lambda r: True):
    d = [abs(r[-1]) for r in rows if select(r)]
    return max(d)


def _check_tables():
    t = time.perf_counter()
    _, rows = build_table("dyadic_theory")
    bl = _max_delta(rows, lambda r: r[1] == "battle_lemarie3")
    other = _max_delta(rows, lambda r: r[1] != "battle_lemarie3")
    dt = time.perf_counter() - t
    ok = len(rows) == 35 and bl <= 2e-4 and other <= 5e-5 and dt < 30
    yield Check(1, "dyadic theory table", ok,
                f"{len(rows)} values, max|delta| closed {other:.2e}, spline-3 {bl:.2e}, {dt:.1f}s", dt)
    t = time.perf_counter()
    _, r1 = build_table("meyer_first")
    _, r2 = build_table("meyer_last")
    dmax = _max_delta(r1 + r2)
    dt = time.perf_counter() - t
    yield Check(2, "M-band Meyer tables", dmax <= 5e-5 and dt < 60,
                f"{len(r1) + len(r2)} values, max|delta| {dmax:.2e}, {dt:.1f}s", dt)


def _check_hadamard():
    t = time.perf_counter()
    _, rows = build_table("hadamard")
    dpaper = _max_delta(rows)
    fam = WaveletFamily.custom_fir(haar_packet_filters(3))
    had = WaveletFamily.haar(8)
    dq = 0.0
    for m in range(2, 8):
        rec = gamma(had, m, m, [1, 2, 3], method="packet_recursion").values
        q = gamma(fam, m, m, [1, 2, 3], method="quadrature").values
        dq = max(dq, float(np.max(np.abs(rec - q))))
    dt = time.perf_counter() - t
    return Check(3, "Walsh-Hadamard recursion", dpaper <= 5e-5 and dq <= 1e-6,
                 f"max|delta| published {dpaper:.2e}, vs FIR quadrature {dq:.2e}", dt)


def _check_asymptotics():
    t = time.perf_counter()
    fam = WaveletFamily.haar(8)
    taus = np.arange(8, 65, dtype=float)
    target = {1: (3, 1 / (8 * math.pi)), 3: (5, -3 / (2 ** 7 * math.pi)),
              7: (7, 45 / (2 ** 14 * math.pi))}
    ok, parts = True, []
    for m, (e, c) in target.items():
        fit = decay_exponent_fit(taus, gamma(fam, m, m, taus).values)
        ratio = gamma(fam, m, m, [32.0]).values[0] * 32.0 ** e / c
        ok &= abs(fit.exponent - e) <= 0.3 and abs(ratio - 1) <= 0.15
        parts.append(f"m={m}: exp {fit.exponent:.3f}, ratio {ratio:.4f}")
    return Check(4, "Walsh-Hadamard asymptotics", bool(ok), "; ".join(parts),
                 time.perf_counter() - t)


def _check_franklin_limit():
    t = time.perf_counter()
    v = gamma(WaveletFamily.franklin(), 1, 1, [64.0]).values[0] * 64.0 ** 5
    target = -1 / (32 * math.pi)
    rel = abs(v / target - 1)
    return Check(5, "Franklin tau^5 limit", rel <= 0.10,
                 f"tau^5 gamma(64) = {v:.4e} vs {target:.4e} (rel {rel:.3f})",
                 time.perf_counter() - t)


def _check_interband():
    t = time.perf_counter()
    _, rows = build_table("interband")
    gated = [r for r in rows if r[1] in ("haar", "battle_lemarie3", "franklin")]
    dmax = _max_delta(gated)
    sh = WaveletFamily.shannon(2)
    z = max(float(np.max(np.abs(gamma(sh, a, b, np.arange(-3, 4), method=meth).values)))
            for a, b in ((0, 1), (1, 0)) for meth in ("closed_form", "quadrature"))
    return Check(6, "inter-band table", dmax <= 2e-4 and z == 0.0,
                 f"{len(gated)} gated values, max|delta| {dmax:.2e}; Shannon max|gamma| {z:g}",
                 time.perf_counter() - t)


def _check_properties():
    t = time.perf_counter()
    lags = np.arange(-8, 9, dtype=float)
    worst = {"odd": 0.0, "odd_q": 0.0, "sym": 0.0, "swap": 0.0, "bound": 0.0, "oracle": 0.0}
    fams = [WaveletFamily.shannon(2), WaveletFamily.meyer(2, 1 / 3), WaveletFamily.haar(2),
            WaveletFamily.franklin(), WaveletFamily.meyer(3)]
    for fam in fams:
        for m in range(fam.M):
            c = gamma(fam, m, m, lags)
            q = gamma(fam, m, m, lags, method="quadrature")
            worst["oracle"] = max(worst["oracle"], float(np.max(np.abs(c.values - q.values))))
            worst["bound"] = max(worst["bound"], float(np.max(np.abs(c.values))))
            if m:
                worst["odd"] = max(worst["odd"], float(np.max(np.abs(c.values + c.values[::-1]))))
        for d in (0, 1, -2):
            a = gamma(fam, 0, 0, lags, d).values
            b = gamma(fam, 0, 0, -lags - 2 * d - 1, d).values
            worst["sym"] = max(worst["sym"], float(np.max(np.abs(a - b))))
    bl = WaveletFamily.battle_lemarie(3)
    a = gamma(bl, 1, 1, lags, method="quadrature").values
    worst["odd_q"] = float(np.max(np.abs(a + a[::-1])))
    mey = WaveletFamily.meyer(4, phase_slopes=MEYER_TABLE_PHASES[4])
    a = gamma(mey, 1, 2, lags, method="quadrature").values
    b = gamma(mey, 2, 1, -lags, method="quadrature").values
    worst["swap"] = float(np.max(np.abs(a + b)))
    # post-transform and separability on the white-noise Meyer 3-band fields
    fam = WaveletFamily.meyer(3)
    noise = NoiseModel.white(1.0)
    sep, post = 0.0, 0.0
    for m in ((1, 1), (1, 2), (2, 2)):
        provs = [gamma_provider(fam, m[0], m[0]), gamma_provider(fam, m[1], m[1])]
        f = cov_2d(noise, provs, 2, m, m, range(4), range(4), "primal_dual", 3)
        g1 = cov_1d(noise, provs[0], 2, m[0], m[0], range(4), M=3).values
        g2 = cov_1d(noise, provs[1], 2, m[1], m[1], range(4), M=3).values
        sep = max(sep, float(np.max(np.abs(f.values - np.multiply.outer(g1, g2)))))
        nn = cov_2d(noise, provs, 2, m, m, range(4), range(4), "primal_primal", 3)
        post = max(post, float(np.max(np.abs(post_transform_cov(nn, f).wwh.values))))
    ok = (worst["odd"] <= 1e-9 and worst["odd_q"] <= 1e-6 and worst["sym"] <= 1e-6 and worst["swap"] <= 1e-6
          and worst["bound"] <= 1 and worst["oracle"] <= 1e-6 and sep == 0 and post == 0)
    detail = (f"odd {worst['odd']:.1e} (quadrature {worst['odd_q']:.1e}), sym {worst['sym']:.1e}, swap {worst['swap']:.1e}, "
              f"max|gamma| {worst['bound']:.3f}, oracle {worst['oracle']:.1e}, "
              f"separability {sep:g}, post cross {post:g}")
    return Check(7, "property suite", ok, detail, time.perf_counter() - t)


def _check_mc(seed):
    t = time.perf_counter()
    noise = NoiseModel.white(1.0)
    parts, ok = [], True
    for fam in (WaveletFamily.shannon(2), WaveletFamily.meyer(2, 1 / 3)):
        cfg = SimConfig(fam, J=3, L=2 ** 14, R=16, runs=100, base_seed=seed)
        _, frac = mc_compare(cfg, noise, range(4))
        ok &= frac >= 0.95
        parts.append(f"{fam.kind} {frac:.3f}")
    res = field2d_compare(WaveletFamily.meyer(3), noise, runs=100, seed=seed)
    f2 = res.frac_within()
    ok &= f2 >= 0.90
    dt = time.perf_counter() - t
    ok &= dt < 600
    parts.append(f"2D Meyer M=3 {f2:.3f}")
    return Check(8, "Monte Carlo vs theory", bool(ok), "; ".join(parts) + f", {dt:.1f}s", dt)


def _check_coarse():
    t = time.perf_counter()
    fam = WaveletFamily.meyer(2, 1 / 3)
    noise = NoiseModel.exponential(1.0, 1.0)
    lags = np.arange(-3, 4)
    parts, ok = [], True
    for m in (0, 1):
        err = coarse_convergence(noise, gamma_provider(fam, m, m), m, m, lags, (2, 4, 6))
        ok &= bool(np.all(np.diff(err) < 0) and err[-1] <= 0.05)
        parts.append(f"m={m}: " + ", ".join(f"{e:.4f}" for e in err))
    return Check(9, "coarse-resolution limit", ok, "; ".join(parts), time.perf_counter() - t)


def acceptance_suite(seed=0):
    """Run every acceptance check; yields :class:`Check` records in order."""
    yield from _check_tables()
    yield _check_hadamard()
    yield _check_asymptotics()
    yield _check_franklin_limit()
    yield _check_interband()
    yield _check_properties()
    yield _check_mc(seed)
    yield _check_coarse()
