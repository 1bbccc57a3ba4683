"""End-to-end acceptance checks; each test prints one PASS/FAIL line."""

import decimal
import math
import time

import numpy as np
import pytest

from renyirobust import (
    BernoulliStats,
    Beta,
    CurvatureRequest,
    DivergenceRequest,
    Normal,
    NormalStats,
    SeededStream,
    calibrate,
    calibration_inverse,
    curvature_beta_epsilon_closed,
    curvature_closed,
    curvature_mc,
    curvature_normal_epsilon_closed,
    curvature_normal_geometric_closed,
    quadrature_oracle,
    renyi_closed_conjugate,
    renyi_mc,
    sample_beta,
    sample_dirichlet,
    sample_gamma,
    sample_normal,
)
from renyirobust.calibration import calibration_residual
from renyirobust.cli import run, table_config
from renyirobust.cli.config import DataSource
from renyirobust.cli.main import main
from renyirobust.estimate import sample_variance
from renyirobust.samplers import _cached_draws

from reference_values import (
    BERNOULLI_CURVATURE,
    BERNOULLI_DIVERGENCE_EPSILON,
    COLUMNS,
    NORMAL_GEOMETRIC,
    half_unit,
)

STATS = BernoulliStats(11, 20)
SEED = 20200101


@pytest.fixture(scope="module")
def bernoulli_grid():
    _cached_draws.cache_clear()
    start = time.perf_counter()
    table = run(table_config("table1"))
    return table, time.perf_counter() - start


def test_curvature_grid_matches_printed_table(bernoulli_grid, report):
    table, elapsed = bernoulli_grid
    misses, checked, flagged = [], 0, 0
    for (prior, c), printed in BERNOULLI_CURVATURE.items():
        for (cls, a), text in zip(COLUMNS, printed):
            cell = table.lookup(analysis="curvature", prior=prior, c=c, class_tag=cls, a=a)
            est = cell.estimate
            if est.flags:
                flagged += 1
                continue
            checked += 1
            tol = max(3 * est.std_error, 0.0005)
            if abs(est.value - float(text)) > tol:
                misses.append(f"{prior} c={c} {cls} a={a}: {est.value:.5f} vs {text} (tol {tol:.2g})")

    def spot(cls):
        return table.lookup(analysis="curvature", prior=(1.0, 3.0), c=0.5, class_tag=cls, a=0.5).estimate

    spots_ok = spot("epsilon").within(0.0265, slack=0.0005) and spot("geometric").within(0.0235, slack=0.0005)
    ok = not misses and spots_ok and elapsed <= 60.0 and len(table.cells) == 120
    detail = (
        f"{checked} cells checked, {flagged} flagged, {len(misses)} outside tolerance, "
        f"spot (1,3) c=0.5 a=0.5 = {spot('epsilon').value:.4f}/{spot('geometric').value:.4f}, {elapsed:.1f}s"
    )
    if misses:
        detail += "; " + "; ".join(misses)
    report("Table 1 regression", ok, detail)
    assert ok, detail


def test_normal_closed_forms_match_printed_rows(report):
    misses = []
    for (prior, c), printed in NORMAL_GEOMETRIC.items():
        for a, text in zip((0.5, 1.0, 2.0), printed):
            value = curvature_normal_geometric_closed(Normal(*prior), c, a, 20).value
            if abs(value - float(text)) > half_unit(text) + 1e-12:
                misses.append(f"{prior} c={c} a={a}: {value:.5f} vs {text}")
    eps_cell = curvature_normal_epsilon_closed(Normal(0.5, 1.0), 1.5, 0.5, NormalStats(4.1905, 20)).value
    erratum_row = curvature_normal_geometric_closed(Normal(0.1, 0.1), 3.0, 0.5, 20).value
    ok = not misses and abs(eps_cell - 0.0081) <= 1e-4 and round(erratum_row, 4) == 0.0667
    detail = (
        f"{len(misses)} of 24 geometric cells off the printed digits, epsilon cell {eps_cell:.5f}, "
        f"(0.1,0.1) c=3 a=0.5 closed form {erratum_row:.4f}"
    )
    if misses:
        detail += "; " + "; ".join(misses)
    report("Table 6 closed forms", ok, detail)
    assert ok, detail


def test_monte_carlo_agrees_with_oracles(fresh_cache, report):
    start = time.perf_counter()
    failures, cells = [], 0
    for prior in (Beta(1, 3), Beta(0.5, 0.5)):
        stream = SeededStream(SEED).substream("oracle", prior.params)
        for c in (0.5, 1.5, 3.0, 5.0):
            for a in (0.5, 1 - 1e-3, 1 + 1e-3, 2.0):
                for cls in ("epsilon", "geometric"):
                    req = CurvatureRequest(prior, c, a, cls, STATS, 10**6, stream)
                    mc = curvature_mc(req)
                    exact = curvature_closed(req).value
                    cells += 1
                    if not mc.within(exact):
                        failures.append(f"curvature {prior.params} c={c} a={a} {cls}: {mc.value:.6g}+-{mc.std_error:.2g} vs {exact:.6g}")

                    dreq = DivergenceRequest(prior, c, a, cls, 0.5, STATS, 10**6, stream)
                    dmc = renyi_mc(dreq)
                    if cls == "epsilon":
                        exact = quadrature_oracle(dreq)
                    else:
                        post, post0 = dreq.posteriors()
                        exact = renyi_closed_conjugate(post, post0, a)
                    cells += 1
                    if not dmc.within(exact):
                        failures.append(f"divergence {prior.params} c={c} a={a} {cls}: {dmc.value:.6g}+-{dmc.std_error:.2g} vs {exact:.6g}")
    elapsed = time.perf_counter() - start
    ok = not failures and cells >= 40 and elapsed <= 300.0
    detail = f"{cells} cells, {len(failures)} beyond 3 SE, {elapsed:.1f}s"
    if failures:
        detail += "; " + "; ".join(failures)
    report("Oracle equivalence", ok, detail)
    assert ok, detail


def test_curvature_is_linear_in_order(fresh_cache, report):
    worst = 0.0
    stream = SeededStream(SEED)
    for prior in (Beta(0.5, 0.5), Beta(1, 3), Beta(3, 1)):
        for c in (0.5, 1.5, 3.0, 5.0):
            for cls in ("epsilon", "geometric"):
                for solver in (curvature_mc, curvature_closed):
                    per_a = [solver(CurvatureRequest(prior, c, a, cls, STATS, 10**5, stream)).value / a for a in (0.5, 1.0, 2.0)]
                    ref = per_a[0]
                    worst = max(worst, max(abs(v - ref) / ref for v in per_a))
    ok = worst <= 1e-12
    report("Linearity in a", ok, f"max relative spread of C_a/a = {worst:.2e}")
    assert ok


def test_identity_cells_are_exact(fresh_cache, report):
    bad = []
    draws = 10**4
    for tid in ("table1", "table2", "table3", "table4", "table5", "table6"):
        data = DataSource(stats=BernoulliStats(1761, 2843)) if tid == "table4" else None
        cfg = table_config(tid, data).with_overrides(mc_draws=draws)
        configs = [cfg.with_overrides(c_grid=(1.0,))]
        if "divergence" in cfg.analyses:
            configs.append(cfg.with_overrides(eps_grid=(0.0,)))
        for sub in configs:
            for cell in run(sub).cells:
                expected = 0.5 if cell.key.analysis == "calibration" else 0.0
                if not cell.ok or cell.value != expected:
                    bad.append(f"{tid} {cell.key}: {cell.value} {cell.error or ''}")
    ok = not bad
    report("Identity cells", ok, f"{len(bad)} non-exact identity cells" + ("; " + "; ".join(bad[:5]) if bad else ""))
    assert ok


def test_taylor_relation(report):
    worst, worst_at = 0.0, None
    for prior in (Beta(0.5, 0.5), Beta(1, 1), Beta(1, 3), Beta(3, 1)):
        for c in (0.5, 1.0, 1.5, 3.0, 5.0):
            for a in (0.5, 1.0, 2.0):
                d = quadrature_oracle(DivergenceRequest(prior, c, a, "epsilon", 0.05, STATS))
                C = curvature_beta_epsilon_closed(prior, c, a, STATS)
                gap = abs(d - 0.5 * 0.05**2 * C.value) / max(d, 1e-8)
                if gap > worst:
                    worst, worst_at = gap, (prior.params, c, a)
    C = curvature_beta_epsilon_closed(Beta(1, 3), 0.5, 0.5, STATS).value
    d = quadrature_oracle(DivergenceRequest(Beta(1, 3), 0.5, 0.5, "epsilon", 0.5, STATS))
    headline = round(C, 4) == 0.0265 and round(C * 0.5**2 / 2, 4) == 0.0033 and abs(d - 0.0032) <= 1e-4
    ok = worst <= 0.15 and headline
    report(
        "Taylor relation",
        ok,
        f"max relative gap {worst:.3f} at {worst_at}; headline C={C:.4f}, eps^2 C/2={C / 8:.4f}, d={d:.4f}",
    )
    assert ok


def _coin_closed_form(d0: float) -> float:
    # high-precision reference for p = 1/2 + 1/2 sqrt(1 - exp(-2 d0))
    with decimal.localcontext() as ctx:
        ctx.prec = 50
        d = decimal.Decimal(d0)
        return float(decimal.Decimal("0.5") + decimal.Decimal("0.5") * (1 - (-2 * d).exp()).sqrt())


def test_calibration_solver(report):
    grid = np.geomspace(1e-8, 0.69, 40)
    eq4_err = max(abs(calibrate(d, 1).p - _coin_closed_form(d)) / _coin_closed_form(d) for d in grid)
    residual = max(calibration_residual(calibrate(d, a).p, d, a) for d in grid for a in (0.5, 0.75, 0.9, 1.5, 2.0, 5.0))
    ps = np.linspace(0.5001, 0.999, 60)
    trip = max(abs(calibrate(calibration_inverse(p, a), a).p - p) for p in ps for a in (0.5, 1.0, 2.0))
    spots = [
        (d0, a, float(p), calibrate(float(d0), a).p)
        for (_, _, a, _), (d0, p) in BERNOULLI_DIVERGENCE_EPSILON.items()
    ]
    spot_err = max(abs(got - p) for _, _, p, got in spots)
    fixed = abs(calibrate(0.0034, 1).p - 0.5412) <= 1e-3
    ok = eq4_err <= 2.3e-16 and residual <= 1e-12 and trip <= 1e-10 and spot_err <= 1e-3 and fixed
    report(
        "Calibration",
        ok,
        f"closed-form relative error {eq4_err:.1e}, max residual {residual:.1e}, round trip {trip:.1e}, "
        f"max spot deviation {spot_err:.1e}",
    )
    assert ok


CONFIG = """
model = beta
prior = 1, 3
prior = 3, 1
c = 0.5, 3
a = 0.5, 1, 2
epsilon = 0.05, 1
class = epsilon, geometric
analysis = curvature, divergence, calibration
stats = 11, 20
draws = 20000
"""


def test_cli_output_is_deterministic(tmp_path, report):
    cfg = tmp_path / "grid.cfg"
    cfg.write_text(CONFIG)
    outputs = {}
    for fmt in ("csv", "json", "markdown"):
        for label, workers in (("first", 1), ("second", 1), ("threads", 4)):
            _cached_draws.cache_clear()
            out = tmp_path / f"{fmt}-{label}.txt"
            assert main(["run", "--config", str(cfg), "--seed", "7", "--format", fmt, "--workers", str(workers), "--out", str(out)]) == 0
            outputs[fmt, label] = out.read_bytes()
    same = all(outputs[f, "first"] == outputs[f, "second"] == outputs[f, "threads"] for f in ("csv", "json", "markdown"))
    report("Determinism", same, "byte-identical csv/json/markdown across reruns and 1 vs 4 threads")
    assert same


def _moment_check(x, mean, var):
    n = x.shape[0]
    sv = sample_variance(x)
    z_mean = abs(x.mean() - mean) / math.sqrt(var / n)
    z_var = abs(sv.variance - var) / sv.std_error
    return z_mean, z_var


def test_sampler_moment_suite(report):
    n = 10**6
    root = SeededStream(SEED)
    cases = []
    for k in (0.1, 0.25, 0.5, 1.0, 2.5, 10.0):
        x = sample_gamma(root.substream("gamma", k), k, n)
        cases.append((f"Gamma({k})", x, k, k))
    for al, be in ((0.25, 0.25), (0.5, 0.5), (1.0, 1.0), (2.0, 5.0), (12.5, 9.5)):
        x = sample_beta(root.substream("beta", al, be), al, be, n)
        s = al + be
        cases.append((f"Beta({al},{be})", x, al / s, al * be / (s * s * (s + 1))))
    for alphas in ((0.25,) * 4, (6.5, 4.5, 5.5, 5.5)):
        x = sample_dirichlet(root.substream("dirichlet", alphas), alphas, n)
        s = sum(alphas)
        for j, al in enumerate(alphas):
            cases.append((f"Dirichlet{alphas}[{j}]", x[:, j], al / s, al * (s - al) / (s * s * (s + 1))))
    for mean, var in ((4.1905, 1 / 21), (0.0, 1.0), (-3.0, 25.0)):
        x = sample_normal(root.substream("normal", mean, var), mean, var, n)
        cases.append((f"Normal({mean},{var})", x, mean, var))
    worst = []
    for name, x, mean, var in cases:
        zm, zv = _moment_check(np.asarray(x, dtype=np.float64), mean, var)
        worst.append((max(zm, zv), name))
    top = max(worst)
    ok = top[0] <= 5.0
    report("Sampler moment suite", ok, f"{len(cases)} marginals, largest deviation {top[0]:.2f} SE ({top[1]})")
    assert ok
