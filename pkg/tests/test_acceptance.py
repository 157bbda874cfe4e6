"""Acceptance criteria C1-C9, each at its stated tolerance.

Every check records a verdict in ``acceptance_log``; the terminal summary
prints one PASS/FAIL line per criterion with the numbers behind it. Run
standalone with ``python tests/test_acceptance.py``.
"""

import sys
import time
import warnings
from functools import lru_cache

import numpy as np
import pytest

import acceptance_log
import oracles
from impurity1d.ed import EDProblem, converge
from impurity1d.observables import local_maxima, threshold_mass_scan
from impurity1d.polaron import solve_effective, tabulate
from impurity1d.strong_ansatz import AnsatzState, ansatz_obdm

G_ENTROPY = (0.0, 1.0, 2.0, 5.0, 10.0, 20.0)
# energy budgets (quanta above the free ground state) per boson number
K_OBS = {2: 40, 3: 34, 4: 30}
K_MASS = {2: 40, 3: 32, 4: 28}
M_SWEEP = tuple(float(m) for m in np.linspace(1.0, 8.0, 29))
M_TH_TARGET = {2: 2.5, 3: 3.5, 4: 4.5}


def check(crit, name, passed, detail):
    acceptance_log.record(crit, name, passed, detail)
    assert passed, f"{crit} {name}: {detail}"


# ---------------------------------------------------------------------------
# shared computations


@lru_cache(maxsize=None)
def entropy_series(n_a):
    prob = EDProblem.with_excess(n_a, K_OBS[n_a], 1.0, "even")
    out = {}
    for g in G_ENTROPY:
        sol = prob.solve(g)
        out[g] = sol.summary()
    return out


@lru_cache(maxsize=None)
def strong_solution(n_a, g):
    return EDProblem.with_excess(n_a, K_OBS[n_a], 1.0, "even").solve(g)


@lru_cache(maxsize=None)
def mass_sweep(n_a):
    t0 = time.perf_counter()
    rows = []
    for m in M_SWEEP:
        sol = EDProblem.with_excess(n_a, K_MASS[n_a], m, "even").solve(10.0)
        s = sol.summary()
        s["m"] = m
        rows.append(s)
    return rows, time.perf_counter() - t0


@lru_cache(maxsize=None)
def endpoint_solution(n_a):
    # heaviest impurity of the sweep, with a tighter cutoff: the central
    # structure of the N_A=2 impurity density is still moving at K=40
    return EDProblem.with_excess(n_a, K_MASS[n_a] + 8, M_SWEEP[-1], "even").solve(10.0)


@lru_cache(maxsize=None)
def ed_ladder_n4(g):
    return converge(4, g, 1.0, [28, 32, 36, 40], "even")


@lru_cache(maxsize=None)
def polaron_tables(g):
    t0 = time.perf_counter()
    y = np.linspace(-6.0, 6.0, 481)
    return y, tabulate(g, y), time.perf_counter() - t0


# ---------------------------------------------------------------------------
# C1


def test_c1_non_interacting_exactness():
    t0 = time.perf_counter()
    worst_e0 = worst_e1 = 0.0
    for n_a in (1, 2, 3, 4):
        for m in (1.0, 3.7):
            sol = EDProblem.with_excess(n_a, 2, m, None).solve(0.0, k=2, tol=1e-12)
            worst_e0 = max(worst_e0, abs(sol.energies[0] - (n_a + 1) / 2))
            per_atom = sol.energies[1] / (n_a + 1)
            worst_e1 = max(worst_e1, abs(per_atom - (n_a / 2 + 1.5) / (n_a + 1)))
    elapsed = time.perf_counter() - t0
    check("C1", "ground energy (N_A+1)/2", worst_e0 < 1e-10, f"max error {worst_e0:.1e}")
    check("C1", "first excited per atom", worst_e1 < 1e-10, f"max error {worst_e1:.1e}")
    check("C1", "runtime < 1 s", elapsed < 1.0, f"{elapsed:.2f} s")


# ---------------------------------------------------------------------------
# C2


def test_c2_two_body_oracle():
    t0 = time.perf_counter()
    errs = []
    for g in (1.0, 5.0, 20.0):
        rep = converge(1, g, 1.0, [56, 64, 72, 80], "even")
        e_rel = rep.extrapolated - 0.5
        ref = oracles.two_body_relative_energy(g)
        errs.append(abs(e_rel - ref))
    elapsed = time.perf_counter() - t0
    detail = ", ".join(f"g={g:g}: {e:.1e}" for g, e in zip((1, 5, 20), errs))
    check("C2", "extrapolated E_rel within 1e-3", max(errs) < 1e-3, detail)
    check("C2", "runtime < 30 s", elapsed < 30.0, f"{elapsed:.1f} s")


# ---------------------------------------------------------------------------
# C3


def test_c3_quasi_degeneracy():
    t0 = time.perf_counter()
    gaps = {}
    probs = {b: EDProblem.with_excess(2, 40, 1.0, b) for b in ("even", "odd")}
    for g in (1.0, 5.0, 20.0):
        e = {b: p.solve(g).ground_energy for b, p in probs.items()}
        gaps[g] = abs(e["odd"] - e["even"])
    elapsed = time.perf_counter() - t0
    detail = ", ".join(f"gap(g={g:g})={v:.4f}" for g, v in gaps.items())
    check("C3", "gap(20) <= gap(5)/3", gaps[20.0] * 3 <= gaps[5.0], detail)
    check("C3", "gaps at g=5, 20 below g=1", max(gaps[5.0], gaps[20.0]) < gaps[1.0], detail)
    check("C3", "runtime < 5 min", elapsed < 300.0, f"{elapsed:.1f} s")


# ---------------------------------------------------------------------------
# C4


@pytest.mark.parametrize("n_a", [2, 3, 4])
def test_c4_entropy_growth(n_a):
    t0 = time.perf_counter()
    s = [entropy_series(n_a)[g]["S_bits"] for g in G_ENTROPY]
    elapsed = time.perf_counter() - t0
    text = " ".join(f"{v:.4f}" for v in s)
    check("C4", f"N_A={n_a} S(0) = 0", s[0] == 0.0, f"S(0)={s[0]!r}")
    check("C4", f"N_A={n_a} non-decreasing", all(b >= a for a, b in zip(s, s[1:])), text)
    rise_lo = s[G_ENTROPY.index(5.0)] - s[0]
    rise_hi = s[-1] - s[G_ENTROPY.index(5.0)]
    check("C4", f"N_A={n_a} steep below g=5", rise_lo > rise_hi,
          f"rise[0,5]={rise_lo:.4f} rise[5,20]={rise_hi:.4f}")
    check("C4", f"N_A={n_a} runtime < 30 min", elapsed < 1800.0, f"{elapsed:.1f} s")


# ---------------------------------------------------------------------------
# C5


def test_c5_strong_coupling_oracle():
    t0 = time.perf_counter()
    gold_b = ansatz_obdm(AnsatzState(2), "B")
    s10, s20 = strong_solution(2, 10.0).summary(), strong_solution(2, 20.0).summary()
    elapsed = time.perf_counter() - t0
    for key, gold in (("lambda0_B", gold_b.lambda0), ("S_bits", gold_b.entropy)):
        a, b, c = s10[key], s20[key], gold
        between = (a - b) * (b - c) > 0 and min(abs(a - b), abs(b - c)) > 1e-3
        check("C5", f"{key}(g=20) strictly between g=10 and 1/g=0", between,
              f"g=10 {a:.5f}, g=20 {b:.5f}, ansatz {c:.5f}")
    check("C5", "runtime < 10 min", elapsed < 600.0, f"{elapsed:.1f} s")


# ---------------------------------------------------------------------------
# C6


def test_c6_bimodal_impurity():
    peaks = {}
    for n_a in (2, 4):
        r = strong_solution(n_a, 20.0).rendering("B")
        idx = local_maxima(r.profile)
        asym = float(np.abs(r.profile - r.profile[::-1]).max())
        check("C6", f"N_A={n_a} exactly two maxima", len(idx) == 2, f"maxima at {r.grid[idx]}")
        sym = asym < 1e-6 and abs(r.grid[idx[0]] + r.grid[idx[-1]]) < 1e-12
        check("C6", f"N_A={n_a} symmetric within 1e-6", sym, f"max |p(x)-p(-x)| = {asym:.1e}")
        peaks[n_a] = abs(r.grid[idx[-1]])
    check("C6", "N_A=4 peaks farther out than N_A=2", peaks[4] > peaks[2],
          f"|x_peak| N_A=2: {peaks[2]:.2f}, N_A=4: {peaks[4]:.2f}")


# ---------------------------------------------------------------------------
# C7


def _sweep_arrays(n_a):
    rows, elapsed = mass_sweep(n_a)
    m = np.array([r["m"] for r in rows])
    lam_b = np.array([r["lambda0_B"] for r in rows])
    s = np.array([r["S_bits"] for r in rows])
    lam_a = np.array([r["lambda0_A"] for r in rows])
    return rows, m, lam_b, s, lam_a, elapsed


@pytest.mark.parametrize("n_a", [2, 3, 4])
def test_c7_threshold_location(n_a):
    rows, m, lam_b, s, _, elapsed = _sweep_arrays(n_a)
    i = int(np.argmin(lam_b))
    check("C7", f"N_A={n_a} lambda0_B interior minimum", 0 < i < m.size - 1, f"argmin at m={m[i]:g}")
    m_th = threshold_mass_scan(list(zip(m, lam_b)))
    target = M_TH_TARGET[n_a]
    note = ""
    if n_a == 4:
        note = " (abstract places the N_A=4 maximum between 3 and 4; caption uses 4.5)"
    check("C7", f"N_A={n_a} threshold within 1 of {target}", abs(m_th - target) <= 1.0,
          f"m_th={m_th:.3f}{note}")
    check("C7", f"N_A={n_a} sweep runtime", elapsed < 2400.0, f"{elapsed:.1f} s (budget 2 h total)")


@pytest.mark.parametrize("n_a", [2, 3, 4])
def test_c7_entropy_peak_coincides(n_a):
    _, m, lam_b, s, _, _ = _sweep_arrays(n_a)
    i, j = int(np.argmin(lam_b)), int(np.argmax(s))
    check("C7", f"N_A={n_a} argmax S == argmin lambda0_B", i == j and 0 < j < m.size - 1,
          f"argmin lambda0_B at m={m[i]:g}, argmax S at m={m[j]:g}")


@pytest.mark.parametrize("n_a", [2, 3, 4])
def test_c7_boson_condensation_beyond_threshold(n_a):
    _, m, lam_b, _, lam_a, _ = _sweep_arrays(n_a)
    i = int(np.argmin(lam_b))
    tail = lam_a[i:]
    check("C7", f"N_A={n_a} lambda0_A rises to > 0.95", tail[-1] > 0.95,
          f"lambda0_A at m={m[i]:g}: {tail[0]:.4f}, at m={m[-1]:g}: {tail[-1]:.4f}, "
          f"min beyond threshold {tail.min():.4f}")


@pytest.mark.parametrize("n_a", [2, 3, 4])
def test_c7_impurity_unimodal_at_origin(n_a):
    prof = endpoint_solution(n_a).rendering("B").profile
    x = np.linspace(-5.0, 5.0, prof.size)
    idx = local_maxima(prof)
    ok = len(idx) == 1 and abs(x[idx[0]]) < 1e-12
    check("C7", f"N_A={n_a} impurity unimodal at origin (m={M_SWEEP[-1]:g})", ok,
          f"maxima at {np.round(x[idx], 3).tolist()}")


@pytest.mark.parametrize("n_a", [2, 3, 4])
def test_c7_boson_central_dip(n_a):
    prof = endpoint_solution(n_a).rendering("A").profile
    c = prof.size // 2
    ok = prof[c] < prof[c - 1] and prof[c] < prof[c + 1]
    check("C7", f"N_A={n_a} boson central dip (m={M_SWEEP[-1]:g})", ok,
          f"centre {prof[c]:.4f}, max {prof.max():.4f}")


# ---------------------------------------------------------------------------
# C8


@pytest.mark.parametrize("g", [5.0, 10.0])
def test_c8_polaron_against_ed(g):
    rep = ed_ladder_n4(g)
    y, tables, _ = polaron_tables(g)
    pol = solve_effective(4, g, 1.0, y_grid=y, tables=tables).energy
    e_ed = rep.extrapolated
    rel = (pol - e_ed) / e_ed
    check("C8", f"g={g:g} polaron >= ED", pol >= e_ed and pol >= rep.final_energy,
          f"polaron {pol:.5f}, ED extrapolated {e_ed:.5f} (finest rung {rep.final_energy:.5f})")
    check("C8", f"g={g:g} within 5%", 0 <= rel < 0.05, f"relative excess {100 * rel:.2f}%")


def test_c8_nine_bosons():
    t0 = time.perf_counter()
    y, tables, _ = polaron_tables(10.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        e9 = solve_effective(9, 10.0, 1.0, y_grid=y, tables=tables).energy
    # the tables only depend on g, so the first solve carries the cost
    elapsed = time.perf_counter() - t0 + polaron_tables(10.0)[2]
    check("C8", "N_A=9 runtime < 5 min", elapsed < 300.0, f"{elapsed:.1f} s")
    per_atom = {n: solve_effective(n, 10.0, 1.0, y_grid=y, tables=tables).energy / (n + 1)
                for n in range(4, 10)}
    ed4 = ed_ladder_n4(10.0).extrapolated / 5
    trend = all(per_atom[n + 1] < per_atom[n] for n in range(4, 9)) and per_atom[9] < ed4
    check("C8", "energy per atom keeps decreasing up to N_A=9", trend,
          f"E/(N+1): ED N_A=4 {ed4:.4f}; polaron "
          + ", ".join(f"{n}:{v:.4f}" for n, v in per_atom.items())
          + f"; E(N_A=9)={e9:.5f}")


# ---------------------------------------------------------------------------
# C9


def _property_suites():
    import test_properties

    return sorted((n, f) for n, f in vars(test_properties).items() if n.startswith("test_prop_"))


@pytest.mark.parametrize("name", [n for n, _ in _property_suites()])
def test_c9_property_suite(name):
    fn = dict(_property_suites())[name]
    t0 = time.perf_counter()
    try:
        fn()
        ok, detail = True, "100 cases"
    except Exception as exc:  # noqa: BLE001 -- any failure is a failed suite
        ok, detail = False, f"{type(exc).__name__}: {str(exc).splitlines()[0][:120]}"
    check("C9", name.replace("test_prop_", ""), ok, f"{detail} in {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)
