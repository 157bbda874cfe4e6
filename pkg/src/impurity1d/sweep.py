"""Batch driver: configuration, sweep dispatch, CSV and manifest output.

A run is described by a :class:`RunConfig`, usually read from a
``key = value`` text file. Points are grouped by ``(N_A, m_BA)`` so that one
assembled Hamiltonian serves every coupling of the group; groups run on a
bounded process pool and are merged back in configuration order, so the
emitted files do not depend on ``--jobs``.
"""

from __future__ import annotations

import ast
import configparser
import csv
import hashlib
import io
import json
import math
import os
import platform
import re
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .ed import EDProblem, converge as converge_ladder
from .errors import ConfigurationError, Impurity1DError, NotFoundError
from .observables import local_maxima, threshold_mass_scan
from .polaron import solve_effective, tabulate, validity_check
from .strong_ansatz import AnsatzState, ansatz_obdm

__version__ = "0.1.0"

OUT_ENV = "IMPURITY1D_OUT"
DEFAULT_OUT = "impurity1d_out"

SPECTRUM_HEADER = ["N_A", "g", "m_BA", "parity", "level", "E", "E_per_atom"]
ENTROPY_HEADER = ["N_A", "g", "m_BA", "S_bits", "lambda0_B", "lambda1_B", "lambda0_A", "lambda1_A"]
PROFILE_HEADER = ["species", "x", "density"]
OBDM_HEADER = ["species", "x", "xprime", "value"]
THRESHOLD_HEADER = ["N_A", "g", "m_BA_th", "S_max"]
POLARON_HEADER = ["N_A", "g", "m_BA", "E", "E_per_atom", "valid", "barrier", "central_weight"]
POLARON_TABLE_HEADER = ["y", "eps", "q11", "W", "phi"]
LADDER_HEADER = ["N_A", "g", "m_BA", "parity", "E_excess", "E", "shift"]
LADDER_SUMMARY_HEADER = ["N_A", "g", "m_BA", "parity", "E_last", "E_extrapolated", "last_shift", "status"]
GOLDEN_HEADER = ["N_A", "species", "lambda0", "lambda1", "S_bits"]

OBSERVABLES = frozenset({"spectrum", "obdm", "entropy", "profiles", "threshold"})
SOLVERS = ("ed", "polaron", "both")

# energy budget above the non-interacting ground state, by boson number;
# chosen so one N_A=4 group stays well under a minute per coupling
AUTO_EXCESS = {1: 64, 2: 40, 3: 32, 4: 28, 5: 22, 6: 18}


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if x == 0.0:
        return "0"
    return f"{x:.12g}"


def _tag(x):
    return _fmt(x).replace("-", "m").replace(".", "p")


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    """One batch job.

    Lists (``n_a``, ``g``, ``m_ba``) span a Cartesian product of points.
    ``e_excess`` is the cutoff ladder in quanta above the non-interacting
    ground state; a single rung means no convergence study, ``None`` picks
    a size from :data:`AUTO_EXCESS`.
    """

    n_a: list = field(default_factory=lambda: [2])
    solver: str = "ed"
    g: list = field(default_factory=lambda: [float(v) for v in np.linspace(0.0, 20.0, 21)])
    m_ba: list = field(default_factory=lambda: [1.0])
    e_excess: list | None = None
    n_max_a: int | None = None
    n_max_b: int | None = None
    richardson: bool = True
    observables: list = field(default_factory=lambda: ["spectrum", "entropy"])
    blocks: list = field(default_factory=lambda: ["even", "odd"])
    levels: int = 4
    profile_L: float = 5.0
    profile_points: int = 201
    obdm_points: int = 61
    tol: float = 1e-9
    out: str | None = None
    seed: int = 0
    jobs: int = 1
    cache: str | None = None

    def __post_init__(self):
        self.n_a = [int(v) for v in _as_list(self.n_a)]
        self.g = [float(v) for v in _as_list(self.g)]
        self.m_ba = [float(v) for v in _as_list(self.m_ba)]
        self.observables = sorted(set(_as_list(self.observables)))
        self.blocks = [str(b) for b in _as_list(self.blocks)]
        if self.e_excess is not None:
            self.e_excess = [int(v) for v in _as_list(self.e_excess)]
        self.validate()

    def validate(self):
        if not self.n_a or any(n < 1 for n in self.n_a):
            raise ConfigurationError("N_A must be >= 1")
        if not self.g or any(not (v >= 0) or math.isinf(v) for v in self.g):
            raise ConfigurationError("all g must be finite and >= 0")
        if not self.m_ba or any(not (v > 0) or math.isinf(v) for v in self.m_ba):
            raise ConfigurationError("all m_BA must be finite and > 0")
        if self.solver not in SOLVERS:
            raise ConfigurationError(f"solver must be one of {SOLVERS}")
        bad = set(self.observables) - OBSERVABLES
        if bad:
            raise ConfigurationError(f"unknown observables {sorted(bad)}")
        if any(b not in ("even", "odd") for b in self.blocks) or not self.blocks:
            raise ConfigurationError("blocks must be a subset of even, odd")
        if self.e_excess is not None:
            if not self.e_excess or any(k < 0 for k in self.e_excess):
                raise ConfigurationError("E_excess rungs must be >= 0")
            if any(b <= a for a, b in zip(self.e_excess, self.e_excess[1:])):
                raise ConfigurationError("E_excess rungs must be strictly ascending")
        if self.levels < 1 or self.jobs < 1:
            raise ConfigurationError("levels and jobs must be >= 1")

    def ladder(self, n_a):
        if self.e_excess is not None:
            return list(self.e_excess)
        return [AUTO_EXCESS.get(n_a, 16)]

    def as_dict(self):
        return asdict(self)


def _as_list(v):
    if isinstance(v, (list, tuple)):
        return list(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    return [v]


# config-file keys are case-insensitive; a few spellings map to one field
_KEY_ALIASES = {
    "n_a": "n_a", "na": "n_a", "solver": "solver", "g": "g", "m_ba": "m_ba", "mba": "m_ba",
    "e_excess": "e_excess", "n_max_a": "n_max_a", "n_max_b": "n_max_b",
    "richardson": "richardson", "observables": "observables", "blocks": "blocks",
    "levels": "levels", "k": "levels", "profile_l": "profile_L", "profile_points": "profile_points",
    "obdm_points": "obdm_points", "tol": "tol", "out": "out", "seed": "seed", "jobs": "jobs",
    "cache": "cache",
}

_RANGE_RE = re.compile(r"^\s*(linspace|arange|range)\s*\((.*)\)\s*$")


def parse_value(text):
    """Parse one config value.

    Accepts Python literals, bare words (kept as strings), comma lists
    and ``linspace(a, b, n)`` / ``arange(a, b, step)`` / ``range(a, b)``.
    """
    text = text.strip()
    m = _RANGE_RE.match(text)
    if m:
        try:
            args = ast.literal_eval(f"({m.group(2)},)")
        except (ValueError, SyntaxError) as exc:
            raise ConfigurationError(f"bad range expression {text!r}") from exc
        if m.group(1) == "linspace":
            if len(args) != 3:
                raise ConfigurationError("linspace needs (start, stop, num)")
            return [float(v) for v in np.linspace(args[0], args[1], int(args[2]))]
        if m.group(1) == "arange":
            # stop is inclusive up to rounding, as grids are written by hand
            start, stop, step = (list(args) + [1])[:3]
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [float(start + i * step) for i in range(n)]
        return list(range(*[int(a) for a in args]))
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        pass
    if text.startswith("[") and text.endswith("]"):
        # bare words inside brackets, e.g. [spectrum, entropy]
        return [parse_value(p) for p in text[1:-1].split(",") if p.strip()]
    if "," in text:
        return [parse_value(p) for p in text.split(",") if p.strip()]
    low = text.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    if low in ("none", "auto"):
        return None
    return text


def read_config_text(text):
    """``key = value`` lines to a dict of :class:`RunConfig` keyword arguments."""
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"),
                                       inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigurationError(f"cannot parse config: {exc}") from exc
    out = {}
    for key, raw in parser["run"].items():
        name = _KEY_ALIASES.get(key.strip().lower())
        if name is None:
            raise ConfigurationError(f"unknown config key {key!r}")
        out[name] = parse_value(raw)
    return out


def load_config(path=None, overrides=None):
    """Build a :class:`RunConfig` from a file plus overrides (overrides win)."""
    kwargs = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                kwargs.update(read_config_text(fh.read()))
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    for k, v in (overrides or {}).items():
        if v is not None:
            kwargs[_KEY_ALIASES.get(k.lower(), k)] = v
    try:
        return RunConfig(**kwargs)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc


def resolve_out(config):
    return config.out or os.environ.get(OUT_ENV) or DEFAULT_OUT


# ---------------------------------------------------------------------------
# workers (module level so they pickle)


def _point_key(solver, n_a, g, m_ba):
    return f"{solver}:N_A={n_a}:g={_fmt(g)}:m_BA={_fmt(m_ba)}"


def _grid_rows(rendering):
    return [(rendering.species, x, d) for x, d in zip(rendering.grid, rendering.profile)]


def _obdm_rows(sol, species, n_points, L):
    r = sol.rendering(species, L=L, n_points=n_points)
    return [(species, x, xp, v) for x, xp, v in r.rows()]


def _ed_group(config, n_a, m_ba):
    """All couplings of one ``(N_A, m_BA)`` group; returns per-point records."""
    ladder = config.ladder(n_a)
    blocks = config.blocks
    obs = set(config.observables)
    if config.n_max_a is not None:
        # explicit mode limits replace the energy budget; no ladder
        ladder = [0]
        problems = {b: [EDProblem(n_a, m_ba, None, config.n_max_a, config.n_max_b, b, config.cache)]
                    for b in blocks}
    else:
        problems = {b: [EDProblem.with_excess(n_a, k, m_ba, b, config.cache) for k in ladder]
                    for b in blocks}
    records = []
    for g in config.g:
        t0 = time.perf_counter()
        rec = {"key": _point_key("ed", n_a, g, m_ba), "N_A": n_a, "g": g, "m_BA": m_ba,
               "solver": "ed", "status": "ok", "message": "", "spectrum": [], "ladder": {}}
        try:
            best = None
            for b in blocks:
                if len(ladder) > 1:
                    rep = converge_ladder(n_a, g, m_ba, ladder, b, config.richardson, tol=config.tol,
                                          seed=config.seed, problems=problems[b])
                    rec["ladder"][b] = rep.as_dict()
                    if rep.status != "ok":
                        rec["status"] = "warn"
                        rec["message"] = f"non-monotone energy across cutoff ladder ({b})"
                sol = problems[b][-1].solve(g, k=config.levels, tol=config.tol, seed=config.seed)
                for lvl, e in enumerate(sol.energies):
                    rec["spectrum"].append((b, lvl, float(e)))
                if best is None or sol.ground_energy < best.ground_energy:
                    best = sol
            rec["ground_block"] = best.problem.block
            rec["dim"] = int(best.problem.space.dim)
            if obs & {"entropy", "threshold"}:
                rec["summary"] = best.summary()
            if "profiles" in obs:
                rec["profiles"] = (_grid_rows(best.rendering("A", L=config.profile_L,
                                                             n_points=config.profile_points))
                                   + _grid_rows(best.rendering("B", L=config.profile_L,
                                                               n_points=config.profile_points)))
            if "obdm" in obs:
                rec["obdm"] = (_obdm_rows(best, "A", config.obdm_points, config.profile_L)
                               + _obdm_rows(best, "B", config.obdm_points, config.profile_L))
        except (Impurity1DError, MemoryError, ArithmeticError) as exc:
            rec["status"] = "error"
            rec["message"] = f"{type(exc).__name__}: {exc}"
        rec["wall_time"] = time.perf_counter() - t0
        records.append(rec)
    return records


def _polaron_group(config, n_a, g):
    """All mass ratios at one ``(N_A, g)``; the adiabatic tables are shared."""
    records = []
    t0 = time.perf_counter()
    try:
        y = np.linspace(-6.0, 6.0, 481)
        tables = tabulate(g, y)
        err = None
    except Impurity1DError as exc:
        tables, err = None, exc
    shared = time.perf_counter() - t0
    for m_ba in config.m_ba:
        t1 = time.perf_counter()
        rec = {"key": _point_key("polaron", n_a, g, m_ba), "N_A": n_a, "g": g, "m_BA": m_ba,
               "solver": "polaron", "status": "ok", "message": ""}
        try:
            if err is not None:
                raise err
            pot = solve_effective(n_a, g, m_ba, y_grid=y, tables=tables)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                rep = validity_check(n_a, g, m_ba, potential=pot)
            rec.update(E=pot.energy, valid=rep.valid, barrier=rep.barrier + 0.0,
                       central_weight=rep.central_weight, table=pot.rows(),
                       coarse_energy=pot.coarse_energy)
            if not rep.valid:
                rec["status"] = "warn"
                rec["message"] = rep.message
        except Impurity1DError as exc:
            rec["status"] = "error"
            rec["message"] = f"{type(exc).__name__}: {exc}"
        rec["wall_time"] = time.perf_counter() - t1 + shared / len(config.m_ba)
        records.append(rec)
    return records


def _call(job):
    fn, args = job
    return fn(*args)


def _dispatch(jobs, n_workers):
    if n_workers <= 1 or len(jobs) <= 1:
        return [_call(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(n_workers, len(jobs))) as pool:
        # map preserves submission order whatever the completion order
        return list(pool.map(_call, jobs))


# ---------------------------------------------------------------------------
# output


def write_csv(path, header, rows):
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())
    return path


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    points: list
    files: dict
    version: str = __version__
    started: str = ""
    wall_time: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def n_errors(self):
        return sum(p["status"] == "error" for p in self.points)

    @property
    def exit_code(self):
        return 1 if self.n_errors else 0

    def as_dict(self):
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["environment"] = {"python": platform.python_version(), "numpy": np.__version__}
        return d

    def write(self, out_dir):
        path = os.path.join(out_dir, "manifest.json")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.as_dict(), fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")
        return path


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def _point_entry(rec):
    keep = ("key", "solver", "N_A", "g", "m_BA", "status", "message", "wall_time", "ladder",
            "dim", "ground_block", "E", "coarse_energy", "valid")
    return {k: rec[k] for k in keep if k in rec}


def _finish(command, config, out_dir, records, files, started, t0, notes=()):
    hashes = {os.path.basename(p): sha256_file(p) for p in sorted(files)}
    manifest = RunManifest(command, config.as_dict(), [_point_entry(r) for r in records], hashes,
                           started=started, wall_time=time.perf_counter() - t0, notes=list(notes))
    manifest.write(out_dir)
    return manifest


def _ed_outputs(config, out_dir, records):
    files = []
    obs = set(config.observables)
    ok = [r for r in records if r["status"] != "error"]
    if "spectrum" in obs:
        rows = [(r["N_A"], r["g"], r["m_BA"], b, lvl, e, e / (r["N_A"] + 1))
                for r in ok for b, lvl, e in r["spectrum"]]
        files.append(write_csv(os.path.join(out_dir, "spectrum.csv"), SPECTRUM_HEADER, rows))
    if "entropy" in obs:
        rows = [(r["N_A"], r["g"], r["m_BA"], s["S_bits"], s["lambda0_B"], s["lambda1_B"],
                 s["lambda0_A"], s["lambda1_A"]) for r in ok for s in [r["summary"]]]
        files.append(write_csv(os.path.join(out_dir, "entropy.csv"), ENTROPY_HEADER, rows))
    for r in ok:
        stem = f"NA{r['N_A']}_g{_tag(r['g'])}_m{_tag(r['m_BA'])}"
        if "profiles" in obs:
            files.append(write_csv(os.path.join(out_dir, f"profile_{stem}.csv"), PROFILE_HEADER,
                                   r["profiles"]))
        if "obdm" in obs:
            files.append(write_csv(os.path.join(out_dir, f"obdm_{stem}.csv"), OBDM_HEADER, r["obdm"]))
    notes = []
    if "threshold" in obs:
        rows = []
        for n_a in config.n_a:
            for g in config.g:
                pts = sorted((r["m_BA"], r["summary"]["lambda0_B"], r["summary"]["S_bits"])
                             for r in ok if r["N_A"] == n_a and r["g"] == g)
                if len(pts) < 3:
                    continue
                try:
                    m_th = threshold_mass_scan([(m, lam) for m, lam, _ in pts])
                except NotFoundError as exc:
                    m_th = float("nan")
                    notes.append(f"N_A={n_a} g={_fmt(g)}: {exc}")
                rows.append((n_a, g, m_th, max(s for _, _, s in pts)))
        files.append(write_csv(os.path.join(out_dir, "threshold.csv"), THRESHOLD_HEADER, rows))
    return files, notes


def _polaron_outputs(out_dir, records):
    files = []
    ok = [r for r in records if r["status"] != "error"]
    rows = [(r["N_A"], r["g"], r["m_BA"], r["E"], r["E"] / (r["N_A"] + 1), r["valid"],
             r["barrier"], r["central_weight"]) for r in ok]
    files.append(write_csv(os.path.join(out_dir, "polaron.csv"), POLARON_HEADER, rows))
    for r in ok:
        stem = f"NA{r['N_A']}_g{_tag(r['g'])}_m{_tag(r['m_BA'])}"
        files.append(write_csv(os.path.join(out_dir, f"polaron_{stem}.csv"), POLARON_TABLE_HEADER,
                               r["table"]))
    return files


def _prepare(config, out_dir):
    out_dir = out_dir or resolve_out(config)
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"cannot create output directory {out_dir}: {exc}") from exc
    if not os.access(out_dir, os.W_OK):
        raise ConfigurationError(f"output directory {out_dir} is not writable")
    return out_dir


def run(config, out_dir=None):
    """Execute a sweep; returns the :class:`RunManifest` (also written to disk)."""
    out_dir = _prepare(config, out_dir)
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    t0 = time.perf_counter()
    records, files, notes = [], [], []
    if config.solver in ("ed", "both"):
        jobs = [(_ed_group, (config, n, m)) for n in config.n_a for m in config.m_ba]
        ed = [r for grp in _dispatch(jobs, config.jobs) for r in grp]
        f, notes = _ed_outputs(config, out_dir, ed)
        files += f
        records += ed
    if config.solver in ("polaron", "both"):
        jobs = [(_polaron_group, (config, n, g)) for n in config.n_a for g in config.g]
        pol = [r for grp in _dispatch(jobs, config.jobs) for r in grp]
        files += _polaron_outputs(out_dir, pol)
        records += pol
    return _finish("run", config, out_dir, records, files, started, t0, notes)


def converge(config, out_dir=None):
    """Cutoff-ladder study of every ED point; writes ``ladder.csv`` and a summary."""
    ladders = {n: config.ladder(n) for n in config.n_a}
    if any(len(l) < 2 for l in ladders.values()):
        raise ConfigurationError("converge needs at least two E_excess rungs")
    out_dir = _prepare(config, out_dir)
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    t0 = time.perf_counter()
    jobs = [(_ladder_group, (config, n, m)) for n in config.n_a for m in config.m_ba]
    records = [r for grp in _dispatch(jobs, config.jobs) for r in grp]
    rows, summary = [], []
    for r in records:
        for b, rep in r.get("ladder", {}).items():
            shifts = [float("nan")] + rep["shifts"]
            for k, e, s in zip(rep["E_excess"], rep["energies"], shifts):
                rows.append((r["N_A"], r["g"], r["m_BA"], b, k, e, s))
            extra = rep["extrapolated"] if rep["extrapolated"] is not None else float("nan")
            summary.append((r["N_A"], r["g"], r["m_BA"], b, rep["energies"][-1], extra,
                            rep["shifts"][-1], rep["status"]))
    files = [write_csv(os.path.join(out_dir, "ladder.csv"), LADDER_HEADER, rows),
             write_csv(os.path.join(out_dir, "ladder_summary.csv"), LADDER_SUMMARY_HEADER, summary)]
    return _finish("converge", config, out_dir, records, files, started, t0)


def _ladder_group(config, n_a, m_ba):
    ladder = config.ladder(n_a)
    problems = {b: [EDProblem.with_excess(n_a, k, m_ba, b, config.cache) for k in ladder]
                for b in config.blocks}
    records = []
    for g in config.g:
        t0 = time.perf_counter()
        rec = {"key": _point_key("ed", n_a, g, m_ba), "N_A": n_a, "g": g, "m_BA": m_ba,
               "solver": "ed", "status": "ok", "message": "", "ladder": {}}
        try:
            for b in config.blocks:
                rep = converge_ladder(n_a, g, m_ba, ladder, b, config.richardson, tol=config.tol,
                                      seed=config.seed, problems=problems[b])
                rec["ladder"][b] = rep.as_dict()
                if rep.status != "ok":
                    rec["status"] = "warn"
                    rec["message"] = f"non-monotone energy across cutoff ladder ({b})"
        except (Impurity1DError, MemoryError) as exc:
            rec["status"] = "error"
            rec["message"] = f"{type(exc).__name__}: {exc}"
        rec["wall_time"] = time.perf_counter() - t0
        records.append(rec)
    return records


def golden(config, out_dir=None):
    """Infinite-coupling reference occupations, entropies and density renderings."""
    out_dir = _prepare(config, out_dir)
    started = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    t0 = time.perf_counter()
    grid = np.linspace(-config.profile_L, config.profile_L, config.profile_points)
    ogrid = np.linspace(-config.profile_L, config.profile_L, config.obdm_points)
    rows, records, files = [], [], []
    for n_a in config.n_a:
        t1 = time.perf_counter()
        rec = {"key": f"golden:N_A={n_a}", "solver": "golden", "N_A": n_a, "status": "ok",
               "message": ""}
        try:
            state = AnsatzState(n_a)
            prof = []
            for species in ("A", "B"):
                res = ansatz_obdm(state, species, grid=grid)
                rows.append((n_a, species, res.lambda0, res.lambda1, res.entropy))
                prof += _grid_rows(res.rendering)
            files.append(write_csv(os.path.join(out_dir, f"golden_profile_NA{n_a}.csv"),
                                   PROFILE_HEADER, prof))
            if "obdm" in config.observables:
                orows = []
                for species in ("A", "B"):
                    r = ansatz_obdm(state, species, grid=ogrid).rendering
                    orows += [(species, x, xp, v) for x, xp, v in r.rows()]
                files.append(write_csv(os.path.join(out_dir, f"golden_obdm_NA{n_a}.csv"),
                                       OBDM_HEADER, orows))
        except Impurity1DError as exc:
            rec["status"] = "error"
            rec["message"] = f"{type(exc).__name__}: {exc}"
        rec["wall_time"] = time.perf_counter() - t1
        records.append(rec)
    files.insert(0, write_csv(os.path.join(out_dir, "golden.csv"), GOLDEN_HEADER, rows))
    return _finish("golden", config, out_dir, records, files, started, t0)


def peak_positions(rows, species):
    """Local-maximum positions of a profile given as ``(species, x, density)`` rows."""
    sel = [(x, d) for s, x, d in rows if s == species]
    x = np.array([p[0] for p in sel])
    d = np.array([p[1] for p in sel])
    return x[local_maxima(d)]
