"""Declarative experiment runs with deterministic CSV output and golden-file checks."""

from __future__ import annotations

import copy
import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from ._validation import ConfigError
from .autonomy import factorization_optimize, random_snip_instance, sliding_simulation
from .classical import (
    ClassicalState,
    classical_phi,
    hamming84,
    ising_phi_sweep,
    parity_code,
    random_code,
    read_code,
)
from .emergent import dispersion_grid, lattice_normal_modes
from .hilbert import haar_unitaries, matrix_from_json, random_hermitian
from .quantum import max_phi_search
from .separability import h3_norm_grids, integration_energy, optimal_basis, stationarity_residual

__all__ = [
    "EXPERIMENTS",
    "ExperimentConfig",
    "Result",
    "run",
    "write_result",
    "render_csv",
    "read_golden",
    "verify",
    "write_goldens",
    "GOLDEN_CONFIGS",
    "THREADS_ENV",
]

THREADS_ENV = "PERCEPTRONIUM_THREADS"
_FMT = ".12g"


def _schema(name):
    text = resources.files("perceptronium").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def _defaults(schema):
    props = schema["properties"]["params"]["properties"]
    return {k: copy.deepcopy(v["default"]) for k, v in props.items() if "default" in v}


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int | None = None
    params: dict = field(default_factory=dict)
    output_path: str | None = None

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict) or "experiment" not in d:
            raise ConfigError("config must be an object with an 'experiment' field")
        name = d["experiment"]
        if name not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
        try:
            jsonschema.validate(d, _schema(name))
        except jsonschema.ValidationError as exc:
            loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"{name}: {loc}: {exc.message}") from exc
        params = _defaults(_schema(name))
        params.update(d.get("params", {}))
        return cls(name, d.get("seed"), params, d.get("output_path"))

    def to_dict(self, with_output=False):
        d = {"experiment": self.experiment, "seed": self.seed, "params": self.params}
        if with_output and self.output_path is not None:
            d["output_path"] = self.output_path
        return d

    def canonical(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def config_hash(self):
        return hashlib.sha256(self.canonical().encode()).hexdigest()


@dataclass
class Result:
    columns: list
    rows: list
    tolerances: dict
    notes: dict = field(default_factory=dict)


def _threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be an integer") from exc


def _pmap(fn, items):
    items = list(items)
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _f(x):
    if isinstance(x, (float, np.floating)):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(float(x), _FMT)
    return str(x)


def _join(vals):
    return ";".join(_f(float(v)) for v in vals)


def _ising(cfg):
    p = cfg.params
    temps = p.get("temps") or list(np.geomspace(p["t_min"], p["t_max"], p["points"]))
    rows = _pmap(lambda t: ising_phi_sweep(p["side"], [t], p["coupling"])[0], temps)
    n = p["side"] ** 2
    rows = sorted(rows, key=lambda r: r[0])
    out = [(t, phi, cut.mask_string(n)) for t, phi, cut in rows]
    return Result(["param", "phi_bits", "cut"], out, {"param": 1e-12, "phi_bits": 1e-9})


def _load_code(cfg):
    p = cfg.params
    kind = p["code"]
    if kind == "hamming84":
        return hamming84()
    if kind == "parity":
        return parity_code(p["n"])
    if kind == "random":
        return random_code(p["n"], p["m"], cfg.seed)
    if "code_file" not in p:
        raise ConfigError("code 'file' requires params.code_file")
    return read_code(p["code_file"])


def _code_phi(cfg):
    code = _load_code(cfg)
    state = ClassicalState.from_code(code)
    ks = cfg.params.get("k_values") or list(range(1, code.n // 2 + 1))
    res = _pmap(lambda k: (k, classical_phi(state, k)), ks)
    rows = [(k, r.phi, r.cut.mask_string(code.n)) for k, r in sorted(res, key=lambda x: x[0])]
    notes = {"words": code.size, "n": code.n, "hamming_distance": code.hamming_distance}
    return Result(["param", "phi_bits", "cut"], rows, {"phi_bits": 1e-9}, notes)


def _random_code_sweep(cfg):
    jobs = []
    for n in cfg.params["n_values"]:
        m = int(round(2 ** (n / 2)))
        code = random_code(n, m, cfg.seed)
        state = ClassicalState.from_code(code)
        jobs += [(n, k, state) for k in range(1, n // 2 + 1)]
    res = _pmap(lambda j: (j[0], j[1], classical_phi(j[2], j[1])), jobs)
    rows = [(f"{n}:{k}", r.phi, r.cut.mask_string(n)) for n, k, r in res]
    return Result(["param", "phi_bits", "cut"], rows, {"phi_bits": 1e-9}, {"param_format": "n:k"})


def _codeword_count_sweep(cfg):
    p = cfg.params
    n = p["n"]
    k = p.get("k", n // 2)
    if not 1 <= k <= n // 2:
        raise ConfigError(f"k must lie in [1, {n // 2}]")
    exps = p.get("m_exponents") or list(range(1, n + 1))
    if max(exps) > n:
        raise ConfigError("m_exponents may not exceed n")

    def one(e):
        st = ClassicalState.from_code(random_code(n, 2**e, cfg.seed))
        return 2**e, classical_phi(st, k)

    res = sorted(_pmap(one, exps), key=lambda x: x[0])
    rows = [(m, r.phi, r.cut.mask_string(n)) for m, r in res]
    return Result(["param", "phi_bits", "cut"], rows, {"phi_bits": 1e-9}, {"n": n, "k": k})


def _quantum_phi_max(cfg):
    p = cfg.params
    n, l = p["n"], p["l"]
    if n % l:
        raise ConfigError(f"l={l} does not divide n={n}")
    r = max_phi_search(n, (l, n // l), p["trials"], cfg.seed)
    rows = [(n, l, n // l, p["trials"], r.best_phi, r.best_random_phi, _join(r.best_spectrum))]
    cols = ["n", "l", "m", "trials", "best_phi", "best_random_phi", "spectrum"]
    return Result(cols, rows, {"best_phi": 1e-9, "best_random_phi": 1e-9, "spectrum": 1e-9})


def _integration_energy_demo(cfg):
    p = cfg.params
    shape = (p["l"], p["m"])
    n = shape[0] * shape[1]
    rng = np.random.default_rng(cfg.seed)
    if "hamiltonian_file" in p:
        hs = [matrix_from_json(json.loads(Path(p["hamiltonian_file"]).read_text()))]
        if hs[0].shape != (n, n):
            raise ConfigError("hamiltonian_file dimension does not match l*m")
    else:
        hs = [random_hermitian(n, rng) for _ in range(p["samples"])]
    rows = []
    for i, h in enumerate(hs):
        rep = integration_energy(h, shape)
        v, _ = optimal_basis(h, shape)
        resid = stationarity_residual(v.conj().T @ h @ v, shape)
        if p["unitaries"]:
            us = haar_unitaries(n, p["unitaries"], rng)
            rot = us @ h @ np.conj(np.swapaxes(us, 1, 2))
            g = rot.reshape(-1, shape[0], shape[1], shape[0], shape[1])
            rand_min = float(_h3_batch(g).min())
        else:
            rand_min = float("inf")
        rows.append((i, *rep.norms, rep.integration_energy, rand_min, resid, _join(rep.permutation)))
    cols = ["sample", "norm0", "norm1", "norm2", "norm3", "integration_energy",
            "random_basis_min_h3", "stationarity", "permutation"]
    tol = {c: 1e-9 for c in cols[1:7]}
    tol["stationarity"] = 1e-8
    return Result(cols, rows, tol)


def _h3_batch(t):
    """``||Pi3 A||`` for a stack of operators reshaped to ``(..., l, m, l, m)``."""
    l, m = t.shape[1], t.shape[2]
    tr2 = np.einsum("bikjk->bij", t) / m
    tr1 = np.einsum("bkikj->bij", t) / l
    tot = np.einsum("bikik->b", t) / (l * m)
    h3 = (
        t
        - tr2[:, :, None, :, None] * np.eye(m)[None, None, :, None, :]
        - tr1[:, None, :, None, :] * np.eye(l)[None, :, None, :, None]
        + tot[:, None, None, None, None] * np.einsum("ij,ab->iajb", np.eye(l), np.eye(m))[None]
    )
    return np.sqrt(np.sum(np.abs(h3) ** 2, axis=(1, 2, 3, 4)))


_SLIDE_COLS = ["b", "alpha", "potential", "slin_T", "delta_h", "tau_dyn", "tau_ind", "autonomy", "seed"]
_SLIDE_TOL = {"slin_T": 1e-9, "delta_h": 1e-9, "tau_dyn": 1e-9, "tau_ind": 1e-6, "autonomy": 1e-6}


def _slide_rows(cfg, alphas):
    p = cfg.params
    jobs = [(b, a) for a in alphas for b in p["b_values"]]

    def one(job):
        b, a = job
        return sliding_simulation(b, p["potential"], a, p["omega2"], p["coupling"], p["samples"], ddot0=False)

    reps = _pmap(one, jobs)
    seed = "" if cfg.seed is None else cfg.seed
    rows = [
        (r.b, r.alpha, r.potential, r.slin_T, r.delta_h, r.tau_dyn, r.tau_ind, r.autonomy, seed)
        for r in sorted(reps, key=lambda r: (r.alpha, r.b))
    ]
    return rows


def _sliding_autonomy(cfg):
    rows = _slide_rows(cfg, [cfg.params["alpha"]])
    bs = np.array([r[0] for r in rows], dtype=float)
    notes = {}
    if len(bs) >= 2:
        notes["slin_log2_slope"] = _f(np.polyfit(bs, np.log2([r[3] for r in rows]), 1)[0])
        notes["autonomy_log2_slope"] = _f(np.polyfit(bs, np.log2([r[7] for r in rows]), 1)[0])
    return Result(_SLIDE_COLS, rows, _SLIDE_TOL, notes)


def _apodization_compare(cfg):
    return Result(_SLIDE_COLS, _slide_rows(cfg, cfg.params["alpha_values"]), _SLIDE_TOL)


def _snip_optimize(cfg):
    p = cfg.params
    h, rho0 = random_snip_instance(cfg.seed)
    res = factorization_optimize(rho0, h, times=p["times"], budget=p["budget"], seed=cfg.seed, restarts=p["restarts"])
    rows = [
        ("objective", res.objective),
        ("entropy_identity_bits", res.entropy_before),
        ("entropy_optimized_bits", res.entropy_after),
        ("converged", int(res.converged)),
        ("best_restart", res.restart),
    ]
    return Result(["quantity", "value"], rows, {"value": 1e-6})


def _dispersion(cfg):
    p = cfg.params
    rows = dispersion_grid(p["side"], p["mu"], p["gamma"])
    modes = lattice_normal_modes(p["side"], p["mu"], p["gamma"])
    formula = np.sort(np.sqrt([r[3] for r in rows]))
    notes = {"max_mode_mismatch": _f(float(np.max(np.abs(modes - formula))))}
    return Result(["kx", "ky", "kz", "omega2"], rows, {"kx": 1e-12, "ky": 1e-12, "kz": 1e-12, "omega2": 1e-10}, notes)


EXPERIMENTS = {
    "ising_phi": _ising,
    "code_phi": _code_phi,
    "random_code_sweep": _random_code_sweep,
    "codeword_count_sweep": _codeword_count_sweep,
    "quantum_phi_max": _quantum_phi_max,
    "integration_energy_demo": _integration_energy_demo,
    "sliding_autonomy": _sliding_autonomy,
    "apodization_compare": _apodization_compare,
    "snip_optimize": _snip_optimize,
    "dispersion": _dispersion,
}

RANDOMIZED = {"random_code_sweep", "codeword_count_sweep", "quantum_phi_max", "integration_energy_demo", "snip_optimize"}


def run(config):
    """Execute a validated :class:`ExperimentConfig` and return its :class:`Result`."""
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    return EXPERIMENTS[config.experiment](config)


def render_csv(result, config):
    """CSV text: ``#`` metadata lines, a header row, then data rows."""
    buf = io.StringIO()
    buf.write(f"# tool: perceptronium {__version__}\n")
    buf.write(f"# experiment: {config.experiment}\n")
    buf.write(f"# seed: {'' if config.seed is None else config.seed}\n")
    buf.write(f"# config_hash: {config.config_hash()}\n")
    buf.write(f"# config: {config.canonical()}\n")
    buf.write(f"# tolerance: {json.dumps(result.tolerances, sort_keys=True)}\n")
    for k in sorted(result.notes):
        buf.write(f"# note.{k}: {result.notes[k]}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for row in result.rows:
        w.writerow([_f(x) for x in row])
    return buf.getvalue()


def write_result(result, config, path=None):
    """Write CSV to ``path`` (or ``config.output_path``); ``'-'`` or None means return text only."""
    text = render_csv(result, config)
    target = path if path is not None else config.output_path
    if target and target != "-":
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(text)
    return text


def read_golden(path):
    """Parse a CSV written by :func:`render_csv` into ``(meta, columns, rows)``."""
    meta, lines = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition(":")
            meta[key.strip()] = val.strip()
        elif line:
            lines.append(line)
    rows = list(csv.reader(lines))
    if not rows:
        raise ConfigError(f"{path}: no header row")
    return meta, rows[0], rows[1:]


def _compare(columns, want, got, tolerances):
    if len(want) != len(got):
        return f"row count {len(got)} != {len(want)}"
    worst = []
    for i, (a, b) in enumerate(zip(want, got)):
        for col, x, y in zip(columns, a, b):
            xs, ys = x.split(";"), y.split(";")
            try:
                fx, fy = [float(v) for v in xs], [float(v) for v in ys]
            except ValueError:
                if x != y:
                    return f"row {i} column {col}: {y!r} != {x!r}"
                continue
            if len(fx) != len(fy):
                return f"row {i} column {col}: length {len(fy)} != {len(fx)}"
            tol = tolerances.get(col, 0.0)
            for u, v in zip(fx, fy):
                if math.isinf(u) or math.isinf(v):
                    bad = u != v
                else:
                    bad = abs(u - v) > tol * max(1.0, abs(u))
                if bad:
                    worst.append(f"row {i} column {col}: {y} vs {x} (tol {tol:g})")
                    break
    return "; ".join(worst[:3]) if worst else None


@dataclass
class VerifyEntry:
    experiment: str
    file: str
    status: str
    detail: str = ""


def verify(golden_dir, tol_override=None, seed_override=None):
    """Re-run every golden config in ``golden_dir`` and diff the data rows.

    Experiments without a golden file are reported as ``SKIP``. A seed
    override applies only to configs that carry a seed.
    """
    golden_dir = Path(golden_dir)
    if not golden_dir.is_dir():
        raise ConfigError(f"{golden_dir} is not a directory")
    entries, seen = [], set()
    for path in sorted(golden_dir.glob("*.csv")):
        meta, columns, want = read_golden(path)
        try:
            cfg_dict = json.loads(meta["config"])
        except (KeyError, json.JSONDecodeError) as exc:
            entries.append(VerifyEntry("?", path.name, "FAIL", f"bad metadata: {exc}"))
            continue
        if seed_override is not None and cfg_dict.get("seed") is not None:
            cfg_dict["seed"] = seed_override
        cfg = ExperimentConfig.from_dict(cfg_dict)
        seen.add(cfg.experiment)
        tol = json.loads(meta.get("tolerance", "{}"))
        if tol_override is not None:
            tol = {c: tol_override for c in columns}
        res = run(cfg)
        got = list(csv.reader(render_csv(res, cfg).splitlines()[-len(res.rows):])) if res.rows else []
        diff = _compare(columns, want, got, tol)
        entries.append(VerifyEntry(cfg.experiment, path.name, "FAIL" if diff else "PASS", diff or ""))
    for name in sorted(set(EXPERIMENTS) - seen):
        entries.append(VerifyEntry(name, "-", "SKIP", "no golden file"))
    return entries


GOLDEN_CONFIGS = {
    "ising_phi": {"params": {"points": 12}},
    "code_phi": {"params": {"code": "hamming84"}},
    "random_code_sweep": {"seed": 1, "params": {"n_values": [6, 8, 10]}},
    "codeword_count_sweep": {"seed": 1, "params": {"n": 10}},
    "quantum_phi_max": {"seed": 1, "params": {"n": 4, "trials": 2000}},
    "integration_energy_demo": {"seed": 1, "params": {"samples": 3, "unitaries": 100}},
    "sliding_autonomy": {"params": {"b_values": [3, 4, 5, 6]}},
    "apodization_compare": {"params": {"b_values": [3, 4, 5], "alpha_values": [0, 1, 2]}},
    "snip_optimize": {"seed": 3, "params": {"restarts": 2, "budget": 200}},
    "dispersion": {"params": {"side": 3}},
}


def write_goldens(golden_dir, names=None):
    """Write one golden CSV per experiment using :data:`GOLDEN_CONFIGS`."""
    golden_dir = Path(golden_dir)
    golden_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in names or sorted(GOLDEN_CONFIGS):
        d = {"experiment": name, **copy.deepcopy(GOLDEN_CONFIGS[name])}
        cfg = ExperimentConfig.from_dict(d)
        path = golden_dir / f"{name}.csv"
        write_result(run(cfg), cfg, path)
        written.append(path)
    return written
