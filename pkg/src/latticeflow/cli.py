"""Command-line front end: enumerate, sample, measure, verify, bkw-check.

Configuration comes from flags or a JSON config file (flags must agree with
the file when both specify a value).  Every run emits a manifest from which
the run can be reproduced bit-for-bit: the RNG is keyed counter-based
(philox4x64), chains use independent (seed, stream) keys, and aggregation
order is fixed.  Exit codes: 0 success, 1 verification failure, 2 usage
error.  The environment variable LATTICEFLOW_THREADS caps worker processes.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .bc import BoundaryCondition
from .bkw import BKWParams, bkw_partition_functions, loop_expansion_z, \
    torus_spin_observable
from .enumeration import enumerate_exact
from .errors import LatticeflowError
from .hexlattice import HexDomain, hex_ball
from .loop_o2 import LoopParams, loops_of_spins, spins_to_height
from .mcmc import ChainConfig, FKChain, LoopO2Chain, SixVertexChain, run_chain
from .observables import (alpha_n, crossing_probability, height_variance,
                          loops_around)
from .rng import RNG_ALGORITHM
from .six_vertex import SixVParams, spins_to_height_6v
from .squarelattice import SquareDomain
from .verify import verify_suite

USAGE_ERROR = 2


class UsageError(LatticeflowError):
    pass


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("LATTICEFLOW_THREADS", "1")))
    except ValueError:
        return 1


def _config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _manifest(command: str, config: dict, wall_clock: float | None = None) -> dict:
    manifest = {
        "command": command,
        "config": config,
        "tool_version": __version__,
        "rng": RNG_ALGORITHM,
        "config_sha256": _config_hash(config),
    }
    if wall_clock is not None:
        manifest["wall_clock_s"] = round(wall_clock, 3)
    return manifest


def _merge_config(args: argparse.Namespace, flag_names: list[str]) -> dict:
    """Merge a JSON config file with command-line flags.

    A flag that is explicitly set must agree with the file value, otherwise
    the combination is rejected as conflicting.
    """
    config: dict = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            config = json.load(fh)
        unknown = set(config) - set(flag_names)
        if unknown:
            raise UsageError(f"unknown config fields: {sorted(unknown)}")
    for name in flag_names:
        value = getattr(args, name.replace("-", "_"), None)
        if value is None:
            continue
        if name in config and config[name] != value:
            raise UsageError(
                f"conflicting values for {name!r}: config file has "
                f"{config[name]!r}, flag has {value!r}")
        config[name] = value
    return config


def _domain_from_spec(spec) -> HexDomain | SquareDomain:
    if isinstance(spec, str):
        spec = json.loads(spec)
    kind = spec.get("type")
    if kind == "hex_ball":
        return hex_ball(int(spec["radius"]))
    if kind == "hex_faces":
        return HexDomain.from_json(spec)
    if kind in ("squares", "square_block", "even_diamond"):
        return SquareDomain.from_json(spec)
    raise UsageError(f"unknown domain spec {spec!r}")


def _model_params(config: dict):
    model = config.get("model")
    if model == "loop-o2":
        x = config.get("x")
        if x is None or x <= 0:
            raise UsageError("loop-o2 needs an edge weight --x > 0")
        params = LoopParams(2, float(x))
        notes = []
        if not params.fkg_regime:
            notes.append("x > 1: outside the FKG regime")
        if params.super_duality_regime:
            notes.append("super-duality regime 1/sqrt2 <= x <= 1")
        return params, notes
    if model == "six-vertex":
        try:
            params = SixVParams(config["a"], config["b"], config["c"])
        except KeyError as missing:
            raise UsageError(f"six-vertex needs --a --b --c (missing {missing})")
        notes = []
        if not params.fkg_regime:
            notes.append("c < max(a, b): outside the FKG regime")
        elif params.c > params.a + params.b:
            notes.append("c > a+b: localised regime")
        elif params.super_duality_regime:
            notes.append("super-duality regime a,b <= c <= a+b")
        return params, notes
    if model == "fk":
        q = config.get("q")
        if q is None or q <= 0:
            raise UsageError("fk needs a cluster weight --q > 0")
        pa = config.get("pa", 0.5)
        pb = config.get("pb", pa)
        from .random_cluster import FKParams
        params = FKParams(pa, pb, q)
        notes = []
        if not params.fkg_regime:
            notes.append("FKG inequality fails for q < 1")
        if params.self_dual:
            notes.append("on the self-dual line")
        return params, notes
    raise UsageError(f"unknown model {config.get('model')!r}")


def parse_config(config: dict) -> dict:
    """Validate and resolve a run specification; attach regime warnings."""
    params, notes = _model_params(config)
    resolved = dict(config)
    resolved.setdefault("bc", "r+w+" if config["model"] != "fk" else "free")
    resolved.setdefault("seed", 0)
    resolved["regime_notes"] = notes
    if config["model"] != "fk":
        BoundaryCondition.parse(resolved["bc"])  # validates
    return resolved


def _build_chain(config: dict):
    params, _ = _model_params(config)
    domain = _domain_from_spec(config["domain"])
    model = config["model"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if model == "loop-o2":
            if not isinstance(domain, HexDomain):
                raise UsageError("loop-o2 needs a hexagonal domain")
            return LoopO2Chain(domain, params,
                               BoundaryCondition.parse(config["bc"]))
        if model == "six-vertex":
            if not isinstance(domain, SquareDomain):
                raise UsageError("six-vertex needs a square domain")
            return SixVertexChain(domain, params,
                                  BoundaryCondition.parse(config["bc"]))
        if not isinstance(domain, SquareDomain):
            raise UsageError("fk needs a square domain")
        return FKChain(domain, params, config.get("bc", "free"))


def _central_face(cells) -> tuple[int, int]:
    mean = np.mean(np.array(list(cells), dtype=float), axis=0)
    return min(cells, key=lambda c: (c[0] - mean[0]) ** 2 + (c[1] - mean[1]) ** 2)


def _chain_observables(config: dict, chain):
    model = config["model"]
    names = config.get("observables")
    if names is None:
        names = {"loop-o2": ["height_center", "loops_center"],
                 "six-vertex": ["height_center"],
                 "fk": ["open_edges"]}[model]
    elif isinstance(names, str):
        names = [n for n in names.split(",") if n]
    out = {}
    for name in names:
        if model == "loop-o2" and name == "height_center":
            center = chain.domain.face_index[_central_face(chain.domain.faces)]
            out[name] = lambda s, c=center: int(spins_to_height(s).values[c])
        elif model == "loop-o2" and name == "loops_center":
            face = _central_face(chain.domain.faces)
            out[name] = lambda s, f=face: loops_around(loops_of_spins(s), f)
        elif model == "six-vertex" and name == "height_center":
            center = chain.domain.square_index[_central_face(chain.domain.squares)]
            out[name] = lambda s, c=center: int(spins_to_height_6v(s).values[c])
        elif model == "fk" and name == "open_edges":
            out[name] = lambda s: int(s.mask.sum())
        else:
            raise UsageError(f"unknown observable {name!r} for model {model}")
    return out


# ---------------------------------------------------------------------------
# Subcommands


def cmd_enumerate(args) -> int:
    config = parse_config(_merge_config(args, [
        "model", "x", "a", "b", "c", "pa", "pb", "q", "domain", "bc",
        "representation"]))
    params, _ = _model_params(config)
    domain = _domain_from_spec(config["domain"])
    representation = config.get("representation", "heights")
    model = config["model"]
    bc = (config.get("bc", "free") if model == "fk"
          else BoundaryCondition.parse(config.get("bc", "r+w+")))
    dist = enumerate_exact(model, domain, params, bc=bc,
                           representation=representation)
    report = {
        "manifest": _manifest("enumerate", config),
        "n_states": len(dist),
        "partition_function": dist.Z,
        "max_prob": float(dist.probs.max()),
        "regime_notes": config["regime_notes"],
    }
    _emit_json(report, args.out)
    return 0


def cmd_sample(args) -> int:
    start = time.perf_counter()
    config = parse_config(_merge_config(args, [
        "model", "x", "a", "b", "c", "pa", "pb", "q", "domain", "bc", "seed",
        "sweeps", "burn-in", "thin", "observables", "stream"]))
    for key, default in (("sweeps", 1000), ("burn-in", 100), ("thin", 1)):
        config.setdefault(key, default)
    chain = _build_chain(config)
    chain_config = ChainConfig(seed=int(config["seed"]),
                               sweeps=int(config["sweeps"]),
                               burn_in=int(config["burn-in"]),
                               thinning=int(config["thin"]),
                               stream=int(config.get("stream", 0)))
    observables = _chain_observables(config, chain)
    records = run_chain(chain, chain_config, observables)

    names = sorted(observables)
    lines = ["# latticeflow sample manifest-sha256=" + _config_hash(config),
             ",".join(["sweep_index"] + names)]
    for r in records:
        lines.append(",".join([str(r.sweep_index)]
                              + [str(r.values[n]) for n in names]))
    csv_text = "\n".join(lines) + "\n"
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    base = os.path.join(out_dir, f"sample_{_config_hash(config)[:12]}")
    with open(base + ".csv", "w") as fh:
        fh.write(csv_text)
    manifest = _manifest("sample", config, wall_clock=time.perf_counter() - start)
    with open(base + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    print(base + ".csv")
    return 0


def _measure_crossing(config: dict) -> list[dict]:
    x = float(config["x"])
    m = int(config["m"])
    samples = int(config.get("samples", 1000))
    seed = int(config.get("seed", 0))
    burn = int(config.get("burn-in", 100))
    est = crossing_probability(
        x, m, ChainConfig(seed=seed, sweeps=samples + burn, burn_in=burn),
        bc=BoundaryCondition.parse(config.get("bc", "r+")),
        radius=int(config["radius"]) if config.get("radius") else None)
    return [{"observable": "crossing_probability", "name": f"H_{m}(xi_r+)",
             "n": m, "mean": est.mean, "std_error": est.std_error,
             "n_samples": est.n_samples}]


def _measure_variance_point(job) -> dict:
    config, n = job
    x = float(config["x"])
    samples = int(config.get("samples", 2000))
    seed = int(config.get("seed", 0))
    domain = hex_ball(n)
    chain = LoopO2Chain(domain, LoopParams(2, x),
                        BoundaryCondition.parse(config.get("bc", "r+w+")))
    center = domain.face_index[(0, 0)]
    burn = int(config.get("burn-in", 200))
    records = run_chain(chain,
                        ChainConfig(seed=seed + n, sweeps=samples + burn,
                                    burn_in=burn),
                        {"h": lambda s: spins_to_height(s).values[center]})
    est = height_variance([r.values["h"] for r in records])
    return {"observable": "height_variance", "name": "Var[h(center)]",
            "n": n, "mean": est.mean, "std_error": est.std_error,
            "n_samples": est.n_samples}


def _measure_alpha(config: dict) -> list[dict]:
    x = float(config["x"])
    n = int(config["n"])
    rho = float(config.get("rho", 4.0))
    samples = int(config.get("samples", 1000))
    seed = int(config.get("seed", 0))
    burn = int(config.get("burn-in", 100))
    est = alpha_n(n, rho, x,
                  ChainConfig(seed=seed, sweeps=samples + burn, burn_in=burn))
    return [{"observable": "alpha_n", "name": f"Circ_r+({n},{2 * n})",
             "n": n, "mean": est.mean, "std_error": est.std_error,
             "n_samples": est.n_samples}]


def cmd_measure(args) -> int:
    config = _merge_config(args, [
        "model", "kind", "x", "m", "n", "rho", "sizes", "samples", "seed",
        "bc", "burn-in", "radius"])
    config.setdefault("model", "loop-o2")
    kind = config.get("kind")
    if kind == "crossing":
        rows = _measure_crossing(config)
    elif kind == "alpha":
        rows = _measure_alpha(config)
    elif kind == "variance":
        sizes = config.get("sizes", "4,8,16")
        if isinstance(sizes, str):
            sizes = [int(s) for s in sizes.split(",")]
        jobs = [(config, n) for n in sizes]
        threads = _threads()
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                rows = list(pool.map(_measure_variance_point, jobs))
        else:
            rows = [_measure_variance_point(j) for j in jobs]
    else:
        raise UsageError(f"unknown measure kind {kind!r}")
    lines = ["# latticeflow measure manifest-sha256=" + _config_hash(config),
             "observable,name,n,mean,std_error,n_samples"]
    for r in rows:
        lines.append(f"{r['observable']},{r['name']},{r['n']},"
                     f"{r['mean']:.10g},{r['std_error']:.10g},{r['n_samples']}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print(args.out)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    code, results = verify_suite(args.level)
    report = {
        "manifest": _manifest("verify", {"level": args.level}),
        "passed": code == 0,
        "checks": [r.to_json() for r in results],
    }
    _emit_json(report, args.report)
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"[{status}] {r.name} ({r.runtime_s:.1f}s)")
    return code


def cmd_bkw_check(args) -> int:
    config = _merge_config(args, ["n", "k", "lambda"])
    lam = float(config.get("lambda", 0.0))
    if not 0.0 <= lam <= math.pi / 3 + 1e-12:
        raise UsageError("lambda must lie in [0, pi/3]")
    n = int(config.get("n", 1))
    k = int(config.get("k", 1))
    params = BKWParams(lam)
    z, zk = bkw_partition_functions(n, k, params)
    obs = torus_spin_observable(n, k, params)
    z_loops = loop_expansion_z(n, params)
    report = {
        "manifest": _manifest("bkw-check", {"n": n, "k": k, "lambda": lam}),
        "z_n": [z.real, z.imag],
        "z_nk": [zk.real, zk.imag],
        "spin_obs": [obs.real, obs.imag],
        "abs_error": abs(zk / z - obs),
        "loop_expansion_z": z_loops,
        "loop_expansion_abs_error": abs(z.real - z_loops),
    }
    _emit_json(report, args.out)
    ok = report["abs_error"] < 1e-10 and report["loop_expansion_abs_error"] < 1e-8
    return 0 if ok else 1


def _emit_json(report: dict, path: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
        print(path)
    else:
        print(text)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticeflow",
        description="Coupled lattice models: exact oracles, samplers, and "
                    "cross-verified identities.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_flags(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--model", choices=["loop-o2", "six-vertex", "fk"])
        p.add_argument("--x", type=float, help="loop O(2) edge weight")
        p.add_argument("--a", type=float)
        p.add_argument("--b", type=float)
        p.add_argument("--c", type=float)
        p.add_argument("--pa", type=float)
        p.add_argument("--pb", type=float)
        p.add_argument("--q", type=float)
        p.add_argument("--domain", help="JSON domain spec")
        p.add_argument("--bc", help="boundary condition, e.g. r+w+ or free")

    p_enum = sub.add_parser("enumerate", help="exact small-domain distribution")
    add_model_flags(p_enum)
    p_enum.add_argument("--representation", choices=["heights", "spins"])
    p_enum.add_argument("--out")
    p_enum.set_defaults(fn=cmd_enumerate)

    p_sample = sub.add_parser("sample", help="run an MCMC chain, emit CSV")
    add_model_flags(p_sample)
    p_sample.add_argument("--seed", type=int)
    p_sample.add_argument("--sweeps", type=int)
    p_sample.add_argument("--burn-in", type=int, dest="burn_in")
    p_sample.add_argument("--thin", type=int)
    p_sample.add_argument("--stream", type=int)
    p_sample.add_argument("--observables")
    p_sample.add_argument("--out-dir", dest="out_dir")
    p_sample.set_defaults(fn=cmd_sample)

    p_measure = sub.add_parser("measure", help="estimate an observable")
    p_measure.add_argument("--config", help="JSON config file")
    p_measure.add_argument("--kind", choices=["crossing", "alpha", "variance"])
    p_measure.add_argument("--model", choices=["loop-o2"])
    p_measure.add_argument("--x", type=float)
    p_measure.add_argument("--m", type=int)
    p_measure.add_argument("--n", type=int)
    p_measure.add_argument("--rho", type=float)
    p_measure.add_argument("--radius", type=int)
    p_measure.add_argument("--sizes")
    p_measure.add_argument("--samples", type=int)
    p_measure.add_argument("--seed", type=int)
    p_measure.add_argument("--bc")
    p_measure.add_argument("--burn-in", type=int, dest="burn_in")
    p_measure.add_argument("--out")
    p_measure.set_defaults(fn=cmd_measure)

    p_verify = sub.add_parser("verify", help="run the verification suite")
    p_verify.add_argument("--level", choices=["quick", "full"], default="quick")
    p_verify.add_argument("--report")
    p_verify.set_defaults(fn=cmd_verify)

    p_bkw = sub.add_parser("bkw-check", help="torus coupling identity report")
    p_bkw.add_argument("--config", help="JSON config file")
    p_bkw.add_argument("--n", type=int)
    p_bkw.add_argument("--k", type=int)
    p_bkw.add_argument("--lambda", type=float, dest="lambda_")
    p_bkw.add_argument("--out")
    p_bkw.set_defaults(fn=cmd_bkw_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "lambda_", None) is not None:
        setattr(args, "lambda", args.lambda_)
    try:
        return args.fn(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE_ERROR
    except LatticeflowError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
