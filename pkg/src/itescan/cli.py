"""Command-line interface: structured JSON reports for every backend.

Every subcommand prints one JSON report to stdout. Exit codes: 0 success,
1 domain error (with a machine-readable error object), 2 usage error.
Reports are byte-deterministic for a fixed seed; timing is only included
when --timing is passed, since elapsed times vary between runs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time as _time
from dataclasses import replace

import numpy as np

from . import __version__
from .circuits import conjugate_by_circuit, load_circuit_json
from .config import Caps, DEFAULT_CAPS, load_caps
from .continuation import (
    conformal_map_coeffs,
    continued_log_partition,
    select_continuation_params,
    zero_free_certificate,
)
from .errors import ItescanError
from .expansion import estimate_partition
from .graph import beta_star, build_graph, cluster_count_check, lattice_degree_bound
from .mc import (
    build_sample_set,
    cauchy_norm,
    estimate_Z,
    sample_count,
    truncation_tail,
    truncation_time,
)
from .oracle import exact_partition, exact_residue, spectrum
from .pauli import (
    normalize_hamiltonian,
    parse_hamiltonian,
    rescale_coefficients,
    serialize_hamiltonian,
)
from .scan import ScanConfig, derive_scan_parameters, energy_scan, validate_gap_assumption
from .states import ProductState, SemiClassicalState, apply_pauli, load_state_json

SUBCOMMANDS = (
    "estimate", "partition", "oracle", "clusters", "mc", "continue", "bench", "selftest",
)


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        digest.update(fh.read())
    return digest.hexdigest()[:16]


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"expected 're' or 're,im', got {text!r}")


def _load_inputs(args) -> tuple[dict, dict]:
    """Read the --hamiltonian/--state/--circuit files named on the args."""
    objects = {}
    hashes = {}
    for name in ("hamiltonian", "state", "circuit", "spec"):
        path = getattr(args, name.replace("-", "_"), None)
        if path is None:
            continue
        hashes[name] = {"path": path, "sha256": _sha256(path)}
        text = _read(path)
        if name == "hamiltonian":
            objects[name] = parse_hamiltonian(text)
        elif name == "state":
            objects[name] = load_state_json(text)
        elif name == "circuit":
            objects[name] = load_circuit_json(text)
        else:
            objects[name] = json.loads(text)
    return objects, hashes


def _emit(args, command: str, config: dict, result: dict, hashes: dict, started: float) -> int:
    report = {
        "command": command,
        "version": __version__,
        "config": config,
        "inputs": hashes,
        "result": result,
        "elapsed_ms": round((_time.perf_counter() - started) * 1000.0, 3)
        if args.timing
        else None,
    }
    indent = 2 if args.pretty else None
    sys.stdout.write(json.dumps(report, indent=indent) + "\n")
    return 0


def _cmd_oracle(args, caps: Caps) -> int:
    started = _time.perf_counter()
    objects, hashes = _load_inputs(args)
    data = spectrum(objects["hamiltonian"], objects["state"], caps)
    result = {
        "e0": data.ground_energy,
        "gap": data.gap,
        "p0": data.p0,
        "ground_degeneracy": data.ground_degeneracy,
    }
    if args.eigenvalues:
        result["eigenvalues"] = [float(e) for e in data.eigenvalues]
    config = {"eigenvalues": args.eigenvalues}
    return _emit(args, "oracle", config, result, hashes, started)


def _cmd_partition(args, caps: Caps) -> int:
    started = _time.perf_counter()
    objects, hashes = _load_inputs(args)
    hamiltonian, state = objects["hamiltonian"], objects["state"]
    beta = _parse_complex(args.beta)
    if args.backend == "exact":
        value = exact_partition(hamiltonian, args.shift, beta, state, caps)
        estimate = {"value": value, "error_bound": 0.0, "order": 0}
    elif args.backend == "cluster":
        est = estimate_partition(hamiltonian, args.shift, beta, state, args.eps, caps)
        estimate = {
            "value": est.value,
            "error_bound": est.additive_error_bound,
            "order": est.order,
        }
    else:  # mc
        if beta.imag != 0:
            raise ValueError("mc backend takes real beta")
        b = beta.real
        t_cut = truncation_time(b, args.eps / 2.0)
        norm = cauchy_norm(b, t_cut)
        shots = sample_count(norm, args.eps / 2.0, 1, args.mu)
        samples = build_sample_set(
            hamiltonian, state, b, t_cut, shots,
            mode="bernoulli", seed=args.seed, n_points=1, failure_prob=args.mu, caps=caps,
        )
        est = estimate_Z(samples, args.shift)
        estimate = {
            "value": est.value,
            "error_bound": est.additive_error_bound,
            "order": est.order,
        }
    result = {
        "value_re": estimate["value"].real,
        "value_im": estimate["value"].imag,
        "error_bound": estimate["error_bound"],
        "M": estimate["order"],
        "backend": args.backend,
    }
    config = {
        "backend": args.backend,
        "beta": args.beta,
        "shift": args.shift,
        "eps": args.eps,
        "mu": args.mu,
        "seed": args.seed,
    }
    return _emit(args, "partition", config, result, hashes, started)


def _cmd_clusters(args, caps: Caps) -> int:
    started = _time.perf_counter()
    objects, hashes = _load_inputs(args)
    graph = build_graph(objects["hamiltonian"])
    sizes = []
    for m in range(1, args.max_size + 1):
        t0 = _time.perf_counter()
        count, bound, ok = cluster_count_check(graph, m, caps)
        elapsed = round((_time.perf_counter() - t0) * 1000.0, 3)
        sizes.append(
            {
                "m": m,
                "count": count,
                "bound": bound,
                "ok": ok,
                "elapsed_ms": elapsed if args.timing else None,
            }
        )
    result = {
        "degree": graph.max_degree,
        "effective_degree": graph.effective_degree,
        "beta_star": beta_star(graph.effective_degree),
        "sizes": sizes,
    }
    return _emit(args, "clusters", {"max_size": args.max_size}, result, hashes, started)


def _cmd_estimate(args, caps: Caps) -> int:
    started = _time.perf_counter()
    objects, hashes = _load_inputs(args)
    hamiltonian, state = objects["hamiltonian"], objects["state"]
    scale = 1.0
    if args.normalize != "none":
        hamiltonian, scale = normalize_hamiltonian(hamiltonian, args.normalize, caps)
    config = ScanConfig(
        gamma=args.gamma,
        gap=args.gap,
        accuracy=args.eps,
        interval=(args.ea, args.eb),
        backend=args.backend,
        failure_prob=args.mu,
        seed=args.seed,
        beta_override=args.beta_override,
        circuit=objects.get("circuit"),
    )
    result_obj = energy_scan(hamiltonian, state, config, caps)
    result = {
        "e0": result_obj.energy,
        "e_max": result_obj.e_max,
        "beta": result_obj.parameters.beta,
        "t_max": result_obj.parameters.t_max,
        "threshold": result_obj.parameters.threshold,
        "point_tolerance": result_obj.point_tolerance,
        "backend": result_obj.backend,
        "gap_assumption_ok": result_obj.gap_assumption_ok,
        "normalization_scale": scale,
        "order_or_samples": result_obj.order_or_samples,
        "n_points": result_obj.n_points,
        "trace": [
            {"x": p.x, "residue": p.residue, "error_bound": p.error_bound}
            for p in result_obj.trace
        ],
    }
    config_echo = {
        "gamma": args.gamma,
        "gap": args.gap,
        "eps": args.eps,
        "ea": args.ea,
        "eb": args.eb,
        "backend": args.backend,
        "mu": args.mu,
        "seed": args.seed,
        "normalize": args.normalize,
        "beta_override": args.beta_override,
    }
    return _emit(args, "estimate", config_echo, result, hashes, started)


def _cmd_mc(args, caps: Caps) -> int:
    started = _time.perf_counter()
    objects, hashes = _load_inputs(args)
    hamiltonian, state = objects["hamiltonian"], objects["state"]
    t_cut = truncation_time(args.beta, args.trunc_eps)
    shots = args.shots
    if shots is None:
        shots = sample_count(cauchy_norm(args.beta, t_cut), args.trunc_eps, args.points, args.mu)
    samples = build_sample_set(
        hamiltonian, state, args.beta, t_cut, shots,
        mode=args.mode, seed=args.seed, n_points=args.points, failure_prob=args.mu,
        caps=caps,
    )
    est = estimate_Z(samples, args.x)
    result = {
        "Z_re": est.value.real,
        "Z_im": est.value.imag,
        "stat_err": samples.statistical_error,
        "tail_err": samples.truncation_error,
        "S": samples.n_samples,
        "T": samples.trunc_time,
    }
    config = {
        "beta": args.beta,
        "trunc_eps": args.trunc_eps,
        "shots": args.shots,
        "mode": args.mode,
        "seed": args.seed,
        "x": args.x,
        "points": args.points,
        "mu": args.mu,
    }
    return _emit(args, "mc", config, result, hashes, started)


def _cmd_continue(args, caps: Caps) -> int:
    started = _time.perf_counter()
    objects, hashes = _load_inputs(args)
    hamiltonian = objects["hamiltonian"]
    if "circuit" in objects:
        hamiltonian = conjugate_by_circuit(hamiltonian, objects["circuit"], caps)
    threshold = beta_star(build_graph(hamiltonian).effective_degree)
    params = select_continuation_params(args.beta, threshold)
    if args.nu is not None:
        params = replace(params, nu=args.nu, alpha=1.0 / args.nu)
    certificate = zero_free_certificate(args.p0, args.gap, args.beta)
    est = continued_log_partition(
        hamiltonian, args.shift, args.beta, params, args.order, certificate,
        amplitude_term=args.amplitude_term, caps=caps,
    )
    result = {
        "logD_re": est.log_value.real,
        "logD_im": est.log_value.imag,
        "remainder": est.log_error_bound,
        "value_re": est.value.real,
        "value_im": est.value.imag,
        "order": est.order,
        "caveats": list(est.caveats),
        "params": {
            "w": params.w,
            "nu": params.nu,
            "nu_prime": params.nu_prime,
            "alpha": params.alpha,
            "beta_star": threshold,
        },
    }
    config = {
        "beta": args.beta,
        "order": args.order,
        "nu": args.nu,
        "shift": args.shift,
        "p0": args.p0,
        "gap": args.gap,
        "amplitude_term": args.amplitude_term,
    }
    return _emit(args, "continue", config, result, hashes, started)


def _chain_hamiltonian(n: int):
    lines = [f"-1.0 Z{i} Z{i + 1}" for i in range(n - 1)]
    lines += [f"-1.0 X{i}" for i in range(n)]
    return parse_hamiltonian("\n".join(lines), n_qubits=n)


def _cmd_bench(args, caps: Caps) -> int:
    started = _time.perf_counter()
    objects, hashes = _load_inputs(args)
    spec = objects["spec"]
    chain_lengths = spec.get("chain_lengths", [4, 6, 8])
    cluster_sizes = spec.get("cluster_sizes", [1, 2, 3])
    moment_orders = spec.get("moment_orders", [4, 8])
    repeats = int(spec.get("repeats", 1))
    rows = []
    for n in chain_lengths:
        hamiltonian = _chain_hamiltonian(int(n))
        graph = build_graph(hamiltonian)
        state = ProductState.plus(int(n))
        for rep in range(repeats):
            for m in cluster_sizes:
                t0 = _time.perf_counter()
                count, _, _ = cluster_count_check(graph, int(m), caps)
                rows.append(
                    {
                        "kind": "clusters",
                        "n": int(n),
                        "param": int(m),
                        "repeat": rep,
                        "elapsed_ms": round((_time.perf_counter() - t0) * 1000.0, 3),
                        "size": count,
                    }
                )
            for order in moment_orders:
                from .expansion import _propagation, compute_moments

                _propagation.cache_clear()
                t0 = _time.perf_counter()
                table = compute_moments(hamiltonian, state, state, int(order), caps)
                rows.append(
                    {
                        "kind": "moments",
                        "n": int(n),
                        "param": int(order),
                        "repeat": rep,
                        "elapsed_ms": round((_time.perf_counter() - t0) * 1000.0, 3),
                        "size": int(table.order + 1),
                    }
                )
    if args.csv:
        header = "kind,n,param,repeat,elapsed_ms,size"
        lines = [header] + [
            f"{r['kind']},{r['n']},{r['param']},{r['repeat']},{r['elapsed_ms']},{r['size']}"
            for r in rows
        ]
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    result = {"rows": rows, "csv": args.csv}
    return _emit(args, "bench", {"spec": spec}, result, hashes, started)


def _selftest_checks() -> list[tuple[str, bool]]:
    """Quick direct checks of the analytically known cases."""
    checks: list[tuple[str, bool]] = []

    def check(name: str, ok: bool):
        checks.append((name, bool(ok)))

    h = parse_hamiltonian("1.0 Z0 Z1\n0.5 X0")
    check("parse: two terms, locality 2", h.n_terms == 2 and h.locality == 2)
    try:
        parse_hamiltonian("1.0 Z0 Z1\n-1.0 Z0 Z1")
        check("parse: cancellation raises", False)
    except ItescanError:
        check("parse: cancellation raises", True)
    check("serialize round-trip", parse_hamiltonian(serialize_hamiltonian(h)).terms == h.terms)

    from .pauli import PauliString

    phase, out = apply_pauli(PauliString.from_label(1, "Y0"), ProductState.computational(0, 1))
    check("Y|0> = i|1>", abs(phase - 1j) < 1e-12 and abs(out.amplitudes[0, 1] - 1) < 1e-12)
    phase, _ = apply_pauli(PauliString.from_label(1, "Z0"), ProductState.computational(1, 1))
    check("Z|1> = -|1>", abs(phase + 1) < 1e-12)

    chain = parse_hamiltonian("1.0 Z0 Z1\n1.0 Z1 Z2")
    graph = build_graph(chain)
    check("chain graph: one edge, degree 1", graph.edges() == [(0, 1)] and graph.max_degree == 1)
    check("beta_star(1) = 1/(4 e^2)", abs(beta_star(1) - 1 / (4 * math.e ** 2)) < 1e-15)
    check("beta_star(0) treated as degree 1", beta_star(0) == beta_star(1))
    check("lattice bound k=1 D=1 is 8", abs(lattice_degree_bound(1, 1) - 8) < 1e-9)

    from .graph import enumerate_connected_clusters

    overlap = build_graph(parse_hamiltonian("1.0 X0 X1\n1.0 Y0 Y1"))
    check("overlapping pair: 3 clusters at m=2", len(enumerate_connected_clusters(overlap, 2)) == 3)
    disjoint = build_graph(parse_hamiltonian("1.0 Z0 Z1\n1.0 Z2 Z3"))
    check("disjoint pair: 2 clusters at m=2", len(enumerate_connected_clusters(disjoint, 2)) == 2)

    from .series import TruncatedSeries, series_eval, series_exp, series_log

    log_series = series_log(TruncatedSeries.from_list([1, 1, 0, 0]))
    check(
        "log(1+z) coefficients",
        np.allclose(log_series.coefficients, [0, 1, -0.5, 1 / 3]),
    )
    exp_series = series_exp(TruncatedSeries.from_list([0, 1, 0, 0]))
    check("exp(z) coefficients", np.allclose(exp_series.coefficients, [1, 1, 0.5, 1 / 6]))
    check("eval at 0 is c0", series_eval(TruncatedSeries.from_list([1, 1, 1]), 0) == 1)

    from .expansion import compute_moments, truncation_order

    plus = ProductState.plus(1)
    z = parse_hamiltonian("1.0 Z0")
    table = compute_moments(z, plus, plus, 4)
    check("moments of Z on |+>", np.allclose(table.moments, [1, 0, 1, 0, 1]))
    check(
        "truncation order example",
        truncation_order(2, 0.5 * beta_star(1), beta_star(1), 1e-3) == 12,
    )

    psi = SemiClassicalState.single(plus)
    data = spectrum(z, psi)
    check("spectrum of Z with |+>", data.ground_energy == -1 and data.gap == 2 and abs(data.p0 - 0.5) < 1e-12)
    d = exact_partition(z, 0.0, 1.0, psi)
    check("partition cosh", abs(d - math.cosh(1.0)) < 1e-12)
    r = exact_residue(z, -1.0, 1.0, psi)
    check("residue value", abs(r - 0.5 * (math.exp(-2) - math.exp(-4))) < 1e-12)
    est = estimate_partition(z, -1.0, 0.0, psi, 1e-3)
    check("beta = 0 partition is 1", abs(est.value - 1.0) < 1e-12)

    params = derive_scan_parameters(2.0, 0.1, math.sqrt(0.5))
    check("derived beta", abs(params.beta - math.log(20) / 2) < 1e-12)
    check("derived T", abs(params.t_max - 4 / (math.pi * 0.05)) < 1e-9)
    check("derived threshold", abs(params.threshold - (params.beta / 2 + 1) * 0.05) < 1e-12)
    check("gap assumption true case", validate_gap_assumption(2.0, 0.1, math.sqrt(0.5)))
    check("gap assumption false case", not validate_gap_assumption(0.1, 0.1, math.sqrt(0.5)))

    check("cauchy norm at T = beta", abs(cauchy_norm(1.0, 1.0) - 0.5) < 1e-12)
    check("truncation time inverse", abs(truncation_tail(1.0, truncation_time(1.0, 0.01)) - 0.01) < 1e-12)
    check("sample count example", sample_count(0.9, 0.05, 100, 0.01) == 3434)

    cont = select_continuation_params(beta_star(1), beta_star(1))
    check("nu' at beta = beta*", abs(cont.nu_prime - 1 / (1 - math.exp(-math.pi))) < 1e-9)
    phi = conformal_map_coeffs(cont, 8)
    check("phi(0) = 0 and phi_1 > 0", phi.coefficients[0] == 0 and phi.coefficients[1].real > 0)
    check("certificate at p0 = 0.5", zero_free_certificate(0.5, 1.0, 1.0 + 0j).ok)
    check("certificate refused at p0 = 0.4", not zero_free_certificate(0.4, 1.0, 1.0 + 0j).ok)
    return checks


def _cmd_selftest(args, caps: Caps) -> int:
    started = _time.perf_counter()
    checks = _selftest_checks()
    failed = [name for name, ok in checks if not ok]
    result = {
        "passed": len(checks) - len(failed),
        "failed": len(failed),
        "checks": [{"name": name, "ok": ok} for name, ok in checks],
    }
    code = _emit(args, "selftest", {}, result, {}, started)
    return 1 if failed else code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="itescan",
        description="Ground-state energy estimation via imaginary-time partition scans",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--pretty", action="store_true", help="indent the JSON report")
        p.add_argument("--timing", action="store_true", help="include elapsed times")
        p.add_argument("--caps-config", default=None, help="key=value cap override file")

    p = sub.add_parser("oracle", help="exact diagonalization report")
    common(p)
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--eigenvalues", action="store_true", help="include the full spectrum")

    p = sub.add_parser("partition", help="one partition-function estimate")
    common(p)
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--backend", choices=("cluster", "exact", "mc"), default="cluster")
    p.add_argument("--beta", required=True, help="complex as 're' or 're,im'")
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--mu", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("clusters", help="connected-cluster counts and bounds")
    common(p)
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--max-size", type=int, default=4)

    p = sub.add_parser("estimate", help="ground-state energy scan")
    common(p)
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--gap", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--ea", type=float, required=True)
    p.add_argument("--eb", type=float, required=True)
    p.add_argument("--backend", choices=("exact", "cluster", "mc", "continuation"), default="exact")
    p.add_argument("--mu", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--normalize", choices=("none", "exact", "bound"), default="none")
    p.add_argument("--beta-override", type=float, default=None)
    p.add_argument("--circuit", default=None, help="guiding-state circuit (continuation)")

    p = sub.add_parser("mc", help="standalone sampled estimator study")
    common(p)
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--trunc-eps", type=float, default=0.05)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--mode", choices=("expectation", "bernoulli"), default="bernoulli")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--points", type=int, default=1)
    p.add_argument("--mu", type=float, default=0.1)

    p = sub.add_parser("continue", help="analytic continuation of log D")
    common(p)
    p.add_argument("--hamiltonian", required=True, help="similarity-transformed H'")
    p.add_argument("--circuit", default=None, help="conjugate H by this circuit first")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--nu", type=float, default=None, help="override the midpoint nu")
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--p0", type=float, required=True, help="ground-overlap promise")
    p.add_argument("--gap", type=float, required=True)
    p.add_argument("--amplitude-term", type=float, default=0.0)

    p = sub.add_parser("bench", help="timing sweeps")
    common(p)
    p.add_argument("--spec", required=True, help="JSON sweep description")
    p.add_argument("--csv", default=None, help="also write rows as CSV")

    p = sub.add_parser("selftest", help="run the built-in analytic checks")
    common(p)
    return parser


_HANDLERS = {
    "oracle": _cmd_oracle,
    "partition": _cmd_partition,
    "clusters": _cmd_clusters,
    "estimate": _cmd_estimate,
    "mc": _cmd_mc,
    "continue": _cmd_continue,
    "bench": _cmd_bench,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    caps = DEFAULT_CAPS
    try:
        if args.caps_config:
            caps = load_caps(args.caps_config)
        return _HANDLERS[args.command](args, caps)
    except ItescanError as exc:
        sys.stdout.write(
            json.dumps({"error": {"code": exc.code, "message": str(exc)}}) + "\n"
        )
        return 1
    except (ValueError, OSError) as exc:
        code = "file_error" if isinstance(exc, OSError) else "invalid_value"
        sys.stdout.write(
            json.dumps({"error": {"code": code, "message": str(exc)}}) + "\n"
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
