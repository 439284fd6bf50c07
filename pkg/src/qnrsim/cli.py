"""Command-line entry point: ``qnrsim <command> [options]``.

Exit status: 0 pass, 1 verification failure, 2 invalid input, 3 resource cap.
Errors go to stderr as ``error[CODE]: message``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import amplification as amp
from . import statevector as sv
from .errors import InvalidInput, QnrSimError
from .number_theory import (
    bit_length_above,
    jacobi,
    power_residue_indicator,
    primes_below,
    qnr_set_bruteforce,
    require_odd_prime,
)
from .reports import (
    GroverDemoReport,
    GroverStep,
    SampleReport,
    SetSampleReport,
    check_samples,
    chi_square_uniform,
    frequency_table,
    to_dict,
    to_json,
)
from .sampler import DEFAULT_TOLERANCE, Schedule, build_instance, pipeline_stages, sample_qnr, verify

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"error[E_USAGE]: {message}\n")


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), help="default: csv for trace, else json")
    common.add_argument("--tolerance", type=_positive_float, default=DEFAULT_TOLERANCE)
    common.add_argument(
        "--max-qubits", type=int, default=None, help=f"memory cap on n (default ${sv.MAX_QUBITS_ENV} or 26)"
    )

    parser = _Parser(prog="qnrsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", parents=[common], help="sample quadratic nonresidues mod p")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="fill elapsed_ms (output no longer reproducible)")
    p.add_argument("--plot", type=Path, help="write a frequency histogram to this path")

    p = sub.add_parser("verify", parents=[common], help="check the pipeline against its oracles")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--prime", type=int)
    which.add_argument("--sweep-max", type=int, help="all primes = 1 mod 8 below this bound")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("trace", parents=[common], help="dump amplitudes at one pipeline stage")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--stage", choices=("initial", "rotated", "final"), required=True)
    p.add_argument("--schedule", choices=[s.value for s in Schedule], default=Schedule.TWO_STEP.value)
    p.add_argument("--plot", type=Path, help="write an amplitude figure to this path")

    p = sub.add_parser("grover-demo", parents=[common], help="plain or deterministic single-target Grover")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plot", type=Path, help="write the final amplitudes to this path")

    p = sub.add_parser("sample-set", parents=[common], help="exact sampling from a marked set of known size")
    p.add_argument("--size", type=int, required=True, help="exact number of marked states")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--marked-file", type=Path, help="newline-separated basis indices")
    src.add_argument("--indicator", choices=("qnr", "cubic-nr"))
    p.add_argument("--prime", type=int, help="prime for --indicator")
    p.add_argument("--bits", type=int, help="register width for --marked-file")
    p.add_argument("--parity-pairing", action="store_true", help="pair even/odd members instead of adding a bit")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--timing", action="store_true")
    p.add_argument("--plot", type=Path)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "trace" else "json"
    handler = {
        "sample": cmd_sample,
        "verify": cmd_verify,
        "trace": cmd_trace,
        "grover-demo": cmd_grover_demo,
        "sample-set": cmd_sample_set,
    }[args.command]
    saved = os.environ.get(sv.MAX_QUBITS_ENV)
    try:
        if args.max_qubits is not None:
            if not 1 <= args.max_qubits <= 30:
                raise InvalidInput(f"--max-qubits must be in 1..30, got {args.max_qubits}")
            # scoped to this call; sweep worker processes inherit it
            os.environ[sv.MAX_QUBITS_ENV] = str(args.max_qubits)
        return handler(args)
    except QnrSimError as exc:
        return _fail(exc)
    finally:
        if saved is None:
            os.environ.pop(sv.MAX_QUBITS_ENV, None)
        else:
            os.environ[sv.MAX_QUBITS_ENV] = saved


def _fail(exc: QnrSimError) -> int:
    print(f"error[{exc.code}]: {exc}", file=sys.stderr)
    return exc.exit_status


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _samples_csv(samples: list[int]) -> str:
    return "draw,value\n" + "".join(f"{i},{v}\n" for i, v in enumerate(samples))


def _chi_text(chi) -> str:
    if chi is None:
        return "chi_square: n/a"
    return f"chi_square: statistic={chi.statistic:.6g} df={chi.df} p_value={chi.p_value:.6g}"


def cmd_sample(args) -> int:
    if args.count < 1:
        raise InvalidInput(f"--count must be >= 1, got {args.count}")
    start = time.perf_counter()
    samples, path = sample_qnr(args.prime, args.seed, args.count, workers=args.workers)
    elapsed = (time.perf_counter() - start) * 1e3
    categories = qnr_set_bruteforce(args.prime) if path == "quantum" else samples[:1]
    table = frequency_table(samples, categories)
    report = SampleReport(
        p=args.prime,
        path=path,
        seed=args.seed,
        count=args.count,
        samples=samples,
        frequency_table=table,
        chi_square=chi_square_uniform(table) if path == "quantum" else None,
        elapsed_ms=round(elapsed, 3) if args.timing else None,
    )
    check_samples(report)
    if args.format == "json":
        _emit(to_json(report))
    elif args.format == "csv":
        _emit(_samples_csv(samples))
    else:
        _emit(
            f"p={report.p} path={report.path} seed={report.seed} count={report.count}\n"
            f"samples: {' '.join(map(str, samples))}\n{_chi_text(report.chi_square)}"
        )
    if args.plot:
        from .plotting import plot_frequencies

        plot_frequencies(table, args.plot, title=f"nonresidue samples mod {args.prime} ({path})")
    return EXIT_OK


def _verify_one(job: tuple[int, float]) -> dict:
    p, tol = job
    return to_dict(verify(p, tol))


def cmd_verify(args) -> int:
    if args.prime is not None:
        primes = [args.prime]
    else:
        primes = [q for q in primes_below(args.sweep_max) if q % 8 == 1]
    jobs = [(q, args.tolerance) for q in primes]
    if args.workers > 1 and len(jobs) > 1:
        # map() yields in submission order, so output stays ascending by p
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_verify_one, jobs, chunksize=4))
    else:
        results = [_verify_one(j) for j in jobs]

    failed = None
    for rep in results:
        if args.format == "json":
            _emit(json.dumps(rep))
        elif args.format == "csv":
            pass
        else:
            status = "PASS" if rep["passed"] else "FAIL"
            if rep["path"] == "classical":
                _emit(f"{status} p={rep['p']} path=classical shortcut={rep['shortcut']} (quantum checks skipped)")
            else:
                _emit(
                    f"{status} p={rep['p']} n={rep['n']} theta={rep['theta']:.12g} "
                    f"max_deviation={rep['max_deviation']:.3e} max_nonqnr={rep['max_nonqnr_amplitude']:.3e}"
                )
        if not rep["passed"] and failed is None:
            failed = rep
    if args.format == "csv":
        cols = ["p", "path", "n", "N", "theta", "max_deviation", "max_nonqnr_amplitude", "probability_sum", "passed"]
        _emit(",".join(cols) + "\n" + "".join(",".join(_cell(r[c]) for c in cols) + "\n" for r in results))
    if failed is not None:
        bad = next(k for k, ok in failed["checks"].items() if not ok)
        print(f"error[E_VERIFY_FAILED]: p={failed['p']} failed check {bad}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def cmd_trace(args) -> int:
    instance, plan = build_instance(args.prime)
    state = pipeline_stages(instance, plan, Schedule(args.schedule))[args.stage]
    if args.format == "json":
        rows = [
            {"index": x, "real": a.real, "imag": a.imag, "prob": float(abs(a) ** 2)}
            for x, a in enumerate(state.amplitudes.tolist())
        ]
        _emit(json.dumps({"schema": 1, "p": instance.p, "stage": args.stage, "rows": rows}))
    elif args.format == "text":
        _emit(f"p={instance.p} n={instance.n} N={instance.N} theta={plan.theta:.17g} stage={args.stage}")
        _emit(sv.dump_csv(state).replace(",", "\t"))
    else:
        _emit(sv.dump_csv(state))
    if args.plot:
        from .plotting import plot_amplitudes

        plot_amplitudes(state, args.plot, title=f"p = {instance.p}, stage: {args.stage}", marked=plan.all_qnr)
    return EXIT_OK


def _step(t: int, state: sv.StateVector, target: int) -> GroverStep:
    amps = state.amplitudes
    others = np.delete(amps, target)
    other = complex(others[np.argmax(np.abs(others))]) if others.size else 0j
    a = complex(amps[target])
    return GroverStep(t, [a.real, a.imag], [other.real, other.imag], float(abs(a) ** 2))


def cmd_grover_demo(args) -> int:
    n, target = args.bits, args.target
    if not 0 <= target < 1 << max(n, 0):
        raise InvalidInput(f"--target {target} outside 0..{(1 << max(n, 0)) - 1}")
    report = GroverDemoReport(n=n, target=target, deterministic=args.deterministic)
    if not args.deterministic:
        marked = sv.Indicator.from_indices(n, [target])
        state = sv.uniform(n)
        report.steps.append(_step(0, state, target))
        for t in range(1, amp.optimal_iterations(1 << n, 1) + 1):
            state = amp.grover_iteration(state, marked)
            report.steps.append(_step(t, state, target))
        report.success_probability = float(state.probabilities()[target])
        report.max_other_amplitude = float(np.max(np.abs(np.delete(state.amplitudes, target)), initial=0.0))
        ok = True
    else:
        state, plan = amp.single_marked_state(n, target)
        probs = amp.collapse_augmented(state)
        report.pre_iterations = plan.pre_iterations
        report.final_theta = plan.final_theta
        report.success_probability = float(probs[target])
        report.max_other_amplitude = float(np.sqrt(np.max(np.delete(probs, target), initial=0.0)))
        report.seed = args.seed
        report.observed = sv.measure(state, np.random.default_rng(args.seed)) >> 1
        ok = abs(report.success_probability - 1.0) <= 1e-9 and report.observed == target
    if args.format == "json":
        _emit(to_json(report))
    elif args.format == "csv":
        _emit(
            "iteration,target_real,target_imag,other_real,other_imag,target_prob\n"
            + "".join(
                f"{s.iteration},{s.target_amplitude[0]:.17g},{s.target_amplitude[1]:.17g},"
                f"{s.other_amplitude[0]:.17g},{s.other_amplitude[1]:.17g},{s.target_probability:.17g}\n"
                for s in report.steps
            )
        )
    else:
        for s in report.steps:
            _emit(
                f"iter {s.iteration}: target={complex(*s.target_amplitude):.6f} "
                f"other={complex(*s.other_amplitude):.6f} prob={s.target_probability:.12f}"
            )
        if args.deterministic:
            _emit(
                f"augmented n={n + 1} pre_iterations={report.pre_iterations} "
                f"theta={report.final_theta:.12g} observed={report.observed}"
            )
        _emit(f"success_probability={report.success_probability:.15f}")
    if args.plot:
        from .plotting import plot_amplitudes

        plot_amplitudes(state, args.plot, title=f"Grover, n = {n}, target = {target}")
    if not ok:
        print(f"error[E_VERIFY_FAILED]: success probability {report.success_probability!r}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def _read_marked_file(path: Path) -> list[int]:
    try:
        lines = path.read_text().split()
        return [int(tok) for tok in lines]
    except (OSError, ValueError) as exc:
        raise InvalidInput(f"cannot read marked indices from {path}: {exc}") from None


def cmd_sample_set(args) -> int:
    if args.count < 1:
        raise InvalidInput(f"--count must be >= 1, got {args.count}")
    if args.indicator:
        if args.prime is None:
            raise InvalidInput("--indicator needs --prime")
        p = require_odd_prime(args.prime)
        n = bit_length_above(p)
        if args.indicator == "qnr":
            members = [a for a in range(1, p) if jacobi(a, p) == -1]
        else:
            if (p - 1) % 3:
                raise InvalidInput(f"cubic nonresidues need 3 | p - 1, got p = {p}")
            members = [a for a in range(1, p) if power_residue_indicator(a, p, 3)]
        source = f"{args.indicator}:{p}"
    else:
        if args.bits is None:
            raise InvalidInput("--marked-file needs --bits")
        n = args.bits
        members = _read_marked_file(args.marked_file)
        source = f"file:{args.marked_file.name}"
    sv.check_qubits(n)
    marked = sv.Indicator.from_indices(n, members)
    pairing = marked.split_parity() if args.parity_pairing else None

    start = time.perf_counter()
    state, plan = amp.known_set_state(n, marked, args.size, pairing)
    draws = sv.sample_indices(state, args.seed, args.count)
    elapsed = (time.perf_counter() - start) * 1e3
    samples = [x >> 1 for x in draws] if plan.augmented else draws
    probs = amp.collapse_augmented(state) if plan.augmented else state.probabilities()
    table = frequency_table(samples, marked.as_set())
    report = SetSampleReport(
        n=n,
        k=args.size,
        source=source,
        augmented=plan.augmented,
        pre_iterations=plan.pre_iterations,
        final_theta=plan.final_theta,
        max_unmarked_probability=float(np.max(probs[~marked.mask()], initial=0.0)),
        seed=args.seed,
        count=args.count,
        samples=samples,
        frequency_table=table,
        chi_square=chi_square_uniform(table),
        elapsed_ms=round(elapsed, 3) if args.timing else None,
    )
    if args.format == "json":
        _emit(to_json(report))
    elif args.format == "csv":
        _emit(_samples_csv(samples))
    else:
        _emit(
            f"n={n} k={report.k} source={source} augmented={report.augmented} "
            f"pre_iterations={report.pre_iterations} theta={report.final_theta:.12g}\n"
            f"samples: {' '.join(map(str, samples))}\n{_chi_text(report.chi_square)}"
        )
    if args.plot:
        from .plotting import plot_frequencies

        plot_frequencies(table, args.plot, title=f"known-set samples ({source})")
    outside = set(samples) - marked.as_set()
    if outside or report.max_unmarked_probability > args.tolerance:
        print(f"error[E_VERIFY_FAILED]: unmarked outcomes {sorted(outside)[:5]}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
