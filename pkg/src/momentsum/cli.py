"""Command-line pipeline: reduce, transport, convert, verify, solve, and
sample — one subcommand per stage, JSON documents between stages.

Exit codes: 0 success or decision-yes, 1 decision-no, 2 usage or input
error, 3 internal invariant failure. Diagnostics go to stderr; data goes to
stdout or the --out path.
"""

from __future__ import annotations

import argparse
import random
import sys
import traceback
from pathlib import Path

from . import jsonio
from .errors import ConstructionError, InputError, InternalError, UsageError
from .exactnum import rat_from_str
from .fields import PrimeField, QQ, is_probable_prime
from .oracles import SearchBudget, brute_force_mss, brute_force_symss
from .pte import (
    prouhet_pte,
    sample_pte_over_fq,
    solve_inhomogeneous_pte,
    verify_pte,
)
from .rscodes import (
    count_agreements,
    elementary_symmetric_sums,
    exhaustive_reconstruct,
    mss_to_symss,
    symss_to_bdd,
)
from .reduction import (
    encode_assignment,
    ext_schedule,
    extract_assignment,
    sat_to_mss,
    subset_meets_targets,
    transport_to_ext_field,
    transport_to_prime_field,
    verify_properties,
)
from .satss import parse_one_in_three, render_one_in_three


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _load_doc(path: str) -> dict:
    return jsonio.load_document(_read_text(path))


def _emit(args, doc: dict) -> None:
    text = jsonio.to_text(doc)
    out = getattr(args, "out", None)
    if out:
        try:
            Path(out).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc}") from None
    else:
        sys.stdout.write(text)


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _nonnegative(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError("must be a nonnegative integer")
    return n


def _check_jobs(args) -> None:
    jobs = getattr(args, "jobs", 1)
    if jobs < 1:
        raise InputError("--jobs must be at least 1")
    if jobs > 1:
        _note(f"note: running single-threaded (--jobs {jobs} accepted as a cap)")


def _next_pow2(n: int) -> int:
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


# ------------------------------------------------------------ subcommands

def _cmd_reduce(args) -> int:
    sat = parse_one_in_three(_read_text(args.sat))
    if args.field != "fp" and (args.p is not None and args.field == "rational"):
        raise InputError("--p is only meaningful with --field fp or fq")
    if args.field != "fq" and (args.ell is not None or args.exponent_surrogate is not None):
        raise InputError("--ell/--exponent-surrogate are only meaningful with --field fq")
    if args.field != "fp" and args.fast_bits is not None:
        raise InputError("--fast-bits is only meaningful with --field fp")

    inst, art = sat_to_mss(sat, args.d)
    transport = None
    out_inst = inst
    if args.field == "fp":
        out_inst, rec = transport_to_prime_field(
            inst, art, prime=args.p, fast_bits=args.fast_bits
        )
        transport = {
            "kind": "prime",
            "p": str(rec.p),
            "denominator_scale": str(rec.denominator_scale),
            "sound": rec.is_sound,
        }
        _note(f"transported to F_p, p has {rec.p.bit_length()} bits, sound={rec.is_sound}")
    elif args.field == "fq":
        if args.p is None:
            raise InputError("--field fq requires --p")
        _, ell_min, _ = ext_schedule(art, exponent_surrogate=args.exponent_surrogate)
        ell = args.ell
        if ell is None:
            ell = ell_min if ell_min <= 64 else _next_pow2(ell_min)
            _note(f"using ell={ell} (minimum is {ell_min})")
        out_inst, rec = transport_to_ext_field(
            inst, art, args.p, ell, exponent_surrogate=args.exponent_surrogate
        )
        transport = {
            "kind": "ext",
            "p": str(rec.p),
            "ell": str(rec.ell),
            "ell_min": str(rec.ell_min),
            "exponent_base": str(rec.exponent_base),
            "exponent_surrogate": (
                None if args.exponent_surrogate is None else str(args.exponent_surrogate)
            ),
        }
    provenance = jsonio.make_provenance(render_one_in_three(sat), args.d, transport)
    _note(
        f"reduced: n={sat.n} m={sat.m} d={args.d} -> "
        f"{out_inst.size} elements, subset size {out_inst.k}"
    )
    _emit(args, jsonio.mss_to_json(out_inst, provenance))
    return 0


def _cmd_to_symss(args) -> int:
    inst = jsonio.mss_from_json(_load_doc(args.instance))
    sym = mss_to_symss(inst)
    _emit(args, jsonio.symss_to_json(sym))
    return 0


def _cmd_to_bdd(args) -> int:
    sym = jsonio.symss_from_json(_load_doc(args.instance))
    bdd = symss_to_bdd(sym)
    _note(f"decoding view: {len(bdd.points)} points, dimension K={bdd.K}, d={bdd.d}")
    _emit(args, jsonio.bdd_to_json(bdd))
    return 0


def _cmd_encode(args) -> int:
    doc = _load_doc(args.instance)
    inst = jsonio.mss_from_json(doc)
    art = jsonio.provenance_to_artifacts(doc)
    bits = jsonio.assignment_from_json(_load_doc(args.assignment))
    positions = encode_assignment(art, bits)
    if not subset_meets_targets(inst, positions):
        raise ConstructionError(
            "encoded subset misses the stored targets; "
            "instance and provenance disagree"
        )
    _emit(args, jsonio.subset_to_json(positions))
    return 0


def _cmd_extract(args) -> int:
    doc = _load_doc(args.instance)
    inst = jsonio.mss_from_json(doc)
    art = jsonio.provenance_to_artifacts(doc)
    positions = jsonio.subset_from_json(_load_doc(args.subset))
    bits = extract_assignment(art, positions, inst=inst)
    if bits is None:
        _note("subset does not meet the targets")
        return 1
    _emit(args, jsonio.assignment_to_json(bits))
    return 0


def _cmd_verify(args) -> int:
    doc = _load_doc(args.instance)
    positions = jsonio.subset_from_json(_load_doc(args.subset))
    fmt = doc.get("format")
    if fmt == "mss-instance":
        inst = jsonio.mss_from_json(doc)
        ok = subset_meets_targets(inst, positions)
    elif fmt == "symss-instance":
        sym = jsonio.symss_from_json(doc)
        if any(not 0 <= p < sym.size for p in positions):
            raise InputError("subset position out of range")
        ok = (
            len(positions) == sym.k
            and len(set(positions)) == len(positions)
            and elementary_symmetric_sums(
                [sym.elements[p] for p in positions], sym.d, sym.field
            )
            == tuple(sym.targets)
        )
    else:
        raise InputError(f"cannot verify against a {fmt!r} document")
    _emit(args, {"format": "verify-report", "version": jsonio.FORMAT_VERSION, "ok": ok})
    return 0 if ok else 1


def _cmd_check_props(args) -> int:
    doc = _load_doc(args.instance)
    inst = jsonio.mss_from_json(doc)
    if inst.field.char != 0:
        raise InputError(
            "structural properties are checked on the rational construction; "
            "reduce with --field rational first"
        )
    art = jsonio.provenance_to_artifacts(doc)
    if art.instance.elements != inst.elements:
        raise InputError("instance does not match its provenance")
    rep = verify_properties(art, probe_trials=args.trials, probe_seed=args.seed)
    _emit(
        args,
        {
            "format": "properties-report",
            "version": jsonio.FORMAT_VERSION,
            "ok": rep.ok,
            "p1_ok": rep.p1_ok,
            "p2_ok": rep.p2_ok,
            "p3": {
                "applicable": rep.p3.applicable,
                "ok": rep.p3.ok,
                "deterministic_ok": rep.p3.deterministic_ok,
                "probe_trials": str(rep.p3.probe_trials),
                "probe_violations": str(rep.p3.probe_violations),
            },
            "p4": {
                "ok": rep.p4.ok,
                "base_digit_bound": str(rep.p4.base_digit_bound),
                "base_max_digits": str(rep.p4.base_max_digits),
                "aux_den_bound": str(rep.p4.aux_den_bound),
                "aux_max_den_digits": str(rep.p4.aux_max_den_digits),
            },
        },
    )
    return 0 if rep.ok else 1


def _cmd_solve(args) -> int:
    _check_jobs(args)
    doc = _load_doc(args.instance)
    budget = SearchBudget(max_subsets=args.budget)
    fmt = doc.get("format")
    if fmt == "mss-instance":
        positions = brute_force_mss(jsonio.mss_from_json(doc), budget)
    elif fmt == "symss-instance":
        positions = brute_force_symss(jsonio.symss_from_json(doc), budget)
    else:
        raise InputError(f"cannot solve a {fmt!r} document")
    if positions is None:
        _note("no subset meets the targets")
        return 1
    _emit(args, jsonio.subset_to_json(positions))
    return 0


def _cmd_reconstruct(args) -> int:
    _check_jobs(args)
    bdd = jsonio.bdd_from_json(_load_doc(args.instance))
    poly = exhaustive_reconstruct(bdd, SearchBudget(max_subsets=args.budget))
    if poly is None:
        _note("no polynomial reaches the agreement threshold")
        return 1
    agreements = count_agreements(bdd, poly)
    _emit(
        args,
        {
            "format": "reconstruction",
            "version": jsonio.FORMAT_VERSION,
            "polynomial": jsonio.poly_to_json(poly, bdd.field),
            "agreements": str(agreements),
            "threshold": str(bdd.K + bdd.d),
        },
    )
    return 0


def _cmd_pte(args) -> int:
    if args.mode == "prouhet":
        if args.k is None:
            raise InputError("--mode prouhet requires --k")
        witness = prouhet_pte(args.k)
        _note(
            "X={%s} Y={%s}"
            % (
                ",".join(str(v) for v in witness.X),
                ",".join(str(v) for v in witness.Y),
            )
        )
        _emit(args, jsonio.witness_to_json(witness))
        return 0
    if args.mode == "inhomogeneous":
        if args.a is None or args.b is None or args.d is None:
            raise InputError("--mode inhomogeneous requires --a, --b and --d")
        witness = solve_inhomogeneous_pte(
            rat_from_str(args.a),
            rat_from_str(args.b),
            args.d,
            n_surrogate=args.n_surrogate,
            unit_scales=True if args.unit_scales else None,
        )
        report = verify_pte(witness)
        if not report.ok:
            raise ConstructionError("constructed witness failed re-verification")
        _emit(args, jsonio.witness_to_json(witness))
        return 0
    # sample mode
    if args.q is None or args.d is None:
        raise InputError("--mode sample requires --q and --d")
    if not is_probable_prime(args.q):
        raise InputError(f"--q must be prime, got {args.q}")
    field = PrimeField(args.q)
    if args.residuals is not None:
        try:
            residuals = tuple(int(r) % args.q for r in args.residuals.split(","))
        except ValueError:
            raise InputError("--residuals must be a comma-separated integer list") from None
        if len(residuals) != args.d:
            raise InputError(f"--residuals needs exactly {args.d} entries")
    else:
        rng = random.Random(args.seed)
        residuals = tuple(rng.randrange(args.q) for _ in range(args.d))
        _note(f"residual targets (seed {args.seed}): {','.join(map(str, residuals))}")
    result = sample_pte_over_fq(
        field, residuals, args.s, args.trials, seed=args.seed
    )
    rate = result.hits / result.trials if result.trials else 0.0
    _note(
        f"{result.hits} hits in {result.trials} trials (rate {rate:.6f})"
    )
    doc = {
        "format": "sample-report",
        "version": jsonio.FORMAT_VERSION,
        "found": result.found,
        "hits": str(result.hits),
        "trials": str(result.trials),
        "s": str(args.s),
        "seed": str(args.seed),
        "residuals": [str(r) for r in residuals],
        "witness": (
            None
            if result.witness is None
            else jsonio.witness_to_json(result.witness)
        ),
    }
    _emit(args, doc)
    return 0 if result.found else 1


def _acceptance_path() -> Path | None:
    root = Path(__file__).resolve().parent.parent.parent
    candidate = root / "tests" / "test_acceptance.py"
    return candidate if candidate.is_file() else None


def _quick_checks() -> list:
    """Small invariant drills used when the full test tree is unavailable."""
    from gmpy2 import mpq

    from .reduction import MssInstance
    from .rscodes import (
        SymSSInstance,
        build_codeword,
        elementary_to_power_sums,
        power_sums_to_elementary,
    )

    def prouhet():
        w = prouhet_pte(2)
        assert set(int(v) for v in w.X) == {0, 3, 5, 6}
        assert verify_pte(w).ok

    def roundtrip():
        sat = parse_one_in_three("p o13 2 1\n1 2 2 0\n")
        inst, art = sat_to_mss(sat, 2)
        s = encode_assignment(art, (1, 0))
        assert extract_assignment(art, s) == (1, 0)
        instp, _ = transport_to_prime_field(inst, art, fast_bits=64)
        assert subset_meets_targets(instp, s)

    def newton():
        b = (mpq(3), mpq(5))
        e = power_sums_to_elementary(b, QQ)
        assert elementary_to_power_sums(e, QQ) == b

    def decoding():
        sym = SymSSInstance(
            field=QQ, elements=(mpq(1), mpq(2), mpq(3)), k=2, targets=(mpq(3),)
        )
        bdd = symss_to_bdd(sym)
        cw = build_codeword(sym, (0, 1))
        assert count_agreements(bdd, cw) == 3
        assert exhaustive_reconstruct(bdd) == cw

    def solver():
        inst = MssInstance(
            field=QQ,
            elements=(mpq(1), mpq(2), mpq(3), mpq(4)),
            k=2,
            targets=(mpq(5), mpq(13)),
        )
        assert brute_force_mss(inst) == (1, 2)

    return [
        ("prouhet partition", prouhet),
        ("reduce/encode/extract round trip", roundtrip),
        ("newton conversions", newton),
        ("decoding worked example", decoding),
        ("pruned subset search", solver),
    ]


def _cmd_selftest(args) -> int:
    _check_jobs(args)
    path = _acceptance_path()
    if path is not None and not args.quick:
        try:
            import pytest
        except ImportError:
            pytest = None
        if pytest is not None:
            target = str(path.parent) if args.full else str(path)
            _note(f"running {'full test tree' if args.full else 'acceptance suite'}: {target}")
            rc = pytest.main(["-q", target])
            return 0 if rc == 0 else 3
        _note("pytest unavailable; falling back to quick checks")
    failures = 0
    for name, check in _quick_checks():
        try:
            check()
        except Exception as exc:  # noqa: BLE001 - report and continue
            failures += 1
            _note(f"FAIL {name}: {exc}")
        else:
            _note(f"PASS {name}")
    return 0 if failures == 0 else 3


# ----------------------------------------------------------------- parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="momentsum",
        description=(
            "Exact pipeline from one-in-three satisfiability through "
            "moment subset-sum to Reed-Solomon decoding instances."
        ),
    )
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("reduce", _cmd_reduce, "build a moment subset-sum instance from a SAT file")
    p.add_argument("--sat", required=True, help="one-in-three SAT file ('-' for stdin)")
    p.add_argument("--d", required=True, type=_positive, help="number of moment targets")
    p.add_argument(
        "--field",
        choices=("rational", "fp", "fq"),
        default="rational",
        help="target field (default rational)",
    )
    p.add_argument("--p", type=_positive, help="prime for fp/fq transport")
    p.add_argument("--ell", type=_positive, help="extension degree for fq")
    p.add_argument(
        "--fast-bits",
        type=_positive,
        help="fp only: pick the first suitable prime above 2^bits instead of the sound bound",
    )
    p.add_argument(
        "--exponent-surrogate",
        type=_positive,
        help="fq only: smaller base for the exponent schedule",
    )
    p.add_argument("--out", help="output path (default stdout)")

    p = add("to-symss", _cmd_to_symss, "convert moment targets to elementary symmetric targets")
    p.add_argument("--instance", required=True)
    p.add_argument("--out")

    p = add("to-bdd", _cmd_to_bdd, "convert an elementary-target instance to a decoding instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--out")

    p = add("encode", _cmd_encode, "turn a satisfying assignment into a solution subset")
    p.add_argument("--instance", required=True)
    p.add_argument("--assignment", required=True)
    p.add_argument("--out")

    p = add("extract", _cmd_extract, "read an assignment back from a solution subset")
    p.add_argument("--instance", required=True)
    p.add_argument("--subset", required=True)
    p.add_argument("--out")

    p = add("verify", _cmd_verify, "check a subset against the instance targets")
    p.add_argument("--instance", required=True)
    p.add_argument("--subset", required=True)
    p.add_argument("--out")

    p = add("check-props", _cmd_check_props, "verify the structural properties of a construction")
    p.add_argument("--instance", required=True)
    p.add_argument("--trials", type=_nonnegative, default=10_000, help="probe trials (default 10000)")
    p.add_argument("--seed", type=_nonnegative, default=0, help="probe seed (default 0)")
    p.add_argument("--out")

    p = add("solve", _cmd_solve, "brute-force search for a solution subset")
    p.add_argument("--instance", required=True)
    p.add_argument("--budget", type=_positive, default=1_000_000, help="max subsets (default 1000000)")
    p.add_argument("--jobs", type=int, default=1, help="worker cap (searches run single-threaded)")
    p.add_argument("--out")

    p = add("reconstruct", _cmd_reconstruct, "exhaustively reconstruct an agreeing polynomial")
    p.add_argument("--instance", required=True)
    p.add_argument("--budget", type=_positive, default=1_000_000, help="max subsets (default 1000000)")
    p.add_argument("--jobs", type=int, default=1, help="worker cap (searches run single-threaded)")
    p.add_argument("--out")

    p = add("pte", _cmd_pte, "power-sum witnesses: classic partition, inhomogeneous, or sampling")
    p.add_argument("--mode", required=True, choices=("prouhet", "inhomogeneous", "sample"))
    p.add_argument("--k", type=_positive, help="prouhet: agreement degree")
    p.add_argument("--d", type=_positive, help="inhomogeneous/sample: degree")
    p.add_argument("--a", help="inhomogeneous: left endpoint (rational)")
    p.add_argument("--b", help="inhomogeneous: right endpoint (rational)")
    p.add_argument("--n-surrogate", type=_positive, help="inhomogeneous: scale-schedule base")
    p.add_argument(
        "--unit-scales",
        action="store_true",
        help="inhomogeneous: force unit scale factors",
    )
    p.add_argument("--q", type=_positive, help="sample: prime field size")
    p.add_argument("--s", type=_positive, default=24, help="sample: tuple length per side (default 24)")
    p.add_argument("--trials", type=_positive, default=10_000, help="sample: max trials (default 10000)")
    p.add_argument("--seed", type=_nonnegative, default=0, help="sample: RNG seed (default 0)")
    p.add_argument("--residuals", help="sample: comma-separated residual targets")
    p.add_argument("--out")

    p = add("selftest", _cmd_selftest, "run the acceptance suite (or quick embedded checks)")
    p.add_argument("--full", action="store_true", help="run the entire test tree")
    p.add_argument("--quick", action="store_true", help="embedded checks only, skip pytest")
    p.add_argument("--jobs", type=int, default=1, help="worker cap")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args) or 0)
    except UsageError as exc:
        _note(f"error: {exc}")
        return 2
    except InternalError as exc:
        _note(f"internal error: {exc}")
        return 3
    except Exception:  # noqa: BLE001 - uncontrolled failure is an invariant break
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
