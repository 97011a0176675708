"""Command-line front end.

Every run is fully determined by its flags: reports carry no timestamps
or machine identifiers, so identical invocations produce byte-identical
JSON documents.  Exit status is 0 exactly when no bound violation,
hypothesis failure, tightness-claim failure, or oracle mismatch was
found, and nonzero otherwise.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from pathlib import Path

from . import __version__
from .applications import (
    CycleRule,
    periodicity_detect,
    supercongruence_sweep,
    verify_permutation_divisibility,
)
from .bounds import (
    BoundKind,
    floor_lemma_checks,
    q_sequence,
    verify_bounds,
    verify_q_recurrence,
)
from .exactcore import INFINITY, check_prime, vp
from .groups import (
    GroupSpec,
    classify_abelian_case,
    difference_valuation_profile,
    finite_subgroup_counts,
    hom_count_ints,
    parse_group_spec,
    subgroup_residues_mod_p,
)
from .series import (
    ExpSeries,
    check_hypotheses,
    dump_exp_series,
    exp_transform,
    load_exp_series,
    load_log_series,
)

DETERMINISM_NOTE = (
    "deterministic: no timestamps or machine identifiers; identical flags "
    "produce byte-identical output"
)

_BOUND_KIND_FOR_THEOREM = {
    "thm2.1": "thm2.1",
    "cor2.4": "cor2.4",
    "cor2.5": "thm2.1",  # same exponent formula
    "thm2.7": "thm2.7",
    "thm3.1": "thm3.1",
    "thm3.3": "thm3.3",
    "thm3.4": "thm3.4",
    "thm3.7": "thm3.7",
    "cor3.6": "cor3.6",
}


def _encode(value):
    if value is INFINITY:
        return "infinity"
    return value


def _hypothesis_dict(report) -> dict:
    return {
        "theorem": report.theorem,
        "p": report.p,
        "params": report.params,
        "conditions": [
            {
                "condition": c.name,
                "verdict": c.status,
                "first_failure": c.first_failure,
            }
            for c in report.conditions
        ],
        "overall": "pass" if report.overall else "fail",
        "fully_verified": report.fully_verified,
    }


def _document(command: str, parameters: dict, truncation, rows, summary, failed):
    return {
        "command": command,
        "parameters": parameters,
        "truncation": truncation,
        "determinism": DETERMINISM_NOTE,
        "rows": rows,
        "summary": summary,
        "exit_status": 1 if failed else 0,
    }


def _emit(doc: dict, fmt: str, output: str | None) -> None:
    if fmt == "json":
        text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    else:
        rows = doc["rows"]
        lines = []
        if rows:
            keys = sorted(rows[0])
            lines.append("\t".join(keys))
            for row in rows:
                lines.append(
                    "\t".join(_tsv_cell(row.get(k)) for k in keys)
                )
        text = "\n".join(lines) + ("\n" if lines else "")
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _tsv_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)


# ---------------------------------------------------------------------------
# h-series cache
# ---------------------------------------------------------------------------


def _cache_path(cache_dir: Path, spec: GroupSpec) -> Path:
    canonical = spec.canonical()
    stem = re.sub(r"[^A-Za-z0-9]+", "_", canonical).strip("_")
    digest = hashlib.sha256(canonical.encode()).hexdigest()[:12]
    return cache_dir / f"{stem}-{digest}.series"


def cache_get_or_compute(spec: GroupSpec, n_max: int, cache_dir: str | None) -> ExpSeries:
    """Load the h-series from cache when a sufficient truncation is stored,
    else compute and store it.  Corrupt entries are discarded with a
    warning and recomputed."""
    if cache_dir is None:
        return ExpSeries(tuple(hom_count_ints(spec, n_max)))
    cdir = Path(cache_dir)
    cdir.mkdir(parents=True, exist_ok=True)
    path = _cache_path(cdir, spec)
    if path.exists():
        try:
            cached, _ = load_exp_series(path.read_text(encoding="utf-8"))
            if cached.n_max >= n_max:
                return ExpSeries(cached.coeffs[: n_max + 1])
        except (ValueError, OSError) as exc:
            print(
                f"warning: discarding corrupt cache entry {path}: {exc}",
                file=sys.stderr,
            )
    series = ExpSeries(tuple(hom_count_ints(spec, n_max)))
    path.write_text(dump_exp_series(series, 0), encoding="utf-8")
    return series


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_analyze_series(args) -> int:
    s, file_p = load_log_series(Path(args.input).read_text(encoding="utf-8"))
    p = args.p if args.p is not None else file_p
    check_prime(p)
    kwargs = {}
    if args.l is not None:
        kwargs["l"] = args.l
    if args.m is not None:
        kwargs["m"] = args.m
    hyp = check_hypotheses(s, p, args.theorem, **kwargs)
    kind_tag = _BOUND_KIND_FOR_THEOREM[args.theorem]
    kind = BoundKind(kind_tag, p, l=args.l, m=args.m if kind_tag == "thm2.1" else None)
    h = exp_transform(s)
    n_hi = min(args.n_max, h.n_max) if args.n_max is not None else h.n_max
    report = verify_bounds(h, kind, 0, n_hi)
    failed = not (hyp.overall and report.ok)
    doc = _document(
        "analyze-series",
        {
            "input": args.input,
            "p": p,
            "theorem": args.theorem,
            "l": args.l,
            "m": args.m,
            "n_max": n_hi,
            "format": args.format,
        },
        s.n_max,
        [row.as_dict() for row in report.rows],
        {"bounds": report.summary(), "hypothesis": _hypothesis_dict(hyp)},
        failed,
    )
    _emit(doc, args.format, args.output)
    return 1 if failed else 0


def _tight_classes_claim(cls) -> list[int]:
    """Residue classes (mod the recurrence step) where tightness is claimed."""
    if cls.p2_exception:
        step = 2 ** (cls.half + 3)
        return [0, 2 ** (cls.half + 1), 2 ** (cls.half + 2)]
    return [0]


def _cmd_verify_group(args) -> int:
    spec = parse_group_spec(args.spec)
    if spec.variant != "abelian":
        raise ValueError("verify-group expects a single abelian term A[p;...]")
    t = spec.partition
    p = t.p
    if args.p is not None and args.p != p:
        raise ValueError(f"--p {args.p} contradicts the spec's prime {p}")
    n_max = args.n_max
    cls = classify_abelian_case(t)
    counts = finite_subgroup_counts(spec)
    s = counts.to_log_series(n_max)
    h = cache_get_or_compute(spec, n_max, args.cache_dir)

    if cls.p2_exception:
        kind = BoundKind("thm6.2", 2, partition=t.parts)
        hyp = check_hypotheses(s, 2, "thm2.7", l=cls.l)
    else:
        kind = BoundKind("thm6.1", p, partition=t.parts)
        hyp = check_hypotheses(s, p, "cor2.5", l=cls.l, m=cls.m)

    report = verify_bounds(h, kind)
    tight_failures: list[int] = []
    qrec_summary = None
    claimed = _tight_classes_claim(cls)
    if report.ok:
        q = q_sequence(h, kind)
        qrec = verify_q_recurrence(q, kind, s)
        qrec_summary = qrec.summary()
        step = qrec.step
        if qrec.multiplier == 0:
            claimed = []  # tightness precondition (non-congruence) fails
        tight = set(report.tight_set)
        for cls_residue in claimed:
            for n in range(cls_residue, n_max + 1, step):
                if n not in tight:
                    tight_failures.append(n)
    profile = difference_valuation_profile(counts, t)

    failed = (
        not hyp.overall
        or not report.ok
        or bool(tight_failures)
        or (qrec_summary is not None and qrec_summary["failures"])
        or not profile.ok
    )
    doc = _document(
        "verify-group",
        {"spec": spec.canonical(), "p": p, "n_max": n_max, "format": args.format},
        n_max,
        [row.as_dict() for row in report.rows],
        {
            "case": cls.case,
            "l": cls.l,
            "m": cls.m,
            "routed_to_p2_exception": cls.p2_exception,
            "bounds": report.summary(),
            "hypothesis": _hypothesis_dict(hyp),
            "q_recurrence": qrec_summary,
            "tightness_claimed_classes_mod_step": claimed,
            "tightness_failures": sorted(tight_failures),
            "difference_profile_failures": profile.failures,
        },
        failed,
    )
    _emit(doc, args.format, args.output)
    return 1 if failed else 0


def _cmd_verify_dihedral(args) -> int:
    m = args.m
    spec = parse_group_spec(f"D[{m}]")
    h = cache_get_or_compute(spec, args.n_max, args.cache_dir)
    kind = BoundKind("thm5.5", 2, dihedral_m=m)
    report = verify_bounds(h, kind)
    odd_primes = [int(x) for x in args.odd_primes.split(",")] if args.odd_primes else []
    exhibitions = {}
    for p in odd_primes:
        check_prime(p)
        first = None
        for n in range(args.odd_n_max + 1):
            if h[n].numerator % p != 0:
                first = n
                break
        exhibitions[str(p)] = first
    failed = not report.ok or any(v is None for v in exhibitions.values())
    doc = _document(
        "verify-dihedral",
        {
            "m": m,
            "n_max": args.n_max,
            "odd_primes": odd_primes,
            "odd_n_max": args.odd_n_max,
            "format": args.format,
        },
        args.n_max,
        [row.as_dict() for row in report.rows],
        {
            "bounds": report.summary(),
            "branch": "n/2" if m % 4 == 0 else "n/2 - n/4",
            "odd_prime_indivisible_at": exhibitions,
        },
        failed,
    )
    _emit(doc, args.format, args.output)
    return 1 if failed else 0


def _cmd_verify_permutations(args) -> int:
    base = frozenset(int(x) for x in args.base_set.split(","))
    rule = CycleRule(args.variant, args.p, args.l, base)
    report = verify_permutation_divisibility(rule, args.n_max)
    doc = _document(
        "verify-permutations",
        {
            "variant": args.variant,
            "p": args.p,
            "l": args.l,
            "A": sorted(base),
            "n_max": args.n_max,
            "format": args.format,
        },
        args.n_max,
        [{"n": n} for n in report.violations],
        report.summary(),
        not report.ok,
    )
    _emit(doc, args.format, args.output)
    return 0 if report.ok else 1


def _cmd_supercongruence(args) -> int:
    check_prime(args.p)
    instances = supercongruence_sweep(args.p, args.a_max)
    rows = [inst.summary() for inst in instances]
    failures = [
        {"a": i.a, "b": i.b, "c": i.c} for i in instances if not i.passed
    ]
    doc = _document(
        "supercongruence",
        {"p": args.p, "a_max": args.a_max, "format": args.format},
        None,
        rows,
        {"instances": len(instances), "failures": failures},
        bool(failures),
    )
    _emit(doc, args.format, args.output)
    return 1 if failures else 0


def _cmd_periodicity(args) -> int:
    spec = parse_group_spec(args.spec)
    check_prime(args.p)
    residues = subgroup_residues_mod_p(spec, args.n_max, args.p)
    result = periodicity_detect(residues[1:], args.confirm_window)
    doc = _document(
        "periodicity",
        {
            "spec": spec.canonical(),
            "p": args.p,
            "n_max": args.n_max,
            "confirm_window": args.confirm_window,
            "format": args.format,
        },
        args.n_max,
        [{"n": n, "residue": r} for n, r in enumerate(residues[1:], start=1)],
        result.summary(),
        not result.detected,
    )
    _emit(doc, args.format, args.output)
    return 0 if result.detected else 1


def _cmd_lemmas(args) -> int:
    report = floor_lemma_checks(args.p, args.l, args.i_max, args.j_max, j_min=args.j_min)
    doc = _document(
        "lemmas",
        {
            "p": args.p,
            "l": args.l,
            "i_max": args.i_max,
            "j_max": args.j_max,
            "j_min": args.j_min,
            "format": args.format,
        },
        None,
        [
            {"lemma": "floor-sum-gap", "i": i, "j": j}
            for i, j in report.ij_counterexamples
        ]
        + [
            {"lemma": "half-floor", "j": j, "x": str(x)}
            for j, x in report.half_counterexamples
        ],
        report.summary(),
        not report.ok,
    )
    _emit(doc, args.format, args.output)
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(parser):
    parser.add_argument("--format", choices=("json", "tsv"), default="json")
    parser.add_argument("--output", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dworklab",
        description="exact verification of p-adic valuation bounds for "
        "exponentials of power series and subgroup/homomorphism counts",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_an = sub.add_parser("analyze-series", help="check hypotheses and bounds on a series file")
    p_an.add_argument("--input", required=True, help="series file: header 'N p', lines 'n num den'")
    p_an.add_argument("--p", type=int, help="prime (default: from the file header)")
    p_an.add_argument("--theorem", required=True, choices=sorted(_BOUND_KIND_FOR_THEOREM))
    p_an.add_argument("--l", type=int)
    p_an.add_argument("--m", type=int)
    p_an.add_argument("--n-max", type=int, dest="n_max")
    _add_common(p_an)
    p_an.set_defaults(func=_cmd_analyze_series)

    p_vg = sub.add_parser("verify-group", help="verify bounds/tightness for an abelian p-group")
    p_vg.add_argument("--spec", required=True, help="abelian term, e.g. A[2;1,1]")
    p_vg.add_argument("--p", type=int, help="must match the spec's prime if given")
    p_vg.add_argument("--n-max", type=int, dest="n_max", default=512)
    p_vg.add_argument("--cache-dir", dest="cache_dir")
    _add_common(p_vg)
    p_vg.set_defaults(func=_cmd_verify_group)

    p_vd = sub.add_parser("verify-dihedral", help="verify the dihedral 2-adic bound")
    p_vd.add_argument("--m", type=int, required=True, help="dihedral group of order 2m")
    p_vd.add_argument("--n-max", type=int, dest="n_max", default=512)
    p_vd.add_argument("--odd-primes", dest="odd_primes", default="3,5")
    p_vd.add_argument("--odd-n-max", type=int, dest="odd_n_max", default=200)
    p_vd.add_argument("--cache-dir", dest="cache_dir")
    _add_common(p_vd)
    p_vd.set_defaults(func=_cmd_verify_dihedral)

    p_vp = sub.add_parser("verify-permutations", help="verify divisibility of restricted-cycle counts")
    p_vp.add_argument("--variant", required=True, choices=("pi1", "pi2", "pi3"))
    p_vp.add_argument("--p", type=int, required=True)
    p_vp.add_argument("--l", type=int, required=True)
    p_vp.add_argument("--A", dest="base_set", required=True, help="comma-separated base lengths")
    p_vp.add_argument("--n-max", type=int, dest="n_max", default=200)
    _add_common(p_vp)
    p_vp.set_defaults(func=_cmd_verify_permutations)

    p_sc = sub.add_parser("supercongruence", help="run the binomial-sum supercongruence sweep")
    p_sc.add_argument("--p", type=int, required=True)
    p_sc.add_argument("--a-max", type=int, dest="a_max", default=4)
    _add_common(p_sc)
    p_sc.set_defaults(func=_cmd_supercongruence)

    p_pd = sub.add_parser("periodicity", help="detect ultimate periodicity of s_n mod p")
    p_pd.add_argument("--spec", required=True, help="group spec, e.g. C[2]*C[16]")
    p_pd.add_argument("--p", type=int, required=True)
    p_pd.add_argument("--n-max", type=int, dest="n_max", default=400)
    p_pd.add_argument("--confirm-window", type=int, dest="confirm_window", default=3)
    _add_common(p_pd)
    p_pd.set_defaults(func=_cmd_periodicity)

    p_lm = sub.add_parser("lemmas", help="exhaustively check the floor-sum inequalities")
    p_lm.add_argument("--p", type=int, required=True)
    p_lm.add_argument("--l", type=int, required=True)
    p_lm.add_argument("--i-max", type=int, dest="i_max", default=200)
    p_lm.add_argument("--j-max", type=int, dest="j_max", default=50)
    p_lm.add_argument("--j-min", type=int, dest="j_min", default=0)
    _add_common(p_lm)
    p_lm.set_defaults(func=_cmd_lemmas)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
