"""``mubnet`` command-line interface.

Every command writes JSON (sorted keys, stable float formatting) to stdout,
or to ``--out`` with a short summary on stdout.  Exit status: 0 when the
verdict or validation passes, 1 when it fails, 2 for usage errors and
malformed input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .appendix import sweep
from .classical import (
    NetError,
    affine_plane,
    enumerate_transversals,
    fake_parallel_class,
    net_from_dict,
    net_to_dict,
    remove_classes,
)
from .knet import knet_from_dict, validate_knet
from .mubs import BasisError, mubs_from_dict, mubs_to_dict
from .nice import (
    MubConstructionError,
    Subgroup,
    SubgroupError,
    basis_from_descriptor,
    mubs_from_subgroups,
    parse_catalog_spec,
    prime_square_completion,
    standard_weyl_subgroups,
    tensor_weyl,
    weyl_basis,
)
from .rigidity import (
    Certificate,
    mub_certificate,
    nice_extension_scan,
    rigidity_search_certificate,
    uncompletable_example,
    unbiased_vector_search,
    verify_counterexample,
    weak_unextendibility_certificate,
)

DEFAULT_SEED = 42
DEFAULT_TOL = 1e-9


class UsageError(Exception):
    pass


class Outcome:
    def __init__(self, payload: dict, ok: bool = True, text: Optional[str] = None):
        self.payload = payload
        self.ok = ok
        self.text = text


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise UsageError(f"{path}: expected a JSON object")
    return obj


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _cert_text(cert: dict) -> str:
    lines = [f"{cert['kind']}: {'PASS' if cert['verdict'] else 'FAIL'} ({cert['evidence']})"]
    for h in cert["hypotheses"]:
        lines.append(f"  [{'ok' if h['pass'] else 'FAIL'}] {h['name']}  residual={h['residual']:.3e}")
    return "\n".join(lines)


def _generic_text(obj, indent: str = "") -> str:
    lines = []
    for key in sorted(obj):
        val = obj[key]
        if isinstance(val, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_generic_text(val, indent + "  "))
        elif isinstance(val, list) and len(val) > 8:
            lines.append(f"{indent}{key}: [{len(val)} items]")
        else:
            lines.append(f"{indent}{key}: {val}")
    return "\n".join(lines)


def _cert_outcome(cert: Certificate) -> Outcome:
    d = cert.to_dict()
    return Outcome(d, cert.verdict, _cert_text(d))


# ---------------------------------------------------------------------------
# commands


def cmd_weyl(args) -> Outcome:
    basis = weyl_basis(args.d)
    checks = basis.check_axioms()
    ok = all(c["pass"] for c in checks)
    subs = standard_weyl_subgroups(args.d)
    payload = {"basis": basis.descriptor, "axioms": checks,
               "subgroups": [H.to_dict() for H in subs]}
    text = "\n".join([f"weyl d={args.d}"] + [f"  [{'ok' if c['pass'] else 'FAIL'}] {c['name']} "
                                             f"residual={c['residual']:.3e}" for c in checks])
    return Outcome(payload, ok, text)


def cmd_tensor_weyl(args) -> Outcome:
    basis = tensor_weyl(args.p)
    checks = basis.check_axioms()
    ok = all(c["pass"] for c in checks)
    text = "\n".join([f"tensor-weyl p={args.p}"] + [f"  [{'ok' if c['pass'] else 'FAIL'}] {c['name']} "
                                                     f"residual={c['residual']:.3e}" for c in checks])
    return Outcome({"basis": basis.descriptor, "axioms": checks}, ok, text)


def cmd_plane(args) -> Outcome:
    if args.fake_class:
        fc = fake_parallel_class(args.q, args.D)
        net = fc.plane
    else:
        net = affine_plane(args.q, args.D)
    if args.drop:
        net = remove_classes(net, _ints(args.drop))
    payload = net_to_dict(net)
    if args.fake_class:
        payload["fake_class"] = {"p": fc.p, "D": fc.D, "cosets": [list(c) for c in fc.cosets],
                                 "transversed": list(fc.transversed),
                                 "not_transversed": list(fc.not_transversed)}
    return Outcome(payload, True, net.render())


def cmd_transversals(args) -> Outcome:
    net = net_from_dict(_load(args.input))
    bad = net.violations()
    if bad:
        raise UsageError("input is not a valid net: " + bad[0])
    trans = enumerate_transversals(net)
    payload = {"d": net.order, "k": net.k, "count": len(trans),
               "transversals": [list(t) for t in trans]}
    text = f"{len(trans)} transversal(s)\n" + "\n".join(" ".join(map(str, t)) for t in trans)
    return Outcome(payload, True, text)


def _subgroups_for(args):
    spec = args.subgroups
    if spec == "weyl":
        return weyl_basis(args.p), standard_weyl_subgroups(args.p)
    basis = tensor_weyl(args.p)
    if spec == "prime-square":
        return basis, prime_square_completion(args.p, args.D)
    return basis, parse_catalog_spec(spec, args.p, args.D)


def cmd_mubs(args) -> Outcome:
    basis, subs = _subgroups_for(args)
    try:
        coll = mubs_from_subgroups(basis, subs, seed=args.seed)
    except (MubConstructionError, SubgroupError) as exc:
        payload = {"error": str(exc), "basis": basis.descriptor}
        if getattr(exc, "witness", None) is not None:
            payload["witness"] = exc.witness
        return Outcome(payload, False, f"construction failed: {exc}")
    payload = mubs_to_dict(coll)
    payload["basis"] = basis.descriptor
    worst, _ = coll.max_bias()
    return Outcome(payload, True, f"{len(coll)} bases in C^{coll.d}, max bias {worst:.3e}")


def cmd_verify(args) -> Outcome:
    obj = _load(args.input)
    if "bases" in obj:
        try:
            coll = mubs_from_dict(obj)
        except BasisError as exc:
            d = {"kind": "mub_valid", "verdict": False, "error": str(exc)}
            return Outcome(d, False, f"mub_valid: FAIL ({exc})")
        return _cert_outcome(mub_certificate(coll, args.tol))
    if "shape" in obj:
        summary = validate_knet(knet_from_dict(obj), args.tol)
        d = {"kind": "generalized_net", **summary.to_dict()}
        return Outcome(d, summary.valid, _generic_text(d))
    if "classes" in obj and "d" in obj:
        net = net_from_dict(obj)
        bad = net.violations()
        d = {"kind": "classical_net", "d": net.order, "k": net.k, "valid": not bad,
             "complete": not bad and net.k == net.order + 1, "violations": bad}
        return Outcome(d, not bad, _generic_text(d))
    raise UsageError("unrecognised input: expected a MUB collection, a net over an algebra or a classical net")


def cmd_search(args) -> Outcome:
    coll = mubs_from_dict(_load(args.input))
    if args.keep:
        keep = _ints(args.keep)
        if any(i < 0 or i >= len(coll) for i in keep):
            raise UsageError(f"--keep index out of range 0..{len(coll) - 1}")
        rest = [i for i in range(len(coll)) if i not in set(keep)]
        cert = rigidity_search_certificate(coll.subset(keep), coll.subset(rest), args.starts,
                                           args.seed, jobs=args.jobs)
        return _cert_outcome(cert)
    report = unbiased_vector_search(coll, args.starts, args.seed, jobs=args.jobs)
    d = report.to_dict()
    text = (f"{len(report.minima)} distinct minima from {args.starts} starts "
            f"({len(report.failures)} not converged); "
            f"{len(report.near_zero())} with residual <= 1e-8")
    return Outcome(d, True, text)


def cmd_counterexample(args) -> Outcome:
    return _cert_outcome(verify_counterexample(args.p, args.D, tol=args.tol))


def cmd_uncompletable(args) -> Outcome:
    return _cert_outcome(uncompletable_example(args.p, args.variant, args.D))


def cmd_extension_scan(args) -> Outcome:
    obj = _load(args.input)
    if "basis" not in obj or "subgroups" not in obj:
        raise UsageError("extension-scan input needs 'basis' and 'subgroups'")
    basis = basis_from_descriptor(obj["basis"])
    subs = [Subgroup.from_dict({"moduli": list(basis.group.moduli), **s}) for s in obj["subgroups"]]
    ext = nice_extension_scan(basis, subs)
    cert = weak_unextendibility_certificate(basis, subs)
    valid = all(h["pass"] for h in cert.hypotheses if h["name"].startswith("collection_"))
    payload = {"basis": basis.descriptor, "extensions": [H.to_dict() for H in ext],
               "certificate": cert.to_dict()}
    text = f"{len(ext)} nice extension(s)\n" + _cert_text(cert.to_dict())
    return Outcome(payload, valid, text)


def cmd_appendix(args) -> Outcome:
    if args.dmax < 4:
        raise UsageError("--dmax must be at least 4")
    rep = sweep(args.dmax, args.prop_dmax)
    d = rep.to_dict()
    text = (f"lemma A1: {rep.lemma_a1_checked} checked, {len(rep.lemma_a1_violations)} violations\n"
            f"lemma A2: {rep.lemma_a2_checked} checked, {len(rep.lemma_a2_violations)} violations\n"
            f"divisor gap: {rep.prop_a3_checked} checked, {len(rep.prop_a3_violations)} violations")
    return Outcome(d, rep.passed, text)


# ---------------------------------------------------------------------------
# parser


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_TOL)
    common.add_argument("--seed", type=int, default=None,
                        help=f"random seed (default: $MUBNET_SEED or {DEFAULT_SEED})")
    common.add_argument("--out", default=None, help="write JSON here and print a summary")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--jobs", type=_positive_int, default=1)

    parser = argparse.ArgumentParser(prog="mubnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("weyl", parents=[common], help="discrete Weyl basis on C^d")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_weyl)

    p = sub.add_parser("tensor-weyl", parents=[common], help="Weyl (x) Weyl on C^{p^2}")
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=cmd_tensor_weyl)

    p = sub.add_parser("plane", parents=[common], help="affine plane of order q")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--D", type=int, default=None)
    p.add_argument("--fake-class", action="store_true")
    p.add_argument("--drop", default=None, help="comma-separated class indices")
    p.set_defaults(func=cmd_plane)

    p = sub.add_parser("transversals", parents=[common], help="enumerate transversals of a net")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_transversals)

    p = sub.add_parser("mubs", parents=[common], help="MUBs from subgroups of a nice error basis")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--subgroups", required=True,
                   help="'weyl', 'prime-square' or a catalogue list such as 'R:0,1;R_inf;S'")
    p.add_argument("--D", type=int, default=None)
    p.set_defaults(func=cmd_mubs)

    p = sub.add_parser("verify", parents=[common], help="validate a MUB collection or net")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", parents=[common], help="search for unbiased unit vectors")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--starts", type=_positive_int, default=200)
    p.add_argument("--keep", default=None,
                   help="search against these bases only and match results to the others")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("counterexample", parents=[common], help="prime-square tightness example")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--D", type=int, default=None)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("uncompletable", parents=[common], help="uncompletability certificate")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--variant", choices=("T", "szanto"), default="T")
    p.add_argument("--D", type=int, default=None)
    p.set_defaults(func=cmd_uncompletable)

    p = sub.add_parser("extension-scan", parents=[common], help="nice extensions of a collection")
    p.add_argument("--in", dest="input", required=True)
    p.set_defaults(func=cmd_extension_scan)

    p = sub.add_parser("appendix", parents=[common], help="inequality and divisor sweeps")
    p.add_argument("--dmax", type=int, required=True)
    p.add_argument("--prop-dmax", type=int, default=None)
    p.set_defaults(func=cmd_appendix)
    return parser


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("MUBNET_SEED")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"MUBNET_SEED must be an integer, got {env!r}") from exc
    return DEFAULT_SEED


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.seed = _resolve_seed(args.seed)
        outcome = args.func(args)
    except UsageError as exc:
        print(f"mubnet: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError, NetError) as exc:
        print(f"mubnet: error: {exc}", file=sys.stderr)
        return 2

    body = _dump(outcome.payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(body)
        summary = outcome.text or _generic_text(outcome.payload)
        sys.stdout.write(f"{summary}\nwrote {args.out}\n")
    elif args.format == "text":
        sys.stdout.write((outcome.text or _generic_text(outcome.payload)) + "\n")
    else:
        sys.stdout.write(body)
    return 0 if outcome.ok else 1


if __name__ == "__main__":
    sys.exit(main())
