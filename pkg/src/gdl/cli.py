"""Command-line front end.

Every subcommand prints exactly one JSON document on standard output and
exits 0 on success, 1 on a domain error (as a machine-readable error
object), 2 on a usage error.  Output is deterministic: keys are sorted
and prime scans run in a fixed order, so identical invocations produce
byte-identical documents.  Schemas for each subcommand ship in
schemas.json next to this module.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import backforth, cm, galois, kummer, lattices
from .arith import IntMatrix, is_prime, saturation
from .curves import (
    enumerate_points,
    parse_curve,
    parse_point,
    reduce_curve,
    trace_of_frobenius,
)
from .errors import GdlError, KummerDeficient, NoMatch
from .lattices import (
    CongruenceSL2,
    ExplicitGenerators,
    FullSL2,
    GeneratorPair,
    complement_morphism,
    orbit_count,
    transfer_exists,
    transfer_witness,
)

MAX_PRIME_BOUND = 10**6


def _check_prime(value):
    p = int(value)
    if p > MAX_PRIME_BOUND:
        raise argparse.ArgumentTypeError(f"prime must be <= {MAX_PRIME_BOUND}")
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{p} is not prime")
    return p


def _check_prime_bound(value):
    bound = int(value)
    if not 1 <= bound <= MAX_PRIME_BOUND:
        raise argparse.ArgumentTypeError(
            f"prime bound must be between 1 and {MAX_PRIME_BOUND}"
        )
    return bound


def _fraction_pair(x):
    frac = Fraction(x)
    return [frac.numerator, frac.denominator]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gdl",
        description="finite-level Galois, divisibility and lattice computations",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for sampled paths")
    parser.add_argument("--pretty", action="store_true", help="indent the JSON output")
    parser.add_argument("--out", metavar="FILE", help="also write the report to FILE")
    groups = parser.add_subparsers(dest="group", required=True)

    ec = groups.add_parser("ec", help="elliptic curve analysis").add_subparsers(
        dest="command", required=True
    )
    ec_count = ec.add_parser("count", help="point count and Frobenius trace at p")
    ec_count.add_argument("--curve", required=True, help='curve "a;b"')
    ec_count.add_argument("--prime", required=True, type=_check_prime)
    ec_image = ec.add_parser("image", help="mod-ell image evidence")
    ec_image.add_argument("--curve", required=True)
    ec_image.add_argument("--ell", required=True, type=_check_prime)
    ec_image.add_argument(
        "--prime-bound", dest="prime_bound", type=_check_prime_bound, default=1000
    )

    lat = groups.add_parser("lattice", help="generator-pair machinery").add_subparsers(
        dest="command", required=True
    )
    lat_orbits = lat.add_parser("orbits", help="orbit count on det-1 pairs")
    lat_orbits.add_argument("--modulus", required=True, type=int)
    lat_orbits.add_argument(
        "--level", type=int, help="congruence level (identity mod level subgroup)"
    )
    lat_orbits.add_argument("--gens", help="JSON list of 2x2 matrices")
    lat_transfer = lat.add_parser("transfer", help="congruence transfer between pairs")
    lat_transfer.add_argument("--modulus", required=True, type=int)
    lat_transfer.add_argument("--level", required=True, type=int)
    lat_transfer.add_argument(
        "--pair-a", dest="pair_a", required=True, help="JSON [[x0,y0],[x1,y1]]"
    )
    lat_transfer.add_argument("--pair-b", dest="pair_b", required=True)
    lat_complement = lat.add_parser(
        "complement", help="kernel-complement morphism of a sublattice"
    )
    lat_complement.add_argument(
        "--matrix", required=True, help="JSON rows of the basis matrix"
    )
    lat_complement.add_argument(
        "--saturate",
        action="store_true",
        help="saturate the columns before building the morphism",
    )

    cm_group = groups.add_parser("cm", help="imaginary quadratic orders").add_subparsers(
        dest="command", required=True
    )
    cm_units = cm_group.add_parser("units", help="unit group of O/NO")
    cm_units.add_argument("--disc", required=True, type=int)
    cm_units.add_argument("--modulus", required=True, type=int)
    cm_orbits = cm_group.add_parser("orbits", help="orbit count for a unit subgroup")
    cm_orbits.add_argument("--disc", required=True, type=int)
    cm_orbits.add_argument("--modulus", required=True, type=int)
    cm_orbits.add_argument(
        "--gens", default="[]", help="JSON list of [a, b] unit representatives"
    )

    kum = groups.add_parser("kummer", help="divisibility densities").add_subparsers(
        dest="command", required=True
    )
    kum_density = kum.add_parser("density", help="empirical vs model density")
    kum_density.add_argument("--curve", required=True)
    kum_density.add_argument("--point", required=True, help='point "x,y"')
    kum_density.add_argument("--ell", required=True, type=_check_prime)
    kum_density.add_argument(
        "--prime-bound", dest="prime_bound", type=_check_prime_bound, default=1000
    )

    bf = groups.add_parser("backforth", help="finite-model matching").add_subparsers(
        dest="command", required=True
    )
    bf_run = bf.add_parser("run", help="match two truncated extensions")
    bf_run.add_argument("--ell", required=True, type=_check_prime)
    bf_run.add_argument("--level", type=int, default=1)
    bf_run.add_argument("--rank", type=int, default=1)
    bf_run.add_argument("--model", default="full", help="full | trivial | cm:D | custom")
    bf_run.add_argument("--model-json", dest="model_json", help="custom model JSON")
    bf_run.add_argument("--ext-v", dest="ext_v", help="JSON extension data")
    bf_run.add_argument("--ext-w", dest="ext_w", help="JSON extension data")
    bf_census = bf.add_parser("census", help="orbit census of extension data")
    bf_census.add_argument("--ell", required=True, type=_check_prime)
    bf_census.add_argument("--level", type=int, default=1)
    bf_census.add_argument("--rank", type=int, default=1)
    bf_census.add_argument("--model", default="full")
    bf_census.add_argument("--model-json", dest="model_json")

    return parser


def _load_model(args, q, rank):
    if args.model == "custom":
        if not args.model_json:
            raise ValueError("custom model requires --model-json")
        raw = json.loads(args.model_json)
        return kummer.AffineGaloisModel(
            q,
            rank,
            tuple(tuple(m) for m in raw.get("linear", [])),
            tuple(tuple(tuple(v) for v in t) for t in raw.get("translations", [])),
        )
    ell, level = _factor_prime_power(q)
    return backforth.preset_model(args.model, ell, level, rank)


def _factor_prime_power(q):
    for ell in (2, 3, 5, 7, 11, 13):
        level = 0
        n = q
        while n % ell == 0:
            n //= ell
            level += 1
        if n == 1 and level:
            return ell, level
    raise ValueError(f"{q} is not a supported prime power")


def _parse_extension(raw, ell, level, rank):
    data = json.loads(raw)
    basis = data["basis"]
    division = [tuple(v) for v in data.get("division", [])]
    if len(division) != rank:
        raise ValueError(f"extension needs {rank} division vectors")
    q = ell**level
    return backforth.TruncatedExtension(
        ell, level, GeneratorPair(q, tuple(basis[0]), tuple(basis[1])), tuple(division)
    )


def _default_extensions(ell, level, rank):
    q = ell**level
    ident = GeneratorPair(q, (1, 0), (0, 1))
    ext_v = backforth.TruncatedExtension(
        ell, level, ident, tuple((0, 0) for _ in range(rank))
    )
    ext_w = backforth.TruncatedExtension(
        ell, level, ident, tuple((1 % q, (q - 1) % q) for _ in range(rank))
    )
    return ext_v, ext_w


def _run(args):
    if args.group == "ec" and args.command == "count":
        curve = parse_curve(args.curve)
        reduced = reduce_curve(curve, args.prime)
        return {
            "points": len(enumerate_points(reduced)),
            "a_p": trace_of_frobenius(curve, args.prime),
        }

    if args.group == "ec" and args.command == "image":
        curve = parse_curve(args.curve)
        report = galois.mod_ell_image(curve, args.ell, args.prime_bound)
        return report.to_json_dict()

    if args.group == "lattice" and args.command == "orbits":
        if args.gens:
            spec = ExplicitGenerators(tuple(tuple(m) for m in json.loads(args.gens)))
        elif args.level:
            spec = CongruenceSL2(args.level)
        else:
            spec = FullSL2()
        count, _ = orbit_count(args.modulus, spec)
        return {"orbits": count}

    if args.group == "lattice" and args.command == "transfer":
        raw_a = json.loads(args.pair_a)
        raw_b = json.loads(args.pair_b)
        pair_a = GeneratorPair(args.modulus, tuple(raw_a[0]), tuple(raw_a[1]))
        pair_b = GeneratorPair(args.modulus, tuple(raw_b[0]), tuple(raw_b[1]))
        exists = transfer_exists(pair_a, pair_b, args.level)
        witness = transfer_witness(pair_a, pair_b, args.level) if exists else None
        return {
            "transfer": exists,
            "witness": list(witness) if witness else None,
        }

    if args.group == "lattice" and args.command == "complement":
        basis = IntMatrix.from_rows(json.loads(args.matrix))
        if args.saturate:
            basis = saturation(basis)
        morphism = complement_morphism(basis)
        return {
            "ambient": basis.rows,
            "rank": basis.cols,
            "complement": morphism.to_rows(),
        }

    if args.group == "cm" and args.command == "units":
        units = cm.unit_group(cm.QuadOrder(args.disc), args.modulus)
        return {"unit_order": units.order}

    if args.group == "cm" and args.command == "orbits":
        order = cm.QuadOrder(args.disc)
        units = cm.unit_group(order, args.modulus)
        gens = [tuple(g) for g in json.loads(args.gens)]
        index = cm.orbit_count_cm(order, args.modulus, gens)
        subgroup = cm.subgroup_closure(order, args.modulus, gens)
        reps = {
            min(order.mul(u, h, args.modulus) for h in subgroup)
            for u in units.representatives
        }
        return {
            "disc": args.disc,
            "modulus": args.modulus,
            "unit_order": units.order,
            "index": index,
            "orbits": [list(rep) for rep in sorted(reps)],
        }

    if args.group == "kummer" and args.command == "density":
        curve = parse_curve(args.curve)
        point = parse_point(args.point, curve)
        empirical, samples = kummer.empirical_density(
            curve, point, args.ell, args.prime_bound
        )
        model = kummer.model_density(kummer.full_affine_model(args.ell, 1))
        sigma = (float(model * (1 - model)) / samples) ** 0.5
        distance = abs(float(empirical) - float(model)) / sigma
        return {
            "ell": args.ell,
            "primes": samples,
            "divisible_count": empirical.numerator
            * (samples // empirical.denominator),
            "empirical": _fraction_pair(empirical),
            "model": _fraction_pair(model),
            "sigma_distance": round(distance, 6),
            "verdict": "full" if distance <= 3.0 else "deficient",
        }

    if args.group == "backforth" and args.command == "run":
        q = args.ell**args.level
        model = _load_model(args, q, args.rank)
        if args.ext_v and args.ext_w:
            ext_v = _parse_extension(args.ext_v, args.ell, args.level, args.rank)
            ext_w = _parse_extension(args.ext_w, args.ell, args.level, args.rank)
        else:
            ext_v, ext_w = _default_extensions(args.ell, args.level, args.rank)
        try:
            result = backforth.run_match(ext_v, ext_w, model)
        except NoMatch as exc:
            return {
                "match": False,
                "failure": {
                    "kind": "no_match",
                    "det_left": exc.det_left,
                    "det_right": exc.det_right,
                },
            }
        except KummerDeficient as exc:
            return {
                "match": False,
                "failure": {
                    "kind": "kummer_deficient",
                    "step": exc.step,
                    "gap": list(exc.gap),
                },
            }
        return {
            "match": True,
            "h": list(result.h_matrix),
            "sigma_linear": list(result.sigma_linear),
            "sigma_translation": [list(v) for v in result.sigma_translation],
            "corrections": [list(v) for v in result.corrections],
            "trace": list(result.trace),
        }

    if args.group == "backforth" and args.command == "census":
        q = args.ell**args.level
        model = _load_model(args, q, args.rank)
        count, _ = backforth.orbit_census(args.ell, args.level, args.rank, model)
        return {
            "ell": args.ell,
            "level": args.level,
            "rank": args.rank,
            "model": args.model,
            "orbits": count,
        }

    raise ValueError(f"unhandled command {args.group} {args.command}")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = _run(args)
        status = 0
    except GdlError as exc:
        report = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        status = 1
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        report = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        status = 1
    if args.pretty:
        text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    else:
        text = json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
