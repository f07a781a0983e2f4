"""Batch command-line front end.

Commands: decompose, classify, rcf, verify, demo-obstruction.  Structured
output is a line-oriented ``key: value`` document (values in JSON), schema
"nilclean-cert/1"; multiple documents in one stream are separated by blank
lines.  Exit codes are stable: 0 success, 2 parse error, 3 unsupported ring,
4 verification failure, 5 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import itertools
import json
import re
import sys
from typing import Optional, Sequence

import numpy as np

from . import classifier
from .classifier import (
    RingDescriptor,
    ZmFactor,
    min_nilpotent_index_over_decompositions,
    parse_ring_descriptor,
)
from .decompose import decompose, decompose_triangular
from .errors import (
    DomainError,
    InputError,
    NilcleanError,
    ResourceCapError,
    UnsupportedRingError,
)
from .frobenius import RcfResult, rcf, verify_rcf
from .matrix import (
    DecompositionCertificate,
    MatrixRing,
    RingMatrix,
    verify_certificate,
)
from .residue import factorize

SCHEMA = "nilclean-cert/1"

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_UNSUPPORTED = 3
EXIT_VERIFY = 4
EXIT_RESOURCE = 5

EXHAUSTIVE_CAP = 10**6


# ---------------------------------------------------------------------------
# Document serialization
# ---------------------------------------------------------------------------

def emit_document(pairs: Sequence[tuple[str, object]]) -> str:
    lines = []
    for key, value in pairs:
        rendered = value if isinstance(value, str) else json.dumps(value)
        lines.append(f"{key}: {rendered}")
    return "\n".join(lines) + "\n"


def parse_document(text: str) -> dict:
    doc: dict = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if ": " not in line and not line.endswith(":"):
            raise InputError(f"line {lineno} is not 'key: value': {line!r}")
        key, _, value = line.partition(":")
        key = key.strip()
        value = value.strip()
        try:
            doc[key] = json.loads(value)
        except json.JSONDecodeError:
            doc[key] = value
    if not doc:
        raise InputError("empty document")
    return doc


def split_documents(text: str) -> list[dict]:
    chunks = re.split(r"\n\s*\n", text.strip())
    return [parse_document(c) for c in chunks if c.strip()]


def _ring_label(ring: MatrixRing) -> str:
    return ring.describe()


def parse_matrix_ring(text: str) -> MatrixRing:
    """Entry-ring descriptor for matrices: "Z12" or "Z6[x]/(x^2)"."""
    s = text.replace(" ", "")
    mobj = re.fullmatch(r"Z(\d+)\[x\]/\(x\^(\d+)\)", s)
    if mobj:
        return MatrixRing(factorize(int(mobj.group(1))), int(mobj.group(2)))
    mobj = re.fullmatch(r"Z(\d+)", s)
    if mobj:
        return MatrixRing(factorize(int(mobj.group(1))))
    raise InputError(f"cannot parse matrix ring {text!r}")


def certificate_to_doc(cert: DecompositionCertificate) -> str:
    ring = cert.a.ring
    return emit_document(
        [
            ("schema", SCHEMA),
            ("kind", "certificate"),
            ("ring", _ring_label(ring)),
            ("modulus", ring.m),
            ("trunc-degree", ring.d),
            ("n", cert.a.n),
            ("A", cert.a.to_rows()),
            ("E", cert.e.to_rows()),
            ("F", cert.f.to_rows()),
            ("W", cert.w.to_rows()),
            ("nilpotency-exponent", cert.nilpotency_exponent),
            ("case-tags", list(cert.case_tags)),
            ("verified", cert.verified),
        ]
    )


def certificate_from_doc(doc: dict) -> DecompositionCertificate:
    try:
        ring = MatrixRing(factorize(int(doc["modulus"])), int(doc.get("trunc-degree", 1)))
        mats = {key: RingMatrix.from_rows(doc[key], ring) for key in ("A", "E", "F", "W")}
        exponent = int(doc["nilpotency-exponent"])
        tags = tuple(doc.get("case-tags", []))
    except KeyError as missing:
        raise InputError(f"certificate document lacks field {missing}")
    except (TypeError, ValueError) as bad:
        raise InputError(f"malformed certificate document: {bad}")
    n = mats["A"].n
    if any(mat.n != n for mat in mats.values()):
        raise InputError("certificate matrices disagree in dimension")
    if "n" in doc and int(doc["n"]) != n:
        raise InputError("declared dimension does not match the matrices")
    return DecompositionCertificate(
        mats["A"], mats["E"], mats["F"], mats["W"], exponent, tags
    )


def rcf_to_doc(a: RingMatrix, result: RcfResult) -> str:
    return emit_document(
        [
            ("schema", SCHEMA),
            ("kind", "rcf"),
            ("modulus", a.ring.m),
            ("n", a.n),
            ("A", a.to_rows()),
            ("blocks", [list(b.poly.coeffs) for b in result.blocks]),
            ("P", result.transform.to_rows()),
            ("P-inv", result.transform_inv.to_rows()),
            ("verified", True),
        ]
    )


def _element_json(ring: RingDescriptor, element: tuple) -> list:
    out = []
    for fac, value in zip(ring.factors, element):
        if isinstance(fac, classifier.MatFactor):
            n = fac.n
            out.append([list(value[i * n : (i + 1) * n]) for i in range(n)])
        elif isinstance(fac, classifier.TruncFactor):
            out.append(list(value))
        else:
            out.append(value)
    return out


def report_to_doc(report: classifier.PropertyReport) -> str:
    pairs: list[tuple[str, object]] = [
        ("schema", SCHEMA),
        ("kind", "report"),
        ("ring", report.ring.describe()),
        ("property", report.property),
        ("holds", report.holds),
    ]
    if report.witness_element is not None:
        pairs.append(("witness-element", _element_json(report.ring, report.witness_element)))
    if report.witness_parts is not None:
        parts = [
            _element_json(report.ring, part) if isinstance(part, tuple) else part
            for part in report.witness_parts
        ]
        pairs.append(("witness-parts", parts))
    if report.counterexample is not None:
        cex = report.counterexample
        if report.property.startswith("generalized-"):
            # pairwise identity: the counterexample is a pair of elements
            pairs.append(("counterexample", [_element_json(report.ring, c) for c in cex]))
        else:
            pairs.append(("counterexample", _element_json(report.ring, cex)))
    return emit_document(pairs)


# ---------------------------------------------------------------------------
# Input handling
# ---------------------------------------------------------------------------

def _read_input(args) -> str:
    if args.input:
        with open(args.input, "r", encoding="utf-8") as handle:
            return handle.read()
    return sys.stdin.read()


def _parse_matrix_input(text: str, args) -> RingMatrix:
    """Accept either a key-value matrix document or plain whitespace rows."""
    stripped = text.strip()
    if not stripped:
        raise InputError("empty matrix input")
    if ":" in stripped.splitlines()[0]:
        doc = parse_document(stripped)
        if "A" not in doc:
            raise InputError("matrix document lacks field 'A'")
        if "ring" in doc:
            ring = parse_matrix_ring(str(doc["ring"]))
        elif "modulus" in doc:
            ring = MatrixRing(factorize(int(doc["modulus"])), int(doc.get("trunc-degree", 1)))
        else:
            ring = _ring_from_flags(args)
        return RingMatrix.from_rows(doc["A"], ring)
    ring = _ring_from_flags(args)
    if ring.d != 1:
        raise InputError("plain whitespace matrices support only Z_m entries")
    rows = []
    for line in stripped.splitlines():
        line = line.strip()
        if not line:
            continue
        try:
            rows.append([int(tok) for tok in line.split()])
        except ValueError:
            raise InputError(f"bad matrix row: {line!r}")
    return RingMatrix.from_rows(rows, ring)


def _ring_from_flags(args) -> MatrixRing:
    if getattr(args, "ring", None):
        return parse_matrix_ring(args.ring)
    if getattr(args, "modulus", None):
        return MatrixRing(factorize(args.modulus))
    raise InputError("no ring given: pass --modulus or --ring (or a matrix document)")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_decompose(args) -> int:
    if args.exhaustive:
        return _decompose_exhaustive(args)
    a = _parse_matrix_input(_read_input(args), args)
    cert = decompose_triangular(a) if args.triangular else decompose(a)
    if args.format == "plain":
        print(f"ring: {a.ring.describe()}  n: {a.n}")
        for name, mat in (("A", cert.a), ("E", cert.e), ("F", cert.f), ("W", cert.w)):
            print(f"{name}: {mat.to_rows()}")
        print(f"nilpotency-exponent: {cert.nilpotency_exponent}")
        print(f"case-tags: {list(cert.case_tags)}")
        print(f"verified: {str(cert.verified).lower()}")
    else:
        sys.stdout.write(certificate_to_doc(cert))
    return EXIT_OK


def _decompose_exhaustive(args) -> int:
    n, m = args.exhaustive
    ring = MatrixRing(factorize(m))
    count = m ** (n * n)
    if count > EXHAUSTIVE_CAP:
        raise ResourceCapError(
            f"exhaustive sweep of M_{n}(Z_{m}) has {count} matrices, over the cap"
        )
    emitted = 0
    first = True
    for entries in itertools.product(range(m), repeat=n * n):
        mat = RingMatrix(ring, np.array(entries, dtype=np.int64).reshape(1, n, n))
        cert = decompose(mat)
        if not first:
            sys.stdout.write("\n")
        sys.stdout.write(certificate_to_doc(cert))
        first = False
        emitted += 1
    print(f"exhaustive sweep: {emitted} verified certificates over M_{n}(Z_{m})",
          file=sys.stderr)
    return EXIT_OK


_PROPERTY_RUNNERS = {
    "two-nil-clean": classifier.is_two_nil_clean,
    "nil-clean": classifier.is_nil_clean,
    "weakly-nil-clean": classifier.is_weakly_nil_clean,
    "strongly-two-nil-clean": classifier.is_strongly_two_nil_clean,
    "tripotent": classifier.is_tripotent,
    "two-boolean": classifier.is_two_boolean,
    "strongly-sit": classifier.is_strongly_sit,
}

_GENERALIZED_RE = re.compile(r"generalized-(\d+)-like")


def cmd_classify(args) -> int:
    ring = parse_ring_descriptor(args.ring_descriptor)
    names = [name.strip() for name in args.properties.split(",") if name.strip()]
    if not names:
        raise InputError("no properties requested")
    reports = []
    for name in names:
        runner = _PROPERTY_RUNNERS.get(name)
        if runner is not None:
            reports.append(runner(ring))
            continue
        mobj = _GENERALIZED_RE.fullmatch(name)
        if mobj:
            reports.append(classifier.is_generalized_n_like(ring, int(mobj.group(1))))
            continue
        raise InputError(f"unknown property {name!r}")
    if args.format == "plain":
        for report in reports:
            print(f"{report.property}: {str(report.holds).lower()}")
    else:
        sys.stdout.write("\n".join(report_to_doc(r) for r in reports))
    return EXIT_OK


def cmd_rcf(args) -> int:
    a = _parse_matrix_input(_read_input(args), args)
    if not a.ring.is_prime_field():
        raise InputError(
            f"rcf needs a prime modulus; {a.ring.describe()} is not a prime field"
        )
    result = rcf(a)
    if not verify_rcf(a, result):
        raise NilcleanError("canonical form failed verification")  # pragma: no cover
    if args.format == "plain":
        print(f"modulus: {a.ring.m}  n: {a.n}")
        print(f"blocks: {[list(b.poly.coeffs) for b in result.blocks]}")
        print(f"P: {result.transform.to_rows()}")
        print(f"P-inv: {result.transform_inv.to_rows()}")
    else:
        sys.stdout.write(rcf_to_doc(a, result))
    return EXIT_OK


def cmd_verify(args) -> int:
    docs = split_documents(_read_input(args))
    certs = [d for d in docs if d.get("kind", "certificate") == "certificate"]
    if not certs:
        raise InputError("no certificate documents in input")
    status = EXIT_OK
    for index, doc in enumerate(certs):
        cert = certificate_from_doc(doc)
        if verify_certificate(cert):
            print(f"certificate {index}: ok")
        else:
            print(f"certificate {index}: FAILED check: {cert.failure}")
            status = EXIT_VERIFY
    return status


def cmd_demo_obstruction(args) -> int:
    k = args.k
    if not (2 <= k <= 5):
        raise InputError("chain length must be between 2 and 5")
    rows = []
    for j in range(2, k + 1):
        ring = RingDescriptor(tuple(ZmFactor(2**i) for i in range(1, j + 1)))
        doubled = tuple(2 % (2**i) for i in range(1, j + 1))
        tripled = tuple(3 % (2**i) for i in range(1, j + 1))
        rows.append(
            (
                j,
                ring.describe(),
                list(doubled),
                min_nilpotent_index_over_decompositions(ring, doubled),
                list(tripled),
                min_nilpotent_index_over_decompositions(ring, tripled),
            )
        )
    if args.format == "plain":
        print("chain  ring                 2*1 element        min-exp  3*1 element        min-exp")
        for j, label, dbl, kd, trp, kt in rows:
            print(f"{j:<6} {label:<20} {str(tuple(dbl)):<18} {kd:<8} {str(tuple(trp)):<18} {kt}")
        print("the doubled identity always splits as 1 + 1 + 0; the tripled identity")
        print("forces w = 2 in every Z_{2^i} factor, so its index grows with the chain")
    else:
        sys.stdout.write(
            emit_document(
                [
                    ("schema", SCHEMA),
                    ("kind", "obstruction-table"),
                    ("columns", ["chain-length", "ring", "doubled-element",
                                 "doubled-min-exponent", "tripled-element",
                                 "tripled-min-exponent"]),
                    ("rows", [list(r) for r in rows]),
                ]
            )
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nilclean",
        description="Constructive two-idempotents-plus-nilpotent matrix "
        "decompositions over Z_m with machine-verified certificates, plus a "
        "brute-force classifier for small finite rings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", metavar="FILE", help="read input from FILE instead of stdin")
        p.add_argument("--format", choices=("plain", "doc"), default="doc",
                       help="output format (default: doc)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for randomized batch modes (fixed default)")

    p = sub.add_parser("decompose", help="decompose a matrix as E + F + W")
    common(p)
    p.add_argument("--modulus", type=int, help="entry ring modulus m for plain input")
    p.add_argument("--ring", help='entry ring, e.g. "Z12" or "Z6[x]/(x^2)"')
    p.add_argument("--triangular", action="store_true",
                   help="use the triangular-ring construction (input must be upper triangular)")
    p.add_argument("--exhaustive", nargs=2, type=int, metavar=("N", "M"),
                   help="emit certificates for every matrix in M_N(Z_M)")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("classify", help="decide ring properties by brute force")
    common(p)
    p.add_argument("ring_descriptor", help='e.g. "Z6", "Z3xZ3", "M2(Z2)", "Z2[x]/(x^3)"')
    p.add_argument("properties", help="comma-separated property names")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("rcf", help="Frobenius form with explicit transform over GF(p)")
    common(p)
    p.add_argument("--modulus", type=int, help="prime modulus for plain input")
    p.add_argument("--ring", help='prime field, e.g. "Z3"')
    p.set_defaults(func=cmd_rcf)

    p = sub.add_parser("verify", help="re-verify certificate documents")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("demo-obstruction", help="minimal nilpotency indices over "
                       "decompositions in chains Z_2 x Z_4 x ... x Z_{2^k}")
    common(p)
    p.add_argument("k", type=int, help="chain length (2..5)")
    p.set_defaults(func=cmd_demo_obstruction)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedRingError as err:
        print(f"unsupported ring: {err}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ResourceCapError as err:
        print(f"resource cap: {err}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InputError, DomainError) as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_PARSE


def entrypoint() -> None:  # console script target
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
