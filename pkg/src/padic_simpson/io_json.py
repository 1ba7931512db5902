"""Instance files: JSON with decimal/rational scalar strings.

One wire format for every kind ("higgs", "rep", "algebra", "twist"), all
versioned with "format": 1.  Scalars serialise as "v:u" (valuation, unit
part) or plain decimal integers or rationals "a/b" with b coprime to p;
each file carries one global precision.  Canonical dumps are byte-stable:
sorted keys, fixed separators, trailing newline.
"""

from __future__ import annotations

import hashlib
import json

from .algebra import FinAlgebra, Morphism
from .context import PrimeContext
from .errors import PadicError, ParseError
from .higgs import HiggsModule, SmallRep
from .matrix import PadicMatrix
from .scalar import PadicScalar

FORMAT = 1


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def file_hash(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _scalar_str(x: PadicScalar) -> str:
    return x.to_string()


def _matrix_grid(m: PadicMatrix):
    return [[_scalar_str(x) for x in row] for row in m.entries]


def _parse_matrix(ctx, grid, what):
    try:
        return PadicMatrix.from_rows(
            ctx, [[PadicScalar.parse(ctx, s) for s in row] for row in grid]
        )
    except (ValueError, TypeError, PadicError) as exc:
        raise ParseError("bad scalar in %s: %s" % (what, exc))


def _context_from(obj) -> PrimeContext:
    try:
        return PrimeContext(int(obj["p"]), int(obj["precision"]))
    except KeyError as exc:
        raise ParseError("missing field %s" % exc)


def _base_header(kind, ctx, metadata):
    out = {
        "format": FORMAT,
        "kind": kind,
        "p": ctx.p,
        "precision": ctx.default_precision,
    }
    if metadata:
        out["metadata"] = metadata
    return out


def _check_header(obj, kind):
    if not isinstance(obj, dict):
        raise ParseError("instance file must hold a JSON object")
    if obj.get("format") != FORMAT:
        raise ParseError("unsupported format %r" % obj.get("format"))
    if kind is not None and obj.get("kind") != kind:
        raise ParseError("expected a %r file, found %r" % (kind, obj.get("kind")))


def higgs_to_json(H: HiggsModule, metadata=None):
    out = _base_header("higgs", H.ctx, metadata)
    out["d"] = H.d
    out["rank"] = H.rank
    out["theta"] = [_matrix_grid(t) for t in H.theta]
    return out


def higgs_from_json(obj, precision=None) -> HiggsModule:
    _check_header(obj, "higgs")
    ctx = _context_from(obj if precision is None else {**obj, "precision": precision})
    theta = [_parse_matrix(ctx, g, "theta[%d]" % i) for i, g in enumerate(obj["theta"])]
    H = HiggsModule.create(ctx, theta)
    if H.d != obj.get("d") or H.rank != obj.get("rank"):
        raise ParseError("declared d/rank disagree with the component matrices")
    return H


def rep_to_json(V: SmallRep, metadata=None):
    out = _base_header("rep", V.ctx, metadata)
    out["d"] = V.d
    out["rank"] = V.rank
    out["rho"] = [_matrix_grid(r) for r in V.rho]
    return out


def rep_from_json(obj, precision=None) -> SmallRep:
    _check_header(obj, "rep")
    ctx = _context_from(obj if precision is None else {**obj, "precision": precision})
    rho = [_parse_matrix(ctx, g, "rho[%d]" % i) for i, g in enumerate(obj["rho"])]
    V = SmallRep.create(ctx, rho)
    if V.d != obj.get("d") or V.rank != obj.get("rank"):
        raise ParseError("declared d/rank disagree with the generator matrices")
    return V


def algebra_to_json(A: FinAlgebra, metadata=None):
    out = _base_header("algebra", A.ctx, metadata)
    out["dim"] = A.dim
    out["mul"] = [
        [[_scalar_str(c) for c in A.mul[i][j]] for j in range(A.dim)] for i in range(A.dim)
    ]
    out["one"] = [_scalar_str(c) for c in A.one]
    return out


def algebra_from_json(obj, precision=None) -> FinAlgebra:
    _check_header(obj, "algebra")
    ctx = _context_from(obj if precision is None else {**obj, "precision": precision})
    try:
        mul = [
            [[PadicScalar.parse(ctx, s) for s in row] for row in plane]
            for plane in obj["mul"]
        ]
        one = [PadicScalar.parse(ctx, s) for s in obj["one"]]
    except (ValueError, TypeError, PadicError) as exc:
        raise ParseError("bad scalar in algebra: %s" % exc)
    return FinAlgebra.create(ctx, mul, one)


def twist_to_json(B: FinAlgebra, tau, units=None, metadata=None):
    out = _base_header("twist", B.ctx, metadata)
    out["algebra"] = {
        "dim": B.dim,
        "mul": [[[_scalar_str(c) for c in B.mul[i][j]] for j in range(B.dim)] for i in range(B.dim)],
        "one": [_scalar_str(c) for c in B.one],
    }
    out["tau"] = [[_scalar_str(c) for c in t.coords] for t in tau]
    if units is not None:
        out["units"] = [[_scalar_str(c) for c in u.coords] for u in units]
    return out


def twist_from_json(obj, precision=None):
    _check_header(obj, "twist")
    ctx = _context_from(obj if precision is None else {**obj, "precision": precision})
    alg = obj["algebra"]
    try:
        mul = [
            [[PadicScalar.parse(ctx, s) for s in row] for row in plane]
            for plane in alg["mul"]
        ]
        one = [PadicScalar.parse(ctx, s) for s in alg["one"]]
        B = FinAlgebra.create(ctx, mul, one)
        tau = [B.element([PadicScalar.parse(ctx, s) for s in t]) for t in obj["tau"]]
    except (KeyError, ValueError, TypeError) as exc:
        raise ParseError("bad twist payload: %s" % exc)
    return B, tau


def morphism_to_json(f: Morphism):
    """Matrix of scalar strings: row i = coordinates of the image of the
    i-th source basis vector."""
    return [[_scalar_str(c) for c in img.coords] for img in f.images]


def morphism_from_json(source: FinAlgebra, target: FinAlgebra, rows) -> Morphism:
    try:
        images = [
            target.element([PadicScalar.parse(target.ctx, s) for s in row]) for row in rows
        ]
    except (ValueError, TypeError) as exc:
        raise ParseError("bad scalar in morphism: %s" % exc)
    return Morphism.create(source, target, images)


def load_instance(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
        obj = json.loads(text)
    except OSError as exc:
        raise ParseError("cannot read %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise ParseError("invalid JSON in %s: %s" % (path, exc))
    _check_header(obj, None)
    return obj, text


def write_instance(path: str, obj):
    text = canonical_dumps(obj)
    with open(path, "w") as fh:
        fh.write(text)
    return text
