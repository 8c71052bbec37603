"""Edge-list text files and certificate JSON."""
import json
from pathlib import Path

import numpy as np

from .graph import Graph, GraphError, SimilarityCertificate, VertexBijection, canonical_edges


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_edge_list(text: str) -> Graph:
    """Parse ``"n m"`` followed by ``m`` lines ``"u v"``; ``#`` lines are comments."""
    header = None
    edges = []
    lineno = 0
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError(f"expected two fields, got {len(tokens)}", lineno)
        a, b = _ints(tokens, lineno)
        if header is None:
            if a < 0 or b < 0:
                raise ParseError("negative count in header", lineno)
            header = (a, b)
            continue
        n = header[0]
        if not (0 <= a < n and 0 <= b < n):
            raise ParseError(f"endpoint out of range: ({a}, {b}) with n={n}", lineno)
        if a == b:
            raise ParseError(f"loop edge ({a}, {b})", lineno)
        if len(edges) >= header[1]:
            raise ParseError(f"more than the declared {header[1]} edges", lineno)
        edges.append((a, b))
    if header is None:
        raise ParseError("missing 'n m' header", lineno or 1)
    if len(edges) != header[1]:
        raise ParseError(f"declared {header[1]} edges, found {len(edges)}", lineno)
    try:
        return Graph(header[0], canonical_edges(edges, header[0]))
    except GraphError as exc:  # pragma: no cover - caught per line above
        raise ParseError(str(exc)) from None


def read_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text(encoding="ascii"))


def format_edge_list(g: Graph, comments=()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"{g.n} {g.m}")
    lines.extend(f"{u} {v}" for u, v in g.edges.tolist())
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, path, comments=()) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(format_edge_list(g, comments))


CERT_FIELDS = ("n", "s", "e1", "e2", "mapping", "method", "seed", "runtime_ms")


def certificate_to_json(c: SimilarityCertificate, n: int, runtime_ms: float = 0.0) -> dict:
    return {
        "n": int(n),
        "s": int(c.s),
        "e1": c.e1.tolist(),
        "e2": c.e2.tolist(),
        "mapping": [[int(a), int(b)] for a, b in zip(c.f.src.tolist(), c.f.dst.tolist())],
        "method": c.method,
        "seed": c.seed,
        "runtime_ms": round(float(runtime_ms), 3),
    }


def certificate_from_json(obj: dict) -> tuple[SimilarityCertificate, int]:
    """Rebuild a certificate from its JSON object; raises :class:`ParseError` on bad shape.

    A non-injective mapping is a verification failure, not a parse error, so it
    is reported through ``ValueError`` from :class:`VertexBijection`.
    """
    missing = [k for k in CERT_FIELDS if k not in obj]
    if missing:
        raise ParseError(f"certificate missing fields: {', '.join(missing)}")
    extra = sorted(set(obj) - set(CERT_FIELDS))
    if extra:
        raise ParseError(f"certificate has unknown fields: {', '.join(extra)}")

    def pairs(key):
        val = obj[key]
        if not isinstance(val, list) or any(
            not isinstance(p, list) or len(p) != 2 or not all(isinstance(x, int) for x in p) for p in val
        ):
            raise ParseError(f"field {key!r} must be a list of integer pairs")
        return np.asarray(val, dtype=np.int64).reshape(-1, 2)

    e1, e2, mp = pairs("e1"), pairs("e2"), pairs("mapping")
    if not isinstance(obj["s"], int) or not isinstance(obj["n"], int):
        raise ParseError("fields 'n' and 's' must be integers")
    f = VertexBijection(mp[:, 0], mp[:, 1])
    cert = SimilarityCertificate(e1, e2, f, obj["s"], str(obj["method"]), obj["seed"])
    return cert, obj["n"]


def write_certificate(c: SimilarityCertificate, n: int, path, runtime_ms: float = 0.0) -> None:
    Path(path).write_text(json.dumps(certificate_to_json(c, n, runtime_ms)) + "\n", encoding="ascii")


def read_certificate(path):
    try:
        obj = json.loads(Path(path).read_text(encoding="ascii"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(obj, dict):
        raise ParseError("certificate must be a JSON object")
    return certificate_from_json(obj)
