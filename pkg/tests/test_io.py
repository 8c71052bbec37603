import json

import pytest
from conftest import complete

from selfsim.graph import SimilarityCertificate, VertexBijection
from selfsim.io import (
    ParseError,
    certificate_from_json,
    certificate_to_json,
    format_edge_list,
    parse_edge_list,
    read_certificate,
    write_certificate,
)


def test_parse_with_comments():
    g = parse_edge_list("# hello\n3 2\n0 1\n# mid\n2 1\n")
    assert g.n == 3 and g.edges.tolist() == [[0, 1], [1, 2]]


def test_parse_endpoint_out_of_range():
    with pytest.raises(ParseError, match="endpoint out of range") as exc:
        parse_edge_list("3 1\n0 5\n")
    assert exc.value.line == 2


@pytest.mark.parametrize("text, msg", [
    ("", "missing"),
    ("2 1\n0 0\n", "loop"),
    ("3 2\n0 1\n", "declared 2 edges"),
    ("3 1\n0 1\n1 2\n", "more than"),
    ("3 1\n0 x\n", "integers"),
    ("3 1\n0 1 2\n", "two fields"),
])
def test_parse_errors(text, msg):
    with pytest.raises(ParseError, match=msg):
        parse_edge_list(text)


def test_format_round_trip():
    g = complete(5)
    assert parse_edge_list(format_edge_list(g, ["c"])) == g


def test_certificate_json_round_trip(tmp_path):
    f = VertexBijection([0, 1, 2, 3], [2, 0, 3, 1])
    c = SimilarityCertificate.from_map([(0, 1), (1, 2), (2, 3)], f, "hand", 7)
    obj = certificate_to_json(c, 4, 1.5)
    assert sorted(obj) == sorted(["n", "s", "e1", "e2", "mapping", "method", "seed", "runtime_ms"])
    write_certificate(c, 4, tmp_path / "c.json", 1.5)
    back, n = read_certificate(tmp_path / "c.json")
    assert n == 4 and back.s == 3 and back.f == c.f and back.e2.tolist() == c.e2.tolist()


def test_certificate_json_bad_shape():
    with pytest.raises(ParseError, match="missing"):
        certificate_from_json({"n": 1})
    obj = certificate_to_json(SimilarityCertificate.empty(), 2)
    obj["extra"] = 1
    with pytest.raises(ParseError, match="unknown"):
        certificate_from_json(obj)


def test_certificate_invalid_json(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{not json")
    with pytest.raises(ParseError):
        read_certificate(p)


def test_non_injective_mapping_is_not_a_parse_error():
    obj = json.loads(json.dumps(certificate_to_json(SimilarityCertificate.empty(), 3)))
    obj["mapping"] = [[0, 1], [2, 1]]
    with pytest.raises(ValueError) as exc:
        certificate_from_json(obj)
    assert not isinstance(exc.value, ParseError)
