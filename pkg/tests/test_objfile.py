import pytest

from almostctl import systems as ls
from almostctl.corpus import ENV_VAR, corpus_dir, default_corpus_dir, load_corpus
from almostctl.errors import ParseError
from almostctl.objfile import ObjectTable, parse_objects, parse_text


def parse(text, ring):
    return parse_text(text, "f.alm", ring)


def test_empty_and_comments(domain):
    t = parse("", domain)
    assert len(t) == 0
    t = parse("# nothing here\n\n   # still nothing\n", domain)
    assert len(t) == 0


def test_module_and_constant_system(domain, cap8):
    t = parse("module M level 1 gens 1 rels [[x^(1/2)]]\nsystem S kind constant module M\n", domain)
    assert t.counts()["module"] == 1
    S = t.systems["S"]
    assert S.member(1).k_dim() == 1
    assert S.member(3).k_dim() == 4


def test_duplicate_names_reports_both(domain):
    with pytest.raises(ParseError) as ei:
        parse("system A kind zero\nsystem A kind ideal\n", domain)
    msg = str(ei.value)
    assert "duplicate" in msg and "f.alm:1" in msg
    assert ei.value.line == 2


def test_ring_header(domain, trunc):
    assert len(parse("ring domain\nsystem A kind zero\n", domain)) == 1
    with pytest.raises(ParseError, match="RingSpec mismatch"):
        parse("ring truncated\n", domain)
    with pytest.raises(ParseError, match="RingSpec mismatch"):
        parse("ring domain field fp:7\n", domain)


def test_level_inconsistency(domain):
    with pytest.raises(ParseError, match="level inconsistency") as ei:
        parse("module M level 1 gens 1 rels [[x^(1/8)]]\n", domain)
    assert ei.value.line == 1
    assert ei.value.column is not None


def test_column_of_bad_entry(domain):
    with pytest.raises(ParseError) as ei:
        parse("module M level 2 gens 1 rels [[x^(1/3)]]\n", domain)
    assert ei.value.line == 1
    assert ei.value.column >= 32


@pytest.mark.parametrize("bad", [
    "module M level 1 gens 1 rels [[x^(1/2]]\n",
    "module M level 1 gens 1 rels [[x^1/2)]]\n",
    "module M level 1 gens 2 rels [[1, 0], [1]]\n",
    "module M level 1 gens 1 rels [[1,]]\n",
    "system S kind bogus\n",
    "system S kind sum V\n",
    "complex C degrees 0..0\n  term 0 Nope\nend\n",
    "system S kind custom\n  level * gens 1\n",
])
def test_malformed_inputs(domain, bad):
    with pytest.raises(ParseError):
        parse(bad, domain)


def test_non_chain_map_rejected(domain):
    text = ("system V kind constant level 0 gens 1\n"
            "complex K degrees 0..1\n  term 1 V\n  term 0 V\n  d 1 [[x]]\nend\n"
            "arrow f from K to V\n  map 0 [[1]]\n  map 1 [[1]]\nend\n")
    with pytest.raises(ParseError):
        parse(text, domain)


def test_nonzero_d_squared_rejected(domain):
    text = ("system V kind constant level 0 gens 1\n"
            "complex K degrees 0..2\n  term 2 V\n  term 1 V\n  term 0 V\n"
            "  d 2 [[1]]\n  d 1 [[1]]\nend\n")
    with pytest.raises(ParseError):
        parse(text, domain)


def test_custom_system_resolution(domain, cap8):
    text = ("system S kind custom\n  level 0 gens 1\n  level * gens 1 rels [[u]]\n"
            "  transition 0 [[1]]\n  transition * [[0]]\nend\n")
    S = parse(text, domain).systems["S"]
    assert S.member(0).free_rank == 1
    assert S.member(3).k_dim() == 1
    assert ls.is_zero(S, 8).passed


def test_custom_missing_transition_needs_equal_gens(domain):
    text = "system S kind custom\n  level 0 gens 1\n  level * gens 2\nend\n"
    with pytest.raises(ParseError, match="no transition"):
        t = parse(text, domain)
        t.systems["S"].transition(0)


def test_arrow_from_systems(domain, cap8):
    text = "system I kind ideal\nsystem V kind constant level 0 gens 1\n" \
           "arrow j from I to V\n  map 0 [[u]]\nend\n"
    t = parse(text, domain)
    assert t.arrows["j"].matrix(0, 2).rows[0][0].degree == 1


def test_monoid_block(domain, cap8):
    text = ("system V kind constant level 0 gens 1\n"
            "monoid M carrier V\n  mu 0 [[1]]\n  eta [[1]]\nend\n")
    assert "M" in parse(text, domain).monoids


def test_directory_order(tmp_path, domain):
    (tmp_path / "b.alm").write_text("system B kind tensor A A\n")
    (tmp_path / "a.alm").write_text("system A kind ideal\n")
    (tmp_path / "ignored.txt").write_text("garbage\n")
    t = parse_objects(tmp_path, domain)
    assert set(t.systems) == {"A", "B"}


def test_missing_path(tmp_path, domain):
    with pytest.raises(ParseError, match="no such file"):
        parse_objects(tmp_path / "nope.alm", domain)


def test_table_accumulates(domain):
    table = ObjectTable()
    parse_text("system A kind ideal\n", "a", domain, table)
    parse_text("system B kind tensor A A\n", "b", domain, table)
    assert len(table) == 2


def test_corpus_size(ring):
    t = load_corpus(ring)
    assert len(t.systems) >= 20
    assert len(t.complexes) >= 10
    assert len(t.arrows) >= 10


def test_corpus_env_override(tmp_path, monkeypatch, domain):
    (tmp_path / "x.alm").write_text("system Only kind zero\n")
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    assert corpus_dir(None) == tmp_path
    assert set(load_corpus(domain).systems) == {"Only"}
    assert corpus_dir(str(default_corpus_dir())) == default_corpus_dir()
