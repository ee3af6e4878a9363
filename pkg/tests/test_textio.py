import random
import re

import pytest
from hypothesis import given, settings, strategies as st

from conftest import CORPUS, GOLDEN
from mtx import (
    ParseError,
    RdbmsModel,
    TraceLink,
    emit_ddl,
    parse_class_model,
    parse_rdbms_model,
    print_class_model,
    print_rdbms_model,
    print_traces,
    transform,
)

CLASS_FILES = sorted(CORPUS.glob("*.cm"))
RDBMS_FILES = sorted(CORPUS.glob("*.rdb"))


def diag_codes(fn, text):
    with pytest.raises(ParseError) as exc:
        fn(text)
    return [d.code for d in exc.value.diagnostics], exc.value.diagnostics


# -- class model syntax


def test_parse_minimal():
    m = parse_class_model("primitive Int\nclass C persistent { primary attr k : Int }")
    assert len(m.primitives) == 1 and len(m.classes) == 1
    (c,) = m.classes
    assert c.is_persistent
    (a,) = m.attributes_of(c)
    assert (a.name, a.is_primary, m[a.type].name) == ("k", True, "Int")


def test_unresolved_parent():
    codes, diags = diag_codes(parse_class_model, "class C extends Missing { }")
    assert codes == ["UNRESOLVED_NAME"]
    assert "Missing" in diags[0].message
    assert (diags[0].span.line, diags[0].span.column) == (1, 17)


def test_golden_source_counts():
    m = parse_class_model((GOLDEN / "benchmark.cm").read_text())
    assert (len(m.classes), len(m.associations), len(m.primitives)) == (3, 1, 2)


def test_forward_references_resolve():
    m = parse_class_model((CORPUS / "forward_refs.cm").read_text())
    cust = m.get_class(m.lookup("Customer"))
    assert m[cust.parent].name == "Party"
    (assoc,) = m.iter_associations()
    assert m[assoc.dest].name == "Order"


def test_print_minimal_canonical():
    m = parse_class_model("class C persistent{primary attr k:Int}primitive Int")
    assert print_class_model(m) == "primitive Int\n\nclass C persistent {\n  primary attr k : Int\n}\n"


def test_print_empty_model():
    assert print_class_model(parse_class_model("// nothing\n")) == ""


def test_syntax_error_position_and_recovery():
    text = "primitive Int\nclass A { attr : Int }\nclass B { primary attr b : Int }\nassociation x A -> B\n"
    codes, diags = diag_codes(parse_class_model, text)
    assert codes == ["PARSE_ERROR", "PARSE_ERROR"]
    assert [(d.span.line, d.span.column) for d in diags] == [(2, 16), (4, 15)]


def test_bad_character():
    codes, diags = diag_codes(parse_class_model, "primitive Int\nclass A $ { }")
    assert "PARSE_ERROR" in codes
    assert diags[0].span.line == 2 and diags[0].span.column == 9


def test_unterminated_class():
    codes, diags = diag_codes(parse_class_model, "class A { primary attr a : Int")
    assert codes == ["PARSE_ERROR"]
    assert "end of input" in diags[0].message


def test_duplicates_reported_with_spans():
    codes, diags = diag_codes(parse_class_model, "primitive Int\nclass A { attr a : Int attr a : Int }\nclass A { }")
    assert codes == ["DUP_ATTR", "DUP_NAME"]
    assert [d.span.line for d in diags] == [2, 3]


def test_undecodable_bytes():
    codes, diags = diag_codes(parse_class_model, b"primitive Int\nclass \xff")
    assert codes[0] == "PARSE_ERROR"
    assert diags[0].span.line == 2


def test_source_spans_recorded():
    m = parse_class_model("primitive Int\n\nclass C {\n  attr x : Int\n}\n", "m.cm")
    span = m.source_spans["class C / attr x"]
    assert (span.file, span.line, span.column) == ("m.cm", 4, 8)


@pytest.mark.parametrize("path", CLASS_FILES, ids=lambda p: p.name)
def test_class_round_trip(path):
    m = parse_class_model(path.read_text())
    printed = print_class_model(m)
    again = parse_class_model(printed)
    assert again.snapshot() == m.snapshot()
    assert print_class_model(again) == printed


# -- RDBMS syntax


def test_parse_rdbms_minimal():
    r = parse_rdbms_model("table T { col a : Int\n pkey (a) }")
    (t,) = r.tables
    assert [c.name for c in r.columns_of(t)] == ["a"]
    assert r[t.pkey[0]].name == "a"


def test_fkey_to_unknown_table():
    codes, _ = diag_codes(parse_rdbms_model, "table T { col a : Int pkey (a) fkey (a) references Nope }")
    assert codes == ["UNRESOLVED_NAME"]


def test_pkey_unknown_column():
    codes, _ = diag_codes(parse_rdbms_model, "table T { col a : Int pkey (b) }")
    assert codes == ["UNRESOLVED_NAME"]


def test_rdbms_requires_pkey_line():
    codes, _ = diag_codes(parse_rdbms_model, "table T { col a : Int }")
    assert codes == ["PARSE_ERROR"]


def test_rdbms_duplicate_table():
    codes, _ = diag_codes(parse_rdbms_model, "table T { col a : Int pkey (a) }\ntable T { pkey (a) }")
    assert codes == ["DUP_NAME"]


def test_golden_rdbms_round_trips_bytewise():
    text = (GOLDEN / "benchmark.rdb").read_text()
    assert print_rdbms_model(parse_rdbms_model(text)) == text


@pytest.mark.parametrize("path", RDBMS_FILES, ids=lambda p: p.name)
def test_rdbms_round_trip(path):
    r = parse_rdbms_model(path.read_text())
    printed = print_rdbms_model(r)
    again = parse_rdbms_model(printed)
    assert again.snapshot() == r.snapshot()
    assert print_rdbms_model(again) == printed


# -- whitespace and comment insensitivity

TOKEN = re.compile(r"->|[{}:(),]|[A-Za-z_][A-Za-z0-9_]*")
SEPARATORS = st.sampled_from([" ", "\n", "\t", "  \n  ", " // c\n", "\r\n"])


@settings(max_examples=60, deadline=None)
@given(data=st.data(), path=st.sampled_from(CLASS_FILES + RDBMS_FILES))
def test_reformatting_does_not_change_printout(data, path):
    parse, show = (
        (parse_class_model, print_class_model) if path.suffix == ".cm" else (parse_rdbms_model, print_rdbms_model)
    )
    text = path.read_text()
    canonical = show(parse(text))
    tokens = TOKEN.findall(re.sub(r"//[^\n]*", "", text))
    messy = "".join(tok + data.draw(SEPARATORS) for tok in tokens)
    assert show(parse(messy)) == canonical


# -- traces


def test_empty_traces():
    assert print_traces([]) == ""


def test_single_trace_line():
    assert print_traces([TraceLink("R1", "class Customer", "table Customer")]) == "R1\tclass Customer\ttable Customer\n"


def test_trace_sort_order():
    links = [
        TraceLink("R3", "class B / attr x", "table B / col x"),
        TraceLink("R1", "class B", "table B"),
        TraceLink("R5", "class B / attr y", "table B / col x"),
        TraceLink("R2", "class A / attr z", "table B / col x"),
    ]
    assert [line.split("\t")[0] for line in print_traces(links).splitlines()] == ["R1", "R2", "R3", "R5"]


def test_golden_has_one_r1_per_table(golden_model):
    lines = print_traces(transform(golden_model).traces).splitlines()
    assert [line for line in lines if line.startswith("R1\t")] == [
        "R1\tclass Customer\ttable Customer",
        "R1\tclass Order\ttable Order",
    ]


# -- DDL


def test_ddl_single_table():
    r = parse_rdbms_model("table T { col a : Int pkey (a) }")
    assert emit_ddl(r) == "CREATE TABLE T (\n  a INTEGER,\n  PRIMARY KEY (a)\n);\n"


def test_ddl_golden(golden_model):
    ddl = emit_ddl(transform(golden_model).model)
    assert ddl == (GOLDEN / "benchmark.sql").read_text()
    assert ddl.count("FOREIGN KEY") == 1
    assert "FOREIGN KEY (orders_id) REFERENCES Order" in ddl


def test_ddl_unknown_primitive_uppercased():
    r = parse_rdbms_model("table T { col d : Date col s : String pkey (d) }")
    assert "  d DATE,\n  s VARCHAR(255),\n" in emit_ddl(r)


def test_ddl_separates_statements():
    ddl = emit_ddl(parse_rdbms_model((CORPUS / "composite.rdb").read_text()))
    assert ddl.count(";\n\nCREATE TABLE") == 2
    assert "PRIMARY KEY (order_no, pos)" in ddl
    assert emit_ddl(RdbmsModel()) == ""


# -- totality on garbage


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=200))
def test_parsers_total_on_bytes(data):
    for parse in (parse_class_model, parse_rdbms_model):
        try:
            parse(data)
        except ParseError as exc:
            assert exc.diagnostics
            for d in exc.diagnostics:
                assert d.span is not None and d.span.line >= 1 and d.span.column >= 1
            keys = [(d.span.line, d.span.column) for d in exc.diagnostics]
            assert keys == sorted(keys)


def test_parsers_total_on_mutated_corpus():
    rng = random.Random(7)
    files = [p.read_bytes() for p in CLASS_FILES + RDBMS_FILES]
    for _ in range(500):
        data = bytearray(rng.choice(files))
        for _ in range(rng.randint(1, 5)):
            if data and rng.random() < 0.5:
                del data[rng.randrange(len(data))]
            else:
                data.insert(rng.randrange(len(data) + 1), rng.choice(b"{}():,->/ \nabc\xff"))
        for parse in (parse_class_model, parse_rdbms_model):
            try:
                parse(bytes(data))
            except ParseError as exc:
                assert exc.diagnostics
