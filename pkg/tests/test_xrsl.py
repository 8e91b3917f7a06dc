"""XRSL subset parser: sample job, error positions, fuzzing, stage-in routing."""

import random
from importlib import resources

import pytest
from hypothesis import given, strategies as st

from hsmsim.engine import ConfigError
from hsmsim.protocols import Direct, Relay
from hsmsim.testbed import build_testbed
from hsmsim.xrsl import (GSIFTP_DEFAULT_PORT, ParseError, StageInRequest,
                         StageInUrl, ValidationError, XrslDocument,
                         extract_stage_ins, parse_url, parse_xrsl, render,
                         stage_in_to_transfers)


def sample_text() -> str:
    return resources.files("hsmsim.scenarios").joinpath("sample_stagein.xrsl").read_text()


# --------------------------------------------------------------------------
# the shipped sample job


def test_sample_job_parses_completely():
    doc = parse_xrsl(sample_text())
    assert [k for k, _ in doc.attributes] == [
        "executable", "arguments", "inputfiles", "stdout", "join",
        "maxcputime", "middleware", "jobname", "stdlog", "ftpThreads"]
    assert len(doc.attributes) == 10
    assert doc.get("executable") == "gsim1"
    assert doc.get("arguments") == "-d"            # ''…'' quoting
    assert doc.get("jobname") == "HPSS access test"
    assert doc.get("maxcputime") == "36000"
    assert doc.get("join") == "true"
    assert doc.get("ftpThreads") == "1"
    assert doc.get("inputfiles") == [
        ("Bdata.in", "gsiftp://dt05s.cc:2811/hpss/manabe/data2")]


def test_sample_job_stray_percent_is_warned_not_fatal():
    doc = parse_xrsl(sample_text())
    assert len(doc.warnings) == 1
    assert "stray '%'" in doc.warnings[0]
    assert "line 11, col 22" in doc.warnings[0]    # right after (stdlog=…)


def test_sample_job_yields_one_stage_in():
    requests, diagnostics = extract_stage_ins(parse_xrsl(sample_text()))
    assert diagnostics == []
    assert requests == [StageInRequest(
        "Bdata.in", StageInUrl("gsiftp", "dt05s.cc", 2811, "/hpss/manabe/data2"))]


# --------------------------------------------------------------------------
# grammar corners


def test_minimal_document():
    doc = parse_xrsl("&(executable=a)")
    assert doc.attributes == [("executable", "a")]
    assert doc.warnings == []


def test_quoting_styles_are_equivalent():
    assert parse_xrsl('&(x="v")').get("x") == "v"
    assert parse_xrsl("&(x=''v'')").get("x") == "v"
    assert parse_xrsl("&(x=v)").get("x") == "v"


def test_double_quotes_may_hold_spaces_and_percent():
    assert parse_xrsl('&(x="a b % c")').get("x") == "a b % c"


def test_tuple_lists_parse():
    doc = parse_xrsl('&(inputfiles=("a" "u1")("b" "u2"))')
    assert doc.get("inputfiles") == [("a", "u1"), ("b", "u2")]


def test_empty_tuple_parses():
    assert parse_xrsl("&(x=())").get("x") == [()]


def test_missing_ampersand_rejected():
    with pytest.raises(ParseError) as err:
        parse_xrsl("(executable=a)")
    assert err.value.line == 1 and err.value.col == 1
    assert "&" in err.value.expected


def test_unterminated_tuple_reports_position():
    with pytest.raises(ParseError) as err:
        parse_xrsl("&(x=(")
    assert (err.value.line, err.value.col) == (1, 6)


def test_error_position_tracks_lines():
    with pytest.raises(ParseError) as err:
        parse_xrsl('&(a=1)\n(b=)')
    assert err.value.line == 2
    assert err.value.col == 4


def test_unterminated_quote_rejected():
    with pytest.raises(ParseError):
        parse_xrsl('&(x="abc)')
    with pytest.raises(ParseError):
        parse_xrsl("&(x=''abc)")


def test_missing_equals_rejected():
    with pytest.raises(ParseError) as err:
        parse_xrsl("&(x)")
    assert err.value.expected == "'='"


def test_render_round_trips():
    doc = parse_xrsl(sample_text())
    again = parse_xrsl(render(doc))
    assert again.attributes == doc.attributes
    assert again.warnings == []                    # the stray '%' is not reproduced


# --------------------------------------------------------------------------
# fuzzing: hostile input may only ever raise ParseError


def test_random_byte_strings_never_crash():
    rng = random.Random(20260814)
    alphabet = '&()="\'% \n\tabgsiftp:/.%123'
    outcomes = {"ok": 0, "parse_error": 0}
    for _ in range(10_000):
        text = "".join(rng.choice(alphabet) for _ in range(rng.randrange(0, 40)))
        try:
            parse_xrsl(text)
            outcomes["ok"] += 1
        except ParseError:
            outcomes["parse_error"] += 1
    assert sum(outcomes.values()) == 10_000
    assert outcomes["parse_error"] > 0             # the fuzz actually bites


@given(st.text(max_size=60))
def test_arbitrary_text_never_crashes(text):
    try:
        parse_xrsl(text)
    except ParseError:
        pass


@given(st.lists(st.tuples(
    st.text(alphabet="abcdefgh", min_size=1, max_size=8),
    st.text(alphabet="abcdefgh./:0123456789", min_size=1, max_size=20)),
    max_size=5))
def test_render_parse_identity_on_generated_docs(pairs):
    doc = XrslDocument(attributes=[(k, v) for k, v in pairs])
    assert parse_xrsl(render(doc)).attributes == doc.attributes


# --------------------------------------------------------------------------
# URLs


def test_url_with_explicit_port():
    assert parse_url("gsiftp://h:2811/p/q") == StageInUrl("gsiftp", "h", 2811, "/p/q")


def test_url_defaults_port():
    assert parse_url("gsiftp://h/p") == StageInUrl("gsiftp", "h", GSIFTP_DEFAULT_PORT, "/p")


def test_bad_urls_rejected():
    for bad in ("nourl", "://h/p", "gsiftp://:99/p", "gsiftp://h:0/p", "gsiftp://h:xx/p"):
        with pytest.raises(ValidationError):
            parse_url(bad)


# --------------------------------------------------------------------------
# stage-in extraction rules


def test_no_inputfiles_means_no_stage_ins():
    assert extract_stage_ins(parse_xrsl("&(executable=a)")) == ([], [])


def test_scalar_inputfiles_rejected():
    with pytest.raises(ValidationError):
        extract_stage_ins(parse_xrsl('&(inputfiles="x")'))


def test_wrong_tuple_arity_rejected():
    with pytest.raises(ValidationError) as err:
        extract_stage_ins(parse_xrsl('&(inputfiles=("a" "u" "extra"))'))
    assert "2 elements" in str(err.value)


def test_non_gsiftp_scheme_is_diagnosed_not_routed():
    doc = parse_xrsl('&(inputfiles=("a" "http://h/p")("b" "gsiftp://h/q"))')
    requests, diagnostics = extract_stage_ins(doc)
    assert [r.name for r in requests] == ["b"]
    assert len(diagnostics) == 1 and "http" in diagnostics[0]


def test_unparseable_url_is_diagnosed():
    requests, diagnostics = extract_stage_ins(parse_xrsl('&(inputfiles=("a" "junk"))'))
    assert requests == []
    assert len(diagnostics) == 1


# --------------------------------------------------------------------------
# routing stage-ins onto the testbed


def requests_for(path="/hpss/manabe/data2"):
    return [StageInRequest("Bdata.in", StageInUrl("gsiftp", "dt05s.cc", 2811, path))]


def test_gsi_stage_in_relays_through_the_daemon_host():
    tb = build_testbed()
    specs = stage_in_to_transfers(requests_for(), tb, "gsi", "mover0",
                                  {"/hpss/manabe/data2": "mover1"})
    assert len(specs) == 1
    assert specs[0].source.host == "mover1"
    assert specs[0].sink.host == "client"
    assert specs[0].data_path == Relay(via="mover0")
    assert specs[0].path is tb.wan


def test_colocated_gsi_stage_in_is_direct():
    tb = build_testbed()
    specs = stage_in_to_transfers(requests_for(), tb, "gsi", "mover0", {})
    assert specs[0].source.host == "mover0"        # unmapped: data lives with the daemon
    assert specs[0].data_path == Direct()


def test_kerberos_stage_in_is_direct_even_remote():
    tb = build_testbed()
    specs = stage_in_to_transfers(requests_for(), tb, "kerberos", "mover0",
                                  {"/hpss/manabe/data2": "mover1"})
    assert specs[0].source.host == "mover1"
    assert specs[0].data_path == Direct()


def test_stage_in_with_unknown_host_rejected():
    tb = build_testbed()
    with pytest.raises(ConfigError):
        stage_in_to_transfers(requests_for(), tb, "gsi", "mover9", {})
    with pytest.raises(ConfigError):
        stage_in_to_transfers(requests_for(), tb, "gsi", "mover0",
                              {"/hpss/manabe/data2": "nowhere"})


def test_empty_request_list_yields_no_specs():
    tb = build_testbed()
    assert stage_in_to_transfers([], tb, "gsi", "mover0", {}) == []
