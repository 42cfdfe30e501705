import logging
import os
from fractions import Fraction

import networkx as nx
import pytest

from infinity_dynamics.config import DEFAULT_CONFIG, Config
from infinity_dynamics.errors import InfinityDynamicsError, ParseError
from infinity_dynamics.utils import (dump_json, ensure_dir, fraction_str, frame_to_text, graph_to_dot, load_json,
                                     parse_int_list, parse_rational, records_frame, set_package_level,
                                     setup_logger)


def test_default_config():
    assert DEFAULT_CONFIG.word_length == 6
    assert DEFAULT_CONFIG.eigen_normalization == "t"
    assert DEFAULT_CONFIG.decimal_digits == 50


@pytest.mark.parametrize("kwargs", [
    {"word_length": 0}, {"word_length": 11}, {"degree_iterations": 13}, {"term_cap": 0},
    {"refinement_depth": 0}, {"separation_depth": 0}, {"meet_max_blowups": 0},
    {"eigen_normalization": "max"}, {"decimal_digits": 10}, {"output_format": "xml"},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        Config(**kwargs)


def test_domain_errors_are_value_errors():
    assert issubclass(ParseError, InfinityDynamicsError)
    assert issubclass(InfinityDynamicsError, ValueError)


def test_parse_rational():
    assert parse_rational("-5/2") == Fraction(-5, 2)
    assert parse_rational(" 0.25 ") == Fraction(1, 4)
    assert parse_rational(3) == 3
    for bad in ("x", "1/0"):
        with pytest.raises(ParseError):
            parse_rational(bad)


def test_parse_int_list():
    assert parse_int_list("2, 1,0,3", expected=4) == [2, 1, 0, 3]
    with pytest.raises(ParseError):
        parse_int_list("1,2,3", expected=4)
    with pytest.raises(ParseError):
        parse_int_list("1,two")


def test_fraction_text():
    assert fraction_str(Fraction(6, 3)) == "2"
    assert fraction_str(Fraction(-5, 2)) == "-5/2"


def test_json_files(tmp_path):
    path = tmp_path / "out.json"
    text = dump_json({"b": 1, "a": [1, 2]}, str(path))
    assert text == '{"a":[1,2],"b":1}'
    assert load_json(str(path)) == {"a": [1, 2], "b": 1}
    with pytest.raises(ParseError):
        load_json(str(tmp_path / "missing.json"))


def test_ensure_dir(tmp_path):
    target = tmp_path / "a" / "b"
    assert ensure_dir(str(target)) == os.path.abspath(str(target))
    assert target.is_dir()


def test_graph_to_dot():
    graph = nx.DiGraph()
    graph.add_node("E0", label="b=1")
    graph.add_edge("E0", "F")
    text = graph_to_dot(graph, name="tree")
    assert text.startswith('digraph "tree" {')
    assert '"E0" [label="b=1"];' in text and '"E0" -> "F";' in text


def test_frames_as_text():
    frame = records_frame([{"check": "a", "passed": True}, {"check": "b", "passed": False}])
    assert list(frame.columns) == ["check", "passed"]
    assert frame_to_text(frame, "csv").splitlines()[0] == "check,passed"
    assert "check" in frame_to_text(frame)


def test_logger_setup_is_idempotent():
    first = setup_logger("infinity_dynamics.test_logger")
    second = setup_logger("infinity_dynamics.test_logger")
    assert first is second and len(first.handlers) == 1
    set_package_level(logging.DEBUG)
    assert first.level == logging.DEBUG
    set_package_level(logging.WARNING)
