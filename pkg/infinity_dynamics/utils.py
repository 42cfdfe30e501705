"""
Utility functions shared by the toolkit modules.
"""

import os
import logging
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Union

import colorlog
import networkx as nx
import pandas as pd
import ujson

from .errors import ParseError


def setup_logger(name: str, level: int = logging.WARNING) -> logging.Logger:
    """
    Setup logger with consistent formatting.

    Args:
        name: Logger name
        level: Logging level

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)

    if not logger.handlers:
        handler = colorlog.StreamHandler()
        formatter = colorlog.ColoredFormatter(
            '%(log_color)s%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    return logger


def set_package_level(level: int) -> None:
    """Apply one logging level to every logger of the package."""
    for name, obj in logging.Logger.manager.loggerDict.items():
        if name.startswith("infinity_dynamics") and isinstance(obj, logging.Logger):
            obj.setLevel(level)


def ensure_dir(path: str) -> str:
    """
    Create directory if it doesn't exist.

    Args:
        path: Directory path

    Returns:
        Absolute path to directory
    """
    os.makedirs(path, exist_ok=True)
    return os.path.abspath(path)


def parse_rational(text: Union[str, int, Fraction]) -> Fraction:
    """
    Parse an exact rational from "3", "-5/2" or "0.25".

    Args:
        text: Literal to parse

    Returns:
        Fraction value
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"Invalid rational literal: {text!r}") from e


def parse_int_list(text: str, expected: Optional[int] = None) -> List[int]:
    """Parse a comma separated list of integers such as "2,1,0,3"."""
    try:
        values = [int(part) for part in text.replace(" ", "").split(",") if part != ""]
    except ValueError as e:
        raise ParseError(f"Invalid integer list: {text!r}") from e
    if expected is not None and len(values) != expected:
        raise ParseError(f"Expected {expected} integers, got {len(values)} in {text!r}")
    return values


def fraction_str(value: Fraction) -> str:
    """Canonical text of a rational: "3" or "-5/2"."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def dump_json(payload: Any, path: Optional[str] = None) -> str:
    """
    Serialize to deterministic JSON text, optionally writing it to disk.

    Args:
        payload: JSON-compatible object
        path: Optional output file

    Returns:
        The JSON text
    """
    text = ujson.dumps(payload, sort_keys=True, ensure_ascii=False)
    if path:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
    return text


def load_json(path: str) -> Any:
    """Load a JSON file, reporting malformed content as ParseError."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return ujson.load(f)
    except (OSError, ValueError) as e:
        raise ParseError(f"Cannot read JSON file {path}: {e}") from e


def graph_to_dot(graph: nx.Graph, name: str = "G",
                 label_attr: str = "label") -> str:
    """
    Render a networkx graph as plain DOT text.

    Args:
        graph: Undirected or directed graph
        name: Graph name
        label_attr: Node attribute used as label

    Returns:
        DOT source
    """
    directed = graph.is_directed()
    arrow = "->" if directed else "--"
    lines = [f'{"digraph" if directed else "graph"} "{name}" {{']
    for node, data in graph.nodes(data=True):
        label = data.get(label_attr, node)
        lines.append(f'  "{node}" [label="{label}"];')
    for u, v in graph.edges():
        lines.append(f'  "{u}" {arrow} "{v}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def frame_to_text(df: pd.DataFrame, fmt: str = "text") -> str:
    """Render a DataFrame as markdown text or CSV."""
    if fmt == "csv":
        return df.to_csv(index=False)
    return df.to_markdown(index=False)


def records_frame(records: Iterable[Dict[str, Any]]) -> pd.DataFrame:
    """Build a DataFrame from dict records keeping insertion order."""
    return pd.DataFrame(list(records))
