import re

import numpy as np

from em_sequence_toolkit.models.index import SequenceIndex
from em_sequence_toolkit.models.rtree import RnSet, build_rn, build_tn
from em_sequence_toolkit.models.sequence import generate
from em_sequence_toolkit.visualization.tree_dot import export_dot

NODE_LINE = re.compile(r'^  (root|"[01]+") \[label="(λ|[01]+)", fillcolor="(green|red|white)"\];$')
EDGE_LINE = re.compile(r'^  (root|"[01]+") -> "[01]+" \[label="[01]", style=(solid|dashed)\];$')


def _complete_tree():

    codes = {1: np.array([0, 1], dtype=np.int64), 2: np.array([0, 1, 2, 3], dtype=np.int64)}
    return build_tn(RnSet(10, codes))


def test_complete_tree_dot():

    dot = export_dot(_complete_tree())
    lines = dot.splitlines()

    assert lines[0] == "digraph Tn {"
    assert dot.endswith("}\n")
    assert '  root [label="λ", fillcolor="green"];' in lines
    assert '  "00" [label="00", fillcolor="red"];' in lines
    assert '  root -> "0" [label="0", style=solid];' in lines
    assert '  "0" -> "10" [label="1", style=solid];' in lines
    assert sum(1 for line in lines if NODE_LINE.match(line)) == 7
    assert sum(1 for line in lines if EDGE_LINE.match(line)) == 6


def test_strand_edges_dashed():

    codes = {1: np.array([1], dtype=np.int64), 2: np.array([1], dtype=np.int64)}
    dot = export_dot(build_tn(RnSet(10, codes)))

    assert '  root -> "1" [label="1", style=dashed];' in dot
    assert '  "1" -> "01" [label="0", style=dashed];' in dot
    assert '  root [label="λ", fillcolor="red"];' in dot


def test_options():

    tree = _complete_tree()

    plain = export_dot(tree, color_balance=False)
    assert "green" not in plain and "red" not in plain

    shallow = export_dot(tree, max_depth=1)
    assert '"00"' not in shallow
    assert sum(1 for line in shallow.splitlines() if EDGE_LINE.match(line)) == 2


def test_em_tree_dot_is_deterministic():

    seq, _ = generate(1200)
    index = SequenceIndex(seq)
    first = export_dot(build_tn(build_rn(index, 1000)))
    second = export_dot(build_tn(build_rn(SequenceIndex(seq), 1000)))

    assert first == second

    lines = first.splitlines()
    body = lines[3:-1]
    assert all(NODE_LINE.match(line) or EDGE_LINE.match(line) for line in body)
    # 987 vertices plus the root, one edge per non-root vertex.
    assert sum(1 for line in body if NODE_LINE.match(line)) == 988
    assert sum(1 for line in body if EDGE_LINE.match(line)) == 987
