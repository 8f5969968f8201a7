"""
DOT rendering of T_n. Balanced vertices are green, the rest red; edges leaving
a unary vertex belong to a strand and are dashed.
"""

BALANCED_COLOR = "green"
UNBALANCED_COLOR = "red"
ROOT_ID = "root"


def _node_id(word):
    return ROOT_ID if word == "" else '"{}"'.format(word)


def export_dot(tree, color_balance=True, max_depth=None):
    """
    Render a tree as a DOT digraph.

    Parameters
    ----------
    tree: TnTree

    color_balance: bool
        Fill vertices by balance

    max_depth: int or None
        Drop vertices deeper than this

    Returns
    -------
    str
        DOT text, vertices in word-lexicographic order, children 0 before 1
    """
    vertices = [w for w in tree.vertices() if max_depth is None or len(w) <= max_depth]

    lines = [
        "digraph Tn {",
        '  graph [label="T_n, n={}, {} non-root vertices", rankdir=TB];'.format(tree.n, tree.vertex_count()),
        "  node [shape=box, style=filled, fontname=monospace];",
    ]

    for word in vertices:
        attributes = ['label="{}"'.format(word if word else "λ")]
        if color_balance:
            color = BALANCED_COLOR if tree.is_balanced(word) else UNBALANCED_COLOR
            attributes.append('fillcolor="{}"'.format(color))
        else:
            attributes.append('fillcolor="white"')
        lines.append("  {} [{}];".format(_node_id(word), ", ".join(attributes)))

    for word in vertices:
        style = "dashed" if tree.is_unary(word) else "solid"
        for child in tree.children(word):
            if max_depth is not None and len(child) > max_depth:
                continue
            lines.append(
                '  {} -> {} [label="{}", style={}];'.format(_node_id(word), _node_id(child), child[0], style)
            )

    lines.append("}")

    return "\n".join(lines) + "\n"
