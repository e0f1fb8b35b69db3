"""Graphviz and JSON dumps of templates and runtime trees."""

from __future__ import annotations

import json

from .clausetree import AndNode, TemplateStore


def tree_to_dict(n: AndNode) -> dict:
    d = {"atom": str(n.atom), "open": list(n.open),
         "or": [{"clause": o.clause, "children": [tree_to_dict(c) for c in o.children]}
                for o in n.children]}
    if n.proof is not None:
        d["proof"] = tree_to_dict(n.proof)
    return d


def tree_to_json(n: AndNode, **extra) -> str:
    return json.dumps({**extra, "root": tree_to_dict(n)}, indent=2)


def _esc(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


class _Dot:
    def __init__(self, name: str):
        self.lines = [f'digraph "{_esc(name)}" {{', "  node [fontname=monospace];"]
        self.count = 0

    def node(self, label: str, shape: str = "box", **attrs) -> str:
        nid = f"n{self.count}"
        self.count += 1
        extra = "".join(f", {k}={v}" for k, v in attrs.items())
        self.lines.append(f'  {nid} [label="{_esc(label)}", shape={shape}{extra}];')
        return nid

    def edge(self, a: str, b: str, **attrs):
        extra = ", ".join(f"{k}={v}" for k, v in attrs.items())
        self.lines.append(f"  {a} -> {b}" + (f" [{extra}]" if extra else "") + ";")

    def add_tree(self, n: AndNode) -> str:
        me = self.node(str(n.atom), "box", style="rounded")
        for o in n.children:
            if o.children:
                dot = self.node("", "circle", style="filled", width="0.12", fixedsize="true")
                self.edge(me, dot)
                for c in o.children:
                    self.edge(dot, self.add_tree(c))
            else:
                dot = self.node("", "circle", style="filled", width="0.12", fixedsize="true")
                self.edge(me, dot)
                self.edge(dot, self.node("[]", "plaintext"))
        return me

    def text(self) -> str:
        return "\n".join(self.lines + ["}"]) + "\n"


def tree_to_dot(n: AndNode, name: str = "tree") -> str:
    d = _Dot(name)
    d.add_tree(n)
    return d.text()


def templates_to_dict(store: TemplateStore) -> list[dict]:
    out = []
    for t in store:
        out.append({
            "clause": t.index,
            "head": str(t.head),
            "body": [{"atom": str(b), "open": list(o)} for b, o in zip(t.body, t.body_open)],
        })
    return out


def templates_to_json(store: TemplateStore) -> str:
    return json.dumps(templates_to_dict(store), indent=2)


def templates_to_dot(store: TemplateStore) -> str:
    """Clause-trees side by side; open-list references are dashed edges to template roots."""
    d = _Dot("templates")
    roots = {}
    bodies = []
    for t in store:
        r = d.node(f"{t.index}: {t.head}", "box", style="rounded")
        roots[t.index] = r
        dot = d.node("", "circle", style="filled", width="0.12", fixedsize="true")
        d.edge(r, dot)
        if not t.body:
            d.edge(dot, d.node("[]", "plaintext"))
        for b, o in zip(t.body, t.body_open):
            bn = d.node(str(b), "box", style="rounded")
            d.edge(dot, bn)
            bodies.append((bn, o))
    for bn, refs in bodies:
        for j in refs:
            d.edge(bn, roots[j], style="dashed", constraint="false")
    return d.text()
