"""Random admissible presentations on the ten two-point quivers."""
from fractions import Fraction

from hypothesis import strategies as st

from dertype.catalog import standard_quivers
from dertype.dsl import parse_presentation


def _arrows(spec):
    out = []
    for part in spec.split(","):
        name, ends = part.strip().split(":")
        s, t = ends.split("->")
        out.append((name, s, t))
    return out


QUIVERS = {k: _arrows(v) for k, v in standard_quivers().items()}


def length_two_paths(arrows):
    """Words ``b*a`` (``a`` first) grouped by endpoints."""
    groups = {}
    for b, sb, tb in arrows:
        for a, sa, ta in arrows:
            if ta == sb:
                groups.setdefault((sa, tb), []).append(f"{b}*{a}")
    return groups


@st.composite
def presentations(draw, shapes=None, max_relations=3):
    shape = draw(st.sampled_from(sorted(shapes or QUIVERS)))
    arrows = QUIVERS[shape]
    groups = length_two_paths(arrows)
    rels = []
    if groups:
        for _ in range(draw(st.integers(0, max_relations))):
            words = groups[draw(st.sampled_from(sorted(groups)))]
            chosen = draw(st.lists(st.sampled_from(words), min_size=1, max_size=2, unique=True))
            coeffs = [Fraction(1)] + [draw(st.sampled_from([Fraction(1), Fraction(-1), Fraction(2), Fraction(1, 2)]))
                                      for _ in chosen[1:]]
            rels.append(" + ".join(f"{c}*{w}" if c != 1 else w for c, w in zip(coeffs, chosen)).replace("+ -", "- "))
    body = ", ".join(f"{n}:{s}->{t}" for n, s, t in arrows)
    return shape, parse_presentation(f"quiver {{ v 1 2; {body} }} rel {{ {'; '.join(rels)} }}")
