"""Closed braids as PD codes, for randomized tests."""

from khtangle.diagram import diagram_from_pd, diagram_is_planar


def braid_pd(n_strands, word):
    """Closure of a braid word (letters +-i for sigma_i^{+-1}, 1 <= i < n_strands).

    Strands run upward; each crossing is listed from its incoming under-arc,
    counterclockwise.
    """
    label = iter(range(1, 10**6))
    start = [next(label) for _ in range(n_strands)]
    cur = list(start)
    crossings = []
    for g in word:
        i = abs(g) - 1
        bl, br = cur[i], cur[i + 1]
        tl, tr = next(label), next(label)
        if g > 0:
            crossings.append([bl, br, tr, tl])  # under strand bottom-left to top-right
        else:
            crossings.append([br, tr, tl, bl])  # under strand bottom-right to top-left
        cur[i], cur[i + 1] = tl, tr
    alias = dict(zip(cur, start))
    ids = {}
    pd = [[ids.setdefault(alias.get(a, a), len(ids) + 1) for a in c] for c in crossings]
    d = diagram_from_pd(pd)
    assert diagram_is_planar(d)
    return d
