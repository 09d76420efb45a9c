from hypothesis import strategies as st

from gpdsite.cli.presets import random_groupoid
from gpdsite.config import Settings
from gpdsite.site import enumerate_site_objects, enumerate_tsets

SMALL = Settings(random_max_objects=3, random_max_arrows=6)


def groupoids():
    return st.integers(min_value=0, max_value=2**16).map(
        lambda seed: random_groupoid(seed, SMALL)
    )


@st.composite
def groupoids_with_objects(draw):
    G = draw(groupoids())
    objects = draw(st.sets(st.sampled_from(sorted(G.objects))))
    return G, frozenset(objects)


@st.composite
def tset_paths(draw, length=3):
    """A random groupoid with ``length`` composable T-sets."""
    G = draw(groupoids())
    objects = enumerate_site_objects(G)
    current = draw(st.sampled_from(objects))
    path = []
    for _ in range(length):
        # never empty: the identity T-set is always there
        choices = [t for target in objects for t in enumerate_tsets(current, target)]
        t = draw(st.sampled_from(choices))
        path.append(t)
        current = t.target
    return G, path
