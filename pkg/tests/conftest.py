import numpy as np
import pytest

from sblorec.graphdata import Dataset, InteractionNetwork, SocialNetwork

from oracles import interactions_from_dense, random_instance, social_from_dense


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def toy_pair(rng):
    """One random (A, B) pair as dense arrays plus wrapped networks."""
    a, b = random_instance(rng, m=6, n=8)
    return a, b, social_from_dense(a), interactions_from_dense(b)


@pytest.fixture
def fixture_20_users():
    """Fixed 20-user / 15-object instance for the reduction identities."""
    gen = np.random.default_rng(7)
    a, b = random_instance(gen, m=20, n=15, p_social=0.2, p_inter=0.25)
    # guarantee every user collected something so diffusion reaches everyone
    for i in range(20):
        if b[i].sum() == 0:
            b[i, gen.integers(0, 15)] = 1.0
    return a, b, social_from_dense(a), interactions_from_dense(b)


@pytest.fixture
def intro_example():
    """Six users, six objects; users 3 and 5 are the worked-example pair.

    User index 3 collects objects {1, 2, 3}; user index 5 collects
    {2, 3, 4, 5}; they share a social tie.
    """
    social = SocialNetwork(6, np.array([[3, 5], [0, 1], [1, 2]]))
    edges = [(3, 1), (3, 2), (3, 3), (5, 2), (5, 3), (5, 4), (5, 5), (0, 0), (1, 0)]
    inter = InteractionNetwork(6, 6, np.array(edges))
    return social, inter


def write_dataset_files(tmp_path, social, interactions, ratings=None):
    """Write a (social, interactions) pair to edge-list files."""
    social_path = tmp_path / "social.txt"
    ratings_path = tmp_path / "ratings.txt"
    with open(social_path, "w") as fh:
        for i, l in social.edges:
            fh.write(f"u{i} u{l}\n")
    with open(ratings_path, "w") as fh:
        for u, o in interactions.edges:
            r = 5 if ratings is None else ratings.get((int(u), int(o)), 5)
            fh.write(f"u{u} o{o} {r}\n")
    return social_path, ratings_path


@pytest.fixture
def dataset_files(tmp_path, fixture_20_users):
    _, _, social, inter = fixture_20_users
    # make sure every user id appears in the social file so the shared index
    # covers the full universe
    social_path = tmp_path / "social.txt"
    ratings_path = tmp_path / "ratings.txt"
    with open(social_path, "w") as fh:
        for i in range(social.m):
            fh.write(f"# user u{i}\n")
        for i, l in social.edges:
            fh.write(f"u{i} u{l}\n")
    with open(ratings_path, "w") as fh:
        for u, o in inter.edges:
            fh.write(f"u{u} o{o} 5\n")
    return social_path, ratings_path


def make_config(tmp_path, social_path, ratings_path, **overrides):
    """Write a minimal TOML config and return its path."""
    lines = [
        "[dataset]",
        'name = "toy"',
        f'social_path = "{social_path}"',
        f'ratings_path = "{ratings_path}"',
        "rating_threshold = 3.0",
        "",
        "[split]",
        f"probe_fraction = {overrides.get('probe_fraction', 0.2)}",
        f"seed_base = {overrides.get('seed_base', 11)}",
        f"seed_count = {overrides.get('seed_count', 2)}",
        *(
            [f"tuning_seed_base = {overrides['tuning_seed_base']}"]
            if "tuning_seed_base" in overrides else []
        ),
        "",
        "[classes]",
        f"cold_max = {overrides.get('cold_max', 1)}",
        f"inactive_max = {overrides.get('inactive_max', 2)}",
        f"active_min = {overrides.get('active_min', 4)}",
        f"evaluated = {overrides.get('evaluated', ['all'])!r}".replace("'", '"'),
        "",
        "[evaluation]",
        f"list_lengths = {list(overrides.get('list_lengths', [5]))}",
        "",
        "[algorithms]",
        f"selected = {list(overrides.get('selected', ['md', 'sblo']))!r}".replace("'", '"'),
        "",
        "[output]",
        f'dir = "{overrides.get("out_dir", tmp_path / "results")}"',
    ]
    extra = overrides.get("extra", "")
    if extra:
        lines.append(extra)
    path = tmp_path / "config.toml"
    path.write_text("\n".join(lines) + "\n")
    return path
