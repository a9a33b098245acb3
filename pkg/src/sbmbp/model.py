"""Sparse stochastic block model with unequal groups.

Groups are indexed ``0..q-1`` internally; the text file format uses 1-based
labels. Edge probabilities are ``p_ab = c_ab / n``.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._validation import check_affinity, check_labels, check_prior
from .exceptions import InvalidParameterError


@dataclass(frozen=True, eq=False)
class BlockModelSpec:
    """Full generative parameter set: size, group prior and affinity matrix."""

    n: int
    gamma: np.ndarray
    affinity: np.ndarray

    def __post_init__(self):
        if int(self.n) < 1:
            raise InvalidParameterError(f"n must be >= 1, got {self.n}")
        gamma = check_prior(np.array(self.gamma, dtype=float))
        affinity = check_affinity(np.array(self.affinity, dtype=float), q=gamma.size)
        gamma.setflags(write=False)
        affinity.setflags(write=False)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "affinity", affinity)

    @property
    def q(self):
        return self.gamma.size

    def __eq__(self, other):
        if not isinstance(other, BlockModelSpec):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.gamma, other.gamma)
            and np.array_equal(self.affinity, other.affinity)
        )

    __hash__ = None


def equally_spaced_offsets(q):
    """Offsets ``a - (q+1)/2`` for ``a = 1..q``."""
    return np.arange(1, q + 1, dtype=float) - 0.5 * (q + 1)


def group_sizes(q, delta, zeta=None):
    """Group prior ``gamma_a = (1 + delta * zeta_a) / q``.

    ``zeta`` defaults to equally spaced offsets and must sum to zero.
    """
    if q < 2:
        raise InvalidParameterError(f"need at least 2 groups, got q={q}")
    zeta = equally_spaced_offsets(q) if zeta is None else np.asarray(zeta, float)
    if zeta.shape != (q,):
        raise InvalidParameterError(f"zeta must have {q} entries")
    if abs(zeta.sum()) > 1e-12:
        raise InvalidParameterError(f"zeta must sum to zero, sums to {zeta.sum()!r}")
    scaled = 1.0 + delta * zeta
    bad = np.flatnonzero(scaled <= 0)
    if bad.size:
        a = int(bad[0])
        raise InvalidParameterError(
            f"group {a + 1} gets non-positive size (1 + {delta}*{zeta[a]})/{q}"
        )
    return check_prior(scaled / q)


def gamma_bar(gamma):
    """Chance-level overlap ``sum_a gamma_a**2``."""
    gamma = np.asarray(gamma, dtype=float)
    return float(gamma @ gamma)


def affinity_from_strength(c, epsilon, gamma):
    """Two-value affinity ``c_ab = c + (delta_ab - gamma_bar) * epsilon``.

    Keeps the mean degree at ``c`` while ``epsilon = c_in - c_out``.
    """
    gamma = check_prior(gamma)
    gb = gamma_bar(gamma)
    c_out = c - gb * epsilon
    c_in = c + (1.0 - gb) * epsilon
    if c_out < 0 or c_in < 0:
        raise InvalidParameterError(
            f"c={c}, epsilon={epsilon} imply c_in={c_in:.6g}, c_out={c_out:.6g}; both must be >= 0"
        )
    q = gamma.size
    out = np.full((q, q), c_out)
    np.fill_diagonal(out, c_in)
    return out


def disassortative_affinity(c, gamma):
    """Planted-coloring affinity: zero diagonal, ``c_out = c / (1 - gamma_bar)``."""
    gamma = check_prior(gamma)
    gb = gamma_bar(gamma)
    if gb >= 1.0:
        raise InvalidParameterError("disassortative model needs at least 2 groups")
    if c < 0:
        raise InvalidParameterError(f"mean degree must be >= 0, got {c}")
    q = gamma.size
    out = np.full((q, q), c / (1.0 - gb))
    np.fill_diagonal(out, 0.0)
    return out


def degree_profile(spec_or_gamma, affinity=None):
    """Return ``(c_a, c)``: expected degree per group and overall mean degree."""
    if isinstance(spec_or_gamma, BlockModelSpec):
        gamma, affinity = spec_or_gamma.gamma, spec_or_gamma.affinity
    else:
        gamma = np.asarray(spec_or_gamma, dtype=float)
        affinity = np.asarray(affinity, dtype=float)
    c_a = affinity @ gamma
    return c_a, float(gamma @ c_a)


@dataclass(frozen=True)
class SymmetricFamily:
    """Two-parameter family: fixed mean degree ``c``, strength ``epsilon``,
    asymmetry ``delta``.

    With ``disassortative=True`` the diagonal is zero and ``epsilon`` is
    implied by ``c`` (it equals ``-c_out``); the stored value is ignored.
    """

    q: int
    c: float
    epsilon: float = 0.0
    delta: float = 0.0
    zeta: tuple = None
    disassortative: bool = False

    def prior(self):
        return group_sizes(self.q, self.delta, self.zeta)

    def affinity(self):
        gamma = self.prior()
        if self.disassortative:
            return disassortative_affinity(self.c, gamma)
        return affinity_from_strength(self.c, self.epsilon, gamma)

    def spec(self, n):
        spec = BlockModelSpec(n, self.prior(), self.affinity())
        check_affinity(spec.affinity, n=n)
        return spec

    def replace(self, **changes):
        from dataclasses import replace

        return replace(self, **changes)

    def to_dict(self):
        return {
            "q": self.q,
            "c": self.c,
            "epsilon": self.epsilon,
            "delta": self.delta,
            "zeta": None if self.zeta is None else list(self.zeta),
            "disassortative": self.disassortative,
        }


@dataclass(frozen=True, eq=False)
class Network:
    """Undirected simple graph with optional planted labels.

    ``edges`` is an ``(m, 2)`` array with ``i < j``, sorted lexicographically.
    Adjacency is stored CSR-style: the neighbors of ``i`` are
    ``indices[indptr[i]:indptr[i+1]]`` (sorted). Position ``p`` in that layout
    also names the directed edge ``i -> indices[p]``; ``reverse[p]`` is the
    position of the opposite direction.
    """

    n: int
    edges: np.ndarray
    labels: np.ndarray = None
    spec: BlockModelSpec = None

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise InvalidParameterError(f"n must be >= 1, got {n}")
        edges = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise InvalidParameterError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                k = int(np.flatnonzero(edges[:, 0] == edges[:, 1])[0])
                raise InvalidParameterError(f"self-loop at node {edges[k, 0]}")
            edges = np.sort(edges, axis=1)
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            edges = edges[order]
            dup = np.all(edges[1:] == edges[:-1], axis=1)
            if np.any(dup):
                i, j = edges[int(np.flatnonzero(dup)[0])]
                raise InvalidParameterError(f"duplicate edge ({i}, {j})")
        edges.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", edges)
        if self.spec is not None and self.spec.n != n:
            raise InvalidParameterError("spec.n does not match network size")
        if self.labels is not None:
            q = self.spec.q if self.spec is not None else int(np.max(self.labels)) + 1
            labels = check_labels(self.labels, n, q).copy()
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @property
    def m(self):
        return len(self.edges)

    @property
    def q(self):
        if self.spec is None:
            raise InvalidParameterError("network carries no block-model spec")
        return self.spec.q

    def _build_csr(self):
        n, e = self.n, self.edges
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        # position of (dst -> src) among sorted (src, dst) keys
        keys = src * n + dst
        reverse = np.searchsorted(keys, dst * n + src)
        for arr in (indptr, dst, reverse, src):
            arr.setflags(write=False)
        return indptr, dst, reverse, src

    @cached_property
    def csr(self):
        return self._build_csr()

    @property
    def indptr(self):
        return self.csr[0]

    @property
    def indices(self):
        return self.csr[1]

    @property
    def reverse(self):
        return self.csr[2]

    @property
    def owners(self):
        """Source node of every directed edge position."""
        return self.csr[3]

    @cached_property
    def degrees(self):
        d = np.diff(self.indptr)
        d.setflags(write=False)
        return d

    def neighbors(self, i):
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def edge_position(self, i, j):
        """CSR position of the directed edge ``i -> j``."""
        nbrs = self.neighbors(i)
        k = np.searchsorted(nbrs, j)
        if k >= nbrs.size or nbrs[k] != j:
            raise InvalidParameterError(f"({i}, {j}) is not an edge")
        return int(self.indptr[i] + k)

    def adjacency(self):
        import scipy.sparse as sp

        data = np.ones(2 * self.m)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def with_edges(self, edges):
        return Network(self.n, edges, self.labels, self.spec)

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        same_labels = (self.labels is None and other.labels is None) or (
            self.labels is not None
            and other.labels is not None
            and np.array_equal(self.labels, other.labels)
        )
        return (
            self.n == other.n
            and np.array_equal(self.edges, other.edges)
            and same_labels
            and self.spec == other.spec
        )

    __hash__ = None


def _sample_labels(spec, rng, exact_sizes):
    if exact_sizes:
        raw = spec.n * spec.gamma
        counts = np.floor(raw).astype(np.int64)
        # largest remainders take the leftover nodes
        short = spec.n - counts.sum()
        counts[np.argsort(-(raw - counts), kind="stable")[:short]] += 1
        labels = np.repeat(np.arange(spec.q), counts)
        return rng.permutation(labels)
    return rng.choice(spec.q, size=spec.n, p=spec.gamma)


def _pairs_within(k, size):
    """Decode triangular pair indices into ``(i, j)`` with ``i < j < size``."""
    k = np.asarray(k, dtype=np.int64)
    j = ((1.0 + np.sqrt(1.0 + 8.0 * k)) / 2.0).astype(np.int64)
    # fix float rounding at triangular boundaries
    j -= (j * (j - 1) // 2) > k
    j += ((j + 1) * j // 2) <= k
    i = k - j * (j - 1) // 2
    return i, j


def sample_network(spec, seed=None, exact_sizes=False):
    """Draw labels from the prior, then each pair independently with ``c_ab/n``.

    Per group pair the edge count is Binomial and the endpoints are a uniform
    subset of the allowed pairs, which is equivalent to independent pair draws
    but costs O(m).
    """
    rng = np.random.default_rng(seed)
    check_affinity(spec.affinity, n=spec.n)
    labels = _sample_labels(spec, rng, exact_sizes)
    members = [np.flatnonzero(labels == a) for a in range(spec.q)]
    chunks = []
    for a in range(spec.q):
        for b in range(a, spec.q):
            p = spec.affinity[a, b] / spec.n
            na, nb = members[a].size, members[b].size
            n_pairs = na * (na - 1) // 2 if a == b else na * nb
            if p == 0 or n_pairs == 0:
                continue
            k = rng.binomial(n_pairs, p)
            if k == 0:
                continue
            picks = rng.choice(n_pairs, size=k, replace=False)
            if a == b:
                i, j = _pairs_within(picks, na)
                chunks.append(np.column_stack([members[a][i], members[a][j]]))
            else:
                chunks.append(
                    np.column_stack([members[a][picks // nb], members[b][picks % nb]])
                )
    edges = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    return Network(spec.n, edges, labels, spec)
