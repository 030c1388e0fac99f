"""Lie brackets as structure-constant tensors on a split vector space.

The ambient space is R^(q+n) with a fixed orthonormal basis.  The first q
basis vectors span the isotropy part k, the remaining n span the tangent
part p.  A bracket mu is stored densely as the rank-3 tensor

    c[i, j, k] = <mu(X_i, X_j), X_k>,

antisymmetric in (i, j).  The background inner product is the identity in
this basis with <k, p> = 0, so changing the metric on the underlying
homogeneous space always means changing mu, never the inner product.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Dimensions",
    "LieBracket",
    "ConditionReport",
    "DimensionMismatchError",
    "bracket_norm",
    "scale_bracket",
    "pi_action",
    "transform_bracket",
    "jacobiator",
    "check_conditions",
    "adjoint_matrices",
    "random_bracket",
    "random_two_step_nilpotent",
]

DEFAULT_TOL = 1e-10


class DimensionMismatchError(ValueError):
    """Operand shapes do not match the declared (q, n) split."""


@dataclass(frozen=True)
class Dimensions:
    """Isotropy dimension q >= 0 and space dimension n >= 1.

    Indices 0..q-1 span k, indices q..q+n-1 span p.
    """

    q: int
    n: int

    def __post_init__(self):
        if self.q < 0 or self.n < 1:
            raise ValueError(f"need q >= 0 and n >= 1, got q={self.q}, n={self.n}")

    @property
    def d(self) -> int:
        return self.q + self.n

    @property
    def k_slice(self) -> slice:
        return slice(0, self.q)

    @property
    def p_slice(self) -> slice:
        return slice(self.q, self.d)


@dataclass(frozen=True)
class LieBracket:
    """A skew-symmetric algebra structure on R^(q+n).

    The entries with i < j are authoritative: construction mirrors them to
    i > j and zeroes the diagonal, so any tensor passed in comes out exactly
    antisymmetric in the first two slots.  Instances are immutable; the
    tensor is marked read-only.
    """

    dims: Dimensions
    c: np.ndarray

    def __post_init__(self):
        d = self.dims.d
        c = np.asarray(self.c, dtype=float)
        if c.shape != (d, d, d):
            raise DimensionMismatchError(
                f"structure tensor must have shape {(d, d, d)}, got {c.shape}"
            )
        iu, ju = np.triu_indices(d, k=1)
        skew = np.zeros((d, d, d))
        skew[iu, ju, :] = c[iu, ju, :]
        skew[ju, iu, :] = -c[iu, ju, :]
        skew.setflags(write=False)
        object.__setattr__(self, "c", skew)

    @classmethod
    def from_triples(cls, q, n, triples, one_indexed=False):
        """Build a bracket from sparse (i, j, k, value) entries.

        Args:
            q, n: the k/p split.
            triples: iterable of (i, j, k, value) with <mu(X_i, X_j), X_k> = value.
                Entries with i > j are accepted and folded into the i < j slot.
            one_indexed: interpret indices as 1-based (as written in hand
                calculations) instead of 0-based.

        Raises:
            ValueError: on out-of-range indices, i == j, or two entries that
                disagree on the same unordered pair.
        """
        dims = Dimensions(q, n)
        d = dims.d
        off = 1 if one_indexed else 0
        seen: dict[tuple[int, int, int], float] = {}
        for entry in triples:
            i, j, k, v = entry
            i, j, k = int(i) - off, int(j) - off, int(k) - off
            if not (0 <= i < d and 0 <= j < d and 0 <= k < d):
                raise ValueError(f"bracket entry {entry}: index out of range for d={d}")
            if i == j:
                raise ValueError(f"bracket entry {entry}: i == j makes no sense for a skew bracket")
            key = (min(i, j), max(i, j), k)
            sv = float(v) if i < j else -float(v)
            if key in seen and seen[key] != sv:
                raise ValueError(f"bracket entry {entry}: conflicts with an earlier entry on pair {key[:2]}")
            seen[key] = sv
        c = np.zeros((d, d, d))
        for (i, j, k), v in seen.items():
            c[i, j, k] = v
        return cls(dims, c)

    @classmethod
    def zero(cls, q, n):
        dims = Dimensions(q, n)
        return cls(dims, np.zeros((dims.d,) * 3))


@dataclass(frozen=True)
class ConditionReport:
    """Residuals of the homogeneity conditions for a bracket.

    All residuals vanish (up to tolerance) exactly when the bracket is a Lie
    bracket compatible with the k + p split and the background inner product.
    The closedness of the isotropy subgroup is not computable from structure
    constants; it travels as the human-authored h2_note.
    """

    jacobi_residual: float
    h1_residual: float
    h3_residual: float
    h4_kernel_dim: int
    h2_note: str = ""

    def passes(self, tol: float = DEFAULT_TOL, require_h4: bool = True) -> bool:
        ok = (
            self.jacobi_residual <= tol
            and self.h1_residual <= tol
            and self.h3_residual <= tol
        )
        if require_h4:
            ok = ok and self.h4_kernel_dim == 0
        return ok

    def worst(self) -> tuple[str, float]:
        """Name and value of the largest residual (h4 counts as 1.0 per kernel dim)."""
        items = [
            ("jacobi_residual", self.jacobi_residual),
            ("h1_residual", self.h1_residual),
            ("h3_residual", self.h3_residual),
            ("h4_kernel_dim", float(self.h4_kernel_dim)),
        ]
        return max(items, key=lambda kv: kv[1])


def bracket_norm(mu: LieBracket) -> float:
    """Norm sqrt(sum c[i,j,k]^2) over all ordered index triples."""
    return float(np.sqrt(np.sum(mu.c * mu.c)))


def scale_bracket(mu: LieBracket, s: float) -> LieBracket:
    return LieBracket(mu.dims, s * mu.c)


def _extend_on_p(dims: Dimensions, a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.shape != (dims.n, dims.n):
        raise DimensionMismatchError(
            f"endomorphism must act on p: expected shape {(dims.n, dims.n)}, got {a.shape}"
        )
    abar = np.zeros((dims.d, dims.d))
    abar[dims.p_slice, dims.p_slice] = a
    return abar


def _pi_tensor(abar: np.ndarray, c: np.ndarray) -> np.ndarray:
    # pi(A)mu = A mu(.,.) - mu(A., .) - mu(., A.); the third term is the
    # (i <-> j) mirror of the second because c is antisymmetric.
    d = c.shape[0]
    term1 = c @ abar.T
    term2 = (abar.T @ c.reshape(d, -1)).reshape(d, d, d)
    return term1 - term2 + np.transpose(term2, (1, 0, 2))


def pi_action(a: np.ndarray, mu: LieBracket) -> LieBracket:
    """Apply the representation pi(diag(0, a)) to a bracket.

    The n x n matrix `a` acts on p and is extended by zero on k.  Returns
    A mu(.,.) - mu(A., .) - mu(., A.) as a new bracket.
    """
    abar = _extend_on_p(mu.dims, a)
    return LieBracket(mu.dims, _pi_tensor(abar, mu.c))


def transform_bracket(mu: LieBracket, g: np.ndarray) -> LieBracket:
    """Push a bracket through an invertible map: (g.mu)(x,y) = g mu(g^-1 x, g^-1 y).

    `g` is a full d x d change of frame; for q = 0 this is the GL(n) action
    used to trade a metric change for a bracket change.
    """
    d = mu.dims.d
    g = np.asarray(g, dtype=float)
    if g.shape != (d, d):
        raise DimensionMismatchError(f"expected shape {(d, d)}, got {g.shape}")
    ginv = np.linalg.inv(g)
    c = np.einsum("ai,bj,km,abm->ijk", ginv, ginv, g, mu.c)
    return LieBracket(mu.dims, c)


def jacobiator(mu: LieBracket) -> np.ndarray:
    """Components of mu(mu(x,y),z) + mu(mu(y,z),x) + mu(mu(z,x),y) on the basis."""
    c = mu.c
    return (
        np.einsum("ijm,mlk->ijlk", c, c)
        + np.einsum("jlm,mik->ijlk", c, c)
        + np.einsum("lim,mjk->ijlk", c, c)
    )


def adjoint_matrices(mu: LieBracket) -> np.ndarray:
    """Stack of matrices ad X_i acting on all of g: ads[i][r, s] = c[i, s, r]."""
    return np.swapaxes(mu.c, 1, 2).copy()


def check_conditions(mu: LieBracket, tol: float = DEFAULT_TOL, h2_note: str = "") -> ConditionReport:
    """Measure how far a bracket is from the admissible set.

    Returns raw residuals:
      * jacobi_residual: max-norm of the Jacobiator over all basis triples;
      * h1_residual: components of mu(k,k) outside k and mu(k,p) outside p;
      * h3_residual: max over Z in the k-basis of max|ad Z|_p + (ad Z|_p)^T|,
        i.e. failure of ad(k) to act skewly on p;
      * h4_kernel_dim: dimension of {Z in k : mu(Z, p) = 0}, from the rank of
        Z -> mu(Z, .)|_p.

    `tol` is kept on the report's behalf (callers pass it to `passes`); the
    residuals themselves are exact.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    q = mu.dims.q
    c = mu.c
    jac = float(np.max(np.abs(jacobiator(mu)))) if mu.dims.d > 0 else 0.0

    h1 = 0.0
    if q > 0:
        kk_out = c[:q, :q, q:]          # mu(k,k) leaking into p
        kp_out = c[:q, q:, :q]          # mu(k,p) leaking into k
        h1 = max(
            float(np.max(np.abs(kk_out))) if kk_out.size else 0.0,
            float(np.max(np.abs(kp_out))) if kp_out.size else 0.0,
        )

    h3 = 0.0
    for z in range(q):
        s = c[z, q:, q:]
        h3 = max(h3, float(np.max(np.abs(s + s.T))))

    if q > 0:
        t = c[:q, q:, :].reshape(q, -1)
        h4_kernel = q - int(np.linalg.matrix_rank(t))
    else:
        h4_kernel = 0

    return ConditionReport(jac, h1, h3, h4_kernel, h2_note)


def random_bracket(q: int, n: int, rng: np.random.Generator, scale: float = 1.0) -> LieBracket:
    """Random dense antisymmetric tensor (no Jacobi identity imposed)."""
    dims = Dimensions(q, n)
    c = scale * rng.standard_normal((dims.d,) * 3)
    return LieBracket(dims, c)


def random_two_step_nilpotent(n: int, rng: np.random.Generator, center_dim: int | None = None) -> LieBracket:
    """Random two-step nilpotent bracket with q = 0.

    The basis splits into v (first n - z vectors) and a central part z; the
    only nonzero structure constants send v ^ v into the center, so the
    Jacobi identity holds exactly (every iterated bracket dies).
    """
    if n < 3:
        raise ValueError("need n >= 3 for a nonabelian two-step algebra")
    z = center_dim if center_dim is not None else max(1, n - 3)
    if not 1 <= z <= n - 2:
        raise ValueError(f"center_dim must lie in [1, {n - 2}]")
    m = n - z
    c = np.zeros((n, n, n))
    for i in range(m):
        for j in range(i + 1, m):
            c[i, j, m:] = rng.standard_normal(z)
    return LieBracket(Dimensions(0, n), c)
