"""Ingestion and exact manipulation of Stark-unit minimal-polynomial data.

The input to the whole pipeline is a pair of polynomials r1, r2 over a
real quadratic field K, together with the tower of field extensions their
relevant roots live in.  This module owns that data plane: the PolyData
and StarkDataset containers, the tau-conjugation of coefficients, the
quadratic-substitution factorisation f(t^2/scale) = g(t) * g(-t), and the
JSON serialisation of all of it.  Everything after parsing is exact; the
factorisation uses certified numerics only to *guess* coefficients, which
are then verified by exact polynomial multiplication over K.
"""

from __future__ import annotations

import json
from importlib import resources

import mpmath
from sympy import isprime

from .exact import (
    QQ,
    Ball,
    EmbeddingFiber,
    QuadElement,
    QuadField,
    ReconstructionError,
    TowerElement,
    TowerSpec,
    qq,
    rational_reconstruct,
    tower_from_json,
    tower_to_json,
)
from .exact.embed import PrecisionError, _eps
from .exact.tower import _coeff_from_json, _coeff_to_json
from .towers import d_ell

PROVENANCES = ("ingested-numeric", "paper-fixture", "computed")


class StarkDataError(ValueError):
    pass


# ---------------------------------------------------------------------------
# polynomials with exact coefficients
# ---------------------------------------------------------------------------


def _poly_trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and _is_zero_coeff(coeffs[-1]):
        coeffs.pop()
    return coeffs


def _is_zero_coeff(c) -> bool:
    if isinstance(c, (QuadElement, TowerElement)):
        return c == 0
    return c == 0


def poly_mul(f, g):
    out = [f[0] * 0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        for j, b in enumerate(g):
            out[i + j] = out[i + j] + a * b
    return out


class PolyData:
    """Dense exact polynomial, coefficients from the constant term up."""

    __slots__ = ("variable", "coeffs", "provenance")

    def __init__(self, coeffs, variable: str = "t", provenance: str = "computed"):
        if provenance not in PROVENANCES:
            raise StarkDataError(f"unknown provenance {provenance!r}")
        coeffs = _poly_trim(coeffs)
        if not coeffs:
            raise StarkDataError("zero polynomial")
        field = None
        for c in coeffs:
            if isinstance(c, QuadElement):
                field = c.field
                break
            if isinstance(c, TowerElement):
                field = None
                break
        if field is not None:
            coeffs = [
                c if isinstance(c, QuadElement) else field.element(qq(c)) for c in coeffs
            ]
        self.coeffs = tuple(coeffs)
        self.variable = variable
        self.provenance = provenance

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self):
        return self.coeffs[-1]

    @property
    def field(self):
        c = self.coeffs[0]
        return c.field if isinstance(c, QuadElement) else None

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyData) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        if isinstance(x, TowerElement):
            cs = [x.tower.element(c) if not isinstance(c, TowerElement) else c for c in self.coeffs]
        else:
            cs = self.coeffs
        acc = cs[-1]
        for c in reversed(cs[:-1]):
            acc = acc * x + c
        return acc

    def monic(self) -> PolyData:
        if _is_one(self.lead):
            return self
        inv = self.lead.inverse() if hasattr(self.lead, "inverse") else 1 / self.lead
        return PolyData([c * inv for c in self.coeffs], self.variable, "computed")

    def negated_variable(self) -> PolyData:
        """f(-t)."""
        out = [c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)]
        return PolyData(out, self.variable, "computed")

    def scaled(self, s) -> PolyData:
        return PolyData([c * s for c in self.coeffs], self.variable, "computed")

    def mul(self, other: PolyData) -> PolyData:
        return PolyData(poly_mul(self.coeffs, other.coeffs), self.variable, "computed")

    def palindromic_unit(self):
        """u with coeff_k = u * coeff_(deg - k) for all k, or None."""
        m = self.degree
        u = self.coeffs[0] * self.coeffs[m].inverse()
        for k in range(m + 1):
            if self.coeffs[k] != u * self.coeffs[m - k]:
                return None
        return u

    def to_json(self) -> dict:
        return {
            "variable": self.variable,
            "provenance": self.provenance,
            "coeffs": [_value_to_json(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, obj: dict, tower: TowerSpec) -> PolyData:
        coeffs = [_value_from_json(c, tower) for c in obj["coeffs"]]
        return cls(coeffs, obj.get("variable", "t"), obj.get("provenance", "computed"))

    def __repr__(self) -> str:
        return f"PolyData(deg={self.degree}, var={self.variable!r}, {self.provenance})"


def _is_one(c) -> bool:
    return c == 1


def _value_to_json(c) -> dict:
    if isinstance(c, TowerElement):
        obj = _coeff_to_json(c.nested, c.tower.depth)
        obj["depth"] = c.tower.depth
        return obj
    if isinstance(c, QuadElement):
        obj = _coeff_to_json(c, 0)
        obj["depth"] = 0
        return obj
    raise StarkDataError(f"cannot serialise coefficient {c!r}")


def _value_from_json(obj: dict, tower: TowerSpec):
    depth = int(obj.get("depth", 0))
    if depth > tower.depth:
        raise StarkDataError("coefficient depth exceeds the tower")
    nested = _coeff_from_json(obj, tower.subtower(depth), depth)
    if depth == 0:
        return nested
    return TowerElement(tower.subtower(depth), nested)


# ---------------------------------------------------------------------------
# tau conjugation
# ---------------------------------------------------------------------------


def apply_tau(f: PolyData) -> PolyData:
    """Conjugate every coefficient: a + b*sqrt(D) -> a - b*sqrt(D)."""
    out = []
    for c in f.coeffs:
        if isinstance(c, QuadElement):
            out.append(c.conj())
        elif isinstance(c, TowerElement):
            out.append(c.map_leaves(lambda q: q.conj(), target=c.tower.conjugated()))
        else:
            out.append(c)
    return PolyData(out, f.variable, "computed")


# ---------------------------------------------------------------------------
# the quadratic-substitution factorisation
# ---------------------------------------------------------------------------


def quad_sub_factor(
    f: PolyData,
    scale=1,
    precision: int = 320,
    height_bound: int = 10**10,
    max_den: int = 16,
):
    """Split the monic normalisation of f(t^2/scale) as g(t) * g~(t).

    g~ is the monic mate (-1)^deg(f) * g(-t), so g * g~ equals the
    normalised even polynomial exactly.  Which of the pair is "g" is not
    decided here; callers that care try both.  Roots are found with
    certified numerics, grouped into the two sign classes using closure
    under complex conjugation, and the coefficients of the candidate
    factor are reconstructed into K and verified by exact multiplication.
    """
    field = f.field
    if field is None:
        raise StarkDataError("quadratic-substitution factoring needs coefficients in K")
    fm = f.monic()
    m = fm.degree
    if isinstance(scale, int):
        scale = field.element(qq(scale))
    if not isinstance(scale, QuadElement):
        raise StarkDataError("scale must be an element of K (or an integer)")

    # monic even polynomial G(t) = scale^m * f(t^2/scale)
    G = [field.element(qq(0))] * (2 * m + 1)
    for k, c in enumerate(fm.coeffs):
        G[2 * k] = c * scale ** (m - k)

    last_error = None
    prec = precision
    for _ in range(3):
        try:
            return _factor_attempt(G, m, field, prec, height_bound, max_den, f.variable)
        except (PrecisionError, StarkDataError) as exc:
            last_error = exc
            prec *= 2
    raise StarkDataError(
        f"no factorisation of the g(t)*g(-t) shape found up to {prec // 2} bits; "
        f"the input is outside the expected pattern ({last_error})"
    )


def _factor_attempt(G, m, field, prec, height_bound, max_den, variable):
    tower = TowerSpec(field, []).extend("qsplit", G[:-1])
    fiber = EmbeddingFiber(tower, precision=prec)
    with mpmath.workprec(fiber.wprec):
        # the global sign flip just swaps g with its mate, so it can be
        # quotiented out on the principal side; the conjugate side must
        # keep both signs or the matching class may be missed
        pats_p = _sign_patterns(fiber.roots_at(1, ()), prec, quotient_flip=True)
        pats_m = _sign_patterns(fiber.roots_at(-1, ()), prec, quotient_flip=False)
        sqrt_d = fiber.sqrtD_ball(1).c.real
        tol = mpmath.mpf(2) ** -min(40, prec // 6)
        pairs = []
        for sa, roots_a in pats_p:
            for sb, roots_b in pats_m:
                aa = sa.real + sb.real
                bb = (sa.real - sb.real) / sqrt_d
                for q in range(1, max_den + 1):
                    fa = abs(aa * q - mpmath.nint(aa * q))
                    fb = abs(bb * q - mpmath.nint(bb * q))
                    if fa < tol and fb < tol:
                        pairs.append((roots_a, roots_b))
                        break
        for roots_a, roots_b in pairs[:64]:
            ca = _poly_from_roots(roots_a)
            cb = _poly_from_roots(roots_b)
            try:
                coeffs = [
                    rational_reconstruct((ca[k], cb[k]), field, height_bound=height_bound)
                    for k in range(m)
                ]
            except (ReconstructionError, PrecisionError):
                continue
            coeffs.append(field.element(qq(1)))
            g = PolyData(coeffs, variable, "computed")
            mate = g.negated_variable()
            if m % 2 == 1:
                mate = mate.scaled(field.element(qq(-1)))
            if poly_mul(g.coeffs, mate.coeffs) == G[: 2 * m + 1] and len(
                poly_mul(g.coeffs, mate.coeffs)
            ) == len(G):
                return g, mate
    raise StarkDataError("no sign class reconstructed into K")


def _sign_patterns(roots, prec, quotient_flip=False):
    """All conjugation-closed choices of one root per +- pair.

    Returns a list of (sum-of-roots, chosen-ball-tuple).  With
    quotient_flip the first group's sign is pinned, halving the list.
    """
    n = len(roots)
    thresh = mpmath.mpf(2) ** -(prec // 2)
    centers = [b.c for b in roots]
    scale = max(abs(c) for c in centers) + 1

    mate = [None] * n
    for i in range(n):
        if mate[i] is not None:
            continue
        best, best_v = None, None
        for j in range(n):
            if j == i or mate[j] is not None:
                continue
            v = abs(centers[i] + centers[j])
            if best_v is None or v < best_v:
                best, best_v = j, v
        if best is None or best_v > thresh * scale:
            raise StarkDataError("root set is not symmetric under negation")
        mate[i], mate[best] = best, i

    reps = [i for i in range(n) if i < mate[i]]

    def conj_link(i):
        target = mpmath.conj(centers[i])
        for j in reps:
            for sign in (1, -1):
                if abs(target - sign * centers[j]) < thresh * scale:
                    return j, sign
        raise StarkDataError("root set is not closed under complex conjugation")

    groups = []
    seen = set()
    for i in reps:
        if i in seen:
            continue
        j, sign = conj_link(i)
        seen.add(i)
        if j == i:
            groups.append([(i, 1)])
        else:
            seen.add(j)
            groups.append([(i, 1), (j, sign)])

    out = []
    fixed = 1 if quotient_flip else 0
    for bits in range(1 << max(0, len(groups) - fixed)):
        chosen = []
        for gi, members in enumerate(groups):
            shift = gi - fixed
            gsign = 1 if shift < 0 else (1 if (bits >> shift) & 1 == 0 else -1)
            for idx, rel in members:
                s = gsign * rel
                chosen.append(roots[idx] if s == 1 else roots[mate[idx]])
        total = mpmath.fsum(b.c for b in chosen)
        out.append((total, tuple(chosen)))
    return out


def _poly_from_roots(roots):
    one = Ball(mpmath.mpc(1), mpmath.mpf(0))
    acc = [one]
    for r in roots:
        nxt = [acc[0] * (-r)]
        for k in range(1, len(acc)):
            nxt.append(acc[k - 1] - r * acc[k])
        nxt.append(one)
        # keep radii honest: the root balls already carry their error
        nxt[0] = Ball(nxt[0].c, nxt[0].r + abs(nxt[0].c) * _eps())
        acc = nxt
    return acc


# ---------------------------------------------------------------------------
# datasets
# ---------------------------------------------------------------------------


class StarkDataset:
    """Everything needed to run the pipeline for one dimension d = 4p."""

    __slots__ = ("d", "p", "D", "ell", "r1", "r2", "tower", "roots", "sigma")

    def __init__(self, d, p, D, ell, tower, r1=None, r2=None, roots=None, sigma=None):
        self.d, self.p, self.D, self.ell = d, p, D, ell
        self.tower = tower
        self.r1, self.r2 = r1, r2
        self.roots = roots or {}
        self.sigma = sigma or {}
        self.validate()

    def validate(self) -> None:
        if self.d != 4 * self.p:
            raise StarkDataError(f"d = {self.d} is not 4*p for p = {self.p}")
        if self.p != 1 and not isprime(self.p):
            raise StarkDataError(f"p = {self.p} is not prime")
        if self.tower.field.D != self.D:
            raise StarkDataError("tower base field does not match D")
        if d_ell(self.D, self.ell) != self.d:
            raise StarkDataError(
                f"d = {self.d} is not the ell = {self.ell} dimension over D = {self.D}"
            )
        if self.r1 is not None:
            want = (self.p - 1) // (3 * self.ell)
            if (self.p - 1) % (3 * self.ell) != 0 or self.r1.degree != want:
                raise StarkDataError(
                    f"deg r1 = {self.r1.degree}, expected (p-1)/(3 ell) = {want}"
                )
            if self.r1.provenance == "paper-fixture" and self.r1.palindromic_unit() is None:
                raise StarkDataError("r1 fixture is not palindromic")
        if self.r2 is not None:
            want = (self.p - 1) // self.ell
            if (self.p - 1) % self.ell != 0 or self.r2.degree != want:
                raise StarkDataError(f"deg r2 = {self.r2.degree}, expected (p-1)/ell = {want}")
            if self.r2.provenance == "paper-fixture" and self.r2.palindromic_unit() is None:
                raise StarkDataError("r2 fixture is not palindromic")
        for key in self.roots:
            if key not in ("alpha0", "beta0"):
                raise StarkDataError(f"unknown root entry {key!r}")
        names = {lv.name for lv in self.tower.levels}
        for key in self.sigma:
            if key not in names:
                raise StarkDataError(f"sigma image for unknown generator {key!r}")

    @property
    def has_stark_data(self) -> bool:
        return self.r1 is not None and self.r2 is not None

    def to_json(self) -> dict:
        obj = {
            "d": self.d,
            "p": self.p,
            "D": self.D,
            "ell": self.ell,
            "tower": tower_to_json(self.tower),
            "r1": self.r1.to_json() if self.r1 else None,
            "r2": self.r2.to_json() if self.r2 else None,
            "roots": {k: _value_to_json(v) for k, v in self.roots.items()} or None,
            "sigma": {"images": {k: _value_to_json(v) for k, v in self.sigma.items()}}
            if self.sigma
            else None,
        }
        return obj

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)

    @classmethod
    def from_json(cls, obj: dict) -> StarkDataset:
        try:
            tower = tower_from_json(obj["tower"], family=True)
            r1 = PolyData.from_json(obj["r1"], tower) if obj.get("r1") else None
            r2 = PolyData.from_json(obj["r2"], tower) if obj.get("r2") else None
            roots = {
                k: _value_from_json(v, tower) for k, v in (obj.get("roots") or {}).items()
            }
            sigma = {
                k: _value_from_json(v, tower)
                for k, v in (obj.get("sigma") or {}).get("images", {}).items()
            }
            return cls(
                obj["d"], obj["p"], obj["D"], obj["ell"], tower, r1, r2, roots, sigma
            )
        except (KeyError, ValueError, TypeError) as exc:
            if isinstance(exc, StarkDataError):
                raise
            raise StarkDataError(f"malformed dataset: {exc}") from exc

    @classmethod
    def loads(cls, text: str) -> StarkDataset:
        return cls.from_json(json.loads(text))


def load_dataset(name: str) -> StarkDataset:
    """Load a shipped fixture by short name ("d52") or a JSON file by path."""
    if name.endswith(".json"):
        with open(name, "r", encoding="utf-8") as fh:
            return StarkDataset.loads(fh.read())
    ref = resources.files("exactsic").joinpath(f"data/{name}.json")
    try:
        text = ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise StarkDataError(f"no shipped dataset named {name!r}") from None
    return StarkDataset.loads(text)
