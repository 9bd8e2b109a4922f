"""Free-group words, expansions into truncated series, and the
order-by-order construction of symplectic expansions.

The fundamental group of a once-punctured genus-g surface is free on 2g
generators x_1, ..., x_{2g}; generator x_{2i-1} abelianizes to a_i and
x_{2i} to b_i.  An expansion assigns each generator a group-like series
1 + [x] + (higher weight); a symplectic expansion additionally sends the
boundary word, the product of commutators

    zeta = prod_i  x_{2i-1} x_{2i} x_{2i-1}^{-1} x_{2i}^{-1},

to exp(omega) modulo the cutoff.

The solver keeps theta(x) = exp(l_x) with l_x a certified Lie element, so
group-likeness is automatic, and repairs the boundary condition degree by
degree: the weight-(n+1) discrepancy of log theta(zeta) - omega moves
exactly by sum_i ([v_i^a, b_i] + [a_i, v_i^b]) when the weight-n Lie
corrections v are added to the logs, and that linear map is onto because
brackets of letters against weight-n Lie elements span weight n+1.  The
correction system is solved over the Lyndon basis with free variables
pinned to zero, so the output is deterministic.
"""

from . import words as W
from .errors import InconsistentExpansions, NotCyclic, SolveFailed
from .lie import DerivationElem, exp_derivation, necklace_normal_form
from .linalg import solve_columns
from .tensors import (
    Tensor,
    TruncatedSeries,
    exp_series,
    inverse_series,
    is_grouplike,
    is_lie_element,
    log_series,
    omega,
)

GroupWord = tuple[int, ...]  # nonzero ints: +k is x_k, -k its inverse (1-based)


def free_reduce(letters) -> GroupWord:
    """Cancel adjacent inverse pairs."""
    out: list[int] = []
    for s in letters:
        if s == 0:
            raise ValueError("0 is not a generator")
        if out and out[-1] == -s:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


def group_mul(a: GroupWord, b: GroupWord) -> GroupWord:
    return free_reduce(a + b)


def group_inverse(a: GroupWord) -> GroupWord:
    return tuple(-s for s in reversed(a))


def generator_letter(signed: int) -> int:
    """Letter code of a signed generator: x_k abelianizes to letter k-1."""
    return abs(signed) - 1


def group_word_name(w: GroupWord) -> str:
    if not w:
        return "1"
    return " ".join(f"x{abs(s)}" + ("^-1" if s < 0 else "") for s in w)


def parse_group_word(text: str) -> GroupWord:
    text = text.strip()
    if not text or text == "1":
        return ()
    out = []
    for tok in text.split():
        neg = tok.endswith("^-1")
        core = tok[:-3] if neg else tok
        if not core.startswith("x") or not core[1:].isdigit() or int(core[1:]) < 1:
            raise ValueError(f"bad group generator {tok!r}")
        k = int(core[1:])
        out.append(-k if neg else k)
    return free_reduce(out)


def abelianization(w: GroupWord, g: int) -> dict[int, int]:
    out: dict[int, int] = {}
    for s in w:
        l = generator_letter(s)
        W.check_letters((l,), g)
        out[l] = out.get(l, 0) + (1 if s > 0 else -1)
    return {k: v for k, v in out.items() if v}


def boundary_word(g: int) -> GroupWord:
    """The boundary commutator word: product over i of
    x_{2i-1} x_{2i} x_{2i-1}^{-1} x_{2i}^{-1}; its abelianization is
    trivial and the degree-2 log of the naive exponential expansion of it
    is exactly the symplectic form (the sign convention matching the
    a_i . b_i = +1 pairing)."""
    if g < 1:
        raise ValueError("genus must be >= 1")
    out: list[int] = []
    for i in range(1, g + 1):
        out.extend((2 * i - 1, 2 * i, -(2 * i - 1), -(2 * i)))
    return free_reduce(out)


# -- expansions -------------------------------------------------------------


class Expansion:
    """Assignment of a truncated group-like series to each free-group
    generator; evaluation extends it multiplicatively with inverses via
    the geometric series."""

    def __init__(self, g: int, cutoff: int, series: dict[int, TruncatedSeries]):
        if cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        self.g = g
        self.cutoff = cutoff
        if set(series) != set(range(2 * g)):
            raise ValueError("need a series for each of the 2g generators")
        self.series = {l: TruncatedSeries(s.tensor, cutoff) for l, s in series.items()}
        self._inverses: dict[int, TruncatedSeries] = {}

    @classmethod
    def naive_exponential(cls, g: int, cutoff: int) -> "Expansion":
        """theta_0(x) = exp([x]); symplectic only through weight 2."""
        return cls(
            g,
            cutoff,
            {
                l: exp_series(TruncatedSeries(Tensor.letter(g, l), cutoff))
                for l in range(2 * g)
            },
        )

    def generator_series(self, signed: int) -> TruncatedSeries:
        l = generator_letter(signed)
        if signed > 0:
            return self.series[l]
        inv = self._inverses.get(l)
        if inv is None:
            inv = inverse_series(self.series[l])
            self._inverses[l] = inv
        return inv

    def evaluate(self, word: GroupWord) -> TruncatedSeries:
        acc = TruncatedSeries.unit(self.g, self.cutoff)
        for s in free_reduce(word):
            acc = acc * self.generator_series(s)
        return acc

    # -- the defining conditions -------------------------------------------

    def check_normalization(self) -> bool:
        """theta(x) = 1 + [x] modulo weight >= 2, for every generator."""
        for l, s in self.series.items():
            if s.weight_zero_coeff() != 1:
                return False
            if s.tensor.component(1) != Tensor.letter(self.g, l):
                return False
        return True

    def check_grouplike(self) -> bool:
        return all(is_grouplike(s) for s in self.series.values())

    def boundary_log_defect(self) -> Tensor:
        """log theta(zeta) - omega modulo the cutoff; zero iff the
        boundary condition holds."""
        zeta = boundary_word(self.g)
        lg = log_series(self.evaluate(zeta))
        return lg.tensor - omega(self.g).truncate(self.cutoff)

    def check_boundary(self) -> bool:
        return self.boundary_log_defect().is_zero()

    def is_symplectic(self) -> bool:
        return (
            self.check_normalization()
            and self.check_grouplike()
            and self.check_boundary()
        )

    def to_json_dict(self) -> dict:
        return {
            "g": self.g,
            "D": self.cutoff,
            "theta": {
                f"x{l + 1}": self.series[l].tensor.to_json_dict()
                for l in range(2 * self.g)
            },
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "Expansion":
        g = int(data["g"])
        cutoff = int(data["D"])
        series = {}
        for l in range(2 * g):
            t = Tensor.from_json_dict(data["theta"][f"x{l + 1}"])
            series[l] = TruncatedSeries(t, cutoff)
        return cls(g, cutoff, series)

    def __repr__(self) -> str:
        return f"Expansion(g={self.g}, D={self.cutoff})"


# -- free Lie algebra bases ---------------------------------------------------


def lyndon_words(alphabet: int, n: int) -> list[tuple[int, ...]]:
    """Lyndon words of length exactly n over 0..alphabet-1 (Duval)."""
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        m = len(w)
        if m == n:
            out.append(tuple(w))
        while len(w) < n:
            w.append(w[-m])
        while w and w[-1] == alphabet - 1:
            w.pop()
    return [t for t in out if len(t) == n]


def _lyndon_factorize(word: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Standard factorization of a Lyndon word: split off the longest
    proper Lyndon suffix (a word is Lyndon iff it is strictly smaller than
    every proper suffix, so the first qualifying split point wins)."""
    n = len(word)
    for i in range(1, n):
        suf = word[i:]
        if all(suf < suf[j:] for j in range(1, len(suf))):
            return word[:i], suf
    raise ValueError(f"{word!r} is not a bracketable Lyndon word")


def lyndon_bracket_tensor(g: int, word: tuple[int, ...]) -> Tensor:
    """The right-bracketed Lie element of a Lyndon word, as a tensor."""
    if len(word) == 1:
        return Tensor.letter(g, word[0])
    u, v = _lyndon_factorize(word)
    a = lyndon_bracket_tensor(g, u)
    b = lyndon_bracket_tensor(g, v)
    return a * b - b * a


def lie_basis(g: int, n: int) -> list[Tensor]:
    """Lyndon-word basis of the weight-n part of the free Lie algebra on
    the 2g letters, expanded into tensors; every element passes the
    left-bracketing (Dynkin) certificate."""
    if n < 1:
        raise ValueError("weight must be >= 1")
    return [lyndon_bracket_tensor(g, w) for w in lyndon_words(2 * g, n)]


def symplectic_lie_derivations(g: int, weight: int) -> list[DerivationElem]:
    """Basis of the weight-homogeneous symplectic derivations whose action
    on letters is Lie-element valued.

    Such derivations correspond to kernel vectors of the bracketing map
    from (letter, Lie element) pairs: sum c_(x,h) [x, h] = 0 forces the
    tensor sum c_(x,h) x.h to be a cyclic invariant, i.e. a necklace
    derivation, and its action Y -> sum c (x.Y) h lands in the free Lie
    algebra.  exp of these maps symplectic expansions to symplectic
    expansions (group-likeness survives because primitives go to
    primitives), so they are the valid change-of-expansion perturbations.
    The cyclicizer kills every bracket, so naive cyclicized Lie elements
    would all vanish; this kernel construction is the right one."""
    from .linalg import SparseRationalMatrix, kernel_basis

    if weight < 3:
        return []
    basis = lie_basis(g, weight - 1)
    pairs = [(x, h) for x in range(2 * g) for h in basis]
    columns = []
    keys: dict = {}
    for x, h in pairs:
        xt = Tensor.letter(g, x)
        col_tensor = xt * h - h * xt
        col = {}
        for wd, c in col_tensor.terms.items():
            idx = keys.setdefault(wd, len(keys))
            col[idx] = c
        columns.append(col)
    mat = SparseRationalMatrix(len(keys), len(columns), columns)
    out = []
    for vec in kernel_basis(mat):
        raw = Tensor.zero(g)
        for j, c in vec.items():
            x, h = pairs[j]
            raw = raw + (Tensor.letter(g, x) * h).scale(c)
        u = necklace_normal_form(raw)
        if not u.is_zero():
            out.append(u)
    return out


def lie_dimension(g: int, n: int) -> int:
    """Necklace-style Witt formula via Moebius inversion."""

    def moebius(n: int) -> int:
        if n == 1:
            return 1
        out = 1
        m = n
        p = 2
        while p * p <= m:
            if m % p == 0:
                m //= p
                if m % p == 0:
                    return 0
                out = -out
            p += 1
        if m > 1:
            out = -out
        return out

    total = 0
    for d in range(1, n + 1):
        if n % d == 0:
            total += moebius(d) * (2 * g) ** (n // d)
    return total // n


# -- the solver ----------------------------------------------------------------


def symplectic_expansion(g: int, cutoff: int) -> Expansion:
    """Construct a symplectic expansion at the given cutoff.

    Maintains theta(x) = exp(l_x) with l_x a Lie element (so group-likeness
    is structural) and cancels the boundary defect weight by weight; the
    correction system is always solvable, so a SolveFailed here indicates
    an implementation bug, not bad input."""
    if cutoff < 2:
        raise ValueError("a symplectic expansion needs cutoff >= 2")
    logs: dict[int, Tensor] = {l: Tensor.letter(g, l) for l in range(2 * g)}

    def build() -> Expansion:
        return Expansion(
            g,
            cutoff,
            {
                l: exp_series(TruncatedSeries(logs[l], cutoff))
                for l in range(2 * g)
            },
        )

    theta = build()
    for n in range(2, cutoff):
        defect = theta.boundary_log_defect().component(n + 1)
        if defect.is_zero():
            continue
        basis = lie_basis(g, n)
        columns = []
        for l in range(2 * g):
            partner_letter = Tensor.letter(g, l ^ 1)
            for elt in basis:
                if l % 2 == 0:  # correction to an alpha generator: [v, b_i]
                    col = elt * partner_letter - partner_letter * elt
                else:  # correction to a beta generator: [a_i, v]
                    col = partner_letter * elt - elt * partner_letter
                columns.append(col)
        # index the weight-(n+1) words appearing anywhere
        keys = sorted(
            set().union(*(set(c.terms) for c in columns), set(defect.terms))
        )
        key_pos = {k: i for i, k in enumerate(keys)}
        col_vecs = [
            {key_pos[wd]: c for wd, c in col.terms.items()} for col in columns
        ]
        target = {key_pos[wd]: -c for wd, c in defect.terms.items()}
        sol = solve_columns(col_vecs, target)
        if sol is None:
            raise SolveFailed(
                f"no weight-{n} correction cancels the weight-{n + 1} defect"
            )
        idx = 0
        for l in range(2 * g):
            acc = logs[l]
            for elt in basis:
                c = sol[idx]
                idx += 1
                if c != 0:
                    acc = acc + elt.scale(c)
            logs[l] = acc
        for l in range(2 * g):
            if not is_lie_element(logs[l]):
                raise SolveFailed("correction left a non-Lie log; internal bug")
        theta = build()
    return theta


# -- comparison and the loop map ------------------------------------------------


def compare_expansions(theta: Expansion, theta2: Expansion) -> DerivationElem:
    """The change-of-expansion derivation u, with components of weight
    3..cutoff+1, such that exp(D_u) theta = theta2 modulo the cutoff.

    Both inputs must be symplectic at a common cutoff; raises
    InconsistentExpansions when no such u exists within the cutoff."""
    if theta.g != theta2.g:
        raise InconsistentExpansions("different genus")
    g = theta.g
    cutoff = min(theta.cutoff, theta2.cutoff)
    for name, ok in (("first", theta.is_symplectic()), ("second", theta2.is_symplectic())):
        if not ok:
            raise InconsistentExpansions(f"the {name} expansion is not symplectic")
    u = DerivationElem.zero(g)
    for m in range(2, cutoff + 1):
        diffs = {}
        for l in range(2 * g):
            cur = exp_derivation(u, theta.series[l].tensor, cutoff)
            d = theta2.series[l].tensor - cur
            low = d.truncate(m - 1)
            if not low.is_zero():
                raise InconsistentExpansions(
                    f"discrepancy below weight {m} on generator x{l + 1}"
                )
            diffs[l] = d.component(m)
        if all(d.is_zero() for d in diffs.values()):
            continue
        # reconstruct the weight-(m+1) component of u from its action on
        # letters: u = sum_i a_i (x) phi(b_i) - b_i (x) phi(a_i)
        comp = Tensor.zero(g)
        for i in range(g):
            a, b = 2 * i, 2 * i + 1
            comp = comp + Tensor.letter(g, a) * diffs[b] - Tensor.letter(g, b) * diffs[a]
        try:
            u = u + necklace_normal_form(comp)
        except NotCyclic as exc:
            raise InconsistentExpansions(
                f"weight-{m + 1} correction is not a symplectic derivation: {exc}"
            ) from exc
    for l in range(2 * g):
        if exp_derivation(u, theta.series[l].tensor, cutoff) != theta2.series[l].tensor:
            raise InconsistentExpansions("residual discrepancy at the cutoff")
    return u


def loop_tensor(theta: Expansion, word: GroupWord) -> DerivationElem:
    """The cyclic invariant -N(theta(word)) in necklace coordinates,
    truncated at the cutoff; conjugation-invariant in the group word."""
    series = theta.evaluate(word)
    acc: dict[W.WordKey, object] = {}
    for wd, c in series.tensor.terms.items():
        if not wd:
            continue
        key = W.canonical_rotation(wd)
        acc[key] = acc.get(key, 0) - c
    return DerivationElem(theta.g, acc)
