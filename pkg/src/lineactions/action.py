"""The explicit BS(m, n) action on the line and its ping-pong certification.

The action is generated by g = g_n o g_m^{-1} and h(x) = x + 1, where
g_n is the degree-n lift Theta_n and g_m(x) = Theta_m(x - 1/2) + 1/2.
Covering-lift equivariance forces the relation g h^m g^{-1} = h^n exactly;
composing the factors the other way round would give the mirror relation
g h^n g^{-1} = h^m instead.

Faithfulness is certified pointwise: a pinch-free word applied to a base
point x0 in the interior of C intersect C_2 lands in (A^s + nZ) u (B^s + mZ),
hence moves x0.  certify_word replays that induction for one word with
rigorous enclosures; sweep_certify replays it for every pinch-free word in
an exponent/syllable box at once by collapsing words onto shared
(enclosure, integer offset) states, carrying exact multiplicities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import ConstructionError, PreconditionError
from .maps import (AffineMap, Enclosure, MapTree, TranslateConjugate,
                   build_theta, compose, fourier_smooth, invert, rat, rat_str)
from .words import BSWord, NormalForm, count_pinch_free

BOUNDARY_GUARD = Fraction(1, 10**12)
SWEEP_INVERSE_WIDTH = Fraction(1, 10**30)


@dataclass(frozen=True)
class Window:
    """Closed rational interval used as a ping-pong window."""

    lo: Fraction
    hi: Fraction
    name: str

    def shifted(self, k) -> "Window":
        return Window(self.lo + k, self.hi + k, f"{self.name}+{k}")

    def to_json(self):
        return {"name": self.name, "lo": rat_str(self.lo), "hi": rat_str(self.hi)}


def locate_in_lattice(enc: Enclosure, window: Window, modulus: int):
    """Find s in modulus*Z with enc inside window + s.

    Returns (verdict, s): Inside with the witness s, Inconclusive when the
    enclosure straddles a boundary within the guard, Outside otherwise.
    Never rounds a straddling enclosure to Inside.
    """
    mid = Fraction(enc.mid if isinstance(enc.lo, float) else (enc.lo + enc.hi) / 2)
    center = (window.lo + window.hi) / 2
    base = round(float((mid - center) / modulus))
    for s in (modulus * base, modulus * (base - 1), modulus * (base + 1)):
        if window.lo + s <= enc.lo and enc.hi <= window.hi + s:
            return "Inside", s
    for s in (modulus * base, modulus * (base - 1), modulus * (base + 1)):
        if (window.lo + s - BOUNDARY_GUARD <= enc.lo
                and enc.hi <= window.hi + s + BOUNDARY_GUARD):
            return "Inconclusive", s
    return "Outside", modulus * base


# ---------------------------------------------------------------------------
# ping-pong table


@dataclass
class PingPongTable:
    """Interval system and the verified inclusion facts for one (m, n)."""

    m: int
    n: int
    a: Fraction
    windows: dict
    facts: list = field(default_factory=list)
    verified: bool = False
    mode: str = "rational"

    @staticmethod
    def windows_for(a: Fraction) -> dict:
        half = Fraction(1, 2)
        A = Window(-a, a, "A")
        As = Window(-a, Fraction(0), "A^s")
        Au = Window(Fraction(0), a, "A^u")
        C = Window(a, 1 - a, "C")
        return {
            "A": A, "A^s": As, "A^u": Au, "C": C,
            "B": Window(A.lo + half, A.hi + half, "B"),
            "B^s": Window(As.lo + half, As.hi + half, "B^s"),
            "B^u": Window(Au.lo + half, Au.hi + half, "B^u"),
            "C_2": Window(C.lo + half, C.hi + half, "C_2"),
        }

    def tiling_ok(self) -> bool:
        """[0,1] = A^u u C u (A^s + 1) with matching endpoints, exactly."""
        w = self.windows
        return (w["A^u"].lo == 0 and w["A^u"].hi == w["C"].lo
                and w["C"].hi == w["A^s"].lo + 1 and w["A^s"].hi + 1 == 1)

    def all_inside(self) -> bool:
        return bool(self.facts) and all(f["verdict"] == "Inside" for f in self.facts)

    def to_json(self):
        return {"m": self.m, "n": self.n, "a": rat_str(self.a),
                "windows": {k: w.to_json() for k, w in self.windows.items()},
                "verified": self.verified, "mode": self.mode, "facts": self.facts}


# ---------------------------------------------------------------------------
# the action


@dataclass
class BSAction:
    """g = g_n o g_m^{-1} and h = x + 1, with g h^m g^{-1} = h^n."""

    m: int
    n: int
    a: Fraction
    g_n: MapTree
    g_m: MapTree
    g: MapTree
    g_inv: MapTree
    h: MapTree
    table: Optional[PingPongTable] = None
    smoothed: bool = False

    def __post_init__(self):
        self.g_m_inv = invert(self.g_m)
        self.g_n_inv = invert(self.g_n)

    def relation_residual(self, samples: int = 1000, lo: float = 0.0,
                          hi: float = 3.0) -> float:
        """sup |g(h^m(x)) - h^n(g(x))| over an even float sample of [lo, hi]."""
        worst = 0.0
        gm, gn = self.m, self.n
        for i in range(samples):
            x = lo + (hi - lo) * i / (samples - 1)
            lhs = self.g.eval_float(x + gm)
            rhs = self.g.eval_float(x) + gn
            worst = max(worst, abs(lhs - rhs))
        return worst

    def relation_residual_exact(self, points,
                                inverse_width: Fraction = Fraction(1, 2**20)) -> list:
        """Per-point exact residual records; residual is 0 whenever the
        evaluation path stays on affine pieces (exact enclosures).

        Paths through a cubic join are enclosed at the given width and only a
        residual bound is reported for them; the sharp 1e-12 statement lives
        in float mode, which covers every path.
        """
        from .maps import eval_float_traced
        out = []
        for x in points:
            xq = rat(x)
            _, p1 = eval_float_traced(self.g, float(xq) + self.m)
            _, p2 = eval_float_traced(self.g, float(xq))
            if p1 and p2:
                lhs = self.g.eval_enclosure(Enclosure.point(xq + self.m),
                                            "rational", inverse_width)
                rhs = self.g.eval_enclosure(Enclosure.point(xq),
                                            "rational", inverse_width)
            else:
                lhs = rhs = None
            if lhs is not None and lhs.exact and rhs.exact:
                out.append({"x": rat_str(xq), "exact_path": True,
                            "residual": rat_str(lhs.lo - rhs.lo - self.n)})
            else:
                v1, _ = eval_float_traced(self.g, float(xq) + self.m)
                v2, _ = eval_float_traced(self.g, float(xq))
                out.append({"x": rat_str(xq), "exact_path": False,
                            "residual_bound": repr(abs(v1 - v2 - self.n) + 1e-12)})
        return out

    def to_json(self):
        data = {"m": self.m, "n": self.n, "a": rat_str(self.a),
                "smoothed": self.smoothed,
                "g_n": self.g_n.to_spec(), "g_m": self.g_m.to_spec(),
                "g": self.g.to_spec(), "h": self.h.to_spec()}
        if self.table is not None:
            data["table"] = self.table.to_json()
        return data


def build_action(m: int, n: int, a=Fraction(1, 10),
                 fourier_harmonics: Optional[int] = None,
                 relation_tol: float = 1e-12, relation_samples: int = 1000) -> BSAction:
    """Construct the action for 1 <= m < n and verify the relation on samples.

    With fourier_harmonics set, both lifts are replaced by truncated
    trigonometric polynomials (smooth everywhere); the relation still holds
    because it only uses covering-lift equivariance, and the inclusions must
    be re-verified by the caller.
    """
    if not (1 <= m < n):
        raise PreconditionError(f"need 1 <= m < n, got ({m}, {n})")
    a = rat(a)
    theta_n, theta_m = build_theta(n, a), build_theta(m, a)
    g_n: MapTree = theta_n
    g_m_core: MapTree = theta_m
    smoothed = False
    if fourier_harmonics is not None:
        g_n = fourier_smooth(theta_n, n, fourier_harmonics)
        g_m_core = fourier_smooth(theta_m, m, fourier_harmonics)
        smoothed = True
        relation_tol = max(relation_tol, 1e-9)
    g_m = TranslateConjugate(Fraction(1, 2), g_m_core)
    g = compose(g_n, invert(g_m))
    act = BSAction(m, n, a, g_n, g_m, g, invert(g), AffineMap(1, 1),
                   smoothed=smoothed)
    residual = act.relation_residual(relation_samples)
    if residual > relation_tol:
        raise ConstructionError(
            f"relation residual {residual:.3g} exceeds {relation_tol:.3g}; "
            "the construction is broken")
    return act


# ---------------------------------------------------------------------------
# inclusion verification


def _inclusion_checks(act: BSAction):
    """(fact id, map, source window, translate k, target window, modulus)."""
    m, n = act.m, act.n
    w = PingPongTable.windows_for(act.a)
    gn, gm = act.g_n, act.g_m
    gn_inv, gm_inv = invert(gn), invert(gm)
    checks = []
    for k in range(1, n):
        checks.append(("eqn1", f"g_n^-1(A+{k})", gn_inv, w["A"], k, w["A^u"], 1))
    for k in range(m):
        checks.append(("eqn2", f"g_m^-1(C_2+{k})", gm_inv, w["C_2"], k, w["B^u"], 1))
    for k in range(1, m):
        checks.append(("eqn3", f"g_m^-1(B+{k})", gm_inv, w["B"], k, w["B^u"], 1))
    checks.append(("eqn4", "g_n(B)", gn, w["B"], 0, w["A^s"], n))
    for k in range(n):
        checks.append(("eqn5", f"g_n^-1(B+{k})", gn_inv, w["B"], k, w["A^u"], 1))
    checks.append(("eqn6", "g_m(A)", gm, w["A"], 0, w["B^s"], m))
    for k in range(m):
        checks.append(("eqn7", f"g_m^-1(A+{k})", gm_inv, w["A"], k, w["B^u"], 1))
    for k in range(n):
        checks.append(("base", f"g_n^-1(C+{k})", gn_inv, w["C"], k, w["A^u"], 1))
    return w, checks


def verify_inclusions(act: BSAction, mode: str = "rational") -> PingPongTable:
    """Check the seven translate inclusions (plus the base-case auxiliary one)
    with rigorous enclosures; every verdict must be Inside for a verified table.

    Equations eqn1/eqn3 quantify over nonzero residues only, so for m = 1
    eqn3 is vacuous and recorded as Inside with no translates.
    """
    if act.smoothed and mode == "rational":
        mode = "float"
    windows, checks = _inclusion_checks(act)
    table = PingPongTable(act.m, act.n, act.a, windows, mode=mode)
    ids_seen = set()
    for fact_id, desc, tree, src, k, target, modulus in checks:
        ids_seen.add(fact_id)
        enc = tree.eval_enclosure(Enclosure(src.lo + k, src.hi + k), mode)
        verdict, s = locate_in_lattice(enc, target, modulus)
        table.facts.append({
            "id": fact_id, "check": desc, "target": f"{target.name}+{modulus}Z",
            "verdict": verdict, "offset": s, "enclosure": enc.to_json(),
        })
    for vacuous in {"eqn1", "eqn2", "eqn3", "eqn4", "eqn5", "eqn6", "eqn7"} - ids_seen:
        table.facts.append({"id": vacuous, "check": "no residues to test",
                            "target": "", "verdict": "Inside", "offset": 0,
                            "enclosure": None})
    if not table.tiling_ok():
        table.facts.append({"id": "tiling", "check": "[0,1] = A^u u C u (A^s+1)",
                            "target": "", "verdict": "Outside", "offset": 0,
                            "enclosure": None})
    table.verified = table.all_inside()
    act.table = table
    return table


# ---------------------------------------------------------------------------
# single-word certification


@dataclass
class Certificate:
    """Step-by-step rigorous trace that a word moves the base point."""

    word: str
    conjugated_word: str
    x0: Fraction
    verdict: str                 # nontrivial | inconclusive
    final_tag: str
    steps: list
    final_enclosure: Optional[Enclosure]
    separation: Fraction         # distance from x0 to the target window set

    def to_json(self):
        return {"word": self.word, "conjugated_word": self.conjugated_word,
                "x0": rat_str(self.x0), "verdict": self.verdict,
                "final_tag": self.final_tag,
                "separation": rat_str(self.separation),
                "final_enclosure": (self.final_enclosure.to_json()
                                    if self.final_enclosure else None),
                "steps": self.steps}


def _window_separation(x0: Fraction, windows: dict) -> Fraction:
    """Distance from x0 to (A^s + Z) u (B^s + Z), a lower bound for the
    displacement of a certified word."""
    best = None
    for name in ("A^s", "B^s"):
        w = windows[name]
        for k in range(-1, 3):
            lo, hi = w.lo + k, w.hi + k
            if x0 < lo:
                d = lo - x0
            elif x0 > hi:
                d = x0 - hi
            else:
                d = Fraction(0)
            best = d if best is None else min(best, d)
    return best


def certify_word(act: BSAction, w: Union[BSWord, NormalForm],
                 x0=Fraction(3, 4), mode: str = "rational",
                 inverse_width: Fraction = SWEEP_INVERSE_WIDTH) -> Certificate:
    """Replay the four-case ping-pong induction for one pinch-free word.

    The word is conjugated first so its leading a-power is absorbed into the
    trailing one.  Never returns "trivial": a pinch-free word either certifies
    nontrivial or the replay reports an inconclusive enclosure.
    """
    word = w.word if isinstance(w, NormalForm) else w
    if (word.m, word.n) != (act.m, act.n):
        raise PreconditionError(
            f"word lives in BS({word.m},{word.n}), action is BS({act.m},{act.n})")
    if not word.is_pinch_free():
        raise PreconditionError(f"word {word} is not pinch-free; reduce it first")
    windows = PingPongTable.windows_for(act.a)
    x0 = rat(x0)
    c_lo, c_hi = windows["C_2"].lo, windows["C"].hi
    if not (c_lo < x0 < c_hi):
        raise PreconditionError(
            f"x0 must lie in the open interval ({c_lo}, {c_hi}), got {x0}")
    if len(word.syllables) == 0:
        raise PreconditionError("empty word cannot be certified nontrivial")

    syl = list(word.syllables)
    lead = 0
    if syl and syl[0][0] == 'a':
        lead = syl[0][1]
        syl = syl[1:]
    if syl and syl[-1][0] == 'a':
        syl[-1] = ('a', syl[-1][1] + lead)
    elif lead:
        syl.append(('a', lead))
    conj = BSWord(word.m, word.n, tuple(syl))
    separation = _window_separation(x0, windows)

    if conj.t_count == 0:
        shift = conj.a_total
        return Certificate(str(word), str(conj), x0, "nontrivial",
                           f"x0+{shift}", [{"syllable": f"a^{shift}",
                                            "tag": "integer-translate",
                                            "offset": shift}],
                           Enclosure.point(x0 + shift), abs(Fraction(shift)))

    gm_inv, gn, gn_inv, gm = act.g_m_inv, act.g_n, act.g_n_inv, act.g_m
    enc = Enclosure.point(x0)
    steps = []
    verdict = "nontrivial"
    final_tag = ""
    for kind, exp in reversed(conj.syllables):
        if kind == 'a':
            enc = enc.shift(exp)
            steps.append({"syllable": f"a^{exp}", "tag": "shift", "offset": exp,
                          "enclosure": enc.to_json()})
            continue
        if exp == 1:
            half1, tag1, mod1 = gm_inv, "B^u + Z", 1
            half2, tag2, mod2, win2 = gn, "A^s + nZ", act.n, windows["A^s"]
            win1 = windows["B^u"]
        else:
            half1, tag1, mod1 = gn_inv, "A^u + Z", 1
            half2, tag2, mod2, win2 = gm, "B^s + mZ", act.m, windows["B^s"]
            win1 = windows["A^u"]
        enc = half1.eval_enclosure(enc, mode, inverse_width)
        v1, s1 = locate_in_lattice(enc, win1, mod1)
        steps.append({"syllable": f"t^{exp}" if exp == -1 else "t",
                      "half": 1, "tag": tag1, "verdict": v1, "offset": s1,
                      "enclosure": enc.to_json()})
        if v1 != "Inside":
            verdict = "inconclusive"
            final_tag = tag1
            break
        enc = half2.eval_enclosure(enc, mode, inverse_width)
        v2, s2 = locate_in_lattice(enc, win2, mod2)
        steps.append({"syllable": f"t^{exp}" if exp == -1 else "t",
                      "half": 2, "tag": tag2, "verdict": v2, "offset": s2,
                      "enclosure": enc.to_json()})
        if v2 != "Inside":
            verdict = "inconclusive"
            final_tag = tag2
            break
        final_tag = tag2
    return Certificate(str(word), str(conj), x0, verdict, final_tag, steps,
                       enc, separation)


# ---------------------------------------------------------------------------
# collapsed-state sweep over a whole word box


@dataclass
class SweepSummary:
    m: int
    n: int
    max_syllables: int
    exponent_bound: int
    x0: Fraction
    counts_by_syllables: dict
    expected_counts: dict
    nontrivial: int
    inconclusive: int
    states_by_depth: dict
    max_enclosure_width: float

    @property
    def total_words(self) -> int:
        return sum(self.counts_by_syllables.values())

    def counts_match(self) -> bool:
        return self.counts_by_syllables == self.expected_counts

    def to_json(self):
        return {"m": self.m, "n": self.n,
                "max_syllables": self.max_syllables,
                "exponent_bound": self.exponent_bound, "x0": rat_str(self.x0),
                "total_words": self.total_words,
                "counts_by_syllables": {str(k): v for k, v in
                                        self.counts_by_syllables.items()},
                "expected_counts": {str(k): v for k, v in
                                    self.expected_counts.items()},
                "counts_match_transfer_matrix": self.counts_match(),
                "nontrivial": self.nontrivial,
                "inconclusive": self.inconclusive,
                "states_by_depth": {str(k): v for k, v in
                                    self.states_by_depth.items()},
                "max_enclosure_width": repr(self.max_enclosure_width)}


def sweep_certify(act: BSAction, max_syllables: int, exponent_bound: int,
                  x0=Fraction(3, 4), mode: str = "rational") -> SweepSummary:
    """Certify every pinch-free word in the box at once.

    Words sharing the same induction state are collapsed: a state is the
    current rigorous enclosure reduced into its window plus the exact integer
    offset, and word multiplicities are carried along.  Every distinct
    enclosure transition is certified once with the same rigor as
    certify_word; the counts per t-syllable class are checked against the
    independent transfer-matrix count.
    """
    if max_syllables < 0 or exponent_bound < 1:
        raise PreconditionError("bounds must be positive (max_syllables may be 0)")
    x0 = rat(x0)
    windows = PingPongTable.windows_for(act.a)
    c_lo, c_hi = windows["C_2"].lo, windows["C"].hi
    if not (c_lo < x0 < c_hi):
        raise PreconditionError(f"x0 must lie in ({c_lo}, {c_hi}), got {x0}")

    b = exponent_bound
    m, n = act.m, act.n
    gm_inv, gn, gn_inv, gm = act.g_m_inv, act.g_n, act.g_n_inv, act.g_m
    win = {"B^u": windows["B^u"], "A^s": windows["A^s"],
           "A^u": windows["A^u"], "B^s": windows["B^s"]}

    encs: dict[tuple, int] = {}
    enc_list: list[Enclosure] = []

    def intern(enc: Enclosure) -> int:
        key = (enc.lo, enc.hi)
        idx = encs.get(key)
        if idx is None:
            idx = len(enc_list)
            encs[key] = idx
            enc_list.append(enc)
        return idx

    max_width = 0.0
    edge_cache: dict[tuple, tuple] = {}

    def edge(enc_id: int, v: int, direction: int):
        """Apply g (direction=+1) or g^-1 (-1) to enc_list[enc_id] + v.

        Returns (new_enc_id, s1, s2) or ('bad', verdict detail).
        """
        nonlocal max_width
        key = (enc_id, v, direction)
        hit = edge_cache.get(key)
        if hit is not None:
            return hit
        enc = enc_list[enc_id].shift(v)
        if direction == 1:
            first, w1, second, w2, mod2 = gm_inv, win["B^u"], gn, win["A^s"], n
        else:
            first, w1, second, w2, mod2 = gn_inv, win["A^u"], gm, win["B^s"], m
        e1 = first.eval_enclosure(enc, mode, SWEEP_INVERSE_WIDTH)
        v1, s1 = locate_in_lattice(e1, w1, 1)
        if v1 != "Inside":
            result = ("bad", f"{w1.name} verdict {v1}")
            edge_cache[key] = result
            return result
        e1b = e1.shift(-s1)
        e2 = second.eval_enclosure(e1b, mode, SWEEP_INVERSE_WIDTH)
        v2, s2 = locate_in_lattice(e2, w2, mod2)
        if v2 != "Inside":
            result = ("bad", f"{w2.name} verdict {v2}")
            edge_cache[key] = result
            return result
        e2b = e2.shift(-s2)
        max_width = max(max_width, float(e2b.width))
        result = (intern(e2b), s1, s2)
        edge_cache[key] = result
        return result

    def pinch_blocked(prev_sign: int, r: int, new_sign: int) -> bool:
        if prev_sign == 1 and new_sign == -1:
            return r % n == 0
        if prev_sign == -1 and new_sign == 1:
            return r % m == 0
        return False

    counts = {0: 2 * b}        # pure a^r words, r != 0: displacement r, nontrivial
    inconclusive = 0
    states_by_depth = {}
    base_id = intern(Enclosure.point(x0))

    # depth-0 states fold (r_0, r_k) pairs into their sum
    frontier: dict[tuple, int] = {}
    for shift_sum in range(-2 * b, 2 * b + 1):
        frontier[(0, base_id, shift_sum)] = (2 * b + 1) - abs(shift_sum)

    for depth in range(1, max_syllables + 1):
        nxt: dict[tuple, int] = {}
        for (sign, enc_id, offset), mult in frontier.items():
            if sign == 0:
                moves = [(offset, 1, mult), (offset, -1, mult)]
            else:
                moves = []
                for r in range(-b, b + 1):
                    for new_sign in (1, -1):
                        if pinch_blocked(sign, r, new_sign):
                            continue
                        moves.append((offset + r, new_sign, mult))
            for total, new_sign, wt in moves:
                lattice = m if new_sign == 1 else n
                v = total % lattice
                u = (total - v) // lattice
                res = edge(enc_id, v, new_sign)
                if res[0] == "bad":
                    inconclusive += wt
                    continue
                new_enc, s1, s2 = res
                out_mod = n if new_sign == 1 else m
                new_offset = s2 + out_mod * (s1 + u)
                key = (new_sign, new_enc, new_offset)
                nxt[key] = nxt.get(key, 0) + wt
        frontier = nxt
        counts[depth] = sum(frontier.values())
        states_by_depth[depth] = len(frontier)

    # inconclusive edges drop their word mass from the frontier, so any
    # inconclusive > 0 also makes the transfer-matrix cross-check fail
    expected = count_pinch_free(m, n, max_syllables, b)
    nontrivial = sum(counts.values())
    return SweepSummary(m, n, max_syllables, b, x0, counts, expected,
                        nontrivial, inconclusive, states_by_depth, max_width)


# ---------------------------------------------------------------------------
# rotation obstruction and the IVT fixed point


def rotation_obstruction(m: int, n: int) -> dict:
    """Admissible rotation numbers for the h-generator of any circle action.

    tau(h) must be p/(m-n) mod 1 for some integer p, equivalently h has a
    periodic point whose period divides |n - m|.
    """
    if m == n:
        raise PreconditionError("m = n is degenerate: no constraint arises")
    d = abs(n - m)
    values = sorted({Fraction(p, d) % 1 for p in range(d)})
    return {"admissible": values, "period_divisor": d}


def find_g_fixed_point(g: MapTree, m: int = 1, search_bound: int = 60,
                       width: float = 1e-9) -> dict:
    """Bracket a fixed point of g by scanning x = m*k for a sign change of
    g(x) - x, then bisecting to the requested width.

    Assumes the action is normalized so h(x) = x + 1 (fixed-point free).
    """
    prev_k, prev_sign = None, None
    hit = None
    for k in range(-search_bound, search_bound + 1):
        x = float(m * k)
        d = g.eval_float(x) - x
        sgn = (d > 0) - (d < 0)
        if sgn == 0:
            return {"k_bracket": (k, k), "bracket": (x, x), "width": 0.0,
                    "fixed_point": x}
        if prev_sign is not None and sgn != prev_sign:
            hit = (prev_k, k)
            break
        prev_k, prev_sign = k, sgn
    if hit is None:
        raise PreconditionError(
            f"no sign change of g(x) - x on x = {m}*k for |k| <= {search_bound}")
    lo, hi = float(m * hit[0]), float(m * hit[1])
    f_lo = g.eval_float(lo) - lo
    x_star = 0.5 * (lo + hi)
    residual = math.inf
    for _ in range(300):
        mid = 0.5 * (lo + hi)
        f_mid = g.eval_float(mid) - mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        x_star = 0.5 * (lo + hi)
        residual = abs(g.eval_float(x_star) - x_star)
        if hi - lo <= width and residual <= width:
            break
    return {"k_bracket": hit, "bracket": (lo, hi), "width": hi - lo,
            "fixed_point": x_star, "residual": residual}
