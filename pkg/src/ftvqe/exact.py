"""Exact conversion between Clifford+T words and unitaries over D[omega].

Words are strings over ``H S T X W`` (``W`` is the scalar omega).  They are
read left to right in application order: ``"HT"`` applies H first, so its
matrix is T @ H.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache

from .rings import OMEGA, UnitaryDOmega, ZOmega, sde_abs2

ALPHABET = "HSTXW"

GATES: dict[str, UnitaryDOmega] = {
    "H": UnitaryDOmega(1, 1, 1, -1, 1),
    "S": UnitaryDOmega(1, 0, 0, OMEGA * OMEGA, 0),
    "T": UnitaryDOmega(1, 0, 0, OMEGA, 0),
    "X": UnitaryDOmega(0, 1, 1, 0, 0),
    "W": UnitaryDOmega(OMEGA, 0, 0, OMEGA, 0),
}

# T^m as a word, m mod 8 (S = T^2)
_T_POWER_WORDS = ["", "T", "S", "ST", "SS", "SST", "SSS", "SSST"]

BASE_SDE = 3


def t_power_word(m: int) -> str:
    return _T_POWER_WORDS[m % 8]


def t_count(word: str) -> int:
    return word.count("T")


def validate_word(word: str) -> None:
    bad = set(word) - set(ALPHABET)
    if bad:
        raise ValueError(f"invalid gate symbols {sorted(bad)} in word")


def word_to_matrix(word: str) -> UnitaryDOmega:
    validate_word(word)
    m = UnitaryDOmega.identity()
    for g in word:
        m = GATES[g] @ m
    return m


def _first_column_sde(u: UnitaryDOmega) -> int:
    return sde_abs2(u.a, u.k)


@lru_cache(maxsize=1)
def clifford_table() -> dict[tuple, str]:
    """All 192 single-qubit Cliffords with phases, as words over {H, S, X, W}."""
    table: dict[tuple, str] = {}
    start = UnitaryDOmega.identity()
    table[start.key()] = ""
    queue = deque([(start, "")])
    while queue:
        m, w = queue.popleft()
        for g in "HSXW":
            m2 = GATES[g] @ m
            key = m2.key()
            if key not in table:
                table[key] = w + g
                queue.append((m2, w + g))
    return table


@lru_cache(maxsize=1)
def base_table() -> dict[tuple, str]:
    """Words for every unitary whose first-column sde is at most BASE_SDE.

    0-1 breadth-first search from the identity (T costs 1, H/S/X/W cost 0), so
    each stored word has minimal T-count among paths that stay below the
    exploration ceiling.
    """
    ceiling = BASE_SDE + 1
    start = UnitaryDOmega.identity()
    best: dict[tuple, tuple[int, str]] = {start.key(): (0, "")}
    queue = deque([(start, 0, "")])
    while queue:
        m, cost, w = queue.popleft()
        if best[m.key()][0] < cost:
            continue
        for g in "HSXWT":
            m2 = GATES[g] @ m
            if _first_column_sde(m2) > ceiling:
                continue
            c2 = cost + (g == "T")
            key = m2.key()
            old = best.get(key)
            if old is not None and old[0] <= c2:
                continue
            best[key] = (c2, w + g)
            if g == "T":
                queue.append((m2, c2, w + g))
            else:
                queue.appendleft((m2, c2, w + g))
    return {k: w for k, (c, w) in best.items() if _sde_of_key(k) <= BASE_SDE}


def _sde_of_key(key: tuple) -> int:
    return sde_abs2(ZOmega(*key[0]), key[4])


def exact_synthesize(u: UnitaryDOmega) -> str:
    """A Clifford+T word whose matrix equals ``u`` exactly, phase included."""
    if not u.is_unitary():
        raise ValueError("not exactly unitary")
    pieces: list[str] = []
    m = u
    s = _first_column_sde(m)
    while s > BASE_SDE:
        for j in range(4):
            # m = T^j H m'  with  m' = H T^-j m; the top-left entry of m' is
            # (a + omega^-j c) / sqrt2^(k+1), so test that before multiplying
            s2 = sde_abs2(m.a + m.c.mul_omega(-j), m.k + 1)
            if s2 < s:
                pieces.append("H" + t_power_word(j))
                m, s = GATES["H"] @ (_T_INV[j] @ m), s2
                break
        else:
            raise ArithmeticError("no reduction step lowers the sde")
    tail = base_table().get(m.key())
    if tail is None:
        raise ArithmeticError("residual not found in the base-case table")
    return tail + "".join(reversed(pieces))


_T_INV = [word_to_matrix(t_power_word(-j)) for j in range(4)]


def simplify_word(word: str) -> str:
    """Cheap peephole cleanup: cancel HH, XX, merge T/S runs, fold W into one block.

    The matrix is unchanged; only trivially redundant symbols are removed.
    """
    phase = word.count("W")
    out: list[str] = []
    for g in word.replace("W", ""):
        out.append(g)
        while True:
            if len(out) >= 2 and out[-1] == out[-2] and out[-1] in "HX":
                del out[-2:]
                continue
            if len(out) >= 4 and out[-4:] == ["S"] * 4:
                del out[-4:]
                continue
            if len(out) >= 2 and out[-2:] == ["T", "T"]:
                out[-2:] = ["S"]
                continue
            if len(out) >= 2 and out[-2:] == ["T", "S"]:
                out[-2:] = ["S", "T"]
                # S and T commute; keep S before T so TT pairs meet
                continue
            break
    return "".join(out) + "W" * (phase % 8)
