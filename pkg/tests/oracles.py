"""Naive exhaustive re-checks, written independently of the package kernels."""

from fractions import Fraction
from itertools import combinations, combinations_with_replacement


def thick(members, window, n):
    s = set(members)
    for i in range(window - n + 1):
        if all(i + k in s for k in range(n)):
            return True
    return False


def syndetic(members, window, gap):
    s = set(members)
    if not s:
        return False
    return all(any(i + k in s for k in range(gap + 1)) for i in range(window - gap))


def piecewise_syndetic(members, window, gap, n):
    s = set(members)
    for i in range(window - n + 1):
        block = [m for m in range(i, i + n) if m in s]
        if not block:
            continue
        ok = True
        # every (gap+1)-interval fully inside the block meets the set
        for a in range(i, i + n - gap):
            if not any(a + k in s for k in range(gap + 1)):
                ok = False
                break
        if ok:
            return True
    return False


def banach_density(members, window, span):
    s = set(members)
    best = Fraction(0)
    for m in range(window):
        count = 0
        for n in range(m, window):
            count += n in s
            if n - m + 1 >= span:
                best = max(best, Fraction(count, n - m + 1))
    return best


def all_sums(gens):
    out = set()
    for k in range(1, len(gens) + 1):
        for idx in combinations(range(len(gens)), k):
            out.add(sum(gens[i] for i in idx))
    return out


def first_ip(members, window, depth):
    s = set(members)
    pos = sorted(m for m in s if m > 0)
    for gens in combinations_with_replacement(pos, depth):
        if all(x in s for x in all_sums(gens)):
            return list(gens)
    return None


# --- symbolic dynamics -------------------------------------------------------


def shift_symbol(word_at, n, i):
    """Symbol at position i of the n-th left shift, given a position->symbol function."""
    return word_at(i + n)


def full_shift_contains(u_offset, u_pattern, v_offset, v_pattern, n):
    """Brute force: every filling of the free positions in U's image lands in V."""
    fixed = {u_offset + i: int(c) for i, c in enumerate(u_pattern)}
    needed = [v_offset + n + j for j in range(len(v_pattern))]
    free = [p for p in needed if p not in fixed]
    for bits in range(2 ** len(free)):
        word = dict(fixed)
        for k, p in enumerate(free):
            word[p] = (bits >> k) & 1
        if any(word[v_offset + n + j] != int(c) for j, c in enumerate(v_pattern)):
            return False
    return True


def full_shift_meets(a_offset, a_pattern, b_offset, b_pattern, n):
    fixed = {a_offset + i: int(c) for i, c in enumerate(a_pattern)}
    for j, c in enumerate(b_pattern):
        p = b_offset + n + j
        if p in fixed and fixed[p] != int(c):
            return False
    return True


def coded_language(words, length, reps=None):
    """All factors of the given length in concatenations of generator words."""
    from itertools import product

    out = set()
    reps = reps or (length // min(map(len, words)) + 2)
    for combo in product(words, repeat=reps):
        s = "".join(combo)
        for i in range(len(s) - length + 1):
            out.add(s[i : i + length])
    return out


def tent_float_orbit(x, n):
    for _ in range(n):
        x = 2 * x if x <= 0.5 else 2 - 2 * x
    return x


def first_ip_pruned(members, depth):
    """Lexicographically first non-decreasing generators, with early rejection of partial lists."""
    s = set(members)
    pos = sorted(m for m in s if m > 0)

    def grow(gens, sums):
        if len(gens) == depth:
            return gens
        for p in pos:
            if gens and p < gens[-1]:
                continue
            new = [p] + [q + p for q in sums]
            if all(t in s for t in new):
                found = grow(gens + [p], sums + new)
                if found:
                    return found
        return None

    return grow([], [])
