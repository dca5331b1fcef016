"""Wavelet chains and wavelet functions for incomplete rankings.

A wavelet chain x_tau is generated per cycle by the star-elimination loop
(insert a star between consecutive cycle letters, repeatedly replace the
star with the largest right-hand neighbor by a diamond product) and cycles
are concatenated.  Embedding a chain by contiguous extensions yields the
wavelet function psi_tau on full rankings.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

from .marginals import all_words, contiguous_extensions, extensions
from .perms import CycleForm, Permutation, standard_cycle_form
from .words import Chain, Word, concat, content, diamond

FULL_UNIVERSE_CAP = 8

_chain_cache: dict[tuple[int, tuple], Chain] = {}
_wavelet_cache: dict[tuple[int, tuple], Chain] = {}


@dataclass(frozen=True)
class WaveletChain:
    """The chain x_tau on words ranking supp(tau); coefficients are +-1."""

    tau: CycleForm
    chain: Chain


@dataclass(frozen=True)
class WaveletFunction:
    """The function psi_tau on full rankings; values in {-1, 0, 1}."""

    tau: CycleForm
    chain: Chain


def _cycle_chain(cycle: tuple[int, ...], n: int) -> Chain:
    """Star elimination on one cycle: merge adjacent spans by diamond,
    taking stars in decreasing order of the letter to their right."""
    spans = {i: (i, Chain.dirac(Word._make((a,), n))) for i, a in enumerate(cycle)}
    end_to_start = {i: i for i in range(len(cycle))}
    for pos in sorted(range(1, len(cycle)), key=lambda i: cycle[i], reverse=True):
        left_start = end_to_start[pos - 1]
        left_end, left_chain = spans.pop(left_start)
        right_end, right_chain = spans.pop(pos)
        merged = diamond(left_chain, right_chain)
        spans[left_start] = (right_end, merged)
        end_to_start[right_end] = left_start
    (_, (_, chain)), = spans.items()
    return chain


def wavelet_chain(t: Permutation | CycleForm, n: int | None = None) -> WaveletChain:
    """Run the generative algorithm on t (in standard cycle form).

    The per-cycle chains are concatenated in standard-form order.  The
    identity is rejected: it indexes the constant function, not a chain.
    """
    form = t if isinstance(t, CycleForm) else standard_cycle_form(t)
    if n is None:
        n = t.n if isinstance(t, Permutation) else max(form.support(), default=0)
    if not form.cycles:
        raise ValueError("the identity permutation has no wavelet chain")
    key = (n, form.cycles)
    cached = _chain_cache.get(key)
    if cached is None:
        cached = _cycle_chain(form.cycles[0], n)
        for cycle in form.cycles[1:]:
            cached = concat(cached, _cycle_chain(cycle, n))
        _chain_cache[key] = cached
    return WaveletChain(form, cached)


def embed(x: Chain) -> Chain:
    """Send each word to the sum of full rankings containing it contiguously."""
    full = frozenset(range(1, x.n + 1))
    out = Chain.zero(x.n)
    for w, c in x.terms.items():
        out = out + c * Chain.indicator(contiguous_extensions(w, full), x.n)
    return out


def embed_into(x: Chain, items) -> Chain:
    """Contiguous-extension embedding into the rankings of a subset."""
    items = frozenset(items)
    out = Chain.zero(x.n)
    for w, c in x.terms.items():
        if not content(w) <= items:
            raise ValueError(f"word {w} has content outside {sorted(items)}")
        out = out + c * Chain.indicator(contiguous_extensions(w, items), x.n)
    return out


def naive_embed(x: Chain) -> Chain:
    """Negative control: extend by subwords (all insertions), not contiguously."""
    full = frozenset(range(1, x.n + 1))
    out = Chain.zero(x.n)
    for w, c in x.terms.items():
        out = out + c * Chain.indicator(extensions(w, full), x.n)
    return out


def wavelet(t: Permutation | CycleForm, n: int | None = None) -> WaveletFunction:
    """The basis function psi_tau on full rankings of 1..n.

    The identity yields the all-ones function; any other t embeds its
    wavelet chain.  Bounded at n = 8: beyond that the full ranking space
    is never materialized.
    """
    form = t if isinstance(t, CycleForm) else standard_cycle_form(t)
    if n is None:
        if not isinstance(t, Permutation):
            raise ValueError("universe size n required with a bare cycle form")
        n = t.n
    if n > FULL_UNIVERSE_CAP:
        raise ValueError(f"full rankings are materialized only for n <= {FULL_UNIVERSE_CAP}")
    if form.support() and max(form.support()) > n:
        raise ValueError(f"support {sorted(form.support())} exceeds universe 1..{n}")
    key = (n, form.cycles)
    cached = _wavelet_cache.get(key)
    if cached is None:
        if not form.cycles:
            cached = Chain.indicator(all_words(range(1, n + 1), n), n)
        else:
            cached = embed(wavelet_chain(form, n).chain)
        _wavelet_cache[key] = cached
    return WaveletFunction(form, cached)


@lru_cache(maxsize=4096)
def _sign_ladder(cycle: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
    """Word-independent peel sequence of a cycle: (largest item, its cycle
    predecessor) pairs, contracting the largest item after each step."""
    succ = {a: cycle[(i + 1) % len(cycle)] for i, a in enumerate(cycle)}
    pred = {b: a for a, b in succ.items()}
    ladder = []
    remaining = sorted(cycle, reverse=True)
    for top in remaining[:-1]:
        before = pred[top]
        ladder.append((top, before))
        after = succ[top]
        succ[before] = after
        pred[after] = before
        del succ[top], pred[top]
    return tuple(ladder)


def _one_cycle_coefficient(cycle: tuple[int, ...], letters: tuple[int, ...]) -> int:
    """Coefficient of a word in a one-cycle chain: the product of adjacency
    signs of (peeled maximum, its predecessor) in successive restrictions."""
    current = list(letters)
    value = 1
    for top, before in _sign_ladder(cycle):
        pos_top = current.index(top)
        diff = pos_top - current.index(before)
        if diff == -1:
            value = -value
        elif diff != 1:
            return 0
        current.pop(pos_top)
    return value


def chain_coefficient_fast(t: Permutation | CycleForm, w: Word) -> int:
    """Value of the wavelet chain of t at w, without running the generator.

    The word is split into contiguous blocks matching the cycle lengths in
    standard form; the value is the product of one-cycle sign products, or
    zero as soon as a block's content differs from its cycle's support.
    """
    form = t if isinstance(t, CycleForm) else standard_cycle_form(t)
    if not form.cycles:
        raise ValueError("the identity permutation has no wavelet chain")
    if content(w) != form.support():
        raise ValueError(
            f"word content {sorted(content(w))} differs from support {sorted(form.support())}"
        )
    value = 1
    offset = 0
    for cycle in form.cycles:
        block = w.letters[offset : offset + len(cycle)]
        offset += len(cycle)
        if set(block) != set(cycle):
            return 0
        value *= _one_cycle_coefficient(cycle, block)
        if value == 0:
            return 0
    return value


def marginal_wavelet(t: Permutation | CycleForm, items, n: int | None = None) -> Chain:
    """Closed-form marginal of psi_tau on the rankings of a subset.

    Constant n!/|A|! for the identity; a scaled contiguous embedding of the
    wavelet chain when the support lies inside A; zero otherwise.
    """
    if n is None:
        if not isinstance(t, Permutation):
            raise ValueError("universe size n required with a bare cycle form")
        n = t.n
    items = frozenset(items)
    if len(items) < 2:
        raise ValueError("marginals of wavelets are taken on subsets of size >= 2")
    form = t if isinstance(t, CycleForm) else standard_cycle_form(t)
    if not form.cycles:
        value = factorial(n) // factorial(len(items))
        return Chain.indicator(all_words(items, n), n) * value
    support = form.support()
    if not support <= items:
        return Chain.zero(n)
    k = len(support)
    scale = factorial(n - k + 1) // factorial(len(items) - k + 1)
    return embed_into(wavelet_chain(form, n).chain, items) * scale
