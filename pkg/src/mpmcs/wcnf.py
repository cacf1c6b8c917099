"""Weighted partial MaxSAT instances and the ``p wcnf`` text dialect.

Layout::

    c optional comment
    p wcnf <vars> <clauses> <top>
    <weight> <lit> ... <lit> 0

A clause whose weight equals ``top`` is hard; any other weight marks a soft
clause. One clause per line.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, ParseError

TOP = 2_000_000_000


@dataclass(frozen=True)
class WcnfInstance:
    num_vars: int
    hard: tuple  # of literal tuples
    soft: tuple  # of (weight, literal tuple)
    top: int = TOP

    def __post_init__(self):
        object.__setattr__(self, "hard", tuple(tuple(c) for c in self.hard))
        object.__setattr__(self, "soft", tuple((int(w), tuple(c)) for w, c in self.soft))

    @property
    def num_clauses(self) -> int:
        return len(self.hard) + len(self.soft)

    @property
    def soft_weight_sum(self) -> int:
        return sum(w for w, _ in self.soft)

    @property
    def is_mpmcs_shaped(self) -> bool:
        """Every soft clause is a positive unit literal."""
        return all(len(c) == 1 and c[0] > 0 for _, c in self.soft)

    def check(self) -> None:
        """Raise InputError unless the instance is well formed for solving."""
        if self.num_vars < 0:
            raise InputError("negative variable count")
        for c in self.hard + tuple(c for _, c in self.soft):
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise InputError(f"literal {lit} out of range 1..{self.num_vars}")
        for w, _ in self.soft:
            if not 1 <= w < self.top:
                raise InputError(f"soft weight {w} outside [1, top)")
        if self.soft_weight_sum >= self.top:
            raise InputError("soft weights sum to top or more")

    def cost(self, model) -> int:
        """Sum of falsified soft weights under ``model`` (index 0 = variable 1)."""
        return sum(w for w, c in self.soft if not any(_holds(model, l) for l in c))

    def satisfies_hard(self, model) -> bool:
        return all(any(_holds(model, l) for l in c) for c in self.hard)


def _holds(model, lit: int) -> bool:
    return bool(model[abs(lit) - 1]) == (lit > 0)


def emit_wcnf(instance: WcnfInstance, comments=()) -> str:
    out = [f"c {line}".rstrip() for line in comments]
    out.append(f"p wcnf {instance.num_vars} {instance.num_clauses} {instance.top}")
    top = str(instance.top)
    for c in instance.hard:
        out.append(" ".join([top, *map(str, c), "0"]))
    for w, c in instance.soft:
        out.append(" ".join([str(w), *map(str, c), "0"]))
    return "\n".join(out) + "\n"


def parse_wcnf(text: str) -> WcnfInstance:
    header = None
    hard, soft = [], []
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line == "c" or line.startswith("c "):
            continue
        if line.startswith("p"):
            if header is not None:
                raise ParseError("second header", lineno)
            parts = line.split()
            if len(parts) != 5 or parts[:2] != ["p", "wcnf"]:
                raise ParseError(f"bad header {line!r}", lineno)
            try:
                header = tuple(int(x) for x in parts[2:])
            except ValueError:
                raise ParseError(f"bad header {line!r}", lineno) from None
            if header[0] < 0 or header[1] < 0 or header[2] < 1:
                raise ParseError("header counts must be non-negative", lineno)
            continue
        if header is None:
            raise ParseError("clause before header", lineno)
        num_vars, _, top = header
        try:
            nums = [int(x) for x in line.split()]
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno) from None
        if len(nums) < 2 or nums[-1] != 0:
            raise ParseError("clause not terminated by 0", lineno)
        weight, lits = nums[0], tuple(nums[1:-1])
        if weight < 1:
            raise ParseError(f"weight {weight} must be positive", lineno)
        if weight > top:
            raise ParseError(f"weight {weight} exceeds top {top}", lineno)
        if not lits:
            raise ParseError("empty clause", lineno)
        for lit in lits:
            if lit == 0:
                raise ParseError("0 inside clause", lineno)
            if abs(lit) > num_vars:
                raise ParseError(f"literal {lit} out of range 1..{num_vars}", lineno)
        if weight == top:
            hard.append(lits)
        else:
            soft.append((weight, lits))
    if header is None:
        raise ParseError("missing 'p wcnf' header", lineno or None)
    if len(hard) + len(soft) != header[1]:
        raise ParseError(
            f"header declares {header[1]} clauses, found {len(hard) + len(soft)}", lineno
        )
    return WcnfInstance(header[0], tuple(hard), tuple(soft), header[2])


def read_wcnf(path) -> WcnfInstance:
    with open(path, encoding="utf-8") as fh:
        return parse_wcnf(fh.read())


def write_wcnf(instance: WcnfInstance, path, comments=()) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(emit_wcnf(instance, comments))
