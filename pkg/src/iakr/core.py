"""Schemas, attribute sets, constraints, relations and their text formats.

Relations are stored column-wise as an ``int64`` matrix of value codes.  For
relations built from arbitrary values (CSV, literal rows) each column carries
a label table mapping code -> original value; relations produced by the
generators use the non-negative integers themselves as codes and carry no
labels.  Either way only equality of values is ever observed.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Sequence

import numpy as np

IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")

AttrSet = frozenset  # frozenset[str]


class SchemaError(ValueError):
    """An attribute or constraint does not belong to the schema at hand."""


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class CSVFormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# schemas and constraints
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Schema:
    name: str
    attributes: tuple[str, ...]

    def __post_init__(self):
        attrs = tuple(self.attributes)
        object.__setattr__(self, "attributes", attrs)
        if not attrs:
            raise SchemaError("schema must declare at least one attribute")
        if len(set(attrs)) != len(attrs):
            dup = next(a for a in attrs if attrs.count(a) > 1)
            raise SchemaError(f"duplicate attribute {dup!r} in schema {self.name}")

    def __len__(self) -> int:
        return len(self.attributes)

    def __iter__(self) -> Iterator[str]:
        return iter(self.attributes)

    def __contains__(self, attr: object) -> bool:
        return attr in self._index

    @property
    def _index(self) -> dict[str, int]:
        # cached lazily; the dataclass is frozen so bypass __setattr__
        try:
            return self.__dict__["_idx"]
        except KeyError:
            idx = {a: i for i, a in enumerate(self.attributes)}
            object.__setattr__(self, "_idx", idx)
            return idx

    @property
    def all_attributes(self) -> frozenset[str]:
        return frozenset(self.attributes)

    def index(self, attr: str) -> int:
        try:
            return self._index[attr]
        except KeyError:
            raise SchemaError(f"unknown attribute {attr!r} in schema {self.name}") from None

    def attrset(self, attrs: Iterable[str] | str) -> frozenset[str]:
        """Validate ``attrs`` against the schema; a string is split on whitespace."""
        if isinstance(attrs, str):
            attrs = attrs.split()
        out = frozenset(attrs)
        for a in out:
            self.index(a)
        return out

    def ordered(self, attrs: Iterable[str]) -> list[str]:
        """``attrs`` in declaration order."""
        return sorted(attrs, key=self.index)

    def columns(self, attrs: Iterable[str]) -> list[int]:
        return sorted(self.index(a) for a in attrs)

    def mask(self, attrs: Iterable[str]) -> int:
        m = 0
        for a in attrs:
            m |= 1 << self.index(a)
        return m

    def from_mask(self, mask: int) -> frozenset[str]:
        return frozenset(a for i, a in enumerate(self.attributes) if mask >> i & 1)


def _side_key(attrs: frozenset[str]) -> tuple[str, ...]:
    return tuple(sorted(attrs))


@dataclass(frozen=True)
class Key:
    """``key(X)``: no two distinct tuples agree on all of ``attrs``."""

    attrs: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "attrs", frozenset(self.attrs))

    @property
    def attributes(self) -> frozenset[str]:
        return self.attrs

    def sort_key(self) -> tuple:
        return (0, len(self.attrs), _side_key(self.attrs))

    def format(self, schema: Schema | None = None) -> str:
        names = schema.ordered(self.attrs) if schema else sorted(self.attrs)
        return f"key({' '.join(names)})"

    def __str__(self) -> str:
        return self.format()


@dataclass(frozen=True)
class IA:
    """Independence atom ``left ⊥ right``.

    Orientation is kept: ``IA(X, Y)`` and ``IA(Y, X)`` are different objects
    (proof checking needs the symmetry rule to be explicit).  Constraint sets
    store the normalized orientation, see :meth:`normalized`.
    """

    left: frozenset[str]
    right: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))

    @property
    def attributes(self) -> frozenset[str]:
        return self.left | self.right

    @property
    def is_unary(self) -> bool:
        return len(self.left) == 1 and len(self.right) == 1

    @property
    def is_trivial(self) -> bool:
        return not self.left or not self.right

    def flipped(self) -> IA:
        return IA(self.right, self.left)

    def normalized(self) -> IA:
        if _side_key(self.right) < _side_key(self.left):
            return self.flipped()
        return self

    def sort_key(self) -> tuple:
        return (1, len(self.left) + len(self.right), _side_key(self.left), _side_key(self.right))

    def format(self, schema: Schema | None = None) -> str:
        order = schema.ordered if schema else sorted
        left = " ".join(order(self.left))
        right = " ".join(order(self.right))
        return f"ind({left} ; {right})".replace("( ;", "(;").replace("; )", ";)")

    def __str__(self) -> str:
        return self.format()


Constraint = Key | IA


def key(*attrs: str) -> Key:
    """Shorthand: ``key("A", "B")`` or ``key("A B")``."""
    return Key(frozenset(_split(attrs)))


def ind(left: Iterable[str] | str, right: Iterable[str] | str) -> IA:
    """Shorthand: ``ind("A", "B C")`` is ``A ⊥ BC``."""
    return IA(frozenset(_split([left])), frozenset(_split([right])))


def _split(parts) -> list[str]:
    out: list[str] = []
    for p in parts:
        if isinstance(p, str):
            out.extend(p.split())
        else:
            out.extend(p)
    return out


def check_constraint(schema: Schema, c: Constraint) -> None:
    for a in c.attributes:
        schema.index(a)


class ConstraintSet:
    """A finite set of constraints over one schema.

    Independence atoms are stored in normalized orientation, so ``A ⊥ B`` and
    ``B ⊥ A`` collapse to one member.  Iteration order is deterministic.
    """

    __slots__ = ("schema", "_items", "_set")

    def __init__(self, schema: Schema, constraints: Iterable[Constraint] = ()):
        items = set()
        for c in constraints:
            check_constraint(schema, c)
            items.add(c.normalized() if isinstance(c, IA) else c)
        self.schema = schema
        self._items = tuple(sorted(items, key=_constraint_order(schema)))
        self._set = frozenset(self._items)

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, c: object) -> bool:
        return c in self._set

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConstraintSet):
            return NotImplemented
        return self.schema == other.schema and self._set == other._set

    def __hash__(self) -> int:
        return hash((self.schema, self._set))

    def __repr__(self) -> str:
        body = ", ".join(c.format(self.schema) for c in self._items)
        return f"ConstraintSet({self.schema.name}: {body})"

    def contains_up_to_symmetry(self, c: Constraint) -> bool:
        if isinstance(c, IA):
            return c.normalized() in self._set
        return c in self._set

    @property
    def keys(self) -> tuple[Key, ...]:
        return tuple(c for c in self._items if isinstance(c, Key))

    @property
    def ias(self) -> tuple[IA, ...]:
        return tuple(c for c in self._items if isinstance(c, IA))

    def with_(self, *extra: Constraint) -> ConstraintSet:
        return ConstraintSet(self.schema, (*self._items, *extra))

    def without(self, *removed: Constraint) -> ConstraintSet:
        drop = {c.normalized() if isinstance(c, IA) else c for c in removed}
        return ConstraintSet(self.schema, (c for c in self._items if c not in drop))


def _constraint_order(schema: Schema):
    def order(c: Constraint):
        if isinstance(c, Key):
            return (0, schema.mask(c.attrs).bit_count(), _mask_bits(schema, c.attrs))
        return (1, _mask_bits(schema, c.left), _mask_bits(schema, c.right))

    return order


def _mask_bits(schema: Schema, attrs) -> tuple[int, ...]:
    return tuple(sorted(schema.index(a) for a in attrs))


# ---------------------------------------------------------------------------
# constraint DSL
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<punct>[:;()])")


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident", "punct" or "eof"
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group()
        if m.lastgroup in ("ident", "punct"):
            tokens.append(_Token(m.lastgroup, chunk, line, col))
        newlines = chunk.count("\n")
        if newlines:
            line += newlines
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        raise ParseError(message, tok.line, tok.column)

    def expect(self, text: str) -> _Token:
        tok = self.tok
        if tok.text != text or tok.kind == "eof":
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            self.fail(f"expected {text!r}, found {found}")
        self.pos += 1
        return tok

    def ident(self) -> _Token:
        tok = self.tok
        if tok.kind != "ident":
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            self.fail(f"expected identifier, found {found}")
        self.pos += 1
        return tok

    def idents_until(self, *stops: str) -> list[_Token]:
        out = []
        while self.tok.kind == "ident":
            out.append(self.ident())
        if self.tok.text not in stops or self.tok.kind == "eof":
            self.fail(f"expected identifier or {' or '.join(map(repr, stops))}")
        return out

    def schema_decl(self) -> Schema:
        self.expect("schema")
        name = self.ident().text
        self.expect(":")
        attrs = self.idents_until(";")
        if not attrs:
            self.fail("schema must declare at least one attribute")
        seen = set()
        for a in attrs:
            if a.text in seen:
                self.fail(f"duplicate attribute {a.text!r} in schema", a)
            seen.add(a.text)
        self.expect(";")
        return Schema(name, tuple(a.text for a in attrs))

    def attr_list(self, schema: Schema, *stops: str) -> frozenset[str]:
        toks = self.idents_until(*stops)
        for t in toks:
            if t.text not in schema:
                self.fail(f"unknown attribute {t.text!r}", t)
        return frozenset(t.text for t in toks)

    def statement(self, schema: Schema) -> Constraint:
        head = self.tok
        if head.kind == "ident" and head.text == "key":
            self.pos += 1
            self.expect("(")
            attrs = self.attr_list(schema, ")")
            self.expect(")")
            return Key(attrs)
        if head.kind == "ident" and head.text == "ind":
            self.pos += 1
            self.expect("(")
            left = self.attr_list(schema, ";")
            self.expect(";")
            right = self.attr_list(schema, ")")
            self.expect(")")
            return IA(left, right)
        found = "end of input" if head.kind == "eof" else repr(head.text)
        self.fail(f"expected 'key' or 'ind', found {found}")


def parse_constraint_file(text: str) -> tuple[Schema, ConstraintSet]:
    """Parse ``schema R: A B; key(A B); ind(A ; B);``.

    Raises :class:`ParseError` (with 1-based line/column) on syntax errors,
    unknown attributes, duplicate schema attributes and empty schemas.
    """
    p = _Parser(text)
    schema = p.schema_decl()
    constraints = []
    while p.tok.kind != "eof":
        constraints.append(p.statement(schema))
        p.expect(";")
    return schema, ConstraintSet(schema, constraints)


def parse_constraint(text: str, schema: Schema) -> Constraint:
    """Parse one statement such as ``key(A B)`` or ``ind(A ; B)``.

    The trailing semicolon is optional.  Orientation of an IA is preserved.
    """
    p = _Parser(text)
    c = p.statement(schema)
    if p.tok.text == ";" and p.tok.kind == "punct":
        p.pos += 1
    if p.tok.kind != "eof":
        p.fail(f"unexpected {p.tok.text!r} after constraint")
    return c


def format_constraint_file(schema: Schema, constraints: Iterable[Constraint]) -> str:
    lines = [f"schema {schema.name}: {' '.join(schema.attributes)};"]
    lines.extend(f"{c.format(schema)};" for c in constraints)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# relations
# ---------------------------------------------------------------------------


def _group_ids(data: np.ndarray, cols: Sequence[int]) -> tuple[np.ndarray, int]:
    """Dense ids (0..k-1) of the projection of each row onto ``cols``, and k.

    Ids are ordered lexicographically by the underlying codes.
    """
    n = data.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64), 0
    if not cols:
        return np.zeros(n, dtype=np.int64), 1
    ids = None
    span = 1
    for c in cols:
        col = data[:, c]
        lo, hi = int(col.min()), int(col.max())
        width = hi - lo + 1
        if width <= 4 * n + 16:
            codes = col - lo
        else:
            uniq, codes = np.unique(col, return_inverse=True)
            width = len(uniq)
        if ids is None:
            ids, span = codes.astype(np.int64, copy=False), width
        elif span * width < 2**62:
            ids, span = ids * width + codes, span * width
        else:
            uniq, ids = np.unique(ids, return_inverse=True)
            ids, span = ids * width + codes, len(uniq) * width
    uniq, ids = np.unique(ids, return_inverse=True)
    return ids.reshape(-1), len(uniq)


def _distinct_count(data: np.ndarray, cols: Sequence[int]) -> int:
    return _group_ids(data, cols)[1]


class Relation:
    """A finite set of tuples over a schema.

    Rows are kept in first-insertion order; duplicates collapse.  Use
    :meth:`from_rows` for arbitrary hashable values and the constructor for
    an integer code matrix.
    """

    __slots__ = ("schema", "data", "labels")

    def __init__(self, schema: Schema, data, labels: Sequence[Sequence[Hashable]] | None = None, *, distinct: bool = False):
        arr = np.asarray(data, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, len(schema))
        if arr.ndim != 2 or arr.shape[1] != len(schema):
            raise SchemaError(f"expected rows of width {len(schema)}, got shape {arr.shape}")
        if not distinct and arr.shape[0] > 1:
            ids, k = _group_ids(arr, range(arr.shape[1]))
            if k < arr.shape[0]:
                _, first = np.unique(ids, return_index=True)
                arr = arr[np.sort(first)]
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        self.schema = schema
        self.data = arr
        self.labels = tuple(tuple(col) for col in labels) if labels is not None else None

    @classmethod
    def from_rows(cls, schema: Schema, rows: Iterable[Sequence[Hashable]]) -> Relation:
        rows = [tuple(r) for r in rows]
        width = len(schema)
        for r in rows:
            if len(r) != width:
                raise SchemaError(f"row {r!r} does not have {width} values")
        if all(type(v) is int and v >= 0 for r in rows for v in r):
            return cls(schema, np.array(rows, dtype=np.int64).reshape(len(rows), width))
        labels: list[list] = [[] for _ in range(width)]
        index: list[dict] = [{} for _ in range(width)]
        codes = np.empty((len(rows), width), dtype=np.int64)
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                code = index[j].get(v)
                if code is None:
                    code = index[j][v] = len(labels[j])
                    labels[j].append(v)
                codes[i, j] = code
        return cls(schema, codes, labels)

    @classmethod
    def empty(cls, schema: Schema) -> Relation:
        return cls(schema, np.zeros((0, len(schema)), dtype=np.int64))

    def __len__(self) -> int:
        return self.data.shape[0]

    def decode(self, j: int, code: int) -> Hashable:
        return self.labels[j][code] if self.labels is not None else int(code)

    def row(self, i: int) -> tuple:
        return tuple(self.decode(j, c) for j, c in enumerate(self.data[i]))

    def rows(self) -> list[tuple]:
        if self.labels is None:
            return [tuple(r) for r in self.data.tolist()]
        return [tuple(self.labels[j][c] for j, c in enumerate(r)) for r in self.data.tolist()]

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.rows())

    def tuple_dict(self, i: int) -> dict[str, Hashable]:
        return dict(zip(self.schema.attributes, self.row(i)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return self.schema == other.schema and set(self.rows()) == set(other.rows())

    def __hash__(self) -> int:
        return hash((self.schema, frozenset(self.rows())))

    def issubset(self, other: Relation) -> bool:
        return self.schema == other.schema and set(self.rows()) <= set(other.rows())

    def __repr__(self) -> str:
        return f"Relation({self.schema.name}, {len(self)} tuples)"

    def code_of(self, attr: str, value: Hashable) -> int | None:
        j = self.schema.index(attr)
        if self.labels is None:
            if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
                return int(value)
            return None
        try:
            return self.labels[j].index(value)
        except ValueError:
            return None

    def rename(self, schema: Schema, mapping: dict[str, str]) -> Relation:
        """Relabel columns: column ``a`` of ``self`` becomes ``mapping[a]`` of ``schema``."""
        if sorted(mapping) != sorted(self.schema.attributes) or sorted(mapping.values()) != sorted(schema.attributes):
            raise SchemaError("mapping must be a bijection between the two schemas")
        order = [self.schema.index(a) for a in sorted(mapping, key=lambda a: schema.index(mapping[a]))]
        labels = [self.labels[j] for j in order] if self.labels is not None else None
        return Relation(schema, self.data[:, order], labels, distinct=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.schema.attributes)
        for r in self.rows():
            w.writerow([str(v) for v in r])
        return buf.getvalue()


def load_relation(csv_text: str, schema: Schema) -> Relation:
    """Read CSV text whose header is a permutation of the schema attributes.

    Values are kept as exact strings.  An input with a header and no rows is
    the empty relation; an input without a header is an error.
    """
    reader = csv.reader(io.StringIO(csv_text))
    rows = [r for r in reader if r]
    if not rows:
        raise CSVFormatError("empty CSV input (no header row)")
    header, body = rows[0], rows[1:]
    if sorted(header) != sorted(schema.attributes) or len(set(header)) != len(header):
        raise CSVFormatError(f"header {header!r} does not match schema attributes {list(schema.attributes)!r}")
    order = [header.index(a) for a in schema.attributes]
    out = []
    for lineno, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise CSVFormatError(f"row {lineno} has {len(r)} fields, expected {len(header)}")
        out.append(tuple(r[j] for j in order))
    if not out:
        return Relation(schema, np.zeros((0, len(schema)), dtype=np.int64), [[] for _ in schema.attributes])
    return Relation.from_rows(schema, out)


def projection_size(r: Relation, attrs: Iterable[str]) -> int:
    """``|r(X)|`` without materializing the projection."""
    return _distinct_count(r.data, r.schema.columns(r.schema.attrset(attrs)))


def project(r: Relation, attrs: Iterable[str]) -> frozenset[tuple]:
    """``r(X)`` as a set of value tuples in schema order of ``X``.

    Projecting a non-empty relation onto ∅ gives one empty tuple.
    """
    cols = r.schema.columns(r.schema.attrset(attrs))
    if len(r) == 0:
        return frozenset()
    ids, _ = _group_ids(r.data, cols)
    _, first = np.unique(ids, return_index=True)
    return frozenset(tuple(r.decode(j, r.data[i, j]) for j in cols) for i in first.tolist())


def select_eq(r: Relation, attr: str, value: Hashable) -> Relation:
    """``r(A = a)``."""
    j = r.schema.index(attr)
    code = r.code_of(attr, value)
    if code is None:
        mask = np.zeros(len(r), dtype=bool)
    else:
        mask = r.data[:, j] == code
    return Relation(r.schema, r.data[mask], r.labels, distinct=True)
