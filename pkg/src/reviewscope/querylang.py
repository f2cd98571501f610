"""The five-command review query language.

Commands are a closed grammar (`tSort`, `tFilter`, `tGrep`, `tColor`,
`tReset`) parsed into small ASTs and evaluated the same way on a locally
loaded page and on the server over a whole cluster or corpus, which is what
makes the two-step local/remote workflow consistent. Sessions are replayable:
the working set is always exactly what folding the history over the initial
set produces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterable, Protocol, Sequence, Union

COMMAND_NAMES = ("tSort", "tFilter", "tGrep", "tColor", "tReset")
PSEUDO_ATTRIBUTES = ("sentiment", "length")
COMPARATORS = ("<=", ">=", "==", "!=", "<", ">")

_CALL_RE = re.compile(r"^\s*([A-Za-z_]\w*)\s*\(\s*(.*?)\s*\)\s*$", re.DOTALL)
_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


class QueryParseError(ValueError):
    """Command text that does not parse; carries a position when known."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class Sort:
    attribute: str
    direction: str = "desc"  # asc|desc


@dataclass(frozen=True)
class Filter:
    attribute: str
    comparator: str
    value: float


@dataclass(frozen=True)
class Grep:
    pattern: str
    case_insensitive: bool = True


@dataclass(frozen=True)
class Color:
    attribute: str


@dataclass(frozen=True)
class Reset:
    pass


Command = Union[Sort, Filter, Grep, Color, Reset]


def _check_attribute(name: str, attributes: Iterable[str] | None) -> str:
    if attributes is None:
        return name
    valid = tuple(attributes) + PSEUDO_ATTRIBUTES
    if name not in valid:
        raise QueryParseError(
            f"unknown attribute {name!r}; known attributes: {', '.join(valid)}"
        )
    return name


def _split_args(args: str) -> list[str]:
    if not args.strip():
        return []
    return [part.strip() for part in args.split(",")]


def _parse_grep(arg: str, offset: int) -> Grep:
    if not arg:
        raise QueryParseError("tGrep takes one argument: /pattern/ or a quoted string")
    if arg[0] == "/":
        end = arg.rfind("/")
        if end == 0:
            raise QueryParseError("unterminated regular expression", position=offset)
        pattern, flags = arg[1:end], arg[end + 1 :].strip()
        if flags not in ("", "i"):
            raise QueryParseError(f"unsupported regex flags {flags!r}", position=offset + end + 1)
        case_insensitive = flags == "i"
    elif arg[0] in "'\"" and len(arg) >= 2 and arg[-1] == arg[0]:
        pattern = re.escape(arg[1:-1])
        case_insensitive = True  # plain text search matches case-insensitively
    else:
        raise QueryParseError(
            "tGrep argument must be /pattern/ with an optional i flag, or a quoted string",
            position=offset,
        )
    try:
        re.compile(pattern)
    except re.error as exc:
        pos = offset + 1 + (exc.pos or 0)
        raise QueryParseError(f"invalid regular expression: {exc.msg}", position=pos) from None
    return Grep(pattern=pattern, case_insensitive=case_insensitive)


def parse(text: str, attributes: Iterable[str] | None = None) -> Command:
    """Parse one command string into its AST.

    When a schema attribute list is supplied, attribute arguments are
    validated against it plus the pseudo-attributes ``sentiment`` and
    ``length``.
    """
    match = _CALL_RE.match(text)
    if not match:
        raise QueryParseError(
            "expected a command of the form name(arguments), "
            f"with name one of: {', '.join(COMMAND_NAMES)}"
        )
    name, args = match.group(1), match.group(2)
    if name not in COMMAND_NAMES:
        raise QueryParseError(
            f"unknown command {name!r}; valid commands: {', '.join(COMMAND_NAMES)}",
            position=match.start(1),
        )

    if name == "tReset":
        if args.strip():
            raise QueryParseError("tReset takes no arguments")
        return Reset()

    if name == "tGrep":
        return _parse_grep(args.strip(), offset=match.start(2))

    parts = _split_args(args)
    if name == "tColor":
        if len(parts) != 1 or not parts[0]:
            raise QueryParseError("tColor takes exactly one attribute argument")
        return Color(_check_attribute(parts[0], attributes))

    if name == "tSort":
        if len(parts) not in (1, 2) or not parts or not parts[0]:
            raise QueryParseError("tSort takes an attribute and an optional direction")
        attribute = _check_attribute(parts[0], attributes)
        direction = "desc"
        if len(parts) == 2:
            direction = parts[1].lower()
            if direction not in ("asc", "desc"):
                raise QueryParseError(f"sort direction must be asc or desc, not {parts[1]!r}")
        return Sort(attribute, direction)

    # tFilter(attr, cmpOp number)
    if len(parts) != 2 or not parts[0]:
        raise QueryParseError("tFilter takes an attribute and a predicate like '> 0.5'")
    attribute = _check_attribute(parts[0], attributes)
    predicate = parts[1]
    for op in COMPARATORS:
        if predicate.startswith(op):
            number = predicate[len(op) :].strip()
            if not _NUMBER_RE.match(number):
                raise QueryParseError(f"tFilter value is not a number: {number!r}")
            return Filter(attribute, op, float(number))
    raise QueryParseError(
        f"tFilter predicate must start with one of {', '.join(COMPARATORS)}: got {predicate!r}"
    )


def command_to_string(cmd: Command) -> str:
    """Canonical text form; parse(command_to_string(c)) == c."""
    if isinstance(cmd, Sort):
        return f"tSort({cmd.attribute}, {cmd.direction})"
    if isinstance(cmd, Filter):
        value = repr(cmd.value)
        return f"tFilter({cmd.attribute}, {cmd.comparator} {value})"
    if isinstance(cmd, Grep):
        flag = "i" if cmd.case_insensitive else ""
        return f"tGrep(/{cmd.pattern}/{flag})"
    if isinstance(cmd, Color):
        return f"tColor({cmd.attribute})"
    if isinstance(cmd, Reset):
        return "tReset()"
    raise TypeError(f"not a command: {cmd!r}")


class ReviewStore(Protocol):
    """What evaluation needs to know about reviews.

    attribute_value returns None when the attribute was not detected for the
    review; the pseudo-attributes ``sentiment`` and ``length`` are always
    present.
    """

    def text(self, review_id: str) -> str: ...

    def attribute_value(self, review_id: str, attribute: str) -> float | None: ...


@dataclass(frozen=True)
class Session:
    """Composable evaluation state over an initially selected review set."""

    initial_ids: tuple[str, ...]
    working_ids: tuple[str, ...]
    history: tuple[Command, ...] = ()
    color_attribute: str | None = None

    @classmethod
    def fresh(cls, ids: Sequence[str]) -> "Session":
        ids = tuple(ids)
        return cls(initial_ids=ids, working_ids=ids)


_FILTER_OPS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}


def _evaluate(ids: tuple[str, ...], cmd: Command, store: ReviewStore) -> tuple[str, ...]:
    if isinstance(cmd, Sort):
        keyed = [(rid, store.attribute_value(rid, cmd.attribute)) for rid in ids]
        present = [(rid, v) for rid, v in keyed if v is not None]
        absent = [rid for rid, v in keyed if v is None]
        present.sort(key=lambda rv: rv[1], reverse=(cmd.direction == "desc"))
        return tuple(rid for rid, _ in present) + tuple(absent)
    if isinstance(cmd, Filter):
        op = _FILTER_OPS[cmd.comparator]
        kept = []
        for rid in ids:
            value = store.attribute_value(rid, cmd.attribute)
            if value is not None and op(value, cmd.value):
                kept.append(rid)
        return tuple(kept)
    if isinstance(cmd, Grep):
        pattern = re.compile(cmd.pattern, re.IGNORECASE if cmd.case_insensitive else 0)
        return tuple(rid for rid in ids if pattern.search(store.text(rid)))
    if isinstance(cmd, (Color, Reset)):
        return ids
    raise TypeError(f"not a command: {cmd!r}")


def apply(session: Session, cmd: Command, store: ReviewStore) -> Session:
    """One evaluation step; every command but tReset appends to history.

    tSort is stable and puts reviews missing the attribute last regardless
    of direction; tFilter drops them (absence is not a score of zero);
    tColor only records the color attribute.
    """
    if isinstance(cmd, Reset):
        return Session.fresh(session.initial_ids)
    working = _evaluate(session.working_ids, cmd, store)
    color = cmd.attribute if isinstance(cmd, Color) else session.color_attribute
    return replace(
        session,
        working_ids=working,
        history=session.history + (cmd,),
        color_attribute=color,
    )


def replay(initial_ids: Sequence[str], history: Sequence[Command], store: ReviewStore) -> Session:
    session = Session.fresh(initial_ids)
    for cmd in history:
        session = apply(session, cmd, store)
    return session


def evaluate_remote(
    history: Sequence[Command | str],
    scope_ids: Sequence[str],
    store: ReviewStore,
    attributes: Iterable[str] | None = None,
) -> tuple[str, ...]:
    """Replay a command history against every review in scope.

    History entries may be command strings straight off the wire; they are
    re-parsed here. The result order is the post-sort order when the history
    sorts, otherwise the scope's ingestion order.
    """
    commands: list[Command] = []
    attrs = tuple(attributes) if attributes is not None else None
    for i, entry in enumerate(history):
        if isinstance(entry, str):
            try:
                commands.append(parse(entry, attrs))
            except QueryParseError as exc:
                raise QueryParseError(f"history entry {i}: {exc}", position=exc.position) from None
        elif isinstance(entry, (Sort, Filter, Grep, Color, Reset)):
            commands.append(entry)
        else:
            raise QueryParseError(f"history entry {i}: not a command: {entry!r}")
    return replay(scope_ids, commands, store).working_ids
