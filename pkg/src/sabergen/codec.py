"""Bidirectional conversion between game records and token sequences.

The tokenizer is a closed-vocabulary domain tokenizer: field-tagged
emission (a tag token followed by value tokens) over a fixed grammar.

    game     := BOS context [GAME_SEP pa+] EOS
    context  := game_id date home_team away_team venue season_type [weather]
    pa       := PA_SEP inning half outs home_score away_score runners
                pa_id batter_id pitcher_id pitch+ terminal_event
    pitch    := PITCH_SEP pitch_type release_speed release_pos spin_rate
                spin_axis plate_x plate_z sz_top sz_bot balls strikes
                swing outcome

Each field is a tag token followed by its value: enumerations and booleans
are single tokens, real numbers are single quantized-bucket tokens,
bounded integers are fixed-width digit runs (inning and scores two digits,
outs/balls/strikes one), and identifiers / free text are character runs
over a fixed alphabet, ended by the next non-character token. Pitch
numbers are not emitted; they are reconstructed from position.

Every pitch costs exactly ``TOKENS_PER_PITCH`` tokens, so sequence length
is an affine function of plate-appearance count, pitch count, and
identifier lengths.
"""

from __future__ import annotations

import datetime as _dt
import logging
import math
import struct
from dataclasses import dataclass, field as _dc_field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import ConfigError, SerializationError, TokenParseError
from .events import (
    GameContext,
    GameRecord,
    Half,
    InningState,
    Outcome,
    PitchEvent,
    PitchType,
    PlateAppearance,
    SeasonType,
    TerminalEvent,
)

logger = logging.getLogger(__name__)

__all__ = [
    "Token",
    "Vocabulary",
    "QuantizationSpec",
    "TokenSequence",
    "Window",
    "GameIndex",
    "PaIndex",
    "PitchIndex",
    "build_vocab",
    "default_qspec",
    "serialize",
    "serialize_indexed",
    "parse",
    "quantize_game",
    "window",
    "expected_length",
    "write_token_file",
    "read_token_file",
    "write_vocab_file",
    "read_vocab_file",
    "TOKENS_PER_PITCH",
    "SPECIALS",
]

# Reserved special tokens, ids 0..6.
PAD, BOS, EOS, GAME_SEP, PA_SEP, PITCH_SEP, UNK = range(7)
SPECIALS = ("<pad>", "<bos>", "<eos>", "<game>", "<pa>", "<pitch>", "<unk>")

# Field tags in canonical emission order.
_TAG_NAMES = (
    "game_id",
    "date",
    "home_team",
    "away_team",
    "venue",
    "season_type",
    "weather",
    "inning",
    "half",
    "outs",
    "home_score",
    "away_score",
    "runners",
    "pa_id",
    "batter_id",
    "pitcher_id",
    "pitch_type",
    "release_speed",
    "release_pos",
    "spin_rate",
    "spin_axis",
    "plate_x",
    "plate_z",
    "sz_top",
    "sz_bot",
    "balls",
    "strikes",
    "swing",
    "outcome",
    "terminal_event",
)

# Character alphabet for identifiers, dates, team codes, venues, weather,
# and fixed-width integer fields. Digits first so digit ids are contiguous.
_CHARSET = (
    "0123456789"
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "abcdefghijklmnopqrstuvwxyz"
    " -_./'"
)

# Quantized real-valued fields in emission order.
NUMERIC_FIELDS = (
    "release_speed",
    "release_pos_x",
    "release_pos_y",
    "release_pos_z",
    "spin_rate",
    "spin_axis",
    "plate_x",
    "plate_z",
    "sz_top",
    "sz_bot",
)

_PITCH_SINGLE_VALUE_FIELDS = 12  # all pitch fields except release_pos
TOKENS_PER_PITCH = 1 + 2 * _PITCH_SINGLE_VALUE_FIELDS + 4  # sep + tagged fields


@dataclass(frozen=True)
class Token:
    id: int
    surface: str


@dataclass(frozen=True)
class FieldQuant:
    """Quantization of one numeric field: buckets of width ``step`` over
    [lower, upper), values outside clamped to the end buckets."""

    lower: float
    upper: float
    step: float

    @property
    def buckets(self) -> int:
        return int(math.ceil((self.upper - self.lower) / self.step - 1e-9))

    def bucket(self, value: float) -> tuple[int, bool]:
        """Bucket index for a value and whether it had to be clamped."""
        i = int(math.floor((value - self.lower) / self.step))
        n = self.buckets
        if 0 <= i < n:
            return i, False
        return min(max(i, 0), n - 1), True

    def midpoint(self, i: int) -> float:
        return self.lower + self.step * (i + 0.5)

    def quantize(self, value: float) -> float:
        return self.midpoint(self.bucket(value)[0])


@dataclass(frozen=True)
class QuantizationSpec:
    """Per-field numeric quantization. Field names must cover exactly
    ``NUMERIC_FIELDS``."""

    fields: dict[str, FieldQuant]

    def __post_init__(self) -> None:
        if set(self.fields) != set(NUMERIC_FIELDS):
            missing = set(NUMERIC_FIELDS) - set(self.fields)
            extra = set(self.fields) - set(NUMERIC_FIELDS)
            raise ConfigError(
                f"quantization spec fields mismatch: missing {sorted(missing)}, unexpected {sorted(extra)}"
            )
        for name, fq in self.fields.items():
            if fq.step <= 0:
                raise ConfigError(f"quantization step for {name} must be > 0")
            if fq.upper <= fq.lower:
                raise ConfigError(f"quantization bounds for {name} must satisfy upper > lower")
            if fq.buckets >= 1000:
                raise ConfigError(
                    f"quantization of {name} produces {fq.buckets} buckets (limit 1000)"
                )


def default_qspec() -> QuantizationSpec:
    """Default quantization: 0.5 mph speed, 50 rpm spin, 5 degree axis,
    0.1 ft positions."""
    return QuantizationSpec(
        {
            "release_speed": FieldQuant(30.0, 110.0, 0.5),
            "release_pos_x": FieldQuant(-8.0, 8.0, 0.1),
            "release_pos_y": FieldQuant(45.0, 65.0, 0.1),
            "release_pos_z": FieldQuant(0.0, 10.0, 0.1),
            "spin_rate": FieldQuant(0.0, 4000.0, 50.0),
            "spin_axis": FieldQuant(0.0, 360.0, 5.0),
            "plate_x": FieldQuant(-5.0, 5.0, 0.1),
            "plate_z": FieldQuant(-2.5, 7.5, 0.1),
            "sz_top": FieldQuant(2.0, 5.0, 0.1),
            "sz_bot": FieldQuant(0.5, 3.5, 0.1),
        }
    )


class Vocabulary:
    """Closed token inventory: specials, field tags, enumeration values,
    characters, and quantized-numeric buckets. Construction is
    deterministic given the quantization spec."""

    def __init__(self, qspec: QuantizationSpec):
        self.qspec = qspec
        surfaces: list[str] = list(SPECIALS)

        self.tag_id: dict[str, int] = {}
        for name in _TAG_NAMES:
            self.tag_id[name] = len(surfaces)
            surfaces.append(f"tag:{name}")
        self._tag_name_by_id = {v: k for k, v in self.tag_id.items()}

        def add_enum(prefix: str, values: Iterable[str]) -> dict[str, int]:
            table = {}
            for v in values:
                table[v] = len(surfaces)
                surfaces.append(f"{prefix}:{v}")
            return table

        self.pitch_type_id = add_enum("pt", [p.value for p in PitchType])
        self.outcome_id = add_enum("out", [o.value for o in Outcome])
        self.terminal_id = add_enum("end", [t.value for t in TerminalEvent])
        self.half_id = add_enum("half", [h.value for h in Half])
        self.season_id = add_enum("season", [s.value for s in SeasonType])
        self.bool_id = {False: len(surfaces), True: len(surfaces) + 1}
        surfaces += ["flag:false", "flag:true"]

        self.char_id: dict[str, int] = {}
        self._char_base = len(surfaces)
        for ch in _CHARSET:
            self.char_id[ch] = len(surfaces)
            surfaces.append("c:space" if ch == " " else f"c:{ch}")
        self._char_end = len(surfaces)

        self.bucket_base: dict[str, int] = {}
        for name in NUMERIC_FIELDS:
            fq = qspec.fields[name]
            self.bucket_base[name] = len(surfaces)
            surfaces += [f"q:{name}:{fq.midpoint(i):.4f}" for i in range(fq.buckets)]

        if len(set(surfaces)) != len(surfaces):
            raise ConfigError("vocabulary surfaces are not unique")
        self._surfaces = surfaces
        self._id_of = {s: i for i, s in enumerate(surfaces)}

        # reverse maps used by the parser
        self._enum_by_id: dict[int, tuple[str, str]] = {}
        for family, table in (
            ("pt", self.pitch_type_id),
            ("out", self.outcome_id),
            ("end", self.terminal_id),
            ("half", self.half_id),
            ("season", self.season_id),
        ):
            for v, i in table.items():
                self._enum_by_id[i] = (family, v)
        self._digit_base = self.char_id["0"]

    def __len__(self) -> int:
        return len(self._surfaces)

    @property
    def size(self) -> int:
        return len(self._surfaces)

    @property
    def surfaces(self) -> tuple[str, ...]:
        return tuple(self._surfaces)

    def lookup(self, surface: str) -> int:
        return self._id_of[surface]

    def surface(self, token_id: int) -> str:
        return self._surfaces[token_id]

    def token(self, token_id: int) -> Token:
        return Token(token_id, self._surfaces[token_id])

    def is_char(self, token_id: int) -> bool:
        return self._char_base <= token_id < self._char_end

    def char_of(self, token_id: int) -> str:
        return _CHARSET[token_id - self._char_base]

    def is_digit(self, token_id: int) -> bool:
        return self._digit_base <= token_id < self._digit_base + 10

    def digit_of(self, token_id: int) -> int:
        return token_id - self._digit_base

    def tag_name(self, token_id: int) -> Optional[str]:
        return self._tag_name_by_id.get(token_id)

    def bucket_token(self, field: str, value: float) -> tuple[int, bool]:
        """Token id of the bucket holding ``value`` and a clamp flag."""
        i, clamped = self.qspec.fields[field].bucket(value)
        return self.bucket_base[field] + i, clamped

    def bucket_value(self, field: str, token_id: int) -> float:
        return self.qspec.fields[field].midpoint(token_id - self.bucket_base[field])

    def is_bucket(self, field: str, token_id: int) -> bool:
        base = self.bucket_base[field]
        return base <= token_id < base + self.qspec.fields[field].buckets


def build_vocab(qspec: QuantizationSpec) -> Vocabulary:
    """Deterministic vocabulary for a quantization spec."""
    return Vocabulary(qspec)


@dataclass(frozen=True)
class TokenSequence:
    """Serialized form of one game."""

    tokens: tuple[int, ...]
    provenance: str  # game_id

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Window:
    """One fixed-size chunk of a token sequence."""

    tokens: tuple[int, ...]
    offset: int


@dataclass(frozen=True)
class PitchIndex:
    """Token offsets of one pitch block within a serialized game:
    ``start`` is the PITCH_SEP, ``type_value`` the pitch-type value token,
    ``swing_value`` the swing value token."""

    start: int
    type_value: int
    swing_value: int


@dataclass(frozen=True)
class PaIndex:
    start: int  # offset of the PA_SEP
    pitches: tuple[PitchIndex, ...]


@dataclass(frozen=True)
class GameIndex:
    """Structural index of a serialized game, for cutting prediction
    contexts without re-scanning tokens."""

    pas: tuple[PaIndex, ...]


class _Emitter:
    def __init__(self, vocab: Vocabulary):
        self.vocab = vocab
        self.out: list[int] = []
        self.clamped: set[str] = set()

    def special(self, token_id: int) -> None:
        self.out.append(token_id)

    def chars(self, field: str, text: str) -> None:
        char_id = self.vocab.char_id
        try:
            self.out.extend(char_id[ch] for ch in text)
        except KeyError as exc:
            raise SerializationError(
                f"field {field}: character {exc.args[0]!r} is outside the token alphabet"
            ) from None

    def tagged_chars(self, field: str, text: str) -> None:
        self.out.append(self.vocab.tag_id[field])
        self.chars(field, text)

    def tagged_int(self, field: str, value: int, width: int) -> None:
        if not 0 <= value < 10**width:
            raise SerializationError(f"field {field}: {value} does not fit in {width} digits")
        self.out.append(self.vocab.tag_id[field])
        digit_base = self.vocab.char_id["0"]
        self.out.extend(digit_base + int(d) for d in f"{value:0{width}d}")

    def tagged_enum(self, field: str, table: dict[str, int], value) -> None:
        try:
            token = table[value.value]
        except (KeyError, AttributeError):
            raise SerializationError(f"field {field}: unknown enumeration value {value!r}") from None
        self.out.append(self.vocab.tag_id[field])
        self.out.append(token)

    def tagged_bool(self, field: str, value: bool) -> None:
        self.out.append(self.vocab.tag_id[field])
        self.out.append(self.vocab.bool_id[bool(value)])

    def bucket(self, field: str, value: float) -> None:
        token, clamped = self.vocab.bucket_token(field, value)
        if clamped:
            self.clamped.add(field)
        self.out.append(token)

    def tagged_bucket(self, field: str, value: float) -> None:
        self.out.append(self.vocab.tag_id[field])
        self.bucket(field, value)


def _emit_context(em: _Emitter, ctx: GameContext) -> None:
    em.tagged_chars("game_id", ctx.game_id)
    em.tagged_chars("date", ctx.date.isoformat())
    em.tagged_chars("home_team", ctx.home_team)
    em.tagged_chars("away_team", ctx.away_team)
    em.tagged_chars("venue", ctx.venue)
    em.tagged_enum("season_type", em.vocab.season_id, ctx.season_type)
    if ctx.weather is not None:
        em.tagged_chars("weather", ctx.weather)


def _emit_pitch(em: _Emitter, pitch: PitchEvent) -> PitchIndex:
    start = len(em.out)
    em.special(PITCH_SEP)
    em.out.append(em.vocab.tag_id["pitch_type"])
    type_value = len(em.out)
    try:
        em.out.append(em.vocab.pitch_type_id[pitch.pitch_type.value])
    except (KeyError, AttributeError):
        raise SerializationError(
            f"field pitch_type: unknown enumeration value {pitch.pitch_type!r}"
        ) from None
    em.tagged_bucket("release_speed", pitch.release_speed)
    em.out.append(em.vocab.tag_id["release_pos"])
    em.bucket("release_pos_x", pitch.release_pos[0])
    em.bucket("release_pos_y", pitch.release_pos[1])
    em.bucket("release_pos_z", pitch.release_pos[2])
    em.tagged_bucket("spin_rate", pitch.spin_rate)
    em.tagged_bucket("spin_axis", pitch.spin_axis)
    em.tagged_bucket("plate_x", pitch.plate_x)
    em.tagged_bucket("plate_z", pitch.plate_z)
    em.tagged_bucket("sz_top", pitch.sz_top)
    em.tagged_bucket("sz_bot", pitch.sz_bot)
    em.tagged_int("balls", pitch.balls, 1)
    em.tagged_int("strikes", pitch.strikes, 1)
    em.out.append(em.vocab.tag_id["swing"])
    swing_value = len(em.out)
    em.out.append(em.vocab.bool_id[bool(pitch.swing)])
    em.tagged_enum("outcome", em.vocab.outcome_id, pitch.outcome)
    assert len(em.out) - start == TOKENS_PER_PITCH
    return PitchIndex(start, type_value, swing_value)


def _emit_pa(em: _Emitter, pa: PlateAppearance) -> PaIndex:
    start = len(em.out)
    em.special(PA_SEP)
    st = pa.inning_state
    em.tagged_int("inning", st.inning, 2)
    em.tagged_enum("half", em.vocab.half_id, st.half)
    em.tagged_int("outs", st.outs, 1)
    em.tagged_int("home_score", st.home_score, 2)
    em.tagged_int("away_score", st.away_score, 2)
    em.out.append(em.vocab.tag_id["runners"])
    for on_base in st.runners:
        em.out.append(em.vocab.bool_id[bool(on_base)])
    em.tagged_chars("pa_id", pa.pa_id)
    em.tagged_chars("batter_id", pa.batter_id)
    em.tagged_chars("pitcher_id", pa.pitcher_id)
    pitches = tuple(_emit_pitch(em, p) for p in pa.pitches)
    em.tagged_enum("terminal_event", em.vocab.terminal_id, pa.terminal_event)
    return PaIndex(start, pitches)


def serialize_indexed(
    game: GameRecord, vocab: Vocabulary, qspec: Optional[QuantizationSpec] = None
) -> tuple[TokenSequence, GameIndex]:
    """Serialize a game and return the structural index alongside.

    Deterministic; out-of-range numerics clamp to the nearest end bucket
    with one logged warning per field.
    """
    if qspec is not None and qspec is not vocab.qspec and qspec != vocab.qspec:
        raise ConfigError("quantization spec does not match the vocabulary")
    em = _Emitter(vocab)
    em.special(BOS)
    _emit_context(em, game.context)
    pas = []
    if game.plate_appearances:
        em.special(GAME_SEP)
        pas = [_emit_pa(em, pa) for pa in game.plate_appearances]
    em.special(EOS)
    if em.clamped:
        logger.warning(
            "game %s: clamped out-of-range values in fields %s",
            game.context.game_id,
            ", ".join(sorted(em.clamped)),
        )
    seq = TokenSequence(tuple(em.out), game.context.game_id)
    return seq, GameIndex(tuple(pas))


def serialize(
    game: GameRecord, vocab: Vocabulary, qspec: Optional[QuantizationSpec] = None
) -> TokenSequence:
    """Serialize a game into its token sequence."""
    return serialize_indexed(game, vocab, qspec)[0]


def expected_length(game: GameRecord) -> int:
    """Token count serialize() will produce, from the grammar alone."""
    ctx = game.context
    n = 2  # BOS, EOS
    n += 17 + len(ctx.game_id) + len(ctx.home_team) + len(ctx.away_team) + len(ctx.venue)
    if ctx.weather is not None:
        n += 1 + len(ctx.weather)
    if game.plate_appearances:
        n += 1  # GAME_SEP
    for pa in game.plate_appearances:
        n += 23 + len(pa.pa_id) + len(pa.batter_id) + len(pa.pitcher_id)
        n += TOKENS_PER_PITCH * len(pa.pitches)
    return n


def quantize_game(game: GameRecord, qspec: QuantizationSpec) -> GameRecord:
    """Game with every real-valued field snapped to its bucket midpoint.

    ``parse(serialize(g)) == quantize_game(g)`` exactly, for any valid g.
    """
    f = qspec.fields

    def q(pitch: PitchEvent) -> PitchEvent:
        return PitchEvent(
            pitch_type=pitch.pitch_type,
            release_speed=f["release_speed"].quantize(pitch.release_speed),
            release_pos=(
                f["release_pos_x"].quantize(pitch.release_pos[0]),
                f["release_pos_y"].quantize(pitch.release_pos[1]),
                f["release_pos_z"].quantize(pitch.release_pos[2]),
            ),
            spin_rate=f["spin_rate"].quantize(pitch.spin_rate),
            spin_axis=f["spin_axis"].quantize(pitch.spin_axis),
            plate_x=f["plate_x"].quantize(pitch.plate_x),
            plate_z=f["plate_z"].quantize(pitch.plate_z),
            sz_top=f["sz_top"].quantize(pitch.sz_top),
            sz_bot=f["sz_bot"].quantize(pitch.sz_bot),
            balls=pitch.balls,
            strikes=pitch.strikes,
            swing=pitch.swing,
            outcome=pitch.outcome,
            pitch_number=pitch.pitch_number,
        )

    pas = tuple(
        PlateAppearance(
            pa_id=pa.pa_id,
            batter_id=pa.batter_id,
            pitcher_id=pa.pitcher_id,
            inning_state=pa.inning_state,
            pitches=tuple(q(p) for p in pa.pitches),
            terminal_event=pa.terminal_event,
        )
        for pa in game.plate_appearances
    )
    return GameRecord(game.context, pas)


class _Cursor:
    def __init__(self, tokens: Sequence[int], vocab: Vocabulary):
        self.tokens = tokens
        self.vocab = vocab
        self.pos = 0

    def fail(self, message: str) -> None:
        raise TokenParseError(message, min(self.pos, len(self.tokens) - 1))

    def peek(self) -> int:
        if self.pos >= len(self.tokens):
            self.fail("unexpected end of sequence")
        token = self.tokens[self.pos]
        if token == UNK:
            self.fail("UNK token")
        return token

    def take(self) -> int:
        token = self.peek()
        self.pos += 1
        return token

    def expect_special(self, token_id: int, name: str) -> None:
        if self.take() != token_id:
            self.pos -= 1
            self.fail(f"expected {name}")

    def expect_tag(self, name: str) -> None:
        if self.take() != self.vocab.tag_id[name]:
            self.pos -= 1
            self.fail(f"expected tag {name}")

    def chars(self) -> str:
        out = []
        while self.pos < len(self.tokens) and self.vocab.is_char(self.tokens[self.pos]):
            out.append(self.vocab.char_of(self.tokens[self.pos]))
            self.pos += 1
        return "".join(out)

    def tagged_chars(self, name: str) -> str:
        self.expect_tag(name)
        return self.chars()

    def tagged_int(self, name: str, width: int) -> int:
        self.expect_tag(name)
        value = 0
        for _ in range(width):
            token = self.take()
            if not self.vocab.is_digit(token):
                self.pos -= 1
                self.fail(f"expected digit in field {name}")
            value = value * 10 + self.vocab.digit_of(token)
        return value

    def tagged_enum(self, name: str, family: str, enum_cls):
        self.expect_tag(name)
        token = self.take()
        entry = self.vocab._enum_by_id.get(token)
        if entry is None or entry[0] != family:
            self.pos -= 1
            self.fail(f"expected {enum_cls.__name__} value for field {name}")
        return enum_cls(entry[1])

    def bool_value(self, name: str) -> bool:
        token = self.take()
        if token == self.vocab.bool_id[False]:
            return False
        if token == self.vocab.bool_id[True]:
            return True
        self.pos -= 1
        self.fail(f"expected boolean value for field {name}")

    def tagged_bool(self, name: str) -> bool:
        self.expect_tag(name)
        return self.bool_value(name)

    def tagged_bucket(self, name: str, field: str) -> float:
        self.expect_tag(name)
        return self.bucket(field)

    def bucket(self, field: str) -> float:
        token = self.take()
        if not self.vocab.is_bucket(field, token):
            self.pos -= 1
            self.fail(f"expected {field} bucket token")
        return self.vocab.bucket_value(field, token)


def _parse_pitch(cur: _Cursor, pitch_number: int) -> PitchEvent:
    cur.expect_special(PITCH_SEP, "PITCH_SEP")
    pitch_type = cur.tagged_enum("pitch_type", "pt", PitchType)
    release_speed = cur.tagged_bucket("release_speed", "release_speed")
    cur.expect_tag("release_pos")
    release_pos = (
        cur.bucket("release_pos_x"),
        cur.bucket("release_pos_y"),
        cur.bucket("release_pos_z"),
    )
    spin_rate = cur.tagged_bucket("spin_rate", "spin_rate")
    spin_axis = cur.tagged_bucket("spin_axis", "spin_axis")
    plate_x = cur.tagged_bucket("plate_x", "plate_x")
    plate_z = cur.tagged_bucket("plate_z", "plate_z")
    sz_top = cur.tagged_bucket("sz_top", "sz_top")
    sz_bot = cur.tagged_bucket("sz_bot", "sz_bot")
    balls = cur.tagged_int("balls", 1)
    strikes = cur.tagged_int("strikes", 1)
    swing = cur.tagged_bool("swing")
    outcome = cur.tagged_enum("outcome", "out", Outcome)
    return PitchEvent(
        pitch_type=pitch_type,
        release_speed=release_speed,
        release_pos=release_pos,
        spin_rate=spin_rate,
        spin_axis=spin_axis,
        plate_x=plate_x,
        plate_z=plate_z,
        sz_top=sz_top,
        sz_bot=sz_bot,
        balls=balls,
        strikes=strikes,
        swing=swing,
        outcome=outcome,
        pitch_number=pitch_number,
    )


def _parse_pa(cur: _Cursor) -> PlateAppearance:
    cur.expect_special(PA_SEP, "PA_SEP")
    inning = cur.tagged_int("inning", 2)
    half = cur.tagged_enum("half", "half", Half)
    outs = cur.tagged_int("outs", 1)
    home_score = cur.tagged_int("home_score", 2)
    away_score = cur.tagged_int("away_score", 2)
    cur.expect_tag("runners")
    runners = (cur.bool_value("runners"), cur.bool_value("runners"), cur.bool_value("runners"))
    pa_id = cur.tagged_chars("pa_id")
    batter_id = cur.tagged_chars("batter_id")
    pitcher_id = cur.tagged_chars("pitcher_id")
    pitches: list[PitchEvent] = []
    while cur.peek() == PITCH_SEP:
        pitches.append(_parse_pitch(cur, len(pitches) + 1))
    if not pitches:
        cur.fail("plate appearance has no pitches")
    terminal = cur.tagged_enum("terminal_event", "end", TerminalEvent)
    return PlateAppearance(
        pa_id=pa_id,
        batter_id=batter_id,
        pitcher_id=pitcher_id,
        inning_state=InningState(inning, half, outs, home_score, away_score, runners),
        pitches=tuple(pitches),
        terminal_event=terminal,
    )


def parse(
    seq: Union[TokenSequence, Sequence[int]],
    vocab: Vocabulary,
    qspec: Optional[QuantizationSpec] = None,
) -> GameRecord:
    """Inverse of serialize, up to numeric quantization.

    Raises TokenParseError with the offending token offset for any
    structural problem, including an UNK token or a missing EOS.
    """
    if qspec is not None and qspec is not vocab.qspec and qspec != vocab.qspec:
        raise ConfigError("quantization spec does not match the vocabulary")
    tokens = seq.tokens if isinstance(seq, TokenSequence) else tuple(seq)
    if not tokens:
        raise TokenParseError("empty sequence", 0)
    cur = _Cursor(tokens, vocab)
    cur.expect_special(BOS, "BOS")
    game_id = cur.tagged_chars("game_id")
    date_text = cur.tagged_chars("date")
    try:
        date = _dt.date.fromisoformat(date_text)
    except ValueError:
        cur.fail(f"malformed date {date_text!r}")
    home_team = cur.tagged_chars("home_team")
    away_team = cur.tagged_chars("away_team")
    venue = cur.tagged_chars("venue")
    season = cur.tagged_enum("season_type", "season", SeasonType)
    weather = None
    if cur.peek() == vocab.tag_id["weather"]:
        weather = cur.tagged_chars("weather")
    ctx = GameContext(game_id, date, home_team, away_team, venue, season, weather)

    pas: list[PlateAppearance] = []
    token = cur.peek()
    if token == GAME_SEP:
        cur.take()
        while cur.peek() == PA_SEP:
            pas.append(_parse_pa(cur))
        if not pas:
            cur.fail("GAME_SEP with no plate appearances")
    cur.expect_special(EOS, "EOS")
    if cur.pos != len(tokens):
        cur.fail("trailing tokens after EOS")
    return GameRecord(ctx, tuple(pas))


def window(seq: Union[TokenSequence, Sequence[int]], width: int) -> list[Window]:
    """Partition a sequence into disjoint chunks of ``width`` tokens.

    All windows except possibly the last have exactly ``width`` tokens;
    offsets are 0, width, 2*width, ...; concatenation in offset order
    reproduces the source exactly.
    """
    if width < 2:
        raise ConfigError(f"window width must be >= 2, got {width}")
    tokens = seq.tokens if isinstance(seq, TokenSequence) else tuple(seq)
    return [
        Window(tuple(tokens[i : i + width]), i) for i in range(0, len(tokens), width)
    ]


def write_token_file(seqs: Iterable[TokenSequence], path: Union[str, Path]) -> int:
    """Write sequences as consecutive records: little-endian u32 count,
    then u32 token ids. Returns the number of records written."""
    count = 0
    with open(path, "wb") as fh:
        for seq in seqs:
            fh.write(struct.pack("<I", len(seq.tokens)))
            fh.write(np.asarray(seq.tokens, dtype="<u4").tobytes())
            count += 1
    return count


def _provenance_of(tokens: tuple[int, ...], vocab: Optional[Vocabulary]) -> str:
    if vocab is None or len(tokens) < 2 or tokens[0] != BOS:
        return ""
    if tokens[1] != vocab.tag_id["game_id"]:
        return ""
    out = []
    for token in tokens[2:]:
        if not vocab.is_char(token):
            break
        out.append(vocab.char_of(token))
    return "".join(out)


def read_token_file(
    path: Union[str, Path], vocab: Optional[Vocabulary] = None
) -> list[TokenSequence]:
    """Read a token file; provenance is recovered from the serialized
    game_id field when a vocabulary is supplied."""
    data = Path(path).read_bytes()
    seqs: list[TokenSequence] = []
    pos = 0
    while pos < len(data):
        if pos + 4 > len(data):
            raise TokenParseError("truncated record header", len(seqs))
        (n,) = struct.unpack_from("<I", data, pos)
        pos += 4
        end = pos + 4 * n
        if end > len(data):
            raise TokenParseError("truncated record body", len(seqs))
        tokens = tuple(int(t) for t in np.frombuffer(data, dtype="<u4", count=n, offset=pos))
        pos = end
        seqs.append(TokenSequence(tokens, _provenance_of(tokens, vocab)))
    return seqs


def write_vocab_file(vocab: Vocabulary, path: Union[str, Path]) -> None:
    """Plain-text sidecar: one surface per line, line number = token id."""
    Path(path).write_text("\n".join(vocab.surfaces) + "\n", encoding="utf-8")


def read_vocab_file(path: Union[str, Path]) -> list[str]:
    return Path(path).read_text(encoding="utf-8").splitlines()
