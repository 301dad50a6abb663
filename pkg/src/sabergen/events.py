"""Structured domain types for games, plate appearances, and pitches.

All types are immutable after construction and safe to share between
workers. Validation is data, not exceptions: ``validate_game`` returns
every violation it finds with a path to the offending element.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

__all__ = [
    "PitchType",
    "Outcome",
    "TerminalEvent",
    "Half",
    "SeasonType",
    "PitchEvent",
    "InningState",
    "GameContext",
    "PlateAppearance",
    "GameRecord",
    "Violation",
    "ValidationResult",
    "validate_game",
    "in_zone",
    "count_bucket",
    "next_count",
    "game_to_dict",
    "game_from_dict",
    "ZONE_HALF_WIDTH",
]

# Horizontal strike-zone half-width in feet: plate half-width (8.5 in)
# plus one ball radius. Boundary points count as in-zone.
ZONE_HALF_WIDTH = 0.83


class PitchType(Enum):
    """Pitch identity, keyed by the standard two-letter tracking code."""

    FOUR_SEAM = "FF"
    SINKER = "SI"
    CUTTER = "FC"
    SLIDER = "SL"
    SWEEPER = "ST"
    CURVEBALL = "CU"
    KNUCKLE_CURVE = "KC"
    CHANGEUP = "CH"
    SPLITTER = "FS"
    KNUCKLEBALL = "KN"
    EEPHUS = "EP"
    OTHER = "XX"

    @property
    def code(self) -> str:
        return self.value

    @classmethod
    def from_code(cls, code: str) -> "PitchType":
        """Map a tracking code to a PitchType; unknown codes become OTHER."""
        try:
            return cls(code)
        except ValueError:
            return cls.OTHER

    @property
    def is_fastball(self) -> bool:
        """True for the fastball family used by the binary prediction task."""
        return self in _FASTBALLS


_FASTBALLS = frozenset({PitchType.FOUR_SEAM, PitchType.SINKER, PitchType.CUTTER})


class Outcome(Enum):
    """Result of a single pitch."""

    BALL = "ball"
    CALLED_STRIKE = "called_strike"
    SWINGING_STRIKE = "swinging_strike"
    FOUL = "foul"
    IN_PLAY = "in_play"
    HIT_BY_PITCH = "hit_by_pitch"
    OTHER = "other"


# Outcomes that imply the batter offered at the pitch.
SWING_OUTCOMES = frozenset({Outcome.SWINGING_STRIKE, Outcome.FOUL, Outcome.IN_PLAY})

# Outcomes that end the plate appearance on the spot regardless of count.
_PA_ENDING_OUTCOMES = frozenset({Outcome.IN_PLAY, Outcome.HIT_BY_PITCH})


class TerminalEvent(Enum):
    """How a plate appearance ended."""

    STRIKEOUT = "strikeout"
    WALK = "walk"
    HIT_BY_PITCH = "hit_by_pitch"
    IN_PLAY_OUT = "in_play_out"
    SINGLE = "single"
    DOUBLE = "double"
    TRIPLE = "triple"
    HOME_RUN = "home_run"
    OTHER = "other"


class Half(Enum):
    TOP = "top"
    BOTTOM = "bottom"


class SeasonType(Enum):
    REGULAR = "regular"
    POSTSEASON = "postseason"


@dataclass(frozen=True)
class PitchEvent:
    """One pitch: physics, location, count at pitch time, batter decision,
    and outcome. Units: mph, rpm, degrees, feet."""

    pitch_type: PitchType
    release_speed: float
    release_pos: tuple[float, float, float]
    spin_rate: float
    spin_axis: float
    plate_x: float
    plate_z: float
    sz_top: float
    sz_bot: float
    balls: int
    strikes: int
    swing: bool
    outcome: Outcome
    pitch_number: int


@dataclass(frozen=True)
class InningState:
    """Game situation at the start of a plate appearance."""

    inning: int
    half: Half
    outs: int
    home_score: int
    away_score: int
    runners: tuple[bool, bool, bool]  # (first, second, third)


@dataclass(frozen=True)
class GameContext:
    """Global game context. ``weather`` is optional free text, serialized
    only when present."""

    game_id: str
    date: _dt.date
    home_team: str
    away_team: str
    venue: str
    season_type: SeasonType
    weather: Optional[str] = None


@dataclass(frozen=True)
class PlateAppearance:
    pa_id: str
    batter_id: str
    pitcher_id: str
    inning_state: InningState
    pitches: tuple[PitchEvent, ...]
    terminal_event: TerminalEvent


@dataclass(frozen=True)
class GameRecord:
    context: GameContext
    plate_appearances: tuple[PlateAppearance, ...]


@dataclass(frozen=True)
class Violation:
    """One invariant violation, with a path to the offending element."""

    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def in_zone(pitch: PitchEvent) -> bool:
    """Whether the pitch crossed the strike zone.

    The zone is |plate_x| <= 0.83 ft horizontally and [sz_bot, sz_top]
    vertically; boundary points count as in-zone.
    """
    return (
        abs(pitch.plate_x) <= ZONE_HALF_WIDTH
        and pitch.sz_bot <= pitch.plate_z <= pitch.sz_top
    )


def count_bucket(balls: int, strikes: int) -> str:
    """Count state from the pitcher's perspective.

    "behind" when there are more balls than strikes, "ahead" when more
    strikes than balls, "even" otherwise.
    """
    if balls > strikes:
        return "behind"
    if strikes > balls:
        return "ahead"
    return "even"


def next_count(balls: int, strikes: int, outcome: Outcome) -> tuple[int, int]:
    """Count after a pitch with the given outcome.

    Foul with two strikes leaves the count unchanged; OTHER outcomes are
    treated as count-preserving. Results may leave the legal pitch-time
    range (balls=4 / strikes=3), which signals the plate appearance ended.
    """
    if outcome is Outcome.BALL:
        return balls + 1, strikes
    if outcome in (Outcome.CALLED_STRIKE, Outcome.SWINGING_STRIKE):
        return balls, strikes + 1
    if outcome is Outcome.FOUL:
        return (balls, strikes + 1) if strikes < 2 else (balls, strikes)
    return balls, strikes


def _check_pitch(pitch: PitchEvent, path: str, out: list[Violation]) -> None:
    def bad(msg: str) -> None:
        out.append(Violation(path, msg))

    if not isinstance(pitch.pitch_type, PitchType):
        bad("pitch_type is not a PitchType")
    if not 30.0 < pitch.release_speed < 110.0:
        bad(f"release_speed {pitch.release_speed} outside (30, 110)")
    if not 0.0 <= pitch.spin_rate < 4000.0:
        bad(f"spin_rate {pitch.spin_rate} outside [0, 4000)")
    if not 0.0 <= pitch.spin_axis < 360.0:
        bad(f"spin_axis {pitch.spin_axis} outside [0, 360)")
    if not pitch.sz_bot < pitch.sz_top:
        bad(f"sz_bot {pitch.sz_bot} not below sz_top {pitch.sz_top}")
    if not 0 <= pitch.balls <= 3:
        bad(f"balls {pitch.balls} outside [0, 3]")
    if not 0 <= pitch.strikes <= 2:
        bad(f"strikes {pitch.strikes} outside [0, 2]")
    if pitch.pitch_number < 1:
        bad(f"pitch_number {pitch.pitch_number} < 1")
    if pitch.swing != (pitch.outcome in SWING_OUTCOMES):
        bad(
            f"swing={pitch.swing} inconsistent with outcome {pitch.outcome.value}"
        )


def _check_pa(pa: PlateAppearance, path: str, out: list[Violation]) -> None:
    st = pa.inning_state
    if st.inning < 1:
        out.append(Violation(path, f"inning {st.inning} < 1"))
    if not 0 <= st.outs <= 2:
        out.append(Violation(path, f"outs out of range: {st.outs}"))
    if st.home_score < 0 or st.away_score < 0:
        out.append(Violation(path, "negative score"))

    if not pa.pitches:
        out.append(Violation(path, "plate appearance has no pitches"))
        return

    balls, strikes = 0, 0
    last = len(pa.pitches) - 1
    for i, pitch in enumerate(pa.pitches):
        ppath = f"{path}.pitches[{i}]"
        _check_pitch(pitch, ppath, out)
        if pitch.pitch_number != i + 1:
            out.append(
                Violation(ppath, f"pitch_number {pitch.pitch_number}, expected {i + 1}")
            )
        if (pitch.balls, pitch.strikes) != (balls, strikes):
            out.append(
                Violation(
                    ppath,
                    "illegal count transition: recorded "
                    f"{pitch.balls}-{pitch.strikes}, replay gives {balls}-{strikes}",
                )
            )
            # keep replaying from the recorded count so one bad pitch does
            # not cascade violations over the rest of the PA
            balls, strikes = pitch.balls, pitch.strikes
        balls, strikes = next_count(balls, strikes, pitch.outcome)
        ends = pitch.outcome in _PA_ENDING_OUTCOMES or balls > 3 or strikes > 2
        if ends and i != last:
            out.append(
                Violation(ppath, f"outcome {pitch.outcome.value} ends the plate appearance mid-sequence")
            )


def validate_game(game: GameRecord) -> ValidationResult:
    """Check every type-level invariant over one game.

    Returns all violations found; ``ok`` iff there are none. Violations
    are data, not errors: callers decide whether to drop or repair.
    """
    out: list[Violation] = []
    ctx = game.context
    if ctx.home_team == ctx.away_team:
        out.append(Violation("context", "home_team equals away_team"))

    prev_inning = {Half.TOP: 0, Half.BOTTOM: 0}
    for i, pa in enumerate(game.plate_appearances):
        path = f"plate_appearances[{i}]"
        _check_pa(pa, path, out)
        half = pa.inning_state.half
        if isinstance(half, Half):
            if pa.inning_state.inning < prev_inning[half]:
                out.append(
                    Violation(path, "inning numbers decrease within a half sequence")
                )
            prev_inning[half] = pa.inning_state.inning
    return ValidationResult(tuple(out))


def game_to_dict(game: GameRecord) -> dict:
    """Plain-JSON form of a game, inverse of ``game_from_dict``."""
    ctx = game.context
    return {
        "game_id": ctx.game_id,
        "date": ctx.date.isoformat(),
        "home_team": ctx.home_team,
        "away_team": ctx.away_team,
        "venue": ctx.venue,
        "season_type": ctx.season_type.value,
        "weather": ctx.weather,
        "plate_appearances": [
            {
                "pa_id": pa.pa_id,
                "batter_id": pa.batter_id,
                "pitcher_id": pa.pitcher_id,
                "inning": pa.inning_state.inning,
                "half": pa.inning_state.half.value,
                "outs": pa.inning_state.outs,
                "home_score": pa.inning_state.home_score,
                "away_score": pa.inning_state.away_score,
                "runners": list(pa.inning_state.runners),
                "terminal_event": pa.terminal_event.value,
                "pitches": [
                    {
                        "pitch_type": p.pitch_type.code,
                        "release_speed": p.release_speed,
                        "release_pos": list(p.release_pos),
                        "spin_rate": p.spin_rate,
                        "spin_axis": p.spin_axis,
                        "plate_x": p.plate_x,
                        "plate_z": p.plate_z,
                        "sz_top": p.sz_top,
                        "sz_bot": p.sz_bot,
                        "balls": p.balls,
                        "strikes": p.strikes,
                        "swing": p.swing,
                        "outcome": p.outcome.value,
                        "pitch_number": p.pitch_number,
                    }
                    for p in pa.pitches
                ],
            }
            for pa in game.plate_appearances
        ],
    }


def game_from_dict(data: dict) -> GameRecord:
    try:
        pas = tuple(
            PlateAppearance(
                pa_id=pa["pa_id"],
                batter_id=pa["batter_id"],
                pitcher_id=pa["pitcher_id"],
                inning_state=InningState(
                    inning=pa["inning"],
                    half=Half(pa["half"]),
                    outs=pa["outs"],
                    home_score=pa["home_score"],
                    away_score=pa["away_score"],
                    runners=tuple(bool(r) for r in pa["runners"]),
                ),
                pitches=tuple(
                    PitchEvent(
                        pitch_type=PitchType(p["pitch_type"]),
                        release_speed=float(p["release_speed"]),
                        release_pos=tuple(float(v) for v in p["release_pos"]),
                        spin_rate=float(p["spin_rate"]),
                        spin_axis=float(p["spin_axis"]),
                        plate_x=float(p["plate_x"]),
                        plate_z=float(p["plate_z"]),
                        sz_top=float(p["sz_top"]),
                        sz_bot=float(p["sz_bot"]),
                        balls=p["balls"],
                        strikes=p["strikes"],
                        swing=bool(p["swing"]),
                        outcome=Outcome(p["outcome"]),
                        pitch_number=p["pitch_number"],
                    )
                    for p in pa["pitches"]
                ),
                terminal_event=TerminalEvent(pa["terminal_event"]),
            )
            for pa in data["plate_appearances"]
        )
        return GameRecord(
            context=GameContext(
                game_id=data["game_id"],
                date=_dt.date.fromisoformat(data["date"]),
                home_team=data["home_team"],
                away_team=data["away_team"],
                venue=data["venue"],
                season_type=SeasonType(data["season_type"]),
                weather=data.get("weather"),
            ),
            plate_appearances=pas,
        )
    except (KeyError, ValueError, TypeError) as err:
        from .errors import DataError

        raise DataError(f"malformed game record: {err}") from None
