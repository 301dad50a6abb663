"""CSV ingestion into validated game records, plus corpus splitting.

The reader is defensive: a missing required column is fatal, but a bad
row only drops that row (with a counted reason), and a game that fails
validation after assembly is dropped whole. The report returned next to
the games makes every drop auditable.
"""

from __future__ import annotations

import dataclasses
import datetime as _dt
from dataclasses import dataclass, field
from typing import Optional

import pandas as pd

from .errors import ConfigError, DataError
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
    validate_game,
)

__all__ = [
    "REQUIRED_COLUMNS",
    "SWING_DESCRIPTIONS",
    "IngestReport",
    "ingest_csv",
    "SplitSpec",
    "split",
]

REQUIRED_COLUMNS = (
    "game_pk",
    "game_date",
    "game_type",
    "home_team",
    "away_team",
    "inning",
    "inning_topbot",
    "outs_when_up",
    "balls",
    "strikes",
    "at_bat_number",
    "pitch_number",
    "batter",
    "pitcher",
    "pitch_type",
    "release_speed",
    "release_spin_rate",
    "spin_axis",
    "release_pos_x",
    "release_pos_y",
    "release_pos_z",
    "plate_x",
    "plate_z",
    "sz_top",
    "sz_bot",
    "description",
    "events",
    "home_score",
    "away_score",
    "on_1b",
    "on_2b",
    "on_3b",
)

# Descriptions implying the batter offered at the pitch.
SWING_DESCRIPTIONS = frozenset(
    {
        "swinging_strike",
        "swinging_strike_blocked",
        "foul",
        "foul_tip",
        "hit_into_play",
        "foul_bunt",
        "missed_bunt",
        "bunt_foul_tip",
    }
)

_OUTCOME_BY_DESCRIPTION = {
    "ball": Outcome.BALL,
    "blocked_ball": Outcome.BALL,
    "pitchout": Outcome.BALL,
    "called_strike": Outcome.CALLED_STRIKE,
    "swinging_strike": Outcome.SWINGING_STRIKE,
    "swinging_strike_blocked": Outcome.SWINGING_STRIKE,
    "missed_bunt": Outcome.SWINGING_STRIKE,
    "foul": Outcome.FOUL,
    "foul_tip": Outcome.FOUL,
    "foul_bunt": Outcome.FOUL,
    "bunt_foul_tip": Outcome.FOUL,
    "hit_into_play": Outcome.IN_PLAY,
    "hit_by_pitch": Outcome.HIT_BY_PITCH,
}

_TERMINAL_BY_EVENT = {
    "strikeout": TerminalEvent.STRIKEOUT,
    "strikeout_double_play": TerminalEvent.STRIKEOUT,
    "walk": TerminalEvent.WALK,
    "hit_by_pitch": TerminalEvent.HIT_BY_PITCH,
    "single": TerminalEvent.SINGLE,
    "double": TerminalEvent.DOUBLE,
    "triple": TerminalEvent.TRIPLE,
    "home_run": TerminalEvent.HOME_RUN,
    "field_out": TerminalEvent.IN_PLAY_OUT,
    "force_out": TerminalEvent.IN_PLAY_OUT,
    "grounded_into_double_play": TerminalEvent.IN_PLAY_OUT,
    "double_play": TerminalEvent.IN_PLAY_OUT,
    "triple_play": TerminalEvent.IN_PLAY_OUT,
    "sac_fly": TerminalEvent.IN_PLAY_OUT,
    "sac_bunt": TerminalEvent.IN_PLAY_OUT,
    "sac_fly_double_play": TerminalEvent.IN_PLAY_OUT,
    "sac_bunt_double_play": TerminalEvent.IN_PLAY_OUT,
    "fielders_choice": TerminalEvent.IN_PLAY_OUT,
    "fielders_choice_out": TerminalEvent.IN_PLAY_OUT,
}

_SEASON_BY_GAME_TYPE = {
    "R": SeasonType.REGULAR,
    "F": SeasonType.POSTSEASON,
    "D": SeasonType.POSTSEASON,
    "L": SeasonType.POSTSEASON,
    "W": SeasonType.POSTSEASON,
}

# Codes outside the modeled set (sweeping variants, pitchouts, unlabeled)
# collapse to the catch-all type rather than dropping the row.
_KNOWN_PITCH_CODES = {t.code for t in PitchType}

# Fields whose values must parse as finite floats for a row to survive.
_FLOAT_FIELDS = (
    "release_speed",
    "release_spin_rate",
    "spin_axis",
    "release_pos_x",
    "release_pos_y",
    "release_pos_z",
    "plate_x",
    "plate_z",
    "sz_top",
    "sz_bot",
)

_INT_FIELDS = (
    "inning",
    "outs_when_up",
    "balls",
    "strikes",
    "at_bat_number",
    "pitch_number",
    "home_score",
    "away_score",
)


@dataclass
class IngestReport:
    """Accounting of what the reader kept and why it dropped the rest."""

    rows_read: int = 0
    rows_used: int = 0
    rows_dropped: dict[str, int] = field(default_factory=dict)
    games_built: int = 0
    games_dropped: dict[str, int] = field(default_factory=dict)

    def drop_row(self, reason: str) -> None:
        self.rows_dropped[reason] = self.rows_dropped.get(reason, 0) + 1

    def drop_game(self, reason: str) -> None:
        self.games_dropped[reason] = self.games_dropped.get(reason, 0) + 1


class _RowError(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _is_null(value: str) -> bool:
    return value == "" or value.lower() in ("na", "nan", "null", "none")


def _parse_float(row, name: str) -> float:
    raw = row[name]
    if _is_null(raw):
        raise _RowError(f"null {name}")
    try:
        value = float(raw)
    except ValueError:
        raise _RowError(f"bad {name}") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise _RowError(f"bad {name}")
    return value


def _parse_int(row, name: str) -> int:
    raw = row[name]
    if _is_null(raw):
        raise _RowError(f"null {name}")
    try:
        # Scores sometimes arrive as "3.0" when a CSV has passed through
        # a float-typed frame.
        value = float(raw)
    except ValueError:
        raise _RowError(f"bad {name}") from None
    if value != int(value):
        raise _RowError(f"bad {name}")
    return int(value)


def _parse_pitch(row) -> tuple[int, int, PitchEvent]:
    """One CSV row to (at_bat_number, pitch_number, event)."""
    code = row["pitch_type"].strip()
    if _is_null(code):
        raise _RowError("null pitch_type")
    ptype = PitchType(code) if code in _KNOWN_PITCH_CODES else PitchType.OTHER
    description = row["description"].strip()
    if _is_null(description):
        raise _RowError("null description")
    outcome = _OUTCOME_BY_DESCRIPTION.get(description, Outcome.OTHER)
    swing = description in SWING_DESCRIPTIONS
    at_bat = _parse_int(row, "at_bat_number")
    pitch_no = _parse_int(row, "pitch_number")
    event = PitchEvent(
        pitch_type=ptype,
        release_speed=_parse_float(row, "release_speed"),
        release_pos=(
            _parse_float(row, "release_pos_x"),
            _parse_float(row, "release_pos_y"),
            _parse_float(row, "release_pos_z"),
        ),
        spin_rate=_parse_float(row, "release_spin_rate"),
        spin_axis=_parse_float(row, "spin_axis"),
        plate_x=_parse_float(row, "plate_x"),
        plate_z=_parse_float(row, "plate_z"),
        sz_top=_parse_float(row, "sz_top"),
        sz_bot=_parse_float(row, "sz_bot"),
        balls=_parse_int(row, "balls"),
        strikes=_parse_int(row, "strikes"),
        swing=swing,
        outcome=outcome,
        pitch_number=pitch_no,
    )
    return at_bat, pitch_no, event


def _parse_half(raw: str) -> Half:
    lowered = raw.strip().lower()
    if lowered in ("top", "t"):
        return Half.TOP
    if lowered in ("bot", "bottom", "b"):
        return Half.BOTTOM
    raise _RowError("bad inning_topbot")


def _runner(raw: str) -> bool:
    return not (_is_null(raw) or raw.strip() == "0")


def _build_game(
    game_pk: str, rows: list[dict], report: IngestReport
) -> Optional[GameRecord]:
    first = rows[0]
    game_type = first["game_type"].strip()
    season = _SEASON_BY_GAME_TYPE.get(game_type)
    if season is None:
        report.drop_game("non-regular/postseason")
        return None
    try:
        date = _dt.date.fromisoformat(first["game_date"].strip()[:10])
    except ValueError:
        report.drop_game("bad game_date")
        return None

    by_pa: dict[int, list[tuple[int, dict, PitchEvent]]] = {}
    for row in rows:
        try:
            at_bat, pitch_no, event = _parse_pitch(row)
        except _RowError as err:
            report.drop_row(err.reason)
            continue
        report.rows_used += 1
        by_pa.setdefault(at_bat, []).append((pitch_no, row, event))
    if not by_pa:
        report.drop_game("no usable rows")
        return None

    pas = []
    try:
        for at_bat in sorted(by_pa):
            entries = sorted(by_pa[at_bat], key=lambda e: e[0])
            head_row = entries[0][1]
            tail_row = entries[-1][1]
            terminal = _TERMINAL_BY_EVENT.get(
                tail_row["events"].strip(), TerminalEvent.OTHER
            )
            state = InningState(
                inning=_parse_int(head_row, "inning"),
                half=_parse_half(head_row["inning_topbot"]),
                outs=_parse_int(head_row, "outs_when_up"),
                home_score=_parse_int(head_row, "home_score"),
                away_score=_parse_int(head_row, "away_score"),
                runners=(
                    _runner(head_row["on_1b"]),
                    _runner(head_row["on_2b"]),
                    _runner(head_row["on_3b"]),
                ),
            )
            # Renumber sequentially: upstream pitch numbers order the
            # events but may have gaps once bad rows are dropped.
            pitches = tuple(
                dataclasses.replace(event, pitch_number=i + 1)
                for i, (_, _, event) in enumerate(entries)
            )
            pas.append(
                PlateAppearance(
                    pa_id=str(at_bat),
                    batter_id=head_row["batter"].strip(),
                    pitcher_id=head_row["pitcher"].strip(),
                    inning_state=state,
                    pitches=pitches,
                    terminal_event=terminal,
                )
            )
    except _RowError as err:
        report.drop_game(err.reason)
        return None

    game = GameRecord(
        context=GameContext(
            game_id=str(game_pk),
            date=date,
            home_team=first["home_team"].strip(),
            away_team=first["away_team"].strip(),
            venue="",
            season_type=season,
        ),
        plate_appearances=tuple(pas),
    )
    if not validate_game(game).ok:
        report.drop_game("failed validation")
        return None
    return game


def ingest_csv(
    path, column_map: Optional[dict[str, str]] = None
) -> tuple[list[GameRecord], IngestReport]:
    """Read a pitch-level CSV into validated games.

    ``column_map`` optionally renames source columns to the required
    names (keys are required names, values are the CSV's headers). A
    required column that is absent after mapping is a fatal error.
    """
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    if column_map:
        rename = {src: dst for dst, src in column_map.items()}
        frame = frame.rename(columns=rename)
    missing = [c for c in REQUIRED_COLUMNS if c not in frame.columns]
    if missing:
        raise DataError(f"input is missing required columns: {', '.join(missing)}")

    report = IngestReport(rows_read=len(frame))
    by_game: dict[str, list[dict]] = {}
    order: list[str] = []
    for row in frame.to_dict("records"):
        pk = str(row["game_pk"]).strip()
        if _is_null(pk):
            report.drop_row("null game_pk")
            continue
        if pk not in by_game:
            by_game[pk] = []
            order.append(pk)
        by_game[pk].append(row)

    games = []
    for pk in sorted(order):
        game = _build_game(pk, by_game[pk], report)
        if game is not None:
            games.append(game)
    report.games_built = len(games)
    return games, report


@dataclass(frozen=True)
class SplitSpec:
    """Which games belong to the training and evaluation sides.

    Defaults assign regular-season games to training and postseason
    games to evaluation; optional date windows narrow either side.
    """

    train_season: SeasonType = SeasonType.REGULAR
    eval_season: SeasonType = SeasonType.POSTSEASON
    train_start: Optional[_dt.date] = None
    train_end: Optional[_dt.date] = None
    eval_start: Optional[_dt.date] = None
    eval_end: Optional[_dt.date] = None

    def __post_init__(self) -> None:
        if self.train_season == self.eval_season and (
            self.train_start is None
            and self.train_end is None
            and self.eval_start is None
            and self.eval_end is None
        ):
            raise ConfigError(
                "train and eval sides must differ by season or by date window"
            )
        for start, end, side in (
            (self.train_start, self.train_end, "train"),
            (self.eval_start, self.eval_end, "eval"),
        ):
            if start is not None and end is not None and start > end:
                raise ConfigError(f"{side} date window is empty")


def _in_window(date: _dt.date, start: Optional[_dt.date], end: Optional[_dt.date]) -> bool:
    if start is not None and date < start:
        return False
    if end is not None and date > end:
        return False
    return True


def split(
    games: list[GameRecord], spec: Optional[SplitSpec] = None
) -> tuple[list[GameRecord], list[GameRecord]]:
    """Partition games into (train, eval). No game lands on both sides."""
    spec = spec or SplitSpec()
    train, evaluation = [], []
    for game in games:
        ctx = game.context
        if ctx.season_type == spec.train_season and _in_window(
            ctx.date, spec.train_start, spec.train_end
        ):
            train.append(game)
        elif ctx.season_type == spec.eval_season and _in_window(
            ctx.date, spec.eval_start, spec.eval_end
        ):
            evaluation.append(game)
    return train, evaluation
