"""Shared fixtures: randomized legal games, CSV export, small corpora."""

from __future__ import annotations

import csv
import datetime as dt
import random

import pytest

from sabergen.codec import Vocabulary, default_qspec
from sabergen.events import (
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
from sabergen.simulate import default_config, simulate

_TEAMS = ("ARL", "BSN", "CHV", "DNV", "ELP", "FRS")
_VENUES = ("North Yard", "Harbor Field", "Summit Park", "")
_WEATHER = (None, None, "72F clear", "rain delay 20m", "wind 12mph out")
_CONTINUING = (
    Outcome.BALL,
    Outcome.CALLED_STRIKE,
    Outcome.SWINGING_STRIKE,
    Outcome.FOUL,
    Outcome.OTHER,
)


def rand_pitch(rng: random.Random, balls: int, strikes: int, outcome: Outcome, number: int) -> PitchEvent:
    """A legal pitch; numeric values sometimes stray outside quantization
    bounds (never outside validity bounds) to exercise clamping."""
    return PitchEvent(
        pitch_type=rng.choice(list(PitchType)),
        release_speed=rng.uniform(31.0, 109.0),
        release_pos=(rng.uniform(-8.5, 8.5), rng.uniform(44.0, 66.0), rng.uniform(-0.5, 10.5)),
        spin_rate=rng.uniform(0.0, 3999.0),
        spin_axis=rng.uniform(0.0, 359.9),
        plate_x=rng.uniform(-6.0, 6.0),
        plate_z=rng.uniform(-3.0, 8.0),
        sz_top=rng.uniform(3.0, 4.0),
        sz_bot=rng.uniform(1.2, 2.2),
        balls=balls,
        strikes=strikes,
        swing=outcome in (Outcome.SWINGING_STRIKE, Outcome.FOUL, Outcome.IN_PLAY),
        outcome=outcome,
        pitch_number=number,
    )


def rand_pa(rng: random.Random, pa_id: str, inning: int, half: Half) -> PlateAppearance:
    from sabergen.events import next_count

    state = InningState(
        inning=inning,
        half=half,
        outs=rng.randrange(3),
        home_score=rng.randrange(12),
        away_score=rng.randrange(12),
        runners=(rng.random() < 0.3, rng.random() < 0.2, rng.random() < 0.1),
    )
    pitches: list[PitchEvent] = []
    balls, strikes = 0, 0
    while True:
        if rng.random() < 0.22:
            final = rng.choice((Outcome.IN_PLAY, Outcome.HIT_BY_PITCH))
            pitches.append(rand_pitch(rng, balls, strikes, final, len(pitches) + 1))
            terminal = (
                TerminalEvent.HIT_BY_PITCH
                if final is Outcome.HIT_BY_PITCH
                else rng.choice(
                    (
                        TerminalEvent.IN_PLAY_OUT,
                        TerminalEvent.SINGLE,
                        TerminalEvent.DOUBLE,
                        TerminalEvent.TRIPLE,
                        TerminalEvent.HOME_RUN,
                    )
                )
            )
            break
        outcome = rng.choice(_CONTINUING)
        pitches.append(rand_pitch(rng, balls, strikes, outcome, len(pitches) + 1))
        balls, strikes = next_count(balls, strikes, outcome)
        if balls == 4:
            terminal = TerminalEvent.WALK
            break
        if strikes == 3:
            terminal = TerminalEvent.STRIKEOUT
            break
        if len(pitches) >= 14:
            terminal = TerminalEvent.OTHER
            break
    return PlateAppearance(
        pa_id=pa_id,
        batter_id=f"B{rng.randrange(900):03d}",
        pitcher_id=f"P{rng.randrange(90):02d}",
        inning_state=state,
        pitches=tuple(pitches),
        terminal_event=terminal,
    )


def rand_game(rng: random.Random, idx: int = 0, max_innings: int = 3) -> GameRecord:
    home = rng.choice(_TEAMS)
    away = rng.choice([t for t in _TEAMS if t != home])
    pas = []
    pa_counter = 0
    for inning in range(1, rng.randint(1, max_innings) + 1):
        for half in (Half.TOP, Half.BOTTOM):
            for _ in range(rng.randint(1, 3)):
                pa_counter += 1
                pas.append(rand_pa(rng, str(pa_counter), inning, half))
    return GameRecord(
        context=GameContext(
            game_id=f"G{idx:05d}-{rng.randrange(1000):03d}",
            date=dt.date(2024, 4, 1) + dt.timedelta(days=rng.randrange(180)),
            home_team=home,
            away_team=away,
            venue=rng.choice(_VENUES),
            season_type=rng.choice((SeasonType.REGULAR, SeasonType.POSTSEASON)),
            weather=rng.choice(_WEATHER),
        ),
        plate_appearances=tuple(pas),
    )


_DESC = {
    Outcome.BALL: "ball",
    Outcome.CALLED_STRIKE: "called_strike",
    Outcome.SWINGING_STRIKE: "swinging_strike",
    Outcome.FOUL: "foul",
    Outcome.IN_PLAY: "hit_into_play",
    Outcome.HIT_BY_PITCH: "hit_by_pitch",
    # a description the reader does not know lands on the catch-all
    Outcome.OTHER: "automatic_ball",
}
_EVENTS = {
    TerminalEvent.STRIKEOUT: "strikeout",
    TerminalEvent.WALK: "walk",
    TerminalEvent.SINGLE: "single",
    TerminalEvent.DOUBLE: "double",
    TerminalEvent.TRIPLE: "triple",
    TerminalEvent.HOME_RUN: "home_run",
    TerminalEvent.IN_PLAY_OUT: "field_out",
    TerminalEvent.HIT_BY_PITCH: "hit_by_pitch",
    TerminalEvent.OTHER: "",
}


def statcast_rows(game: GameRecord, game_type: str = "R") -> list[dict]:
    """Flatten a game into pitch-level CSV rows shaped like tracking data."""
    rows = []
    for ab, pa in enumerate(game.plate_appearances, 1):
        st = pa.inning_state
        for p in pa.pitches:
            rows.append(
                {
                    "game_pk": game.context.game_id,
                    "game_date": game.context.date.isoformat(),
                    "game_type": game_type,
                    "home_team": game.context.home_team,
                    "away_team": game.context.away_team,
                    "inning": st.inning,
                    "inning_topbot": "Top" if st.half is Half.TOP else "Bot",
                    "outs_when_up": st.outs,
                    "balls": p.balls,
                    "strikes": p.strikes,
                    "at_bat_number": ab,
                    "pitch_number": p.pitch_number,
                    "batter": pa.batter_id,
                    "pitcher": pa.pitcher_id,
                    "pitch_type": p.pitch_type.code,
                    "release_speed": p.release_speed,
                    "release_spin_rate": p.spin_rate,
                    "spin_axis": p.spin_axis,
                    "release_pos_x": p.release_pos[0],
                    "release_pos_y": p.release_pos[1],
                    "release_pos_z": p.release_pos[2],
                    "plate_x": p.plate_x,
                    "plate_z": p.plate_z,
                    "sz_top": p.sz_top,
                    "sz_bot": p.sz_bot,
                    "description": _DESC[p.outcome],
                    "events": _EVENTS[pa.terminal_event] if p.pitch_number == len(pa.pitches) else "",
                    "home_score": st.home_score,
                    "away_score": st.away_score,
                    "on_1b": "605141" if st.runners[0] else "",
                    "on_2b": "543333" if st.runners[1] else "",
                    "on_3b": "666176" if st.runners[2] else "",
                }
            )
    return rows


def write_statcast_csv(path, rows: list[dict]) -> None:
    from sabergen.ingest import REQUIRED_COLUMNS

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=REQUIRED_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


@pytest.fixture(scope="session")
def qspec():
    return default_qspec()


@pytest.fixture(scope="session")
def vocab(qspec):
    return Vocabulary(qspec)


@pytest.fixture(scope="session")
def small_corpus():
    """Four simulated games (3 regular + 1 postseason), ~1.8k pitches."""
    return simulate(default_config(num_games=3, seed=11, postseason_games=1))


@pytest.fixture(scope="session")
def sim_config():
    return default_config(num_games=3, seed=11, postseason_games=1)
