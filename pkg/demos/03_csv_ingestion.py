"""Round-trip a game through a pitch-level tracking CSV.

Flattens a simulated game to the column layout of public pitch tracking
exports, then ingests it back: grouping, ordering, validation, and the
drop report all in one place. A couple of rows are sabotaged on the way
to show the accounting.
"""

import csv
import tempfile
from pathlib import Path

from sabergen.events import Half, Outcome, TerminalEvent
from sabergen.ingest import REQUIRED_COLUMNS, ingest_csv
from sabergen.simulate import default_config, simulate

DESC = {
    Outcome.BALL: "ball",
    Outcome.CALLED_STRIKE: "called_strike",
    Outcome.SWINGING_STRIKE: "swinging_strike",
    Outcome.FOUL: "foul",
    Outcome.IN_PLAY: "hit_into_play",
    Outcome.HIT_BY_PITCH: "hit_by_pitch",
    Outcome.OTHER: "automatic_ball",
}
EVENTS = {
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


def rows_of(game):
    rows = []
    for ab, pa in enumerate(game.plate_appearances, 1):
        st = pa.inning_state
        for p in pa.pitches:
            rows.append({
                "game_pk": game.context.game_id,
                "game_date": game.context.date.isoformat(),
                "game_type": "R",
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
                "description": DESC[p.outcome],
                "events": EVENTS[pa.terminal_event] if p.pitch_number == len(pa.pitches) else "",
                "home_score": st.home_score,
                "away_score": st.away_score,
                "on_1b": "",
                "on_2b": "",
                "on_3b": "",
            })
    return rows


good, other = simulate(default_config(num_games=2, seed=17))
rows = rows_of(good)
print(f"source game: {len(rows)} pitches")

# sabotage one pitch that is a whole plate appearance by itself: the row
# is dropped but the rest of the game still validates
from collections import Counter

per_ab = Counter(r["at_bat_number"] for r in rows)
lone_ab = next(ab for ab, n in per_ab.items() if n == 1)
victim = next(r for r in rows if r["at_bat_number"] == lone_ab)
victim["plate_x"] = "NaN"
print(f"blanked plate_x on the single pitch of at-bat {lone_ab}")

# and a second game tagged as spring training, dropped whole
for r in rows_of(other):
    r["game_type"] = "S"
    rows.append(r)

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "pitches.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=REQUIRED_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    games, report = ingest_csv(path)

print(f"\nrows read {report.rows_read}, used {report.rows_used}")
for reason, n in sorted(report.rows_dropped.items()):
    print(f"  dropped {n} rows: {reason}")
for reason, n in sorted(report.games_dropped.items()):
    print(f"  dropped {n} games: {reason}")
print(f"games built: {report.games_built}")

got = games[0]
print(f"\ningested game {got.context.game_id}: "
      f"{sum(len(pa.pitches) for pa in got.plate_appearances)} pitches "
      f"across {len(got.plate_appearances)} plate appearances")
print(f"source had {len(good.plate_appearances)} plate appearances; "
      f"the sabotaged one is gone, the rest survive verbatim")
