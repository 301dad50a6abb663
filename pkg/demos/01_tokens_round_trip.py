"""Serialize one game to tokens and parse it back.

Builds a two-pitch game by hand, walks through the token stream, and
shows that parsing inverts serialization once values sit on the
quantization grid.
"""

import datetime as dt

from sabergen.codec import Vocabulary, default_qspec, parse, quantize_game, serialize
from sabergen.events import (
    GameContext,
    GameRecord,
    InningState,
    Half,
    Outcome,
    PitchEvent,
    PitchType,
    PlateAppearance,
    SeasonType,
    TerminalEvent,
)


def pitch(n, balls, strikes, kind, outcome, swing, plate_x, plate_z):
    return PitchEvent(
        pitch_number=n,
        balls=balls,
        strikes=strikes,
        pitch_type=kind,
        release_speed=93.2,
        spin_rate=2250.0,
        spin_axis=210.0,
        release_pos=(-1.8, 54.5, 5.9),
        plate_x=plate_x,
        plate_z=plate_z,
        sz_top=3.4,
        sz_bot=1.6,
        outcome=outcome,
        swing=swing,
    )


game = GameRecord(
    context=GameContext(
        game_id="DEMO1",
        date=dt.date(2024, 6, 1),
        home_team="HOM",
        away_team="AWY",
        venue="Demo Park",
        season_type=SeasonType.REGULAR,
        weather=None,
    ),
    plate_appearances=[
        PlateAppearance(
            pa_id="1",
            inning_state=InningState(
                inning=1, half=Half.TOP, outs=0, home_score=0, away_score=0,
                runners=(False, False, False),
            ),
            batter_id="B 10",
            pitcher_id="P 1",
            pitches=[
                pitch(1, 0, 0, PitchType.FOUR_SEAM, Outcome.CALLED_STRIKE, False, 0.2, 2.5),
                pitch(2, 0, 1, PitchType.SLIDER, Outcome.IN_PLAY, True, -0.4, 1.9),
            ],
            terminal_event=TerminalEvent.IN_PLAY_OUT,
        )
    ],
)

qspec = default_qspec()
vocab = Vocabulary(qspec)

seq = serialize(game, vocab, qspec)
print(f"vocabulary size: {vocab.size}")
print(f"game serialized to {len(seq)} tokens\n")

print("first 40 surfaces:")
print("  " + " ".join(vocab.surface(t) for t in seq.tokens[:40]))
print("last 10 surfaces:")
print("  " + " ".join(vocab.surface(t) for t in seq.tokens[-10:]))

back = parse(seq.tokens, vocab, qspec)
snapped = quantize_game(game, qspec)
print(f"\nparse(serialize(game)) == quantize(game): {back == snapped}")

# off-grid reals move to their bucket midpoint, nothing else changes
p0 = game.plate_appearances[0].pitches[0]
q0 = back.plate_appearances[0].pitches[0]
print(f"release_speed {p0.release_speed} -> bucket midpoint {q0.release_speed}")
print(f"spin_rate     {p0.spin_rate} -> bucket midpoint {q0.spin_rate}")
