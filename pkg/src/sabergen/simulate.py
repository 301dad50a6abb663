"""Synthetic game generator with known ground-truth distributions.

The generative process is deliberately simple enough to solve in closed
form, so every quantity a trained model is graded against has an exact
analytic value:

* Pitch types are drawn per pitcher from a count-conditioned mix: one
  probability vector per (balls, strikes) state.
* Locations are drawn from independent normals and snapped to the
  quantization grid at generation time, so serialization is lossless
  and the token-visible geometry is the behavioral geometry.
* Batters swing with one probability inside the zone and another
  outside; count states therefore form an absorbing Markov chain whose
  fundamental matrix gives exact per-count visit weights.

``analytic_oracle`` returns the Bayes-optimal pitch-type accuracy, the
majority-class baseline, and zone-conditional swing agreement rates
implied by a config. ``sequence_entropy_nats`` gives a lower bound on
the achievable next-token cross entropy of any model on a generated
corpus.
"""

from __future__ import annotations

import bisect
import datetime as _dt
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .codec import FieldQuant, QuantizationSpec, default_qspec
from .errors import ConfigError
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
    ZONE_HALF_WIDTH,
    count_bucket,
    next_count,
)

__all__ = [
    "PitchPhysics",
    "LocationModel",
    "ReleaseModel",
    "PitcherProfile",
    "BatterProfile",
    "SwingOutcomeModel",
    "SimulatorConfig",
    "default_config",
    "simulate",
    "CountChain",
    "count_chain",
    "AnalyticOracle",
    "analytic_oracle",
    "sequence_entropy_nats",
    "COUNT_BUCKETS",
    "COUNT_STATES",
]

COUNT_BUCKETS = ("behind", "even", "ahead")

# All pre-pitch counts, indexed as balls * 3 + strikes.
COUNT_STATES = tuple((b, s) for b in range(4) for s in range(3))


@dataclass(frozen=True)
class LocationModel:
    """Plate-crossing location model.

    ``sz_top`` and ``sz_bot`` should sit on quantization-bucket midpoints;
    the simulator snaps them (and all sampled coordinates) to the grid so
    the zone seen through tokens equals the zone batters reacted to.
    """

    x_mean: float = 0.0
    x_sd: float = 0.45
    z_mean: float = 2.55
    z_sd: float = 1.05
    sz_top: float = 3.45
    sz_bot: float = 1.65


@dataclass(frozen=True)
class PitchPhysics:
    """Normal models for the measured quantities of one pitch type.

    ``location`` optionally overrides the shared plate-location model for
    this type (its strike-zone bounds are ignored; the zone belongs to
    the batter, not the pitch).
    """

    speed_mean: float
    speed_sd: float
    spin_mean: float
    spin_sd: float
    axis_mean: float
    axis_sd: float
    location: Optional[LocationModel] = None


@dataclass(frozen=True)
class ReleaseModel:
    means: tuple[float, float, float] = (-1.8, 54.45, 5.85)
    sds: tuple[float, float, float] = (0.15, 0.25, 0.15)


def _expand_buckets(
    behind: dict[PitchType, float],
    even: dict[PitchType, float],
    ahead: dict[PitchType, float],
) -> dict[tuple[int, int], dict[PitchType, float]]:
    by_bucket = {"behind": behind, "even": even, "ahead": ahead}
    return {
        (b, s): dict(by_bucket[count_bucket(b, s)]) for (b, s) in COUNT_STATES
    }


@dataclass(frozen=True)
class PitcherProfile:
    """A pitcher's arsenal and count-conditioned usage.

    ``usage`` maps every (balls, strikes) state to a pitch-type
    distribution; the type sets must agree across states (that common
    set is the arsenal). ``from_buckets`` builds the table from three
    distributions keyed by the coarse count buckets.
    """

    pitcher_id: str
    usage: dict[tuple[int, int], dict[PitchType, float]]

    def __post_init__(self) -> None:
        if set(self.usage) != set(COUNT_STATES):
            raise ConfigError(
                f"pitcher {self.pitcher_id}: usage must cover every (balls, strikes) state"
            )
        arsenal = None
        for state, dist in self.usage.items():
            if not dist:
                raise ConfigError(f"pitcher {self.pitcher_id}: empty usage for {state}")
            if arsenal is None:
                arsenal = set(dist)
            elif set(dist) != arsenal:
                raise ConfigError(
                    f"pitcher {self.pitcher_id}: arsenal differs between count states"
                )
            total = 0.0
            for ptype, prob in dist.items():
                if not isinstance(ptype, PitchType):
                    raise ConfigError(f"pitcher {self.pitcher_id}: {ptype!r} is not a PitchType")
                if not 0.0 <= prob <= 1.0:
                    raise ConfigError(f"pitcher {self.pitcher_id}: probability {prob} outside [0, 1]")
                total += prob
            if abs(total - 1.0) > 1e-9:
                raise ConfigError(
                    f"pitcher {self.pitcher_id}: usage for {state} sums to {total}, not 1"
                )
        if arsenal is not None and len(arsenal) > len(PitchType):
            raise ConfigError(f"pitcher {self.pitcher_id}: arsenal larger than the type set")

    @classmethod
    def from_buckets(
        cls,
        pitcher_id: str,
        behind: dict[PitchType, float],
        even: dict[PitchType, float],
        ahead: dict[PitchType, float],
    ) -> "PitcherProfile":
        return cls(pitcher_id, _expand_buckets(behind, even, ahead))

    @property
    def arsenal(self) -> tuple[PitchType, ...]:
        return tuple(sorted(self.usage[(0, 0)], key=lambda t: t.code))


@dataclass(frozen=True)
class BatterProfile:
    batter_id: str
    iz_swing: float = 0.8
    oz_swing: float = 0.3

    def __post_init__(self) -> None:
        for name, p in (("iz_swing", self.iz_swing), ("oz_swing", self.oz_swing)):
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"batter {self.batter_id}: {name} must be in [0, 1]")


@dataclass(frozen=True)
class SwingOutcomeModel:
    """Distribution of what a swing produces."""

    swinging_strike: float = 0.22
    foul: float = 0.40
    in_play: float = 0.38

    def __post_init__(self) -> None:
        total = self.swinging_strike + self.foul + self.in_play
        if min(self.swinging_strike, self.foul, self.in_play) < 0 or abs(total - 1.0) > 1e-9:
            raise ConfigError("swing outcome probabilities must be >= 0 and sum to 1")


def _default_physics() -> dict[PitchType, PitchPhysics]:
    return {
        PitchType.FOUR_SEAM: PitchPhysics(94.5, 1.1, 2280.0, 110.0, 210.0, 7.0),
        PitchType.SINKER: PitchPhysics(93.2, 1.1, 2120.0, 110.0, 232.0, 7.0),
        PitchType.SLIDER: PitchPhysics(85.6, 1.3, 2430.0, 120.0, 120.0, 9.0),
        PitchType.CHANGEUP: PitchPhysics(84.8, 1.2, 1760.0, 120.0, 243.0, 8.0),
        PitchType.CURVEBALL: PitchPhysics(79.3, 1.4, 2560.0, 130.0, 45.0, 9.0),
    }


def _default_inplay_terminals() -> dict[TerminalEvent, float]:
    return {
        TerminalEvent.IN_PLAY_OUT: 0.68,
        TerminalEvent.SINGLE: 0.20,
        TerminalEvent.DOUBLE: 0.07,
        TerminalEvent.TRIPLE: 0.01,
        TerminalEvent.HOME_RUN: 0.04,
    }


@dataclass(frozen=True)
class SimulatorConfig:
    home_team: str = "HOM"
    away_team: str = "AWY"
    venue: str = "Midland Park"
    home_pitcher: PitcherProfile = None  # type: ignore[assignment]
    away_pitcher: PitcherProfile = None  # type: ignore[assignment]
    home_batters: tuple[BatterProfile, ...] = ()
    away_batters: tuple[BatterProfile, ...] = ()
    physics: dict[PitchType, PitchPhysics] = field(default_factory=_default_physics)
    location: LocationModel = field(default_factory=LocationModel)
    release: ReleaseModel = field(default_factory=ReleaseModel)
    swing_outcomes: SwingOutcomeModel = field(default_factory=SwingOutcomeModel)
    inplay_terminals: dict[TerminalEvent, float] = field(
        default_factory=_default_inplay_terminals
    )
    innings: int = 9
    num_games: int = 200
    postseason_games: int = 0
    seed: int = 7
    start_date: _dt.date = _dt.date(2024, 4, 1)

    def __post_init__(self) -> None:
        if self.home_pitcher is None or self.away_pitcher is None:
            raise ConfigError("both pitchers must be configured")
        if self.home_pitcher.pitcher_id == self.away_pitcher.pitcher_id:
            raise ConfigError("pitcher ids must be distinct")
        if not self.home_batters or not self.away_batters:
            raise ConfigError("both lineups must be non-empty")
        ids = [b.batter_id for b in self.home_batters + self.away_batters]
        if len(set(ids)) != len(ids):
            raise ConfigError("batter ids must be distinct")
        if self.home_team == self.away_team:
            raise ConfigError("team codes must be distinct")
        for pitcher in (self.home_pitcher, self.away_pitcher):
            for ptype in pitcher.arsenal:
                if ptype not in self.physics:
                    raise ConfigError(
                        f"pitcher {pitcher.pitcher_id} throws {ptype.code} but no physics model is configured"
                    )
        total = sum(self.inplay_terminals.values())
        if min(self.inplay_terminals.values(), default=0.0) < 0 or abs(total - 1.0) > 1e-9:
            raise ConfigError("in-play terminal probabilities must be >= 0 and sum to 1")
        if self.innings < 1:
            raise ConfigError("innings must be >= 1")
        if self.num_games < 0 or self.postseason_games < 0:
            raise ConfigError("game counts must be >= 0")

    @property
    def pitchers(self) -> tuple[PitcherProfile, PitcherProfile]:
        return (self.home_pitcher, self.away_pitcher)

    def location_for(self, ptype: PitchType) -> LocationModel:
        phys = self.physics.get(ptype)
        return phys.location if phys is not None and phys.location is not None else self.location


def default_config(num_games: int = 200, seed: int = 7, postseason_games: int = 0) -> SimulatorConfig:
    """Two-pitcher reference world: a two-pitch pitcher whose mixture
    swings hard with the count, and a four-pitch pitcher."""
    two_pitch = PitcherProfile.from_buckets(
        "P100",
        behind={PitchType.FOUR_SEAM: 0.85, PitchType.SLIDER: 0.15},
        even={PitchType.FOUR_SEAM: 0.55, PitchType.SLIDER: 0.45},
        ahead={PitchType.FOUR_SEAM: 0.20, PitchType.SLIDER: 0.80},
    )
    four_pitch = PitcherProfile.from_buckets(
        "P200",
        behind={
            PitchType.FOUR_SEAM: 0.50,
            PitchType.SINKER: 0.30,
            PitchType.CHANGEUP: 0.10,
            PitchType.CURVEBALL: 0.10,
        },
        even={
            PitchType.FOUR_SEAM: 0.35,
            PitchType.SINKER: 0.25,
            PitchType.CHANGEUP: 0.20,
            PitchType.CURVEBALL: 0.20,
        },
        ahead={
            PitchType.FOUR_SEAM: 0.15,
            PitchType.SINKER: 0.15,
            PitchType.CHANGEUP: 0.30,
            PitchType.CURVEBALL: 0.40,
        },
    )
    home_batters = tuple(BatterProfile(f"B1{i:02d}") for i in range(1, 10))
    away_batters = tuple(BatterProfile(f"B2{i:02d}") for i in range(1, 10))
    return SimulatorConfig(
        home_pitcher=two_pitch,
        away_pitcher=four_pitch,
        home_batters=home_batters,
        away_batters=away_batters,
        num_games=num_games,
        postseason_games=postseason_games,
        seed=seed,
    )


class _Sampler:
    """Cumulative-probability draw over a fixed item order."""

    def __init__(self, dist: dict):
        items = sorted(dist.items(), key=lambda kv: kv[0].value)
        self.items = [k for k, _ in items]
        self.cum = np.cumsum([p for _, p in items]).tolist()

    def draw(self, rng: np.random.Generator):
        return self.items[bisect.bisect_left(self.cum, rng.random() * self.cum[-1])]


class _PitcherTables:
    def __init__(self, profile: PitcherProfile):
        self.pitcher_id = profile.pitcher_id
        self.by_state = {state: _Sampler(profile.usage[state]) for state in COUNT_STATES}


def _snap(fq: FieldQuant, value: float) -> float:
    return fq.quantize(value)


def _simulate_pa(
    rng: np.random.Generator,
    config: SimulatorConfig,
    qspec: QuantizationSpec,
    pitcher: _PitcherTables,
    batter: BatterProfile,
    terminal_sampler: _Sampler,
) -> tuple[tuple[PitchEvent, ...], TerminalEvent]:
    f = qspec.fields
    sz_top = _snap(f["sz_top"], config.location.sz_top)
    sz_bot = _snap(f["sz_bot"], config.location.sz_bot)
    so = config.swing_outcomes
    pitches: list[PitchEvent] = []
    balls, strikes = 0, 0
    while True:
        ptype = pitcher.by_state[(balls, strikes)].draw(rng)
        phys = config.physics[ptype]
        loc = config.location_for(ptype)
        x = _snap(f["plate_x"], rng.normal(loc.x_mean, loc.x_sd))
        z = _snap(f["plate_z"], rng.normal(loc.z_mean, loc.z_sd))
        iz = abs(x) <= ZONE_HALF_WIDTH and sz_bot <= z <= sz_top
        swing = rng.random() < (batter.iz_swing if iz else batter.oz_swing)
        if swing:
            u = rng.random()
            if u < so.swinging_strike:
                outcome = Outcome.SWINGING_STRIKE
            elif u < so.swinging_strike + so.foul:
                outcome = Outcome.FOUL
            else:
                outcome = Outcome.IN_PLAY
        else:
            outcome = Outcome.CALLED_STRIKE if iz else Outcome.BALL
        pitches.append(
            PitchEvent(
                pitch_type=ptype,
                release_speed=_snap(f["release_speed"], rng.normal(phys.speed_mean, phys.speed_sd)),
                release_pos=(
                    _snap(f["release_pos_x"], rng.normal(config.release.means[0], config.release.sds[0])),
                    _snap(f["release_pos_y"], rng.normal(config.release.means[1], config.release.sds[1])),
                    _snap(f["release_pos_z"], rng.normal(config.release.means[2], config.release.sds[2])),
                ),
                spin_rate=_snap(f["spin_rate"], rng.normal(phys.spin_mean, phys.spin_sd)),
                spin_axis=_snap(f["spin_axis"], rng.normal(phys.axis_mean, phys.axis_sd)),
                plate_x=x,
                plate_z=z,
                sz_top=sz_top,
                sz_bot=sz_bot,
                balls=balls,
                strikes=strikes,
                swing=swing,
                outcome=outcome,
                pitch_number=len(pitches) + 1,
            )
        )
        if outcome is Outcome.IN_PLAY:
            return tuple(pitches), terminal_sampler.draw(rng)
        balls, strikes = next_count(balls, strikes, outcome)
        if balls == 4:
            return tuple(pitches), TerminalEvent.WALK
        if strikes == 3:
            return tuple(pitches), TerminalEvent.STRIKEOUT


def _advance(
    runners: tuple[bool, bool, bool], terminal: TerminalEvent
) -> tuple[tuple[bool, bool, bool], int, int]:
    """Runner movement for a terminal event: (new_runners, runs, outs)."""
    r1, r2, r3 = runners
    if terminal in (TerminalEvent.WALK, TerminalEvent.HIT_BY_PITCH):
        if not r1:
            return (True, r2, r3), 0, 0
        if not r2:
            return (True, True, r3), 0, 0
        if not r3:
            return (True, True, True), 0, 0
        return (True, True, True), 1, 0
    if terminal is TerminalEvent.SINGLE:
        return (True, r1, r2), int(r3), 0
    if terminal is TerminalEvent.DOUBLE:
        return (False, True, r1), int(r2) + int(r3), 0
    if terminal is TerminalEvent.TRIPLE:
        return (False, False, True), int(r1) + int(r2) + int(r3), 0
    if terminal is TerminalEvent.HOME_RUN:
        return (False, False, False), int(r1) + int(r2) + int(r3) + 1, 0
    # strikeout, in-play out, anything unmodeled
    return (r1, r2, r3), 0, 1


def _simulate_game(
    rng: np.random.Generator,
    config: SimulatorConfig,
    qspec: QuantizationSpec,
    game_idx: int,
    season_type: SeasonType,
) -> GameRecord:
    ctx = GameContext(
        game_id=f"SIM{game_idx:06d}",
        date=config.start_date + _dt.timedelta(days=game_idx % 180),
        home_team=config.home_team,
        away_team=config.away_team,
        venue=config.venue,
        season_type=season_type,
    )
    tables = {
        Half.TOP: _PitcherTables(config.home_pitcher),
        Half.BOTTOM: _PitcherTables(config.away_pitcher),
    }
    lineups = {Half.TOP: config.away_batters, Half.BOTTOM: config.home_batters}
    terminal_sampler = _Sampler(config.inplay_terminals)
    slot = {Half.TOP: 0, Half.BOTTOM: 0}
    home_score, away_score = 0, 0
    pas: list[PlateAppearance] = []
    pa_counter = 0
    for inning in range(1, config.innings + 1):
        for half in (Half.TOP, Half.BOTTOM):
            outs = 0
            runners = (False, False, False)
            while outs < 3:
                lineup = lineups[half]
                batter = lineup[slot[half] % len(lineup)]
                slot[half] += 1
                state = InningState(
                    inning=inning,
                    half=half,
                    outs=outs,
                    home_score=home_score,
                    away_score=away_score,
                    runners=runners,
                )
                pitches, terminal = _simulate_pa(
                    rng, config, qspec, tables[half], batter, terminal_sampler
                )
                pa_counter += 1
                pas.append(
                    PlateAppearance(
                        pa_id=str(pa_counter),
                        batter_id=batter.batter_id,
                        pitcher_id=tables[half].pitcher_id,
                        inning_state=state,
                        pitches=pitches,
                        terminal_event=terminal,
                    )
                )
                runners, runs, new_outs = _advance(runners, terminal)
                outs += new_outs
                if half is Half.TOP:
                    away_score += runs
                else:
                    home_score += runs
    return GameRecord(ctx, tuple(pas))


def simulate(config: SimulatorConfig, qspec: Optional[QuantizationSpec] = None) -> list[GameRecord]:
    """Generate the configured corpus deterministically from the seed.

    Regular-season games come first, then postseason games; per-game RNG
    streams are spawned independently so any prefix of the corpus is
    stable under a change of total game count.
    """
    qspec = qspec or default_qspec()
    total = config.num_games + config.postseason_games
    seeds = np.random.SeedSequence(config.seed).spawn(total)
    games = []
    for idx in range(total):
        season = SeasonType.REGULAR if idx < config.num_games else SeasonType.POSTSEASON
        rng = np.random.default_rng(seeds[idx])
        games.append(_simulate_game(rng, config, qspec, idx, season))
    return games


# --- analytic machinery -------------------------------------------------


def _phi(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def _discrete_masses(fq: FieldQuant, mean: float, sd: float) -> np.ndarray:
    """Bucket masses of a normal snapped to the quantization grid.

    End buckets absorb the tails, matching how out-of-range samples clamp.
    """
    n = fq.buckets
    edges = fq.lower + fq.step * np.arange(n + 1)
    cdf = np.array([_phi((e - mean) / sd) for e in edges])
    masses = np.diff(cdf)
    masses[0] += cdf[0]
    masses[-1] += 1.0 - cdf[-1]
    return masses


def _entropy(probs) -> float:
    p = np.asarray(list(probs), dtype=float)
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def _uniform_batter(config: SimulatorConfig) -> BatterProfile:
    batters = config.home_batters + config.away_batters
    first = batters[0]
    for b in batters[1:]:
        if (b.iz_swing, b.oz_swing) != (first.iz_swing, first.oz_swing):
            raise ConfigError(
                "analytic oracle requires every batter to share swing probabilities"
            )
    return first


def _shared_location(config: SimulatorConfig) -> LocationModel:
    for pitcher in config.pitchers:
        for ptype in pitcher.arsenal:
            override = config.physics[ptype].location
            if override is not None and override != config.location:
                raise ConfigError(
                    "analytic oracle requires every pitch type to share the location model"
                )
    return config.location


@dataclass(frozen=True)
class CountChain:
    """Absorbing-chain solution of the count process.

    ``visits[i]`` is the expected number of pitches thrown at count
    ``COUNT_STATES[i]`` per plate appearance; ``weights`` normalizes
    visits to a distribution over pitch counts.
    """

    p_in_zone: float
    visits: np.ndarray
    weights: np.ndarray
    pitches_per_pa: float
    absorb: dict[str, float]  # strikeout / walk / in_play

    def bucket_weights(self) -> dict[str, float]:
        out = {b: 0.0 for b in COUNT_BUCKETS}
        for (b, s), w in zip(COUNT_STATES, self.weights):
            out[count_bucket(b, s)] += float(w)
        return out


def _zone_probability(config: SimulatorConfig, qspec: QuantizationSpec) -> float:
    loc = _shared_location(config)
    fx, fz = qspec.fields["plate_x"], qspec.fields["plate_z"]
    sz_top = _snap(qspec.fields["sz_top"], loc.sz_top)
    sz_bot = _snap(qspec.fields["sz_bot"], loc.sz_bot)
    mx = _discrete_masses(fx, loc.x_mean, loc.x_sd)
    mz = _discrete_masses(fz, loc.z_mean, loc.z_sd)
    px = sum(
        m for i, m in enumerate(mx) if abs(fx.midpoint(i)) <= ZONE_HALF_WIDTH + 1e-12
    )
    pz = sum(
        m
        for i, m in enumerate(mz)
        if sz_bot - 1e-12 <= fz.midpoint(i) <= sz_top + 1e-12
    )
    return float(px * pz)


def count_chain(
    config: SimulatorConfig, qspec: Optional[QuantizationSpec] = None
) -> CountChain:
    """Solve the count process exactly via the fundamental matrix.

    Valid because swing behavior is count-independent and shared by all
    batters, and pitch type does not influence location.
    """
    qspec = qspec or default_qspec()
    batter = _uniform_batter(config)
    z = _zone_probability(config, qspec)
    so = config.swing_outcomes
    p_swing = z * batter.iz_swing + (1.0 - z) * batter.oz_swing
    p_ss = p_swing * so.swinging_strike
    p_foul = p_swing * so.foul
    p_inplay = p_swing * so.in_play
    p_called = z * (1.0 - batter.iz_swing)
    p_ball = (1.0 - z) * (1.0 - batter.oz_swing)

    n = len(COUNT_STATES)
    idx = {state: i for i, state in enumerate(COUNT_STATES)}
    Q = np.zeros((n, n))
    R = np.zeros((n, 3))  # strikeout, walk, in_play
    for (b, s), i in idx.items():
        if b < 3:
            Q[i, idx[(b + 1, s)]] += p_ball
        else:
            R[i, 1] += p_ball
        strike = p_ss + p_called
        if s < 2:
            Q[i, idx[(b, s + 1)]] += strike + p_foul
        else:
            R[i, 0] += strike
            Q[i, i] += p_foul
        R[i, 2] += p_inplay
    visits = np.linalg.solve((np.eye(n) - Q).T, np.eye(n)[idx[(0, 0)]])
    total = float(visits.sum())
    absorb = visits @ R
    return CountChain(
        p_in_zone=z,
        visits=visits,
        weights=visits / total,
        pitches_per_pa=total,
        absorb={
            "strikeout": float(absorb[0]),
            "walk": float(absorb[1]),
            "in_play": float(absorb[2]),
        },
    )


@dataclass(frozen=True)
class AnalyticOracle:
    """Exact reference values implied by a simulator config."""

    chain: CountChain
    bayes_type_accuracy: dict[str, float]  # per pitcher id
    pooled_bayes_type_accuracy: float
    type_distribution: dict[PitchType, float]  # pooled over the corpus
    majority_type: PitchType
    majority_type_accuracy: float
    iz_swing_accuracy: float
    oz_swing_accuracy: float


def analytic_oracle(
    config: SimulatorConfig, qspec: Optional[QuantizationSpec] = None
) -> AnalyticOracle:
    chain = count_chain(config, qspec)

    per_pitcher: dict[str, float] = {}
    pooled: dict[PitchType, float] = {}
    for pitcher in config.pitchers:
        acc = 0.0
        for state, w in zip(COUNT_STATES, chain.weights):
            dist = pitcher.usage[state]
            acc += float(w) * max(dist.values())
            for ptype, p in dist.items():
                pooled[ptype] = pooled.get(ptype, 0.0) + 0.5 * float(w) * p
        per_pitcher[pitcher.pitcher_id] = acc

    # Both pitchers face the same count chain, so each throws half the
    # corpus in expectation.
    pooled_bayes = sum(per_pitcher.values()) / len(per_pitcher)
    majority = max(pooled.items(), key=lambda kv: (kv[1], kv[0].code))[0]
    batter = _uniform_batter(config)
    return AnalyticOracle(
        chain=chain,
        bayes_type_accuracy=per_pitcher,
        pooled_bayes_type_accuracy=pooled_bayes,
        type_distribution=pooled,
        majority_type=majority,
        majority_type_accuracy=pooled[majority],
        iz_swing_accuracy=max(batter.iz_swing, 1.0 - batter.iz_swing),
        oz_swing_accuracy=max(batter.oz_swing, 1.0 - batter.oz_swing),
    )


def sequence_entropy_nats(
    games: list[GameRecord],
    config: SimulatorConfig,
    qspec: Optional[QuantizationSpec] = None,
) -> float:
    """Total irreducible next-token entropy of generated games, in nats.

    Sums, over every pitch actually present, the conditional entropy of
    each stochastic field given everything emitted before it (and the
    latent generative state, so the result lower-bounds what any
    sequence model can achieve). Deterministic tokens contribute zero.
    """
    qspec = qspec or default_qspec()
    f = qspec.fields
    from .events import in_zone  # local import keeps module load order simple

    profiles = {p.pitcher_id: p for p in config.pitchers}
    h_type = {
        (pid, state): _entropy(profile.usage[state].values())
        for pid, profile in profiles.items()
        for state in COUNT_STATES
    }
    h_phys: dict[PitchType, float] = {}
    for ptype, phys in config.physics.items():
        loc = config.location_for(ptype)
        h_phys[ptype] = (
            _entropy(_discrete_masses(f["release_speed"], phys.speed_mean, phys.speed_sd))
            + _entropy(_discrete_masses(f["spin_rate"], phys.spin_mean, phys.spin_sd))
            + _entropy(_discrete_masses(f["spin_axis"], phys.axis_mean, phys.axis_sd))
            + _entropy(_discrete_masses(f["plate_x"], loc.x_mean, loc.x_sd))
            + _entropy(_discrete_masses(f["plate_z"], loc.z_mean, loc.z_sd))
        )
    rel = config.release
    h_release = sum(
        _entropy(_discrete_masses(f[name], rel.means[i], rel.sds[i]))
        for i, name in enumerate(("release_pos_x", "release_pos_y", "release_pos_z"))
    )
    batter = _uniform_batter(config)
    h_swing = {
        True: _entropy([batter.iz_swing, 1.0 - batter.iz_swing]),
        False: _entropy([batter.oz_swing, 1.0 - batter.oz_swing]),
    }
    so = config.swing_outcomes
    h_swing_outcome = _entropy([so.swinging_strike, so.foul, so.in_play])
    h_terminal = _entropy(config.inplay_terminals.values())

    total = 0.0
    for game in games:
        for pa in game.plate_appearances:
            try:
                pid = profiles[pa.pitcher_id].pitcher_id
            except KeyError:
                raise ConfigError(f"pitcher {pa.pitcher_id} is not in the config") from None
            for pitch in pa.pitches:
                total += h_type[(pid, (pitch.balls, pitch.strikes))]
                total += h_phys[pitch.pitch_type] + h_release
                total += h_swing[in_zone(pitch)]
                if pitch.swing:
                    total += h_swing_outcome
            if pa.pitches[-1].outcome is Outcome.IN_PLAY:
                total += h_terminal
    return total
