"""Simulator tests: determinism, grid snapping, analytic agreement, validation."""

import dataclasses
import math

import numpy as np
import pytest

from sabergen.codec import default_qspec, parse, quantize_game, serialize
from sabergen.errors import ConfigError
from sabergen.events import (
    Outcome,
    PitchType,
    SeasonType,
    TerminalEvent,
    count_bucket,
    in_zone,
    validate_game,
)
from sabergen.simulate import (
    COUNT_STATES,
    BatterProfile,
    LocationModel,
    PitchPhysics,
    PitcherProfile,
    SwingOutcomeModel,
    analytic_oracle,
    count_chain,
    default_config,
    sequence_entropy_nats,
    simulate,
)


@pytest.fixture(scope="module")
def corpus():
    config = default_config(num_games=60, seed=5, postseason_games=4)
    return config, simulate(config)


def all_pitches(games):
    for g in games:
        for pa in g.plate_appearances:
            for p in pa.pitches:
                yield pa, p


class TestDeterminism:
    def test_same_seed_same_corpus(self):
        config = default_config(num_games=3, seed=11, postseason_games=1)
        assert simulate(config) == simulate(config)

    def test_different_seed_differs(self):
        a = simulate(default_config(num_games=2, seed=1))
        b = simulate(default_config(num_games=2, seed=2))
        assert a != b

    def test_prefix_stable_under_corpus_growth(self):
        small = simulate(default_config(num_games=3, seed=11))
        large = simulate(default_config(num_games=6, seed=11))
        assert large[:3] == small

    def test_regular_prefix_stable_under_added_postseason(self):
        plain = simulate(default_config(num_games=3, seed=11))
        mixed = simulate(default_config(num_games=3, seed=11, postseason_games=2))
        assert mixed[:3] == plain


class TestCorpusShape:
    def test_season_assignment(self, corpus):
        _, games = corpus
        assert sum(g.context.season_type is SeasonType.REGULAR for g in games) == 60
        assert sum(g.context.season_type is SeasonType.POSTSEASON for g in games) == 4
        # regular games first
        assert [g.context.season_type for g in games[:60]] == [SeasonType.REGULAR] * 60

    def test_game_ids_unique(self, corpus):
        _, games = corpus
        ids = [g.context.game_id for g in games]
        assert len(set(ids)) == len(ids)

    def test_every_game_validates(self, corpus):
        _, games = corpus
        for g in games:
            result = validate_game(g)
            assert result.ok, result.violations

    def test_both_pitchers_appear(self, corpus):
        config, games = corpus
        seen = {pa.pitcher_id for g in games for pa in g.plate_appearances}
        assert seen == {config.home_pitcher.pitcher_id, config.away_pitcher.pitcher_id}

    def test_home_pitcher_works_top_half(self, corpus):
        config, games = corpus
        for g in games:
            for pa in g.plate_appearances:
                expected = (
                    config.home_pitcher.pitcher_id
                    if pa.inning_state.half.value == "top"
                    else config.away_pitcher.pitcher_id
                )
                assert pa.pitcher_id == expected


class TestGridSnapping:
    def test_all_reals_sit_on_bucket_midpoints(self, corpus):
        _, games = corpus
        qspec = default_qspec()
        f = qspec.fields
        for _, p in all_pitches(games[:5]):
            for field, value in (
                ("release_speed", p.release_speed),
                ("release_pos_x", p.release_pos[0]),
                ("release_pos_y", p.release_pos[1]),
                ("release_pos_z", p.release_pos[2]),
                ("spin_rate", p.spin_rate),
                ("spin_axis", p.spin_axis),
                ("plate_x", p.plate_x),
                ("plate_z", p.plate_z),
                ("sz_top", p.sz_top),
                ("sz_bot", p.sz_bot),
            ):
                i, clamped = f[field].bucket(value)
                assert not clamped
                assert f[field].midpoint(i) == value

    def test_quantization_is_identity(self, corpus):
        _, games = corpus
        qspec = default_qspec()
        for g in games[:5]:
            assert quantize_game(g, qspec) == g

    def test_serialization_is_lossless(self, corpus, vocab, qspec):
        # the generator walks the same grid the tokenizer does, so games
        # survive a trip through tokens exactly, not just approximately
        _, games = corpus
        for g in games[:5]:
            assert parse(serialize(g, vocab, qspec), vocab, qspec) == g

    def test_zone_calls_match_token_visible_geometry(self, corpus):
        # called strike inside the snapped zone, ball outside, for takes
        _, games = corpus
        for _, p in all_pitches(games):
            if p.swing:
                continue
            iz = in_zone(p)
            expected = Outcome.CALLED_STRIKE if iz else Outcome.BALL
            assert p.outcome is expected


class TestAnalyticAgreement:
    def test_zone_probability_matches_monte_carlo(self, corpus):
        config, games = corpus
        chain = count_chain(config)
        hits = total = 0
        for _, p in all_pitches(games):
            hits += in_zone(p)
            total += 1
        assert total > 10_000
        sd = math.sqrt(chain.p_in_zone * (1 - chain.p_in_zone) / total)
        assert abs(hits / total - chain.p_in_zone) < 5 * sd

    def test_pitches_per_pa_matches_chain(self, corpus):
        config, games = corpus
        chain = count_chain(config)
        lengths = [len(pa.pitches) for g in games for pa in g.plate_appearances]
        mean = sum(lengths) / len(lengths)
        # foul-ball geometry gives the length distribution a long tail;
        # 5 sigma of the empirical spread around the exact mean
        sem = np.std(lengths) / math.sqrt(len(lengths))
        assert abs(mean - chain.pitches_per_pa) < 5 * sem

    def test_absorption_matches_terminals(self, corpus):
        config, games = corpus
        chain = count_chain(config)
        kinds = {"strikeout": 0, "walk": 0, "in_play": 0}
        pas = [pa for g in games for pa in g.plate_appearances]
        for pa in pas:
            if pa.terminal_event is TerminalEvent.STRIKEOUT:
                kinds["strikeout"] += 1
            elif pa.terminal_event is TerminalEvent.WALK:
                kinds["walk"] += 1
            else:
                kinds["in_play"] += 1
        n = len(pas)
        assert abs(sum(chain.absorb.values()) - 1.0) < 1e-12
        for key, expected in chain.absorb.items():
            sd = math.sqrt(expected * (1 - expected) / n)
            assert abs(kinds[key] / n - expected) < 5 * sd, key

    def test_pitch_mix_converges_to_usage(self, corpus):
        # per (pitcher, count) empirical mixtures approach the configured
        # tables; cells are held to a bound matched to their sample size
        config, games = corpus
        profiles = {p.pitcher_id: p for p in config.pitchers}
        counts: dict[tuple[str, tuple[int, int]], dict[PitchType, int]] = {}
        for pa, p in all_pitches(games):
            cell = counts.setdefault((pa.pitcher_id, (p.balls, p.strikes)), {})
            cell[p.pitch_type] = cell.get(p.pitch_type, 0) + 1
        checked = 0
        for (pid, state), cell in counts.items():
            n = sum(cell.values())
            if n < 400:
                continue
            usage = profiles[pid].usage[state]
            tv = 0.5 * sum(
                abs(cell.get(t, 0) / n - usage.get(t, 0.0))
                for t in set(cell) | set(usage)
            )
            bound = 0.03 if n >= 2000 else 0.08
            assert tv < bound, (pid, state, n, tv)
            checked += 1
        assert checked >= 12

    def test_bucket_weights_sum_to_one(self, corpus):
        config, _ = corpus
        chain = count_chain(config)
        weights = chain.bucket_weights()
        assert set(weights) == {"behind", "even", "ahead"}
        assert abs(sum(weights.values()) - 1.0) < 1e-12
        assert abs(float(chain.weights.sum()) - 1.0) < 1e-12

    def test_oracle_reference_values(self):
        # frozen expectations for the default two-pitcher world
        oracle = analytic_oracle(default_config())
        assert abs(oracle.chain.p_in_zone - 0.5865) < 5e-4
        assert abs(oracle.chain.pitches_per_pa - 3.2283) < 5e-4
        assert abs(oracle.bayes_type_accuracy["P100"] - 0.6965) < 5e-4
        assert abs(oracle.bayes_type_accuracy["P200"] - 0.3979) < 5e-4
        assert abs(oracle.pooled_bayes_type_accuracy - 0.5472) < 5e-4
        assert oracle.majority_type is PitchType.FOUR_SEAM
        assert abs(oracle.majority_type_accuracy - 0.4038) < 5e-4
        assert oracle.iz_swing_accuracy == 0.8
        assert abs(oracle.oz_swing_accuracy - 0.7) < 1e-12

    def test_type_distribution_is_normalized(self):
        oracle = analytic_oracle(default_config())
        assert abs(sum(oracle.type_distribution.values()) - 1.0) < 1e-9

    def test_majority_pitch_beats_no_other(self):
        oracle = analytic_oracle(default_config())
        top = max(oracle.type_distribution.values())
        assert oracle.type_distribution[oracle.majority_type] == top


class TestEntropy:
    def test_entropy_floor_scale(self, corpus):
        config, games = corpus
        total = sequence_entropy_nats(games, config)
        n_pitches = sum(len(pa.pitches) for g in games for pa in g.plate_appearances)
        per_pitch = total / n_pitches
        # ten quantized fields plus type/swing/outcome; anything outside
        # this band means the accounting broke
        assert 15.0 < per_pitch < 30.0

    def test_entropy_deterministic(self, corpus):
        config, games = corpus
        a = sequence_entropy_nats(games[:2], config)
        b = sequence_entropy_nats(games[:2], config)
        assert a == b

    def test_entropy_additive_in_games(self, corpus):
        config, games = corpus
        whole = sequence_entropy_nats(games[:4], config)
        parts = sequence_entropy_nats(games[:2], config) + sequence_entropy_nats(
            games[2:4], config
        )
        assert abs(whole - parts) < 1e-9


class TestProfileValidation:
    def full_usage(self, dist):
        return {state: dict(dist) for state in COUNT_STATES}

    def test_from_buckets_expansion(self):
        behind = {PitchType.FOUR_SEAM: 0.9, PitchType.SLIDER: 0.1}
        even = {PitchType.FOUR_SEAM: 0.6, PitchType.SLIDER: 0.4}
        ahead = {PitchType.FOUR_SEAM: 0.2, PitchType.SLIDER: 0.8}
        prof = PitcherProfile.from_buckets("P1", behind=behind, even=even, ahead=ahead)
        by_bucket = {"behind": behind, "even": even, "ahead": ahead}
        for b, s in COUNT_STATES:
            assert prof.usage[(b, s)] == by_bucket[count_bucket(b, s)]

    def test_arsenal_sorted_by_code(self):
        prof = PitcherProfile.from_buckets(
            "P1",
            behind={PitchType.SLIDER: 0.5, PitchType.CHANGEUP: 0.5},
            even={PitchType.SLIDER: 0.5, PitchType.CHANGEUP: 0.5},
            ahead={PitchType.SLIDER: 0.5, PitchType.CHANGEUP: 0.5},
        )
        assert prof.arsenal == (PitchType.CHANGEUP, PitchType.SLIDER)

    def test_usage_must_cover_every_count(self):
        usage = self.full_usage({PitchType.FOUR_SEAM: 1.0})
        del usage[(3, 2)]
        with pytest.raises(ConfigError):
            PitcherProfile("P1", usage)

    def test_usage_must_sum_to_one(self):
        usage = self.full_usage({PitchType.FOUR_SEAM: 0.7, PitchType.SLIDER: 0.2})
        with pytest.raises(ConfigError):
            PitcherProfile("P1", usage)

    def test_usage_rejects_negative_share(self):
        usage = self.full_usage({PitchType.FOUR_SEAM: 1.2, PitchType.SLIDER: -0.2})
        with pytest.raises(ConfigError):
            PitcherProfile("P1", usage)

    def test_arsenal_must_not_vary_by_count(self):
        usage = self.full_usage({PitchType.FOUR_SEAM: 0.5, PitchType.SLIDER: 0.5})
        usage[(2, 0)] = {PitchType.FOUR_SEAM: 0.5, PitchType.CURVEBALL: 0.5}
        with pytest.raises(ConfigError):
            PitcherProfile("P1", usage)

    def test_batter_swing_rates_bounded(self):
        with pytest.raises(ConfigError):
            BatterProfile("B1", iz_swing=1.2)
        with pytest.raises(ConfigError):
            BatterProfile("B1", oz_swing=-0.1)

    def test_swing_outcomes_must_sum_to_one(self):
        with pytest.raises(ConfigError):
            SwingOutcomeModel(swinging_strike=0.5, foul=0.5, in_play=0.5)


class TestConfigValidation:
    def test_distinct_pitcher_ids(self):
        config = default_config()
        clone = dataclasses.replace(
            config.away_pitcher, pitcher_id=config.home_pitcher.pitcher_id
        )
        with pytest.raises(ConfigError):
            dataclasses.replace(config, away_pitcher=clone)

    def test_lineups_required(self):
        with pytest.raises(ConfigError):
            dataclasses.replace(default_config(), home_batters=())

    def test_distinct_batter_ids(self):
        config = default_config()
        dupe = config.away_batters[:-1] + (config.home_batters[0],)
        with pytest.raises(ConfigError):
            dataclasses.replace(config, away_batters=dupe)

    def test_distinct_team_codes(self):
        with pytest.raises(ConfigError):
            dataclasses.replace(default_config(), away_team="HOM")

    def test_arsenal_needs_physics(self):
        config = default_config()
        physics = dict(config.physics)
        del physics[PitchType.SLIDER]
        with pytest.raises(ConfigError):
            dataclasses.replace(config, physics=physics)

    def test_inplay_terminals_must_normalize(self):
        config = default_config()
        bad = dict(config.inplay_terminals)
        bad[TerminalEvent.SINGLE] = bad[TerminalEvent.SINGLE] + 0.5
        with pytest.raises(ConfigError):
            dataclasses.replace(config, inplay_terminals=bad)

    def test_innings_positive(self):
        with pytest.raises(ConfigError):
            dataclasses.replace(default_config(), innings=0)

    def test_game_counts_nonnegative(self):
        with pytest.raises(ConfigError):
            default_config(num_games=-1)


class TestPerTypeLocation:
    def heterogeneous(self):
        config = default_config()
        physics = dict(config.physics)
        shifted = dataclasses.replace(
            config.location, z_mean=config.location.z_mean - 0.8
        )
        physics[PitchType.SLIDER] = dataclasses.replace(
            physics[PitchType.SLIDER], location=shifted
        )
        return dataclasses.replace(config, physics=physics)

    def test_location_for_prefers_override(self):
        config = self.heterogeneous()
        assert config.location_for(PitchType.SLIDER) == dataclasses.replace(
            config.location, z_mean=config.location.z_mean - 0.8
        )
        assert config.location_for(PitchType.FOUR_SEAM) == config.location

    def test_simulation_honors_override(self):
        config = dataclasses.replace(self.heterogeneous(), num_games=8)
        games = simulate(config)
        z_by_type = {PitchType.SLIDER: [], PitchType.FOUR_SEAM: []}
        for _, p in all_pitches(games):
            if p.pitch_type in z_by_type:
                z_by_type[p.pitch_type].append(p.plate_z)
        gap = np.mean(z_by_type[PitchType.FOUR_SEAM]) - np.mean(z_by_type[PitchType.SLIDER])
        assert gap > 0.4  # configured 0.8 drop, generous sampling slack

    def test_count_chain_requires_shared_location(self):
        # the analytic chain assumes location does not depend on type;
        # it must refuse rather than silently answer wrong
        with pytest.raises(ConfigError):
            count_chain(self.heterogeneous())
        with pytest.raises(ConfigError):
            analytic_oracle(self.heterogeneous())

    def test_matching_override_is_allowed(self):
        config = default_config()
        physics = dict(config.physics)
        physics[PitchType.SLIDER] = dataclasses.replace(
            physics[PitchType.SLIDER], location=LocationModel()
        )
        same = dataclasses.replace(config, physics=physics)
        assert count_chain(same).p_in_zone == count_chain(config).p_in_zone

    def test_override_cannot_move_the_zone(self):
        # strike zone bounds come from the shared model even when a
        # pitch type carries its own location
        config = dataclasses.replace(self.heterogeneous(), num_games=4)
        games = simulate(config)
        tops = {p.sz_top for _, p in all_pitches(games)}
        bots = {p.sz_bot for _, p in all_pitches(games)}
        assert len(tops) == 1 and len(bots) == 1


class TestPhysicsSeparation:
    def test_types_have_distinct_speed_bands(self, corpus):
        config, games = corpus
        speeds: dict[PitchType, list[float]] = {}
        for _, p in all_pitches(games):
            speeds.setdefault(p.pitch_type, []).append(p.release_speed)
        means = {t: np.mean(v) for t, v in speeds.items() if len(v) > 200}
        assert means[PitchType.FOUR_SEAM] > means[PitchType.SLIDER]
        for ptype, mean in means.items():
            phys = config.physics[ptype]
            assert abs(mean - phys.speed_mean) < 1.0
