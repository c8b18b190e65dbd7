import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ranforge import engine, topology
from ranforge.errors import SchemaError, ValidationError
from ranforge.scenario import (
    FaultKind,
    emit_config,
    expand_x2,
    parse_scenario,
    scenario_to_yaml,
)


class TestParse:
    def test_minimal_urban_defaults(self, minimal_urban_yaml):
        spec = parse_scenario(minimal_urban_yaml)
        assert spec.environment == "urban_embb"
        assert spec.params.bs_tx_power_dbm == 41.0
        assert spec.params.bs_height_m == 25.0
        assert spec.params.thermal_noise_dbm == -81.0
        assert len(spec.sites) == 1
        assert spec.sites[0].sector_azimuths == (30.0, 150.0, 270.0)
        assert spec.users_per_sector == 10
        assert spec.faults == ()

    def test_rural_defaults(self):
        spec = parse_scenario(
            "environment: rural_embb\nseed: 1\nsites:\n- {x: 0.0, y: 0.0}\n"
        )
        assert spec.params.bs_tx_power_dbm == 46.0
        assert spec.params.bs_height_m == 35.0
        assert spec.max_ue_distance_m == 200.0
        assert spec.params.speed_outdoor_kmh == 120.0

    def test_empty_faults_key_absent(self, minimal_urban_yaml):
        assert parse_scenario(minimal_urban_yaml).faults == ()

    def test_all_to_all_three_sites(self):
        text = (
            "environment: urban_embb\nseed: 1\nx2: all-to-all\nsites:\n"
            "- {x: 0.0, y: 0.0}\n- {x: 200.0, y: 0.0}\n- {x: 100.0, y: 173.2}\n"
        )
        spec = parse_scenario(text)
        plan = expand_x2(spec)
        assert set(plan.links) == {(0, 1), (0, 2), (1, 2)}

    def test_unknown_top_level_key_is_schema_error(self):
        with pytest.raises(SchemaError) as err:
            parse_scenario("environment: urban_embb\nseed: 1\nbogus: 1\nsites:\n- {x: 0.0, y: 0.0}\n")
        assert "bogus" in str(err.value)

    def test_unknown_site_key_carries_path(self):
        with pytest.raises(SchemaError) as err:
            parse_scenario(
                "environment: urban_embb\nseed: 1\nsites:\n- {x: 0.0, y: 0.0, heigth: 3}\n"
            )
        assert "sites[0]" in str(err.value)

    def test_wrong_type_is_schema_error(self):
        with pytest.raises(SchemaError):
            parse_scenario("environment: urban_embb\nseed: 1\nsites:\n- {x: hello, y: 0.0}\n")

    def test_missing_seed_is_validation_error(self):
        with pytest.raises(ValidationError) as err:
            parse_scenario("environment: urban_embb\nsites:\n- {x: 0.0, y: 0.0}\n")
        assert err.value.path == "seed"

    def test_seed_override(self):
        spec = parse_scenario("environment: urban_embb\nsites:\n- {x: 0.0, y: 0.0}\n",
                              seed_override=99)
        assert spec.seed == 99

    def test_max_distance_must_exceed_min(self):
        with pytest.raises(ValidationError):
            parse_scenario(
                "environment: urban_embb\nseed: 1\nsites:\n- {x: 0.0, y: 0.0}\n"
                "users: {per_sector: 1, max_distance_m: 10.0}\n"
            )

    def test_azimuth_count_mismatch(self):
        with pytest.raises(ValidationError):
            parse_scenario(
                "environment: urban_embb\nseed: 1\nsites:\n"
                "- {x: 0.0, y: 0.0, sectors: 2, azimuths: [30.0]}\n"
            )

    def test_x2_self_pair_rejected(self):
        with pytest.raises(ValidationError):
            parse_scenario(
                "environment: urban_embb\nseed: 1\nsites:\n- {x: 0.0, y: 0.0}\n- {x: 200.0, y: 0.0}\n"
                "x2:\n- [0, 0]\n"
            )

    def test_x2_duplicate_pair_rejected(self):
        with pytest.raises(ValidationError):
            parse_scenario(
                "environment: urban_embb\nseed: 1\nsites:\n- {x: 0.0, y: 0.0}\n- {x: 200.0, y: 0.0}\n"
                "x2:\n- [0, 1]\n- [1, 0]\n"
            )

    def test_x2_undeclared_site_rejected(self):
        with pytest.raises(ValidationError):
            parse_scenario(
                "environment: urban_embb\nseed: 1\nsites:\n- {x: 0.0, y: 0.0}\n"
                "x2:\n- [0, 3]\n"
            )

    def test_fault_requires_larger_hysteresis(self):
        with pytest.raises(ValidationError):
            parse_scenario(
                "environment: urban_embb\nseed: 1\nsimulation_time_s: 1000.0\nsites:\n- {x: 0.0, y: 0.0}\n"
                "faults:\n- {type: too_late_handover, cell: 0, start_s: 0.0, end_s: 10.0, "
                "hysteresis_db: 2.0, ttt_s: 1.0}\n"
            )

    def test_fault_window_within_simulation(self):
        with pytest.raises(ValidationError):
            parse_scenario(
                "environment: urban_embb\nseed: 1\nsimulation_time_s: 100.0\nsites:\n- {x: 0.0, y: 0.0}\n"
                "faults:\n- {type: excessive_power_reduction, cell: 0, start_s: 50.0, end_s: 150.0}\n"
            )

    def test_anomaly_budget_enforced(self):
        # one site, 100 s: a 3 s window labels 3% > 2%
        with pytest.raises(ValidationError) as err:
            parse_scenario(
                "environment: urban_embb\nseed: 1\nsimulation_time_s: 100.0\nsites:\n- {x: 0.0, y: 0.0}\n"
                "faults:\n- {type: excessive_power_reduction, cell: 0, start_s: 10.0, end_s: 13.0}\n"
            )
        assert "budget" in str(err.value)

    def test_fault_defaults_filled(self):
        spec = parse_scenario(
            "environment: urban_embb\nseed: 1\nsimulation_time_s: 1000.0\nsites:\n- {x: 0.0, y: 0.0}\n"
            "faults:\n- {type: excessive_power_reduction, cell: 0, start_s: 10.0, end_s: 20.0}\n"
        )
        assert spec.faults[0].kind is FaultKind.EXCESSIVE_POWER_REDUCTION
        assert spec.faults[0].power_drop_db == 20.0


class TestExpandX2:
    def test_three_sites_all_to_all_ports(self):
        spec = parse_scenario(
            "environment: urban_embb\nseed: 1\nsites:\n"
            "- {x: 0.0, y: 0.0}\n- {x: 200.0, y: 0.0}\n- {x: 100.0, y: 173.2}\n"
        )
        plan = expand_x2(spec)
        assert plan.links == ((0, 1), (0, 2), (1, 2))
        assert plan.port_map[0] == ((0, 1), (1, 2))
        assert plan.port_map[1] == ((0, 0), (1, 2))
        assert plan.port_map[2] == ((0, 0), (1, 1))

    def test_single_site_empty_plan(self, minimal_urban_yaml):
        plan = expand_x2(parse_scenario(minimal_urban_yaml))
        assert plan.links == ()
        assert plan.port_map[0] == ()

    def test_explicit_pairs_four_sites(self):
        spec = parse_scenario(
            "environment: urban_embb\nseed: 1\nsites:\n"
            "- {x: 0.0, y: 0.0}\n- {x: 200.0, y: 0.0}\n- {x: 400.0, y: 0.0}\n- {x: 600.0, y: 0.0}\n"
            "x2:\n- [0, 1]\n- [2, 3]\n"
        )
        plan = expand_x2(spec)
        assert plan.links == ((0, 1), (2, 3))
        for site in range(4):
            assert len(plan.port_map[site]) == 1

    def test_port_count_equals_degree(self):
        spec = parse_scenario(
            "environment: urban_embb\nseed: 1\nsites:\n"
            "- {x: 0.0, y: 0.0}\n- {x: 200.0, y: 0.0}\n- {x: 400.0, y: 0.0}\n- {x: 600.0, y: 0.0}\n"
            "x2:\n- [0, 1]\n- [0, 2]\n- [0, 3]\n"
        )
        plan = expand_x2(spec)
        degree = {0: 3, 1: 1, 2: 1, 3: 1}
        for site, d in degree.items():
            assert plan.degree(site) == d
            assert [port for port, _ in plan.port_map[site]] == list(range(d))

    @settings(max_examples=19, deadline=None)
    @given(n=st.integers(min_value=1, max_value=19))
    def test_all_to_all_link_count(self, n):
        sites = "\n".join(f"- {{x: {200.0 * i!r}, y: 0.0}}" for i in range(n))
        spec = parse_scenario(f"environment: urban_embb\nseed: 1\nsites:\n{sites}\n")
        plan = expand_x2(spec)
        assert len(plan.links) == n * (n - 1) // 2


class TestEmit:
    def _emitted(self, spec):
        deployment = topology.build_deployment(
            spec, engine.seeded_rng(spec.seed, engine.SALT_DEPLOY)
        )
        return emit_config(spec, expand_x2(spec), deployment)

    def test_deterministic(self, minimal_urban_yaml):
        spec = parse_scenario(minimal_urban_yaml)
        assert self._emitted(spec) == self._emitted(spec)

    def test_zero_users_zero_background(self):
        spec = parse_scenario(
            "environment: urban_embb\nseed: 1\nsites:\n- {x: 0.0, y: 0.0}\n"
            "users: {per_sector: 0, max_distance_m: 50.0}\n"
        )
        text = self._emitted(spec)
        assert "[ue " not in text
        assert "[background_cell " not in text

    def test_stanza_counts(self, urban_spec):
        text = self._emitted(urban_spec)
        assert text.count("[site ") == 19
        assert text.count("[cell ") == 57
        assert text.count("[ue ") == 570
        assert text.count("[x2 ") == 2 * 19 * 18 // 2  # one stanza per port, both ends

    def test_background_stanzas(self):
        spec = parse_scenario(
            "environment: urban_embb\nseed: 1\nsites:\n- {x: 0.0, y: 0.0}\n"
            "users: {per_sector: 0, max_distance_m: 50.0}\n"
            "background: {cells: 2, users_per_cell: 3, area: {x0: 0.0, y0: 0.0, x1: 100.0, y1: 100.0}}\n"
        )
        text = self._emitted(spec)
        assert text.count("[background_cell ") == 2
        assert text.count("[background_ue ") == 6

    def test_roundtrip_through_yaml_summary(self, urban_spec):
        summary = scenario_to_yaml(urban_spec)
        reparsed = parse_scenario(summary)
        assert reparsed == urban_spec

    def test_roundtrip_with_faults_and_background(self):
        spec = parse_scenario(
            "environment: rural_embb\nseed: 5\nsimulation_time_s: 2000.0\nsites:\n"
            "- {x: 0.0, y: 0.0}\n- {x: 1732.0, y: 0.0}\n"
            "x2:\n- [0, 1]\n"
            "background: {cells: 1, users_per_cell: 4, area: {x0: -10.0, y0: -10.0, x1: 10.0, y1: 10.0}}\n"
            "kpis: [sinr, rsrp]\n"
            "faults:\n"
            "- {type: too_late_handover, cell: 0, start_s: 100.0, end_s: 110.0, hysteresis_db: 9.0, ttt_s: 1.0}\n"
            "- {type: inter_cell_interference, cell: 3, start_s: 500.0, end_s: 530.0, magnitude_db: -90.0}\n"
        )
        assert parse_scenario(scenario_to_yaml(spec)) == spec
