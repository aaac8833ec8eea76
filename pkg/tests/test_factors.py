from __future__ import annotations

import itertools

import pytest

from promind.config import SystemConfig, default_modality_table
from promind.factors import (
    AgeGroup,
    CountTable,
    FactorLevel,
    FactorProfile,
    ModalityScore,
    ModalityTable,
    TaskCategory,
    Weights,
    count_contribution,
    modality_contribution,
    validate_tables,
)

from .conftest import profile

REFERENCE_TABLE = CountTable(n_low=1, n_medium=2, n_high=3, a_young=1, a_old=3, max_count=5)

# Independent oracle: spell the level inversion out as plain dictionaries.
LEVEL_CELL = {"low": "n_high", "medium": "n_medium", "high": "n_low"}
AGE_CELL = {"young": "a_young", "old": "a_old"}


def oracle_counts(prof: FactorProfile, table: CountTable) -> tuple[int, int, int, int]:
    return (
        getattr(table, LEVEL_CELL[prof.complexity.value]),
        getattr(table, LEVEL_CELL[prof.importance.value]),
        getattr(table, LEVEL_CELL[prof.motivation.value]),
        getattr(table, AGE_CELL[prof.age.value]),
    )


def all_profiles():
    for com, imp, mot, age, typ in itertools.product(
        FactorLevel, FactorLevel, FactorLevel, AgeGroup, TaskCategory
    ):
        yield FactorProfile(com, imp, mot, age, typ)


class TestCountContribution:
    def test_all_low_old(self):
        assert count_contribution(profile("L", "L", "L", "o"), REFERENCE_TABLE) == (3, 3, 3, 3)

    def test_all_high_young(self):
        assert count_contribution(profile("H", "H", "H", "y"), REFERENCE_TABLE) == (1, 1, 1, 1)

    def test_mixed_profile(self):
        # Enumerated by the oracle: M->n_medium, L->n_high, H->n_low, o->a_old.
        assert count_contribution(profile("M", "L", "H", "o"), REFERENCE_TABLE) == (2, 3, 1, 3)

    def test_matches_oracle_everywhere(self):
        for prof in all_profiles():
            assert count_contribution(prof, REFERENCE_TABLE) == oracle_counts(
                prof, REFERENCE_TABLE
            )

    def test_total_and_deterministic(self):
        for prof in all_profiles():
            first = count_contribution(prof, REFERENCE_TABLE)
            assert first == count_contribution(prof, REFERENCE_TABLE)
            assert all(value >= 1 for value in first)

    def test_level_antitonicity(self):
        # Raising any of the three level factors never increases its cell value.
        order = [FactorLevel.LOW, FactorLevel.MEDIUM, FactorLevel.HIGH]
        for prof in all_profiles():
            base = count_contribution(prof, REFERENCE_TABLE)
            for slot, name in enumerate(("complexity", "importance", "motivation")):
                level = getattr(prof, name)
                if level is FactorLevel.HIGH:
                    continue
                raised = dict(
                    complexity=prof.complexity,
                    importance=prof.importance,
                    motivation=prof.motivation,
                    age=prof.age,
                    category=prof.category,
                )
                raised[name] = order[order.index(level) + 1]
                bumped = count_contribution(FactorProfile(**raised), REFERENCE_TABLE)
                assert bumped[slot] <= base[slot]


class TestModalityContribution:
    def test_constant_table(self):
        flat = ModalityScore(0.5, 0.5, 0.5)
        table = ModalityTable(*([flat] * 9))
        assert modality_contribution(profile(), table) == (flat,) * 5

    def test_work_category_verbatim(self):
        table = default_modality_table()
        contributions = modality_contribution(profile(typ="wor"), table)
        assert contributions[4] == table.t_work

    def test_high_complexity_maps_to_low_cell(self):
        table = default_modality_table()
        contributions = modality_contribution(profile(com="H"), table)
        assert contributions[0] == table.h_low

    def test_age_cells(self):
        table = default_modality_table()
        assert modality_contribution(profile(age="y"), table)[3] == table.a_young
        assert modality_contribution(profile(age="o"), table)[3] == table.a_old


class TestValidateTables:
    def test_default_config_ok(self):
        cfg = SystemConfig()
        assert validate_tables(cfg.count_table, cfg.modality_table, cfg.weights) == []

    def test_zero_weights_reported(self):
        cfg = SystemConfig()
        problems = validate_tables(
            cfg.count_table, cfg.modality_table, Weights(count=(0, 0, 0, 0))
        )
        assert any("sum to zero" in p for p in problems)

    def test_non_monotone_counts_reported(self):
        bad = CountTable(n_low=4, n_medium=4, n_high=2, a_young=1, a_old=1, max_count=5)
        cfg = SystemConfig()
        problems = validate_tables(bad, cfg.modality_table, cfg.weights)
        assert any("not monotone" in p for p in problems)

    def test_out_of_range_modality_reported(self):
        table = default_modality_table()
        import dataclasses

        bad = dataclasses.replace(table, h_low=ModalityScore(1.5, 0.0, 0.0))
        cfg = SystemConfig()
        problems = validate_tables(cfg.count_table, bad, cfg.weights)
        assert any("outside [0, 1]" in p for p in problems)

    def test_reports_do_not_raise(self):
        bad = CountTable(n_low=9, n_medium=1, n_high=1, a_young=99, a_old=0, max_count=2)
        problems = validate_tables(bad, default_modality_table(), Weights(count=(-1, 0, 0, 0)))
        assert len(problems) >= 3


class TestVocabulary:
    def test_level_total_order(self):
        assert FactorLevel.LOW < FactorLevel.MEDIUM < FactorLevel.HIGH

    def test_parse_shorthand(self):
        assert FactorLevel.parse("H") is FactorLevel.HIGH
        assert AgeGroup.parse("o") is AgeGroup.OLD
        assert TaskCategory.parse("wor") is TaskCategory.WORK
        assert TaskCategory.parse("financial") is TaskCategory.FINANCIAL

    def test_parse_rejects_unknown(self):
        with pytest.raises(ValueError):
            FactorLevel.parse("extreme")
