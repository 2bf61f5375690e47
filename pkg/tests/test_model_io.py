import json
import math

import pytest

from rupturekit.attack import AttackModel, solve_attack
from rupturekit.errors import InputError, SizeLimitError
from rupturekit.model_io import (
    InstanceFile,
    InstanceFormatError,
    emit_instance,
    export_mip,
    parse_instance,
    result_to_json,
)

MINIMAL = """\
FORMAT rupturekit-instance 1
NODES 2
EDGES 1
1 2
ATTACK_COSTS
1 1.000000
2 1.000000
ATTACK
targeted
END
"""


class TestParse:
    def test_minimal(self):
        inst = parse_instance(MINIMAL)
        assert inst.n == 2
        assert inst.edges == ((1, 2),)
        assert inst.attack_cost == (1.0, 1.0)

    def test_comments_and_blank_lines_ignored(self):
        text = MINIMAL.replace("EDGES 1", "# a comment\n\nEDGES 1")
        assert parse_instance(text) == parse_instance(MINIMAL)

    def test_bad_version(self):
        with pytest.raises(InstanceFormatError):
            parse_instance(MINIMAL.replace("instance 1", "instance 9"))

    def test_out_of_range_node_reports_line(self):
        bad = MINIMAL.replace("1 2\nATTACK_COSTS", "1 7\nATTACK_COSTS")
        with pytest.raises(InstanceFormatError) as exc:
            parse_instance(bad)
        assert exc.value.line == 4

    def test_unknown_attack_type(self):
        with pytest.raises(InstanceFormatError):
            parse_instance(MINIMAL.replace("targeted", "sideways"))

    def test_asymmetric_link_cost_rejected(self):
        text = MINIMAL.replace(
            "ATTACK\n", "LINK_COSTS\n1 2 1.000000\n2 1 2.000000\nATTACK\n")
        with pytest.raises(InstanceFormatError):
            parse_instance(text)

    def test_designated_needs_nodes(self):
        with pytest.raises(InstanceFormatError):
            parse_instance(MINIMAL.replace("targeted", "designated"))

    def test_unlimited_response_budget(self):
        text = MINIMAL.replace(
            "ATTACK\n", "BUDGETS\nattack 1.000000\nresponse unlimited\nATTACK\n")
        inst = parse_instance(text)
        assert math.isinf(inst.budget_response)
        assert inst.budget_attack == 1.0

    def test_unlimited_attack_budget_rejected(self):
        text = MINIMAL.replace("ATTACK\n", "BUDGETS\nattack unlimited\nATTACK\n")
        with pytest.raises(InstanceFormatError):
            parse_instance(text)


class TestEmit:
    def test_minimal_roundtrip_byte_identical(self):
        inst = parse_instance(MINIMAL)
        assert emit_instance(inst) == MINIMAL

    def test_roundtrip_identity(self, nine_node):
        assert parse_instance(emit_instance(nine_node)) == nine_node

    def test_emit_idempotent(self, ieee14):
        once = emit_instance(ieee14)
        assert emit_instance(parse_instance(once)) == once


class TestResultJson:
    def test_schema_and_shape(self, nine_node):
        res = solve_attack(AttackModel(nine_node.to_graph(), 1.0))
        doc = json.loads(result_to_json("nine", attack=res))
        assert doc["schema"] == "rupturekit-result/1"
        assert doc["attack"]["cut"] == [5]
        assert doc["attack"]["resilience"] == -1
        assert doc["cut_audit"] == []

    def test_notes_preserved(self):
        doc = json.loads(result_to_json("x", notes=["deviation: y"]))
        assert doc["notes"] == ["deviation: y"]


class TestExportMip:
    def test_attack_export_deterministic(self, nine_node):
        a = export_mip(nine_node, "attack")
        b = export_mip(nine_node, "attack")
        assert a == b
        assert a.startswith("\\ rupturekit mip export v1")
        assert "Maximize" in a
        assert " r4f: " in a

    def test_attack_export_distributed_rows(self, nine_node):
        import dataclasses

        dist = dataclasses.replace(nine_node, attack_type="distributed",
                                   attack_nodes=(1, 5))
        text = export_mip(dist, "attack")
        assert " r20b_2: " in text  # intact node pinned active
        assert " r4b_1: " in text

    def test_response_export_needs_cut(self, nine_node):
        with pytest.raises(InputError):
            export_mip(nine_node, "response")

    def test_response_export_rows(self, nine_node):
        text = export_mip(nine_node, "response", cut=[5])
        assert "Minimize" in text
        assert " r7b_lo_1: " in text
        assert " r7f: " in text
        assert " r7c: " in text

    def test_reduced_export_rows(self, nine_node):
        text = export_mip(nine_node, "reduced", cut=[5])
        assert " r19b: " in text
        assert " r19d: " in text
        assert "xhat_10" in text

    def test_reduced_power_rows(self, ieee14):
        text = export_mip(ieee14, "reduced", cut=[2, 4, 6, 9], power=True)
        # load-only components 4 and 5 get a power-routing row
        assert " r21_4_5: " in text

    def test_unknown_formulation(self, nine_node):
        with pytest.raises(InputError):
            export_mip(nine_node, "dual")

    def test_size_guard(self):
        big = InstanceFile(201, ((1, 2),), (1.0,) * 201, {})
        with pytest.raises(SizeLimitError):
            export_mip(big, "attack")
