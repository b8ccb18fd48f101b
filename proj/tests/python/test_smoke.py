import os

import pytest

import hroa

FIXTURES = os.environ.get("HROA_FIXTURE_DIR", os.path.join(os.path.dirname(__file__), "..", "fixtures"))

AS7497 = {"202.127.16.0/20", "202.127.16.0/21", "202.127.16.0/22", "202.127.20.0/22"}


def test_prefix_roundtrip():
    p = hroa.Prefix("202.127.16.0/20")
    assert p.family == 4 and p.length == 20
    assert str(p) == "202.127.16.0/20"
    assert p.bits == (202 << 24) | (127 << 16) | (16 << 8)
    assert p.covers("202.127.20.0/22")
    assert hroa.Prefix("2001:db8::/32").family == 6


def test_parse_error_is_raised():
    with pytest.raises(hroa.ParseError):
        hroa.Prefix("10.0.0.1/8")
    with pytest.raises(hroa.Error):
        hroa.Prefix("not a prefix")


def test_subtree_id_and_node_number():
    # id = 2^20 + top 20 bits of 202.127.16.0
    assert hroa.subtree_id("202.127.16.0/22", 20) == (1 << 20) | (0xCA7F10 >> 4)
    assert hroa.node_number("202.127.20.0/22", 20, 3) == 0b101
    assert hroa.node_number("202.127.16.0/20", 20, 3) == 1


def test_bitmap_roundtrip():
    levels = hroa.HangingLevels.completed(4, [20, 23], 5)
    blocks = hroa.encode_batch(levels, AS7497)
    assert len(blocks) == 1
    assert blocks[0].root == hroa.Prefix("202.127.16.0/20")
    assert not blocks[0].withdraw
    assert hroa.decode_blocks(levels, blocks) == AS7497


def test_compress_minimal():
    blocks = hroa.compress_minimal(["10.0.0.0/24", "10.0.1.0/24", "10.0.0.0/23"])
    assert [str(b) for b in blocks] == ["10.0.0.0/23-24"]
    assert hroa.scatter_degree(["10.0.0.0/24", "10.0.2.0/24"]) == 1.0


def test_encode_decode_workload():
    w = hroa.Workload.from_csv(os.path.join(FIXTURES, "as7497.csv"))
    assert w.row_count == 4 and w.asns == [7497]
    counts = {}
    for scheme in ("sroa", "mroa", "hroa", "ahroa"):
        out = hroa.encode(w, scheme)
        counts[scheme] = out["pdu_count"]
        assert hroa.decode(out["data"]) == {7497: AS7497}
    assert counts == {"sroa": 4, "mroa": 2, "hroa": 1, "ahroa": 1}


def test_wire_error_on_truncation():
    w = hroa.Workload.from_rows([(64512, "10.0.0.0/16", 18)])
    data = hroa.encode(w, "hroa")["data"]
    with pytest.raises(hroa.WireError):
        hroa.decode(data[:-3])


def test_optimize_levels_is_no_worse_than_default():
    w = hroa.Workload.synthetic_scattered(2000, seed=3)
    prefixes = {p for s in w.authorizations().values() for p in s if ":" not in p}
    levels, cost = hroa.optimize_levels(prefixes, h_max=5)
    assert levels.levels[0] == 0
    assert cost <= hroa.simulated_cost(prefixes, hroa.HangingLevels.default(4))
    assert cost == hroa.simulated_cost(prefixes, levels)


def test_sweep_rows():
    w = hroa.Workload.from_csv(os.path.join(FIXTURES, "as7497.csv"))
    rows = hroa.sweep(w, [0, 3, None], [5])
    assert len(rows) == 3
