import json
from fractions import Fraction

import pytest

from padicradius.catalog import dwork, zero_system
from padicradius.diffsys import DiffSystem, DomainSpec
from padicradius.explorer import (
    ExploreOptions, explore, model_rescale, parse, rescaling_consistency, serialize,
)
from padicradius.field import PrimeConfig
from padicradius.laurent import LaurentPoly, RatFunc
from padicradius.radius import Cap

OPTS = ExploreOptions(N=300, window=50)


@pytest.fixture(scope="module")
def dwork_graph():
    sys = dwork()
    return explore(sys, Fraction(-1, 2), 0, [sys.config(1)], depth=1, opts=OPTS)


def test_model_rescale_examples():
    assert model_rescale(Fraction(1, 2), Fraction(1, 4)) == Fraction(1, 4)
    assert model_rescale(Fraction(1, 4), Fraction(1, 2)) == 0
    assert model_rescale(Fraction(7, 3), 0) == Fraction(7, 3)
    with pytest.raises(ValueError):
        model_rescale(-1, 0)


def test_zero_system_single_flat_segment():
    g = explore(zero_system(), 0, 1, opts=ExploreOptions(N=20, window=10, cap=Cap.DOMAIN))
    assert g.root.children == []
    assert g.root.fit.slopes == [0]


def test_dwork_root_segment(dwork_graph):
    fit = dwork_graph.root.fit
    assert fit.slopes == [-2, 0]
    assert abs(fit.breakpoints[1] - Fraction(-7, 18)) <= Fraction(1, 36)
    root_leaves = [lf for lf in dwork_graph.leaves if lf.node is dwork_graph.root]
    assert len(root_leaves) == 1
    assert abs(root_leaves[0].v_R + Fraction(2, 9)) < Fraction(1, 50)


def test_dwork_child_agrees_with_leaf(dwork_graph):
    (child,) = dwork_graph.root.children
    assert child.center == dwork().config(1)
    assert child.t_interval[0] > 0
    for s in child.samples:
        assert abs(s.enc.v_est + Fraction(2, 9)) <= s.width + Fraction(1, 50)


def test_rescaling_consistency(dwork_graph):
    assert rescaling_consistency(dwork_graph, opts=OPTS) == []


def test_young_star():
    cfg = PrimeConfig(3)
    g = RatFunc(LaurentPoly.const(cfg, Fraction(1, 3)), LaurentPoly.T(cfg))
    sys = DiffSystem([[g]], DomainSpec.annulus(0, 1), cfg)
    graph = explore(sys, 0, 1, opts=ExploreOptions(N=100, window=50, cap=Cap.DOMAIN))
    fit = graph.root.fit
    assert fit.slopes == [1] and fit.lines[0].intercept == Fraction(3, 2)
    (decs,) = graph.root.decompositions
    assert any((d.h, d.j, d.s, d.v_b) == (0, 1, 0, 1) for d in decs)


def test_center_outside_segment():
    sys = dwork()
    with pytest.raises(ValueError):
        explore(sys, Fraction(-1, 2), 0, [sys.config.pi], opts=OPTS)


def test_serialize_round_trip(dwork_graph):
    text = serialize(dwork_graph)
    back = parse(text)
    assert back == dwork_graph
    assert serialize(back) == text
    doc = json.loads(text)
    assert set(doc) == {"field", "segments", "leaves"}
    assert len(doc["segments"]) == 2


def test_serialize_is_deterministic():
    a = serialize(explore(dwork(), Fraction(-1, 2), 0, opts=ExploreOptions(N=120, window=40)))
    b = serialize(explore(dwork(), Fraction(-1, 2), 0, opts=ExploreOptions(N=120, window=40)))
    assert a == b


def test_plot_data(dwork_graph):
    tables = serialize(dwork_graph, "plot-data")
    assert set(tables) == {0, 1}
    for text in tables.values():
        lines = text.splitlines()
        assert lines[0] == "t,v_est,v_cert"
        assert len(lines) == OPTS.count + 1
