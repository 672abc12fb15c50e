"""SVG trajectory rendering."""

import math

import numpy as np
import pytest

from gptham.dynamics import Hamiltonian, recipe_generator, evolve_map
from gptham.plotting import PLANES, trajectory_svg


def circle_states(n=32):
    gen = recipe_generator(Hamiltonian(np.array([0.0, 0.0, 1.0])))
    rho0 = np.array([0.9, 0.0, 0.0])
    ts = np.linspace(0.0, 2.0 * math.pi, n)
    return np.array([evolve_map(gen, t) @ rho0 for t in ts])


def test_planes_registry():
    assert set(PLANES) == {"xy", "xz", "yz"}


def test_svg_structure(theories):
    svg = trajectory_svg(theories["ball"], circle_states(), "xy")
    assert svg.startswith("<svg")
    assert svg.rstrip().endswith("</svg>")
    assert "<polyline" in svg
    assert "<polygon" in svg  # the body outline
    assert "<circle" in svg  # the start marker
    assert "xy" in svg


def test_svg_deterministic(theories):
    states = circle_states()
    a = trajectory_svg(theories["cube"], states, "xz")
    b = trajectory_svg(theories["cube"], states, "xz")
    assert a == b


@pytest.mark.parametrize("plane", ["xy", "xz", "yz"])
@pytest.mark.parametrize("name", ["ball", "cube", "cylinder", "cone"])
def test_all_planes_and_bodies_render(theories, plane, name):
    svg = trajectory_svg(theories[name], circle_states(8), plane)
    assert "<polyline" in svg


def test_unknown_plane_rejected(theories):
    with pytest.raises(ValueError):
        trajectory_svg(theories["ball"], circle_states(4), "xw")
