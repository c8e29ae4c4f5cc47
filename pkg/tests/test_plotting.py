import numpy as np
import pytest
from matplotlib.figure import Figure

from lane_emden_lab import phase_diagram
from lane_emden_lab.plotting import (
    plot_angular,
    plot_kernel,
    plot_multiplier,
    plot_phase_diagram,
    plot_profile,
    save,
)


def test_figures_are_built_without_pyplot(tmp_path):
    figs = [
        plot_multiplier(5, 1, np.linspace(0.1, 2.9, 5), np.ones(5), 2.25, beta_p=1.0),
        plot_phase_diagram(phase_diagram(np.arange(3.0, 8.0), np.linspace(1.5, 9, 6), 1)),
        plot_profile(np.linspace(0.1, 1, 5), np.ones((5, 2)), log=True, title="t"),
        plot_angular([2, 3], [1, 2], [3, 4]),
        plot_kernel([0.0, 0.5], [0.0, 0.5], [[1.0, 2.0], [1.5, 2.5]]),
    ]
    for k, fig in enumerate(figs):
        assert isinstance(fig, Figure)
        out = save(fig, tmp_path / f"f{k}.pdf")
        assert out.read_bytes().startswith(b"%PDF")


def test_svg_is_reproducible(tmp_path):
    data = [plot_angular([2, 3], [1, 2], [3, 4]) for _ in range(2)]
    paths = [save(f, tmp_path / f"a{k}.svg") for k, f in enumerate(data)]
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_energy_curve_figure(bubble, tmp_path):
    from lane_emden_lab import energy_scan
    from lane_emden_lab.plotting import plot_energy_curve

    fig = plot_energy_curve(energy_scan(bubble, np.linspace(1, 4, 4)))
    assert save(fig, tmp_path / "e.png").read_bytes()[:4] == b"\x89PNG"
