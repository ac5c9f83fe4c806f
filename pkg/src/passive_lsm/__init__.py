"""Passive time-domain linear sampling for sound-soft obstacles in the plane.

The modules follow the data flow: ``geometry`` (obstacles, rings, sources),
``pulse`` (source signal and its autocorrelation), ``helmholtz`` (frequency
domain solver), ``synthesis`` (time records), ``correlation`` (passive kernel),
``operators`` (imaging matrices), ``inversion`` (truncated SVD indicator) and
``validation`` (Helmholtz-Kirchhoff checks). ``config``, ``io``, ``render``,
``pipeline`` and ``cli`` form the command line layer.
"""
from .geometry import (Disk, Ellipse, Kite, Scene, build_scene, draw_sources, make_shape,
                       sampling_grid)
from .pulse import Pulse, autocorrelate, fourier_transform
from .helmholtz import assemble_bie, disk_oracle, green, solve_point_source
from .synthesis import TimeGrid, add_noise, plan_frequencies, simulate
from .correlation import cross_correlate, passive_kernel
from .operators import assemble_operator, default_dy, test_function
from .inversion import indicator_map, map_summary, truncated_svd

__version__ = "0.1.0"
