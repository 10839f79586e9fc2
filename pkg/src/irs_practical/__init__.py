"""Reflecting-surface beamforming with a phase-dependent element amplitude.

Modules:

``circuit``      equivalent-circuit reflection coefficient of one element
``phase_model``  closed-form amplitude-vs-phase model and its least-squares fit
``channel``      geometry, path loss and Rayleigh channel sampling
``beamform``     transmit/reflect beamforming and the alternating optimizer
``experiments``  Monte Carlo comparison of the beamforming schemes
``cli``          the ``irs-sim`` command
"""

__version__ = "0.1.0"
