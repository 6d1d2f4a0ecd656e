"""fairride: a driver-centered ridesharing backend.

Dispatch is driven by a per-driver acceptance model (a discrete
Bayesian network) that explains its probabilities, attaches incentives
below a community-set threshold, and learns from accept/decline clicks.
Earnings are itemized down to the cent, ratings are per-factor and
disputable, and everything the platform does lands in an append-only
event log that can rebuild the whole state.
"""

__version__ = "0.1.0"
