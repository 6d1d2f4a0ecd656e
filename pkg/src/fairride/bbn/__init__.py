"""Per-driver acceptance model: a discrete BBN with Dirichlet-count CPTs."""

from .context import (
    CONTEXT_NODES,
    default_network,
    default_network_spec,
    discretize_context,
    elicit_profile_priors,
    pickup_eta_minutes,
    profile_preferences,
)
from .inference import infer_acceptance, posterior_marginal, top_factors
from .network import (
    BayesNetwork,
    Evidence,
    FactorAttribution,
    InvalidEvidence,
    Observation,
    Preference,
    UnknownPreferenceDimension,
    build_network,
    elicit_priors,
    record_observation,
    validate_evidence,
)
from .spec import (
    CptTooLarge,
    CycleDetected,
    NetworkSpec,
    NetworkSpecError,
    Node,
    StateCollision,
    UnknownNode,
)

__all__ = [
    "BayesNetwork",
    "CONTEXT_NODES",
    "CptTooLarge",
    "CycleDetected",
    "Evidence",
    "FactorAttribution",
    "InvalidEvidence",
    "NetworkSpec",
    "NetworkSpecError",
    "Node",
    "Observation",
    "Preference",
    "StateCollision",
    "UnknownNode",
    "UnknownPreferenceDimension",
    "build_network",
    "default_network",
    "default_network_spec",
    "discretize_context",
    "elicit_priors",
    "elicit_profile_priors",
    "profile_preferences",
    "infer_acceptance",
    "pickup_eta_minutes",
    "posterior_marginal",
    "record_observation",
    "top_factors",
    "validate_evidence",
]
