"""Accuracy of cooperative, cascade, device-centric and server-centric inference."""

from .accuracy import (
    DeviceOutcome,
    OutcomeTable,
    ServerOutcome,
    ThresholdSet,
    accuracy_cascade,
    accuracy_cooperative,
    accuracy_device_centric,
    accuracy_server_centric,
    device_outcomes,
    offload_profile,
    outcome_table,
    per_device_accuracy,
    positive_prob,
    server_outcomes,
    server_table,
    uncertain_prob,
)

__all__ = [
    "DeviceOutcome",
    "OutcomeTable",
    "ServerOutcome",
    "ThresholdSet",
    "accuracy_cascade",
    "accuracy_cooperative",
    "accuracy_device_centric",
    "accuracy_server_centric",
    "device_outcomes",
    "offload_profile",
    "outcome_table",
    "per_device_accuracy",
    "positive_prob",
    "server_outcomes",
    "server_table",
    "uncertain_prob",
]
