"""Dataflow execution model: atomic firings over FIFO buffers."""
from .classify import (ActorClass, RateSignature, classify_actor, rate_vector, rates_consistent,
                       simulate_rates)
from .metrics import cumulative_flows, value_flows, victim_loss
from .runtime import (ActorInstance, Buffer, FiringRecord, FirstFireable, Network, RoundRobin,
                      Trace, can_fire, evaluate_action, fire, run_until_quiescent, step_network)
from .tokens import CallToken, TransferToken

__all__ = [
    "ActorClass", "RateSignature", "classify_actor", "rate_vector", "rates_consistent",
    "simulate_rates", "cumulative_flows", "value_flows", "victim_loss", "ActorInstance",
    "Buffer", "FiringRecord", "FirstFireable", "Network", "RoundRobin", "Trace", "can_fire",
    "evaluate_action", "fire", "run_until_quiescent", "step_network", "CallToken",
    "TransferToken",
]
