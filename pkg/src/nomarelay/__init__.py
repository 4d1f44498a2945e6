"""nomarelay: multi-hop NOMA relay networks with Bernoulli energy harvesting.

Monte Carlo simulator and closed-form analytical evaluator for the outage,
throughput and energy-efficiency performance of wireless-powered mMTC relay
chains, cross-validated against each other.
"""

__version__ = "0.1.0"
