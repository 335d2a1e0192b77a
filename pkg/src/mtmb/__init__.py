"""Multi-task multi-behavior MAP-Elites with baselines and a replication harness."""

__version__ = "0.1.0"
