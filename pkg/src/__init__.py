"""
Scalability modeling toolkit: USL, Amdahl and Gustafson models, the
machine-repairman queue behind them, simulation and regression.
"""

__version__ = "0.1.0"
