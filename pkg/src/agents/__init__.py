"""
Agents of the scalability toolkit.
Each agent handles one concern and answers request messages with status dicts.
"""

from src.agents.base_agent import BaseAgent
from src.agents.data_agent import DataAgent
from src.agents.fit_agent import FitAgent
from src.agents.queueing_agent import QueueingAgent
from src.agents.simulation_agent import SimulationAgent
from src.agents.verification_agent import VerificationAgent
from src.agents.orchestrator_agent import OrchestratorAgent

__all__ = [
    'BaseAgent',
    'DataAgent',
    'FitAgent',
    'QueueingAgent',
    'SimulationAgent',
    'VerificationAgent',
    'OrchestratorAgent'
]
