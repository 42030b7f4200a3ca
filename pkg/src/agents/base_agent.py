"""
Base agent class for the scalability toolkit.
All specialized agents will inherit from this class.
"""
from abc import ABC, abstractmethod
import logging

from src.tools.errors import ScalabilityError


class BaseAgent(ABC):
    """
    Abstract base class for all toolkit agents.

    Agents receive request messages (dicts with a "type" key) and answer
    with dicts whose "status" is "success" or "error".
    """

    def __init__(self, name, config=None):
        """
        Initialize the base agent.

        Args:
            name: Agent name
            config: Configuration object
        """
        self.name = name
        self.config = config
        self.logger = logging.getLogger(f"agent.{name.lower()}")

    @abstractmethod
    def process(self, message):
        """
        Process a message.

        Args:
            message: Message to process

        Returns:
            Processing result
        """
        pass

    def config_section(self, section):
        """Return a configuration section as a dict, whatever form the config takes."""
        if hasattr(self.config, section):
            return getattr(self.config, section) or {}
        if isinstance(self.config, dict):
            return self.config.get(section, {})
        return {}

    def unknown_type(self, msg_type):
        self.log("WARNING", f"Unknown message type: {msg_type}")
        return {"status": "error", "error_type": "usage_error", "message": f"Unknown message type: {msg_type}"}

    def error_response(self, error):
        """
        Convert an exception into an error message.

        Args:
            error: The exception raised while handling a request

        Returns:
            dict: Error response carrying the error type
        """
        if isinstance(error, ScalabilityError):
            error_type = error.error_type
        elif isinstance(error, FileNotFoundError):
            error_type = "file_not_found"
        else:
            error_type = "internal_error"
        self.log("ERROR", f"{error_type}: {error}")
        return {"status": "error", "error_type": error_type, "message": str(error)}

    def log(self, level, message):
        """
        Log a message with standard formatting.

        Args:
            level: Log level (debug, info, warning, error, critical)
            message: Message to log
        """
        # Normalize the log level to lowercase
        level = level.lower()

        if level == "debug":
            self.logger.debug(f"[{self.name}] {message}")
        elif level == "info":
            self.logger.info(f"[{self.name}] {message}")
        elif level == "warning":
            self.logger.warning(f"[{self.name}] {message}")
        elif level == "error":
            self.logger.error(f"[{self.name}] {message}")
        elif level == "critical":
            self.logger.critical(f"[{self.name}] {message}")
        else:
            # Default to info
            self.logger.info(f"[{self.name}] {message} (unknown level: {level})")
