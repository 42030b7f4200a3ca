"""
Data Agent for the scalability toolkit.
Responsible for reading benchmark data files.
"""
import os

from src.agents.base_agent import BaseAgent
from src.utils.datafile import DataFileParser


class DataAgent(BaseAgent):
    """
    Agent responsible for benchmark data ingestion.

    Parsed files are cached by path and modification time.
    """

    def __init__(self, config=None):
        """
        Initialize the DataAgent.

        Args:
            config: Configuration object
        """
        super().__init__("Data", config)
        self.cache = {}
        self.cache_enabled = self.config_section("settings").get("enable_cache", True)
        self.log("INFO", f"DataAgent initialized with cache {'enabled' if self.cache_enabled else 'disabled'}")

    def process(self, message):
        """
        Process data-related requests.

        Supported message types:
        - load_samples: Parse a CSV file of (p, throughput) rows
        - clear_cache: Clear the parsed-file cache

        Args:
            message (dict): Request message

        Returns:
            dict: Response with samples or error
        """
        msg_type = message.get("type")

        if msg_type == "load_samples":
            return self.load_samples(message.get("path"))
        elif msg_type == "clear_cache":
            return self.clear_cache()
        else:
            return self.unknown_type(msg_type)

    def load_samples(self, path):
        """
        Load throughput samples from a CSV file.

        Args:
            path: Path of the data file

        Returns:
            dict: {"status": "success", "samples": [...]} or an error response
        """
        try:
            key = (os.path.abspath(path), os.path.getmtime(path))
            if self.cache_enabled and key in self.cache:
                self.log("INFO", f"Cache hit for {path}")
                return {"status": "success", "samples": self.cache[key]}

            self.log("INFO", f"Loading samples from {path}")
            samples = DataFileParser.parse_file(path)
        except Exception as e:
            return self.error_response(e)

        if self.cache_enabled:
            self.cache[key] = samples
        return {"status": "success", "samples": samples}

    def clear_cache(self):
        """
        Clear the data cache.

        Returns:
            dict: Status message
        """
        size = len(self.cache)
        self.cache = {}
        self.log("INFO", f"Cache cleared ({size} entries)")
        return {"status": "success", "message": f"Cache cleared ({size} entries)"}
