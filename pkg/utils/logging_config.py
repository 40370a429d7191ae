"""Logging configuration for the index theory workbench."""

import logging
import sys
from datetime import datetime
from pathlib import Path
from colorama import init, Fore, Style

from config import LOG_FORMAT

# Initialize colorama for cross-platform colored output
init()

class ColoredFormatter(logging.Formatter):
    """Custom formatter that adds colors to log levels and components."""

    COLORS = {
        'DEBUG': Fore.CYAN,
        'INFO': Fore.GREEN,
        'WARNING': Fore.YELLOW,
        'ERROR': Fore.RED,
        'CRITICAL': Fore.MAGENTA
    }

    COMPONENT_COLORS = {
        'orchestrator': Fore.MAGENTA,
        'verifiers': Fore.BLUE,
        'planner': Fore.CYAN,
        'aps': Fore.GREEN,
        'spectral': Fore.YELLOW,
        'clifford': Fore.WHITE,
    }

    def format(self, record):
        # Work on a copy so file handlers see plain names
        record = logging.makeLogRecord(record.__dict__)

        levelname = record.levelname
        if levelname in self.COLORS:
            record.levelname = f"{self.COLORS[levelname]}{levelname}{Style.RESET_ALL}"

        logger_name = record.name
        for component, color in self.COMPONENT_COLORS.items():
            if component in logger_name:
                record.name = f"{color}{logger_name}{Style.RESET_ALL}"
                break

        return super().format(record)

def setup_logging(log_level: str = "INFO", log_to_file: bool = False):
    """Set up logging configuration for the workbench."""

    logger = logging.getLogger()
    logger.setLevel(getattr(logging, log_level.upper()))

    # Clear existing handlers
    logger.handlers.clear()

    # Console handler with colors; stderr keeps stdout free for reports
    console_handler = logging.StreamHandler(sys.stderr)
    console_formatter = ColoredFormatter(
        fmt='%(asctime)s | %(name)-24s | %(levelname)-8s | %(message)s',
        datefmt='%H:%M:%S'
    )
    console_handler.setFormatter(console_formatter)
    console_handler.setLevel(getattr(logging, log_level.upper()))
    logger.addHandler(console_handler)

    if log_to_file:
        logs_dir = Path("logs")
        logs_dir.mkdir(exist_ok=True)
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        file_handler = logging.FileHandler(
            logs_dir / f"workbench_{timestamp}.log",
            encoding='utf-8'
        )
        file_formatter = logging.Formatter(fmt=LOG_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")
        file_handler.setFormatter(file_formatter)
        file_handler.setLevel(logging.DEBUG)
        logger.addHandler(file_handler)

    # Third-party chatter
    logging.getLogger("asyncio").setLevel(logging.WARNING)

    # Per-step numeric loggers only speak when DEBUG was asked for
    if logger.level > logging.DEBUG:
        for name in ("numeric", "spectral.transport", "aps.solver"):
            logging.getLogger(name).setLevel(logging.WARNING)

    logger.debug(f"Logging configured - Level: {log_level}, File logging: {log_to_file}")