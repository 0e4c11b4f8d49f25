"""Operation Trace Logger - start/end tracing for long-running constructions."""

import json
import logging
import time
from datetime import datetime
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Dict, Optional

logger = logging.getLogger(__name__)


class OperationTraceLogger:
    """Logger for tracing construction operations and their outcomes."""

    def __init__(
        self,
        log_dir: Optional[str] = None,
        enable_file_logging: bool = False,
        enable_console_logging: bool = True,
        log_level: str = "WARNING",
    ):
        """
        Initialize the operation trace logger.

        Args:
            log_dir: Directory for trace files. Defaults to ./logs/traces
            enable_file_logging: Whether to write JSON trace files
            enable_console_logging: Whether to log to the console (stderr)
            log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        """
        self.enable_file_logging = enable_file_logging
        self.enable_console_logging = enable_console_logging
        self.log_dir = Path(log_dir) if log_dir else Path("./logs/traces")

        if self.enable_file_logging:
            self.log_dir.mkdir(parents=True, exist_ok=True)

        self.logger = logging.getLogger("operation_trace")
        self.logger.setLevel(getattr(logging, log_level.upper(), logging.WARNING))

        # Prevent duplicate handlers
        if not self.logger.handlers and enable_console_logging:
            console_handler = logging.StreamHandler()
            console_handler.setFormatter(
                logging.Formatter(
                    "%(asctime)s - [TRACE] - %(levelname)s - %(message)s",
                    datefmt="%Y-%m-%d %H:%M:%S",
                )
            )
            self.logger.addHandler(console_handler)
            self.logger.propagate = False

        self._trace_counter = 0

    def _get_trace_id(self) -> str:
        self._trace_counter += 1
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        return f"{timestamp}_{self._trace_counter:04d}"

    def _write(self, name: str, data: Dict[str, Any]) -> None:
        with open(self.log_dir / name, "w") as f:
            json.dump(data, f, indent=2, default=str)

    def log_operation_start(
        self, operation: str, context: Optional[Dict[str, Any]] = None
    ) -> str:
        """
        Log the start of an operation.

        Returns:
            operation_id for correlating with the end record
        """
        operation_id = self._get_trace_id()

        if self.enable_console_logging:
            self.logger.info(f"OPERATION START - {operation} ({operation_id})")
            if context:
                self.logger.debug(f"Context: {json.dumps(context, default=str)}")

        if self.enable_file_logging:
            self._write(
                f"operation_{operation_id}_start.json",
                {
                    "operation_id": operation_id,
                    "operation": operation,
                    "timestamp": datetime.now().isoformat(),
                    "context": context,
                },
            )
        return operation_id

    def log_operation_end(
        self,
        operation_id: str,
        operation: str,
        success: bool = True,
        result: Optional[Any] = None,
        error: Optional[str] = None,
        execution_time: Optional[float] = None,
    ) -> None:
        """Log the end of an operation with its outcome."""
        if self.enable_console_logging:
            status = "COMPLETED" if success else "FAILED"
            elapsed = f" in {execution_time:.3f}s" if execution_time is not None else ""
            self.logger.info(f"OPERATION END - {operation} - {status}{elapsed} ({operation_id})")
            if error:
                self.logger.error(f"Error: {error}")

        if self.enable_file_logging:
            self._write(
                f"operation_{operation_id}_end.json",
                {
                    "operation_id": operation_id,
                    "operation": operation,
                    "timestamp": datetime.now().isoformat(),
                    "success": success,
                    "result": str(result) if result else None,
                    "error": error,
                    "execution_time_seconds": execution_time,
                },
            )


# Global trace logger instance
_trace_logger: Optional[OperationTraceLogger] = None


def configure_trace_logger(
    log_dir: Optional[str] = None,
    enable_file_logging: bool = False,
    enable_console_logging: bool = True,
    log_level: str = "WARNING",
) -> OperationTraceLogger:
    """Replace the global trace logger."""
    global _trace_logger
    _trace_logger = OperationTraceLogger(
        log_dir=log_dir,
        enable_file_logging=enable_file_logging,
        enable_console_logging=enable_console_logging,
        log_level=log_level,
    )
    return _trace_logger


def get_trace_logger() -> OperationTraceLogger:
    """Get the global trace logger, with default switches until one is configured."""
    if _trace_logger is None:
        return configure_trace_logger()
    return _trace_logger


def reset_trace_logger() -> None:
    """Drop the global instance so the next call starts from the defaults."""
    global _trace_logger
    _trace_logger = None


def trace_operation(operation_name: Optional[str] = None):
    """
    Decorator tracing a service operation.

    Usage:
        @trace_operation("build_towers")
        def build_towers(self, T, A, depth):
            ...
    """

    def decorator(func: Callable) -> Callable:
        op_name = operation_name or func.__name__

        @wraps(func)
        def wrapper(*args, **kwargs):
            trace_logger = get_trace_logger()
            start_time = time.perf_counter()

            if args and hasattr(args[0], "__class__"):
                context = {"class": args[0].__class__.__name__, "method": func.__name__}
            else:
                context = {"function": func.__name__}

            trace_id = trace_logger.log_operation_start(op_name, context)
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                trace_logger.log_operation_end(
                    trace_id,
                    op_name,
                    success=False,
                    error=str(e),
                    execution_time=time.perf_counter() - start_time,
                )
                raise
            trace_logger.log_operation_end(
                trace_id,
                op_name,
                success=True,
                result=type(result).__name__,
                execution_time=time.perf_counter() - start_time,
            )
            return result

        return wrapper

    return decorator
