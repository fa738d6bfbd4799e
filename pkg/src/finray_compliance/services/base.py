"""
Base service class with common functionality.
"""

import logging
import time
from abc import ABC
from typing import Any, Callable, Dict, Generic, Optional, TypeVar

from pydantic import BaseModel

from ..errors import FinrayError

logger = logging.getLogger(__name__)

T = TypeVar("T")


class ServiceResult(BaseModel, Generic[T]):
    """Standard service result wrapper."""
    success: bool
    data: Optional[T] = None
    error: Optional[str] = None
    error_code: Optional[str] = None
    request_id: str = ""
    duration_ms: int = 0


class BaseService(ABC):
    """
    Base class for all services.
    Wraps domain calls so grid runs collect failures instead of aborting.
    """

    def __init__(self, name: str):
        self.name = name
        self.request_count = 0
        self.logger = logging.getLogger(f"service.{name}")

    def _generate_request_id(self) -> str:
        """Sequential request id, stable across runs."""
        self.request_count += 1
        return f"{self.name}-{self.request_count:06d}"

    def _execute(self, operation: str, handler: Callable[..., Any], **kwargs) -> ServiceResult:
        """
        Run a handler, timing it and turning toolkit errors into a failed result.

        Errors outside the toolkit hierarchy (other than numerical ValueError
        and ArithmeticError) are programming errors and propagate.
        """
        request_id = self._generate_request_id()
        start = time.perf_counter()

        self.logger.info(f"[{request_id}] Starting {operation}")

        try:
            result = handler(**kwargs)
            elapsed = int((time.perf_counter() - start) * 1000)
            self.logger.info(f"[{request_id}] Completed {operation} in {elapsed}ms")
            return ServiceResult(
                success=True, data=result, request_id=request_id, duration_ms=elapsed
            )

        except (FinrayError, ValueError, ArithmeticError) as e:
            elapsed = int((time.perf_counter() - start) * 1000)
            self.logger.error(f"[{request_id}] Failed {operation}: {e}")
            return ServiceResult(
                success=False,
                error=str(e),
                error_code=getattr(e, "error_code", "NUMERICAL_ERROR"),
                request_id=request_id,
                duration_ms=elapsed,
            )

    def get_stats(self) -> Dict[str, Any]:
        """Get service statistics."""
        return {"name": self.name, "total_requests": self.request_count}
