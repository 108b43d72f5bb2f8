"""유틸리티 모듈"""

from .error_handler import ErrorHandler
from .output_writer import OutputWriter, format_float, to_jsonable

__all__ = ["ErrorHandler", "OutputWriter", "format_float", "to_jsonable"]
