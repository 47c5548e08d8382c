"""
Error hierarchy shared by services, the CLI and the HTTP layer
"""
from typing import Optional


class StratmonError(Exception):
    """Base class for every error raised by the toolkit"""


class InputError(StratmonError, ValueError):
    """User-supplied data is malformed or inconsistent"""


class FormulaSyntaxError(InputError):
    """Formula text could not be parsed"""

    def __init__(self, message: str, position: int, text: Optional[str] = None):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class ProtocolError(InputError):
    """A joint action is not enabled at the state it is played from"""

    def __init__(self, message: str, agent: Optional[str] = None):
        self.agent = agent
        super().__init__(message)


class ModelValidationError(InputError):
    """A model violates the structural conditions of a game structure"""

    def __init__(self, report):
        self.report = report
        preview = "; ".join(str(v) for v in report.violations[:3])
        more = f" (+{len(report.violations) - 3} more)" if len(report.violations) > 3 else ""
        super().__init__(f"Invalid model: {preview}{more}")


class FragmentError(StratmonError):
    """Formula lies outside the fragment an operation handles"""


class OracleScaleError(StratmonError):
    """Model exceeds the size bounds of the brute-force oracle"""


class GenerationError(StratmonError):
    """Random model generation could not satisfy its configuration"""


class SoundnessError(StratmonError, RuntimeError):
    """Two sound verdicts contradict each other: an internal defect"""
