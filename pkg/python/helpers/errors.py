import asyncio
import traceback


class CertifierError(Exception):
    """Base class for every error the certifier raises on purpose."""


class ParameterError(CertifierError):
    pass


class RingMismatchError(CertifierError):
    pass


class NonUnitDivisionError(CertifierError):
    pass


class NonIntegralBernoulliError(CertifierError):
    pass


class PrecisionExhaustedError(CertifierError):
    def __init__(self, message: str, stage: str = ""):
        super().__init__(message)
        self.stage = stage


class NotFiniteError(CertifierError):
    pass


class SchemaError(CertifierError):
    pass


class CacheCorruptionError(CertifierError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"corrupt certificate {path}: {reason}")
        self.path = path


def handle_error(e: Exception):
    # cancellation must propagate
    if isinstance(e, asyncio.CancelledError):
        raise e


def error_text(e: Exception):
    if isinstance(e, CertifierError):
        return f"{type(e).__name__}: {e}"
    return str(e)


def format_error(e: Exception, start_entries=6, end_entries=4):
    """Traceback of `e` with the middle frames dropped, ending in the exception line."""
    frames = traceback.extract_tb(e.__traceback__)
    skipped = len(frames) - start_entries - end_entries
    lines = ["Traceback (most recent call last):\n"]
    if skipped > 0:
        lines += traceback.format_list(frames[:start_entries])
        lines.append(f"\n>>>  {skipped} stack lines skipped <<<\n\n")
        lines += traceback.format_list(frames[-end_entries:])
    else:
        lines += traceback.format_list(frames)
    lines += traceback.format_exception_only(type(e), e)
    return "".join(lines).rstrip()
