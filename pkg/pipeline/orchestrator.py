# pipeline/orchestrator.py

import logging
import sys
import time
from functools import wraps
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from matcore.errors import ConvergenceError, InvalidInputError
from matcore.verification import BoundCheck, report_from_checks
from pipeline.command_registry import REMEASURE, CommandOutcome, CommandRegistry
from pipeline.run_config import RunConfig
from pipeline.schemas import validate_input
from pipeline.serialization import dump_document, normalize, read_input, write_output

logger = logging.getLogger("pipeline")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2


# ============================================================
# GLOBAL FAIL FAST
# ============================================================

def fail_fast(stage_name):
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            try:
                logger.info(f"[START] {stage_name}")
                start = time.time()

                result = func(*args, **kwargs)

                duration = time.time() - start
                logger.info(f"[END] {stage_name} | {duration:.2f}s")
                return result

            except Exception as e:
                logger.error(f"[HALT] {stage_name} failed: {str(e)}")
                raise
        return wrapper
    return decorator


def configure_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """stdout carries the JSON document, so logs go to a file or stderr."""
    fmt = "%(asctime)s | %(levelname)s | %(message)s"

    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        logging.basicConfig(filename=log_file, level=level, format=fmt, force=True)
    else:
        logging.basicConfig(stream=sys.stderr, level=level, format=fmt, force=True)


def error_document(e: Exception, path: str = "$") -> Dict[str, Any]:
    return {"error": str(e), "path": getattr(e, "path", path)}


# ============================================================
# VERIFY
# ============================================================

def run_verify(doc: Dict[str, Any], config: RunConfig) -> CommandOutcome:
    """
    Re-derive a stored output document: rerun its command on its own input
    and config, require the identical result and report, then re-measure the
    stored factors independently of the rerun.
    """
    command = doc["command"]
    replay = RunConfig(command=command, **doc["config"])
    rerun, code = run(replay, doc["input"])

    identical = (
        code != EXIT_INVALID
        and normalize(rerun.get("result")) == doc["result"]
        and normalize(rerun.get("report")) == doc["report"]
    )
    checks = [
        BoundCheck("rerun_identical", 0.0, 0.0 if identical else 1.0, 0.0),
        BoundCheck("stored_passed", 0.0, 0.0 if doc["passed"] else 1.0, 0.0),
    ]
    report = report_from_checks(checks)

    remeasure = REMEASURE.get(command)
    if remeasure is not None:
        try:
            measured = remeasure(doc)
        except InvalidInputError:
            raise
        except KeyError as e:
            raise InvalidInputError(f"stored document lacks {e}", "$.result") from e
        except (IndexError, TypeError, ValueError) as e:
            raise InvalidInputError(f"stored document is malformed: {e}", "$.result") from e
        report = report_from_checks(
            checks,
            residual_norm=measured.residual_norm,
            commutator_count=measured.commutator_count,
        ).merge(measured, "remeasure.")

    if not identical:
        logger.warning(f"[VERIFY] rerun of '{command}' differs from the stored document")

    return CommandOutcome({"verified_command": command}, report)


# ============================================================
# DISPATCH
# ============================================================

def _handler(command: str):
    registry = CommandRegistry()
    registry.register("verify", run_verify)
    return fail_fast(command)(registry.get(command))


def run(config: RunConfig, doc: Any) -> Tuple[Dict[str, Any], int]:
    try:
        validate_input(config.command, doc)
        outcome = _handler(config.command)(doc, config)
    except InvalidInputError as e:
        return error_document(e), EXIT_INVALID
    except ConvergenceError as e:
        return error_document(e), EXIT_FAILED

    output = {
        "command": config.command,
        "input": doc,
        "config": config.replay_fields(),
        "result": outcome.result,
        "report": outcome.report.to_dict(),
        "passed": outcome.report.passed,
    }

    if not outcome.report.passed:
        logger.warning(f"[REPORT] {config.command}: failed checks {outcome.report.failures}")

    return output, EXIT_OK if outcome.report.passed else EXIT_FAILED


def execute(config: RunConfig) -> int:
    try:
        doc = read_input(config.input_path)
    except InvalidInputError as e:
        output, code = error_document(e), EXIT_INVALID
    else:
        output, code = run(config, doc)

    write_output(dump_document(output), config.output_path)
    return code
