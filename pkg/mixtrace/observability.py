"""Structured request logging and in-process metrics for the mixtrace service."""
import logging
import threading
import time
import uuid
from collections import defaultdict

from starlette.middleware.base import BaseHTTPMiddleware
from starlette.requests import Request
from starlette.responses import Response

_LOG = logging.getLogger(__name__)

# In-process counters for /v1/metrics (reset on restart).
_request_total: dict[str, int] = defaultdict(int)
_request_duration_sec: list[float] = []
_suite_runs: dict[tuple[str, str], int] = defaultdict(int)
_suite_duration_sec: dict[str, float] = {}
_lock = threading.Lock()
_start_time = time.time()
_MAX_DURATION_SAMPLES = 1000


_PROBE_PATHS = frozenset({"/v1/health", "/v1/metrics"})
_VERIFY_PREFIX = "/v1/verify/"


class RequestLoggingMiddleware(BaseHTTPMiddleware):
    """Tag each request with an id, count it and log one structured line when it finishes.

    Probe endpoints log at DEBUG; verify routes carry the suite name.
    """

    async def dispatch(self, request: Request, call_next) -> Response:
        request_id = request.headers.get("x-request-id") or uuid.uuid4().hex
        request.state.request_id = request_id
        route = request.url.path
        began = time.perf_counter()
        response = await call_next(request)
        elapsed = time.perf_counter() - began
        with _lock:
            _request_total[f"{request.method} {route}"] += 1
            _request_total["_total"] += 1
            _request_duration_sec.append(elapsed)
            del _request_duration_sec[:-_MAX_DURATION_SAMPLES]
        context = {
            "request_id": request_id,
            "method": request.method,
            "path": route,
            "status": response.status_code,
            "duration_ms": round(elapsed * 1000, 2),
        }
        if route.startswith(_VERIFY_PREFIX):
            context["suite"] = route[len(_VERIFY_PREFIX):].split("/", 1)[0]
        level = logging.DEBUG if route in _PROBE_PATHS else logging.INFO
        _LOG.log(level, "request finished", extra=context)
        response.headers["X-Request-ID"] = request_id
        return response


def record_suite_run(suite: str, passed: bool, seconds: float) -> None:
    """Count a finished suite run and keep its latest wall time."""
    with _lock:
        _suite_runs[(suite, "pass" if passed else "fail")] += 1
        _suite_duration_sec[suite] = seconds


def reset_metrics() -> None:
    with _lock:
        _request_total.clear()
        _request_duration_sec.clear()
        _suite_runs.clear()
        _suite_duration_sec.clear()


def get_metrics_text() -> str:
    """Prometheus-style text for GET /v1/metrics."""
    uptime = time.time() - _start_time
    lines = [
        "# HELP mixtrace_uptime_seconds Process uptime in seconds.",
        "# TYPE mixtrace_uptime_seconds gauge",
        f"mixtrace_uptime_seconds {uptime:.2f}",
        "# HELP mixtrace_http_requests_total Total HTTP requests by method and path.",
        "# TYPE mixtrace_http_requests_total counter",
    ]
    with _lock:
        requests = sorted(_request_total.items())
        durations = list(_request_duration_sec)
        runs = sorted(_suite_runs.items())
        suite_seconds = sorted(_suite_duration_sec.items())
    for key, count in requests:
        if key == "_total":
            lines.append(f'mixtrace_http_requests_total{{aggregate="all"}} {count}')
        else:
            parts = key.split(" ", 1)
            method, path = (parts[0], parts[1]) if len(parts) == 2 else (key, "")
            path = path.replace('"', r"\"")
            lines.append(f'mixtrace_http_requests_total{{method="{method}",path="{path}"}} {count}')
    if durations:
        avg = sum(durations) / len(durations)
        lines.extend([
            "# HELP mixtrace_http_request_duration_seconds Recent request duration (avg).",
            "# TYPE mixtrace_http_request_duration_seconds gauge",
            f"mixtrace_http_request_duration_seconds {avg:.4f}",
        ])
    if runs:
        lines.extend([
            "# HELP mixtrace_suite_runs_total Finished verification suite runs by outcome.",
            "# TYPE mixtrace_suite_runs_total counter",
        ])
        lines.extend(f'mixtrace_suite_runs_total{{suite="{suite}",outcome="{outcome}"}} {count}' for (suite, outcome), count in runs)
    if suite_seconds:
        lines.extend([
            "# HELP mixtrace_suite_duration_seconds Wall time of the latest run of each suite.",
            "# TYPE mixtrace_suite_duration_seconds gauge",
        ])
        lines.extend(f'mixtrace_suite_duration_seconds{{suite="{suite}"}} {sec:.4f}' for suite, sec in suite_seconds)
    return "\n".join(lines) + "\n"
