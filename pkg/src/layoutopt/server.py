"""HTTP service exposing generation, constrained optimization, and runs.

Endpoints (JSON request/response bodies):

    GET  /api/health
    GET  /api/models
    POST /api/generate            {model, labels, seed}
    POST /api/optimize            {model, labels, z?, constraints?, options?, stream?}
    GET  /api/runs
    GET  /api/runs/{id}
    POST /api/runs/{id}/resume    {constraints?, options?, stream?}

With stream=true, /api/optimize and resume reply with newline-delimited
JSON: one snapshot object per outer iteration, then a final line carrying
the run id and the complete report. The final report is identical to the
non-streaming response for the same request.

Solves run on the handler thread; the threading server keeps health and
listing endpoints responsive while a solve is in flight.
"""

from __future__ import annotations

import json
import re
import traceback
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .core import ParseError, ValidationError
from .runstore import RunRecord, RunStore, UnknownRunError, WorkspaceConflictError, new_run_id, utc_now
from .service import generate_layout, list_models, parse_labels, resolve_model, run_optimize

MAX_BODY_BYTES = 16 * 1024 * 1024

_RUN_PATH = re.compile(r"^/api/runs/([^/]+)$")
_RESUME_PATH = re.compile(r"^/api/runs/([^/]+)/resume$")


class ApiError(Exception):
    def __init__(self, status: int, message: str, field: str | None = None):
        super().__init__(message)
        self.status = status
        self.message = message
        self.field = field


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True) + "\n").encode("utf-8")


class LayoutApiHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "layoutopt"

    # quiet by default; the server object can install a logger
    def log_message(self, format, *args):
        if getattr(self.server, "verbose", False):
            super().log_message(format, *args)

    @property
    def store(self) -> RunStore:
        return self.server.store

    @property
    def workspace(self) -> str:
        return self.server.workspace

    def do_GET(self):
        try:
            if self.path == "/api/health":
                self._send_json(200, {"status": "ok"})
            elif self.path == "/api/models":
                self._send_json(200, {"models": list_models(self.workspace)})
            elif self.path == "/api/runs":
                self._send_json(200, {"runs": self.store.list_runs()})
            elif m := _RUN_PATH.match(self.path):
                self._send_json(200, self._load_run(m.group(1)).to_dict())
            else:
                self._send_json(404, {"error": {"message": f"no route for {self.path}"}})
        except ApiError as e:
            self._send_api_error(e)
        except Exception:
            self._send_json(500, {"error": {"message": traceback.format_exc(limit=3)}})

    def do_POST(self):
        try:
            body = self._read_body()
            if self.path == "/api/generate":
                self._handle_generate(body)
            elif self.path == "/api/optimize":
                self._handle_optimize(body)
            elif m := _RESUME_PATH.match(self.path):
                self._handle_resume(m.group(1), body)
            else:
                self._send_json(404, {"error": {"message": f"no route for {self.path}"}})
        except ApiError as e:
            self._send_api_error(e)
        except (ValidationError, ParseError) as e:
            self._send_api_error(_bad_request(e))
        except WorkspaceConflictError as e:
            self._send_json(409, {"error": {"message": str(e)}})
        except Exception:
            self._send_json(500, {"error": {"message": traceback.format_exc(limit=3)}})

    # -- handlers ---------------------------------------------------------

    def _handle_generate(self, body: dict):
        handle = self._resolve(body)
        labels = parse_labels(body.get("labels"), handle)
        seed = _int_field(body, "seed", default=0)
        layout, z = generate_layout(handle, labels, seed)
        from .core import layout_to_dict

        self._send_json(200, {"layout": layout_to_dict(layout), "z": z.tolist()})

    def _optimize_request(self, body: dict) -> dict:
        request = {
            "model": body.get("model"),
            "labels": body.get("labels"),
            "constraints": body.get("constraints", []),
            "options": body.get("options", {}),
        }
        if body.get("z") is not None:
            request["z"] = body["z"]
        return request

    def _execute_and_store(self, handle, request: dict, stream: bool):
        run_id = new_run_id()
        if stream:
            self._start_stream()

            def on_iteration(snapshot):
                self._stream_line({"type": "snapshot", **snapshot.to_dict()})

            report = run_optimize(handle, request, on_iteration=on_iteration)
            record = self._persist(run_id, request, report)
            self._stream_line({"type": "final", "run_id": run_id,
                               "report": record.report})
            self._end_stream()
        else:
            report = run_optimize(handle, request)
            record = self._persist(run_id, request, report)
            self._send_json(200, {"run_id": run_id, "report": record.report})

    def _persist(self, run_id: str, request: dict, report) -> RunRecord:
        record = RunRecord(
            run_id=run_id,
            created_at=utc_now(),
            request=request,
            report=report.to_dict(),
            model_ref={"model": request["model"]},
        )
        self.store.add(record)
        return record

    def _handle_optimize(self, body: dict):
        handle = self._resolve(body)
        request = self._optimize_request(body)
        self._execute_and_store(handle, request, stream=bool(body.get("stream", False)))

    def _handle_resume(self, run_id: str, body: dict):
        previous = self._load_run(run_id)
        request = dict(previous.request)
        extra = body.get("constraints")
        if extra is not None:
            base = request.get("constraints", [])
            base_list = base["constraints"] if isinstance(base, dict) else list(base)
            extra_list = extra["constraints"] if isinstance(extra, dict) else list(extra)
            merged = base_list + extra_list
            request["constraints"] = (
                {**base, "constraints": merged} if isinstance(base, dict) else merged
            )
        if body.get("options") is not None:
            request["options"] = body["options"]
        request["z"] = previous.report["final"]["z"]
        handle = resolve_model(request["model"], self.workspace)
        self._execute_and_store(handle, request, stream=bool(body.get("stream", False)))

    # -- plumbing ---------------------------------------------------------

    def _resolve(self, body: dict):
        return resolve_model(body.get("model"), self.workspace)

    def _load_run(self, run_id: str) -> RunRecord:
        try:
            return self.store.get(run_id)
        except UnknownRunError:
            raise ApiError(404, f"unknown run {run_id!r}") from None

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length > MAX_BODY_BYTES:
            raise ApiError(400, "request body too large")
        raw = self.rfile.read(length) if length else b"{}"
        try:
            body = json.loads(raw.decode("utf-8") or "{}")
        except (UnicodeDecodeError, json.JSONDecodeError) as e:
            raise ApiError(400, f"request body is not valid JSON: {e}") from None
        if not isinstance(body, dict):
            raise ApiError(400, "request body must be a JSON object")
        return body

    def _send_json(self, status: int, obj):
        payload = _json_bytes(obj)
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _send_api_error(self, e: ApiError):
        error = {"message": e.message}
        if e.field:
            error["field"] = e.field
        self._send_json(e.status, {"error": error})

    def _start_stream(self):
        self.send_response(200)
        self.send_header("Content-Type", "application/x-ndjson")
        self.send_header("Transfer-Encoding", "chunked")
        self.end_headers()

    def _stream_line(self, obj):
        line = _json_bytes(obj)
        self.wfile.write(f"{len(line):x}\r\n".encode("ascii") + line + b"\r\n")
        self.wfile.flush()

    def _end_stream(self):
        self.wfile.write(b"0\r\n\r\n")
        self.wfile.flush()


def _bad_request(e: Exception) -> ApiError:
    field = getattr(e, "field", None)
    return ApiError(400, str(e), field=field)


def _int_field(body: dict, name: str, default: int) -> int:
    value = body.get(name, default)
    if not isinstance(value, int) or isinstance(value, bool):
        raise ApiError(400, f"{name} must be an integer", field=name)
    return value


class LayoutServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, bind: tuple[str, int], workspace: str, verbose: bool = False):
        super().__init__(bind, LayoutApiHandler)
        self.workspace = workspace
        self.store = RunStore(workspace)
        self.verbose = verbose


def serve(workspace: str, host: str = "127.0.0.1", port: int = 8321,
          verbose: bool = True) -> None:
    server = LayoutServer((host, port), workspace, verbose=verbose)
    print(f"serving on http://{host}:{server.server_address[1]} (workspace: {workspace})",
          flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
