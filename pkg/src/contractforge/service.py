"""HTTP surface for the registry store, plus the matching client.

Endpoints (JSON bodies, canonical contract documents):

    PUT  /contracts/{name}                          publish -> 201 {"version": N}
    GET  /contracts/{name}                          latest approved (404 if none)
    GET  /contracts/{name}/versions                 version list with statuses
    GET  /contracts/{name}/versions/{v}             one version
    POST /contracts/{name}/versions/{v}/approve     {"reviewer": ...} -> 200
    POST /contracts/{name}/versions/{v}/feedback    {"author","note"} -> 204
    POST /contracts/{name}/compat                   candidate contract -> verdict

Incompatible publishes answer 409 with the verdict reasons; malformed or
invariant-violating documents answer 400.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import requests

from .compatibility import CompatibilityVerdict
from .errors import (ContractForgeError, NotFoundError, RegistryError,
                     RegistryRejection, RegistryTransportError)
from .model import Contract, contract_from_doc
from .registry import RegistryStore

_ROUTE_LATEST = re.compile(r"/contracts/([^/]+)\Z")
_ROUTE_VERSIONS = re.compile(r"/contracts/([^/]+)/versions\Z")
_ROUTE_VERSION = re.compile(r"/contracts/([^/]+)/versions/([0-9]+)\Z")
_ROUTE_APPROVE = re.compile(r"/contracts/([^/]+)/versions/([0-9]+)/approve\Z")
_ROUTE_FEEDBACK = re.compile(r"/contracts/([^/]+)/versions/([0-9]+)/feedback\Z")
_ROUTE_COMPAT = re.compile(r"/contracts/([^/]+)/compat\Z")


def _make_handler(store: RegistryStore):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        # -- plumbing ----------------------------------------------------

        def _reply(self, status: int, doc: dict | None) -> None:
            body = b"" if doc is None else (
                json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            if body:
                self.wfile.write(body)

        def _error(self, status: int, message: str) -> None:
            self._reply(status, {"error": message})

        def _read_json(self):
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            try:
                return json.loads(raw.decode("utf-8") or "null")
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise ContractForgeError(f"request body is not valid JSON: {exc}") from exc

        # -- verbs ---------------------------------------------------------

        def do_GET(self):
            try:
                match = _ROUTE_VERSION.match(self.path)
                if match:
                    contract = store.get_version(match.group(1), int(match.group(2)))
                    self._reply(200, contract.to_doc())
                    return
                match = _ROUTE_VERSIONS.match(self.path)
                if match:
                    name = match.group(1)
                    records = store.list_versions(name)
                    self._reply(200, {
                        "name": name,
                        "compatibility_mode": store.compatibility_mode(name),
                        "versions": [r.to_doc() for r in records],
                    })
                    return
                match = _ROUTE_LATEST.match(self.path)
                if match:
                    latest = store.latest_approved(match.group(1))
                    if latest is None:
                        self._error(404, f"no approved version of {match.group(1)!r}")
                        return
                    self._reply(200, latest[1].to_doc())
                    return
                self._error(404, f"no such route: {self.path}")
            except NotFoundError as exc:
                self._error(404, str(exc))
            except ContractForgeError as exc:
                self._error(400, str(exc))

        def do_PUT(self):
            match = _ROUTE_LATEST.match(self.path)
            if not match:
                self._error(404, f"no such route: {self.path}")
                return
            try:
                contract = contract_from_doc(self._read_json())
                version = store.publish(match.group(1), contract)
                self._reply(201, {"version": version})
            except RegistryRejection as exc:
                self._reply(409, {"compatible": False, "reasons": exc.reasons})
            except ContractForgeError as exc:
                self._error(400, str(exc))

        def do_POST(self):
            try:
                match = _ROUTE_APPROVE.match(self.path)
                if match:
                    body = self._read_json() or {}
                    reviewer = body.get("reviewer")
                    if not isinstance(reviewer, str) or not reviewer:
                        self._error(400, 'body must carry a "reviewer"')
                        return
                    record = store.approve(match.group(1), int(match.group(2)), reviewer)
                    self._reply(200, record.to_doc())
                    return
                match = _ROUTE_FEEDBACK.match(self.path)
                if match:
                    body = self._read_json() or {}
                    author, note = body.get("author"), body.get("note")
                    if not isinstance(author, str) or not isinstance(note, str):
                        self._error(400, 'body must carry "author" and "note"')
                        return
                    store.record_feedback(match.group(1), int(match.group(2)), author, note)
                    self._reply(204, None)
                    return
                match = _ROUTE_COMPAT.match(self.path)
                if match:
                    contract = contract_from_doc(self._read_json())
                    verdict = store.check_candidate(match.group(1), contract)
                    self._reply(200, verdict.to_doc())
                    return
                self._error(404, f"no such route: {self.path}")
            except NotFoundError as exc:
                self._error(404, str(exc))
            except RegistryError as exc:
                self._error(409, str(exc))
            except ContractForgeError as exc:
                self._error(400, str(exc))

    return Handler


class RegistryServer:
    """Threading HTTP server wrapper; ``port=0`` binds an ephemeral port."""

    def __init__(self, store: RegistryStore, host: str = "127.0.0.1", port: int = 0):
        self._httpd = ThreadingHTTPServer((host, port), _make_handler(store))
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "RegistryServer":
        self._thread = threading.Thread(
            target=lambda: self._httpd.serve_forever(poll_interval=0.05),
            daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self._httpd.serve_forever()

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)


class RegistryClient:
    """Thin requests-based client speaking the registry wire format."""

    def __init__(self, base_url: str, timeout: float = 10.0):
        self._base = base_url.rstrip("/")
        self._timeout = timeout

    def _request(self, method: str, path: str, body: dict | None = None):
        try:
            response = requests.request(method, self._base + path, json=body,
                                        timeout=self._timeout)
        except requests.RequestException as exc:
            raise RegistryTransportError(f"registry unreachable: {exc}") from exc
        return response

    @staticmethod
    def _json(response) -> dict:
        try:
            return response.json()
        except ValueError:
            return {}

    def _raise_for(self, response) -> None:
        doc = self._json(response)
        message = doc.get("error", response.text[:200])
        if response.status_code == 404:
            raise NotFoundError(message)
        raise RegistryError(f"registry answered {response.status_code}: {message}")

    def publish(self, name: str, contract: Contract) -> int:
        response = self._request("PUT", f"/contracts/{name}", contract.to_doc())
        if response.status_code == 201:
            return int(self._json(response)["version"])
        if response.status_code == 409:
            raise RegistryRejection(self._json(response).get("reasons", []))
        self._raise_for(response)
        raise AssertionError("unreachable")

    def get_latest(self, name: str) -> Contract:
        response = self._request("GET", f"/contracts/{name}")
        if response.status_code == 200:
            return contract_from_doc(self._json(response))
        self._raise_for(response)
        raise AssertionError("unreachable")

    def get_version(self, name: str, version: int) -> Contract:
        response = self._request("GET", f"/contracts/{name}/versions/{version}")
        if response.status_code == 200:
            return contract_from_doc(self._json(response))
        self._raise_for(response)
        raise AssertionError("unreachable")

    def list_versions(self, name: str) -> dict:
        response = self._request("GET", f"/contracts/{name}/versions")
        if response.status_code == 200:
            return self._json(response)
        self._raise_for(response)
        raise AssertionError("unreachable")

    def approve(self, name: str, version: int, reviewer: str) -> dict:
        response = self._request("POST", f"/contracts/{name}/versions/{version}/approve",
                                 {"reviewer": reviewer})
        if response.status_code == 200:
            return self._json(response)
        self._raise_for(response)
        raise AssertionError("unreachable")

    def feedback(self, name: str, version: int, author: str, note: str) -> None:
        response = self._request("POST", f"/contracts/{name}/versions/{version}/feedback",
                                 {"author": author, "note": note})
        if response.status_code != 204:
            self._raise_for(response)

    def check_compat(self, name: str, contract: Contract) -> CompatibilityVerdict:
        response = self._request("POST", f"/contracts/{name}/compat", contract.to_doc())
        if response.status_code == 200:
            doc = self._json(response)
            return CompatibilityVerdict(compatible=bool(doc.get("compatible")),
                                        reasons=list(doc.get("reasons", [])))
        self._raise_for(response)
        raise AssertionError("unreachable")
