"""Thin client for the analysis service.

The CLI talks to the service through this client. Without ``--server`` the
requests run against an in-process ASGI app (no daemon, no sockets), so
batch usage stays deterministic and offline; with a server URL the same
requests go over the network.
"""

from __future__ import annotations

import asyncio

import httpx


class ServiceError(RuntimeError):
    """Non-2xx response from the service."""

    def __init__(self, status_code: int, detail: str, diagnostics: list[str]):
        self.status_code = status_code
        self.detail = detail
        self.diagnostics = diagnostics
        super().__init__(detail)


class ServiceClient:
    def __init__(self, server: str | None = None, timeout: float = 300.0):
        self.server = server
        self.timeout = timeout

    def _handle(self, response: httpx.Response) -> dict:
        if response.status_code >= 400:
            try:
                payload = response.json()
            except ValueError:
                payload = {"detail": response.text}
            raise ServiceError(
                response.status_code,
                payload.get("detail", "service error"),
                payload.get("diagnostics", []),
            )
        return response.json()

    def _request(self, method: str, path: str, payload: dict | None = None) -> dict:
        if self.server is not None:
            with httpx.Client(base_url=self.server, timeout=self.timeout) as client:
                response = client.request(method, path, json=payload)
                return self._handle(response)
        return asyncio.run(self._request_inprocess(method, path, payload))

    async def _request_inprocess(self, method: str, path: str, payload: dict | None) -> dict:
        from reprograph.service.app import create_app

        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://reprograph.local", timeout=self.timeout
        ) as client:
            response = await client.request(method, path, json=payload)
            return self._handle(response)

    def health(self) -> dict:
        return self._request("GET", "/health")

    def validate(self, config: dict, records_jsonl: str, allow_missing: bool = False) -> dict:
        return self._request(
            "POST",
            "/validate",
            {"config": config, "records_jsonl": records_jsonl, "allow_missing": allow_missing},
        )

    def run(self, config: dict, records_jsonl: str, options: dict, provenance: dict) -> dict:
        return self._request(
            "POST",
            "/run",
            {
                "config": config,
                "records_jsonl": records_jsonl,
                "options": options,
                "provenance": provenance,
            },
        )

    def scores(self, config: dict, records_jsonl: str, options: dict) -> dict:
        return self._request(
            "POST",
            "/scores",
            {"config": config, "records_jsonl": records_jsonl, "options": options},
        )

    def gen(self, spec: dict) -> dict:
        return self._request("POST", "/gen", spec)

    def select(
        self,
        matrices: dict[str, dict[str, str]],
        normalize_overall: bool = False,
        config: dict | None = None,
        records_jsonl: str | None = None,
    ) -> dict:
        payload: dict = {"matrices": matrices, "normalize_overall": normalize_overall}
        if config is not None:
            payload["config"] = config
        if records_jsonl is not None:
            payload["records_jsonl"] = records_jsonl
        return self._request("POST", "/select", payload)
