#!/usr/bin/env python3
"""Loopback SPARQL endpoint for end-to-end checks.

Answers SPARQL protocol POSTs by shelling out to the sprefql binary in
base-only mode over a Turtle file, so the remote code path can be driven
against a process boundary and a real socket without an external engine.

Usage: stub_endpoint.py <port> <data.ttl> [binary]
"""

import subprocess
import sys
from http.server import BaseHTTPRequestHandler, HTTPServer
from urllib.parse import parse_qs

PORT = int(sys.argv[1])
DATA = sys.argv[2]
BINARY = sys.argv[3] if len(sys.argv) > 3 else "target/debug/sprefql"


class Handler(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        body = self.rfile.read(length).decode("utf-8")
        if "application/sparql-query" in self.headers.get("Content-Type", ""):
            query = body
        else:
            query = parse_qs(body).get("query", [""])[0]
        proc = subprocess.run(
            [BINARY, "--query", "-", "--data", DATA,
             "--strategy", "base-only", "--format", "json"],
            input=query, capture_output=True, text=True,
        )
        if proc.returncode == 0:
            payload = proc.stdout.encode("utf-8")
            self.send_response(200)
            self.send_header("Content-Type", "application/sparql-results+json")
        else:
            payload = proc.stderr.encode("utf-8")
            self.send_response(400)
            self.send_header("Content-Type", "text/plain")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


HTTPServer(("127.0.0.1", PORT), Handler).serve_forever()
