"""Drive the HTTP service end to end: generate, optimize, stream, resume."""

import json
import tempfile
import threading
import urllib.request

from layoutopt.server import LayoutServer


def post(url, body):
    req = urllib.request.Request(
        url, data=json.dumps(body).encode(), headers={"Content-Type": "application/json"}
    )
    with urllib.request.urlopen(req) as resp:
        return json.load(resp)


def post_stream(url, body):
    req = urllib.request.Request(
        url, data=json.dumps(body).encode(), headers={"Content-Type": "application/json"}
    )
    with urllib.request.urlopen(req) as resp:
        return [json.loads(line) for line in resp if line.strip()]


with tempfile.TemporaryDirectory() as workspace:
    server = LayoutServer(("127.0.0.1", 0), workspace)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    base = f"http://127.0.0.1:{server.server_address[1]}"

    with urllib.request.urlopen(base + "/api/health") as resp:
        print("health:", json.load(resp))

    gen = post(base + "/api/generate", {"model": "analytic:3:5", "labels": [0, 1, 2], "seed": 7})
    print("generated", len(gen["layout"]["elements"]), "elements")

    request = {
        "model": "analytic:3:5",
        "labels": [0, 1, 2],
        "constraints": [
            {"kind": "loc-above", "subject": 0, "object": 1},
            {"kind": "canvas-region", "subject": 2, "region": "bottom"},
        ],
        "options": {"seed": 7, "inner": {"method": "cma-es", "iters": 80}},
    }
    result = post(base + "/api/optimize", request)
    final = result["report"]["final"]
    print(f"optimize run {result['run_id']}: satisfied={final['satisfied']}")

    lines = post_stream(base + "/api/optimize", {**request, "stream": True})
    kinds = [line["type"] for line in lines]
    print(f"streamed {kinds.count('snapshot')} snapshots + final;",
          "reports agree:", lines[-1]["report"] == result["report"])

    resumed = post(base + f"/api/runs/{result['run_id']}/resume", {
        "constraints": [{"kind": "size-larger", "subject": 1, "object": 2}],
    })
    print(f"resumed as {resumed['run_id']}: "
          f"satisfied={resumed['report']['final']['satisfied']}")

    with urllib.request.urlopen(base + "/api/runs") as resp:
        print("runs stored:", len(json.load(resp)["runs"]))

    server.shutdown()
    server.server_close()
