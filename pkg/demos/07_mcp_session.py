# A scripted MCP session, in process.
#
# The server speaks JSON-RPC 2.0 over stdio, one message per line. Here we
# drive it with StringIO streams: initialize handshake, tool discovery,
# a skill recommendation, and a unit-tagged evaluation. Running this twice
# produces byte-identical transcripts; that determinism is a regression-
# tested contract.

import io
import json

from geocard.server import serve

requests = [
    {"jsonrpc": "2.0", "id": 0, "method": "initialize",
     "params": {"protocolVersion": "2024-11-05", "capabilities": {},
                "clientInfo": {"name": "demo", "version": "0"}}},
    {"jsonrpc": "2.0", "method": "notifications/initialized"},
    {"jsonrpc": "2.0", "id": 1, "method": "tools/list"},
    {"jsonrpc": "2.0", "id": 2, "method": "tools/call",
     "params": {"name": "geo_recommend_skills",
                "arguments": {"query": "size a strip footing to eurocode"}}},
    {"jsonrpc": "2.0", "id": 3, "method": "tools/call",
     "params": {"name": "geo_evaluate_with_units",
                "arguments": {
                    "card": "BEARING_CAPACITY_TERZAGHI",
                    "variant": "general_shear_failure_strip",
                    "inputs": {"phi_prime": "30 deg", "c_prime": "0 kPa",
                               "gamma": "18 kN/m^3", "B": "2 m",
                               "q": "18 kPa"}}}},
    {"jsonrpc": "2.0", "id": 4, "method": "tools/call",
     "params": {"name": "geo_health", "arguments": {}}},
]

stdin = io.StringIO("".join(json.dumps(r) + "\n" for r in requests))
stdout = io.StringIO()
serve(stdin, stdout)

for line in stdout.getvalue().splitlines():
    response = json.loads(line)
    result = response["result"]
    if "tools" in result:
        print(f"[{response['id']}] tools/list -> {len(result['tools'])} tools")
    elif "content" in result:
        body = json.loads(result["content"][0]["text"])
        summary = next(iter(body))
        print(f"[{response['id']}] tool result, first key {summary!r}:")
        print("   ", json.dumps(body, indent=2)[:300].replace("\n", "\n    "),
              "...")
    else:
        print(f"[{response['id']}] initialize -> "
              f"{result['serverInfo']['name']} {result['serverInfo']['version']}")
