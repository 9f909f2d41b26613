"""Drive the HTTP session service end to end on a local port.

Starts the service in a background thread, opens a design session backed by
a scripted replay, sends one edit request, and reads back the level, the
step trace and the server-sent event stream — the same surface a browser
client uses.

Run: python3 demos/06_service.py
"""

import json
import socket
import threading
import time

import requests
import uvicorn

from freyr.service import create_app

SCRIPT = [
    "add_enemy",
    ("- name: Harbor Ghoul\n- description: Dripping and patient.\n"
     "- species: ghoul\n- health: 11\n- room: Docks"),
    "A ghoul now lurks by the Docks.",
]

LEVEL = {
    "name": "Port Town",
    "rooms": [{"name": "Docks", "description": "Salt-rotted planks.",
               "enemies": [], "treasures": []}],
    "corridors": [],
}


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def main() -> None:
    port = free_port()
    server = uvicorn.Server(uvicorn.Config(create_app(), host="127.0.0.1",
                                           port=port, log_level="warning"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    while not server.started:
        time.sleep(0.02)
    base = f"http://127.0.0.1:{port}"
    print(f"service up at {base}")

    created = requests.post(f"{base}/sessions", json={
        "mode": "freyr",
        "config": {"backend": {"kind": "scripted", "script": SCRIPT}},
        "level": LEVEL,
    })
    created.raise_for_status()
    sid = created.json()["id"]
    print(f"session {sid[:8]}... created in mode "
          f"{created.json()['mode']}")

    reply = requests.post(f"{base}/sessions/{sid}/messages",
                          json={"text": "Add a ghoul to the docks."})
    reply.raise_for_status()
    body = reply.json()
    print(f"\nassistant: {body['response']}")
    docks = next(r for r in body["level"]["rooms"] if r["name"] == "Docks")
    print(f"enemies in Docks: {[e['name'] for e in docks['enemies']]}")

    trace = requests.get(f"{base}/sessions/{sid}/trace/0").json()["trace"]
    print(f"\ntrace: {len(trace['calls'])} role calls, "
          f"{trace['total']['tokens_in']} tokens in, "
          f"{trace['retries']} retries")

    print("\nevent stream:")
    with requests.get(f"{base}/sessions/{sid}/events", stream=True) as stream:
        for line in stream.iter_lines(decode_unicode=True):
            if line.startswith("event: "):
                print(f"  {line.removeprefix('event: ')}")
            elif line.startswith("data: "):
                payload = json.loads(line.removeprefix("data: "))
                if payload["type"] == "tool_succeeded":
                    print(f"    -> {payload['message']}")

    busy = requests.get(f"{base}/sessions/{sid}/level")
    print(f"\nlevel endpoint still serves: {busy.json()['level']['name']}")

    server.should_exit = True
    thread.join(timeout=5)
    print("service stopped")


if __name__ == "__main__":
    main()
