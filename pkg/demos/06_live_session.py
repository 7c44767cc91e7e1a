"""The live session protocol, driven by a scripted client.

Starts the session service on an ephemeral port, connects a socket
client, and plays one trial: hello, a stream of tool updates walking
toward the target, and a confirm.  This is exactly what the browser UI
speaks; run `wristcue serve --port 8787` to drive it interactively.
"""

import json
import socket
import threading

from wristcue.service import ServiceConfig, serve

server = serve(ServiceConfig(), port=0)
threading.Thread(target=server.serve_forever, daemon=True).start()
print(f"service listening on 127.0.0.1:{server.port}")

sock = socket.create_connection(("127.0.0.1", server.port))
f = sock.makefile("rwb")


def send(msg):
    f.write((json.dumps(msg) + "\n").encode())
    f.flush()
    print(f"  -> {msg}")


def recv():
    msg = json.loads(f.readline())
    shown = dict(msg)
    if "motors" in shown:
        lit = [lab for lab, m in zip("ABCDEFGHIJKL", shown.pop("motors")) if m > 0]
        shown["motors_lit"] = "".join(lit) or "-"
    print(f"  <- {shown}")
    return msg


send({"type": "hello", "participant": "demo", "condition": "ar_plus_haptics"})
start = recv()
tx, ty, tz = start["target_mm"]

# walk the tool tip from the origin toward the target at 30 mm/s, 10 Hz
steps = 12
for k in range(steps + 1):
    frac = k / steps
    send({"type": "tool_update", "t_s": round(3.0 * frac, 2),
          "x_mm": round(tx * frac, 2), "y_mm": round(ty * frac, 2),
          "z_mm": round(tz * frac, 2)})
    state = recv()
    if state.get("state") == "arrived":
        break

send({"type": "confirm"})
recv()  # trial_result
recv()  # next start_trial

f.close()
sock.close()
server.shutdown()
server.server_close()
print("done")
