/**
 * Transport abstraction: the trial view only needs send / onMessage /
 * onClose, so tests drive it with a scripted stub and the browser build
 * plugs in a WebSocket (bridged to the service's TCP socket, see
 * bridge.mjs).
 */

import { ClientMsg, ServerMsg, parseServerLine, serializeClientMsg } from "./protocol.js";

export interface Connection {
  send(msg: ClientMsg): void;
  onMessage(handler: (msg: ServerMsg) => void): void;
  onClose(handler: () => void): void;
  close(): void;
}

/** Browser transport: one WebSocket frame per protocol line. */
export class WebSocketConnection implements Connection {
  private handlers: Array<(msg: ServerMsg) => void> = [];
  private closeHandlers: Array<() => void> = [];
  private buffer = "";

  constructor(private readonly socket: WebSocket) {
    socket.addEventListener("message", (event) => {
      this.buffer += String(event.data);
      let idx: number;
      while ((idx = this.buffer.indexOf("\n")) >= 0) {
        const line = this.buffer.slice(0, idx).trim();
        this.buffer = this.buffer.slice(idx + 1);
        if (!line) continue;
        const msg = parseServerLine(line);
        for (const h of this.handlers) h(msg);
      }
    });
    socket.addEventListener("close", () => {
      for (const h of this.closeHandlers) h();
    });
  }

  send(msg: ClientMsg): void {
    this.socket.send(serializeClientMsg(msg));
  }

  onMessage(handler: (msg: ServerMsg) => void): void {
    this.handlers.push(handler);
  }

  onClose(handler: () => void): void {
    this.closeHandlers.push(handler);
  }

  close(): void {
    this.socket.close();
  }
}

/** Scripted stand-in used by the tests: records sends, replays replies. */
export class StubConnection implements Connection {
  readonly sent: ClientMsg[] = [];
  private handlers: Array<(msg: ServerMsg) => void> = [];
  private closeHandlers: Array<() => void> = [];
  closed = false;

  send(msg: ClientMsg): void {
    this.sent.push(msg);
  }

  onMessage(handler: (msg: ServerMsg) => void): void {
    this.handlers.push(handler);
  }

  onClose(handler: () => void): void {
    this.closeHandlers.push(handler);
  }

  close(): void {
    this.closed = true;
  }

  /** Test hook: deliver a server message line to the view. */
  reply(msg: ServerMsg): void {
    for (const h of this.handlers) h(msg);
  }

  /** Test hook: simulate the server dropping the connection. */
  drop(): void {
    for (const h of this.closeHandlers) h();
  }
}
