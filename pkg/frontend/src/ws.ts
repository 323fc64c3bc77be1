// WebSocket channel with automatic reconnection. Messages are plain
// text; frame decoding stays in protocol.ts so this layer is only
// lifecycle management.

export interface ChannelHooks {
  onMessage(text: string): void;
  onStatus(state: "connecting" | "open" | "closed"): void;
}

export interface Channel {
  send(text: string): void;
  close(): void;
}

const RECONNECT_MIN_MS = 500;
const RECONNECT_MAX_MS = 5000;

export function openChannel(url: string, hooks: ChannelHooks): Channel {
  let socket: WebSocket | null = null;
  let closed = false;
  let backoff = RECONNECT_MIN_MS;
  let timer: ReturnType<typeof setTimeout> | null = null;

  const connect = () => {
    if (closed) {
      return;
    }
    hooks.onStatus("connecting");
    socket = new WebSocket(url);
    socket.onopen = () => {
      backoff = RECONNECT_MIN_MS;
      hooks.onStatus("open");
    };
    socket.onmessage = (event) => {
      if (typeof event.data === "string") {
        hooks.onMessage(event.data);
      }
    };
    socket.onclose = () => {
      socket = null;
      if (!closed) {
        hooks.onStatus("closed");
        timer = setTimeout(connect, backoff);
        backoff = Math.min(backoff * 2, RECONNECT_MAX_MS);
      }
    };
    socket.onerror = () => {
      // onclose follows and handles the retry.
    };
  };
  connect();

  return {
    send(text: string): void {
      if (socket !== null && socket.readyState === WebSocket.OPEN) {
        socket.send(text);
      }
    },
    close(): void {
      closed = true;
      if (timer !== null) {
        clearTimeout(timer);
      }
      socket?.close();
    },
  };
}
