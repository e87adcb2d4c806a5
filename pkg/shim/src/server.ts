/**
 * HTTP server for the wire protocol, built on node:http so response
 * bodies are emitted byte-exactly in the canonical serialization.
 */

import { createServer, IncomingMessage, Server, ServerResponse } from "node:http";

import { GenerateBackend } from "./backends.js";
import {
  ProtocolError,
  canonicalError,
  canonicalResult,
  parseRequest,
} from "./protocol.js";

export interface ServerOptions {
  maxInputChars?: number;
}

export const DEFAULT_MAX_INPUT_CHARS = 200_000;

function send(
  res: ServerResponse,
  status: number,
  body: string,
  headers: Record<string, string> = {},
): void {
  const bytes = Buffer.from(body, "utf-8");
  res.writeHead(status, {
    "content-type": "application/json",
    "content-length": String(bytes.length),
    ...headers,
  });
  res.end(bytes);
}

function readBody(req: IncomingMessage): Promise<Buffer> {
  return new Promise((resolve, reject) => {
    const chunks: Buffer[] = [];
    req.on("data", (chunk) => chunks.push(chunk));
    req.on("end", () => resolve(Buffer.concat(chunks)));
    req.on("error", reject);
  });
}

export function makeServer(backend: GenerateBackend, options: ServerOptions = {}): Server {
  const maxInputChars = options.maxInputChars ?? DEFAULT_MAX_INPUT_CHARS;

  return createServer(async (req, res) => {
    try {
      if (req.method === "GET" && req.url === "/v1/health") {
        send(res, 200, JSON.stringify({ status: "ok" }));
        return;
      }
      if (req.method === "POST" && req.url === "/v1/generate") {
        const raw = await readBody(req);
        let body: unknown;
        try {
          body = JSON.parse(raw.toString("utf-8"));
        } catch {
          send(res, 400, canonicalError("request body is not valid JSON"));
          return;
        }
        const request = parseRequest(body);
        if (request.input.length > maxInputChars) {
          send(res, 413, canonicalError("input exceeds the backend limit; truncation is unsound"));
          return;
        }
        const outcome = await backend.generate(request);
        send(res, 200, canonicalResult(outcome.result), outcome.headers ?? {});
        return;
      }
      send(res, 404, canonicalError(`no such endpoint: ${req.method} ${req.url}`));
    } catch (err) {
      if (err instanceof ProtocolError) {
        send(res, err.status, canonicalError(err.message));
      } else {
        send(res, 503, canonicalError(`internal failure: ${String(err)}`));
      }
    }
  });
}
