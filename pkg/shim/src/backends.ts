/**
 * In-process backends the shim can serve: scripted fixture replay (for
 * conformance testing) and a deterministic echo mode.
 */

import { createHash } from "node:crypto";
import { readFileSync } from "node:fs";

import {
  WireRequest,
  WireResult,
  parseResult,
  unavailable,
} from "./protocol.js";

export interface GenerateOutcome {
  result: WireResult;
  /** extra response headers, e.g. approximation flags */
  headers?: Record<string, string>;
}

export interface GenerateBackend {
  generate(request: WireRequest): Promise<GenerateOutcome> | GenerateOutcome;
}

/** Load a scripted fixture file (format in PROTOCOL.md). */
export function loadFixture(path: string): Map<string, WireResult> {
  const data = JSON.parse(readFileSync(path, "utf-8"));
  if (typeof data !== "object" || data === null || !Array.isArray(data.responses)) {
    throw new Error(`${path}: fixture must be an object with a 'responses' list`);
  }
  const map = new Map<string, WireResult>();
  data.responses.forEach((entry: unknown, i: number) => {
    const record = entry as Record<string, unknown>;
    if (typeof record.input !== "string") {
      throw new Error(`${path}: responses[${i}] must carry a string 'input'`);
    }
    map.set(record.input, parseResult(record, `responses[${i}]`));
  });
  return map;
}

/**
 * Exact-input replay with the serving semantics all implementations
 * share: outputs truncate to num_outputs, explain mode drops the class
 * distribution, classify modes require it, unknown input is 503.
 */
export class ScriptedBackend implements GenerateBackend {
  constructor(private readonly responses: Map<string, WireResult>) {}

  generate(request: WireRequest): GenerateOutcome {
    const scripted = this.responses.get(request.input);
    if (scripted === undefined) {
      throw unavailable(
        `no scripted response for input starting ${JSON.stringify(request.input.slice(0, 60))}`,
      );
    }
    const outputs = scripted.outputs.slice(0, request.num_outputs);
    if (request.mode === "explain") {
      return { result: { outputs, class_logprobs: null } };
    }
    if (scripted.class_logprobs === null) {
      throw unavailable(
        "scripted response lacks class_logprobs required by a classify-mode request",
      );
    }
    return { result: { outputs, class_logprobs: scripted.class_logprobs } };
  }
}

/** Deterministic pseudo-random stream derived from (seed, input). */
function mulberryStream(input: string, seed: number | null): () => number {
  const digest = createHash("sha256").update(`${seed}|${input}`).digest();
  let state = digest.readUInt32BE(0);
  return () => {
    state |= 0;
    state = (state + 0x6d2b79f5) | 0;
    let t = Math.imul(state ^ (state >>> 15), 1 | state);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/**
 * Echo mode: deterministic, content-derived responses with a flat class
 * distribution. Enough to exercise clients and the conformance suite
 * end to end without any model.
 */
export class EchoBackend implements GenerateBackend {
  generate(request: WireRequest): GenerateOutcome {
    const next = mulberryStream(request.input, request.seed);
    const snippet = request.input.slice(0, 4 * request.max_output_tokens);
    const outputs = [];
    for (let i = 0; i < request.num_outputs; i++) {
      const logprob = -Math.round((0.5 + 3.5 * next()) * 1e6) / 1e6;
      outputs.push({ text: `echo ${i + 1}: ${snippet}`, logprob });
    }
    if (request.mode === "explain") {
      return { result: { outputs, class_logprobs: null } };
    }
    return {
      result: {
        outputs,
        class_logprobs: { entail: -Math.LN2, contradict: -Math.LN2 },
      },
    };
  }
}
