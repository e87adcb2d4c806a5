/**
 * Wire protocol types, validation, and canonical serialization.
 *
 * The protocol is specified in PROTOCOL.md at the repository root; key
 * order and number formatting matter because conforming servers are
 * compared byte-for-byte on shared fixtures.
 */

export type GenerationMode = "classify" | "classify_and_explain" | "explain";

export const MODES: readonly GenerationMode[] = [
  "classify",
  "classify_and_explain",
  "explain",
];

export interface WireRequest {
  input: string;
  mode: GenerationMode;
  num_outputs: number;
  seed: number | null;
  max_output_tokens: number;
}

export interface WireOutput {
  text: string;
  logprob: number;
}

export interface ClassLogprobs {
  entail: number;
  contradict: number;
}

export interface WireResult {
  outputs: WireOutput[];
  class_logprobs: ClassLogprobs | null;
}

export class ProtocolError extends Error {
  constructor(
    message: string,
    readonly status: 400 | 413 | 503,
  ) {
    super(message);
    this.name = "ProtocolError";
  }
}

export function badRequest(message: string): ProtocolError {
  return new ProtocolError(message, 400);
}

export function unavailable(message: string): ProtocolError {
  return new ProtocolError(message, 503);
}

function isInteger(value: unknown): value is number {
  return typeof value === "number" && Number.isInteger(value);
}

/** Validate a parsed request body; throws ProtocolError(400) on violations. */
export function parseRequest(body: unknown): WireRequest {
  if (typeof body !== "object" || body === null || Array.isArray(body)) {
    throw badRequest("request body must be a JSON object");
  }
  const record = body as Record<string, unknown>;
  if (typeof record.input !== "string") {
    throw badRequest("request field 'input' must be a string");
  }
  if (!MODES.includes(record.mode as GenerationMode)) {
    throw badRequest(`unknown mode ${JSON.stringify(record.mode)}`);
  }
  const numOutputs = record.num_outputs ?? 1;
  if (!isInteger(numOutputs) || numOutputs < 1) {
    throw badRequest("request field 'num_outputs' must be an integer >= 1");
  }
  const seed = record.seed ?? null;
  if (seed !== null && !isInteger(seed)) {
    throw badRequest("request field 'seed' must be an integer or null");
  }
  const maxTokens = record.max_output_tokens ?? 128;
  if (!isInteger(maxTokens) || maxTokens < 1) {
    throw badRequest("request field 'max_output_tokens' must be an integer >= 1");
  }
  return {
    input: record.input,
    mode: record.mode as GenerationMode,
    num_outputs: numOutputs,
    seed,
    max_output_tokens: maxTokens,
  };
}

/**
 * Serialize a result with canonical key order: outputs before
 * class_logprobs, text before logprob, entail before contradict.
 * JSON.stringify emits compact JSON with shortest round-trip numbers,
 * matching the canonical form.
 */
export function canonicalResult(result: WireResult): string {
  const ordered = {
    outputs: result.outputs.map((o) => ({ text: o.text, logprob: o.logprob })),
    class_logprobs: result.class_logprobs
      ? {
          entail: result.class_logprobs.entail,
          contradict: result.class_logprobs.contradict,
        }
      : null,
  };
  return JSON.stringify(ordered);
}

export function canonicalError(message: string): string {
  return JSON.stringify({ error: message });
}

function checkLogprob(value: unknown, where: string): number {
  if (typeof value !== "number" || !Number.isFinite(value) || value > 0) {
    throw new Error(`${where} must be a finite number <= 0`);
  }
  return value;
}

/** Validate a fixture/server result shape (not a hot path). */
export function parseResult(body: unknown, where = "result"): WireResult {
  if (typeof body !== "object" || body === null) {
    throw new Error(`${where} must be an object`);
  }
  const record = body as Record<string, unknown>;
  if (!Array.isArray(record.outputs)) {
    throw new Error(`${where}.outputs must be a list`);
  }
  const outputs = record.outputs.map((item, i) => {
    const out = item as Record<string, unknown>;
    if (typeof out.text !== "string") {
      throw new Error(`${where}.outputs[${i}].text must be a string`);
    }
    return {
      text: out.text,
      logprob: checkLogprob(out.logprob, `${where}.outputs[${i}].logprob`),
    };
  });
  let classLogprobs: ClassLogprobs | null = null;
  if (record.class_logprobs != null) {
    const lps = record.class_logprobs as Record<string, unknown>;
    classLogprobs = {
      entail: checkLogprob(lps.entail, `${where}.class_logprobs.entail`),
      contradict: checkLogprob(lps.contradict, `${where}.class_logprobs.contradict`),
    };
  }
  return { outputs, class_logprobs: classLogprobs };
}
