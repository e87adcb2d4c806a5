import { describe, expect, it } from "vitest";

import {
  ProtocolError,
  canonicalResult,
  parseRequest,
  parseResult,
} from "../src/protocol.js";

describe("parseRequest", () => {
  it("applies defaults", () => {
    const req = parseRequest({ input: "x", mode: "classify" });
    expect(req.num_outputs).toBe(1);
    expect(req.seed).toBeNull();
    expect(req.max_output_tokens).toBe(128);
  });

  it("rejects missing input", () => {
    expect(() => parseRequest({ mode: "classify" })).toThrowError(ProtocolError);
  });

  it("rejects unknown mode", () => {
    expect(() => parseRequest({ input: "x", mode: "summon" })).toThrowError(/unknown mode/);
  });

  it("rejects non-integer num_outputs", () => {
    expect(() => parseRequest({ input: "x", mode: "explain", num_outputs: 1.5 })).toThrow();
    expect(() => parseRequest({ input: "x", mode: "explain", num_outputs: 0 })).toThrow();
  });

  it("accepts explicit null seed", () => {
    expect(parseRequest({ input: "x", mode: "classify", seed: null }).seed).toBeNull();
  });
});

describe("canonicalResult", () => {
  it("orders keys and compacts", () => {
    const body = canonicalResult({
      outputs: [{ text: "Entail", logprob: -0.5 }],
      class_logprobs: { entail: -0.5, contradict: -2 },
    });
    expect(body).toBe(
      '{"outputs":[{"text":"Entail","logprob":-0.5}],"class_logprobs":{"entail":-0.5,"contradict":-2}}',
    );
  });

  it("keeps unicode unescaped", () => {
    const body = canonicalResult({ outputs: [{ text: "é🏆", logprob: -1 }], class_logprobs: null });
    expect(body).toBe('{"outputs":[{"text":"é🏆","logprob":-1}],"class_logprobs":null}');
  });

  it("round-trips shortest-repr doubles", () => {
    const lp = -0.10536051565782628;
    const body = canonicalResult({ outputs: [{ text: "x", logprob: lp }], class_logprobs: null });
    expect(body).toContain("-0.10536051565782628");
    expect(JSON.parse(body).outputs[0].logprob).toBe(lp);
  });
});

describe("parseResult", () => {
  it("rejects positive logprobs", () => {
    expect(() =>
      parseResult({ outputs: [{ text: "x", logprob: 0.2 }], class_logprobs: null }),
    ).toThrow(/<= 0/);
  });

  it("accepts a full result", () => {
    const result = parseResult({
      outputs: [{ text: "x", logprob: -1 }],
      class_logprobs: { entail: -1, contradict: -2 },
    });
    expect(result.outputs).toHaveLength(1);
    expect(result.class_logprobs?.contradict).toBe(-2);
  });
});
