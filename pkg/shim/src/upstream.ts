/**
 * Model mode: wrap a locally running OpenAI-compatible completions server
 * (llama.cpp server, vllm, ollama's /v1 endpoint, ...) behind the wire
 * protocol, exposing real first-position class log-probabilities.
 *
 * Class-token extraction reads the first generated position's
 * top-logprobs and takes the entry matching each configured class string.
 * Class names that span multiple upstream tokens are reduced to their
 * first-token mass and flagged via the `x-class-token-approximation`
 * response header - a documented approximation.
 */

import { GenerateBackend, GenerateOutcome } from "./backends.js";
import { WireOutput, WireRequest, unavailable } from "./protocol.js";

export interface UpstreamConfig {
  baseUrl: string;
  model: string;
  classTokens: { entail: string; contradict: string };
  topLogprobs: number;
  timeoutMs: number;
}

export const DEFAULT_CLASS_TOKENS = { entail: "Entail", contradict: "Contradict" };

const LOGPROB_FLOOR = -30;

interface CompletionChoice {
  text: string;
  logprobs?: {
    token_logprobs?: Array<number | null>;
    top_logprobs?: Array<Record<string, number>>;
  };
}

function clampLogprob(value: number): number {
  return Number.isFinite(value) && value <= 0 ? value : 0;
}

/** Strip sentencepiece/BPE markers so token text compares with plain text. */
function tokenText(raw: string): string {
  return raw.replace(/^[\s▁Ġ]+/, "").toLowerCase();
}

export function extractClassLogprob(
  topLogprobs: Record<string, number>,
  classString: string,
): { logprob: number; exact: boolean } {
  const wanted = classString.toLowerCase();
  let best: { logprob: number; exact: boolean } | null = null;
  for (const [token, logprob] of Object.entries(topLogprobs)) {
    const text = tokenText(token);
    if (text.length === 0) continue;
    const exact = text === wanted;
    if (exact || wanted.startsWith(text)) {
      // exact token matches always win; ties break on probability mass
      const better =
        best === null ||
        (exact && !best.exact) ||
        (exact === best.exact && logprob > best.logprob);
      if (better) {
        best = { logprob: clampLogprob(logprob), exact };
      }
    }
  }
  return best ?? { logprob: LOGPROB_FLOOR, exact: false };
}

export class UpstreamModelBackend implements GenerateBackend {
  private queue: Promise<unknown> = Promise.resolve();

  constructor(private readonly config: UpstreamConfig) {}

  generate(request: WireRequest): Promise<GenerateOutcome> {
    // model access is serialized: correctness over throughput
    const run = this.queue.then(() => this.callUpstream(request));
    this.queue = run.catch(() => undefined);
    return run;
  }

  private async callUpstream(request: WireRequest): Promise<GenerateOutcome> {
    const classify = request.mode !== "explain";
    const body = {
      model: this.config.model,
      prompt: request.input,
      max_tokens: request.mode === "classify" ? 1 : request.max_output_tokens,
      n: request.num_outputs,
      temperature: request.mode === "explain" ? 1.0 : 0.0,
      logprobs: this.config.topLogprobs,
      seed: request.seed ?? undefined,
    };
    let response: Response;
    try {
      response = await fetch(`${this.config.baseUrl}/v1/completions`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
        signal: AbortSignal.timeout(this.config.timeoutMs),
      });
    } catch (err) {
      throw unavailable(`upstream model server unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      const detail = (await response.text()).slice(0, 200);
      throw unavailable(`upstream returned ${response.status}: ${detail}`);
    }
    const payload = (await response.json()) as { choices?: CompletionChoice[] };
    const choices = payload.choices ?? [];
    if (choices.length === 0) {
      throw unavailable("upstream returned no choices");
    }

    const outputs: WireOutput[] = choices.slice(0, request.num_outputs).map((choice) => {
      const tokenLps = choice.logprobs?.token_logprobs ?? [];
      const total = tokenLps.reduce<number>((acc, lp) => acc + (lp ?? 0), 0);
      return { text: choice.text.trim(), logprob: clampLogprob(total) };
    });

    if (!classify) {
      return { result: { outputs, class_logprobs: null } };
    }

    const firstPosition = choices[0].logprobs?.top_logprobs?.[0] ?? {};
    const entail = extractClassLogprob(firstPosition, this.config.classTokens.entail);
    const contradict = extractClassLogprob(firstPosition, this.config.classTokens.contradict);
    const headers: Record<string, string> = {};
    if (!entail.exact || !contradict.exact) {
      headers["x-class-token-approximation"] =
        "class logprobs reduced to first-token mass of the class strings";
    }
    return {
      result: {
        outputs,
        class_logprobs: { entail: entail.logprob, contradict: contradict.logprob },
      },
      headers,
    };
  }
}
