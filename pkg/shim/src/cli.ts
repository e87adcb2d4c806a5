/**
 * Entry point.
 *
 *   node dist/cli.js --mode scripted --fixture ../conformance/scripted_fixture.json --port 0
 *   node dist/cli.js --mode echo --port 8008
 *   node dist/cli.js --mode model --upstream http://127.0.0.1:8080 --model my-model
 *
 * Prints "SHIM_READY port=<n>" once listening so harnesses can wait on it.
 */

import { EchoBackend, GenerateBackend, ScriptedBackend, loadFixture } from "./backends.js";
import { makeServer } from "./server.js";
import { DEFAULT_CLASS_TOKENS, UpstreamModelBackend } from "./upstream.js";

interface CliArgs {
  mode: "scripted" | "echo" | "model";
  port: number;
  host: string;
  fixture?: string;
  upstream?: string;
  model?: string;
  maxInputChars: number;
}

function parseArgs(argv: string[]): CliArgs {
  const args: CliArgs = {
    mode: "echo",
    port: 8008,
    host: "127.0.0.1",
    maxInputChars: 200_000,
  };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = () => {
      const v = argv[++i];
      if (v === undefined) throw new Error(`flag ${flag} needs a value`);
      return v;
    };
    switch (flag) {
      case "--mode": {
        const mode = value();
        if (mode !== "scripted" && mode !== "echo" && mode !== "model") {
          throw new Error(`unknown mode ${mode}`);
        }
        args.mode = mode;
        break;
      }
      case "--port":
        args.port = Number(value());
        break;
      case "--host":
        args.host = value();
        break;
      case "--fixture":
        args.fixture = value();
        break;
      case "--upstream":
        args.upstream = value();
        break;
      case "--model":
        args.model = value();
        break;
      case "--max-input-chars":
        args.maxInputChars = Number(value());
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  return args;
}

function buildBackend(args: CliArgs): GenerateBackend {
  switch (args.mode) {
    case "scripted": {
      if (!args.fixture) throw new Error("scripted mode requires --fixture");
      return new ScriptedBackend(loadFixture(args.fixture));
    }
    case "model": {
      if (!args.upstream) throw new Error("model mode requires --upstream");
      return new UpstreamModelBackend({
        baseUrl: args.upstream.replace(/\/$/, ""),
        model: args.model ?? "default",
        classTokens: DEFAULT_CLASS_TOKENS,
        topLogprobs: 20,
        timeoutMs: 120_000,
      });
    }
    case "echo":
      return new EchoBackend();
  }
}

function main(): void {
  let args: CliArgs;
  try {
    args = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(String(err));
    process.exit(1);
  }
  const server = makeServer(buildBackend(args), { maxInputChars: args.maxInputChars });
  server.listen(args.port, args.host, () => {
    const address = server.address();
    const port = typeof address === "object" && address !== null ? address.port : args.port;
    console.log(`SHIM_READY port=${port}`);
  });
}

main();
