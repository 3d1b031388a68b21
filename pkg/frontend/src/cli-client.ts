/** Thin process wrapper around the decoding CLI.
 *
 * All numeric work happens in the CLI; this module only validates options,
 * streams line-delimited JSON in input order, and parses what comes back.
 * Results are therefore bit-identical to what the CLI itself prints.
 */

import { spawn } from "node:child_process";

import {
  Alpha,
  ConfigError,
  DecodeOptions,
  InputRecord,
  OutputRecord,
} from "./types.js";

const SEARCHES = new Set(["binary", "exponential", "linear"]);

function alphaAsNumber(alpha: Alpha): number | null {
  if (typeof alpha === "number") return alpha;
  return null;
}

/** Mirror of the library's config gates; throws before any process runs. */
export function validateOptions(opts: DecodeOptions, forDecode: boolean): void {
  const alpha = opts.alpha ?? "shannon";
  const mode = opts.mode ?? "primal";
  if (mode !== "primal" && mode !== "dual") {
    throw new ConfigError(`mode must be "primal" or "dual", got ${mode}`);
  }
  if (typeof alpha === "string") {
    if (!["shannon", "inf", "-inf"].includes(alpha)) {
      throw new ConfigError(`unrecognized alpha ${alpha}`);
    }
  } else if (!Number.isFinite(alpha) || alpha === 0) {
    throw new ConfigError(`alpha must be finite and nonzero, got ${alpha}`);
  }
  const numeric = alphaAsNumber(alpha);
  if (mode === "dual" && (numeric === null || numeric <= 1)) {
    throw new ConfigError("dual mode requires a numeric alpha > 1");
  }
  if (forDecode && mode === "primal") {
    if (alpha === "inf" || alpha === "-inf") {
      throw new ConfigError(
        "limit generators support only fixed-k renormalization, not decoding"
      );
    }
    if (numeric !== null && numeric < 0) {
      throw new ConfigError("primal decoding supports shannon and alpha > 0");
    }
  }
  if (opts.lambda !== undefined && !(Number.isFinite(opts.lambda) && opts.lambda >= 0)) {
    throw new ConfigError("lambda must be finite and nonnegative");
  }
  if (opts.kMax != null && (!Number.isInteger(opts.kMax) || opts.kMax < 1)) {
    throw new ConfigError("kMax must be a positive integer or null");
  }
  if (opts.search !== undefined && !SEARCHES.has(opts.search)) {
    throw new ConfigError(`search must be one of binary|exponential|linear`);
  }
  if (opts.temperature !== undefined && !(opts.temperature > 0)) {
    throw new ConfigError("temperature must be positive");
  }
  if (opts.tol !== undefined && !(opts.tol > 0)) {
    throw new ConfigError("tol must be positive");
  }
}

export function modelFlags(opts: DecodeOptions, withLambda: boolean): string[] {
  const flags = [
    "--mode", opts.mode ?? "primal",
    "--alpha", String(opts.alpha ?? "shannon"),
  ];
  if (withLambda) {
    flags.push("--lambda", String(opts.lambda ?? 0));
    flags.push("--k-max", opts.kMax == null ? "none" : String(opts.kMax));
    flags.push("--search", opts.search ?? "binary");
  }
  if (opts.temperature !== undefined) flags.push("--temperature", String(opts.temperature));
  if (opts.tol !== undefined) flags.push("--tol", String(opts.tol));
  return flags;
}

export function cliBinary(opts: DecodeOptions): string {
  return opts.cliPath ?? process.env.BREGDEC_BIN ?? "bregdec";
}

export interface CliRun {
  code: number | null;
  stdout: string;
  stderr: string;
}

export function runCli(
  binary: string,
  args: string[],
  inputLines: string[],
): Promise<CliRun> {
  return new Promise((resolve, reject) => {
    const child = spawn(binary, args, { stdio: ["pipe", "pipe", "pipe"] });
    let stdout = "";
    let stderr = "";
    child.stdout.setEncoding("utf-8");
    child.stderr.setEncoding("utf-8");
    child.stdout.on("data", (chunk) => (stdout += chunk));
    child.stderr.on("data", (chunk) => (stderr += chunk));
    child.on("error", reject);
    child.on("close", (code) => resolve({ code, stdout, stderr }));
    child.stdin.on("error", () => undefined); // surfaced via close/code
    for (const line of inputLines) {
      child.stdin.write(line);
      child.stdin.write("\n");
    }
    child.stdin.end();
  });
}

export function parseLines(stdout: string): OutputRecord[] {
  return stdout
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as OutputRecord);
}

export function recordLines(records: InputRecord[]): string[] {
  return records.map((rec) => JSON.stringify(rec));
}
