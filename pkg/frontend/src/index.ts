/** Sparse Bregman decoding for TypeScript callers.
 *
 * Every function delegates to the `bregdec` CLI over line-delimited JSON,
 * so values match the reference implementation exactly (same code path).
 */

import {
  cliBinary,
  modelFlags,
  parseLines,
  recordLines,
  runCli,
  validateOptions,
} from "./cli-client.js";
import {
  CliError,
  DecodeOptions,
  DecodeRecord,
  DecodingError,
  InputRecord,
  OutputRecord,
  RenormRecord,
  SampleRecord,
  isErrorRecord,
} from "./types.js";

export * from "./types.js";
export { BregmanLogitsProcessor, softmax } from "./logits-processor.js";

async function runRecords(
  opts: DecodeOptions,
  args: string[],
  records: InputRecord[],
): Promise<OutputRecord[]> {
  const run = await runCli(cliBinary(opts), args, recordLines(records));
  if (run.code !== 0 && run.code !== 2) {
    throw new CliError(
      `CLI exited with code ${run.code}`,
      run.code,
      run.stderr,
    );
  }
  const out = parseLines(run.stdout);
  if (out.length !== records.length) {
    throw new CliError(
      `expected ${records.length} output records, got ${out.length}`,
      run.code,
      run.stderr,
    );
  }
  return out;
}

function unwrap<T extends OutputRecord>(rec: OutputRecord): T {
  if (isErrorRecord(rec)) {
    throw new DecodingError(rec.error.type, rec.error.message);
  }
  return rec as T;
}

/** Decode a batch of records; error records pass through untranslated so
 * the output mirrors the CLI line for line. */
export async function decodeRecords(
  records: InputRecord[],
  opts: DecodeOptions = {},
  extraFlags: string[] = [],
): Promise<OutputRecord[]> {
  validateOptions(opts, true);
  const args = ["decode", ...modelFlags(opts, true), ...extraFlags];
  return runRecords(opts, args, records);
}

/** Decode one distribution; throws DecodingError on per-record failure. */
export async function decode(
  probs: ArrayLike<number>,
  opts: DecodeOptions = {},
): Promise<DecodeRecord> {
  const recs = await decodeRecords([{ probs: Array.from(probs) }], opts);
  return unwrap<DecodeRecord>(recs[0]);
}

/** Decode a logits vector (temperature softmax happens CLI-side). */
export async function decodeLogits(
  logits: ArrayLike<number>,
  opts: DecodeOptions = {},
): Promise<DecodeRecord> {
  const recs = await decodeRecords([{ logits: Array.from(logits) }], opts);
  return unwrap<DecodeRecord>(recs[0]);
}

/** Fixed-k generalized top-k renormalization of a full distribution. */
export async function renormalize(
  probs: ArrayLike<number>,
  k: number,
  opts: DecodeOptions = {},
): Promise<RenormRecord> {
  validateOptions(opts, false);
  if (!Number.isInteger(k) || k < 1) {
    throw new DecodingError("RangeError", `k must be a positive integer, got ${k}`);
  }
  const args = ["renorm", ...modelFlags(opts, false), "--k", String(k)];
  const recs = await runRecords(opts, args, [{ probs: Array.from(probs) }]);
  return unwrap<RenormRecord>(recs[0]);
}

/** cost(k) over an inclusive k range (defaults to 1..V). */
export async function costCurve(
  probs: ArrayLike<number>,
  opts: DecodeOptions = {},
  kRange?: [number, number],
): Promise<[number, number][]> {
  validateOptions(opts, true);
  const args = ["cost-curve", ...modelFlags(opts, true)];
  if (kRange) args.push("--k-range", `${kRange[0]}:${kRange[1]}`);
  const run = await runCli(
    cliBinary(opts),
    args,
    recordLines([{ probs: Array.from(probs) }]),
  );
  if (run.code !== 0) {
    throw new CliError(`CLI exited with code ${run.code}`, run.code, run.stderr);
  }
  return run.stdout
    .split("\n")
    .slice(1)
    .filter((line) => line.trim().length > 0)
    .map((line) => {
      const [k, cost] = line.split(",");
      return [Number(k), Number(cost)] as [number, number];
    });
}

/** Decode then draw n seeded token indices per record. */
export async function sample(
  probs: ArrayLike<number>,
  n: number,
  seed: number,
  opts: DecodeOptions = {},
): Promise<number[]> {
  validateOptions(opts, true);
  const args = [
    "sample",
    ...modelFlags(opts, true),
    "--n", String(n),
    "--seed", String(seed),
  ];
  const recs = await runRecords(opts, args, [{ probs: Array.from(probs) }]);
  return unwrap<SampleRecord>(recs[0]).samples;
}
