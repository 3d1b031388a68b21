/** Logits-processor adapter for text-generation sampling loops.
 *
 * Takes a logits array and returns a logits array: positions outside the
 * decoded support become -Infinity, positions inside become the log of the
 * renormalized probability. Applying a softmax to the returned array
 * reproduces the decoded sparse distribution.
 */

import { decodeRecords, } from "./index.js";
import { validateOptions } from "./cli-client.js";
import {
  DecodeOptions,
  DecodeRecord,
  DecodingError,
  isErrorRecord,
} from "./types.js";

export function softmax(logits: ArrayLike<number>): number[] {
  const arr = Array.from(logits);
  const max = Math.max(...arr.filter((v) => Number.isFinite(v)));
  const exps = arr.map((v) => Math.exp(v - max));
  const total = exps.reduce((a, b) => a + b, 0);
  return exps.map((v) => v / total);
}

export class BregmanLogitsProcessor {
  private readonly opts: DecodeOptions;

  constructor(opts: DecodeOptions = {}) {
    validateOptions(opts, true); // invalid configs raise before any call
    this.opts = opts;
  }

  /** Process one logits row; length is always preserved. */
  async process(logits: ArrayLike<number>): Promise<number[]> {
    const input = Array.from(logits);
    const recs = await decodeRecords([{ logits: input }], this.opts);
    const rec = recs[0];
    if (isErrorRecord(rec)) {
      throw new DecodingError(rec.error.type, rec.error.message);
    }
    const probs = (rec as DecodeRecord).probs;
    if (!probs) {
      throw new DecodingError("InputError", "decoder did not return dense probs");
    }
    return probs.map((p) => (p > 0 ? Math.log(p) : -Infinity));
  }
}
