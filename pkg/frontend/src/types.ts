/** Shared types for the decoding client. */

export type Alpha = number | "shannon" | "inf" | "-inf";

export type Mode = "primal" | "dual";

export type Search = "binary" | "exponential" | "linear";

/** Mirror of the CLI's decoding configuration, in plain scalars/strings. */
export interface DecodeOptions {
  alpha?: Alpha;
  mode?: Mode;
  /** Sparsity cost per kept token (default 0). */
  lambda?: number;
  /** Cap on the selected sparsity; null/undefined means unbounded. */
  kMax?: number | null;
  search?: Search;
  /** Softmax temperature, applied only to logits inputs. */
  temperature?: number;
  /** Root-finding tolerance. */
  tol?: number;
  /** Override the CLI executable (defaults to $BREGDEC_BIN, then "bregdec"). */
  cliPath?: string;
}

/** One input record: exactly one of probs/logits. */
export interface InputRecord {
  id?: string;
  probs?: number[];
  logits?: number[];
}

/** Successful decode output, mirroring the CLI's record shape. */
export interface DecodeRecord {
  id?: string;
  k_star: number;
  nu: number;
  cost: number;
  support: number[];
  probs?: number[];
  support_probs?: number[];
  cost_curve?: [number, number][];
}

export interface RenormRecord {
  id?: string;
  k: number;
  nu: number;
  support: number[];
  probs?: number[];
  support_probs?: number[];
}

export interface SampleRecord {
  id?: string;
  samples: number[];
}

export interface ErrorRecord {
  id?: string;
  error: { type: string; message: string };
}

export type OutputRecord =
  | DecodeRecord
  | RenormRecord
  | SampleRecord
  | ErrorRecord;

export function isErrorRecord(rec: OutputRecord): rec is ErrorRecord {
  return typeof rec === "object" && rec !== null && "error" in rec;
}

/** Raised before any process is spawned when options are invalid. */
export class ConfigError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ConfigError";
  }
}

/** A per-record failure reported by the CLI, surfaced as a typed exception. */
export class DecodingError extends Error {
  /** The library's exception class name (InputError, RangeError, ...). */
  readonly kind: string;

  constructor(kind: string, message: string) {
    super(`${kind}: ${message}`);
    this.name = "DecodingError";
    this.kind = kind;
  }
}

/** The CLI exited abnormally (bad flags, missing binary, crash). */
export class CliError extends Error {
  readonly exitCode: number | null;
  readonly stderr: string;

  constructor(message: string, exitCode: number | null, stderr: string) {
    super(message);
    this.name = "CliError";
    this.exitCode = exitCode;
    this.stderr = stderr;
  }
}
