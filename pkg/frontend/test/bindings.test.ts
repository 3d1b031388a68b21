import { execFileSync } from "node:child_process";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import {
  ConfigError,
  DecodingError,
  costCurve,
  decode,
  decodeRecords,
  renormalize,
  sample,
} from "../src/index.js";
import { cliBinary, modelFlags } from "../src/cli-client.js";
import type { DecodeOptions, InputRecord } from "../src/types.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const GOLDEN = join(HERE, "..", "fixtures", "golden.jsonl");

function goldenRecords(): InputRecord[] {
  return readFileSync(GOLDEN, "utf-8")
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as InputRecord);
}

/** Run the CLI directly on the fixture file: the reference output. */
function cliReference(opts: DecodeOptions): unknown[] {
  const args = ["decode", ...modelFlags(opts, true), "--input", GOLDEN];
  const stdout = execFileSync(cliBinary(opts), args, { encoding: "utf-8" });
  return stdout
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line));
}

describe("golden fixture equivalence", () => {
  const configs: DecodeOptions[] = [
    { alpha: 2, mode: "primal", lambda: 0.05 },
    { alpha: 2.5, mode: "dual", lambda: 0.01, search: "exponential" },
  ];

  for (const opts of configs) {
    it(`matches the CLI field-for-field (${opts.mode}, alpha=${opts.alpha})`, async () => {
      const viaBindings = await decodeRecords(goldenRecords(), opts);
      const viaCli = cliReference(opts);
      expect(viaBindings.length).toBe(100);
      // same code path underneath, so the parsed structures must be
      // identical in every field and every bit of every number
      expect(viaBindings).toStrictEqual(viaCli);
    }, 60000);
  }
});

describe("decode", () => {
  it("reproduces the worked example", async () => {
    const rec = await decode([0.6, 0.3, 0.1], { alpha: 2, lambda: 0.05 });
    expect(rec.k_star).toBe(2);
    expect(rec.support).toEqual([0, 1]);
    expect(rec.probs![0]).toBeCloseTo(0.65, 12);
    expect(rec.probs![1]).toBeCloseTo(0.35, 12);
    expect(rec.probs![2]).toBe(0);
    expect(rec.nu).toBeCloseTo(0.05, 12);
    expect(rec.cost).toBeCloseTo(0.1075, 12);
  });

  it("keeps a point mass at k* = 1", async () => {
    const rec = await decode([1, 0, 0], { alpha: 1.5, lambda: 0.1 });
    expect(rec.k_star).toBe(1);
    expect(rec.probs).toEqual([1, 0, 0]);
  });

  it("surfaces per-record failures as typed exceptions", async () => {
    await expect(decode([0.9, 0.9], { alpha: 2 })).rejects.toThrowError(
      DecodingError,
    );
    await expect(decode([0.5, NaN], { alpha: 2 })).rejects.toMatchObject({
      kind: "InputError",
    });
  });

  it("rejects invalid configs before spawning", async () => {
    await expect(decode([1], { alpha: "inf" })).rejects.toThrowError(ConfigError);
    await expect(decode([1], { mode: "dual", alpha: 1 })).rejects.toThrowError(
      ConfigError,
    );
    await expect(decode([1], { lambda: -1 })).rejects.toThrowError(ConfigError);
    await expect(decode([1], { alpha: 0 })).rejects.toThrowError(ConfigError);
  });
});

describe("renormalize", () => {
  it("sum division at alpha = 1", async () => {
    const rec = await renormalize([0.5, 0.25, 0.25], 2, { alpha: "shannon" });
    expect(rec.probs![0]).toBeCloseTo(2 / 3, 12);
    expect(rec.probs![1]).toBeCloseTo(1 / 3, 12);
    expect(rec.probs![2]).toBe(0);
  });

  it("water-filling at alpha = inf", async () => {
    const rec = await renormalize([0.5, 0.25, 0.25], 2, { alpha: "inf" });
    expect(rec.probs).toEqual([0.5, 0.5, 0]);
    expect(rec.nu).toBeCloseTo(0.5, 12);
  });

  it("k beyond V raises RangeError", async () => {
    await expect(renormalize([0.5, 0.5], 5, { alpha: 2 })).rejects.toMatchObject({
      kind: "RangeError",
    });
  });
});

describe("costCurve", () => {
  it("matches the worked values", async () => {
    const rows = await costCurve(
      [0.6, 0.3, 0.1],
      { alpha: 2, lambda: 0.05 },
      [1, 3],
    );
    expect(rows.map(([k]) => k)).toEqual([1, 2, 3]);
    expect(rows[0][1]).toBeCloseTo(0.18, 12);
    expect(rows[1][1]).toBeCloseTo(0.1075, 12);
    expect(rows[2][1]).toBeCloseTo(0.15, 12);
  });
});

describe("sample", () => {
  it("is reproducible and sticks to the support", async () => {
    const a = await sample([0.6, 0.3, 0.1], 256, 7, { alpha: 2, lambda: 0.05 });
    const b = await sample([0.6, 0.3, 0.1], 256, 7, { alpha: 2, lambda: 0.05 });
    expect(a).toEqual(b);
    expect(a).toHaveLength(256);
    expect(a.every((t) => t === 0 || t === 1)).toBe(true);
  });
});
