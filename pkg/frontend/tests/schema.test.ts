import { describe, expect, it } from "vitest";

import {
  CsvError,
  SWEEP_HEADER,
  parseSweepCsv,
  parseUpsilonCsv,
} from "../src/schema.js";
import { fixture } from "./helpers.js";

describe("parseSweepCsv", () => {
  it("parses every row with exact raw strings kept", () => {
    const text = fixture("sweep.csv");
    const rows = parseSweepCsv(text);
    expect(rows).toHaveLength(9);
    const first = rows[0]!;
    expect(first.protocol).toBe("cube");
    expect(first.nCopies).toBe(100);
    expect(first.reps).toBe(100);
    expect(first.meanInfidelity).toBeCloseTo(0.1196, 3);
    // raw strings are the exact CSV bytes, full precision included
    expect(text).toContain(first.raw["mean_infidelity"]!);
    expect(Number(first.raw["mean_infidelity"])).toBe(first.meanInfidelity);
  });

  it("rejects a header-only file without inventing rows", () => {
    expect(() => parseSweepCsv(SWEEP_HEADER.join(",") + "\n")).toThrow(
      CsvError,
    );
    expect(() => parseSweepCsv(SWEEP_HEADER.join(",") + "\n")).toThrow(
      /no data rows/,
    );
  });

  it("rejects an entirely empty file", () => {
    expect(() => parseSweepCsv("")).toThrow(CsvError);
  });

  it("names the missing columns and the expected header", () => {
    const broken = fixture("sweep.csv")
      .split("\n")
      .map((line) => line.split(",").slice(0, 5).join(","))
      .join("\n");
    expect(() => parseSweepCsv(broken, "input.csv")).toThrow(
      /input\.csv.*missing column\(s\): purity_true, gm_bound.*expected header/s,
    );
  });

  it("rejects unexpected columns", () => {
    const text =
      SWEEP_HEADER.join(",") + ",comment\ncube,100,1,0.1,0,1,0.1875,hello\n";
    expect(() => parseSweepCsv(text)).toThrow(/unexpected column\(s\): comment/);
  });

  it("points at non-numeric cells by row and column", () => {
    const text = SWEEP_HEADER.join(",") + "\ncube,100,1,abc,0,1,0.1875\n";
    expect(() => parseSweepCsv(text, "x.csv")).toThrow(
      /x\.csv: row 1: column "mean_infidelity"/,
    );
  });
});

describe("parseUpsilonCsv", () => {
  it("parses the per-state rows", () => {
    const rows = parseUpsilonCsv(fixture("upsilon.csv"));
    expect(rows).toHaveLength(8);
    expect(new Set(rows.map((r) => r.ensemble))).toEqual(
      new Set(["mes", "pure"]),
    );
    for (const row of rows) {
      expect(Number(row.raw["upsilon"])).toBe(row.upsilon);
      expect(row.nCopies).toBe(10000);
      expect(row.reps).toBe(50);
    }
  });

  it("rejects sweep-shaped input with a clear diagnostic", () => {
    expect(() => parseUpsilonCsv(fixture("sweep.csv"))).toThrow(
      /missing column\(s\): ensemble/,
    );
  });

  it("rejects a header-only file", () => {
    const header = fixture("upsilon.csv").split("\n")[0]!;
    expect(() => parseUpsilonCsv(header + "\n")).toThrow(/no data rows/);
  });
});
