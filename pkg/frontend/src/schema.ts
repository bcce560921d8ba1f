import Papa from "papaparse";

/** Header of the per-(protocol, budget) aggregate CSV. */
export const SWEEP_HEADER = [
  "protocol",
  "n_copies",
  "reps",
  "mean_infidelity",
  "sd_of_mean",
  "purity_true",
  "gm_bound",
] as const;

/** Header of the per-state improvement-index CSV. */
export const UPSILON_HEADER = [
  "ensemble",
  "state_index",
  "n_copies",
  "reps",
  "c_log10",
  "a_log10",
  "g_log10",
  "upsilon",
] as const;

export class CsvError extends Error {}

/** One aggregate row; `raw` keeps the exact CSV strings per column. */
export interface SweepRow {
  protocol: string;
  nCopies: number;
  reps: number;
  meanInfidelity: number;
  sdOfMean: number;
  purityTrue: number;
  gmBound: number;
  raw: Record<string, string>;
}

/** One improvement-index row; `raw` keeps the exact CSV strings. */
export interface UpsilonRow {
  ensemble: string;
  stateIndex: number;
  nCopies: number;
  reps: number;
  cLog10: number;
  aLog10: number;
  gLog10: number;
  upsilon: number;
  raw: Record<string, string>;
}

function splitRows(
  text: string,
  expected: readonly string[],
  source: string,
): Record<string, string>[] {
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0]!;
    throw new CsvError(`${source}: malformed CSV (${first.message})`);
  }
  const got = parsed.meta.fields ?? [];
  const missing = expected.filter((c) => !got.includes(c));
  const extra = got.filter((c) => !(expected as readonly string[]).includes(c));
  if (missing.length > 0 || extra.length > 0) {
    const parts = [];
    if (missing.length > 0) parts.push(`missing column(s): ${missing.join(", ")}`);
    if (extra.length > 0) parts.push(`unexpected column(s): ${extra.join(", ")}`);
    throw new CsvError(
      `${source}: ${parts.join("; ")}; expected header "${expected.join(",")}"`,
    );
  }
  if (parsed.data.length === 0) {
    throw new CsvError(`${source}: no data rows`);
  }
  return parsed.data;
}

function num(
  row: Record<string, string>,
  column: string,
  source: string,
  index: number,
): number {
  const text = row[column];
  const value = Number(text);
  if (text === undefined || text === "" || !Number.isFinite(value)) {
    throw new CsvError(
      `${source}: row ${index + 1}: column "${column}" is not a finite number (got "${text}")`,
    );
  }
  return value;
}

/** Parse and validate aggregate-CSV text (sweep over budget or purity). */
export function parseSweepCsv(text: string, source = "results.csv"): SweepRow[] {
  return splitRows(text, SWEEP_HEADER, source).map((raw, i) => ({
    protocol: raw["protocol"] ?? "",
    nCopies: num(raw, "n_copies", source, i),
    reps: num(raw, "reps", source, i),
    meanInfidelity: num(raw, "mean_infidelity", source, i),
    sdOfMean: num(raw, "sd_of_mean", source, i),
    purityTrue: num(raw, "purity_true", source, i),
    gmBound: num(raw, "gm_bound", source, i),
    raw,
  }));
}

/** Parse and validate improvement-index CSV text. */
export function parseUpsilonCsv(
  text: string,
  source = "upsilon.csv",
): UpsilonRow[] {
  return splitRows(text, UPSILON_HEADER, source).map((raw, i) => ({
    ensemble: raw["ensemble"] ?? "",
    stateIndex: num(raw, "state_index", source, i),
    nCopies: num(raw, "n_copies", source, i),
    reps: num(raw, "reps", source, i),
    cLog10: num(raw, "c_log10", source, i),
    aLog10: num(raw, "a_log10", source, i),
    gLog10: num(raw, "g_log10", source, i),
    upsilon: num(raw, "upsilon", source, i),
    raw,
  }));
}
