import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname, resolve } from "node:path";
import { pathToFileURL } from "node:url";
import yargs from "yargs";

import { CsvError, parseSweepCsv, parseUpsilonCsv } from "./schema.js";
import {
  renderInfidelityVsCopies,
  renderInfidelityVsPurity,
  renderUpsilonHistogram,
} from "./svg.js";

export const KINDS = ["sweep-n", "sweep-purity", "histogram"] as const;
export type Kind = (typeof KINDS)[number];

/** Render one figure kind from a CSV file into an SVG string. */
export function renderFile(kind: Kind, csvPath: string): string {
  const text = readFileSync(csvPath, "utf8");
  switch (kind) {
    case "sweep-n":
      return renderInfidelityVsCopies(parseSweepCsv(text, csvPath));
    case "sweep-purity":
      return renderInfidelityVsPurity(parseSweepCsv(text, csvPath));
    case "histogram":
      return renderUpsilonHistogram(parseUpsilonCsv(text, csvPath));
  }
}

export async function runCli(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .scriptName("figures")
    .option("kind", {
      choices: KINDS,
      demandOption: true,
      describe: "which figure to render",
    })
    .option("csv", {
      type: "string",
      demandOption: true,
      describe: "input CSV (results.csv or upsilon.csv)",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .strict()
    .fail((msg, err) => {
      throw err ?? new CsvError(msg ?? "bad arguments");
    })
    .parse();

  let svg: string;
  try {
    svg = renderFile(args.kind, resolve(args.csv));
  } catch (err) {
    // leave no output file behind on a bad or empty input
    process.stderr.write(`figures: ${(err as Error).message}\n`);
    return 1;
  }
  const outPath = resolve(args.out);
  mkdirSync(dirname(outPath), { recursive: true });
  writeFileSync(outPath, svg);
  return 0;
}

if (import.meta.url === pathToFileURL(process.argv[1] ?? "").href) {
  runCli(process.argv.slice(2)).then(
    (code) => process.exit(code),
    (err) => {
      process.stderr.write(`figures: ${(err as Error).message}\n`);
      process.exit(1);
    },
  );
}
