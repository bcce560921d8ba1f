export {
  CsvError,
  SWEEP_HEADER,
  UPSILON_HEADER,
  parseSweepCsv,
  parseUpsilonCsv,
} from "./schema.js";
export type { SweepRow, UpsilonRow } from "./schema.js";
export {
  binUpsilon,
  renderInfidelityVsCopies,
  renderInfidelityVsPurity,
  renderUpsilonHistogram,
} from "./svg.js";
export type { HistogramBin } from "./svg.js";
export { KINDS, renderFile, runCli } from "./cli.js";
export type { Kind } from "./cli.js";
