export {
  CsvError,
  EmptyCsvError,
  MissingColumnError,
  EXPECTED_HEADER,
  parseResultCsv,
  requireColumn,
  numericCell,
} from './csv';
export type { ResultTable } from './csv';
export { CHART_SPECS, specFor } from './chartspec';
export type { ChartKind, ChartSpec, XScale } from './chartspec';
export { renderChart } from './svg';
export { main } from './cli';
