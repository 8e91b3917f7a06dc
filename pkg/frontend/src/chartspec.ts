/**
 * Chart specifications: fixed, committed styling per scenario.
 *
 * A spec names the columns it reads (validated against the CSV header at
 * render time), the chart family, and the axis scale. Scenario ids without
 * a shipped spec fall back to a linear throughput line chart, so custom
 * experiment CSVs still render.
 */

export type ChartKind = 'line' | 'bars';
export type XScale = 'linear' | 'log';

export interface ChartSpec {
  scenario: string;
  title: string;
  kind: ChartKind;
  xColumn: string;
  seriesColumn: string;
  yColumn: string;
  xScale: XScale;
  xLabel: string;
  yLabel: string;
}

const THROUGHPUT = 'throughput_MBps';
const MAKESPAN = 'makespan_s';

function spec(partial: Partial<ChartSpec> & { scenario: string; title: string }): ChartSpec {
  return {
    kind: 'line',
    xColumn: 'sweep',
    seriesColumn: 'path',
    yColumn: THROUGHPUT,
    xScale: 'linear',
    xLabel: 'sweep',
    yLabel: 'throughput (MB/s)',
    ...partial,
  };
}

export const CHART_SPECS: readonly ChartSpec[] = [
  spec({
    scenario: 'fig3_netperf',
    title: 'Memory-to-memory transfer speed vs. socket buffer',
    xScale: 'log',
    xLabel: 'TCP buffer (bytes)',
  }),
  spec({
    scenario: 'fig4_streams',
    title: 'Aggregate speed vs. parallel TCP streams',
    xLabel: 'streams',
  }),
  spec({
    scenario: 'fig5_client_api',
    title: 'Client API transfer speed vs. API buffer',
    xScale: 'log',
    xLabel: 'API buffer (bytes)',
  }),
  spec({
    scenario: 'fig6_pftp_read',
    title: 'Aggregate read speed vs. concurrent files',
    xLabel: 'concurrent files',
  }),
  spec({
    scenario: 'fig7_tape',
    title: 'Tape read elapsed time vs. concurrent files',
    kind: 'bars',
    yColumn: MAKESPAN,
    xLabel: 'concurrent files',
    yLabel: 'elapsed time (s)',
  }),
  spec({
    scenario: 'fig8_write',
    title: 'Aggregate write speed vs. concurrent files',
    xLabel: 'concurrent files',
  }),
  spec({
    scenario: 'fig9_relay',
    title: 'Read speed by daemon placement vs. concurrent files',
    xLabel: 'concurrent files',
  }),
  spec({
    scenario: 'xrsl_stagein',
    title: 'Stage-in transfer speed per input file',
    kind: 'bars',
    xLabel: 'transfer',
  }),
];

export function specFor(scenario: string): ChartSpec {
  const shipped = CHART_SPECS.find((s) => s.scenario === scenario);
  if (shipped !== undefined) {
    return shipped;
  }
  return spec({ scenario, title: scenario });
}
