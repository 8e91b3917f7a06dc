import * as fs from 'node:fs';
import * as path from 'node:path';
import { fileURLToPath } from 'node:url';

import { describe, expect, it } from 'vitest';

import { CHART_SPECS, specFor } from '../src/chartspec';
import { EmptyCsvError, MissingColumnError, parseResultCsv } from '../src/csv';
import { renderChart } from '../src/svg';

const FIXTURES = fileURLToPath(new URL('../fixtures', import.meta.url));

function fixture(name: string) {
  return parseResultCsv(fs.readFileSync(path.join(FIXTURES, `${name}.csv`), 'utf8'), name);
}

describe('shipped chart specs', () => {
  it('cover every fixture scenario with valid columns', () => {
    const fixtures = fs.readdirSync(FIXTURES).map((n) => path.basename(n, '.csv')).sort();
    expect(CHART_SPECS.map((s) => s.scenario).sort()).toEqual(fixtures);
    for (const spec of CHART_SPECS) {
      const table = fixture(spec.scenario);
      for (const column of [spec.xColumn, spec.seriesColumn, spec.yColumn]) {
        expect(table.header).toContain(column);
      }
    }
  });

  it('fall back to a generic line chart for unknown scenarios', () => {
    const spec = specFor('my_experiment');
    expect(spec.kind).toBe('line');
    expect(spec.yColumn).toBe('throughput_MBps');
    expect(spec.title).toBe('my_experiment');
  });
});

describe('renderChart', () => {
  it('renders a two-series line chart for the buffer sweep', () => {
    const svg = renderChart(fixture('fig3_netperf'), specFor('fig3_netperf'));
    expect(svg.startsWith('<svg ')).toBe(true);
    expect(svg.trimEnd().endsWith('</svg>')).toBe(true);
    expect(svg.match(/<polyline /g)).toHaveLength(2); // LAN and WAN
    expect(svg).toContain('>LAN<');
    expect(svg).toContain('>WAN<');
    expect(svg).toContain('>64k<'); // log-axis byte labels
    expect(svg).toContain('>64M<');
  });

  it('renders grouped bars for the tape runs', () => {
    const svg = renderChart(fixture('fig7_tape'), specFor('fig7_tape'));
    expect(svg).not.toContain('<polyline');
    expect((svg.match(/<rect /g) ?? []).length).toBeGreaterThan(8); // bars + legend + bg
    expect(svg).toContain('elapsed time (s)');
  });

  it('is byte-identical across renders', () => {
    for (const spec of CHART_SPECS) {
      const table = fixture(spec.scenario);
      expect(renderChart(table, spec)).toBe(renderChart(table, spec));
    }
  });

  it('contains no timestamps or environment-dependent text', () => {
    const svg = renderChart(fixture('fig4_streams'), specFor('fig4_streams'));
    expect(svg).not.toMatch(/\d{4}-\d{2}-\d{2}/);
    expect(svg).not.toContain(process.cwd());
  });

  it('names a missing column in its diagnostic', () => {
    const table = parseResultCsv('scenario,sweep,path,throughput_MBps\nfig7_tape,1,offdrive,8.58\n', 't.csv');
    try {
      renderChart(table, specFor('fig7_tape'), 't.csv');
      expect.unreachable('should have thrown');
    } catch (err) {
      expect(err).toBeInstanceOf(MissingColumnError);
      expect((err as Error).message).toContain('"makespan_s"');
    }
  });

  it('rejects a header-only CSV', () => {
    const table = parseResultCsv('scenario,sweep,path,throughput_MBps,makespan_s\n', 'h.csv');
    expect(() => renderChart(table, specFor('fig6_pftp_read'), 'h.csv')).toThrow(EmptyCsvError);
  });

  it('rejects nonpositive x values on a log axis', () => {
    const table = parseResultCsv('scenario,sweep,path,throughput_MBps,makespan_s\ns,0,WAN,1,1\n');
    expect(() => renderChart(table, specFor('fig3_netperf'))).toThrow(/log-scale/);
  });

  it('escapes markup in labels', () => {
    const table = parseResultCsv('scenario,sweep,path,throughput_MBps,makespan_s\ns,1,<&>,1,1\n');
    const svg = renderChart(table, specFor('custom'));
    expect(svg).toContain('&lt;&amp;&gt;');
    expect(svg).not.toContain('><&><');
  });
});
