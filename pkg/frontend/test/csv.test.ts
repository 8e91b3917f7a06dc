import { describe, expect, it } from 'vitest';

import {
  CsvError,
  EmptyCsvError,
  MissingColumnError,
  numericCell,
  parseResultCsv,
  requireColumn,
} from '../src/csv';

const SAMPLE = `scenario,sweep,path,throughput_MBps,makespan_s
demo,1,WAN,38.682564,51.702857
demo,1,LAN,75.398067,26.525879
`;

describe('parseResultCsv', () => {
  it('splits header and rows', () => {
    const table = parseResultCsv(SAMPLE);
    expect(table.header).toEqual(['scenario', 'sweep', 'path', 'throughput_MBps', 'makespan_s']);
    expect(table.rows).toHaveLength(2);
    expect(table.rows[0]).toMatchObject({ path: 'WAN', sweep: '1' });
  });

  it('tolerates a missing trailing newline', () => {
    expect(parseResultCsv(SAMPLE.trimEnd()).rows).toHaveLength(2);
  });

  it('rejects a row with the wrong field count', () => {
    expect(() => parseResultCsv('a,b\n1,2,3\n', 'bad.csv')).toThrow(/line 2 has 3 fields/);
  });

  it('rejects fully empty input', () => {
    expect(() => parseResultCsv('', 'void.csv')).toThrow(EmptyCsvError);
    expect(() => parseResultCsv('\n\n', 'void.csv')).toThrow(/no data rows/);
  });
});

describe('requireColumn', () => {
  it('passes for present columns', () => {
    const table = parseResultCsv(SAMPLE);
    expect(() => requireColumn(table, 'throughput_MBps', 'x')).not.toThrow();
  });

  it('names the missing column in the diagnostic', () => {
    const table = parseResultCsv('scenario,sweep,path\na,1,WAN\n', 'short.csv');
    try {
      requireColumn(table, 'makespan_s', 'short.csv');
      expect.unreachable('should have thrown');
    } catch (err) {
      expect(err).toBeInstanceOf(MissingColumnError);
      expect((err as MissingColumnError).column).toBe('makespan_s');
      expect((err as Error).message).toContain('"makespan_s"');
      expect((err as Error).message).toContain('short.csv');
    }
  });
});

describe('numericCell', () => {
  it('coerces numeric text', () => {
    expect(numericCell({ v: '38.682564' }, 'v', 'x')).toBeCloseTo(38.682564);
  });

  it('rejects non-numeric text with the column name', () => {
    expect(() => numericCell({ v: 'fast' }, 'v', 'x.csv')).toThrow(CsvError);
    expect(() => numericCell({ v: 'fast' }, 'v', 'x.csv')).toThrow(/"v".*"fast"/);
    expect(() => numericCell({}, 'v', 'x.csv')).toThrow(/"v"/);
  });
});
