import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { fileURLToPath } from 'node:url';

import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { main } from '../src/cli';

const FIXTURES = fileURLToPath(new URL('../fixtures', import.meta.url));
const SCENARIOS = fs.readdirSync(FIXTURES).map((n) => path.basename(n, '.csv')).sort();

let tmp: string;

beforeEach(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'plotgen-'));
  vi.spyOn(console, 'log').mockImplementation(() => {});
  vi.spyOn(console, 'error').mockImplementation(() => {});
});

afterEach(() => {
  vi.restoreAllMocks();
  fs.rmSync(tmp, { recursive: true, force: true });
});

describe('plotgen CLI', () => {
  it('renders every canned CSV and a re-render is byte-identical', () => {
    const first = path.join(tmp, 'first');
    const second = path.join(tmp, 'second');
    expect(main(['--in', FIXTURES, '--out', first])).toBe(0);
    expect(main(['--in', FIXTURES, '--out', second])).toBe(0);

    const rendered = fs.readdirSync(first).sort();
    expect(rendered).toEqual(SCENARIOS.map((s) => `${s}.svg`));
    for (const name of rendered) {
      const a = fs.readFileSync(path.join(first, name));
      const b = fs.readFileSync(path.join(second, name));
      expect(a.equals(b), `${name} differs between renders`).toBe(true);
    }
  });

  it('prints each written chart path', () => {
    const out = path.join(tmp, 'charts');
    main(['--in', FIXTURES, '--out', out]);
    const logged = vi.mocked(console.log).mock.calls.map((c) => String(c[0]));
    expect(logged).toHaveLength(SCENARIOS.length);
    expect(logged[0]).toBe(path.join(out, `${SCENARIOS[0]}.svg`));
  });

  it('reports a broken CSV, writes no chart for it, and exits 1', () => {
    const inDir = path.join(tmp, 'in');
    fs.mkdirSync(inDir);
    fs.copyFileSync(path.join(FIXTURES, 'fig4_streams.csv'), path.join(inDir, 'fig4_streams.csv'));
    // tape chart plots makespan_s; drop that column to trigger the diagnostic
    fs.writeFileSync(path.join(inDir, 'fig7_tape.csv'),
      'scenario,sweep,path,throughput_MBps\nfig7_tape,1,offdrive,8.58\n');
    const out = path.join(tmp, 'charts');

    expect(main(['--in', inDir, '--out', out])).toBe(1);
    expect(fs.readdirSync(out)).toEqual(['fig4_streams.svg']); // good one still rendered
    const errors = vi.mocked(console.error).mock.calls.map((c) => String(c[0]));
    expect(errors.some((e) => e.includes('"makespan_s"'))).toBe(true);
  });

  it('rejects an empty input directory', () => {
    const inDir = path.join(tmp, 'none');
    fs.mkdirSync(inDir);
    expect(main(['--in', inDir, '--out', path.join(tmp, 'charts')])).toBe(1);
  });

  it('rejects bad arguments with usage', () => {
    expect(main(['--in', FIXTURES])).toBe(1);
    expect(main(['--frobnicate'])).toBe(1);
    const errors = vi.mocked(console.error).mock.calls.map((c) => String(c[0]));
    expect(errors.some((e) => e.includes('usage:'))).toBe(true);
  });

  it('rejects a missing input directory', () => {
    expect(main(['--in', path.join(tmp, 'absent'), '--out', tmp])).toBe(1);
  });
});
