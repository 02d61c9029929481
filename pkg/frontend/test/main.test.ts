import { mkdtempSync, existsSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { describe, expect, it } from 'vitest';
import { run } from '../src/main';

const TRACE = [
    '# generated: 2000-01-01T00:00:00',
    'experiment,case_id,cycle,off_norm,off_rel',
    'blocksizes,n12-pi2x6,0,5.0,0.5',
    'blocksizes,n12-pi2x6,1,0.2,0.02',
    'blocksizes,n12-pi3x4,0,5.0,0.5',
    'blocksizes,n12-pi3x4,1,0.1,0.01',
].join('\n') + '\n';

describe('cli entry', () => {
    it('renders a trace file and is stable across reruns', () => {
        const dir = mkdtempSync(join(tmpdir(), 'plotkit-'));
        const input = join(dir, 'trace.csv');
        const out = join(dir, 'fig.svg');
        writeFileSync(input, TRACE);
        expect(run(['blocksizes', input, out])).toBe(0);
        const first = readFileSync(out, 'utf8');
        expect(run(['blocksizes', input, out])).toBe(0);
        expect(readFileSync(out, 'utf8')).toBe(first);
        expect(first).toContain('<svg');
        // input untouched
        expect(readFileSync(input, 'utf8')).toBe(TRACE);
    });

    it('fails without writing on empty input', () => {
        const dir = mkdtempSync(join(tmpdir(), 'plotkit-'));
        const input = join(dir, 'empty.csv');
        const out = join(dir, 'fig.svg');
        writeFileSync(input, '# nothing\n');
        expect(run(['strategies', input, out])).toBe(1);
        expect(existsSync(out)).toBe(false);
    });

    it('rejects unknown figure kinds', () => {
        const dir = mkdtempSync(join(tmpdir(), 'plotkit-'));
        const input = join(dir, 'trace.csv');
        writeFileSync(input, TRACE);
        expect(run(['volcano', input, join(dir, 'x.svg')])).toBe(1);
    });

    it('merges multiple inputs sharing the schema', () => {
        const dir = mkdtempSync(join(tmpdir(), 'plotkit-'));
        const a = join(dir, 'a.csv');
        const b = join(dir, 'b.csv');
        const out = join(dir, 'fig.svg');
        writeFileSync(a, TRACE);
        writeFileSync(b, TRACE.replace(/n12/g, 'n24'));
        expect(run(['blocksizes', a, b, out])).toBe(0);
        const svg = readFileSync(out, 'utf8');
        expect(svg).toContain('n12-pi2x6');
        expect(svg).toContain('n24-pi2x6');
    });
});
