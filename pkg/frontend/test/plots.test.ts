import { describe, expect, it } from 'vitest';
import { plotAccuracy, plotConvergence } from '../src/plots';

const TRACE_HEADER = 'experiment,case_id,cycle,off_norm,off_rel';

function traceCsv(cases: number, cycles: number): string {
    const lines = [TRACE_HEADER];
    for (let c = 0; c < cases; c += 1) {
        for (let k = 0; k <= cycles; k += 1) {
            const off = 10 ** (-k - c * 0.1);
            lines.push(`strategies,case-${c},${k},${off},${off / 10}`);
        }
    }
    return lines.join('\n') + '\n';
}

const ACC_HEADER =
    'case_id,block_size,eig_index,lambda_oracle_re,lambda_oracle_im,lambda_est_re,lambda_est_im,rel_err';

describe('plotConvergence', () => {
    it('renders one labelled line per case id', () => {
        const svg = plotConvergence(traceCsv(5, 8), 'strategies');
        expect(svg.match(/<polyline/g)).toHaveLength(5);
        for (let c = 0; c < 5; c += 1) {
            expect(svg).toContain(`case-${c}`);
        }
    });

    it('is deterministic and finite', () => {
        const a = plotConvergence(traceCsv(3, 6), 'blocksizes');
        const b = plotConvergence(traceCsv(3, 6), 'blocksizes');
        expect(a).toBe(b);
        expect(a).not.toMatch(/NaN|Infinity/);
    });

    it('clamps zero off-norms to the axis floor with a caption note', () => {
        const text = [
            TRACE_HEADER,
            'strategies,c,0,1.0,0.5',
            'strategies,c,1,0.0,0.0',
        ].join('\n');
        const svg = plotConvergence(text);
        expect(svg).toContain('clamped to the axis floor');
        expect(svg).not.toMatch(/NaN|Infinity/);
    });

    it('throws on empty input', () => {
        expect(() => plotConvergence('')).toThrowError(/empty CSV/);
    });
});

describe('plotAccuracy', () => {
    it('renders a single marker for a single row', () => {
        const svg = plotAccuracy([ACC_HEADER, 'c,2,0,1,0,1,0,1e-12'].join('\n'));
        expect(svg.match(/<circle/g)).toHaveLength(1);
        expect(svg).toContain('block 2');
    });

    it('renders one panel per block size', () => {
        const lines = [ACC_HEADER];
        for (const b of [2, 5, 10]) {
            for (let k = 0; k < 4; k += 1) {
                lines.push(`c,${b},${k},1,0,1,0,${10 ** (-11 - k)}`);
            }
        }
        const svg = plotAccuracy(lines.join('\n'));
        expect(svg).toContain('block 2');
        expect(svg).toContain('block 5');
        expect(svg).toContain('block 10');
        expect(svg.match(/<circle/g)).toHaveLength(12);
    });

    it('notes clamping of sub-floor errors', () => {
        const svg = plotAccuracy([ACC_HEADER, 'c,2,0,1,0,1,0,1e-20'].join('\n'));
        expect(svg).toContain('clamped to the axis floor');
        expect(svg).not.toMatch(/NaN|Infinity/);
    });
});
