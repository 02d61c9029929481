// The three figure analogs: off-norm convergence per strategy, off-norm
// convergence per block size, and per-eigenvalue relative error per block
// size.  All functions are pure text -> SVG text.

import { AccuracyRow, TraceRow, parseAccuracyCsv, parseTraceCsv } from './csv';
import {
    Frame,
    LinearScale,
    LogScale,
    PALETTE,
    axes,
    circle,
    document as svgDocument,
    polyline,
    text,
} from './svg';

export type ConvergenceKind = 'strategies' | 'blocksizes';

const AXIS_FLOOR = 1e-16;

interface Series {
    label: string;
    points: Array<[number, number]>;
}

function groupTrace(rows: TraceRow[]): Series[] {
    const order: string[] = [];
    const byCase = new Map<string, Array<[number, number]>>();
    for (const row of rows) {
        if (!byCase.has(row.caseId)) {
            byCase.set(row.caseId, []);
            order.push(row.caseId);
        }
        byCase.get(row.caseId)!.push([row.cycle, row.offRel]);
    }
    return order.map((label) => ({ label, points: byCase.get(label)! }));
}

function clampPositive(v: number): { value: number; clamped: boolean } {
    if (!(v > AXIS_FLOOR)) {
        return { value: AXIS_FLOOR, clamped: true };
    }
    return { value: v, clamped: false };
}

export function plotConvergence(csvText: string, kind: ConvergenceKind = 'strategies'): string {
    const series = groupTrace(parseTraceCsv(csvText));
    const width = 760;
    const height = 460;
    const frame: Frame = { x0: 70, y0: 40, width: 520, height: 360 };

    let clampedAny = false;
    let maxCycle = 1;
    let lo = Number.POSITIVE_INFINITY;
    let hi = 0;
    const cleaned: Series[] = series.map((s) => ({
        label: s.label,
        points: s.points.map(([cycle, offRel]) => {
            const { value, clamped } = clampPositive(offRel);
            clampedAny = clampedAny || clamped;
            maxCycle = Math.max(maxCycle, cycle);
            lo = Math.min(lo, value);
            hi = Math.max(hi, value);
            return [cycle, value] as [number, number];
        }),
    }));

    const yScale = new LogScale(lo, hi);
    const xScale = new LinearScale(0, maxCycle);
    const parts: string[] = [];
    const title = kind === 'strategies'
        ? 'Off-norm convergence per pivot strategy'
        : 'Off-norm convergence per block size';
    parts.push(text(frame.x0, 24, title, 13));
    const xTicks: Array<[number, string]> = [];
    const tickStep = Math.max(1, Math.ceil(maxCycle / 10));
    for (let c = 0; c <= maxCycle; c += tickStep) {
        xTicks.push([xScale.place(c, frame), String(c)]);
    }
    parts.push(axes(frame, yScale, xTicks));
    parts.push(text(frame.x0 + frame.width / 2, height - 8, 'cycle', 11, 'middle'));
    parts.push(text(14, frame.y0 - 14, 'off / ||A||_F', 11));

    cleaned.forEach((s, k) => {
        const color = PALETTE[k % PALETTE.length];
        const pts = s.points.map(
            ([cycle, v]) => [xScale.place(cycle, frame), yScale.place(v, frame)] as [number, number],
        );
        parts.push(polyline(pts, color));
        for (const [x, y] of pts) {
            parts.push(circle(x, y, color, 2));
        }
        const ly = frame.y0 + 14 * k;
        parts.push(circle(frame.x0 + frame.width + 16, ly - 3, color, 3));
        parts.push(text(frame.x0 + frame.width + 24, ly, s.label, 9));
    });
    if (clampedAny) {
        parts.push(text(frame.x0, height - 24, `values below 1e-16 clamped to the axis floor`, 10));
    }
    return svgDocument(width, height, parts.join('\n'));
}

function groupAccuracy(rows: AccuracyRow[]): Map<number, AccuracyRow[]> {
    const grouped = new Map<number, AccuracyRow[]>();
    for (const row of rows) {
        if (!grouped.has(row.blockSize)) {
            grouped.set(row.blockSize, []);
        }
        grouped.get(row.blockSize)!.push(row);
    }
    return grouped;
}

export function plotAccuracy(csvText: string): string {
    const rows = parseAccuracyCsv(csvText);
    const grouped = groupAccuracy(rows);
    const blockSizes = [...grouped.keys()].sort((a, b) => a - b);
    const width = 760;
    const panelHeight = 170;
    const height = 60 + blockSizes.length * panelHeight;

    let clampedAny = false;
    const parts: string[] = [];
    parts.push(text(70, 24, 'Relative eigenvalue error per block size', 13));

    blockSizes.forEach((b, panel) => {
        const frame: Frame = {
            x0: 70,
            y0: 46 + panel * panelHeight,
            width: 620,
            height: panelHeight - 50,
        };
        const data = grouped.get(b)!;
        let lo = Number.POSITIVE_INFINITY;
        let hi = 0;
        const cleaned = data.map((row) => {
            const { value, clamped } = clampPositive(row.relErr);
            clampedAny = clampedAny || clamped;
            lo = Math.min(lo, value);
            hi = Math.max(hi, value);
            return { eigIndex: row.eigIndex, value };
        });
        const maxIndex = Math.max(1, ...cleaned.map((r) => r.eigIndex));
        const yScale = new LogScale(lo, hi);
        const xScale = new LinearScale(0, maxIndex);
        const xTicks: Array<[number, string]> = [];
        const tickStep = Math.max(1, Math.ceil(maxIndex / 10));
        for (let k = 0; k <= maxIndex; k += tickStep) {
            xTicks.push([xScale.place(k, frame), String(k)]);
        }
        parts.push(axes(frame, yScale, xTicks));
        parts.push(text(frame.x0 + frame.width + 8, frame.y0 + 12, `block ${b}`, 11));
        const color = PALETTE[panel % PALETTE.length];
        for (const row of cleaned) {
            parts.push(circle(xScale.place(row.eigIndex, frame), yScale.place(row.value, frame), color, 2));
        }
    });
    parts.push(text(70, height - 10,
        clampedAny
            ? 'rel_err vs eigenvalue index; values below 1e-16 clamped to the axis floor'
            : 'rel_err vs eigenvalue index', 10));
    return svgDocument(width, height, parts.join('\n'));
}
