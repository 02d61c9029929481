// Minimal deterministic SVG scene building: no timestamps, no randomness,
// so identical inputs produce byte-identical files.

export const PALETTE = [
    '#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e',
    '#8c564b', '#17becf', '#7f7f7f', '#bcbd22', '#e377c2',
];

export interface Frame {
    x0: number;
    y0: number;
    width: number;
    height: number;
}

export function fmt(v: number): string {
    return Number(v.toFixed(2)).toString();
}

export class LogScale {
    readonly lo: number;
    readonly hi: number;

    constructor(lo: number, hi: number) {
        if (!(lo > 0) || !(hi > 0)) {
            throw new Error('log scale needs positive bounds');
        }
        this.lo = Math.log10(lo);
        this.hi = Math.log10(hi === lo ? lo * 10 : hi);
    }

    place(v: number, frame: Frame): number {
        const t = (Math.log10(v) - this.lo) / (this.hi - this.lo);
        return frame.y0 + frame.height - t * frame.height;
    }

    decades(): number[] {
        const out: number[] = [];
        const step = Math.max(1, Math.ceil((this.hi - this.lo) / 8));
        for (let d = Math.ceil(this.lo); d <= this.hi + 1e-9; d += step) {
            out.push(d);
        }
        return out;
    }
}

export class LinearScale {
    constructor(readonly lo: number, readonly hi: number) {}

    place(v: number, frame: Frame): number {
        const span = this.hi === this.lo ? 1 : this.hi - this.lo;
        return frame.x0 + ((v - this.lo) / span) * frame.width;
    }
}

export function polyline(points: Array<[number, number]>, color: string): string {
    const path = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(' ');
    return `<polyline fill="none" stroke="${color}" stroke-width="1.5" points="${path}"/>`;
}

export function circle(x: number, y: number, color: string, r = 2): string {
    return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${color}"/>`;
}

export function text(x: number, y: number, content: string, size = 11, anchor = 'start'): string {
    return (
        `<text x="${fmt(x)}" y="${fmt(y)}" font-family="monospace" ` +
        `font-size="${size}" text-anchor="${anchor}">${escapeXml(content)}</text>`
    );
}

export function line(x1: number, y1: number, x2: number, y2: number, color = '#333'): string {
    return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${color}" stroke-width="1"/>`;
}

export function escapeXml(s: string): string {
    return s
        .replace(/&/g, '&amp;')
        .replace(/</g, '&lt;')
        .replace(/>/g, '&gt;')
        .replace(/"/g, '&quot;');
}

export function axes(frame: Frame, yScale: LogScale, xLabelAt: Array<[number, string]>): string {
    const parts: string[] = [];
    parts.push(line(frame.x0, frame.y0, frame.x0, frame.y0 + frame.height));
    parts.push(line(frame.x0, frame.y0 + frame.height, frame.x0 + frame.width, frame.y0 + frame.height));
    for (const d of yScale.decades()) {
        const y = yScale.place(10 ** d, frame);
        parts.push(line(frame.x0 - 3, y, frame.x0, y));
        parts.push(text(frame.x0 - 6, y + 3, `1e${d}`, 10, 'end'));
    }
    for (const [x, label] of xLabelAt) {
        parts.push(line(x, frame.y0 + frame.height, x, frame.y0 + frame.height + 3));
        parts.push(text(x, frame.y0 + frame.height + 14, label, 10, 'middle'));
    }
    return parts.join('\n');
}

export function document(width: number, height: number, body: string): string {
    return (
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}">\n<rect width="${width}" height="${height}" fill="white"/>\n` +
        body +
        '\n</svg>\n'
    );
}
