// Minimal deterministic SVG construction: no ids, no timestamps, all
// coordinates rounded the same way so identical inputs give identical
// bytes.

export function fnum(x: number): string {
    // 2 decimal places, trailing zeros dropped, -0 normalized
    const s = x.toFixed(2).replace(/\.?0+$/, '');
    return s === '-0' ? '0' : s;
}

export function esc(text: string): string {
    return text
        .replace(/&/g, '&amp;')
        .replace(/</g, '&lt;')
        .replace(/>/g, '&gt;')
        .replace(/"/g, '&quot;');
}

export interface Scale {
    (x: number): number;
    domain: [number, number];
    range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
    const [d0, d1] = domain;
    const [r0, r1] = range;
    const span = d1 - d0;
    const f = ((x: number) =>
        span === 0 ? (r0 + r1) / 2 : r0 + ((x - d0) / span) * (r1 - r0)) as Scale;
    f.domain = domain;
    f.range = range;
    return f;
}

/** Round tick positions covering the domain, at most `count + 1` of them. */
export function ticks(lo: number, hi: number, count: number): number[] {
    if (!(hi > lo)) return [lo];
    const rawStep = (hi - lo) / count;
    const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
    let step = mag;
    for (const mult of [1, 2, 2.5, 5, 10]) {
        if (mag * mult >= rawStep) {
            step = mag * mult;
            break;
        }
    }
    const start = Math.ceil(lo / step) * step;
    const out: number[] = [];
    for (let v = start; v <= hi + step * 1e-9; v += step) {
        // snap away accumulated float error so labels stay clean
        out.push(Number(v.toPrecision(12)));
    }
    return out;
}

/** Decimal places that keep ticks `step` apart distinguishable. */
export function tickDecimals(step: number): number {
    if (step >= 1) return 0;
    const d = -Math.floor(Math.log10(step));
    const scaled = Number((step * Math.pow(10, d)).toPrecision(12));
    return Number.isInteger(scaled) ? d : d + 1;
}

export function fmtTick(value: number, step: number): string {
    const s = value.toFixed(tickDecimals(step));
    return /^-0(\.0*)?$/.test(s) ? s.slice(1) : s;
}

/** Pad a domain by a fraction on each side; a degenerate domain gets a unit pad. */
export function padDomain(lo: number, hi: number, frac = 0.06): [number, number] {
    if (hi === lo) return [lo - 1, hi + 1];
    const pad = (hi - lo) * frac;
    return [lo - pad, hi + pad];
}

export class Svg {
    private parts: string[] = [];

    constructor(readonly width: number, readonly height: number, background: string) {
        this.parts.push(
            `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
            `viewBox="0 0 ${width} ${height}">`);
        this.parts.push(`<rect width="${width}" height="${height}" fill="${background}"/>`);
    }

    el(tag: string, attrs: Record<string, string | number>, text?: string): void {
        const a = Object.entries(attrs)
            .map(([k, v]) => ` ${k}="${typeof v === 'number' ? fnum(v) : esc(String(v))}"`)
            .join('');
        if (text === undefined) {
            this.parts.push(`<${tag}${a}/>`);
        } else {
            this.parts.push(`<${tag}${a}>${esc(text)}</${tag}>`);
        }
    }

    line(x1: number, y1: number, x2: number, y2: number, attrs: Record<string, string | number>): void {
        this.el('line', { x1, y1, x2, y2, ...attrs });
    }

    polyline(points: [number, number][], attrs: Record<string, string | number>): void {
        const pts = points.map(([x, y]) => `${fnum(x)},${fnum(y)}`).join(' ');
        this.el('polyline', { points: pts, fill: 'none', ...attrs });
    }

    toString(): string {
        return this.parts.join('\n') + '\n</svg>\n';
    }
}
