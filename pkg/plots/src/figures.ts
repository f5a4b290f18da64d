// The four figure kinds. Every renderer is a pure function from parsed
// rows and the pinned style to SVG text, so identical inputs give
// identical bytes.

import * as fs from 'fs';
import * as path from 'path';
import {
    AreaRow,
    SchemaError,
    ShrinkageRow,
    StudyRow,
    distinct,
    readAreasCsv,
    readShrinkageCsv,
    readStudyCsv,
} from './csv';
import { boxStats, histCounts } from './stats';
import { Svg, fmtTick, fnum, linearScale, padDomain, ticks } from './svg';

export const FIGURE_KINDS = ['outlier_probs', 'shrinkage_box', 'shrinkage_hist', 'metric_lines'] as const;
export type FigureKind = typeof FIGURE_KINDS[number];

export interface PlotJob {
    kind: FigureKind;
    input: string;
    output: string;
}

export interface MethodStyle {
    label: string;
    color: string;
    dash: string;
}

export interface Style {
    fontFamily: string;
    fontSize: number;
    titleFontSize: number;
    background: string;
    axisColor: string;
    gridColor: string;
    methods: Record<string, MethodStyle>;
    pointRadius: number;
    strokeWidth: number;
    boxWidth: number;
    boxGap: number;
    histBins: number;
    panel: { width: number; height: number; gapX: number; gapY: number };
    margin: { top: number; right: number; bottom: number; left: number };
    outlierProbs: { width: number; height: number };
}

export function loadStyle(stylePath: string): Style {
    const style = JSON.parse(fs.readFileSync(stylePath, 'utf-8')) as Style;
    for (const key of ['fontFamily', 'methods', 'panel', 'margin'] as const) {
        if (style[key] === undefined) {
            throw new SchemaError(`style file ${stylePath} lacks '${key}'`);
        }
    }
    return style;
}

/** Style file shipped next to package.json, the pinned default. */
export function defaultStylePath(): string {
    return path.resolve(__dirname, '..', 'style.json');
}

export function render(job: PlotJob, style: Style): string {
    switch (job.kind) {
        case 'outlier_probs':
            return renderOutlierProbs(readAreasCsv(job.input), style);
        case 'shrinkage_box':
            return renderShrinkageBox(readShrinkageCsv(job.input), style);
        case 'shrinkage_hist':
            return renderShrinkageHist(readShrinkageCsv(job.input), style);
        case 'metric_lines':
            return renderMetricLines(readStudyCsv(job.input), style);
    }
}

function methodStyle(style: Style, method: string): MethodStyle {
    return style.methods[method] ?? { label: method, color: style.axisColor, dash: '' };
}

/** Canonical drawing order: the classical fit first, then the mixture. */
function orderedMethods(present: string[]): string[] {
    const canonical = ['fh', 'mixture'].filter(m => present.includes(m));
    return canonical.concat(present.filter(m => !canonical.includes(m)));
}

function panelLetter(i: number): string {
    return `(${String.fromCharCode(97 + i)})`;
}

const T = (style: Style) => ({
    'font-family': style.fontFamily,
    'font-size': style.fontSize,
    fill: style.axisColor,
});

// ── outlier probabilities ───────────────────────────────────────────

export function renderOutlierProbs(rows: AreaRow[], style: Style): string {
    if (rows.some(r => r.outlierProb === null)) {
        throw new SchemaError(
            'outlier_prob is empty for some areas; classical fits carry no outlier probabilities');
    }
    const { width, height } = style.outlierProbs;
    const m = style.margin;
    const svg = new Svg(width, height, style.background);
    const x = linearScale([0, rows.length + 1], [m.left, width - m.right]);
    const y = linearScale([0, 1], [height - m.bottom, m.top]);

    for (const t of [0, 0.25, 0.5, 0.75, 1]) {
        svg.line(m.left, y(t), width - m.right, y(t), { stroke: style.gridColor, 'stroke-width': 1 });
        svg.el('text', {
            x: m.left - 7, y: y(t) + 3.5, 'text-anchor': 'end', ...T(style),
        }, fnum(t));
    }
    svg.line(m.left, y(0), width - m.right, y(0), { stroke: style.axisColor, 'stroke-width': 1 });
    svg.line(m.left, y(0), m.left, y(1), { stroke: style.axisColor, 'stroke-width': 1 });

    const xticks = ticks(1, rows.length, 8).filter(t => Number.isInteger(t) && t >= 1);
    for (const t of xticks) {
        svg.line(x(t), y(0), x(t), y(0) + 4, { stroke: style.axisColor, 'stroke-width': 1 });
        svg.el('text', { x: x(t), y: y(0) + 16, 'text-anchor': 'middle', ...T(style) }, String(t));
    }

    const mix = methodStyle(style, 'mixture');
    rows.forEach((r, i) => {
        svg.el('circle', {
            cx: x(i + 1), cy: y(r.outlierProb as number),
            r: style.pointRadius, fill: mix.color,
        });
    });

    svg.el('text', {
        x: (m.left + width - m.right) / 2, y: height - 12,
        'text-anchor': 'middle', ...T(style),
    }, 'area index');
    svg.el('text', {
        x: 15, y: (y(0) + y(1)) / 2, 'text-anchor': 'middle', ...T(style),
        transform: `rotate(-90 15 ${fnum((y(0) + y(1)) / 2)})`,
    }, 'outlier probability');
    return svg.toString();
}

// ── shrinkage boxplots ──────────────────────────────────────────────

export function renderShrinkageBox(rows: ShrinkageRow[], style: Style): string {
    const scenarios = distinct(rows.map(r => r.scenario));
    const ncols = Math.min(scenarios.length, 5);
    const nrows = Math.ceil(scenarios.length / ncols);
    const p = style.panel;
    const m = style.margin;
    const width = m.left + ncols * p.width + (ncols - 1) * p.gapX + m.right;
    const height = m.top + nrows * (p.height + p.gapY) - p.gapY + m.bottom;
    const svg = new Svg(width, height, style.background);

    scenarios.forEach((scenario, si) => {
        const px = m.left + (si % ncols) * (p.width + p.gapX);
        const py = m.top + Math.floor(si / ncols) * (p.height + p.gapY);
        const y = linearScale([0, 1], [py + p.height, py]);
        const methods = orderedMethods(distinct(
            rows.filter(r => r.scenario === scenario).map(r => r.method)));

        for (const t of [0, 0.25, 0.5, 0.75, 1]) {
            svg.line(px, y(t), px + p.width, y(t), { stroke: style.gridColor, 'stroke-width': 1 });
            if (si % ncols === 0) {
                svg.el('text', {
                    x: px - 7, y: y(t) + 3.5, 'text-anchor': 'end', ...T(style),
                }, fnum(t));
            }
        }
        svg.line(px, y(0), px + p.width, y(0), { stroke: style.axisColor, 'stroke-width': 1 });
        svg.line(px, y(0), px, y(1), { stroke: style.axisColor, 'stroke-width': 1 });

        const slot = p.width / methods.length;
        methods.forEach((method, mi) => {
            const values = rows
                .filter(r => r.scenario === scenario && r.method === method)
                .map(r => r.weight);
            const b = boxStats(values);
            const ms = methodStyle(style, method);
            const cx = px + slot * (mi + 0.5);
            const half = style.boxWidth / 2;
            const stroke = { stroke: ms.color, 'stroke-width': style.strokeWidth };

            svg.line(cx, y(b.whiskerLo), cx, y(b.q1), stroke);
            svg.line(cx, y(b.q3), cx, y(b.whiskerHi), stroke);
            svg.line(cx - half / 2, y(b.whiskerLo), cx + half / 2, y(b.whiskerLo), stroke);
            svg.line(cx - half / 2, y(b.whiskerHi), cx + half / 2, y(b.whiskerHi), stroke);
            svg.el('rect', {
                x: cx - half, y: y(b.q3), width: style.boxWidth,
                height: y(b.q1) - y(b.q3), fill: 'none', ...stroke,
            });
            svg.line(cx - half, y(b.median), cx + half, y(b.median), {
                ...stroke, 'stroke-width': style.strokeWidth * 1.5,
            });
            for (const v of b.outliers) {
                svg.el('circle', { cx, cy: y(v), r: style.pointRadius, fill: 'none', ...stroke });
            }
            svg.el('text', {
                x: cx, y: py + p.height + 15, 'text-anchor': 'middle', ...T(style),
            }, ms.label);
        });

        svg.el('text', {
            x: px + p.width / 2, y: py + p.height + 32, 'text-anchor': 'middle',
            ...T(style), 'font-size': style.titleFontSize,
        }, `${panelLetter(si)} ${scenario}`);
    });

    svg.el('text', {
        x: 15, y: m.top + p.height / 2, 'text-anchor': 'middle', ...T(style),
        transform: `rotate(-90 15 ${fnum(m.top + p.height / 2)})`,
    }, 'shrinkage weight');
    return svg.toString();
}

// ── shrinkage histograms ────────────────────────────────────────────

export function renderShrinkageHist(rows: ShrinkageRow[], style: Style): string {
    const scenarios = distinct(rows.map(r => r.scenario));
    const ncols = Math.min(scenarios.length, 2);
    const nrows = Math.ceil(scenarios.length / ncols);
    const p = style.panel;
    const m = style.margin;
    // each panel holds one sub-histogram per method, side by side
    const panelW = p.width + 60;
    const width = m.left + ncols * panelW + (ncols - 1) * p.gapX + m.right;
    const height = m.top + nrows * (p.height + p.gapY) - p.gapY + m.bottom;
    const svg = new Svg(width, height, style.background);

    scenarios.forEach((scenario, si) => {
        const px = m.left + (si % ncols) * (panelW + p.gapX);
        const py = m.top + Math.floor(si / ncols) * (p.height + p.gapY);
        const methods = orderedMethods(distinct(
            rows.filter(r => r.scenario === scenario).map(r => r.method)));
        const gap = 18;
        const subW = (panelW - gap * (methods.length - 1)) / methods.length;

        const counts = methods.map(method => histCounts(
            rows.filter(r => r.scenario === scenario && r.method === method).map(r => r.weight),
            style.histBins, 0, 1));
        const peak = Math.max(...counts.flat(), 1);

        methods.forEach((method, mi) => {
            const sx = px + mi * (subW + gap);
            const x = linearScale([0, 1], [sx, sx + subW]);
            const y = linearScale([0, peak], [py + p.height, py + 14]);
            const ms = methodStyle(style, method);

            svg.line(sx, y(0), sx + subW, y(0), { stroke: style.axisColor, 'stroke-width': 1 });
            svg.line(sx, y(0), sx, py + 14, { stroke: style.axisColor, 'stroke-width': 1 });
            for (const t of ticks(0, peak, 4)) {
                if (!Number.isInteger(t)) continue;
                svg.line(sx - 3, y(t), sx, y(t), { stroke: style.axisColor, 'stroke-width': 1 });
                if (mi === 0 && si % ncols === 0) {
                    svg.el('text', {
                        x: sx - 6, y: y(t) + 3.5, 'text-anchor': 'end', ...T(style),
                    }, String(t));
                }
            }
            for (const t of [0, 0.5, 1]) {
                svg.line(x(t), y(0), x(t), y(0) + 4, { stroke: style.axisColor, 'stroke-width': 1 });
                svg.el('text', {
                    x: x(t), y: y(0) + 16, 'text-anchor': 'middle', ...T(style),
                }, fnum(t));
            }

            const binW = subW / style.histBins;
            counts[mi].forEach((c, bi) => {
                if (c === 0) return;
                svg.el('rect', {
                    x: x(bi / style.histBins), y: y(c),
                    width: binW, height: y(0) - y(c),
                    fill: ms.color, 'fill-opacity': '0.75',
                    stroke: ms.color, 'stroke-width': 0.5,
                });
            });
            svg.el('text', {
                x: sx + subW / 2, y: py + 6, 'text-anchor': 'middle', ...T(style),
            }, ms.label);
        });

        svg.el('text', {
            x: px + panelW / 2, y: py + p.height + 32, 'text-anchor': 'middle',
            ...T(style), 'font-size': style.titleFontSize,
        }, `${panelLetter(si)} ${scenario}`);
    });

    svg.el('text', {
        x: (m.left + width - m.right) / 2, y: height - 10,
        'text-anchor': 'middle', ...T(style),
    }, 'shrinkage weight');
    return svg.toString();
}

// ── metric-vs-m lines ───────────────────────────────────────────────

const LINE_METRICS = ['MRSE', 'MRAE'];

export function renderMetricLines(rows: StudyRow[], style: Style): string {
    const wanted = rows.filter(r => r.group === 'all' && LINE_METRICS.includes(r.metric));
    if (wanted.length === 0) {
        throw new SchemaError("no MRSE/MRAE rows with group 'all' in study file");
    }
    const scenarios = distinct(wanted.map(r => r.scenario));
    const methods = orderedMethods(distinct(wanted.map(r => r.method)));
    const p = style.panel;
    const m = style.margin;
    const legendH = 22;
    const width = m.left + 2 * p.width + p.gapX + m.right;
    const height = m.top + legendH + scenarios.length * (p.height + p.gapY) - p.gapY + m.bottom;
    const svg = new Svg(width, height, style.background);

    // legend: one swatch per method, dotted vs solid as in the figures
    let lx = m.left;
    const ly = m.top;
    for (const method of methods) {
        const ms = methodStyle(style, method);
        const dash: Record<string, string> = ms.dash ? { 'stroke-dasharray': ms.dash } : {};
        svg.line(lx, ly, lx + 28, ly, {
            stroke: ms.color, 'stroke-width': style.strokeWidth, ...dash,
        });
        svg.el('text', { x: lx + 33, y: ly + 3.5, ...T(style) }, ms.label);
        lx += 33 + ms.label.length * 6.5 + 24;
    }

    scenarios.forEach((scenario, si) => {
        LINE_METRICS.forEach((metric, ci) => {
            const panelRows = wanted.filter(r => r.scenario === scenario && r.metric === metric);
            if (panelRows.length === 0) {
                throw new SchemaError(`scenario '${scenario}' has no ${metric} rows`);
            }
            const px = m.left + ci * (p.width + p.gapX);
            const py = m.top + legendH + si * (p.height + p.gapY);
            const ms = distinct(panelRows.map(r => String(r.m))).map(Number).sort((a, b) => a - b);
            const values = panelRows.map(r => r.value);
            const x = linearScale(padDomain(ms[0], ms[ms.length - 1], 0.1), [px, px + p.width]);
            const y = linearScale(padDomain(Math.min(...values), Math.max(...values)),
                [py + p.height, py]);

            const yt = ticks(y.domain[0], y.domain[1], 4);
            const step = yt.length > 1 ? yt[1] - yt[0] : 1;
            for (const t of yt) {
                svg.line(px, y(t), px + p.width, y(t), { stroke: style.gridColor, 'stroke-width': 1 });
                svg.el('text', {
                    x: px - 7, y: y(t) + 3.5, 'text-anchor': 'end', ...T(style),
                }, fmtTick(t, step));
            }
            svg.line(px, py + p.height, px + p.width, py + p.height,
                { stroke: style.axisColor, 'stroke-width': 1 });
            svg.line(px, py + p.height, px, py, { stroke: style.axisColor, 'stroke-width': 1 });
            for (const t of ms) {
                svg.line(x(t), py + p.height, x(t), py + p.height + 4,
                    { stroke: style.axisColor, 'stroke-width': 1 });
                svg.el('text', {
                    x: x(t), y: py + p.height + 16, 'text-anchor': 'middle', ...T(style),
                }, String(t));
            }

            for (const method of methods) {
                const series = ms.map(mv => {
                    const hit = panelRows.find(r => r.method === method && r.m === mv);
                    return hit === undefined ? null : ([x(mv), y(hit.value)] as [number, number]);
                }).filter((pt): pt is [number, number] => pt !== null);
                if (series.length === 0) continue;
                const st = methodStyle(style, method);
                const dash: Record<string, string> = st.dash ? { 'stroke-dasharray': st.dash } : {};
                svg.polyline(series, {
                    stroke: st.color, 'stroke-width': style.strokeWidth, ...dash,
                });
                for (const [cx, cy] of series) {
                    svg.el('circle', { cx, cy, r: style.pointRadius, fill: st.color });
                }
            }

            const caption = scenarios.length === 1
                ? `${panelLetter(si * 2 + ci)} ${metric}`
                : `${panelLetter(si * 2 + ci)} ${metric}, ${scenario}`;
            svg.el('text', {
                x: px + p.width / 2, y: py + p.height + 32, 'text-anchor': 'middle',
                ...T(style), 'font-size': style.titleFontSize,
            }, caption);
            svg.el('text', {
                x: px + p.width / 2, y: py + p.height + 45, 'text-anchor': 'middle', ...T(style),
            }, 'number of areas');
        });
    });

    return svg.toString();
}
