// Small numeric helpers for the figure renderers.

/** Quantile with linear interpolation between order statistics. */
export function quantile(sorted: number[], q: number): number {
    const n = sorted.length;
    if (n === 0) throw new Error('quantile of empty array');
    const pos = q * (n - 1);
    const lo = Math.floor(pos);
    const hi = Math.ceil(pos);
    if (lo === hi) return sorted[lo];
    return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

export interface BoxStats {
    q1: number;
    median: number;
    q3: number;
    whiskerLo: number;
    whiskerHi: number;
    outliers: number[];
}

/** Tukey box: whiskers at the most extreme points within 1.5 IQR. */
export function boxStats(values: number[]): BoxStats {
    const sorted = [...values].sort((a, b) => a - b);
    const q1 = quantile(sorted, 0.25);
    const median = quantile(sorted, 0.5);
    const q3 = quantile(sorted, 0.75);
    const iqr = q3 - q1;
    const loFence = q1 - 1.5 * iqr;
    const hiFence = q3 + 1.5 * iqr;
    const inside = sorted.filter(v => v >= loFence && v <= hiFence);
    return {
        q1,
        median,
        q3,
        whiskerLo: inside[0],
        whiskerHi: inside[inside.length - 1],
        outliers: sorted.filter(v => v < loFence || v > hiFence),
    };
}

/** Counts per bin over [lo, hi); the top edge closes the last bin. */
export function histCounts(values: number[], bins: number, lo: number, hi: number): number[] {
    const counts = new Array(bins).fill(0);
    const width = (hi - lo) / bins;
    for (const v of values) {
        if (v < lo || v > hi) continue;
        const i = Math.min(Math.floor((v - lo) / width), bins - 1);
        counts[i] += 1;
    }
    return counts;
}
