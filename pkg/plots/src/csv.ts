// Readers for the three result-file schemas the renderer consumes.
// Each reader checks the header, parses numerics, and reports the
// offending line on bad input; none of them ever writes.

import * as fs from 'fs';
import Papa from 'papaparse';

export class SchemaError extends Error {}

export interface AreaRow {
    areaId: string;
    outlierProb: number | null;
    shrinkage: number;
}

export interface ShrinkageRow {
    scenario: string;
    method: string;
    areaId: string;
    weight: number;
    contaminated: boolean;
}

export interface StudyRow {
    scenario: string;
    m: number;
    method: string;
    group: string;
    metric: string;
    value: number;
}

function parseFile(path: string, requiredColumns: string[]): Record<string, string>[] {
    let text: string;
    try {
        text = fs.readFileSync(path, 'utf-8');
    } catch (err: any) {
        throw new SchemaError(`cannot read ${path}: ${err.message}`);
    }
    const parsed = Papa.parse<Record<string, string>>(text, {
        header: true,
        skipEmptyLines: true,
    });
    if (parsed.errors.length > 0) {
        const e = parsed.errors[0];
        const where = e.row === undefined ? '' : ` (row ${e.row + 2})`;
        throw new SchemaError(`${path}: ${e.message}${where}`);
    }
    const fields = parsed.meta.fields ?? [];
    for (const col of requiredColumns) {
        if (!fields.includes(col)) {
            throw new SchemaError(
                `${path}: missing column '${col}' (header has: ${fields.join(', ')})`);
        }
    }
    if (parsed.data.length === 0) {
        throw new SchemaError(`${path}: no data rows`);
    }
    return parsed.data;
}

function num(path: string, row: number, column: string, raw: string): number {
    const v = Number(raw);
    if (raw === '' || raw === undefined || !Number.isFinite(v)) {
        throw new SchemaError(`${path}: line ${row + 2}: bad ${column} value ${JSON.stringify(raw)}`);
    }
    return v;
}

export function readAreasCsv(path: string): AreaRow[] {
    const rows = parseFile(path, ['area_id', 'outlier_prob', 'shrinkage']);
    return rows.map((r, i) => ({
        areaId: r.area_id,
        // empty for fits without component labels
        outlierProb: r.outlier_prob === '' ? null : num(path, i, 'outlier_prob', r.outlier_prob),
        shrinkage: num(path, i, 'shrinkage', r.shrinkage),
    }));
}

export function readShrinkageCsv(path: string): ShrinkageRow[] {
    const rows = parseFile(path, ['scenario', 'method', 'area_id', 'weight', 'contaminated']);
    return rows.map((r, i) => {
        if (r.contaminated !== '0' && r.contaminated !== '1') {
            throw new SchemaError(
                `${path}: line ${i + 2}: bad contaminated value ${JSON.stringify(r.contaminated)}`);
        }
        return {
            scenario: r.scenario,
            method: r.method,
            areaId: r.area_id,
            weight: num(path, i, 'weight', r.weight),
            contaminated: r.contaminated === '1',
        };
    });
}

export function readStudyCsv(path: string): StudyRow[] {
    const rows = parseFile(path, ['scenario', 'm', 'method', 'group', 'metric', 'value']);
    return rows.map((r, i) => ({
        scenario: r.scenario,
        m: num(path, i, 'm', r.m),
        method: r.method,
        group: r.group,
        metric: r.metric,
        value: num(path, i, 'value', r.value),
    }));
}

/** Distinct values in first-appearance order. */
export function distinct(values: string[]): string[] {
    const seen = new Set<string>();
    const out: string[] = [];
    for (const v of values) {
        if (!seen.has(v)) {
            seen.add(v);
            out.push(v);
        }
    }
    return out;
}
