#!/usr/bin/env node
// Usage: plots <kind> <input.csv> <output.svg>

import * as fs from 'fs';
import { SchemaError } from './csv';
import { FIGURE_KINDS, FigureKind, PlotJob, defaultStylePath, loadStyle, render } from './figures';

export function runCli(argv: string[]): number {
    if (argv.length !== 3) {
        console.error('usage: plots <kind> <input.csv> <output.svg>');
        console.error(`kinds: ${FIGURE_KINDS.join(', ')}`);
        return 1;
    }
    const [kind, input, output] = argv;
    if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
        console.error(`error: unknown figure kind '${kind}' (expected one of: ${FIGURE_KINDS.join(', ')})`);
        return 1;
    }
    const job: PlotJob = { kind: kind as FigureKind, input, output };
    try {
        const svg = render(job, loadStyle(defaultStylePath()));
        fs.writeFileSync(output, svg);
    } catch (err: any) {
        if (err instanceof SchemaError) {
            console.error(`error: ${err.message}`);
            return 2;
        }
        throw err;
    }
    console.log(`${kind}: ${input} -> ${output}`);
    return 0;
}

if (require.main === module) {
    process.exit(runCli(process.argv.slice(2)));
}
