#!/usr/bin/env node
/**
 * Render a figure from a greedysphere report CSV.
 *
 *   greedysphere-figures --csv run.report.csv --kind d_of_n --out fig.svg \
 *       [--baseline-value 0.02] [--baseline-file baselines.json --baseline-key s2_log.envelope_c]
 *
 * Fails loudly (nonzero exit, no output file) on schema mismatches.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { exit } from "node:process";

import { FIGURE_KINDS, FigureKind, renderFigure } from "./figures.js";
import { parseReport, SchemaError } from "./schema.js";

interface Args {
    csv?: string;
    kind?: string;
    out?: string;
    baselineValue?: number;
    baselineFile?: string;
    baselineKey?: string;
}

function parseArgs(argv: string[]): Args {
    const out: Args = {};
    for (let i = 0; i < argv.length; i++) {
        const key = argv[i];
        const val = argv[i + 1];
        switch (key) {
            case "--csv":
                out.csv = val;
                i++;
                break;
            case "--kind":
                out.kind = val;
                i++;
                break;
            case "--out":
                out.out = val;
                i++;
                break;
            case "--baseline-value":
                out.baselineValue = Number(val);
                i++;
                break;
            case "--baseline-file":
                out.baselineFile = val;
                i++;
                break;
            case "--baseline-key":
                out.baselineKey = val;
                i++;
                break;
            default:
                throw new Error(`unknown argument ${key}`);
        }
    }
    return out;
}

function lookupBaseline(file: string, key: string): number {
    const data = JSON.parse(readFileSync(file, "utf-8"));
    let node: unknown = data;
    for (const part of key.split(".")) {
        if (typeof node !== "object" || node === null || !(part in node)) {
            throw new Error(`baseline key ${key} not found in ${file}`);
        }
        node = (node as Record<string, unknown>)[part];
    }
    if (typeof node !== "number") throw new Error(`baseline key ${key} is not a number`);
    return node;
}

export function main(argv: string[]): number {
    let args: Args;
    try {
        args = parseArgs(argv);
        if (!args.csv || !args.kind || !args.out) {
            throw new Error("--csv, --kind and --out are required");
        }
        if (!FIGURE_KINDS.includes(args.kind as FigureKind)) {
            throw new Error(`--kind must be one of ${FIGURE_KINDS.join(", ")}`);
        }
        let baseline = args.baselineValue;
        if (baseline === undefined && args.baselineFile && args.baselineKey) {
            baseline = lookupBaseline(args.baselineFile, args.baselineKey);
        }
        const rows = parseReport(readFileSync(args.csv, "utf-8"));
        const svg = renderFigure({ kind: args.kind as FigureKind, rows, baseline });
        writeFileSync(args.out, svg + "\n");
        console.log(`wrote ${args.out}`);
        return 0;
    } catch (err) {
        const name = err instanceof SchemaError ? "SchemaError" : "Error";
        console.error(JSON.stringify({ error: name, message: (err as Error).message }));
        return 1;
    }
}

const isDirect = process.argv[1] !== undefined && import.meta.url.endsWith(
    process.argv[1].split("/").pop() ?? "",
);
if (isDirect) {
    exit(main(process.argv.slice(2)));
}
