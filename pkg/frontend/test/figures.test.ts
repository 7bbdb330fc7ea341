import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { FIGURE_KINDS, renderFigure } from "../src/figures.js";
import { parseReport } from "../src/schema.js";

const FIXTURES = join(__dirname, "fixtures");

function rows(name: string) {
    return parseReport(readFileSync(join(FIXTURES, name), "utf-8"));
}

describe("figure rendering", () => {
    it("renders every figure kind from a bundled reference CSV", () => {
        const byKind = {
            d_of_n: rows("s2_log.report.csv"),
            residual_loglog: rows("s2_riesz1.report.csv"),
            separation: rows("s2_riesz1.report.csv"),
            polarization_margin: rows("s2_riesz1.report.csv"),
        } as const;
        for (const kind of FIGURE_KINDS) {
            const svg = renderFigure({ kind, rows: byKind[kind] });
            expect(svg.startsWith("<svg")).toBe(true);
            expect(svg).toContain("<polyline");
            expect(svg.endsWith("</svg>")).toBe(true);
        }
    });

    it("is deterministic: same rows, same bytes", () => {
        const r = rows("s2_log.report.csv");
        const a = renderFigure({ kind: "d_of_n", rows: r, baseline: 0.1 });
        const b = renderFigure({ kind: "d_of_n", rows: r, baseline: 0.1 });
        expect(a).toBe(b);
    });

    it("draws the envelope reference line for d_of_n when a baseline is given", () => {
        const svg = renderFigure({ kind: "d_of_n", rows: rows("s2_log.report.csv"), baseline: 0.05 });
        expect(svg).toContain("envelope 1/2 + C/log N");
        expect(svg).toContain("stroke-dasharray");
    });

    it("annotates the fitted slope on the residual log-log figure", () => {
        const svg = renderFigure({ kind: "residual_loglog", rows: rows("s2_riesz1.report.csv") });
        const match = svg.match(/fitted slope ([-\d.eE+]+)/);
        expect(match).not.toBeNull();
        const slope = Number(match![1]);
        // second-order law for s=1 on S^2: slope near 1 + s/d = 1.5
        expect(slope).toBeGreaterThan(1.3);
        expect(slope).toBeLessThan(1.7);
    });

    it("draws a pinned-minimum reference on the separation figure", () => {
        const svg = renderFigure({
            kind: "separation",
            rows: rows("s2_riesz1.report.csv"),
            baseline: 2.33,
        });
        expect(svg).toContain("pinned min 2.33");
    });

    it("refuses to render d_of_n from a riesz report", () => {
        expect(() => renderFigure({ kind: "d_of_n", rows: rows("s2_riesz1.report.csv") })).toThrow(
            /d_of_n column is empty/,
        );
    });
});

describe("cli", () => {
    it("writes an SVG for each kind and returns 0", () => {
        const dir = mkdtempSync(join(tmpdir(), "figs-"));
        for (const kind of FIGURE_KINDS) {
            const csv = kind === "d_of_n" ? "s2_log.report.csv" : "s2_riesz1.report.csv";
            const out = join(dir, `${kind}.svg`);
            const code = main([
                "--csv", join(FIXTURES, csv),
                "--kind", kind,
                "--out", out,
            ]);
            expect(code).toBe(0);
            expect(existsSync(out)).toBe(true);
            expect(readFileSync(out, "utf-8")).toContain("</svg>");
        }
    });

    it("fails loudly on schema mismatch and writes nothing", () => {
        const dir = mkdtempSync(join(tmpdir(), "figs-"));
        const bad = join(dir, "bad.csv");
        const out = join(dir, "out.svg");
        writeFileSync(bad, "N,energy\n2,1\n");
        const code = main(["--csv", bad, "--kind", "d_of_n", "--out", out]);
        expect(code).toBe(1);
        expect(existsSync(out)).toBe(false);
    });

    it("fails on an empty CSV and writes nothing", () => {
        const dir = mkdtempSync(join(tmpdir(), "figs-"));
        const empty = join(dir, "empty.csv");
        const out = join(dir, "out.svg");
        writeFileSync(empty, "");
        const code = main(["--csv", empty, "--kind", "separation", "--out", out]);
        expect(code).toBe(1);
        expect(existsSync(out)).toBe(false);
    });

    it("rejects unknown kinds and missing arguments", () => {
        expect(main(["--csv", "x.csv", "--kind", "nope", "--out", "y.svg"])).toBe(1);
        expect(main(["--csv", "x.csv"])).toBe(1);
    });

    it("reads a baseline value from a baselines file by key", () => {
        const dir = mkdtempSync(join(tmpdir(), "figs-"));
        const baselines = join(dir, "baselines.json");
        writeFileSync(baselines, JSON.stringify({ s2_log: { envelope_c: 0.07 } }));
        const out = join(dir, "d.svg");
        const code = main([
            "--csv", join(FIXTURES, "s2_log.report.csv"),
            "--kind", "d_of_n",
            "--out", out,
            "--baseline-file", baselines,
            "--baseline-key", "s2_log.envelope_c",
        ]);
        expect(code).toBe(0);
        expect(readFileSync(out, "utf-8")).toContain("C=0.07");
    });
});
