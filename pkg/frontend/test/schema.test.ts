import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { parseReport, REPORT_HEADER, SchemaError } from "../src/schema.js";

const FIXTURES = join(__dirname, "fixtures");

function fixture(name: string): string {
    return readFileSync(join(FIXTURES, name), "utf-8");
}

describe("report schema", () => {
    it("parses the bundled log-run report", () => {
        const rows = parseReport(fixture("s2_log.report.csv"));
        expect(rows.length).toBeGreaterThan(4);
        expect(rows[0].n).toBe(2);
        for (const row of rows) {
            expect(row.d_of_n).not.toBeNull();
            expect(row.d_of_n as number).toBeGreaterThan(0);
            expect(row.separation).toBeGreaterThan(0);
        }
    });

    it("parses the bundled riesz-run report (no d_of_n column values)", () => {
        const rows = parseReport(fixture("s2_riesz1.report.csv"));
        expect(rows.every((r) => r.d_of_n === null)).toBe(true);
        expect(rows.every((r) => r.residual < 0)).toBe(true);
    });

    it("rejects a missing schema line", () => {
        expect(() => parseReport(`${REPORT_HEADER}\n2,1,1,1,,,1,1,`)).toThrow(SchemaError);
    });

    it("rejects a wrong schema version", () => {
        const text = `#schema=greedysphere.report.v999\n${REPORT_HEADER}\n2,1,1,1,,,1,1,`;
        expect(() => parseReport(text)).toThrow(/unsupported schema/);
    });

    it("rejects a header mismatch", () => {
        const text = "#schema=greedysphere.report.v1\nN,energy\n2,1";
        expect(() => parseReport(text)).toThrow(/header mismatch/);
    });

    it("rejects ragged rows and non-numeric cells", () => {
        const good = fixture("s2_log.report.csv").trimEnd();
        expect(() => parseReport(good + "\n7,1,2")).toThrow(/cells/);
        expect(() => parseReport(good + "\n999,1,2,3,x,5,6,7,8")).toThrow(/finite number/);
    });

    it("rejects empty files and header-only files", () => {
        expect(() => parseReport("")).toThrow(SchemaError);
        expect(() => parseReport(`#schema=greedysphere.report.v1\n${REPORT_HEADER}\n`)).toThrow(
            /no data rows/,
        );
    });

    it("requires strictly increasing N", () => {
        const lines = fixture("s2_log.report.csv").trimEnd().split("\n");
        const dup = [...lines, lines[2]].join("\n");
        expect(() => parseReport(dup)).toThrow(/strictly increasing/);
    });
});
