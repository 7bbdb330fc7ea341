/**
 * Versioned report schema emitted by the greedysphere CLI.
 *
 * Layout:
 *   line 1: `#schema=greedysphere.report.v1`
 *   line 2: fixed column header
 *   rest:   one row per prefix size N; empty cells mean "not defined here".
 */

export const REPORT_SCHEMA = "greedysphere.report.v1";
export const REPORT_HEADER =
    "N,energy,residual,normalized_residual,polarization,pol_residual,separation,sep_scaled,d_of_n";

export interface ReportRow {
    n: number;
    energy: number;
    residual: number;
    normalized_residual: number;
    polarization: number | null;
    pol_residual: number | null;
    separation: number;
    sep_scaled: number;
    d_of_n: number | null;
}

export class SchemaError extends Error {
    constructor(message: string) {
        super(message);
        this.name = "SchemaError";
    }
}

function parseCell(cell: string, line: number, column: string): number | null {
    if (cell === "") return null;
    const v = Number(cell);
    if (!Number.isFinite(v)) {
        throw new SchemaError(`line ${line}: column ${column} is not a finite number: ${cell}`);
    }
    return v;
}

function required(v: number | null, line: number, column: string): number {
    if (v === null) throw new SchemaError(`line ${line}: column ${column} must not be empty`);
    return v;
}

export function parseReport(text: string): ReportRow[] {
    const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
    if (lines.length === 0) {
        throw new SchemaError("empty report file");
    }
    if (lines[0] !== `#schema=${REPORT_SCHEMA}`) {
        throw new SchemaError(
            `unsupported schema line ${JSON.stringify(lines[0])}; expected #schema=${REPORT_SCHEMA}`,
        );
    }
    if (lines[1] !== REPORT_HEADER) {
        throw new SchemaError(`header mismatch; expected ${REPORT_HEADER}`);
    }
    const columns = REPORT_HEADER.split(",");
    const rows: ReportRow[] = [];
    for (let i = 2; i < lines.length; i++) {
        const cells = lines[i].split(",");
        if (cells.length !== columns.length) {
            throw new SchemaError(`line ${i + 1}: expected ${columns.length} cells, got ${cells.length}`);
        }
        const ln = i + 1;
        rows.push({
            n: required(parseCell(cells[0], ln, "N"), ln, "N"),
            energy: required(parseCell(cells[1], ln, "energy"), ln, "energy"),
            residual: required(parseCell(cells[2], ln, "residual"), ln, "residual"),
            normalized_residual: required(parseCell(cells[3], ln, "normalized_residual"), ln, "normalized_residual"),
            polarization: parseCell(cells[4], ln, "polarization"),
            pol_residual: parseCell(cells[5], ln, "pol_residual"),
            separation: required(parseCell(cells[6], ln, "separation"), ln, "separation"),
            sep_scaled: required(parseCell(cells[7], ln, "sep_scaled"), ln, "sep_scaled"),
            d_of_n: parseCell(cells[8], ln, "d_of_n"),
        });
    }
    if (rows.length === 0) {
        throw new SchemaError("report contains no data rows");
    }
    for (let i = 1; i < rows.length; i++) {
        if (rows[i].n <= rows[i - 1].n) {
            throw new SchemaError("rows must be strictly increasing in N");
        }
    }
    return rows;
}
