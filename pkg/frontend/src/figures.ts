/**
 * The four figure kinds rendered from report CSVs. No numerical results are
 * recomputed here: everything plotted is a CSV column, an axis transform, or
 * a supplied regression baseline.
 */

import { ReportRow, SchemaError } from "./schema.js";
import { Axis, axisFromValues, fmt, renderPlot } from "./svg.js";

export type FigureKind = "d_of_n" | "residual_loglog" | "separation" | "polarization_margin";

export const FIGURE_KINDS: FigureKind[] = [
    "d_of_n",
    "residual_loglog",
    "separation",
    "polarization_margin",
];

export interface FigureSpec {
    kind: FigureKind;
    rows: ReportRow[];
    /** pinned regression constant: horizontal reference (separation,
     * polarization_margin) or envelope constant C (d_of_n) */
    baseline?: number;
}

function nAxis(rows: ReportRow[]): Axis {
    return axisFromValues(rows.map((r) => r.n), "log");
}

function fitSlope(x: number[], y: number[]): number {
    const n = x.length;
    const mx = x.reduce((a, b) => a + b, 0) / n;
    const my = y.reduce((a, b) => a + b, 0) / n;
    let num = 0;
    let den = 0;
    for (let i = 0; i < n; i++) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

function figureDOfN(rows: ReportRow[], baseline?: number): string {
    const pts = rows.filter((r) => r.d_of_n !== null && r.n >= 2);
    if (pts.length === 0) {
        throw new SchemaError("d_of_n column is empty: not a log or green run report");
    }
    const xs = pts.map((r) => r.n);
    const ys = pts.map((r) => r.d_of_n as number);
    const refLines = [];
    if (baseline !== undefined) {
        refLines.push({
            x: xs,
            y: xs.map((n) => 0.5 + baseline / Math.log(n)),
            colour: "#b33",
            label: `envelope 1/2 + C/log N (C=${fmt(baseline)})`,
        });
        refLines.push({ x: xs, y: xs.map(() => 0), colour: "#999", label: "zero" });
    }
    const yAxis = axisFromValues([...ys, 0, ...(refLines[0]?.y ?? [])], "linear");
    return renderPlot({
        title: "second-order coefficient D(N)",
        xLabel: "N (log scale)",
        yLabel: "D(N)",
        xAxis: nAxis(pts),
        yAxis,
        series: [{ x: xs, y: ys, colour: "#1a6", label: "D(N)", marker: true }],
        refLines,
    });
}

function figureResidual(rows: ReportRow[]): string {
    const pts = rows.filter((r) => r.residual !== 0 && r.n >= 2);
    if (pts.length === 0) throw new SchemaError("no nonzero residuals to plot");
    const xs = pts.map((r) => r.n);
    const ys = pts.map((r) => Math.abs(r.residual));
    const slope = fitSlope(xs.map(Math.log), ys.map(Math.log));
    return renderPlot({
        title: "energy residual |E - I N^2|",
        xLabel: "N (log scale)",
        yLabel: "|residual| (log scale)",
        xAxis: nAxis(pts),
        yAxis: axisFromValues(ys, "log"),
        series: [{ x: xs, y: ys, colour: "#16c", label: "|residual|", marker: true }],
        annotations: [`fitted slope ${fmt(slope)}`],
    });
}

function figureSeparation(rows: ReportRow[], baseline?: number): string {
    const pts = rows.filter((r) => r.n >= 2);
    const xs = pts.map((r) => r.n);
    const ys = pts.map((r) => r.sep_scaled);
    const refLines =
        baseline !== undefined
            ? [{ x: xs, y: xs.map(() => baseline), colour: "#b33", label: `pinned min ${fmt(baseline)}` }]
            : [];
    return renderPlot({
        title: "scaled separation",
        xLabel: "N (log scale)",
        yLabel: "delta(N) * N^(1/d)",
        xAxis: nAxis(pts),
        yAxis: axisFromValues([...ys, ...(baseline !== undefined ? [baseline, 0] : [0])], "linear"),
        series: [{ x: xs, y: ys, colour: "#16c", label: "scaled separation", marker: true }],
        refLines,
    });
}

function figureMargin(rows: ReportRow[], baseline?: number): string {
    const pts = rows.filter((r) => r.pol_residual !== null && r.n >= 2);
    if (pts.length === 0) {
        throw new SchemaError("pol_residual column is empty: report carries no polarization data");
    }
    const xs = pts.map((r) => r.n);
    const ys = pts.map((r) => -(r.pol_residual as number));
    const positive = ys.every((v) => v > 0);
    const refLines =
        baseline !== undefined
            ? [{ x: xs, y: xs.map(() => baseline), colour: "#b33", label: `pinned ${fmt(baseline)}` }]
            : [];
    return renderPlot({
        title: "polarization deficit I N - P(N)",
        xLabel: "N (log scale)",
        yLabel: positive ? "I N - P (log scale)" : "I N - P",
        xAxis: nAxis(pts),
        yAxis: axisFromValues(ys, positive ? "log" : "linear"),
        series: [{ x: xs, y: ys, colour: "#92c", label: "I N - P", marker: true }],
        refLines,
    });
}

export function renderFigure(spec: FigureSpec): string {
    switch (spec.kind) {
        case "d_of_n":
            return figureDOfN(spec.rows, spec.baseline);
        case "residual_loglog":
            return figureResidual(spec.rows);
        case "separation":
            return figureSeparation(spec.rows, spec.baseline);
        case "polarization_margin":
            return figureMargin(spec.rows, spec.baseline);
        default:
            throw new SchemaError(`unknown figure kind ${String(spec.kind)}`);
    }
}
