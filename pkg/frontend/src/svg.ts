/** Minimal deterministic SVG plotting: scales, axes, series, reference lines. */

export interface PlotFrame {
    width: number;
    height: number;
    margin: { left: number; right: number; top: number; bottom: number };
}

export const DEFAULT_FRAME: PlotFrame = {
    width: 640,
    height: 420,
    margin: { left: 64, right: 16, top: 28, bottom: 44 },
};

export type AxisScale = "linear" | "log";

export interface Axis {
    scale: AxisScale;
    min: number;
    max: number;
}

export function fmt(v: number): string {
    if (v === 0) return "0";
    const a = Math.abs(v);
    if (a >= 0.01 && a < 10000) return String(Number(v.toPrecision(6)));
    return v.toExponential(2);
}

function project(v: number, axis: Axis, lo: number, hi: number): number {
    const t =
        axis.scale === "log"
            ? (Math.log(v) - Math.log(axis.min)) / (Math.log(axis.max) - Math.log(axis.min))
            : (v - axis.min) / (axis.max - axis.min);
    return lo + t * (hi - lo);
}

export function axisFromValues(values: number[], scale: AxisScale): Axis {
    const finite = values.filter((v) => Number.isFinite(v) && (scale !== "log" || v > 0));
    if (finite.length === 0) throw new Error(`no plottable values for a ${scale} axis`);
    let min = Math.min(...finite);
    let max = Math.max(...finite);
    if (min === max) {
        min = scale === "log" ? min / 2 : min - 1;
        max = scale === "log" ? max * 2 : max + 1;
    } else if (scale === "linear") {
        const pad = 0.05 * (max - min);
        min -= pad;
        max += pad;
    } else {
        min /= 1.15;
        max *= 1.15;
    }
    return { scale, min, max };
}

function ticks(axis: Axis): number[] {
    if (axis.scale === "log") {
        const out: number[] = [];
        const lo = Math.ceil(Math.log10(axis.min) - 1e-9);
        const hi = Math.floor(Math.log10(axis.max) + 1e-9);
        for (let e = lo; e <= hi; e++) out.push(Math.pow(10, e));
        if (out.length < 2) out.push(axis.min, axis.max);
        return out;
    }
    const span = axis.max - axis.min;
    const step = Math.pow(10, Math.floor(Math.log10(span / 4)));
    const mult = span / step > 8 ? 2 : 1;
    const out: number[] = [];
    for (let v = Math.ceil(axis.min / (step * mult)) * step * mult; v <= axis.max + 1e-12; v += step * mult) {
        out.push(Number(v.toPrecision(12)));
    }
    return out;
}

export interface Series {
    x: number[];
    y: number[];
    colour: string;
    label: string;
    marker?: boolean;
}

export interface RefLine {
    /** y-values per x sample; drawn dashed (a horizontal line has constant y) */
    x: number[];
    y: number[];
    colour: string;
    label: string;
}

export function renderPlot(opts: {
    title: string;
    xLabel: string;
    yLabel: string;
    xAxis: Axis;
    yAxis: Axis;
    series: Series[];
    refLines?: RefLine[];
    annotations?: string[];
    frame?: PlotFrame;
}): string {
    const frame = opts.frame ?? DEFAULT_FRAME;
    const { width, height, margin } = frame;
    const x0 = margin.left;
    const x1 = width - margin.right;
    const y0 = height - margin.bottom;
    const y1 = margin.top;
    const px = (v: number) => project(v, opts.xAxis, x0, x1);
    const py = (v: number) => project(v, opts.yAxis, y0, y1);

    const parts: string[] = [];
    parts.push(
        `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    );
    parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
    parts.push(
        `<text x="${(x0 + x1) / 2}" y="16" text-anchor="middle" font-family="sans-serif" font-size="14">${opts.title}</text>`,
    );
    // axes box
    parts.push(
        `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#444"/>`,
    );
    for (const t of ticks(opts.xAxis)) {
        if (t < opts.xAxis.min || t > opts.xAxis.max) continue;
        const x = px(t);
        parts.push(`<line x1="${fmt(x)}" y1="${y0}" x2="${fmt(x)}" y2="${y0 + 5}" stroke="#444"/>`);
        parts.push(
            `<text x="${fmt(x)}" y="${y0 + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">${fmt(t)}</text>`,
        );
    }
    for (const t of ticks(opts.yAxis)) {
        if (t < opts.yAxis.min || t > opts.yAxis.max) continue;
        const y = py(t);
        parts.push(`<line x1="${x0 - 5}" y1="${fmt(y)}" x2="${x0}" y2="${fmt(y)}" stroke="#444"/>`);
        parts.push(
            `<text x="${x0 - 8}" y="${fmt(y + 4)}" text-anchor="end" font-family="sans-serif" font-size="11">${fmt(t)}</text>`,
        );
    }
    parts.push(
        `<text x="${(x0 + x1) / 2}" y="${height - 8}" text-anchor="middle" font-family="sans-serif" font-size="12">${opts.xLabel}</text>`,
    );
    parts.push(
        `<text x="14" y="${(y0 + y1) / 2}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 14 ${(y0 + y1) / 2})">${opts.yLabel}</text>`,
    );

    for (const ref of opts.refLines ?? []) {
        const pts = ref.x
            .map((vx, i) => [vx, ref.y[i]] as const)
            .filter(([vx, vy]) => Number.isFinite(vy) && vx >= opts.xAxis.min && vx <= opts.xAxis.max)
            .map(([vx, vy]) => `${fmt(px(vx))},${fmt(py(Math.min(Math.max(vy, opts.yAxis.min), opts.yAxis.max)))}`)
            .join(" ");
        parts.push(
            `<polyline points="${pts}" fill="none" stroke="${ref.colour}" stroke-width="1.5" stroke-dasharray="6 4"/>`,
        );
    }
    for (const s of opts.series) {
        const pts = s.x
            .map((vx, i) => [vx, s.y[i]] as const)
            .filter(([, vy]) => Number.isFinite(vy))
            .map(([vx, vy]) => `${fmt(px(vx))},${fmt(py(vy))}`)
            .join(" ");
        parts.push(`<polyline points="${pts}" fill="none" stroke="${s.colour}" stroke-width="1.8"/>`);
        if (s.marker) {
            for (let i = 0; i < s.x.length; i++) {
                if (!Number.isFinite(s.y[i])) continue;
                parts.push(
                    `<circle cx="${fmt(px(s.x[i]))}" cy="${fmt(py(s.y[i]))}" r="2.4" fill="${s.colour}"/>`,
                );
            }
        }
    }
    const legendEntries = [
        ...opts.series.map((s) => ({ label: s.label, colour: s.colour })),
        ...(opts.refLines ?? []).map((r) => ({ label: r.label, colour: r.colour })),
    ];
    legendEntries.forEach((e, i) => {
        const y = y1 + 14 + 16 * i;
        parts.push(`<line x1="${x0 + 8}" y1="${y - 4}" x2="${x0 + 30}" y2="${y - 4}" stroke="${e.colour}" stroke-width="2"/>`);
        parts.push(
            `<text x="${x0 + 36}" y="${y}" font-family="sans-serif" font-size="11">${e.label}</text>`,
        );
    });
    (opts.annotations ?? []).forEach((a, i) => {
        parts.push(
            `<text x="${x1 - 6}" y="${y1 + 14 + 16 * i}" text-anchor="end" font-family="sans-serif" font-size="11">${a}</text>`,
        );
    });
    parts.push("</svg>");
    return parts.join("\n");
}
