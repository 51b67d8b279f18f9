/**
 * Minimal deterministic SVG construction: fixed-precision coordinates,
 * no generated ids, no timestamps — identical input data always yields
 * byte-identical markup.
 */

export function coord(x: number): string {
  const rounded = Math.round(x * 100) / 100;
  return Object.is(rounded, -0) ? "0" : String(rounded);
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function tickLabel(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 10000 || magnitude < 1e-3) {
    const exp = Math.floor(Math.log10(magnitude));
    const mantissa = value / 10 ** exp;
    const head = Math.abs(Math.round(mantissa * 10) / 10 - Math.round(mantissa)) < 1e-9
      ? String(Math.round(mantissa))
      : (Math.round(mantissa * 10) / 10).toFixed(1);
    return `${head}e${exp}`;
  }
  const rounded = Math.round(value * 1000) / 1000;
  return String(rounded);
}

/** Linear scale with evenly spaced "nice" ticks. */
export class LinearScale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly r0: number,
    readonly r1: number,
  ) {}

  at(value: number): number {
    const span = this.d1 - this.d0;
    const t = span === 0 ? 0.5 : (value - this.d0) / span;
    return this.r0 + t * (this.r1 - this.r0);
  }

  ticks(target = 6): number[] {
    const span = this.d1 - this.d0;
    if (span <= 0) return [this.d0];
    const rawStep = span / target;
    const power = 10 ** Math.floor(Math.log10(rawStep));
    let step = power;
    for (const m of [1, 2, 5, 10]) {
      if (m * power >= rawStep) {
        step = m * power;
        break;
      }
    }
    const out: number[] = [];
    const first = Math.ceil(this.d0 / step - 1e-9) * step;
    for (let v = first; v <= this.d1 + step * 1e-9; v += step) {
      out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
    }
    return out;
  }
}

/** Log10 scale; callers must keep the domain strictly positive. */
export class LogScale {
  private readonly inner: LinearScale;

  constructor(
    readonly d0: number,
    readonly d1: number,
    r0: number,
    r1: number,
  ) {
    if (d0 <= 0 || d1 <= 0) {
      throw new Error("log scale requires a positive domain");
    }
    this.inner = new LinearScale(Math.log10(d0), Math.log10(d1), r0, r1);
  }

  at(value: number): number {
    return this.inner.at(Math.log10(value));
  }

  ticks(): number[] {
    const lo = Math.floor(Math.log10(this.d0) + 1e-9);
    const hi = Math.ceil(Math.log10(this.d1) - 1e-9);
    const out: number[] = [];
    for (let e = lo; e <= hi; e += 1) {
      out.push(10 ** e);
    }
    return out;
  }
}

export type Scale = LinearScale | LogScale;

export class SvgBuilder {
  private readonly parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, strokeWidth = 1): void {
    this.parts.push(
      `<line x1="${coord(x1)}" y1="${coord(y1)}" x2="${coord(x2)}" y2="${coord(y2)}" ` +
        `stroke="${stroke}" stroke-width="${strokeWidth}"/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, strokeWidth = 1.5): void {
    if (points.length === 0) return;
    const joined = points.map(([x, y]) => `${coord(x)},${coord(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${joined}" fill="none" stroke="${stroke}" stroke-width="${strokeWidth}"/>`,
    );
  }

  rect(x: number, y: number, w: number, h: number, attrs: string): void {
    this.parts.push(
      `<rect x="${coord(x)}" y="${coord(y)}" width="${coord(w)}" height="${coord(h)}" ${attrs}/>`,
    );
  }

  path(d: string, attrs: string): void {
    this.parts.push(`<path d="${d}" ${attrs}/>`);
  }

  circle(cx: number, cy: number, r: number, attrs: string): void {
    this.parts.push(`<circle cx="${coord(cx)}" cy="${coord(cy)}" r="${r}" ${attrs}/>`);
  }

  text(x: number, y: number, content: string, attrs = ""): void {
    const head = attrs ? `<text x="${coord(x)}" y="${coord(y)}" ${attrs}>` : `<text x="${coord(x)}" y="${coord(y)}">`;
    this.parts.push(`${head}${escapeXml(content)}</text>`);
  }

  raw(markup: string): void {
    this.parts.push(markup);
  }

  render(): string {
    return [...this.parts, "</svg>"].join("\n") + "\n";
  }
}
