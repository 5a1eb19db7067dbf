/** Minimal headless SVG assembly: scales, axes, polylines, heatmaps,
 * colorbars. Everything is plain string building, no DOM. */

export interface Scale {
  (x: number): number
  domain: [number, number]
  range: [number, number]
}

export function linearScale(domain: [number, number],
                            range: [number, number]): Scale {
  const [d0, d1] = domain
  const [r0, r1] = range
  const span = d1 - d0 === 0 ? 1 : d1 - d0
  const fn = ((x: number) => r0 + ((x - d0) / span) * (r1 - r0)) as Scale
  fn.domain = domain
  fn.range = range
  return fn
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity
  let hi = -Infinity
  for (const v of values) {
    if (Number.isFinite(v)) {
      if (v < lo) lo = v
      if (v > hi) hi = v
    }
  }
  if (lo > hi) return [0, 1]
  return lo === hi ? [lo - 1, hi + 1] : [lo, hi]
}

/** Round tick positions covering the domain (1/2/5 progression). */
export function ticks(domain: [number, number], count = 6): number[] {
  const span = domain[1] - domain[0]
  if (span <= 0) return [domain[0]]
  const raw = span / count
  const mag = Math.pow(10, Math.floor(Math.log10(raw)))
  const norm = raw / mag
  const step = (norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10) * mag
  const start = Math.ceil(domain[0] / step) * step
  const out: number[] = []
  for (let v = start; v <= domain[1] + 1e-9 * span; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v)
  }
  return out
}

const fmt = (v: number): string =>
  Math.abs(v) >= 1e5 || (v !== 0 && Math.abs(v) < 1e-3)
    ? v.toExponential(1)
    : String(Math.round(v * 1e6) / 1e6)

export const SERIES_COLORS = ['#1f77b4', '#d62728', '#2ca02c', '#ff7f0e',
                              '#9467bd', '#8c564b', '#e377c2', '#7f7f7f']

/** Blue -> green -> yellow sequential colormap on [0, 1]. */
export function colormap(t: number): string {
  const c = Math.min(1, Math.max(0, t))
  const stops: [number, number, number][] = [
    [68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37],
  ]
  const pos = c * (stops.length - 1)
  const i = Math.min(stops.length - 2, Math.floor(pos))
  const f = pos - i
  const mix = (a: number, b: number) => Math.round(a + (b - a) * f)
  const [r, g, b] = [0, 1, 2].map(k => mix(stops[i][k], stops[i + 1][k]))
  return `rgb(${r},${g},${b})`
}

export interface Frame {
  width: number
  height: number
  margin: { top: number, right: number, bottom: number, left: number }
  parts: string[]
}

export function frame(width = 720, height = 480,
                      right = 40): Frame {
  return {
    width, height,
    margin: { top: 40, right, bottom: 55, left: 70 },
    parts: [],
  }
}

export function innerBox(f: Frame): { x0: number, x1: number, y0: number, y1: number } {
  return {
    x0: f.margin.left, x1: f.width - f.margin.right,
    y0: f.margin.top, y1: f.height - f.margin.bottom,
  }
}

export function esc(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')
}

export function text(f: Frame, x: number, y: number, s: string,
                     attrs = ''): void {
  f.parts.push(`<text x="${x.toFixed(1)}" y="${y.toFixed(1)}" ` +
    `font-family="sans-serif" font-size="12" ${attrs}>${esc(s)}</text>`)
}

export function title(f: Frame, s: string): void {
  text(f, f.width / 2, f.margin.top - 16, s,
       'text-anchor="middle" font-size="14" font-weight="bold"')
}

export function axes(f: Frame, xs: Scale, ys: Scale, xLabel: string,
                     yLabel: string): void {
  const box = innerBox(f)
  f.parts.push(`<rect x="${box.x0}" y="${box.y0}" width="${box.x1 - box.x0}" ` +
    `height="${box.y1 - box.y0}" fill="none" stroke="#333"/>`)
  for (const t of ticks(xs.domain)) {
    const x = xs(t)
    f.parts.push(`<line x1="${x.toFixed(1)}" y1="${box.y1}" ` +
      `x2="${x.toFixed(1)}" y2="${box.y1 + 5}" stroke="#333"/>`)
    text(f, x, box.y1 + 18, fmt(t), 'text-anchor="middle"')
  }
  for (const t of ticks(ys.domain)) {
    const y = ys(t)
    f.parts.push(`<line x1="${box.x0 - 5}" y1="${y.toFixed(1)}" ` +
      `x2="${box.x0}" y2="${y.toFixed(1)}" stroke="#333"/>`)
    text(f, box.x0 - 8, y + 4, fmt(t), 'text-anchor="end"')
  }
  text(f, (box.x0 + box.x1) / 2, f.height - 12, xLabel, 'text-anchor="middle"')
  f.parts.push(`<text x="18" y="${(box.y0 + box.y1) / 2}" ` +
    `font-family="sans-serif" font-size="12" text-anchor="middle" ` +
    `transform="rotate(-90 18 ${(box.y0 + box.y1) / 2})">${esc(yLabel)}</text>`)
}

export function polyline(f: Frame, xs: Scale, ys: Scale, x: number[],
                         y: number[], color: string): void {
  const pts: string[] = []
  for (let i = 0; i < x.length; i++) {
    if (Number.isFinite(x[i]) && Number.isFinite(y[i])) {
      pts.push(`${xs(x[i]).toFixed(2)},${ys(y[i]).toFixed(2)}`)
    }
  }
  f.parts.push(`<polyline points="${pts.join(' ')}" fill="none" ` +
    `stroke="${color}" stroke-width="1.8" class="series"/>`)
}

export function legend(f: Frame, entries: { label: string, color: string }[]): void {
  const box = innerBox(f)
  let y = box.y0 + 14
  for (const e of entries) {
    f.parts.push(`<line x1="${box.x1 - 150}" y1="${y - 4}" ` +
      `x2="${box.x1 - 125}" y2="${y - 4}" stroke="${e.color}" stroke-width="2"/>`)
    text(f, box.x1 - 120, y, e.label)
    y += 16
  }
}

export function colorbar(f: Frame, lo: number, hi: number,
                         label: string): void {
  const box = innerBox(f)
  const x = f.width - f.margin.right + 18
  const steps = 40
  const h = (box.y1 - box.y0) / steps
  for (let i = 0; i < steps; i++) {
    const t = 1 - i / (steps - 1)
    const y = box.y0 + i * h
    f.parts.push(`<rect x="${x}" y="${y.toFixed(1)}" width="14" ` +
      `height="${(h + 0.5).toFixed(1)}" fill="${colormap(t)}" class="colorbar"/>`)
  }
  text(f, x + 7, box.y0 - 8, fmt(hi), 'text-anchor="middle"')
  text(f, x + 7, box.y1 + 14, fmt(lo), 'text-anchor="middle"')
  f.parts.push(`<text x="${x + 34}" y="${(box.y0 + box.y1) / 2}" ` +
    `font-family="sans-serif" font-size="11" text-anchor="middle" ` +
    `transform="rotate(-90 ${x + 34} ${(box.y0 + box.y1) / 2})">` +
    `${esc(label)}</text>`)
}

export function render(f: Frame): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${f.width}" ` +
    `height="${f.height}" viewBox="0 0 ${f.width} ${f.height}">\n` +
    `<rect width="100%" height="100%" fill="white"/>\n` +
    f.parts.join('\n') + '\n</svg>\n'
}
