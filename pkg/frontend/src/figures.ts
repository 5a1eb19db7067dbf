import { existsSync, mkdirSync, writeFileSync } from 'fs'
import { join } from 'path'
import { Table, column, distinct, parseCsv, requireColumns } from './csv'
import {
  Frame, SERIES_COLORS, axes, colorbar, colormap, extent, frame, innerBox,
  legend, linearScale, polyline, render as renderSvg, text, title,
} from './svg'

export interface FigureSpec {
  id: number
  csvDir: string
  outDir: string
}

interface FigureDef {
  stem: string
  columns: string[]
  draw: (table: Table) => string
}

// ---------------------------------------------------------------------------
// line-chart renderers
// ---------------------------------------------------------------------------

function vectorTrace(table: Table, label: string): string {
  const t = column(table, 't')
  const panels: [string, string][] = [
    ['speed_mps', 'speed [m/s]'],
    ['dir_az_rad', 'azimuth direction [rad]'],
    ['dir_el_rad', 'elevation direction [rad]'],
  ]
  const f = frame(720, 720)
  title(f, label)
  const panelH = (f.height - f.margin.top - f.margin.bottom) / 3
  panels.forEach(([col, yLabel], i) => {
    const y = column(table, col)
    const y0 = f.margin.top + i * panelH
    const xs = linearScale(extent(t), [f.margin.left, f.width - f.margin.right])
    const ys = linearScale(extent(y), [y0 + panelH - 24, y0 + 6])
    f.parts.push(`<rect x="${f.margin.left}" y="${y0 + 6}" ` +
      `width="${f.width - f.margin.left - f.margin.right}" ` +
      `height="${panelH - 30}" fill="none" stroke="#333"/>`)
    polyline(f, xs, ys, t, y, SERIES_COLORS[i])
    text(f, f.margin.left + 6, y0 + 20, yLabel)
  })
  text(f, f.width / 2, f.height - 18, 'time [s]', 'text-anchor="middle"')
  return renderSvg(f)
}

function positions(table: Table): string {
  const hap = column(table, 'hap')
  const x = column(table, 'x_m')
  const y = column(table, 'y_m')
  const f = frame(640, 560)
  title(f, 'Platform positions')
  const box = innerBox(f)
  const xs = linearScale(extent(x), [box.x0, box.x1])
  const ys = linearScale(extent(y), [box.y1, box.y0])
  axes(f, xs, ys, 'x [m]', 'y [m]')
  const ids = distinct(hap)
  ids.forEach((id, k) => {
    for (let i = 0; i < x.length; i++) {
      if (hap[i] === id) {
        f.parts.push(`<circle cx="${xs(x[i]).toFixed(1)}" ` +
          `cy="${ys(y[i]).toFixed(1)}" r="2.5" fill="${SERIES_COLORS[k]}" ` +
          `class="series"/>`)
      }
    }
  })
  legend(f, ids.map((id, k) => ({ label: `platform ${id}`,
                                  color: SERIES_COLORS[k] })))
  return renderSvg(f)
}

interface SweepAxes { x: string, y: string, xLabel: string, yLabel: string }

/** One curve per (n_total, deviation) pair over the swept x column. */
function sweepCurves(table: Table, ax: SweepAxes): string {
  const n = column(table, 'n_total')
  const dev = column(table, 'deviation_deg')
  const x = column(table, ax.x)
  const y = column(table, ax.y)
  const f = frame(720, 480, 60)
  title(f, `${ax.yLabel} vs ${ax.xLabel}`)
  const box = innerBox(f)
  const xs = linearScale(extent(x), [box.x0, box.x1])
  const ys = linearScale(extent(y), [box.y1, box.y0])
  axes(f, xs, ys, ax.xLabel, ax.yLabel)
  const keys: string[] = []
  for (let i = 0; i < n.length; i++) {
    const key = `${n[i]}|${dev[i]}`
    if (!keys.includes(key)) keys.push(key)
  }
  const entries = keys.map((key, k) => {
    const [kn, kd] = key.split('|').map(Number)
    const cx: number[] = []
    const cy: number[] = []
    for (let i = 0; i < n.length; i++) {
      if (n[i] === kn && dev[i] === kd) { cx.push(x[i]); cy.push(y[i]) }
    }
    const color = SERIES_COLORS[k % SERIES_COLORS.length]
    polyline(f, xs, ys, cx, cy, color)
    return { label: `N=${kn}, dev ${kd}°`, color }
  })
  legend(f, entries)
  return renderSvg(f)
}

function pdfCurves(table: Table): string {
  const td = column(table, 'theta_dev_deg')
  const pd = column(table, 'phi_dev_deg')
  const x = column(table, 'sinr_db')
  const y = column(table, 'density')
  const f = frame(720, 480, 60)
  title(f, 'SINR density per deviation')
  const box = innerBox(f)
  const xs = linearScale(extent(x), [box.x0, box.x1])
  const ys = linearScale(extent(y), [box.y1, box.y0])
  axes(f, xs, ys, 'SINR [dB]', 'density [1/dB]')
  const keys: string[] = []
  for (let i = 0; i < td.length; i++) {
    const key = `${td[i]}|${pd[i]}`
    if (!keys.includes(key)) keys.push(key)
  }
  const entries = keys.map((key, k) => {
    const [kt, kp] = key.split('|').map(Number)
    const cx: number[] = []
    const cy: number[] = []
    for (let i = 0; i < td.length; i++) {
      if (td[i] === kt && pd[i] === kp) { cx.push(x[i]); cy.push(y[i]) }
    }
    const color = SERIES_COLORS[k % SERIES_COLORS.length]
    polyline(f, xs, ys, cx, cy, color)
    return { label: `(${kt}°, ${kp}°)`, color }
  })
  legend(f, entries)
  return renderSvg(f)
}

// ---------------------------------------------------------------------------
// grid renderers (heatmap + isometric surface)
// ---------------------------------------------------------------------------

interface Grid {
  thetas: number[]
  phis: number[]
  values: number[][] // [theta index][phi index]
}

function toGrid(table: Table, valueCol: string): Grid {
  const theta = column(table, 'theta_deg')
  const phi = column(table, 'phi_deg')
  const v = column(table, valueCol)
  const thetas = distinct(theta).sort((a, b) => a - b)
  const phis = distinct(phi).sort((a, b) => a - b)
  const ti = new Map(thetas.map((t, i) => [t, i]))
  const pi = new Map(phis.map((p, i) => [p, i]))
  const values = thetas.map(() => new Array<number>(phis.length).fill(NaN))
  for (let i = 0; i < theta.length; i++) {
    values[ti.get(theta[i])!][pi.get(phi[i])!] = v[i]
  }
  return { thetas, phis, values }
}

function gridPeak(g: Grid): { theta: number, phi: number, value: number } {
  let best = { theta: g.thetas[0], phi: g.phis[0], value: -Infinity }
  for (let i = 0; i < g.thetas.length; i++) {
    for (let j = 0; j < g.phis.length; j++) {
      const v = g.values[i][j]
      if (Number.isFinite(v) && v > best.value) {
        best = { theta: g.thetas[i], phi: g.phis[j], value: v }
      }
    }
  }
  return best
}

/** Downsample a grid axis to at most `cap` samples (keeps endpoints). */
function thin(n: number, cap: number): number[] {
  if (n <= cap) return Array.from({ length: n }, (_, i) => i)
  const idx: number[] = []
  for (let k = 0; k < cap; k++) idx.push(Math.round(k * (n - 1) / (cap - 1)))
  return idx
}

function heatmap(table: Table, valueCol: string, valueLabel: string): string {
  const g = toGrid(table, valueCol)
  const f = frame(760, 560, 90)
  title(f, `${valueLabel} over arrival angles`)
  const box = innerBox(f)
  const xs = linearScale([g.thetas[0], g.thetas[g.thetas.length - 1]],
                         [box.x0, box.x1])
  const ys = linearScale([g.phis[0], g.phis[g.phis.length - 1]],
                         [box.y1, box.y0])
  axes(f, xs, ys, 'azimuth arrival [deg]', 'elevation arrival [deg]')
  const flat = g.values.flat().filter(Number.isFinite)
  const [lo, hi] = extent(flat)
  const ti = thin(g.thetas.length, 200)
  const pj = thin(g.phis.length, 200)
  const w = (box.x1 - box.x0) / ti.length
  const h = (box.y1 - box.y0) / pj.length
  for (let a = 0; a < ti.length; a++) {
    for (let b = 0; b < pj.length; b++) {
      const v = g.values[ti[a]][pj[b]]
      if (!Number.isFinite(v)) continue
      const x = box.x0 + a * w
      const y = box.y1 - (b + 1) * h
      f.parts.push(`<rect x="${x.toFixed(1)}" y="${y.toFixed(1)}" ` +
        `width="${(w + 0.5).toFixed(1)}" height="${(h + 0.5).toFixed(1)}" ` +
        `fill="${colormap((v - lo) / (hi - lo || 1))}"/>`)
    }
  }
  const peak = gridPeak(g)
  f.parts.push(`<circle cx="${xs(peak.theta).toFixed(1)}" ` +
    `cy="${ys(peak.phi).toFixed(1)}" r="5" fill="none" stroke="red" ` +
    `stroke-width="2" class="peak"/>`)
  text(f, xs(peak.theta) + 8, ys(peak.phi) - 8,
       `peak ${peak.value.toFixed(2)} @ (${peak.theta}°, ${peak.phi}°)`,
       'fill="red"')
  colorbar(f, lo, hi, valueLabel)
  return renderSvg(f)
}

/** Isometric 3D surface, painter's order, colormapped, peak annotated. */
function surface(table: Table, valueCol: string, valueLabel: string): string {
  const g = toGrid(table, valueCol)
  const f = frame(820, 620, 100)
  title(f, `${valueLabel} surface`)
  const flat = g.values.flat().filter(Number.isFinite)
  const [lo, hi] = extent(flat)
  const ti = thin(g.thetas.length, 90)
  const pj = thin(g.phis.length, 90)

  // isometric projection of (u, v, w) unit-cube coordinates
  const cos30 = Math.cos(Math.PI / 6)
  const sin30 = 0.5
  const sx = 330
  const sy = 200
  const ox = f.width / 2 - 40
  const oy = f.height - 130
  const proj = (u: number, v: number, w: number): [number, number] =>
    [ox + (u - v) * cos30 * sx / 2,
     oy - (u + v) * sin30 * sy / 2 - w * 220]
  const unit = (arr: number[], i: number) =>
    (arr[i] - arr[0]) / ((arr[arr.length - 1] - arr[0]) || 1)

  // back-to-front: larger (u + v) drawn first
  const quads: { depth: number, path: string, fill: string }[] = []
  for (let a = 0; a < ti.length - 1; a++) {
    for (let b = 0; b < pj.length - 1; b++) {
      const corners: [number, number][] = []
      let sum = 0
      let ok = true
      for (const [da, db] of [[0, 0], [1, 0], [1, 1], [0, 1]] as const) {
        const v = g.values[ti[a + da]][pj[b + db]]
        if (!Number.isFinite(v)) { ok = false; break }
        sum += v
        const w = (v - lo) / (hi - lo || 1)
        corners.push(proj(unit(g.thetas, ti[a + da]),
                          unit(g.phis, pj[b + db]), w))
      }
      if (!ok) continue
      const mean = sum / 4
      quads.push({
        depth: unit(g.thetas, ti[a]) + unit(g.phis, pj[b]),
        path: corners.map(c => `${c[0].toFixed(1)},${c[1].toFixed(1)}`).join(' '),
        fill: colormap((mean - lo) / (hi - lo || 1)),
      })
    }
  }
  quads.sort((q1, q2) => q2.depth - q1.depth)
  for (const q of quads) {
    f.parts.push(`<polygon points="${q.path}" fill="${q.fill}" ` +
      `stroke="${q.fill}" stroke-width="0.4"/>`)
  }

  // axis hints along the two base edges
  const t0 = proj(0, 0, 0)
  const t1 = proj(1, 0, 0)
  const p1 = proj(0, 1, 0)
  f.parts.push(`<line x1="${t0[0]}" y1="${t0[1]}" x2="${t1[0]}" y2="${t1[1]}" stroke="#666"/>`)
  f.parts.push(`<line x1="${t0[0]}" y1="${t0[1]}" x2="${p1[0]}" y2="${p1[1]}" stroke="#666"/>`)
  text(f, (t0[0] + t1[0]) / 2 + 20, (t0[1] + t1[1]) / 2 + 28,
       `azimuth ${g.thetas[0]}..${g.thetas[g.thetas.length - 1]} deg`)
  text(f, (t0[0] + p1[0]) / 2 - 180, (t0[1] + p1[1]) / 2 + 28,
       `elevation ${g.phis[0]}..${g.phis[g.phis.length - 1]} deg`)

  const peak = gridPeak(g)
  const pk = proj(unit(g.thetas, g.thetas.indexOf(peak.theta)),
                  unit(g.phis, g.phis.indexOf(peak.phi)), 1)
  f.parts.push(`<circle cx="${pk[0].toFixed(1)}" cy="${pk[1].toFixed(1)}" ` +
    `r="5" fill="none" stroke="red" stroke-width="2" class="peak"/>`)
  text(f, pk[0] + 10, pk[1] - 6,
       `peak ${peak.value.toFixed(3)} @ (${peak.theta}°, ${peak.phi}°)`,
       'fill="red"')
  colorbar(f, lo, hi, valueLabel)
  return renderSvg(f)
}

// ---------------------------------------------------------------------------
// figure registry
// ---------------------------------------------------------------------------

const TRACE_COLUMNS = ['hap', 't', 'x_m', 'y_m', 'z_m', 'speed_mps',
                       'dir_az_rad', 'dir_el_rad']

export const FIGURES: Record<number, FigureDef> = {
  1: { stem: 'fig1_hap1_vectors', columns: TRACE_COLUMNS,
       draw: t => vectorTrace(t, 'Platform 1 movement vectors') },
  2: { stem: 'fig2_hap2_vectors', columns: TRACE_COLUMNS,
       draw: t => vectorTrace(t, 'Platform 2 movement vectors') },
  3: { stem: 'fig3_positions', columns: TRACE_COLUMNS,
       draw: positions },
  5: { stem: 'fig5_beam_gain', columns: ['theta_deg', 'phi_deg', 'gain_abs'],
       draw: t => surface(t, 'gain_abs', 'beam gain') },
  6: { stem: 'fig6_sinr_sweep',
       columns: ['n_total', 'deviation_deg', 'snr_db', 'sinr_db'],
       draw: t => sweepCurves(t, { x: 'snr_db', y: 'sinr_db',
                                   xLabel: 'transmit SNR [dB]',
                                   yLabel: 'SINR [dB]' }) },
  7: { stem: 'fig7_capacity_sweep',
       columns: ['n_total', 'deviation_deg', 'snr_db', 'capacity_bps_hz'],
       draw: t => sweepCurves(t, { x: 'snr_db', y: 'capacity_bps_hz',
                                   xLabel: 'transmit SNR [dB]',
                                   yLabel: 'capacity [bit/s/Hz]' }) },
  8: { stem: 'fig8_doppler_sinr_grid',
       columns: ['theta_deg', 'phi_deg', 'sinr_db'],
       draw: t => heatmap(t, 'sinr_db', 'SINR [dB]') },
  9: { stem: 'fig9_doppler_capacity_grid',
       columns: ['theta_deg', 'phi_deg', 'capacity_bps_hz'],
       draw: t => heatmap(t, 'capacity_bps_hz', 'capacity [bit/s/Hz]') },
  10: { stem: 'fig10_sinr_pdf',
        columns: ['theta_dev_deg', 'phi_dev_deg', 'sinr_db', 'density'],
        draw: pdfCurves },
  11: { stem: 'fig11_sinr_pdf_mobile',
        columns: ['theta_dev_deg', 'phi_dev_deg', 'sinr_db', 'density'],
        draw: pdfCurves },
}

/** Render one figure; returns the path of the written SVG.
 *
 * Validation happens before anything is written: a schema-corrupted or
 * empty CSV raises and leaves no output file behind. */
export function render(spec: FigureSpec): string {
  const def = FIGURES[spec.id]
  if (!def) {
    throw new Error(`unknown figure id ${spec.id}; known: ` +
      Object.keys(FIGURES).join(', '))
  }
  const csvPath = join(spec.csvDir, `${def.stem}.csv`)
  if (!existsSync(csvPath)) throw new Error(`input CSV not found: ${csvPath}`)
  const table = parseCsv(csvPath)
  requireColumns(table, def.columns)
  const svg = def.draw(table)
  mkdirSync(spec.outDir, { recursive: true })
  const outPath = join(spec.outDir, `${def.stem}.svg`)
  writeFileSync(outPath, svg)
  return outPath
}
