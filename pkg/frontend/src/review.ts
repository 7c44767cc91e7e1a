/**
 * Session review: completed-trial tables from the results CSV the service
 * (and the experiment harness) write, grouped by condition, plus
 * sparkline geometry for locally recorded traces. Deviations and times
 * are kept as the exact strings from the file; the UI computes nothing.
 */

export const RESULTS_HEADER =
  "participant,condition,direction_deg,zone,deviation_mm,time_s,status";

export interface ResultRow {
  participant: string;
  condition: string;
  direction_deg: string;
  zone: string;
  deviation_mm: string; // verbatim
  time_s: string;       // verbatim
  status: string;
}

export function parseResultsCsv(text: string): ResultRow[] {
  const lines = text.split("\n").map((l) => l.trim()).filter((l) => l.length > 0);
  if (lines.length === 0) return [];
  if (lines[0] !== RESULTS_HEADER) {
    throw new Error(`unexpected results header: ${lines[0]}`);
  }
  return lines.slice(1).map((line, i) => {
    const parts = line.split(",");
    if (parts.length !== 7) {
      throw new Error(`row ${i + 2}: expected 7 columns, got ${parts.length}`);
    }
    const [participant, condition, direction_deg, zone, deviation_mm, time_s, status] =
      parts as [string, string, string, string, string, string, string];
    return { participant, condition, direction_deg, zone, deviation_mm, time_s, status };
  });
}

export function groupByCondition(rows: ResultRow[]): Map<string, ResultRow[]> {
  const groups = new Map<string, ResultRow[]>();
  for (const row of rows) {
    const bucket = groups.get(row.condition);
    if (bucket) bucket.push(row);
    else groups.set(row.condition, [row]);
  }
  return groups;
}

/**
 * Normalize a recorded trace into a w x h box for a sparkline polyline.
 * Returns [] for traces with fewer than two points.
 */
export function sparklinePoints(
  trace: Array<{ x: number; y: number }>, w: number, h: number,
): Array<{ x: number; y: number }> {
  if (trace.length < 2) return [];
  const first = trace[0]!;
  let minX = first.x, maxX = first.x, minY = first.y, maxY = first.y;
  for (const p of trace) {
    minX = Math.min(minX, p.x); maxX = Math.max(maxX, p.x);
    minY = Math.min(minY, p.y); maxY = Math.max(maxY, p.y);
  }
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const scale = Math.min(w / spanX, h / spanY);
  return trace.map((p) => ({
    x: (p.x - minX) * scale,
    y: (p.y - minY) * scale,
  }));
}
