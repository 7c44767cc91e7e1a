/** Thin canvas painter for scene draw lists; no logic lives here. */

import { Primitive } from "./scene.js";

export function paint(ctx: CanvasRenderingContext2D, scene: Primitive[],
                      width: number, height: number): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#0b0e14";
  ctx.fillRect(0, 0, width, height);
  for (const p of scene) {
    ctx.globalAlpha = ("alpha" in p && p.alpha !== undefined) ? p.alpha : 1.0;
    switch (p.kind) {
      case "circle":
        ctx.beginPath();
        ctx.arc(p.x, p.y, p.r, 0, 2 * Math.PI);
        if (p.fill) { ctx.fillStyle = p.fill; ctx.fill(); }
        if (p.stroke) { ctx.strokeStyle = p.stroke; ctx.stroke(); }
        break;
      case "line":
        ctx.beginPath();
        ctx.moveTo(p.x1, p.y1);
        ctx.lineTo(p.x2, p.y2);
        ctx.strokeStyle = p.stroke;
        ctx.stroke();
        break;
      case "rect":
        if (p.fill) { ctx.fillStyle = p.fill; ctx.fillRect(p.x, p.y, p.w, p.h); }
        if (p.stroke) { ctx.strokeStyle = p.stroke; ctx.strokeRect(p.x, p.y, p.w, p.h); }
        break;
      case "text":
        ctx.fillStyle = p.fill ?? "#c8d4e8";
        ctx.font = `${p.size ?? 13}px system-ui, sans-serif`;
        ctx.fillText(p.text, p.x, p.y);
        break;
      case "polyline": {
        if (p.points.length < 2) break;
        ctx.beginPath();
        const first = p.points[0]!;
        ctx.moveTo(first.x, first.y);
        for (const pt of p.points.slice(1)) ctx.lineTo(pt.x, pt.y);
        ctx.strokeStyle = p.stroke;
        ctx.stroke();
        break;
      }
    }
  }
  ctx.globalAlpha = 1.0;
}
