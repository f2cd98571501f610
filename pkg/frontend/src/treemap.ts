// Squarified treemap layout (Bruls-style), as a pure function so the
// area-proportionality contract is testable without a DOM.

export interface TreemapItem {
  id: string;
  value: number;
  group?: number;
}

export interface TreemapRect {
  id: string;
  x: number;
  y: number;
  w: number;
  h: number;
}

function worstAspect(areas: number[], side: number): number {
  const total = areas.reduce((a, b) => a + b, 0);
  const rowThickness = total / side;
  let worst = 0;
  for (const area of areas) {
    const other = area / rowThickness;
    const ratio = Math.max(rowThickness / other, other / rowThickness);
    worst = Math.max(worst, ratio);
  }
  return worst;
}

/**
 * Lay items out inside width x height. Area of each rect is exactly
 * proportional to its value. Items are placed in the given order; callers
 * wanting similar entities adjacent should sort by group key first.
 */
export function squarify(items: TreemapItem[], width: number, height: number): TreemapRect[] {
  const usable = items.filter((item) => item.value > 0);
  if (usable.length === 0 || width <= 0 || height <= 0) return [];
  const total = usable.reduce((acc, item) => acc + item.value, 0);
  const scale = (width * height) / total;

  const rects: TreemapRect[] = [];
  let x = 0;
  let y = 0;
  let w = width;
  let h = height;
  let row: { id: string; area: number }[] = [];

  const flushRow = () => {
    if (row.length === 0) return;
    const rowArea = row.reduce((acc, item) => acc + item.area, 0);
    if (w >= h) {
      // vertical strip on the left
      const stripWidth = rowArea / h;
      let cy = y;
      for (const item of row) {
        const itemHeight = item.area / stripWidth;
        rects.push({ id: item.id, x, y: cy, w: stripWidth, h: itemHeight });
        cy += itemHeight;
      }
      x += stripWidth;
      w -= stripWidth;
    } else {
      const stripHeight = rowArea / w;
      let cx = x;
      for (const item of row) {
        const itemWidth = item.area / stripHeight;
        rects.push({ id: item.id, x: cx, y, w: itemWidth, h: stripHeight });
        cx += itemWidth;
      }
      y += stripHeight;
      h -= stripHeight;
    }
    row = [];
  };

  for (const item of usable) {
    const area = item.value * scale;
    const side = Math.min(w, h);
    if (row.length > 0) {
      const current = row.map((r) => r.area);
      if (worstAspect([...current, area], side) > worstAspect(current, side)) {
        flushRow();
      }
    }
    row.push({ id: item.id, area });
  }
  flushRow();
  return rects;
}
