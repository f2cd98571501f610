// Symmetric diverging color scale: red at -1, neutral gray at 0, blue at +1.

const RED = [211, 47, 47];
const GRAY = [158, 158, 158];
const BLUE = [25, 118, 210];

function mix(a: number[], b: number[], t: number): string {
  const c = a.map((v, i) => Math.round(v + (b[i] - v) * t));
  return `rgb(${c[0]}, ${c[1]}, ${c[2]})`;
}

export function sentimentColor(score: number): string {
  const s = Math.max(-1, Math.min(1, score));
  return s < 0 ? mix(GRAY, RED, -s) : mix(GRAY, BLUE, s);
}

/** Background tint for review items: same hue, mostly white. */
export function sentimentTint(score: number, alpha = 0.25): string {
  const s = Math.max(-1, Math.min(1, score));
  const target = s < 0 ? RED : BLUE;
  const strength = Math.abs(s) * alpha;
  const c = target.map((v) => Math.round(255 + (v - 255) * strength));
  return `rgb(${c[0]}, ${c[1]}, ${c[2]})`;
}
