// Deterministic label coloring: the same label id always renders in the
// same hue, spaced around the wheel by the golden angle so nearby ids stay
// visually distinct.

const GOLDEN_ANGLE = 137.50776405003785;

export function labelColor(label: number, alpha = 0.85): string {
  const hue = ((label * GOLDEN_ANGLE) % 360 + 360) % 360;
  return `hsla(${hue.toFixed(2)}, 65%, 55%, ${alpha})`;
}

export function labelStroke(label: number): string {
  const hue = ((label * GOLDEN_ANGLE) % 360 + 360) % 360;
  return `hsl(${hue.toFixed(2)}, 70%, 35%)`;
}
