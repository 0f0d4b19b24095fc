/** Display helpers for canonical rational strings ("0", "1", "p/q").
 * Conversion is for presentation only; comparisons and decisions always
 * use the server's exact values. */

export function rationalToNumber(text: string): number {
  if (!text.includes("/")) {
    return Number(text);
  }
  const [p, q] = text.split("/");
  return Number(p) / Number(q);
}

export function formatValue(text: string): string {
  const approx = rationalToNumber(text);
  if (text === "0" || text === "1") {
    return text;
  }
  return `${text} ≈ ${approx.toFixed(4)}`;
}
