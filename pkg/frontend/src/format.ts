// Display formatting only: values pass through, never recomputed.

export function money(cents: number): string {
  const sign = cents < 0 ? "-" : "";
  const abs = Math.abs(cents);
  const dollars = Math.floor(abs / 100);
  const rest = String(abs % 100).padStart(2, "0");
  return `${sign}$${dollars}.${rest}`;
}

export function probabilityText(p: number): string {
  return p.toFixed(2);
}

export function shortDate(iso: string): string {
  return iso.replace("T", " ").replace("+00:00", " UTC");
}

export function minutesText(minutes: number): string {
  return `${Math.round(minutes)} min`;
}

export function countdownText(seconds: number): string {
  const m = Math.floor(seconds / 60);
  const s = seconds % 60;
  return `${m}:${String(s).padStart(2, "0")}`;
}
