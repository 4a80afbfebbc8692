// Build-time API base URL. Empty string means same origin; point it at
// the analytics service when the dashboard is hosted elsewhere.
export const API_BASE = "http://127.0.0.1:8040";
