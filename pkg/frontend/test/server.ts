/** Shared address of the live service the round-trip tests talk to; the
 * vitest globalSetup spawns it there. */
export const API_BASE = "http://127.0.0.1:8977";
